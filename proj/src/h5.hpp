#pragma once

// Thin RAII layer over the HDF5 C API, private to the library.

#include "brep/errors.hpp"

#include <hdf5.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace brep::h5 {

/// Turns off HDF5's automatic error printing for the calling thread.
void silence_errors();

class Handle {
public:
    using Closer = herr_t (*)(hid_t);

    Handle() = default;
    Handle(hid_t id, Closer closer) : id_(id), closer_(closer) {}
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    Handle(Handle&& o) noexcept : id_(std::exchange(o.id_, H5I_INVALID_HID)), closer_(o.closer_) {}
    Handle& operator=(Handle&& o) noexcept {
        if (this != &o) {
            reset();
            id_ = std::exchange(o.id_, H5I_INVALID_HID);
            closer_ = o.closer_;
        }
        return *this;
    }
    ~Handle() { reset(); }

    hid_t get() const { return id_; }
    operator hid_t() const { return id_; }
    bool valid() const { return id_ >= 0; }

    void reset() {
        if (id_ >= 0 && closer_) closer_(id_);
        id_ = H5I_INVALID_HID;
    }

private:
    hid_t id_ = H5I_INVALID_HID;
    Closer closer_ = nullptr;
};

Handle open_file_read(const std::string& path);
Handle create_file(const std::string& path);

/// True if `name` is a direct child link of `loc` that resolves to an object.
bool has_child(hid_t loc, const std::string& name);
bool is_group(hid_t loc, const std::string& name);
bool is_dataset(hid_t loc, const std::string& name);

/// Opens a child group; `path` is used for error messages only.
Handle open_group(hid_t loc, const std::string& name, const std::string& path);
Handle create_group(hid_t loc, const std::string& name);

/// Names of the direct children of a group, in HDF5 name order.
std::vector<std::string> child_names(hid_t group);

enum class ValueClass { Float, Integer, String, Other };

struct DatasetInfo {
    std::vector<std::uint64_t> dims;  // empty for scalar datasets
    ValueClass value_class = ValueClass::Other;
    std::uint64_t element_count() const;
};

DatasetInfo dataset_info(hid_t loc, const std::string& name, const std::string& path);

template <typename T>
struct Array {
    std::vector<std::uint64_t> dims;
    std::vector<T> values;
};

Array<double> read_doubles(hid_t loc, const std::string& name, const std::string& path);
Array<std::int64_t> read_ints(hid_t loc, const std::string& name, const std::string& path);
std::string read_string(hid_t loc, const std::string& name, const std::string& path);
std::string read_string_attribute(hid_t loc, const std::string& name, const std::string& path);

void write_doubles(hid_t loc, const std::string& name, const std::vector<std::uint64_t>& dims,
                   const double* data);
void write_ints(hid_t loc, const std::string& name, const std::vector<std::uint64_t>& dims,
                const std::int64_t* data);
void write_bytes(hid_t loc, const std::string& name, const std::vector<std::uint64_t>& dims,
                 const std::uint8_t* data);
void write_string(hid_t loc, const std::string& name, const std::string& value);
void write_string_attribute(hid_t loc, const std::string& name, const std::string& value);

}  // namespace brep::h5
