#include "h5.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cstdlib>
#include <limits>

namespace brep::h5 {

namespace {

// Anything larger than this is treated as a corrupt header rather than allocated.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 28;
constexpr int kMaxRank = 8;

constexpr std::size_t kMaxStringBytes = std::size_t{1} << 24;

void* capped_alloc(std::size_t size, void*) {
    return size > kMaxStringBytes ? nullptr : std::malloc(size);
}

void capped_free(void* p, void*) { std::free(p); }

Handle plist(hid_t cls) {
    const hid_t id = H5Pcreate(cls);
    if (id < 0) throw IoError("H5Pcreate failed");
    // No timestamps in object headers, so identical inputs give identical bytes.
    H5Pset_obj_track_times(id, 0);
    return {id, H5Pclose};
}

Handle open_dataset(hid_t loc, const std::string& name, const std::string& path) {
    if (!is_dataset(loc, name)) throw FormatError(fmt::format("missing dataset: {}", path));
    const hid_t id = H5Dopen2(loc, name.c_str(), H5P_DEFAULT);
    if (id < 0) throw FormatError(fmt::format("cannot open dataset: {}", path));
    return {id, H5Dclose};
}

std::vector<std::uint64_t> space_dims(hid_t space, const std::string& path) {
    const H5S_class_t cls = H5Sget_simple_extent_type(space);
    if (cls == H5S_SCALAR) return {};
    if (cls == H5S_NULL) throw FormatError(fmt::format("null dataspace: {}", path));
    const int rank = H5Sget_simple_extent_ndims(space);
    if (rank < 0 || rank > kMaxRank) throw FormatError(fmt::format("bad rank: {}", path));
    std::vector<hsize_t> d(static_cast<std::size_t>(rank));
    if (rank > 0 && H5Sget_simple_extent_dims(space, d.data(), nullptr) < 0)
        throw FormatError(fmt::format("cannot read dataspace: {}", path));
    return {d.begin(), d.end()};
}

ValueClass classify(hid_t type) {
    switch (H5Tget_class(type)) {
        case H5T_FLOAT: return ValueClass::Float;
        case H5T_INTEGER:
        case H5T_ENUM: return ValueClass::Integer;
        case H5T_STRING: return ValueClass::String;
        default: return ValueClass::Other;
    }
}

std::uint64_t checked_count(const std::vector<std::uint64_t>& dims, const std::string& path) {
    std::uint64_t n = 1;
    for (std::uint64_t d : dims) {
        if (d != 0 && n > kMaxElements / d)
            throw FormatError(fmt::format("dataset too large: {}", path));
        n *= d;
    }
    if (n > kMaxElements) throw FormatError(fmt::format("dataset too large: {}", path));
    return n;
}

template <typename T>
Array<T> read_numeric(hid_t loc, const std::string& name, const std::string& path, hid_t memtype,
                      bool allow_float) {
    Handle ds = open_dataset(loc, name, path);
    Handle space(H5Dget_space(ds), H5Sclose);
    Handle type(H5Dget_type(ds), H5Tclose);
    if (!space.valid() || !type.valid())
        throw FormatError(fmt::format("cannot inspect dataset: {}", path));
    const ValueClass cls = classify(type);
    if (cls != ValueClass::Integer && !(allow_float && cls == ValueClass::Float))
        throw FormatError(fmt::format("unexpected value type: {}", path));
    Array<T> out;
    out.dims = space_dims(space, path);
    const std::uint64_t n = checked_count(out.dims, path);
    // Contiguous and compact storage must hold every element; a shortfall means
    // the header is corrupt and the extent cannot be trusted.
    Handle dcpl(H5Dget_create_plist(ds), H5Pclose);
    if (dcpl.valid() && H5Pget_layout(dcpl) != H5D_CHUNKED && n > 0 &&
        H5Dget_storage_size(ds) < n * H5Tget_size(type))
        throw FormatError(fmt::format("dataset storage truncated: {}", path));
    out.values.resize(n);
    if (n > 0 && H5Dread(ds, memtype, H5S_ALL, H5S_ALL, H5P_DEFAULT, out.values.data()) < 0)
        throw FormatError(fmt::format("cannot read dataset: {}", path));
    return out;
}

std::string read_string_from(hid_t obj, hid_t type, hid_t space, bool attribute,
                             const std::string& path) {
    if (H5Tget_class(type) != H5T_STRING)
        throw FormatError(fmt::format("expected a string: {}", path));
    if (H5Sget_simple_extent_npoints(space) != 1)
        throw FormatError(fmt::format("expected a single string: {}", path));
    const htri_t vlen = H5Tis_variable_str(type);
    if (vlen < 0) throw FormatError(fmt::format("bad string type: {}", path));
    if (vlen > 0) {
        Handle mem(H5Tcopy(H5T_C_S1), H5Tclose);
        H5Tset_size(mem, H5T_VARIABLE);
        H5Tset_cset(mem, H5Tget_cset(type));
        char* buf = nullptr;
        herr_t rc;
        if (attribute) {
            rc = H5Aread(obj, mem, &buf);
        } else {
            // A corrupt heap reference can claim any length; refuse huge ones.
            Handle xfer(H5Pcreate(H5P_DATASET_XFER), H5Pclose);
            H5Pset_vlen_mem_manager(xfer, capped_alloc, nullptr, capped_free, nullptr);
            rc = H5Dread(obj, mem, H5S_ALL, H5S_ALL, xfer, &buf);
        }
        if (rc < 0) throw FormatError(fmt::format("cannot read string: {}", path));
        std::string out = buf ? std::string(buf) : std::string();
        if (attribute) H5free_memory(buf);
        else std::free(buf);
        return out;
    }
    const std::size_t size = H5Tget_size(type);
    if (size == 0 || size > kMaxElements) throw FormatError(fmt::format("bad string size: {}", path));
    Handle mem(H5Tcopy(H5T_C_S1), H5Tclose);
    H5Tset_size(mem, size);
    H5Tset_strpad(mem, H5T_STR_NULLPAD);
    std::string buf(size, '\0');
    const herr_t rc = attribute ? H5Aread(obj, mem, buf.data())
                                : H5Dread(obj, mem, H5S_ALL, H5S_ALL, H5P_DEFAULT, buf.data());
    if (rc < 0) throw FormatError(fmt::format("cannot read string: {}", path));
    buf.erase(std::find(buf.begin(), buf.end(), '\0'), buf.end());
    if (H5Tget_strpad(type) == H5T_STR_SPACEPAD)
        buf.erase(buf.find_last_not_of(' ') + 1);
    return buf;
}

Handle make_space(const std::vector<std::uint64_t>& dims) {
    if (dims.empty()) return {H5Screate(H5S_SCALAR), H5Sclose};
    std::vector<hsize_t> d(dims.begin(), dims.end());
    return {H5Screate_simple(static_cast<int>(d.size()), d.data(), nullptr), H5Sclose};
}

void write_raw(hid_t loc, const std::string& name, const std::vector<std::uint64_t>& dims,
               hid_t filetype, hid_t memtype, const void* data) {
    Handle space = make_space(dims);
    Handle dcpl = plist(H5P_DATASET_CREATE);
    Handle ds(H5Dcreate2(loc, name.c_str(), filetype, space, H5P_DEFAULT, dcpl, H5P_DEFAULT),
              H5Dclose);
    if (!ds.valid()) throw IoError(fmt::format("cannot create dataset {}", name));
    std::uint64_t n = 1;
    for (auto d : dims) n *= d;
    if (n > 0 && H5Dwrite(ds, memtype, H5S_ALL, H5S_ALL, H5P_DEFAULT, data) < 0)
        throw IoError(fmt::format("cannot write dataset {}", name));
}

Handle vlen_string_type() {
    Handle t(H5Tcopy(H5T_C_S1), H5Tclose);
    H5Tset_size(t, H5T_VARIABLE);
    H5Tset_cset(t, H5T_CSET_UTF8);
    return t;
}

}  // namespace

void silence_errors() {
    thread_local bool done = false;
    if (!done) {
        H5Eset_auto2(H5E_DEFAULT, nullptr, nullptr);
        done = true;
    }
}

Handle open_file_read(const std::string& path) {
    silence_errors();
    const htri_t ok = H5Fis_hdf5(path.c_str());
    if (ok <= 0) throw IoError(fmt::format("not a readable HDF5 file: {}", path));
    const hid_t id = H5Fopen(path.c_str(), H5F_ACC_RDONLY, H5P_DEFAULT);
    if (id < 0) throw IoError(fmt::format("cannot open HDF5 file: {}", path));
    return {id, H5Fclose};
}

Handle create_file(const std::string& path) {
    silence_errors();
    const hid_t id = H5Fcreate(path.c_str(), H5F_ACC_TRUNC, H5P_DEFAULT, H5P_DEFAULT);
    if (id < 0) throw IoError(fmt::format("cannot create HDF5 file: {}", path));
    return {id, H5Fclose};
}

bool has_child(hid_t loc, const std::string& name) {
    if (name.empty() || name.find('/') != std::string::npos) return false;
    if (H5Lexists(loc, name.c_str(), H5P_DEFAULT) <= 0) return false;
    return H5Oexists_by_name(loc, name.c_str(), H5P_DEFAULT) > 0;
}

namespace {
H5O_type_t child_type(hid_t loc, const std::string& name) {
    if (!has_child(loc, name)) return H5O_TYPE_UNKNOWN;
    H5O_info_t info;
    if (H5Oget_info_by_name2(loc, name.c_str(), &info, H5O_INFO_BASIC, H5P_DEFAULT) < 0)
        return H5O_TYPE_UNKNOWN;
    return info.type;
}
}  // namespace

bool is_group(hid_t loc, const std::string& name) {
    return child_type(loc, name) == H5O_TYPE_GROUP;
}

bool is_dataset(hid_t loc, const std::string& name) {
    return child_type(loc, name) == H5O_TYPE_DATASET;
}

Handle open_group(hid_t loc, const std::string& name, const std::string& path) {
    if (!is_group(loc, name)) throw FormatError(fmt::format("missing group: {}", path));
    const hid_t id = H5Gopen2(loc, name.c_str(), H5P_DEFAULT);
    if (id < 0) throw FormatError(fmt::format("cannot open group: {}", path));
    return {id, H5Gclose};
}

Handle create_group(hid_t loc, const std::string& name) {
    Handle gcpl = plist(H5P_GROUP_CREATE);
    const hid_t id = H5Gcreate2(loc, name.c_str(), H5P_DEFAULT, gcpl, H5P_DEFAULT);
    if (id < 0) throw IoError(fmt::format("cannot create group {}", name));
    return {id, H5Gclose};
}

std::vector<std::string> child_names(hid_t group) {
    std::vector<std::string> names;
    hsize_t idx = 0;
    auto cb = [](hid_t, const char* name, const H5L_info_t*, void* op) -> herr_t {
        static_cast<std::vector<std::string>*>(op)->emplace_back(name);
        return 0;
    };
    if (H5Literate(group, H5_INDEX_NAME, H5_ITER_INC, &idx, cb, &names) < 0)
        throw FormatError("cannot list group members");
    return names;
}

std::uint64_t DatasetInfo::element_count() const {
    std::uint64_t n = 1;
    for (auto d : dims) n *= d;
    return n;
}

DatasetInfo dataset_info(hid_t loc, const std::string& name, const std::string& path) {
    Handle ds = open_dataset(loc, name, path);
    Handle space(H5Dget_space(ds), H5Sclose);
    Handle type(H5Dget_type(ds), H5Tclose);
    if (!space.valid() || !type.valid())
        throw FormatError(fmt::format("cannot inspect dataset: {}", path));
    DatasetInfo info;
    info.dims = space_dims(space, path);
    checked_count(info.dims, path);
    info.value_class = classify(type);
    return info;
}

Array<double> read_doubles(hid_t loc, const std::string& name, const std::string& path) {
    return read_numeric<double>(loc, name, path, H5T_NATIVE_DOUBLE, true);
}

Array<std::int64_t> read_ints(hid_t loc, const std::string& name, const std::string& path) {
    return read_numeric<std::int64_t>(loc, name, path, H5T_NATIVE_INT64, false);
}

std::string read_string(hid_t loc, const std::string& name, const std::string& path) {
    Handle ds = open_dataset(loc, name, path);
    Handle space(H5Dget_space(ds), H5Sclose);
    Handle type(H5Dget_type(ds), H5Tclose);
    if (!space.valid() || !type.valid())
        throw FormatError(fmt::format("cannot inspect dataset: {}", path));
    return read_string_from(ds, type, space, false, path);
}

std::string read_string_attribute(hid_t loc, const std::string& name, const std::string& path) {
    if (H5Aexists(loc, name.c_str()) <= 0)
        throw FormatError(fmt::format("missing attribute: {}", path));
    Handle attr(H5Aopen(loc, name.c_str(), H5P_DEFAULT), H5Aclose);
    if (!attr.valid()) throw FormatError(fmt::format("cannot open attribute: {}", path));
    Handle space(H5Aget_space(attr), H5Sclose);
    Handle type(H5Aget_type(attr), H5Tclose);
    if (!space.valid() || !type.valid())
        throw FormatError(fmt::format("cannot inspect attribute: {}", path));
    return read_string_from(attr, type, space, true, path);
}

void write_doubles(hid_t loc, const std::string& name, const std::vector<std::uint64_t>& dims,
                   const double* data) {
    write_raw(loc, name, dims, H5T_IEEE_F64LE, H5T_NATIVE_DOUBLE, data);
}

void write_ints(hid_t loc, const std::string& name, const std::vector<std::uint64_t>& dims,
                const std::int64_t* data) {
    write_raw(loc, name, dims, H5T_STD_I64LE, H5T_NATIVE_INT64, data);
}

void write_bytes(hid_t loc, const std::string& name, const std::vector<std::uint64_t>& dims,
                 const std::uint8_t* data) {
    write_raw(loc, name, dims, H5T_STD_U8LE, H5T_NATIVE_UINT8, data);
}

void write_string(hid_t loc, const std::string& name, const std::string& value) {
    Handle type = vlen_string_type();
    const char* ptr = value.c_str();
    write_raw(loc, name, {}, type, type, &ptr);
}

void write_string_attribute(hid_t loc, const std::string& name, const std::string& value) {
    Handle type = vlen_string_type();
    Handle space(H5Screate(H5S_SCALAR), H5Sclose);
    Handle attr(H5Acreate2(loc, name.c_str(), type, space, H5P_DEFAULT, H5P_DEFAULT), H5Aclose);
    if (!attr.valid()) throw IoError(fmt::format("cannot create attribute {}", name));
    const char* ptr = value.c_str();
    if (H5Awrite(attr, type, &ptr) < 0) throw IoError(fmt::format("cannot write attribute {}", name));
}

}  // namespace brep::h5
