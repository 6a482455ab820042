#pragma once

// Reader/writer for the part file layout:
//
//   /                      attribute version = "2.0"
//   /parts/part_<n>/geometry/{2dcurves,3dcurves,surfaces}/<k>/...
//   /parts/part_<n>/geometry/{vertices,bbox}
//   /parts/part_<n>/topology/{edges,faces,halfedges,loops,shells,solids}/<k>/...
//   /parts/part_<n>/mesh/<k>/{points,triangles}
//
// Numeric group names are zero-padded to at least three digits; the reader
// accepts any padding and orders by value.

#include "brep/model.hpp"
#include "brep/validate.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace brep {

inline constexpr std::string_view kFormatVersion = "2.0";

struct ReadOptions {
    /// When false, every part still gets one (empty) mesh slot per face.
    bool load_meshes = true;
};

/// One Part per part_<n> group, ordered by n. Throws FormatError (with the
/// offending path) or IoError. Parts are returned as stored; use validate_part
/// to check invariants.
std::vector<Part> read_parts(const std::filesystem::path& path, const ReadOptions& options = {});

/// result[p][f] is the mesh of face f of part p, or nullopt when that face has
/// no mesh.
using PartMeshes = std::vector<std::optional<FaceMesh>>;
std::vector<PartMeshes> read_meshes(const std::filesystem::path& path);

struct FileHandle {
    std::filesystem::path path;
    std::string version;
    std::size_t part_count = 0;
};

struct WriteOptions {
    /// When false, parts are written as given (used for deliberately corrupt fixtures).
    bool validate = true;
};

/// Writes all parts, replacing any existing file. Throws ValidationError if any
/// part has invariant errors (warnings are allowed), IoError on HDF5 failures.
FileHandle write_parts(const std::vector<Part>& parts, const std::filesystem::path& path,
                       const WriteOptions& options = {});

struct PartReport {
    std::string group;  // e.g. "/parts/part_000"
    std::vector<Violation> violations;
};

struct FileReport {
    std::filesystem::path path;
    bool readable = false;   // opened as HDF5 and parsed into parts
    std::string version;     // empty if absent
    std::vector<std::string> groups;  // inventory of part-level groups found
    std::vector<std::string> errors;  // I/O and layout errors, each naming a path
    std::vector<PartReport> parts;

    bool clean() const;
    /// 0 clean, 1 invariant violations, 2 unreadable or malformed layout.
    int exit_code() const;
};

/// Never throws for file problems; they are recorded in the report.
FileReport validate_file(const std::filesystem::path& path);

/// Group name for entity `index` when the collection has `count` members.
std::string padded_name(std::size_t index, std::size_t count);

/// Expands a (distinct knots, multiplicities) pair into the full knot vector; a
/// full vector (no multiplicities) is returned unchanged.
std::vector<double> normalize_knots(const std::vector<double>& knots,
                                    const std::vector<std::int64_t>& multiplicities);

/// exact_domain is stored as [umin, umax, vmin, vmax]; a vector that only makes
/// sense as [umin, vmin, umax, vmax] is reinterpreted.
UVBox normalize_exact_domain(const std::array<double, 4>& stored);

}  // namespace brep
