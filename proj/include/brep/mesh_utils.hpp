#pragma once

// Concatenation of per-face meshes into one welded triangle mesh.

#include "brep/hdf5_io.hpp"
#include "brep/model.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace brep {

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<Index, 3>> triangles;
    /// Triangles dropped because they referenced missing points.
    std::size_t dropped_triangles = 0;

    bool empty() const { return vertices.empty() && triangles.empty(); }
};

/// Relative weld tolerance (times the bounding-box diagonal of all points).
inline constexpr double kWeldTolerance = 1e-7;

/// Concatenates every non-empty face mesh in part/face order and welds points
/// closer than kWeldTolerance times the diagonal; the first point of a cluster
/// is kept. Triangles of faces with surface_orientation false are reversed.
TriangleMesh get_mesh(const std::vector<Part>& parts);

/// Same for meshes as returned by read_meshes. Without parts no winding is
/// changed; with parts (same shape as the meshes) orientation flags apply.
TriangleMesh get_mesh(const std::vector<PartMeshes>& meshes, const std::vector<Part>* parts = nullptr);

/// Welds an arbitrary mesh with the same rule.
TriangleMesh weld(const TriangleMesh& mesh, double relative_tolerance = kWeldTolerance);

struct FileMeshFailures {
    std::filesystem::path path;
    std::size_t faces = 0;
    std::size_t failed = 0;
    std::string error;  // non-empty when the file could not be read

    double rate() const { return faces == 0 ? 0.0 : static_cast<double>(failed) / static_cast<double>(faces); }
};

struct MeshFailureReport {
    std::vector<FileMeshFailures> files;
    std::size_t faces = 0;  // readable files only
    std::size_t failed = 0;

    double rate() const { return faces == 0 ? 0.0 : static_cast<double>(failed) / static_cast<double>(faces); }
};

/// Fraction of faces without a mesh, per file and pooled over readable files.
MeshFailureReport mesh_failure_rate(const std::vector<std::filesystem::path>& paths);
std::size_t failed_mesh_count(const Part& part);

/// Wavefront OBJ: "v x y z" lines, then "f i j k" with 1-based indices.
void write_obj(const TriangleMesh& mesh, std::ostream& out);
void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path);

}  // namespace brep
