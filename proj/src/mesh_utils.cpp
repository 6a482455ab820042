#include "brep/mesh_utils.hpp"

#include "brep/errors.hpp"

#include <fmt/core.h>

#include <cmath>
#include <fstream>
#include <unordered_map>

namespace brep {

namespace {

struct CellKey {
    std::int64_t x, y, z;
    bool operator==(const CellKey&) const = default;
};

struct CellHash {
    std::size_t operator()(const CellKey& k) const {
        std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9e3779b97f4a7c15ULL;
        h ^= static_cast<std::uint64_t>(k.y) * 0xc2b2ae3d27d4eb4fULL + (h << 6) + (h >> 2);
        h ^= static_cast<std::uint64_t>(k.z) * 0x165667b19e3779f9ULL + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

void append(TriangleMesh& out, const FaceMesh& m, bool flip) {
    const auto base = static_cast<Index>(out.vertices.size());
    const auto n = static_cast<Index>(m.points.size());
    out.vertices.insert(out.vertices.end(), m.points.begin(), m.points.end());
    for (const auto& t : m.triangles) {
        if (t[0] < 0 || t[1] < 0 || t[2] < 0 || t[0] >= n || t[1] >= n || t[2] >= n) {
            ++out.dropped_triangles;
            continue;
        }
        out.triangles.push_back(flip ? std::array<Index, 3>{base + t[0], base + t[2], base + t[1]}
                                     : std::array<Index, 3>{base + t[0], base + t[1], base + t[2]});
    }
}

}  // namespace

TriangleMesh weld(const TriangleMesh& mesh, double relative_tolerance) {
    TriangleMesh out;
    out.dropped_triangles = mesh.dropped_triangles;
    if (mesh.vertices.empty()) {
        out.triangles = mesh.triangles;
        return out;
    }
    Vec3 lo = mesh.vertices[0], hi = mesh.vertices[0];
    for (const Vec3& p : mesh.vertices) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double tol = relative_tolerance * (hi - lo).norm();
    std::vector<Index> remap(mesh.vertices.size());
    if (tol <= 0) {
        // All points coincide (or a single point): one representative.
        out.vertices.push_back(mesh.vertices[0]);
        std::fill(remap.begin(), remap.end(), 0);
    } else {
        std::unordered_map<CellKey, std::vector<Index>, CellHash> grid;
        auto cell = [&](const Vec3& p) {
            return CellKey{static_cast<std::int64_t>(std::floor((p.x() - lo.x()) / tol)),
                           static_cast<std::int64_t>(std::floor((p.y() - lo.y()) / tol)),
                           static_cast<std::int64_t>(std::floor((p.z() - lo.z()) / tol))};
        };
        for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
            const Vec3& p = mesh.vertices[i];
            const CellKey c = cell(p);
            Index found = -1;
            for (std::int64_t dx = -1; dx <= 1 && found < 0; ++dx)
                for (std::int64_t dy = -1; dy <= 1 && found < 0; ++dy)
                    for (std::int64_t dz = -1; dz <= 1 && found < 0; ++dz) {
                        const auto it = grid.find({c.x + dx, c.y + dy, c.z + dz});
                        if (it == grid.end()) continue;
                        for (Index r : it->second)
                            if ((out.vertices[static_cast<std::size_t>(r)] - p).norm() <= tol &&
                                (found < 0 || r < found))
                                found = r;
                    }
            if (found < 0) {
                found = static_cast<Index>(out.vertices.size());
                out.vertices.push_back(p);
                grid[c].push_back(found);
            }
            remap[i] = found;
        }
    }
    out.triangles.reserve(mesh.triangles.size());
    for (const auto& t : mesh.triangles)
        out.triangles.push_back({remap[static_cast<std::size_t>(t[0])], remap[static_cast<std::size_t>(t[1])],
                                 remap[static_cast<std::size_t>(t[2])]});
    return out;
}

TriangleMesh get_mesh(const std::vector<PartMeshes>& meshes, const std::vector<Part>* parts) {
    TriangleMesh raw;
    for (std::size_t p = 0; p < meshes.size(); ++p)
        for (std::size_t f = 0; f < meshes[p].size(); ++f) {
            const auto& m = meshes[p][f];
            if (!m || m->empty()) continue;
            bool flip = false;
            if (parts && p < parts->size() && f < (*parts)[p].topology.faces.size())
                flip = !(*parts)[p].topology.faces[f].surface_orientation;
            append(raw, *m, flip);
        }
    return weld(raw);
}

TriangleMesh get_mesh(const std::vector<Part>& parts) {
    TriangleMesh raw;
    for (const Part& part : parts)
        for (std::size_t f = 0; f < part.meshes.size(); ++f) {
            if (part.meshes[f].empty()) continue;
            const bool flip = f < part.topology.faces.size() && !part.topology.faces[f].surface_orientation;
            append(raw, part.meshes[f], flip);
        }
    return weld(raw);
}

std::size_t failed_mesh_count(const Part& part) {
    std::size_t n = 0;
    for (std::size_t f = 0; f < part.topology.faces.size(); ++f)
        n += f >= part.meshes.size() || part.meshes[f].empty();
    return n;
}

MeshFailureReport mesh_failure_rate(const std::vector<std::filesystem::path>& paths) {
    MeshFailureReport report;
    for (const auto& path : paths) {
        FileMeshFailures file;
        file.path = path;
        try {
            for (const PartMeshes& part : read_meshes(path)) {
                file.faces += part.size();
                for (const auto& m : part) file.failed += !m.has_value();
            }
            report.faces += file.faces;
            report.failed += file.failed;
        } catch (const Error& e) {
            file.error = e.what();
        }
        report.files.push_back(std::move(file));
    }
    return report;
}

void write_obj(const TriangleMesh& mesh, std::ostream& out) {
    for (const Vec3& v : mesh.vertices) out << fmt::format("v {:.17g} {:.17g} {:.17g}\n", v.x(), v.y(), v.z());
    for (const auto& t : mesh.triangles) out << fmt::format("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1);
}

void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
    write_obj(mesh, out);
    if (!out) throw IoError(fmt::format("write failed: {}", path.string()));
}

}  // namespace brep
