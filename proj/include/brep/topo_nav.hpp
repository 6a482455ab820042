#pragma once

// Navigation over the top-down topology: reverse links, oriented loop
// traversal, half-edge evaluation in UV or world space, and oriented normals.

#include "brep/model.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace brep {

enum class TopoKind { Face, Edge };

/// A face or an edge of a part, as handed to sampling callbacks.
struct TopoRef {
    TopoKind kind = TopoKind::Face;
    Index index = 0;
    const Part* part = nullptr;

    bool is_face() const { return kind == TopoKind::Face; }
    bool is_edge() const { return kind == TopoKind::Edge; }
    /// Throw std::logic_error when called on the wrong kind.
    const Face& face() const;
    const Edge& edge() const;
    const SurfaceSpec& surface() const;
    const CurveSpec& curve() const;
};

/// Inverse of every forward link. Unreferenced children map to -1 / empty.
struct ReverseIndex {
    std::vector<Index> halfedge_loop;
    std::vector<Index> loop_face;
    std::vector<std::vector<Index>> face_shells;
    std::vector<std::vector<Index>> shell_solids;
    std::vector<std::vector<Index>> edge_halfedges;
    std::vector<std::vector<Index>> surface_faces;
    std::vector<std::vector<Index>> curve3d_edges;
};

/// One linear pass. Throws InconsistentTopology when a half-edge sits in two
/// loops or a loop in two faces, and when a forward index is out of range.
ReverseIndex build_reverse_index(const Part& part);

/// Holds a part by reference and builds its reverse index on first request.
/// Safe to share between threads.
class PartNavigator {
public:
    explicit PartNavigator(const Part& part) : part_(&part) {}

    const Part& part() const { return *part_; }
    const ReverseIndex& reverse() const;

private:
    const Part* part_;
    mutable std::once_flag once_;
    mutable std::unique_ptr<ReverseIndex> index_;
};

struct OrientedHalfEdge {
    Index halfedge;
    bool flip;  // true when traversal runs against the edge direction

    bool operator==(const OrientedHalfEdge&) const = default;
};

/// Half-edges of a loop in stored order. Throws OpenLoop if consecutive
/// half-edges do not share a vertex or the cycle does not close.
std::vector<OrientedHalfEdge> loop_halfedges_oriented(const Part& part, Index loop);

/// Vertex indices (start, end) of a half-edge in traversal direction.
std::pair<Index, Index> halfedge_vertices(const Part& part, Index halfedge);

enum class EvalSpace { Param2d, World3d };

/// Interval of the half-edge's pcurve; t passed to halfedge_eval lives here.
Interval halfedge_interval(const Part& part, Index halfedge);

/// Param2d: the pcurve point (u, v, 0). World3d: the edge curve at the
/// affinely corresponding parameter, reversed when the half-edge runs against
/// the edge. Throws DomainError for t outside the interval.
Vec3 halfedge_eval(const Part& part, Index halfedge, double t, EvalSpace space);

/// Edge-curve parameter matching pcurve parameter t of the half-edge.
double halfedge_edge_parameter(const Part& part, Index halfedge, double t);

/// Without a shell: the surface normal flipped by surface_orientation. With a
/// shell: additionally flipped by that shell's orientation_wrt_solid for the
/// face, giving the normal pointing out of the solid. Throws SingularJet, and
/// DomainError if the face is not used by the shell.
Vec3 face_oriented_normal(const Part& part, Index face, double u, double v,
                          std::optional<Index> shell = std::nullopt);

/// V - E + F from the stored counts.
long euler_characteristic(const Part& part);

}  // namespace brep
