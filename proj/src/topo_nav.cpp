#include "brep/topo_nav.hpp"

#include "brep/errors.hpp"
#include "brep/geom_eval.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <stdexcept>

namespace brep {

namespace {

template <typename T>
const T& at(const std::vector<T>& v, Index i, const char* what) {
    if (i < 0 || static_cast<std::size_t>(i) >= v.size())
        throw InconsistentTopology(fmt::format("{} index {} out of range", what, i));
    return v[static_cast<std::size_t>(i)];
}

void check_range(Index i, std::size_t n, const char* what) {
    if (i < 0 || static_cast<std::size_t>(i) >= n)
        throw InconsistentTopology(fmt::format("{} index {} out of range", what, i));
}

std::size_t u(Index i) { return static_cast<std::size_t>(i); }

}  // namespace

const Face& TopoRef::face() const {
    if (!is_face()) throw std::logic_error("TopoRef is not a face");
    return part->topology.faces.at(u(index));
}

const Edge& TopoRef::edge() const {
    if (!is_edge()) throw std::logic_error("TopoRef is not an edge");
    return part->topology.edges.at(u(index));
}

const SurfaceSpec& TopoRef::surface() const {
    return part->geometry.surfaces.at(u(face().surface));
}

const CurveSpec& TopoRef::curve() const {
    return part->geometry.curves3d.at(u(edge().curve3d));
}

ReverseIndex build_reverse_index(const Part& part) {
    const TopologyStore& t = part.topology;
    const GeometryStore& g = part.geometry;
    ReverseIndex r;
    r.halfedge_loop.assign(t.halfedges.size(), -1);
    r.loop_face.assign(t.loops.size(), -1);
    r.face_shells.resize(t.faces.size());
    r.shell_solids.resize(t.shells.size());
    r.edge_halfedges.resize(t.edges.size());
    r.surface_faces.resize(g.surfaces.size());
    r.curve3d_edges.resize(g.curves3d.size());

    for (std::size_t s = 0; s < t.solids.size(); ++s)
        for (Index sh : t.solids[s].shells) {
            check_range(sh, t.shells.size(), "shell");
            auto& owners = r.shell_solids[u(sh)];
            if (std::find(owners.begin(), owners.end(), static_cast<Index>(s)) == owners.end())
                owners.push_back(static_cast<Index>(s));
        }
    for (std::size_t s = 0; s < t.shells.size(); ++s)
        for (Index f : t.shells[s].faces) {
            check_range(f, t.faces.size(), "face");
            auto& owners = r.face_shells[u(f)];
            if (std::find(owners.begin(), owners.end(), static_cast<Index>(s)) == owners.end())
                owners.push_back(static_cast<Index>(s));
        }
    for (std::size_t f = 0; f < t.faces.size(); ++f) {
        const Face& face = t.faces[f];
        check_range(face.surface, g.surfaces.size(), "surface");
        r.surface_faces[u(face.surface)].push_back(static_cast<Index>(f));
        for (Index l : face.loops) {
            check_range(l, t.loops.size(), "loop");
            Index& owner = r.loop_face[u(l)];
            if (owner >= 0 && owner != static_cast<Index>(f))
                throw InconsistentTopology(
                    fmt::format("loop {} belongs to faces {} and {}", l, owner, f));
            owner = static_cast<Index>(f);
        }
    }
    for (std::size_t l = 0; l < t.loops.size(); ++l)
        for (Index h : t.loops[l].halfedges) {
            check_range(h, t.halfedges.size(), "half-edge");
            Index& owner = r.halfedge_loop[u(h)];
            if (owner >= 0 && owner != static_cast<Index>(l))
                throw InconsistentTopology(
                    fmt::format("half-edge {} belongs to loops {} and {}", h, owner, l));
            owner = static_cast<Index>(l);
        }
    for (std::size_t h = 0; h < t.halfedges.size(); ++h) {
        const Index e = t.halfedges[h].edge;
        check_range(e, t.edges.size(), "edge");
        r.edge_halfedges[u(e)].push_back(static_cast<Index>(h));
    }
    for (std::size_t e = 0; e < t.edges.size(); ++e) {
        const Index c = t.edges[e].curve3d;
        check_range(c, g.curves3d.size(), "3D curve");
        r.curve3d_edges[u(c)].push_back(static_cast<Index>(e));
    }
    return r;
}

const ReverseIndex& PartNavigator::reverse() const {
    std::call_once(once_, [this] { index_ = std::make_unique<ReverseIndex>(build_reverse_index(*part_)); });
    return *index_;
}

std::pair<Index, Index> halfedge_vertices(const Part& part, Index halfedge) {
    const HalfEdge& he = at(part.topology.halfedges, halfedge, "half-edge");
    const Edge& e = at(part.topology.edges, he.edge, "edge");
    return he.orientation_wrt_edge ? std::pair{e.start_vertex, e.end_vertex}
                                   : std::pair{e.end_vertex, e.start_vertex};
}

std::vector<OrientedHalfEdge> loop_halfedges_oriented(const Part& part, Index loop) {
    const Loop& l = at(part.topology.loops, loop, "loop");
    if (l.halfedges.empty()) throw OpenLoop(fmt::format("loop {} has no half-edges", loop));
    std::vector<OrientedHalfEdge> out;
    out.reserve(l.halfedges.size());
    for (Index h : l.halfedges)
        out.push_back({h, !at(part.topology.halfedges, h, "half-edge").orientation_wrt_edge});
    for (std::size_t k = 0; k < out.size(); ++k) {
        const Index a = out[k].halfedge;
        const Index b = out[(k + 1) % out.size()].halfedge;
        if (halfedge_vertices(part, a).second != halfedge_vertices(part, b).first)
            throw OpenLoop(fmt::format("loop {}: half-edge {} does not end where {} starts", loop, a, b));
    }
    return out;
}

Interval halfedge_interval(const Part& part, Index halfedge) {
    const HalfEdge& he = at(part.topology.halfedges, halfedge, "half-edge");
    return at(part.geometry.curves2d, he.curve2d, "2D curve").interval;
}

namespace {

double checked_parameter(const Interval& iv, double t, Index halfedge) {
    const double slack = 1e-12 * (1.0 + std::abs(iv.t0) + std::abs(iv.t1));
    if (!(t >= iv.t0 - slack && t <= iv.t1 + slack))
        throw DomainError(fmt::format("half-edge {}: t = {} outside [{}, {}]", halfedge, t, iv.t0, iv.t1));
    return std::clamp(t, iv.t0, iv.t1);
}

}  // namespace

double halfedge_edge_parameter(const Part& part, Index halfedge, double t) {
    const HalfEdge& he = at(part.topology.halfedges, halfedge, "half-edge");
    const Interval p = halfedge_interval(part, halfedge);
    t = checked_parameter(p, t, halfedge);
    const Edge& e = at(part.topology.edges, he.edge, "edge");
    const Interval q = at(part.geometry.curves3d, e.curve3d, "3D curve").interval;
    const double span = p.t1 - p.t0;
    const double s = span > 0 ? (t - p.t0) / span : 0.0;
    const double x = q.t0 + s * (q.t1 - q.t0);
    return he.orientation_wrt_edge ? x : q.t0 + q.t1 - x;
}

Vec3 halfedge_eval(const Part& part, Index halfedge, double t, EvalSpace space) {
    const HalfEdge& he = at(part.topology.halfedges, halfedge, "half-edge");
    if (space == EvalSpace::Param2d) {
        const CurveSpec& c = at(part.geometry.curves2d, he.curve2d, "2D curve");
        return eval_curve(c, checked_parameter(c.interval, t, halfedge)).position;
    }
    const Edge& e = at(part.topology.edges, he.edge, "edge");
    const CurveSpec& c = at(part.geometry.curves3d, e.curve3d, "3D curve");
    return eval_curve(c, halfedge_edge_parameter(part, halfedge, t)).position;
}

Vec3 face_oriented_normal(const Part& part, Index face, double uu, double vv,
                          std::optional<Index> shell) {
    const Face& f = at(part.topology.faces, face, "face");
    const SurfaceSpec& s = at(part.geometry.surfaces, f.surface, "surface");
    Vec3 n = surface_normal(s, uu, vv, f.surface_orientation);
    if (shell) {
        const Shell& sh = at(part.topology.shells, *shell, "shell");
        const auto it = std::find(sh.faces.begin(), sh.faces.end(), face);
        if (it == sh.faces.end())
            throw DomainError(fmt::format("face {} is not used by shell {}", face, *shell));
        const auto k = static_cast<std::size_t>(it - sh.faces.begin());
        if (k < sh.orientation_wrt_solid.size() && !sh.orientation_wrt_solid[k]) n = -n;
    }
    return n;
}

long euler_characteristic(const Part& part) {
    return static_cast<long>(part.geometry.vertices.size()) -
           static_cast<long>(part.topology.edges.size()) +
           static_cast<long>(part.topology.faces.size());
}

}  // namespace brep
