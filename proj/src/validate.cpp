#include "brep/validate.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

namespace brep {

namespace {

constexpr double kAxisTol = 1e-9;
constexpr double kBBoxRelTol = 1e-9;
constexpr double kFociTol = 1e-6;
constexpr int kMaxOffsetDepth = 8;

class Collector {
public:
    explicit Collector(std::vector<Violation>& out) : out_(out) {}

    void error(ViolationKind kind, std::string path, std::string message) {
        out_.push_back({kind, Severity::Error, std::move(path), std::move(message)});
    }
    void warning(ViolationKind kind, std::string path, std::string message) {
        out_.push_back({kind, Severity::Warning, std::move(path), std::move(message)});
    }

    void index(Index value, std::size_t count, const std::string& path) {
        if (value < 0 || static_cast<std::size_t>(value) >= count)
            error(ViolationKind::IndexOutOfRange, path,
                  fmt::format("index out of range: {} not in [0, {})", value, count));
    }

    void indices(const std::vector<Index>& values, std::size_t count, const std::string& path) {
        for (Index v : values) index(v, count, path);
    }

private:
    std::vector<Violation>& out_;
};

bool finite(const Vec3& v) { return v.allFinite(); }

void check_unit(Collector& c, const Vec3& axis, const std::string& path) {
    if (!finite(axis) || std::abs(axis.norm() - 1.0) > kAxisTol)
        c.error(ViolationKind::NonUnitAxis, path, fmt::format("axis norm {} != 1", axis.norm()));
}

void check_orthogonal(Collector& c, const Vec3& a, const Vec3& b, const std::string& path) {
    if (std::abs(a.dot(b)) > kAxisTol)
        c.error(ViolationKind::NonOrthogonalAxes, path,
                fmt::format("axes not orthogonal (dot = {})", a.dot(b)));
}

void check_frame2(Collector& c, const Vec3& x, const Vec3& y, const std::string& path) {
    check_unit(c, x, path + "/x_axis");
    check_unit(c, y, path + "/y_axis");
    check_orthogonal(c, x, y, path + "/y_axis");
}

void check_frame3(Collector& c, const Vec3& x, const Vec3& y, const Vec3& z,
                  const std::string& path) {
    check_frame2(c, x, y, path);
    check_unit(c, z, path + "/z_axis");
    check_orthogonal(c, x, z, path + "/z_axis");
    check_orthogonal(c, y, z, path + "/z_axis");
}

void check_transform(Collector& c, const std::optional<Transform>& t, const std::string& path) {
    if (!t) return;
    const Mat3 gram = t->rotation.transpose() * t->rotation;
    if (!t->rotation.allFinite() || !t->translation.allFinite() ||
        (gram - Mat3::Identity()).cwiseAbs().maxCoeff() > kAxisTol)
        c.error(ViolationKind::TransformNotOrthonormal, path + "/transform",
                "rotation block is not orthonormal");
}

void check_knots(Collector& c, const std::vector<double>& knots, std::size_t pole_count,
                 int degree, const std::string& path) {
    if (degree < 1) {
        c.error(ViolationKind::BadDegree, path, fmt::format("degree {} < 1", degree));
        return;
    }
    if (knots.size() != pole_count + static_cast<std::size_t>(degree) + 1)
        c.error(ViolationKind::BadKnots, path,
                fmt::format("knot count {} != poles {} + degree {} + 1", knots.size(),
                            pole_count, degree));
    if (!std::is_sorted(knots.begin(), knots.end()) ||
        !std::all_of(knots.begin(), knots.end(), [](double k) { return std::isfinite(k); }))
        c.error(ViolationKind::BadKnots, path, "knots are not finite and nondecreasing");
    else if (!knots.empty() && knots.front() == knots.back())
        c.error(ViolationKind::BadKnots, path, "knot vector has zero span");
}

void check_weights(Collector& c, const std::vector<double>& weights, std::size_t pole_count,
                   bool rational, const std::string& path) {
    if (!rational && weights.empty()) return;
    if (weights.size() != pole_count) {
        c.error(ViolationKind::BadWeights, path,
                fmt::format("{} weights for {} poles", weights.size(), pole_count));
        return;
    }
    if (!std::all_of(weights.begin(), weights.end(),
                     [](double w) { return std::isfinite(w) && w > 0.0; }))
        c.error(ViolationKind::BadWeights, path, "weights must be positive");
}

void check_planar(Collector& c, const CurveSpec& curve, const std::string& path) {
    auto flat = [](const Vec3& v) { return v.z() == 0.0; };
    bool ok = std::visit(
        [&](const auto& g) -> bool {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, LineCurve>) {
                return flat(g.location) && flat(g.direction);
            } else if constexpr (std::is_same_v<T, CircleCurve>) {
                return flat(g.location) && flat(g.x_axis) && flat(g.y_axis);
            } else if constexpr (std::is_same_v<T, EllipseCurve>) {
                return flat(g.focus1) && flat(g.focus2) && flat(g.x_axis) && flat(g.y_axis);
            } else if constexpr (std::is_same_v<T, BSplineCurve>) {
                return std::all_of(g.poles.begin(), g.poles.end(), flat);
            } else {
                return true;
            }
        },
        curve.geometry);
    if (!ok)
        c.error(ViolationKind::DimensionMismatch, path, "2D curve has non-zero z coordinates");
}

}  // namespace

std::string_view violation_kind_name(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::IndexOutOfRange: return "index out of range";
        case ViolationKind::MatesNotSymmetric: return "mates not symmetric";
        case ViolationKind::MateEdgeMismatch: return "mates reference different edges";
        case ViolationKind::NonManifoldMates: return "non-manifold mates";
        case ViolationKind::OpenLoop: return "open loop";
        case ViolationKind::OuterLoopNotInFace: return "outer loop not in face";
        case ViolationKind::NonUnitAxis: return "non-unit axis";
        case ViolationKind::NonOrthogonalAxes: return "non-orthogonal axes";
        case ViolationKind::TransformNotOrthonormal: return "transform not orthonormal";
        case ViolationKind::TransformOnPlanarCurve: return "transform on 2D curve";
        case ViolationKind::DimensionMismatch: return "dimension mismatch";
        case ViolationKind::BadInterval: return "bad interval";
        case ViolationKind::BadTrimDomain: return "bad trim domain";
        case ViolationKind::BadRadius: return "bad radius";
        case ViolationKind::BadAngle: return "bad angle";
        case ViolationKind::BadKnots: return "bad knots";
        case ViolationKind::BadWeights: return "bad weights";
        case ViolationKind::BadDegree: return "bad degree";
        case ViolationKind::BadPoleGrid: return "bad pole grid";
        case ViolationKind::BadOffset: return "bad offset";
        case ViolationKind::EllipseFoci: return "ellipse foci inconsistent";
        case ViolationKind::VertexOutsideBBox: return "vertex outside bbox";
        case ViolationKind::SingularityMismatch: return "singularity count mismatch";
        case ViolationKind::OrientationListLength: return "orientation list length";
        case ViolationKind::MeshCountMismatch: return "mesh count mismatch";
        case ViolationKind::MeshIndexOutOfRange: return "mesh index out of range";
    }
    return "unknown";
}

bool has_errors(const std::vector<Violation>& violations) {
    return std::any_of(violations.begin(), violations.end(),
                       [](const Violation& v) { return v.severity == Severity::Error; });
}

void validate_curve(const CurveSpec& curve, int expected_dim, const std::string& path,
                    std::vector<Violation>& out) {
    Collector c(out);
    if (curve.dim != 2 && curve.dim != 3)
        c.error(ViolationKind::DimensionMismatch, path, fmt::format("dimension {}", curve.dim));
    else if (curve.dim != expected_dim)
        c.error(ViolationKind::DimensionMismatch, path,
                fmt::format("expected a {}D curve, got {}D", expected_dim, curve.dim));
    if (curve.dim == 2) {
        if (curve.transform)
            c.error(ViolationKind::TransformOnPlanarCurve, path + "/transform",
                    "2D curves carry no transform");
        check_planar(c, curve, path);
    }
    check_transform(c, curve.transform, path);
    if (!std::isfinite(curve.interval.t0) || !std::isfinite(curve.interval.t1) ||
        curve.interval.t0 > curve.interval.t1)
        c.error(ViolationKind::BadInterval, path + "/interval",
                fmt::format("interval [{}, {}]", curve.interval.t0, curve.interval.t1));

    std::visit(
        [&](const auto& g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, LineCurve>) {
                if (!finite(g.location) || !finite(g.direction))
                    c.error(ViolationKind::BadInterval, path + "/direction", "non-finite line");
            } else if constexpr (std::is_same_v<T, CircleCurve>) {
                if (!(g.radius > 0.0) || !std::isfinite(g.radius))
                    c.error(ViolationKind::BadRadius, path + "/radius",
                            fmt::format("radius {} <= 0", g.radius));
                check_frame2(c, g.x_axis, g.y_axis, path);
            } else if constexpr (std::is_same_v<T, EllipseCurve>) {
                if (!(g.min_radius > 0.0) || !(g.maj_radius >= g.min_radius) ||
                    !std::isfinite(g.maj_radius))
                    c.error(ViolationKind::BadRadius, path + "/maj_radius",
                            fmt::format("need maj_radius {} >= min_radius {} > 0", g.maj_radius,
                                        g.min_radius));
                check_frame2(c, g.x_axis, g.y_axis, path);
                const double half_focal = 0.5 * (g.focus1 - g.focus2).norm();
                const double expected =
                    std::sqrt(std::max(0.0, g.maj_radius * g.maj_radius -
                                                g.min_radius * g.min_radius));
                if (std::abs(half_focal - expected) > kFociTol * std::max(1.0, g.maj_radius))
                    c.warning(ViolationKind::EllipseFoci, path + "/focus1",
                              fmt::format("half focal distance {} != sqrt(rM^2 - rm^2) = {}",
                                          half_focal, expected));
            } else if constexpr (std::is_same_v<T, BSplineCurve>) {
                if (g.poles.empty())
                    c.error(ViolationKind::BadPoleGrid, path + "/poles", "no poles");
                check_knots(c, g.knots, g.poles.size(), g.degree, path + "/knots");
                check_weights(c, g.weights, g.poles.size(), g.rational, path + "/weights");
            }
        },
        curve.geometry);
}

void validate_surface(const SurfaceSpec& surface, const std::string& path,
                      std::vector<Violation>& out, int depth) {
    Collector c(out);
    const UVBox& d = surface.trim_domain;
    if (!std::isfinite(d.u0) || !std::isfinite(d.u1) || !std::isfinite(d.v0) ||
        !std::isfinite(d.v1) || !(d.u1 > d.u0) || !(d.v1 > d.v0))
        c.error(ViolationKind::BadTrimDomain, path + "/trim_domain",
                fmt::format("degenerate trim domain [{}, {}] x [{}, {}]", d.u0, d.u1, d.v0,
                            d.v1));
    check_transform(c, surface.transform, path);

    std::visit(
        [&](const auto& g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, PlaneSurface>) {
                check_frame2(c, g.x_axis, g.y_axis, path);
            } else if constexpr (std::is_same_v<T, CylinderSurface> ||
                                 std::is_same_v<T, SphereSurface>) {
                if (!(g.radius > 0.0))
                    c.error(ViolationKind::BadRadius, path + "/radius",
                            fmt::format("radius {} <= 0", g.radius));
                check_frame3(c, g.x_axis, g.y_axis, g.z_axis, path);
            } else if constexpr (std::is_same_v<T, ConeSurface>) {
                if (!(g.radius >= 0.0))
                    c.error(ViolationKind::BadRadius, path + "/radius",
                            fmt::format("radius {} < 0", g.radius));
                if (!(std::abs(g.angle) < std::numbers::pi / 2) || g.angle == 0.0)
                    c.error(ViolationKind::BadAngle, path + "/angle",
                            fmt::format("half-angle {} outside (-pi/2, pi/2) \\ {{0}}", g.angle));
                check_frame3(c, g.x_axis, g.y_axis, g.z_axis, path);
            } else if constexpr (std::is_same_v<T, TorusSurface>) {
                if (!(g.min_radius > 0.0) || !(g.max_radius > g.min_radius))
                    c.error(ViolationKind::BadRadius, path + "/max_radius",
                            fmt::format("need max_radius {} > min_radius {} > 0", g.max_radius,
                                        g.min_radius));
                check_frame3(c, g.x_axis, g.y_axis, g.z_axis, path);
            } else if constexpr (std::is_same_v<T, BSplineSurface>) {
                if (g.nu < 1 || g.nv < 1 ||
                    g.poles.size() != static_cast<std::size_t>(g.nu) * static_cast<std::size_t>(g.nv))
                    c.error(ViolationKind::BadPoleGrid, path + "/poles",
                            fmt::format("{} poles for a {}x{} grid", g.poles.size(), g.nu, g.nv));
                check_knots(c, g.u_knots, static_cast<std::size_t>(std::max(g.nu, 0)), g.u_degree,
                            path + "/u_knots");
                check_knots(c, g.v_knots, static_cast<std::size_t>(std::max(g.nv, 0)), g.v_degree,
                            path + "/v_knots");
                check_weights(c, g.weights, g.poles.size(), g.rational(), path + "/weights");
            } else if constexpr (std::is_same_v<T, ExtrusionSurface>) {
                validate_curve(g.curve, 3, path + "/curve", out);
                if (!finite(g.direction))
                    c.error(ViolationKind::BadInterval, path + "/direction", "non-finite");
            } else if constexpr (std::is_same_v<T, RevolutionSurface>) {
                validate_curve(g.curve, 3, path + "/curve", out);
                check_unit(c, g.z_axis, path + "/z_axis");
            } else if constexpr (std::is_same_v<T, OffsetSurface>) {
                if (!std::isfinite(g.value))
                    c.error(ViolationKind::BadOffset, path + "/value", "non-finite offset value");
                if (depth + 1 >= kMaxOffsetDepth) {
                    c.error(ViolationKind::BadOffset, path + "/surface",
                            fmt::format("nesting depth exceeds {}", kMaxOffsetDepth));
                } else if (g.surface->kind() == SurfaceKind::Other) {
                    c.error(ViolationKind::BadOffset, path + "/surface",
                            "offset of an Other surface");
                } else {
                    validate_surface(*g.surface, path + "/surface", out, depth + 1);
                }
            }
        },
        surface.geometry);
}

std::vector<Violation> validate_part(const Part& part) {
    std::vector<Violation> out;
    Collector c(out);
    const GeometryStore& geo = part.geometry;
    const TopologyStore& topo = part.topology;

    for (std::size_t i = 0; i < geo.curves2d.size(); ++i)
        validate_curve(geo.curves2d[i], 2, fmt::format("geometry/2dcurves/{}", i), out);
    for (std::size_t i = 0; i < geo.curves3d.size(); ++i)
        validate_curve(geo.curves3d[i], 3, fmt::format("geometry/3dcurves/{}", i), out);
    for (std::size_t i = 0; i < geo.surfaces.size(); ++i)
        validate_surface(geo.surfaces[i], fmt::format("geometry/surfaces/{}", i), out);

    const double bbox_tol = kBBoxRelTol * std::max(geo.bbox.diagonal(), 1e-300);
    for (std::size_t i = 0; i < geo.vertices.size(); ++i) {
        const Vec3& p = geo.vertices[i];
        const bool inside = p.allFinite() &&
                            ((p - geo.bbox.min).array() >= -bbox_tol).all() &&
                            ((geo.bbox.max - p).array() >= -bbox_tol).all();
        if (!inside)
            c.error(ViolationKind::VertexOutsideBBox, fmt::format("geometry/vertices/{}", i),
                    "vertex lies outside the bounding box");
    }

    for (std::size_t i = 0; i < topo.solids.size(); ++i)
        c.indices(topo.solids[i].shells, topo.shells.size(),
                  fmt::format("topology/solids/{}/shells", i));

    for (std::size_t i = 0; i < topo.shells.size(); ++i) {
        const Shell& shell = topo.shells[i];
        c.indices(shell.faces, topo.faces.size(), fmt::format("topology/shells/{}/faces", i));
        if (shell.orientation_wrt_solid.size() != shell.faces.size())
            c.error(ViolationKind::OrientationListLength,
                    fmt::format("topology/shells/{}/orientation_wrt_solid", i),
                    fmt::format("{} flags for {} faces", shell.orientation_wrt_solid.size(),
                                shell.faces.size()));
    }

    for (std::size_t i = 0; i < topo.faces.size(); ++i) {
        const Face& face = topo.faces[i];
        const std::string base = fmt::format("topology/faces/{}", i);
        c.index(face.surface, geo.surfaces.size(), base + "/surface");
        c.indices(face.loops, topo.loops.size(), base + "/loops");
        if (!face.loops.empty() &&
            std::find(face.loops.begin(), face.loops.end(), face.outer_loop) == face.loops.end())
            c.error(ViolationKind::OuterLoopNotInFace, base + "/outer_loop",
                    fmt::format("outer loop {} is not one of the face's loops", face.outer_loop));
        if (face.nr_singularities != static_cast<Index>(face.singularities.size()) ||
            face.has_singularities != (face.nr_singularities > 0))
            c.error(ViolationKind::SingularityMismatch, base + "/nr_singularities",
                    fmt::format("has={} nr={} listed={}", face.has_singularities,
                                face.nr_singularities, face.singularities.size()));
    }

    auto valid = [](Index v, std::size_t n) { return v >= 0 && static_cast<std::size_t>(v) < n; };

    for (std::size_t i = 0; i < topo.halfedges.size(); ++i) {
        const HalfEdge& he = topo.halfedges[i];
        const std::string base = fmt::format("topology/halfedges/{}", i);
        c.index(he.curve2d, geo.curves2d.size(), base + "/2dcurve");
        c.index(he.edge, topo.edges.size(), base + "/edge");
        c.indices(he.mates, topo.halfedges.size(), base + "/mates");
        if (he.mates.size() > 1)
            c.warning(ViolationKind::NonManifoldMates, base + "/mates",
                      fmt::format("{} mates (non-manifold edge)", he.mates.size()));
        for (Index m : he.mates) {
            if (!valid(m, topo.halfedges.size())) continue;
            const HalfEdge& mate = topo.halfedges[static_cast<std::size_t>(m)];
            if (std::find(mate.mates.begin(), mate.mates.end(), static_cast<Index>(i)) ==
                mate.mates.end())
                c.error(ViolationKind::MatesNotSymmetric, base + "/mates",
                        fmt::format("mates not symmetric: {} lists {} but not vice versa", i, m));
            if (mate.edge != he.edge)
                c.error(ViolationKind::MateEdgeMismatch, base + "/mates",
                        fmt::format("mate {} references edge {} instead of {}", m, mate.edge,
                                    he.edge));
        }
    }

    for (std::size_t i = 0; i < topo.edges.size(); ++i) {
        const Edge& e = topo.edges[i];
        const std::string base = fmt::format("topology/edges/{}", i);
        c.index(e.curve3d, geo.curves3d.size(), base + "/3dcurve");
        c.index(e.start_vertex, geo.vertices.size(), base + "/start_vertex");
        c.index(e.end_vertex, geo.vertices.size(), base + "/end_vertex");
    }

    for (std::size_t i = 0; i < topo.loops.size(); ++i) {
        const Loop& loop = topo.loops[i];
        const std::string path = fmt::format("topology/loops/{}/halfedges", i);
        c.indices(loop.halfedges, topo.halfedges.size(), path);
        if (loop.halfedges.empty()) {
            c.error(ViolationKind::OpenLoop, path, "loop has no half-edges");
            continue;
        }
        // Closure is only meaningful once every link resolves.
        bool resolvable = true;
        for (Index h : loop.halfedges) {
            if (!valid(h, topo.halfedges.size())) { resolvable = false; break; }
            const HalfEdge& he = topo.halfedges[static_cast<std::size_t>(h)];
            if (!valid(he.edge, topo.edges.size())) { resolvable = false; break; }
        }
        if (!resolvable) continue;
        auto endpoints = [&](Index h) {
            const HalfEdge& he = topo.halfedges[static_cast<std::size_t>(h)];
            const Edge& e = topo.edges[static_cast<std::size_t>(he.edge)];
            return he.orientation_wrt_edge ? std::pair{e.start_vertex, e.end_vertex}
                                           : std::pair{e.end_vertex, e.start_vertex};
        };
        const std::size_t n = loop.halfedges.size();
        for (std::size_t k = 0; k < n; ++k) {
            const auto cur = endpoints(loop.halfedges[k]);
            const auto next = endpoints(loop.halfedges[(k + 1) % n]);
            if (cur.second != next.first) {
                c.error(ViolationKind::OpenLoop, path,
                        fmt::format("chain breaks after half-edge {} (vertex {} != {})",
                                    loop.halfedges[k], cur.second, next.first));
                break;
            }
        }
    }

    if (part.meshes.size() != topo.faces.size())
        c.error(ViolationKind::MeshCountMismatch, "mesh",
                fmt::format("{} meshes for {} faces", part.meshes.size(), topo.faces.size()));
    for (std::size_t i = 0; i < part.meshes.size(); ++i) {
        const FaceMesh& mesh = part.meshes[i];
        const auto n = static_cast<Index>(mesh.points.size());
        for (const auto& tri : mesh.triangles) {
            if (std::any_of(tri.begin(), tri.end(), [n](Index k) { return k < 0 || k >= n; })) {
                c.error(ViolationKind::MeshIndexOutOfRange, fmt::format("mesh/{}/triangles", i),
                        "triangle references a missing point");
                break;
            }
        }
    }
    return out;
}

}  // namespace brep
