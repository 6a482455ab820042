#include "brep/synth.hpp"

#include "brep/errors.hpp"

#include <Eigen/Geometry>
#include <fmt/core.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

namespace brep::synth {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t at(Index i) { return static_cast<std::size_t>(i); }

CurveSpec line2d(const Vec2& p, const Vec2& dir, double t0, double t1) {
    CurveSpec c;
    c.dim = 2;
    c.interval = {t0, t1};
    c.geometry = LineCurve{Vec3(p.x(), p.y(), 0), Vec3(dir.x(), dir.y(), 0)};
    return c;
}

CurveSpec spline_segment2d(const Vec2& a, const Vec2& b, double length) {
    CurveSpec c;
    c.dim = 2;
    c.interval = {0.0, length};
    BSplineCurve s;
    s.degree = 1;
    s.poles = {Vec3(a.x(), a.y(), 0), Vec3(b.x(), b.y(), 0)};
    s.knots = {0.0, 0.0, length, length};
    c.geometry = std::move(s);
    return c;
}

CurveSpec circle2d(const Vec2& centre, double r, const Vec2& x, const Vec2& y) {
    CurveSpec c;
    c.dim = 2;
    c.interval = {0.0, 2 * kPi};
    c.geometry = CircleCurve{Vec3(centre.x(), centre.y(), 0), r, Vec3(x.x(), x.y(), 0),
                             Vec3(y.x(), y.y(), 0)};
    return c;
}

CurveSpec line3d(const Vec3& p, const Vec3& dir, double t0, double t1) {
    CurveSpec c;
    c.interval = {t0, t1};
    c.geometry = LineCurve{p, dir};
    return c;
}

CurveSpec circle3d(const Vec3& centre, double r, const Vec3& x, const Vec3& y, double t0 = 0.0,
                   double t1 = 2 * kPi) {
    CurveSpec c;
    c.interval = {t0, t1};
    c.geometry = CircleCurve{centre, r, x, y};
    return c;
}

SurfaceSpec surface(SurfaceGeometry g, const UVBox& dom) {
    SurfaceSpec s;
    s.trim_domain = dom;
    s.geometry = std::move(g);
    return s;
}

/// Polyhedral sheets: planar polygon faces with line edges shared by vertex pair.
class PolygonSheet {
public:
    explicit PolygonSheet(bool spline_pcurves = false) : spline_pcurves_(spline_pcurves) {}

    PartBuilder& builder() { return b_; }

    Index vertex(const Vec3& p) {
        const std::array<double, 3> key{p.x(), p.y(), p.z()};
        auto it = vertices_.find(key);
        if (it != vertices_.end()) return it->second;
        const Index id = b_.add_vertex(p);
        vertices_.emplace(key, id);
        return id;
    }

    /// Corners in counter-clockwise order around x_axis cross y_axis.
    Index face(const Vec3& origin, const Vec3& x_axis, const Vec3& y_axis,
               const std::vector<Vec3>& corners, bool mesh) {
        std::vector<Vec2> uv;
        for (const Vec3& p : corners) uv.emplace_back((p - origin).dot(x_axis), (p - origin).dot(y_axis));
        UVBox box{uv[0].x(), uv[0].x(), uv[0].y(), uv[0].y()};
        for (const Vec2& q : uv) {
            box.u0 = std::min(box.u0, q.x());
            box.u1 = std::max(box.u1, q.x());
            box.v0 = std::min(box.v0, q.y());
            box.v1 = std::max(box.v1, q.y());
        }
        const Index surf = b_.add_surface(surface(PlaneSurface{origin, x_axis, y_axis}, box));
        std::vector<Index> hes;
        const std::size_t n = corners.size();
        for (std::size_t k = 0; k < n; ++k) {
            const Vec3& pa = corners[k];
            const Vec3& pb = corners[(k + 1) % n];
            const Index a = vertex(pa);
            const Index bv = vertex(pb);
            const double len = (pb - pa).norm();
            const auto key = std::minmax(a, bv);
            auto it = edges_.find(key);
            bool forward = true;
            Index edge;
            if (it == edges_.end()) {
                const Index curve = b_.add_curve3d(line3d(pa, (pb - pa) / len, 0.0, len));
                edge = b_.add_edge(curve, a, bv);
                edges_.emplace(key, std::pair{edge, a});
            } else {
                edge = it->second.first;
                forward = it->second.second == a;
            }
            const Vec2& ua = uv[k];
            const Vec2& ub = uv[(k + 1) % n];
            const Index pc = spline_pcurves_ ? b_.add_curve2d(spline_segment2d(ua, ub, len))
                                             : b_.add_curve2d(line2d(ua, (ub - ua) / len, 0.0, len));
            hes.push_back(b_.add_halfedge(pc, edge, forward));
        }
        const Index loop = b_.add_loop(std::move(hes));
        const Index f = b_.add_face(surf, true, {loop}, loop, box);
        if (mesh) {
            FaceMesh m;
            m.points = corners;
            for (std::size_t k = 1; k + 1 < n; ++k)
                m.triangles.push_back({0, static_cast<Index>(k), static_cast<Index>(k + 1)});
            b_.set_mesh(f, std::move(m));
        }
        return f;
    }

    /// Rectangle with corners origin, origin + la*x, origin + la*x + lb*y, origin + lb*y.
    Index rectangle(const Vec3& origin, const Vec3& x, const Vec3& y, double la, double lb,
                    bool mesh) {
        return face(origin, x, y, {origin, origin + la * x, origin + la * x + lb * y, origin + lb * y},
                    mesh);
    }

private:
    PartBuilder b_;
    bool spline_pcurves_;
    std::map<std::array<double, 3>, Index> vertices_;
    std::map<std::pair<Index, Index>, std::pair<Index, Index>> edges_;  // -> (edge, start vertex)
};

/// The six outward faces of the box [o, o + (dx,dy,dz)], optionally skipping one.
std::vector<Index> box_faces(PolygonSheet& s, const Vec3& o, double dx, double dy, double dz,
                             bool mesh, int skip = -1) {
    const Vec3 X = Vec3::UnitX(), Y = Vec3::UnitY(), Z = Vec3::UnitZ();
    std::vector<Index> faces;
    auto add = [&](int id, const Vec3& origin, const Vec3& x, const Vec3& y, double la, double lb) {
        if (id != skip) faces.push_back(s.rectangle(origin, x, y, la, lb, mesh));
    };
    add(0, o, Y, X, dy, dx);                       // z = 0, normal -z
    add(1, o + Vec3(0, 0, dz), X, Y, dx, dy);      // z = dz, normal +z
    add(2, o, X, Z, dx, dz);                       // y = 0, normal -y
    add(3, o + Vec3(0, dy, 0), Z, X, dz, dx);      // y = dy, normal +y
    add(4, o, Z, Y, dz, dy);                       // x = 0, normal -x
    add(5, o + Vec3(dx, 0, 0), Y, Z, dy, dz);      // x = dx, normal +x
    return faces;
}

}  // namespace

// ---------------------------------------------------------------------------
// PartBuilder

Index PartBuilder::add_vertex(const Vec3& p) {
    geo_.vertices.push_back(p);
    return static_cast<Index>(geo_.vertices.size() - 1);
}

Index PartBuilder::add_curve2d(CurveSpec curve) {
    curve.dim = 2;
    geo_.curves2d.push_back(std::move(curve));
    return static_cast<Index>(geo_.curves2d.size() - 1);
}

Index PartBuilder::add_curve3d(CurveSpec curve) {
    curve.dim = 3;
    geo_.curves3d.push_back(std::move(curve));
    return static_cast<Index>(geo_.curves3d.size() - 1);
}

Index PartBuilder::add_surface(SurfaceSpec s) {
    geo_.surfaces.push_back(std::move(s));
    return static_cast<Index>(geo_.surfaces.size() - 1);
}

Index PartBuilder::add_edge(Index curve3d, Index start_vertex, Index end_vertex) {
    topo_.edges.push_back({curve3d, start_vertex, end_vertex});
    return static_cast<Index>(topo_.edges.size() - 1);
}

Index PartBuilder::add_halfedge(Index curve2d, Index edge, bool orientation_wrt_edge) {
    topo_.halfedges.push_back({curve2d, edge, {}, orientation_wrt_edge});
    return static_cast<Index>(topo_.halfedges.size() - 1);
}

Index PartBuilder::add_loop(std::vector<Index> halfedges) {
    topo_.loops.push_back({std::move(halfedges)});
    return static_cast<Index>(topo_.loops.size() - 1);
}

Index PartBuilder::add_face(Index surface_index, bool surface_orientation, std::vector<Index> loops,
                            Index outer_loop, const UVBox& exact_domain,
                            std::vector<Vec2> singularities) {
    Face f;
    f.surface = surface_index;
    f.surface_orientation = surface_orientation;
    f.loops = std::move(loops);
    f.outer_loop = outer_loop;
    f.exact_domain = exact_domain;
    f.nr_singularities = static_cast<Index>(singularities.size());
    f.has_singularities = !singularities.empty();
    f.singularities = std::move(singularities);
    topo_.faces.push_back(std::move(f));
    meshes_.resize(topo_.faces.size());
    return static_cast<Index>(topo_.faces.size() - 1);
}

Index PartBuilder::add_untrimmed_face(Index surface_index, bool surface_orientation) {
    return add_face(surface_index, surface_orientation, {}, 0,
                    geo_.surfaces.at(at(surface_index)).trim_domain);
}

Index PartBuilder::add_shell(std::vector<Index> faces, std::vector<bool> orientation_wrt_solid) {
    topo_.shells.push_back({std::move(faces), std::move(orientation_wrt_solid)});
    return static_cast<Index>(topo_.shells.size() - 1);
}

Index PartBuilder::add_solid(std::vector<Index> shells) {
    topo_.solids.push_back({std::move(shells)});
    return static_cast<Index>(topo_.solids.size() - 1);
}

void PartBuilder::set_mesh(Index face, FaceMesh mesh) { meshes_.at(at(face)) = std::move(mesh); }

void PartBuilder::set_bbox(const BoundingBox& bbox) { bbox_ = bbox; }

const Vec3& PartBuilder::vertex(Index i) const { return geo_.vertices.at(at(i)); }

Part PartBuilder::build_unchecked() const {
    Part part;
    part.geometry = geo_;
    part.topology = topo_;
    part.meshes = meshes_;
    part.meshes.resize(topo_.faces.size());

    std::map<Index, std::vector<Index>> by_edge;
    for (std::size_t i = 0; i < topo_.halfedges.size(); ++i)
        by_edge[topo_.halfedges[i].edge].push_back(static_cast<Index>(i));
    for (const auto& [edge, hes] : by_edge)
        for (Index h : hes)
            for (Index m : hes)
                if (m != h) part.topology.halfedges[at(h)].mates.push_back(m);

    if (bbox_) {
        part.geometry.bbox = *bbox_;
    } else {
        std::vector<Vec3> pts = geo_.vertices;
        for (const FaceMesh& m : meshes_) pts.insert(pts.end(), m.points.begin(), m.points.end());
        if (!pts.empty()) {
            Vec3 lo = pts[0], hi = pts[0];
            for (const Vec3& p : pts) {
                lo = lo.cwiseMin(p);
                hi = hi.cwiseMax(p);
            }
            part.geometry.bbox = {lo, hi};
        }
    }
    return part;
}

Part PartBuilder::build() const {
    Part part = build_unchecked();
    const auto violations = validate_part(part);
    if (has_errors(violations)) {
        std::string msg = "builder produced an invalid part:";
        for (const Violation& v : violations)
            if (v.severity == Severity::Error) msg += fmt::format("\n  {}: {}", v.path, v.message);
        throw ValidationError(msg);
    }
    return part;
}

// ---------------------------------------------------------------------------
// Fixtures

Part primitive_box(double dx, double dy, double dz) {
    if (!(dx > 0 && dy > 0 && dz > 0)) throw DomainError("box extents must be positive");
    PolygonSheet s;
    const auto faces = box_faces(s, Vec3::Zero(), dx, dy, dz, true);
    const Index shell = s.builder().add_shell(faces, std::vector<bool>(faces.size(), true));
    s.builder().add_solid({shell});
    return s.builder().build();
}

Part box_with_failed_mesh() {
    Part p = primitive_box(1, 1, 1);
    p.meshes.back() = FaceMesh{};
    return p;
}

Part primitive_cylinder_capped(double r, double h) {
    if (!(r > 0 && h > 0)) throw DomainError("cylinder dimensions must be positive");
    PartBuilder b;
    const Vec3 X = Vec3::UnitX(), Y = Vec3::UnitY(), Z = Vec3::UnitZ();
    const Index v0 = b.add_vertex(Vec3(r, 0, 0));
    const Index v1 = b.add_vertex(Vec3(r, 0, h));
    const Index e_bot = b.add_edge(b.add_curve3d(circle3d(Vec3::Zero(), r, X, Y)), v0, v0);
    const Index e_top = b.add_edge(b.add_curve3d(circle3d(Vec3(0, 0, h), r, X, Y)), v1, v1);
    const Index e_seam = b.add_edge(b.add_curve3d(line3d(Vec3(r, 0, 0), Z, 0, h)), v0, v1);

    const UVBox side_dom{0, 2 * kPi, 0, h};
    const Index side_surf = b.add_surface(surface(CylinderSurface{Vec3::Zero(), r, X, Y, Z}, side_dom));
    const Index side_loop = b.add_loop({
        b.add_halfedge(b.add_curve2d(line2d({0, 0}, {1, 0}, 0, 2 * kPi)), e_bot, true),
        b.add_halfedge(b.add_curve2d(line2d({2 * kPi, 0}, {0, 1}, 0, h)), e_seam, true),
        b.add_halfedge(b.add_curve2d(line2d({2 * kPi, h}, {-1, 0}, 0, 2 * kPi)), e_top, false),
        b.add_halfedge(b.add_curve2d(line2d({0, h}, {0, -1}, 0, h)), e_seam, false),
    });
    const Index side = b.add_face(side_surf, true, {side_loop}, side_loop, side_dom);

    const UVBox cap_dom{-r, r, -r, r};
    const Index top_surf = b.add_surface(surface(PlaneSurface{Vec3(0, 0, h), X, Y}, cap_dom));
    const Index top_loop =
        b.add_loop({b.add_halfedge(b.add_curve2d(circle2d({0, 0}, r, {1, 0}, {0, 1})), e_top, true)});
    const Index top = b.add_face(top_surf, true, {top_loop}, top_loop, cap_dom);

    const Index bot_surf = b.add_surface(surface(PlaneSurface{Vec3::Zero(), X, -Y}, cap_dom));
    const Index bot_loop =
        b.add_loop({b.add_halfedge(b.add_curve2d(circle2d({0, 0}, r, {1, 0}, {0, 1})), e_bot, false)});
    const Index bot = b.add_face(bot_surf, true, {bot_loop}, bot_loop, cap_dom);

    b.add_solid({b.add_shell({side, top, bot}, {true, true, true})});
    b.set_bbox({Vec3(-r, -r, 0), Vec3(r, r, h)});
    return b.build();
}

Part primitive_annulus_plate(double r_in, double r_out, double h) {
    if (!(r_in > 0 && r_out > r_in && h > 0)) throw DomainError("need 0 < r_in < r_out and h > 0");
    PartBuilder b;
    const Vec3 X = Vec3::UnitX(), Y = Vec3::UnitY(), Z = Vec3::UnitZ();
    const Index vob = b.add_vertex(Vec3(r_out, 0, 0));
    const Index vot = b.add_vertex(Vec3(r_out, 0, h));
    const Index vib = b.add_vertex(Vec3(r_in, 0, 0));
    const Index vit = b.add_vertex(Vec3(r_in, 0, h));
    const Index e_ob = b.add_edge(b.add_curve3d(circle3d(Vec3::Zero(), r_out, X, Y)), vob, vob);
    const Index e_ot = b.add_edge(b.add_curve3d(circle3d(Vec3(0, 0, h), r_out, X, Y)), vot, vot);
    const Index e_ib = b.add_edge(b.add_curve3d(circle3d(Vec3::Zero(), r_in, X, Y)), vib, vib);
    const Index e_it = b.add_edge(b.add_curve3d(circle3d(Vec3(0, 0, h), r_in, X, Y)), vit, vit);
    const Index e_os = b.add_edge(b.add_curve3d(line3d(Vec3(r_out, 0, 0), Z, 0, h)), vob, vot);
    const Index e_is = b.add_edge(b.add_curve3d(line3d(Vec3(r_in, 0, 0), Z, 0, h)), vib, vit);

    auto he = [&](CurveSpec pcurve, Index edge, bool orientation) {
        return b.add_halfedge(b.add_curve2d(std::move(pcurve)), edge, orientation);
    };

    const UVBox cap_dom{-r_out, r_out, -r_out, r_out};
    const Index top_surf = b.add_surface(surface(PlaneSurface{Vec3(0, 0, h), X, Y}, cap_dom));
    const Index top_outer = b.add_loop({he(circle2d({0, 0}, r_out, {1, 0}, {0, 1}), e_ot, true)});
    const Index top_inner = b.add_loop({he(circle2d({0, 0}, r_in, {1, 0}, {0, -1}), e_it, false)});
    const Index top = b.add_face(top_surf, true, {top_outer, top_inner}, top_outer, cap_dom);

    const Index bot_surf = b.add_surface(surface(PlaneSurface{Vec3::Zero(), X, -Y}, cap_dom));
    const Index bot_outer = b.add_loop({he(circle2d({0, 0}, r_out, {1, 0}, {0, 1}), e_ob, false)});
    const Index bot_inner = b.add_loop({he(circle2d({0, 0}, r_in, {1, 0}, {0, -1}), e_ib, true)});
    const Index bot = b.add_face(bot_surf, true, {bot_outer, bot_inner}, bot_outer, cap_dom);

    const UVBox side_dom{0, 2 * kPi, 0, h};
    const Index outer_surf =
        b.add_surface(surface(CylinderSurface{Vec3::Zero(), r_out, X, Y, Z}, side_dom));
    const Index outer_loop = b.add_loop({
        he(line2d({0, 0}, {1, 0}, 0, 2 * kPi), e_ob, true),
        he(line2d({2 * kPi, 0}, {0, 1}, 0, h), e_os, true),
        he(line2d({2 * kPi, h}, {-1, 0}, 0, 2 * kPi), e_ot, false),
        he(line2d({0, h}, {0, -1}, 0, h), e_os, false),
    });
    const Index outer = b.add_face(outer_surf, true, {outer_loop}, outer_loop, side_dom);

    const Index inner_surf =
        b.add_surface(surface(CylinderSurface{Vec3::Zero(), r_in, X, Y, Z}, side_dom));
    const Index inner_loop = b.add_loop({
        he(line2d({2 * kPi, 0}, {-1, 0}, 0, 2 * kPi), e_ib, false),
        he(line2d({0, 0}, {0, 1}, 0, h), e_is, true),
        he(line2d({0, h}, {1, 0}, 0, 2 * kPi), e_it, true),
        he(line2d({2 * kPi, h}, {0, -1}, 0, h), e_is, false),
    });
    const Index inner = b.add_face(inner_surf, false, {inner_loop}, inner_loop, side_dom);

    b.add_solid({b.add_shell({top, bot, outer, inner}, {true, true, true, true})});
    b.set_bbox({Vec3(-r_out, -r_out, 0), Vec3(r_out, r_out, h)});
    return b.build();
}

Part primitive_torus(double R, double r) {
    if (!(R > r && r > 0)) throw DomainError("need major > minor > 0");
    PartBuilder b;
    const Vec3 X = Vec3::UnitX(), Y = Vec3::UnitY(), Z = Vec3::UnitZ();
    const Index v = b.add_vertex(Vec3(R + r, 0, 0));
    const Index e_u = b.add_edge(b.add_curve3d(circle3d(Vec3::Zero(), R + r, X, Y)), v, v);
    const Index e_v = b.add_edge(b.add_curve3d(circle3d(Vec3(R, 0, 0), r, X, Z)), v, v);
    const UVBox dom{0, 2 * kPi, 0, 2 * kPi};
    const Index surf = b.add_surface(surface(TorusSurface{Vec3::Zero(), R, r, X, Y, Z}, dom));
    auto he = [&](CurveSpec pcurve, Index edge, bool orientation) {
        return b.add_halfedge(b.add_curve2d(std::move(pcurve)), edge, orientation);
    };
    const Index loop = b.add_loop({
        he(line2d({0, 0}, {1, 0}, 0, 2 * kPi), e_u, true),
        he(line2d({2 * kPi, 0}, {0, 1}, 0, 2 * kPi), e_v, true),
        he(line2d({2 * kPi, 2 * kPi}, {-1, 0}, 0, 2 * kPi), e_u, false),
        he(line2d({0, 2 * kPi}, {0, -1}, 0, 2 * kPi), e_v, false),
    });
    const Index face = b.add_face(surf, true, {loop}, loop, dom);
    b.add_solid({b.add_shell({face}, {true})});
    b.set_bbox({Vec3(-(R + r), -(R + r), -r), Vec3(R + r, R + r, r)});
    return b.build();
}

Part primitive_sphere(double r) {
    if (!(r > 0)) throw DomainError("sphere radius must be positive");
    PartBuilder b;
    const Vec3 X = Vec3::UnitX(), Y = Vec3::UnitY(), Z = Vec3::UnitZ();
    const double hp = kPi / 2;
    const Index south = b.add_vertex(Vec3(0, 0, -r));
    const Index north = b.add_vertex(Vec3(0, 0, r));
    const Index e_seam = b.add_edge(b.add_curve3d(circle3d(Vec3::Zero(), r, X, Z, -hp, hp)), south, north);
    // Pole edges are degenerate: a zero-direction line at the pole.
    const Index e_s = b.add_edge(b.add_curve3d(line3d(Vec3(0, 0, -r), Vec3::Zero(), 0, 2 * kPi)), south, south);
    const Index e_n = b.add_edge(b.add_curve3d(line3d(Vec3(0, 0, r), Vec3::Zero(), 0, 2 * kPi)), north, north);
    const UVBox dom{0, 2 * kPi, -hp, hp};
    const Index surf = b.add_surface(surface(SphereSurface{Vec3::Zero(), r, X, Y, Z}, dom));
    auto he = [&](CurveSpec pcurve, Index edge, bool orientation) {
        return b.add_halfedge(b.add_curve2d(std::move(pcurve)), edge, orientation);
    };
    const Index loop = b.add_loop({
        he(line2d({0, -hp}, {1, 0}, 0, 2 * kPi), e_s, true),
        he(line2d({2 * kPi, 0}, {0, 1}, -hp, hp), e_seam, true),
        he(line2d({2 * kPi, hp}, {-1, 0}, 0, 2 * kPi), e_n, false),
        he(line2d({0, 0}, {0, -1}, -hp, hp), e_seam, false),
    });
    const Index face = b.add_face(surf, true, {loop}, loop, dom, {Vec2(0, -hp), Vec2(0, hp)});
    b.add_solid({b.add_shell({face}, {true})});
    b.set_bbox({Vec3::Constant(-r), Vec3::Constant(r)});
    return b.build();
}

Part fan_fixture(int n) {
    if (n < 3 || n > 64) throw DomainError("fan_fixture needs 3 <= n_blades <= 64");
    PolygonSheet s(true);
    const Vec3 Z = Vec3::UnitZ();
    std::vector<Vec3> hub;
    for (int k = 0; k < n; ++k) {
        const double a = 2 * kPi * k / n;
        hub.emplace_back(std::cos(a), std::sin(a), 0.0);
    }
    std::vector<Index> faces;
    faces.push_back(s.face(Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY(), hub, false));
    const double blade_tilt = kPi / 6, tip_tilt = kPi / 3;
    for (int k = 0; k < n; ++k) {
        const Vec3& p = hub[static_cast<std::size_t>(k)];
        const Vec3& q = hub[static_cast<std::size_t>((k + 1) % n)];
        const Vec3 x = (p - q).normalized();
        const Vec3 m = Z.cross(x);  // outward, perpendicular to the hub edge
        const double scale = std::max(std::ldexp(1.0, -k), 1e-6);
        const Vec3 d = std::cos(blade_tilt) * m + std::sin(blade_tilt) * Z;
        const double L = 0.8 * scale;
        const Vec3 p1 = p + L * d, q1 = q + L * d;
        faces.push_back(s.face(q, x, d, {q, p, p1, q1}, false));
        const Vec3 d2 = std::cos(tip_tilt) * m + std::sin(tip_tilt) * Z;
        const double L2 = 0.4 * scale;
        faces.push_back(s.face(q1, x, d2, {q1, p1, p1 + L2 * d2, q1 + L2 * d2}, false));
    }
    s.builder().add_shell(faces, std::vector<bool>(faces.size(), true));
    return s.builder().build();
}

Part nonmanifold_stacked_cubes() {
    PolygonSheet s;
    const auto lower = box_faces(s, Vec3::Zero(), 1, 1, 1, false);
    const Index shared = lower[1];  // z = 1, normal +z
    auto upper = box_faces(s, Vec3(0, 0, 1), 1, 1, 1, false, 0);
    std::vector<bool> upper_flags(upper.size(), true);
    upper.push_back(shared);
    upper_flags.push_back(false);
    auto& b = s.builder();
    const Index shell_a = b.add_shell(lower, std::vector<bool>(lower.size(), true));
    const Index shell_b = b.add_shell(upper, upper_flags);
    b.add_solid({shell_a});
    b.add_solid({shell_b});
    return b.build();
}

Part two_face_sheet() {
    PolygonSheet s;
    const Vec3 X = Vec3::UnitX(), Y = Vec3::UnitY();
    const Index a = s.face(Vec3::Zero(), X, Y, {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)}, false);
    const Index b = s.face(Vec3::Zero(), X, Y, {Vec3(1, 0, 0), Vec3(4, 0, 0), Vec3(4, 1, 0), Vec3(1, 1, 0)}, false);
    s.builder().add_shell({a, b}, {true, true});
    return s.builder().build();
}

Part geometry_showcase(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    const Vec3 X = Vec3::UnitX(), Y = Vec3::UnitY(), Z = Vec3::UnitZ();

    auto spline_curve = [&](int dim, int degree, int n, bool rational) {
        BSplineCurve c;
        c.degree = degree;
        for (int i = 0; i < n; ++i)
            c.poles.emplace_back(i, uni(-1, 1), dim == 3 ? uni(-1, 1) : 0.0);
        for (int i = 0; i <= degree; ++i) c.knots.push_back(0.0);
        for (int i = 1; i < n - degree; ++i) c.knots.push_back(static_cast<double>(i) / (n - degree));
        for (int i = 0; i <= degree; ++i) c.knots.push_back(1.0);
        c.rational = rational;
        if (rational)
            for (int i = 0; i < n; ++i) c.weights.push_back(uni(0.5, 2.0));
        c.continuity = degree - 1;
        return c;
    };
    auto spline_surface = [&](int pu, int pv, int nu, int nv, bool rational) {
        BSplineSurface s;
        s.nu = nu;
        s.nv = nv;
        s.u_degree = pu;
        s.v_degree = pv;
        for (int i = 0; i < nu; ++i)
            for (int j = 0; j < nv; ++j) s.poles.emplace_back(i, j, uni(-0.3, 0.3));
        auto knots = [](int n, int p) {
            std::vector<double> k(static_cast<std::size_t>(p + 1), 0.0);
            for (int i = 1; i < n - p; ++i) k.push_back(static_cast<double>(i) / (n - p));
            k.insert(k.end(), static_cast<std::size_t>(p + 1), 1.0);
            return k;
        };
        s.u_knots = knots(nu, pu);
        s.v_knots = knots(nv, pv);
        s.u_rational = s.v_rational = rational;
        if (rational)
            for (int i = 0; i < nu * nv; ++i) s.weights.push_back(uni(0.5, 2.0));
        s.continuity = 1;
        return s;
    };

    PartBuilder b;
    // 2D curves of every kind.
    b.add_curve2d(line2d({0, 0}, {1, 0}, 0, 1));
    b.add_curve2d(circle2d({0, 0}, 1, {1, 0}, {0, 1}));
    {
        CurveSpec e;
        e.dim = 2;
        e.interval = {0, 2 * kPi};
        const double f = std::sqrt(2.0 * 2.0 - 1.0);
        e.geometry = EllipseCurve{Vec3(-f, 0, 0), Vec3(f, 0, 0), 2.0, 1.0, X, Y};
        b.add_curve2d(e);
        CurveSpec s;
        s.dim = 2;
        s.interval = {0, 1};
        s.geometry = spline_curve(2, 3, 6, false);
        b.add_curve2d(s);
        CurveSpec o;
        o.dim = 2;
        o.interval = {0, 1};
        o.geometry = OtherCurve{"OffsetCurve", {{"value", RawField{{}, std::vector<double>{0.25}}}}};
        b.add_curve2d(o);
    }

    // 3D curves of every kind, each bounded by an edge.
    Transform placed;
    placed.rotation = Eigen::AngleAxisd(0.3, Vec3(1, 1, 0).normalized()).toRotationMatrix();
    placed.translation = Vec3(0.5, -0.5, 1.0);
    std::vector<CurveSpec> c3;
    c3.push_back(line3d(Vec3(0, 0, 0), Vec3(1, 1, 0).normalized(), 0, 2));
    c3.push_back(circle3d(Vec3(0, 0, 1), 1.5, X, Y));
    {
        CurveSpec e;
        e.interval = {0, kPi};
        const double f = std::sqrt(3.0 * 3.0 - 1.0);
        e.geometry = EllipseCurve{Vec3(-f, 0, 2), Vec3(f, 0, 2), 3.0, 1.0, X, Z};
        e.transform = placed;
        c3.push_back(e);
        CurveSpec s;
        s.interval = {0, 1};
        s.geometry = spline_curve(3, 3, 7, false);
        c3.push_back(s);
        CurveSpec rs;
        rs.interval = {0, 1};
        rs.geometry = spline_curve(3, 2, 5, true);
        rs.transform = placed;
        c3.push_back(rs);
    }
    for (const CurveSpec& c : c3) {
        const Index ci = b.add_curve3d(c);
        (void)ci;
    }
    {
        CurveSpec o;
        o.interval = {0, 1};
        o.geometry = OtherCurve{"TrimmedCurve", {{"basis", RawField{{3}, std::vector<std::int64_t>{1, 2, 3}}},
                                                 {"note", RawField{{}, std::string("kept verbatim")}}}};
        b.add_curve3d(o);
    }

    // Surfaces of every kind, each carried by an untrimmed face.
    std::vector<SurfaceSpec> surfs;
    surfs.push_back(surface(PlaneSurface{Vec3(0, 0, -1), X, Y}, {-2, 2, -1, 1}));
    surfs.push_back(surface(CylinderSurface{Vec3::Zero(), 1.0, X, Y, Z}, {0, 2 * kPi, 0, 2}));
    surfs.push_back(surface(ConeSurface{Vec3::Zero(), 1.0, 0.3, X, Y, Z}, {0, 2 * kPi, 0, 1.5}));
    surfs.push_back(surface(SphereSurface{Vec3(0, 0, 3), 1.2, X, Y, Z}, {0, 2 * kPi, -1.2, 1.2}));
    surfs.push_back(surface(TorusSurface{Vec3(0, 0, -3), 3.0, 0.8, X, Y, Z}, {0, 2 * kPi, 0, 2 * kPi}));
    surfs.push_back(surface(spline_surface(3, 2, 6, 5, false), {0, 1, 0, 1}));
    surfs.push_back(surface(spline_surface(2, 2, 4, 4, true), {0, 1, 0, 1}));
    surfs.back().transform = placed;
    {
        CurveSpec profile = circle3d(Vec3(0, 0, 0), 0.7, X, Y, 0, 2 * kPi);
        surfs.push_back(surface(ExtrusionSurface{profile, Vec3(0.1, 0.2, 1.0)}, {0, 2 * kPi, 0, 1}));
        CurveSpec meridian;
        meridian.interval = {0, 1};
        BSplineCurve m = spline_curve(3, 3, 5, false);
        for (Vec3& p : m.poles) p = Vec3(2.0 + 0.3 * p.y(), 0.0, p.x());
        meridian.geometry = m;
        surfs.push_back(surface(RevolutionSurface{meridian, Vec3::Zero(), Z}, {0, 2 * kPi, 0, 1}));
        SurfaceSpec base = surface(spline_surface(3, 3, 5, 5, false), {0, 1, 0, 1});
        surfs.push_back(surface(OffsetSurface{base, 0.15}, {0, 1, 0, 1}));
        SurfaceSpec sphere = surface(SphereSurface{Vec3::Zero(), 2.0, X, Y, Z}, {0, 2 * kPi, -1.2, 1.2});
        surfs.push_back(surface(OffsetSurface{sphere, -0.5}, {0, 2 * kPi, -1.2, 1.2}));
        surfs.push_back(surface(OtherSurface{"BlendSurface",
                                             {{"radius", RawField{{}, std::vector<double>{0.1}}},
                                              {"rails", RawField{{2}, std::vector<std::int64_t>{0, 1}}}}},
                                {0, 1, 0, 1}));
    }
    std::vector<Index> faces;
    for (SurfaceSpec& s : surfs) faces.push_back(b.add_untrimmed_face(b.add_surface(std::move(s))));
    b.add_shell(faces, std::vector<bool>(faces.size(), true));

    const Index v0 = b.add_vertex(Vec3(-1, -1, -1));
    const Index v1 = b.add_vertex(Vec3(1, 1, 1));
    for (std::size_t i = 0; i < c3.size() + 1; ++i) b.add_edge(static_cast<Index>(i), v0, v1);
    b.set_bbox({Vec3::Constant(-10), Vec3::Constant(10)});
    return b.build();
}

std::vector<NamedFixture> standard_fixtures(std::uint64_t seed) {
    std::vector<NamedFixture> out;
    out.push_back({"box", primitive_box(1, 1, 1)});
    out.push_back({"box_failed_mesh", box_with_failed_mesh()});
    out.push_back({"cylinder", primitive_cylinder_capped(1, 2)});
    out.push_back({"annulus", primitive_annulus_plate(1, 2, 0.5)});
    out.push_back({"torus", primitive_torus(3, 1)});
    out.push_back({"sphere", primitive_sphere(1.5)});
    out.push_back({"fan", fan_fixture(8)});
    out.push_back({"nonmanifold", nonmanifold_stacked_cubes()});
    out.push_back({"two_faces", two_face_sheet()});
    out.push_back({"showcase", geometry_showcase(seed)});
    return out;
}

// ---------------------------------------------------------------------------
// Corruption

std::string_view mutation_name(Mutation m) {
    switch (m) {
        case Mutation::IndexOverflow: return "index_overflow";
        case Mutation::BrokenMates: return "broken_mates";
        case Mutation::OpenLoop: return "open_loop";
        case Mutation::WrongOuterLoop: return "wrong_outer_loop";
        case Mutation::NonUnitAxis: return "nonunit_axis";
    }
    throw UnknownMutation(fmt::format("unknown mutation {}", static_cast<int>(m)));
}

Mutation mutation_from_name(std::string_view name) {
    for (Mutation m : all_mutations())
        if (mutation_name(m) == name) return m;
    throw UnknownMutation(fmt::format("unknown mutation \"{}\"", name));
}

std::vector<Mutation> all_mutations() {
    return {Mutation::IndexOverflow, Mutation::BrokenMates, Mutation::OpenLoop,
            Mutation::WrongOuterLoop, Mutation::NonUnitAxis};
}

namespace {

struct Site {
    std::size_t entity = 0;
    std::size_t other = 0;
};

Site find_site(const Part& part, Mutation m) {
    const auto& t = part.topology;
    switch (m) {
        case Mutation::IndexOverflow:
            if (t.faces.empty()) break;
            return {0, 0};
        case Mutation::BrokenMates:
            // The mate loses its back-reference; the violation is reported on the
            // half-edge that still lists it.
            for (std::size_t h = 0; h < t.halfedges.size(); ++h)
                if (!t.halfedges[h].mates.empty())
                    return {h, at(t.halfedges[h].mates.front())};
            break;
        case Mutation::OpenLoop:
            for (std::size_t l = 0; l < t.loops.size(); ++l) {
                const auto& hes = t.loops[l].halfedges;
                if (hes.size() < 2) continue;
                for (Index h : hes) {
                    const Edge& e = t.edges[at(t.halfedges[at(h)].edge)];
                    if (e.start_vertex != e.end_vertex) return {l, at(h)};
                }
            }
            break;
        case Mutation::WrongOuterLoop:
            for (std::size_t f = 0; f < t.faces.size(); ++f) {
                const auto& loops = t.faces[f].loops;
                if (loops.empty()) continue;
                for (std::size_t l = 0; l < t.loops.size(); ++l)
                    if (std::find(loops.begin(), loops.end(), static_cast<Index>(l)) == loops.end())
                        return {f, l};
            }
            break;
        case Mutation::NonUnitAxis:
            for (std::size_t s = 0; s < part.geometry.surfaces.size(); ++s) {
                const auto kind = part.geometry.surfaces[s].kind();
                if (kind == SurfaceKind::Plane || kind == SurfaceKind::Cylinder ||
                    kind == SurfaceKind::Cone || kind == SurfaceKind::Sphere ||
                    kind == SurfaceKind::Torus)
                    return {s, 0};
            }
            break;
        default:
            throw UnknownMutation(fmt::format("unknown mutation {}", static_cast<int>(m)));
    }
    throw Error(fmt::format("part has no entity suitable for mutation {}", mutation_name(m)));
}

}  // namespace

Part corrupt(const Part& part, Mutation m) {
    const Site site = find_site(part, m);
    Part out = part;
    auto& t = out.topology;
    switch (m) {
        case Mutation::IndexOverflow:
            t.faces[site.entity].surface = static_cast<Index>(out.geometry.surfaces.size());
            break;
        case Mutation::BrokenMates: {
            auto& mates = t.halfedges[site.other].mates;
            mates.erase(std::remove(mates.begin(), mates.end(), static_cast<Index>(site.entity)),
                        mates.end());
            break;
        }
        case Mutation::OpenLoop:
            t.halfedges[site.other].orientation_wrt_edge = !t.halfedges[site.other].orientation_wrt_edge;
            break;
        case Mutation::WrongOuterLoop:
            t.faces[site.entity].outer_loop = static_cast<Index>(site.other);
            break;
        case Mutation::NonUnitAxis:
            std::visit(
                [](auto& g) {
                    if constexpr (requires { g.x_axis; }) g.x_axis *= 1.5;
                },
                out.geometry.surfaces[site.entity].geometry);
            break;
    }
    return out;
}

MutationTarget mutation_target(const Part& part, Mutation m) {
    const Site site = find_site(part, m);
    switch (m) {
        case Mutation::IndexOverflow:
            return {ViolationKind::IndexOutOfRange, fmt::format("topology/faces/{}/surface", site.entity)};
        case Mutation::BrokenMates:
            return {ViolationKind::MatesNotSymmetric, fmt::format("topology/halfedges/{}/mates", site.entity)};
        case Mutation::OpenLoop:
            return {ViolationKind::OpenLoop, fmt::format("topology/loops/{}/halfedges", site.entity)};
        case Mutation::WrongOuterLoop:
            return {ViolationKind::OuterLoopNotInFace, fmt::format("topology/faces/{}/outer_loop", site.entity)};
        case Mutation::NonUnitAxis:
            return {ViolationKind::NonUnitAxis, fmt::format("geometry/surfaces/{}/x_axis", site.entity)};
    }
    throw UnknownMutation("unknown mutation");
}

}  // namespace brep::synth
