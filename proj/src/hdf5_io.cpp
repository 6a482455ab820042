#include "brep/hdf5_io.hpp"

#include "brep/errors.hpp"
#include "h5.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <charconv>
#include <map>

namespace brep {

namespace {

using h5::Handle;
using Dims = std::vector<std::uint64_t>;

constexpr int kMaxReadDepth = 32;

std::string join(const std::string& path, const std::string& name) { return path + "/" + name; }

// ---------------------------------------------------------------------------
// Writing

struct Writer {
    hid_t loc;
    int dim = 3;

    void scalar(const std::string& name, double v) const { h5::write_doubles(loc, name, {}, &v); }
    void integer(const std::string& name, std::int64_t v) const { h5::write_ints(loc, name, {}, &v); }
    void flag(const std::string& name, bool v) const {
        const std::uint8_t b = v ? 1 : 0;
        h5::write_bytes(loc, name, {}, &b);
    }
    void vec(const std::string& name, const Vec3& v) const {
        h5::write_doubles(loc, name, {static_cast<std::uint64_t>(dim)}, v.data());
    }
    void doubles(const std::string& name, const std::vector<double>& v) const {
        h5::write_doubles(loc, name, {v.size()}, v.data());
    }
    void indices(const std::string& name, const std::vector<Index>& v) const {
        h5::write_ints(loc, name, {v.size()}, v.data());
    }
    void flags(const std::string& name, const std::vector<bool>& v) const {
        std::vector<std::uint8_t> b(v.begin(), v.end());
        h5::write_bytes(loc, name, {b.size()}, b.data());
    }
    void points(const std::string& name, const std::vector<Vec3>& pts, const Dims& shape) const {
        std::vector<double> flat;
        flat.reserve(pts.size() * static_cast<std::size_t>(dim));
        for (const Vec3& p : pts)
            for (int k = 0; k < dim; ++k) flat.push_back(p[k]);
        h5::write_doubles(loc, name, shape, flat.data());
    }
    void transform(const std::optional<Transform>& t) const {
        if (!t) return;
        std::array<double, 12> m{};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) m[static_cast<std::size_t>(r * 4 + c)] = t->rotation(r, c);
            m[static_cast<std::size_t>(r * 4 + 3)] = t->translation[r];
        }
        h5::write_doubles(loc, "transform", {3, 4}, m.data());
    }
    void raw(const RawFields& fields) const {
        for (const auto& [name, f] : fields) {
            std::visit(
                [&](const auto& data) {
                    using T = std::decay_t<decltype(data)>;
                    if constexpr (std::is_same_v<T, std::vector<double>>)
                        h5::write_doubles(loc, name, f.dims, data.data());
                    else if constexpr (std::is_same_v<T, std::vector<std::int64_t>>)
                        h5::write_ints(loc, name, f.dims, data.data());
                    else
                        h5::write_string(loc, name, data);
                },
                f.data);
        }
    }
};

void write_curve(hid_t g, const CurveSpec& c) {
    const Writer w{g, c.dim};
    h5::write_string(g, "type", curve_type_name(c));
    w.doubles("interval", {c.interval.t0, c.interval.t1});
    w.transform(c.transform);
    std::visit(
        [&](const auto& geo) {
            using T = std::decay_t<decltype(geo)>;
            if constexpr (std::is_same_v<T, LineCurve>) {
                w.vec("location", geo.location);
                w.vec("direction", geo.direction);
            } else if constexpr (std::is_same_v<T, CircleCurve>) {
                w.vec("location", geo.location);
                w.scalar("radius", geo.radius);
                w.vec("x_axis", geo.x_axis);
                w.vec("y_axis", geo.y_axis);
            } else if constexpr (std::is_same_v<T, EllipseCurve>) {
                w.vec("focus1", geo.focus1);
                w.vec("focus2", geo.focus2);
                w.scalar("maj_radius", geo.maj_radius);
                w.scalar("min_radius", geo.min_radius);
                w.vec("x_axis", geo.x_axis);
                w.vec("y_axis", geo.y_axis);
            } else if constexpr (std::is_same_v<T, BSplineCurve>) {
                w.points("poles", geo.poles, {geo.poles.size(), static_cast<std::uint64_t>(c.dim)});
                w.doubles("knots", geo.knots);
                w.integer("degree", geo.degree);
                w.flag("rational", geo.rational);
                if (geo.rational) w.doubles("weights", geo.weights);
                w.flag("periodic", geo.periodic);
                w.flag("closed", geo.closed);
                w.integer("continuity", geo.continuity);
            } else {
                w.raw(geo.fields);
            }
        },
        c.geometry);
}

void write_surface(hid_t g, const SurfaceSpec& s) {
    const Writer w{g, 3};
    h5::write_string(g, "type", surface_type_name(s));
    const UVBox& d = s.trim_domain;
    const std::array<double, 4> dom{d.u0, d.u1, d.v0, d.v1};
    h5::write_doubles(g, "trim_domain", {2, 2}, dom.data());
    w.transform(s.transform);
    auto frame = [&](const Vec3& x, const Vec3& y, const Vec3& z) {
        w.vec("x_axis", x);
        w.vec("y_axis", y);
        w.vec("z_axis", z);
    };
    std::visit(
        [&](const auto& geo) {
            using T = std::decay_t<decltype(geo)>;
            if constexpr (std::is_same_v<T, PlaneSurface>) {
                w.vec("location", geo.location);
                w.vec("x_axis", geo.x_axis);
                w.vec("y_axis", geo.y_axis);
            } else if constexpr (std::is_same_v<T, CylinderSurface> ||
                                 std::is_same_v<T, SphereSurface>) {
                w.vec("location", geo.location);
                w.scalar("radius", geo.radius);
                frame(geo.x_axis, geo.y_axis, geo.z_axis);
            } else if constexpr (std::is_same_v<T, ConeSurface>) {
                w.vec("location", geo.location);
                w.scalar("radius", geo.radius);
                w.scalar("angle", geo.angle);
                frame(geo.x_axis, geo.y_axis, geo.z_axis);
            } else if constexpr (std::is_same_v<T, TorusSurface>) {
                w.vec("location", geo.location);
                w.scalar("max_radius", geo.max_radius);
                w.scalar("min_radius", geo.min_radius);
                frame(geo.x_axis, geo.y_axis, geo.z_axis);
            } else if constexpr (std::is_same_v<T, BSplineSurface>) {
                const auto nu = static_cast<std::uint64_t>(std::max(geo.nu, 0));
                const auto nv = static_cast<std::uint64_t>(std::max(geo.nv, 0));
                if (geo.poles.size() != nu * nv || (geo.rational() && geo.weights.size() != nu * nv))
                    throw ValidationError("B-spline surface pole/weight grid does not match nu x nv");
                w.points("poles", geo.poles, {nu, nv, 3});
                w.doubles("u_knots", geo.u_knots);
                w.doubles("v_knots", geo.v_knots);
                w.integer("u_degree", geo.u_degree);
                w.integer("v_degree", geo.v_degree);
                w.flag("u_rational", geo.u_rational);
                w.flag("v_rational", geo.v_rational);
                if (geo.rational()) h5::write_doubles(g, "weights", {nu, nv}, geo.weights.data());
                w.flag("u_periodic", geo.u_periodic);
                w.flag("v_periodic", geo.v_periodic);
                w.flag("u_closed", geo.u_closed);
                w.flag("v_closed", geo.v_closed);
                w.integer("continuity", geo.continuity);
            } else if constexpr (std::is_same_v<T, ExtrusionSurface>) {
                Handle sub = h5::create_group(g, "curve");
                write_curve(sub, geo.curve);
                w.vec("direction", geo.direction);
            } else if constexpr (std::is_same_v<T, RevolutionSurface>) {
                Handle sub = h5::create_group(g, "curve");
                write_curve(sub, geo.curve);
                w.vec("location", geo.location);
                w.vec("z_axis", geo.z_axis);
            } else if constexpr (std::is_same_v<T, OffsetSurface>) {
                Handle sub = h5::create_group(g, "surface");
                write_surface(sub, *geo.surface);
                w.scalar("value", geo.value);
            } else {
                w.raw(geo.fields);
            }
        },
        s.geometry);
}

template <typename T, typename Fn>
void write_collection(hid_t parent, const std::string& name, const std::vector<T>& items, Fn fn) {
    Handle g = h5::create_group(parent, name);
    for (std::size_t i = 0; i < items.size(); ++i) {
        Handle sub = h5::create_group(g, padded_name(i, items.size()));
        fn(sub.get(), items[i]);
    }
}

void write_part(hid_t g, const Part& part) {
    {
        Handle geo = h5::create_group(g, "geometry");
        const auto& gs = part.geometry;
        write_collection(geo, "2dcurves", gs.curves2d, write_curve);
        write_collection(geo, "3dcurves", gs.curves3d, write_curve);
        write_collection(geo, "surfaces", gs.surfaces, write_surface);
        Writer{geo, 3}.points("vertices", gs.vertices, {gs.vertices.size(), 3});
        const std::array<double, 6> bb{gs.bbox.min.x(), gs.bbox.min.y(), gs.bbox.min.z(),
                                       gs.bbox.max.x(), gs.bbox.max.y(), gs.bbox.max.z()};
        h5::write_doubles(geo, "bbox", {2, 3}, bb.data());
    }
    {
        Handle topo = h5::create_group(g, "topology");
        const auto& t = part.topology;
        write_collection(topo, "edges", t.edges, [](hid_t s, const Edge& e) {
            const Writer w{s};
            w.integer("3dcurve", e.curve3d);
            w.integer("start_vertex", e.start_vertex);
            w.integer("end_vertex", e.end_vertex);
        });
        write_collection(topo, "faces", t.faces, [](hid_t s, const Face& f) {
            const Writer w{s};
            const UVBox& d = f.exact_domain;
            w.doubles("exact_domain", {d.u0, d.u1, d.v0, d.v1});
            w.flag("has_singularities", f.has_singularities);
            w.indices("loops", f.loops);
            w.integer("nr_singularities", f.nr_singularities);
            w.integer("outer_loop", f.outer_loop);
            std::vector<double> sing;
            for (const Vec2& p : f.singularities) {
                sing.push_back(p.x());
                sing.push_back(p.y());
            }
            h5::write_doubles(s, "singularities", {f.singularities.size(), 2}, sing.data());
            w.integer("surface", f.surface);
            w.flag("surface_orientation", f.surface_orientation);
        });
        write_collection(topo, "halfedges", t.halfedges, [](hid_t s, const HalfEdge& h) {
            const Writer w{s};
            w.integer("2dcurve", h.curve2d);
            w.integer("edge", h.edge);
            w.indices("mates", h.mates);
            w.flag("orientation_wrt_edge", h.orientation_wrt_edge);
        });
        write_collection(topo, "loops", t.loops,
                         [](hid_t s, const Loop& l) { Writer{s}.indices("halfedges", l.halfedges); });
        write_collection(topo, "shells", t.shells, [](hid_t s, const Shell& sh) {
            const Writer w{s};
            w.indices("faces", sh.faces);
            w.flags("orientation_wrt_solid", sh.orientation_wrt_solid);
        });
        write_collection(topo, "solids", t.solids,
                         [](hid_t s, const Solid& so) { Writer{s}.indices("shells", so.shells); });
    }
    write_collection(g, "mesh", part.meshes, [](hid_t s, const FaceMesh& m) {
        Writer{s}.points("points", m.points, {m.points.size(), 3});
        std::vector<std::int64_t> tri;
        for (const auto& t : m.triangles) tri.insert(tri.end(), t.begin(), t.end());
        h5::write_ints(s, "triangles", {m.triangles.size(), 3}, tri.data());
    });
}

// ---------------------------------------------------------------------------
// Reading

struct Reader {
    hid_t loc;
    std::string path;
    int dim = 3;

    std::string at(const std::string& name) const { return join(path, name); }
    bool has(const std::string& name) const { return h5::has_child(loc, name); }

    double scalar(const std::string& name) const {
        auto a = h5::read_doubles(loc, name, at(name));
        if (a.values.size() != 1) throw FormatError(fmt::format("expected a scalar: {}", at(name)));
        return a.values[0];
    }
    std::int64_t integer(const std::string& name) const {
        auto a = h5::read_ints(loc, name, at(name));
        if (a.values.size() != 1) throw FormatError(fmt::format("expected a scalar: {}", at(name)));
        return a.values[0];
    }
    bool flag(const std::string& name) const { return integer(name) != 0; }
    int small_int(const std::string& name, std::int64_t lo, std::int64_t hi) const {
        const std::int64_t v = integer(name);
        if (v < lo || v > hi) throw FormatError(fmt::format("value out of range: {}", at(name)));
        return static_cast<int>(v);
    }
    Vec3 vec(const std::string& name) const {
        auto a = h5::read_doubles(loc, name, at(name));
        if (a.values.size() != static_cast<std::size_t>(dim))
            throw FormatError(fmt::format("expected {} components: {}", dim, at(name)));
        Vec3 v = Vec3::Zero();
        for (int k = 0; k < dim; ++k) v[k] = a.values[static_cast<std::size_t>(k)];
        return v;
    }
    std::vector<double> doubles(const std::string& name) const {
        auto a = h5::read_doubles(loc, name, at(name));
        if (a.dims.size() > 1) throw FormatError(fmt::format("expected a vector: {}", at(name)));
        return std::move(a.values);
    }
    std::vector<Index> indices(const std::string& name) const {
        auto a = h5::read_ints(loc, name, at(name));
        if (a.dims.size() > 1) throw FormatError(fmt::format("expected a vector: {}", at(name)));
        return std::move(a.values);
    }
    std::vector<bool> flags(const std::string& name) const {
        auto v = indices(name);
        return {v.begin(), v.end()};
    }
    /// Row-major array of `width`-component points; an empty dataset of any shape is accepted.
    std::vector<Vec3> points(const std::string& name, std::uint64_t width) const {
        auto a = h5::read_doubles(loc, name, at(name));
        if (a.values.empty()) return {};
        if (a.dims.empty() || a.dims.back() != width)
            throw FormatError(fmt::format("expected rows of {} values: {}", width, at(name)));
        std::vector<Vec3> out(a.values.size() / width, Vec3::Zero());
        for (std::size_t i = 0; i < out.size(); ++i)
            for (std::uint64_t k = 0; k < width; ++k) out[i][static_cast<int>(k)] = a.values[i * width + k];
        return out;
    }
    std::optional<Transform> transform() const {
        if (!has("transform")) return std::nullopt;
        auto a = h5::read_doubles(loc, "transform", at("transform"));
        if (a.values.size() != 12)
            throw FormatError(fmt::format("expected a 3x4 matrix: {}", at("transform")));
        Transform t;
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) t.rotation(r, c) = a.values[static_cast<std::size_t>(r * 4 + c)];
            t.translation[r] = a.values[static_cast<std::size_t>(r * 4 + 3)];
        }
        return t;
    }
    RawFields raw(std::initializer_list<std::string_view> skip) const {
        RawFields out;
        for (const std::string& name : h5::child_names(loc)) {
            if (std::find(skip.begin(), skip.end(), name) != skip.end()) continue;
            if (!h5::is_dataset(loc, name)) continue;
            const auto info = h5::dataset_info(loc, name, at(name));
            RawField f;
            f.dims = info.dims;
            switch (info.value_class) {
                case h5::ValueClass::Float: f.data = h5::read_doubles(loc, name, at(name)).values; break;
                case h5::ValueClass::Integer: f.data = h5::read_ints(loc, name, at(name)).values; break;
                case h5::ValueClass::String:
                    if (info.element_count() != 1) continue;
                    f.data = h5::read_string(loc, name, at(name));
                    f.dims.clear();
                    break;
                default: continue;
            }
            out.emplace(name, std::move(f));
        }
        return out;
    }
};

CurveSpec read_curve(hid_t g, const std::string& path, int dim) {
    const Reader r{g, path, dim};
    CurveSpec c;
    c.dim = dim;
    const std::string type = h5::read_string(g, "type", r.at("type"));
    const auto iv = r.doubles("interval");
    if (iv.size() != 2) throw FormatError(fmt::format("expected 2 values: {}", r.at("interval")));
    c.interval = {iv[0], iv[1]};
    c.transform = r.transform();
    const auto kind = curve_kind_from_name(type);
    switch (kind.value_or(CurveKind::Other)) {
        case CurveKind::Line: c.geometry = LineCurve{r.vec("location"), r.vec("direction")}; break;
        case CurveKind::Circle:
            c.geometry = CircleCurve{r.vec("location"), r.scalar("radius"), r.vec("x_axis"),
                                     r.vec("y_axis")};
            break;
        case CurveKind::Ellipse:
            c.geometry = EllipseCurve{r.vec("focus1"),     r.vec("focus2"),
                                      r.scalar("maj_radius"), r.scalar("min_radius"),
                                      r.vec("x_axis"),     r.vec("y_axis")};
            break;
        case CurveKind::BSpline: {
            BSplineCurve b;
            b.poles = r.points("poles", static_cast<std::uint64_t>(dim));
            std::vector<std::int64_t> mults;
            if (r.has("multiplicities")) mults = r.indices("multiplicities");
            b.knots = normalize_knots(r.doubles("knots"), mults);
            b.degree = r.small_int("degree", 0, 1 << 16);
            b.rational = r.flag("rational");
            if (b.rational || r.has("weights")) b.weights = r.doubles("weights");
            b.periodic = r.flag("periodic");
            b.closed = r.flag("closed");
            b.continuity = r.small_int("continuity", -(1 << 16), 1 << 16);
            c.geometry = std::move(b);
            break;
        }
        case CurveKind::Other:
            c.geometry = OtherCurve{type, r.raw({"type", "interval", "transform"})};
            break;
    }
    return c;
}

SurfaceSpec read_surface(hid_t g, const std::string& path, int depth) {
    if (depth > kMaxReadDepth) throw FormatError(fmt::format("surface nesting too deep: {}", path));
    const Reader r{g, path, 3};
    SurfaceSpec s;
    const std::string type = h5::read_string(g, "type", r.at("type"));
    {
        auto a = h5::read_doubles(g, "trim_domain", r.at("trim_domain"));
        if (a.values.size() != 4)
            throw FormatError(fmt::format("expected a 2x2 matrix: {}", r.at("trim_domain")));
        s.trim_domain = {a.values[0], a.values[1], a.values[2], a.values[3]};
    }
    s.transform = r.transform();
    const auto kind = surface_kind_from_name(type);
    switch (kind.value_or(SurfaceKind::Other)) {
        case SurfaceKind::Plane:
            s.geometry = PlaneSurface{r.vec("location"), r.vec("x_axis"), r.vec("y_axis")};
            break;
        case SurfaceKind::Cylinder:
            s.geometry = CylinderSurface{r.vec("location"), r.scalar("radius"), r.vec("x_axis"),
                                         r.vec("y_axis"), r.vec("z_axis")};
            break;
        case SurfaceKind::Cone:
            s.geometry = ConeSurface{r.vec("location"), r.scalar("radius"), r.scalar("angle"),
                                     r.vec("x_axis"),   r.vec("y_axis"),    r.vec("z_axis")};
            break;
        case SurfaceKind::Sphere:
            s.geometry = SphereSurface{r.vec("location"), r.scalar("radius"), r.vec("x_axis"),
                                       r.vec("y_axis"), r.vec("z_axis")};
            break;
        case SurfaceKind::Torus:
            s.geometry = TorusSurface{r.vec("location"), r.scalar("max_radius"),
                                      r.scalar("min_radius"), r.vec("x_axis"),
                                      r.vec("y_axis"),   r.vec("z_axis")};
            break;
        case SurfaceKind::BSpline: {
            BSplineSurface b;
            auto poles = h5::read_doubles(g, "poles", r.at("poles"));
            if (!poles.values.empty()) {
                if (poles.dims.size() != 3 || poles.dims[2] != 3)
                    throw FormatError(fmt::format("expected nu x nv x 3 poles: {}", r.at("poles")));
                b.nu = static_cast<int>(poles.dims[0]);
                b.nv = static_cast<int>(poles.dims[1]);
            }
            b.poles = r.points("poles", 3);
            b.u_knots = normalize_knots(r.doubles("u_knots"), r.has("u_multiplicities")
                                                                  ? r.indices("u_multiplicities")
                                                                  : std::vector<std::int64_t>{});
            b.v_knots = normalize_knots(r.doubles("v_knots"), r.has("v_multiplicities")
                                                                  ? r.indices("v_multiplicities")
                                                                  : std::vector<std::int64_t>{});
            b.u_degree = r.small_int("u_degree", 0, 1 << 16);
            b.v_degree = r.small_int("v_degree", 0, 1 << 16);
            b.u_rational = r.flag("u_rational");
            b.v_rational = r.flag("v_rational");
            if (b.rational() || r.has("weights")) {
                auto w = h5::read_doubles(g, "weights", r.at("weights"));
                b.weights = std::move(w.values);
            }
            b.u_periodic = r.flag("u_periodic");
            b.v_periodic = r.flag("v_periodic");
            b.u_closed = r.flag("u_closed");
            b.v_closed = r.flag("v_closed");
            b.continuity = r.small_int("continuity", -(1 << 16), 1 << 16);
            s.geometry = std::move(b);
            break;
        }
        case SurfaceKind::Extrusion: {
            Handle sub = h5::open_group(g, "curve", r.at("curve"));
            s.geometry = ExtrusionSurface{read_curve(sub, r.at("curve"), 3), r.vec("direction")};
            break;
        }
        case SurfaceKind::Revolution: {
            Handle sub = h5::open_group(g, "curve", r.at("curve"));
            s.geometry = RevolutionSurface{read_curve(sub, r.at("curve"), 3), r.vec("location"),
                                           r.vec("z_axis")};
            break;
        }
        case SurfaceKind::Offset: {
            Handle sub = h5::open_group(g, "surface", r.at("surface"));
            s.geometry = OffsetSurface{read_surface(sub, r.at("surface"), depth + 1), r.scalar("value")};
            break;
        }
        case SurfaceKind::Other:
            s.geometry = OtherSurface{type, r.raw({"type", "trim_domain", "transform"})};
            break;
    }
    return s;
}

std::optional<std::uint64_t> parse_index(std::string_view s) {
    if (s.empty() || s.size() > 18) return std::nullopt;
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

/// Numeric children of an entity collection, in index order; they must be exactly 0..n-1.
std::vector<std::string> indexed_children(hid_t g, const std::string& path) {
    std::map<std::uint64_t, std::string> by_index;
    for (const std::string& name : h5::child_names(g)) {
        const auto idx = parse_index(name);
        if (!idx) throw FormatError(fmt::format("unexpected member: {}", join(path, name)));
        if (!h5::is_group(g, name)) throw FormatError(fmt::format("expected a group: {}", join(path, name)));
        if (!by_index.emplace(*idx, name).second)
            throw FormatError(fmt::format("duplicate index: {}", join(path, name)));
    }
    std::vector<std::string> out;
    for (const auto& [idx, name] : by_index) {
        if (idx != out.size())
            throw FormatError(fmt::format("missing entity {} in {}", out.size(), path));
        out.push_back(name);
    }
    return out;
}

template <typename Fn>
auto read_collection(hid_t parent, const std::string& parent_path, const std::string& name, Fn fn) {
    const std::string path = join(parent_path, name);
    Handle g = h5::open_group(parent, name, path);
    using T = std::invoke_result_t<Fn, hid_t, const std::string&>;
    std::vector<T> out;
    for (const std::string& child : indexed_children(g, path)) {
        Handle sub = h5::open_group(g, child, join(path, child));
        out.push_back(fn(sub.get(), join(path, child)));
    }
    return out;
}

FaceMesh read_mesh(hid_t g, const std::string& path) {
    const Reader r{g, path};
    FaceMesh m;
    m.points = r.points("points", 3);
    auto tri = h5::read_ints(g, "triangles", r.at("triangles"));
    if (!tri.values.empty()) {
        if (tri.dims.size() != 2 || tri.dims[1] != 3)
            throw FormatError(fmt::format("expected K x 3 triangles: {}", r.at("triangles")));
        m.triangles.resize(tri.values.size() / 3);
        for (std::size_t i = 0; i < m.triangles.size(); ++i)
            for (std::size_t k = 0; k < 3; ++k) m.triangles[i][k] = tri.values[i * 3 + k];
    }
    return m;
}

std::vector<FaceMesh> read_mesh_group(hid_t part, const std::string& path, std::size_t face_count) {
    auto meshes = read_collection(part, path, "mesh", read_mesh);
    if (meshes.size() > face_count)
        throw FormatError(fmt::format("more meshes than faces: {}", join(path, "mesh")));
    meshes.resize(face_count);
    return meshes;
}

Part read_part(hid_t g, const std::string& path, const ReadOptions& options) {
    Part part;
    {
        const std::string gp = join(path, "geometry");
        Handle geo = h5::open_group(g, "geometry", gp);
        auto& gs = part.geometry;
        gs.curves2d = read_collection(geo, gp, "2dcurves",
                                      [](hid_t s, const std::string& p) { return read_curve(s, p, 2); });
        gs.curves3d = read_collection(geo, gp, "3dcurves",
                                      [](hid_t s, const std::string& p) { return read_curve(s, p, 3); });
        gs.surfaces = read_collection(geo, gp, "surfaces", [](hid_t s, const std::string& p) {
            return read_surface(s, p, 0);
        });
        const Reader r{geo, gp};
        gs.vertices = r.points("vertices", 3);
        auto bb = h5::read_doubles(geo, "bbox", r.at("bbox"));
        if (bb.values.size() != 6) throw FormatError(fmt::format("expected a 2x3 matrix: {}", r.at("bbox")));
        gs.bbox.min = Vec3(bb.values[0], bb.values[1], bb.values[2]);
        gs.bbox.max = Vec3(bb.values[3], bb.values[4], bb.values[5]);
    }
    {
        const std::string tp = join(path, "topology");
        Handle topo = h5::open_group(g, "topology", tp);
        auto& t = part.topology;
        t.edges = read_collection(topo, tp, "edges", [](hid_t s, const std::string& p) {
            const Reader r{s, p};
            return Edge{r.integer("3dcurve"), r.integer("start_vertex"), r.integer("end_vertex")};
        });
        t.faces = read_collection(topo, tp, "faces", [](hid_t s, const std::string& p) {
            const Reader r{s, p};
            Face f;
            const auto d = r.doubles("exact_domain");
            if (d.size() != 4) throw FormatError(fmt::format("expected 4 values: {}", r.at("exact_domain")));
            f.exact_domain = normalize_exact_domain({d[0], d[1], d[2], d[3]});
            f.has_singularities = r.flag("has_singularities");
            f.loops = r.indices("loops");
            f.nr_singularities = r.integer("nr_singularities");
            f.outer_loop = r.integer("outer_loop");
            for (const Vec3& p2 : r.points("singularities", 2)) f.singularities.push_back(p2.head<2>());
            f.surface = r.integer("surface");
            f.surface_orientation = r.flag("surface_orientation");
            return f;
        });
        t.halfedges = read_collection(topo, tp, "halfedges", [](hid_t s, const std::string& p) {
            const Reader r{s, p};
            return HalfEdge{r.integer("2dcurve"), r.integer("edge"), r.indices("mates"),
                            r.flag("orientation_wrt_edge")};
        });
        t.loops = read_collection(topo, tp, "loops", [](hid_t s, const std::string& p) {
            return Loop{Reader{s, p}.indices("halfedges")};
        });
        t.shells = read_collection(topo, tp, "shells", [](hid_t s, const std::string& p) {
            const Reader r{s, p};
            return Shell{r.indices("faces"), r.flags("orientation_wrt_solid")};
        });
        t.solids = read_collection(topo, tp, "solids", [](hid_t s, const std::string& p) {
            return Solid{Reader{s, p}.indices("shells")};
        });
    }
    if (options.load_meshes) {
        part.meshes = read_mesh_group(g, path, part.topology.faces.size());
    } else {
        if (!h5::is_group(g, "mesh")) throw FormatError(fmt::format("missing group: {}", join(path, "mesh")));
        part.meshes.resize(part.topology.faces.size());
    }
    return part;
}

/// Checks the root (version attribute, single `parts` group) and returns the
/// part group names ordered by part number.
std::vector<std::string> open_root(hid_t file, std::string* version_out) {
    const std::string version = h5::read_string_attribute(file, "version", "/version");
    if (version_out) *version_out = version;
    if (version != kFormatVersion)
        throw FormatError(fmt::format("unsupported version \"{}\" (expected \"{}\")", version,
                                      kFormatVersion));
    for (const std::string& name : h5::child_names(file))
        if (name != "parts") throw FormatError(fmt::format("unexpected member: /{}", name));
    Handle parts = h5::open_group(file, "parts", "/parts");
    std::map<std::uint64_t, std::string> ordered;
    for (const std::string& name : h5::child_names(parts)) {
        std::optional<std::uint64_t> n;
        if (name.rfind("part_", 0) == 0) n = parse_index(std::string_view(name).substr(5));
        if (!n) throw FormatError(fmt::format("unexpected member: /parts/{}", name));
        if (!h5::is_group(parts, name)) throw FormatError(fmt::format("expected a group: /parts/{}", name));
        if (!ordered.emplace(*n, name).second)
            throw FormatError(fmt::format("duplicate part number: /parts/{}", name));
    }
    std::vector<std::string> out;
    for (auto& [n, name] : ordered) out.push_back(name);
    return out;
}

}  // namespace

std::string padded_name(std::size_t index, std::size_t count) {
    const std::size_t width = std::max<std::size_t>(3, fmt::format("{}", count > 0 ? count - 1 : 0).size());
    return fmt::format("{:0{}}", index, width);
}

std::vector<double> normalize_knots(const std::vector<double>& knots,
                                    const std::vector<std::int64_t>& multiplicities) {
    if (multiplicities.empty()) return knots;
    if (multiplicities.size() != knots.size())
        throw FormatError("knot and multiplicity counts differ");
    std::vector<double> out;
    for (std::size_t i = 0; i < knots.size(); ++i) {
        if (multiplicities[i] < 0 || multiplicities[i] > (1 << 16))
            throw FormatError("knot multiplicity out of range");
        out.insert(out.end(), static_cast<std::size_t>(multiplicities[i]), knots[i]);
    }
    return out;
}

UVBox normalize_exact_domain(const std::array<double, 4>& d) {
    const UVBox as_stored{d[0], d[1], d[2], d[3]};
    if (as_stored.u0 <= as_stored.u1 && as_stored.v0 <= as_stored.v1) return as_stored;
    const UVBox swapped{d[0], d[2], d[1], d[3]};
    if (swapped.u0 <= swapped.u1 && swapped.v0 <= swapped.v1) return swapped;
    return as_stored;
}

std::vector<Part> read_parts(const std::filesystem::path& path, const ReadOptions& options) {
    Handle file = h5::open_file_read(path.string());
    std::vector<Part> parts;
    const auto names = open_root(file, nullptr);
    Handle group = h5::open_group(file, "parts", "/parts");
    for (const std::string& name : names) {
        const std::string p = "/parts/" + name;
        Handle g = h5::open_group(group, name, p);
        parts.push_back(read_part(g, p, options));
    }
    return parts;
}

std::vector<PartMeshes> read_meshes(const std::filesystem::path& path) {
    Handle file = h5::open_file_read(path.string());
    std::vector<PartMeshes> out;
    const auto names = open_root(file, nullptr);
    Handle group = h5::open_group(file, "parts", "/parts");
    for (const std::string& name : names) {
        const std::string p = "/parts/" + name;
        Handle g = h5::open_group(group, name, p);
        const std::string fp = p + "/topology/faces";
        Handle topo = h5::open_group(g, "topology", p + "/topology");
        Handle faces = h5::open_group(topo, "faces", fp);
        const std::size_t face_count = indexed_children(faces, fp).size();
        PartMeshes pm;
        for (FaceMesh& m : read_mesh_group(g, p, face_count)) {
            if (m.empty())
                pm.emplace_back(std::nullopt);
            else
                pm.emplace_back(std::move(m));
        }
        out.push_back(std::move(pm));
    }
    return out;
}

FileHandle write_parts(const std::vector<Part>& parts, const std::filesystem::path& path,
                       const WriteOptions& options) {
    for (std::size_t i = 0; options.validate && i < parts.size(); ++i) {
        const auto violations = validate_part(parts[i]);
        if (!has_errors(violations)) continue;
        std::string msg = fmt::format("part {} has invariant violations:", i);
        for (const Violation& v : violations)
            if (v.severity == Severity::Error) msg += fmt::format("\n  {}: {}", v.path, v.message);
        throw ValidationError(msg);
    }
    Handle file = h5::create_file(path.string());
    h5::write_string_attribute(file, "version", std::string(kFormatVersion));
    Handle group = h5::create_group(file, "parts");
    for (std::size_t i = 0; i < parts.size(); ++i) {
        Handle g = h5::create_group(group, "part_" + padded_name(i, parts.size()));
        write_part(g, parts[i]);
    }
    if (H5Fflush(file, H5F_SCOPE_GLOBAL) < 0) throw IoError("cannot flush " + path.string());
    return {path, std::string(kFormatVersion), parts.size()};
}

bool FileReport::clean() const {
    if (!readable || !errors.empty()) return false;
    return std::none_of(parts.begin(), parts.end(),
                        [](const PartReport& p) { return has_errors(p.violations); });
}

int FileReport::exit_code() const {
    if (!readable || !errors.empty()) return 2;
    return clean() ? 0 : 1;
}

FileReport validate_file(const std::filesystem::path& path) {
    FileReport report;
    report.path = path;
    try {
        Handle file = h5::open_file_read(path.string());
        try {
            report.version = h5::read_string_attribute(file, "version", "/version");
        } catch (const Error&) {
        }
        if (h5::is_group(file, "parts")) {
            Handle parts = h5::open_group(file, "parts", "/parts");
            for (const std::string& name : h5::child_names(parts)) {
                report.groups.push_back("/parts/" + name);
                if (!h5::is_group(parts, name)) continue;
                Handle g = h5::open_group(parts, name, "/parts/" + name);
                for (const char* sub : {"geometry", "topology", "mesh"})
                    if (h5::is_group(g, sub)) report.groups.push_back("/parts/" + name + "/" + sub);
            }
        }
        const auto names = open_root(file, nullptr);
        Handle group = h5::open_group(file, "parts", "/parts");
        for (const std::string& name : names) {
            const std::string p = "/parts/" + name;
            Handle g = h5::open_group(group, name, p);
            Part part = read_part(g, p, {});
            report.parts.push_back({p, validate_part(part)});
        }
        report.readable = true;
    } catch (const Error& e) {
        report.errors.emplace_back(e.what());
        report.parts.clear();
    } catch (const std::exception& e) {
        report.errors.emplace_back(fmt::format("unexpected failure: {}", e.what()));
        report.parts.clear();
    }
    return report;
}

}  // namespace brep
