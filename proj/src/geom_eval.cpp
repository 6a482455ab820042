#include "brep/geom_eval.hpp"

#include "brep/bspline.hpp"
#include "brep/errors.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <fmt/format.h>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>

namespace brep {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// k-th derivative of cos / sin at x.
double cos_d(double x, int k) {
    switch (k & 3) {
        case 0: return std::cos(x);
        case 1: return -std::sin(x);
        case 2: return -std::cos(x);
        default: return std::sin(x);
    }
}

double sin_d(double x, int k) {
    switch (k & 3) {
        case 0: return std::sin(x);
        case 1: return std::cos(x);
        case 2: return -std::sin(x);
        default: return -std::cos(x);
    }
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

struct Registry {
    std::shared_mutex mutex;
    std::map<std::string, OtherCurveEvaluator> curves;
    std::map<std::string, OtherSurfaceEvaluator> surfaces;
};

Registry& registry() {
    static Registry r;
    return r;
}

double reduce(double t, const Interval& range, std::optional<double> period, const char* what) {
    const double tol = 1e-9 * std::max(1.0, range.t1 - range.t0);
    if (t >= range.t0 - tol && t <= range.t1 + tol) return t;
    if (period && *period > 0.0 && std::isfinite(t)) {
        double r = std::fmod(t - range.t0, *period);
        if (r < 0.0) r += *period;
        const double shifted = range.t0 + r;
        if (shifted <= range.t1 + tol) return shifted;
        if (shifted - *period >= range.t0 - tol) return shifted - *period;
    }
    throw DomainError(fmt::format("{} parameter {} outside [{}, {}]", what, t, range.t0, range.t1));
}

std::vector<Vec3> apply_transform(std::vector<Vec3> d, const std::optional<Transform>& tf) {
    if (!tf) return d;
    for (std::size_t k = 0; k < d.size(); ++k)
        d[k] = k == 0 ? tf->apply_point(d[k]) : tf->apply_vector(d[k]);
    return d;
}

std::vector<Vec3> curve_derivs_raw(const CurveSpec& curve, double t, int order) {
    std::vector<Vec3> d(static_cast<std::size_t>(order + 1), Vec3::Zero());
    std::visit(
        [&](const auto& g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, LineCurve>) {
                d[0] = g.location + t * g.direction;
                if (order >= 1) d[1] = g.direction;
            } else if constexpr (std::is_same_v<T, CircleCurve>) {
                for (int k = 0; k <= order; ++k)
                    d[static_cast<std::size_t>(k)] =
                        g.radius * (cos_d(t, k) * g.x_axis + sin_d(t, k) * g.y_axis);
                d[0] += g.location;
            } else if constexpr (std::is_same_v<T, EllipseCurve>) {
                for (int k = 0; k <= order; ++k)
                    d[static_cast<std::size_t>(k)] = g.maj_radius * cos_d(t, k) * g.x_axis +
                                                     g.min_radius * sin_d(t, k) * g.y_axis;
                d[0] += 0.5 * (g.focus1 + g.focus2);
            } else if constexpr (std::is_same_v<T, BSplineCurve>) {
                d = bspline::curve_derivatives(g, t, order);
            } else {
                OtherCurveEvaluator fallback;
                {
                    std::shared_lock lock(registry().mutex);
                    auto it = registry().curves.find(g.type_name);
                    if (it != registry().curves.end()) fallback = it->second;
                }
                if (!fallback)
                    throw UnsupportedKind(
                        fmt::format("no evaluator registered for curve type '{}'", g.type_name));
                d = fallback(g, t, order);
                d.resize(static_cast<std::size_t>(order + 1), Vec3::Zero());
            }
        },
        curve.geometry);
    return apply_transform(std::move(d), curve.transform);
}

// ---------------------------------------------------------------------------
// Truncated bivariate Taylor series, used for the unit normal of offset bases.

template <typename T>
class Taylor2 {
public:
    Taylor2(int order, T zero)
        : order_(order), c_(static_cast<std::size_t>((order + 1) * (order + 1)), zero) {}

    int order() const { return order_; }
    T& operator()(int i, int j) { return c_[idx(i, j)]; }
    const T& operator()(int i, int j) const { return c_[idx(i, j)]; }

private:
    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(order_ + 1) +
               static_cast<std::size_t>(j);
    }
    int order_;
    std::vector<T> c_;
};

template <typename A, typename B, typename Op, typename R>
Taylor2<R> taylor_product(const Taylor2<A>& a, const Taylor2<B>& b, Op op, R zero) {
    const int K = a.order();
    Taylor2<R> out(K, zero);
    for (int i = 0; i <= K; ++i)
        for (int j = 0; i + j <= K; ++j) {
            R acc = zero;
            for (int p = 0; p <= i; ++p)
                for (int q = 0; q <= j; ++q) acc += op(a(p, q), b(i - p, j - q));
            out(i, j) = acc;
        }
    return out;
}

SurfaceDerivatives surface_derivs_raw(const SurfaceSpec& surface, double u, double v, int order,
                                      int depth);

SurfaceDerivatives offset_derivs(const OffsetSurface& g, double u, double v, int order,
                                 int depth) {
    const int K = order;
    const SurfaceDerivatives base = surface_derivs_raw(*g.surface, u, v, K + 1, depth + 1);

    // N = Su x Sv as a Taylor series: Leibniz on the cross product.
    Taylor2<Vec3> n_raw(K, Vec3::Zero());
    for (int i = 0; i <= K; ++i)
        for (int j = 0; i + j <= K; ++j) {
            Vec3 acc = Vec3::Zero();
            for (int a = 0; a <= i; ++a)
                for (int b = 0; b <= j; ++b)
                    acc += binomial(i, a) * binomial(j, b) *
                           base(a + 1, b).cross(base(i - a, j - b + 1));
            n_raw(i, j) = acc / (factorial(i) * factorial(j));
        }

    const Taylor2<double> q = taylor_product(
        n_raw, n_raw, [](const Vec3& x, const Vec3& y) { return x.dot(y); }, 0.0);
    const double q0 = q(0, 0);
    if (!(std::sqrt(q0) >= kSingularJetThreshold))
        throw SingularJet(fmt::format("offset base surface is singular at ({}, {})", u, v));

    // g = q^(-1/2) = q0^(-1/2) * sum_m binom(-1/2, m) (delta / q0)^m
    Taylor2<double> delta = q;
    delta(0, 0) = 0.0;
    for (int i = 0; i <= K; ++i)
        for (int j = 0; i + j <= K; ++j) delta(i, j) /= q0;
    Taylor2<double> power(K, 0.0);
    power(0, 0) = 1.0;
    Taylor2<double> inv_sqrt(K, 0.0);
    double coeff = 1.0;  // binom(-1/2, m)
    auto mul = [](double x, double y) { return x * y; };
    for (int m = 0; m <= K; ++m) {
        if (m > 0) {
            coeff *= (-0.5 - (m - 1)) / m;
            power = taylor_product(power, delta, mul, 0.0);
        }
        for (int i = 0; i <= K; ++i)
            for (int j = 0; i + j <= K; ++j) inv_sqrt(i, j) += coeff * power(i, j);
    }
    const double scale = 1.0 / std::sqrt(q0);
    const Taylor2<Vec3> unit = taylor_product(
        n_raw, inv_sqrt, [scale](const Vec3& x, double y) -> Vec3 { return x * (y * scale); },
        Vec3(Vec3::Zero()));

    SurfaceDerivatives out(K);
    for (int i = 0; i <= K; ++i)
        for (int j = 0; i + j <= K; ++j)
            out(i, j) = base(i, j) + g.value * factorial(i) * factorial(j) * unit(i, j);
    return out;
}

SurfaceDerivatives surface_derivs_raw(const SurfaceSpec& surface, double u, double v, int order,
                                      int depth) {
    if (depth >= kMaxNestingDepth)
        throw UnsupportedKind(fmt::format("surface nesting deeper than {}", kMaxNestingDepth));
    const int K = order;
    SurfaceDerivatives d(K);

    std::visit(
        [&](const auto& g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, PlaneSurface>) {
                d(0, 0) = g.location + u * g.x_axis + v * g.y_axis;
                if (K >= 1) {
                    d(1, 0) = g.x_axis;
                    d(0, 1) = g.y_axis;
                }
            } else if constexpr (std::is_same_v<T, CylinderSurface>) {
                for (int i = 0; i <= K; ++i)
                    d(i, 0) = g.radius * (cos_d(u, i) * g.x_axis + sin_d(u, i) * g.y_axis);
                d(0, 0) += g.location + v * g.z_axis;
                if (K >= 1) d(0, 1) = g.z_axis;
            } else if constexpr (std::is_same_v<T, ConeSurface>) {
                const double sa = std::sin(g.angle);
                const double ca = std::cos(g.angle);
                for (int i = 0; i <= K; ++i) {
                    const Vec3 radial = cos_d(u, i) * g.x_axis + sin_d(u, i) * g.y_axis;
                    d(i, 0) = (g.radius + v * sa) * radial;
                    if (i + 1 <= K) d(i, 1) = sa * radial;
                }
                d(0, 0) += g.location + v * ca * g.z_axis;
                if (K >= 1) d(0, 1) += ca * g.z_axis;
            } else if constexpr (std::is_same_v<T, SphereSurface>) {
                for (int i = 0; i <= K; ++i)
                    for (int j = 0; i + j <= K; ++j) {
                        Vec3 val = g.radius * cos_d(v, j) *
                                   (cos_d(u, i) * g.x_axis + sin_d(u, i) * g.y_axis);
                        if (i == 0) val += g.radius * sin_d(v, j) * g.z_axis;
                        d(i, j) = val;
                    }
                d(0, 0) += g.location;
            } else if constexpr (std::is_same_v<T, TorusSurface>) {
                for (int i = 0; i <= K; ++i)
                    for (int j = 0; i + j <= K; ++j) {
                        const double ring =
                            (j == 0 ? g.max_radius : 0.0) + g.min_radius * cos_d(v, j);
                        Vec3 val = ring * (cos_d(u, i) * g.x_axis + sin_d(u, i) * g.y_axis);
                        if (i == 0) val += g.min_radius * sin_d(v, j) * g.z_axis;
                        d(i, j) = val;
                    }
                d(0, 0) += g.location;
            } else if constexpr (std::is_same_v<T, BSplineSurface>) {
                const std::vector<Vec3> grid = bspline::surface_derivatives(g, u, v, K);
                for (int i = 0; i <= K; ++i)
                    for (int j = 0; i + j <= K; ++j)
                        d(i, j) = grid[static_cast<std::size_t>(i * (K + 1) + j)];
            } else if constexpr (std::is_same_v<T, ExtrusionSurface>) {
                const std::vector<Vec3> c = curve_derivs_raw(g.curve, u, K);
                for (int i = 0; i <= K; ++i) d(i, 0) = c[static_cast<std::size_t>(i)];
                d(0, 0) += v * g.direction;
                if (K >= 1) d(0, 1) = g.direction;
            } else if constexpr (std::is_same_v<T, RevolutionSurface>) {
                const std::vector<Vec3> c = curve_derivs_raw(g.curve, v, K);
                const Vec3& a = g.z_axis;
                for (int j = 0; j <= K; ++j) {
                    const Vec3 w =
                        j == 0 ? Vec3(c[0] - g.location) : c[static_cast<std::size_t>(j)];
                    const Vec3 axw = a.cross(w);
                    const Vec3 along = a * a.dot(w);
                    for (int i = 0; i + j <= K; ++i)
                        d(i, j) = w * cos_d(u, i) + axw * sin_d(u, i) +
                                  along * ((i == 0 ? 1.0 : 0.0) - cos_d(u, i));
                }
                d(0, 0) += g.location;
            } else if constexpr (std::is_same_v<T, OffsetSurface>) {
                d = offset_derivs(g, u, v, K, depth);
            } else {
                OtherSurfaceEvaluator fallback;
                {
                    std::shared_lock lock(registry().mutex);
                    auto it = registry().surfaces.find(g.type_name);
                    if (it != registry().surfaces.end()) fallback = it->second;
                }
                if (!fallback)
                    throw UnsupportedKind(fmt::format(
                        "no evaluator registered for surface type '{}'", g.type_name));
                const std::vector<Vec3> grid = fallback(g, u, v, K);
                for (int i = 0; i <= K; ++i)
                    for (int j = 0; i + j <= K; ++j) {
                        const auto k = static_cast<std::size_t>(i * (K + 1) + j);
                        if (k < grid.size()) d(i, j) = grid[k];
                    }
            }
        },
        surface.geometry);

    if (surface.transform) {
        for (int i = 0; i <= K; ++i)
            for (int j = 0; i + j <= K; ++j)
                d(i, j) = (i == 0 && j == 0) ? surface.transform->apply_point(d(i, j))
                                             : surface.transform->apply_vector(d(i, j));
    }
    return d;
}

std::optional<double> u_period_at(const SurfaceSpec& s, int depth) {
    if (depth >= kMaxNestingDepth) return std::nullopt;
    switch (s.kind()) {
        case SurfaceKind::Cylinder:
        case SurfaceKind::Cone:
        case SurfaceKind::Sphere:
        case SurfaceKind::Torus:
        case SurfaceKind::Revolution: return kTwoPi;
        case SurfaceKind::BSpline: {
            const auto& g = std::get<BSplineSurface>(s.geometry);
            if (!g.u_periodic) return std::nullopt;
            const Interval dom = bspline::domain(g.u_knots, g.u_degree, g.nu);
            return dom.t1 - dom.t0;
        }
        case SurfaceKind::Extrusion:
            return curve_period(std::get<ExtrusionSurface>(s.geometry).curve);
        case SurfaceKind::Offset:
            return u_period_at(*std::get<OffsetSurface>(s.geometry).surface, depth + 1);
        default: return std::nullopt;
    }
}

std::optional<double> v_period_at(const SurfaceSpec& s, int depth) {
    if (depth >= kMaxNestingDepth) return std::nullopt;
    switch (s.kind()) {
        case SurfaceKind::Torus: return kTwoPi;
        case SurfaceKind::BSpline: {
            const auto& g = std::get<BSplineSurface>(s.geometry);
            if (!g.v_periodic) return std::nullopt;
            const Interval dom = bspline::domain(g.v_knots, g.v_degree, g.nv);
            return dom.t1 - dom.t0;
        }
        case SurfaceKind::Revolution:
            return curve_period(std::get<RevolutionSurface>(s.geometry).curve);
        case SurfaceKind::Offset:
            return v_period_at(*std::get<OffsetSurface>(s.geometry).surface, depth + 1);
        default: return std::nullopt;
    }
}

}  // namespace

std::optional<double> curve_period(const CurveSpec& curve) {
    switch (curve.kind()) {
        case CurveKind::Circle:
        case CurveKind::Ellipse: return kTwoPi;
        case CurveKind::BSpline: {
            const auto& g = std::get<BSplineCurve>(curve.geometry);
            if (!g.periodic) return std::nullopt;
            const Interval dom =
                bspline::domain(g.knots, g.degree, static_cast<int>(g.poles.size()));
            return dom.t1 - dom.t0;
        }
        default: return std::nullopt;
    }
}

std::optional<double> surface_u_period(const SurfaceSpec& surface) {
    return u_period_at(surface, 0);
}

std::optional<double> surface_v_period(const SurfaceSpec& surface) {
    return v_period_at(surface, 0);
}

double reduce_curve_parameter(const CurveSpec& curve, double t) {
    return reduce(t, curve.interval, curve_period(curve), "curve");
}

Vec2 reduce_surface_parameters(const SurfaceSpec& surface, double u, double v) {
    const UVBox& d = surface.trim_domain;
    return {reduce(u, {d.u0, d.u1}, surface_u_period(surface), "surface u"),
            reduce(v, {d.v0, d.v1}, surface_v_period(surface), "surface v")};
}

std::vector<Vec3> curve_derivatives(const CurveSpec& curve, double t, int order) {
    return curve_derivs_raw(curve, reduce_curve_parameter(curve, t), order);
}

CurveJet eval_curve(const CurveSpec& curve, double t) {
    const std::vector<Vec3> d = curve_derivatives(curve, t, 2);
    return {d[0], d[1], d[2]};
}

SurfaceDerivatives surface_derivatives(const SurfaceSpec& surface, double u, double v, int order) {
    const Vec2 uv = reduce_surface_parameters(surface, u, v);
    return surface_derivs_raw(surface, uv.x(), uv.y(), order, 0);
}

SurfaceJet eval_surface(const SurfaceSpec& surface, double u, double v) {
    const SurfaceDerivatives d = surface_derivatives(surface, u, v, 2);
    return {d(0, 0), d(1, 0), d(0, 1), d(2, 0), d(1, 1), d(0, 2)};
}

Vec3 surface_normal(const SurfaceSpec& surface, double u, double v, bool orientation) {
    const SurfaceDerivatives d = surface_derivatives(surface, u, v, 1);
    const Vec3 n = d(1, 0).cross(d(0, 1));
    const double len = n.norm();
    if (!(len >= kSingularJetThreshold))
        throw SingularJet(fmt::format("|Su x Sv| = {} at ({}, {})", len, u, v));
    return orientation ? Vec3(n / len) : Vec3(-n / len);
}

CurvatureInfo curvature(const SurfaceSpec& surface, double u, double v) {
    const SurfaceJet j = eval_surface(surface, u, v);
    const Vec3 cross = j.su.cross(j.sv);
    const double len = cross.norm();
    if (!(len >= kSingularJetThreshold))
        throw SingularJet(fmt::format("|Su x Sv| = {} at ({}, {})", len, u, v));
    CurvatureInfo info;
    info.normal = cross / len;
    const double E = j.su.dot(j.su);
    const double F = j.su.dot(j.sv);
    const double G = j.sv.dot(j.sv);
    const double L = j.suu.dot(info.normal);
    const double M = j.suv.dot(info.normal);
    const double N = j.svv.dot(info.normal);
    const double det = E * G - F * F;
    info.gaussian = (L * N - M * M) / det;
    info.mean = (E * N - 2.0 * F * M + G * L) / (2.0 * det);
    const double disc = std::sqrt(std::max(0.0, info.mean * info.mean - info.gaussian));
    info.k1 = info.mean + disc;
    info.k2 = info.mean - disc;
    return info;
}

double first_fundamental_density(const SurfaceSpec& surface, double u, double v) {
    const SurfaceDerivatives d = surface_derivatives(surface, u, v, 1);
    return d(1, 0).cross(d(0, 1)).norm();
}

void register_other_curve_evaluator(const std::string& type_name, OtherCurveEvaluator evaluator) {
    std::unique_lock lock(registry().mutex);
    registry().curves[type_name] = std::move(evaluator);
}

void register_other_surface_evaluator(const std::string& type_name,
                                      OtherSurfaceEvaluator evaluator) {
    std::unique_lock lock(registry().mutex);
    registry().surfaces[type_name] = std::move(evaluator);
}

void clear_other_evaluators() {
    std::unique_lock lock(registry().mutex);
    registry().curves.clear();
    registry().surfaces.clear();
}

bool has_other_curve_evaluator(const std::string& type_name) {
    std::shared_lock lock(registry().mutex);
    return registry().curves.count(type_name) > 0;
}

bool has_other_surface_evaluator(const std::string& type_name) {
    std::shared_lock lock(registry().mutex);
    return registry().surfaces.count(type_name) > 0;
}

bool is_evaluable(const CurveSpec& curve) {
    if (const auto* other = std::get_if<OtherCurve>(&curve.geometry))
        return has_other_curve_evaluator(other->type_name);
    return true;
}

bool is_evaluable(const SurfaceSpec& surface) {
    return std::visit(
        [](const auto& g) -> bool {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, OtherSurface>) {
                return has_other_surface_evaluator(g.type_name);
            } else if constexpr (std::is_same_v<T, ExtrusionSurface> ||
                                 std::is_same_v<T, RevolutionSurface>) {
                return is_evaluable(g.curve);
            } else if constexpr (std::is_same_v<T, OffsetSurface>) {
                return is_evaluable(*g.surface);
            } else {
                return true;
            }
        },
        surface.geometry);
}

}  // namespace brep
