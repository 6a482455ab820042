#include "brep/bspline.hpp"
#include "brep/errors.hpp"
#include "brep/geom_eval.hpp"

#include "support/generators.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace brep;
using namespace brep::testing;

namespace {

constexpr double kPi = std::numbers::pi;

CurveSpec make_curve(CurveGeometry g, Interval iv, int dim = 3) {
    CurveSpec c;
    c.dim = dim;
    c.interval = iv;
    c.geometry = std::move(g);
    return c;
}

SurfaceSpec make_surface(SurfaceGeometry g, UVBox dom) {
    SurfaceSpec s;
    s.trim_domain = dom;
    s.geometry = std::move(g);
    return s;
}

// Parameter lines across which a spline jet is only piecewise smooth; central
// differences straddling them are not a valid oracle.
void collect_breaks(const SurfaceSpec& s, std::vector<double>& us, std::vector<double>& vs) {
    std::visit(
        [&](const auto& g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, BSplineSurface>) {
                us.insert(us.end(), g.u_knots.begin(), g.u_knots.end());
                vs.insert(vs.end(), g.v_knots.begin(), g.v_knots.end());
            } else if constexpr (std::is_same_v<T, ExtrusionSurface>) {
                if (const auto* b = std::get_if<BSplineCurve>(&g.curve.geometry))
                    us.insert(us.end(), b->knots.begin(), b->knots.end());
            } else if constexpr (std::is_same_v<T, RevolutionSurface>) {
                if (const auto* b = std::get_if<BSplineCurve>(&g.curve.geometry))
                    vs.insert(vs.end(), b->knots.begin(), b->knots.end());
            } else if constexpr (std::is_same_v<T, OffsetSurface>) {
                collect_breaks(*g.surface, us, vs);
            }
        },
        s.geometry);
}

bool near_any(const std::vector<double>& breaks, double x, double eps) {
    return std::any_of(breaks.begin(), breaks.end(),
                       [&](double b) { return std::abs(b - x) < eps; });
}

void expect_vec(const Vec3& actual, const Vec3& expected, double tol) {
    EXPECT_LE((actual - expected).norm(), tol) << "actual " << actual.transpose() << " expected "
                                               << expected.transpose();
}

}  // namespace

TEST(EvalCurve, LineSubstitution) {
    const auto c = make_curve(LineCurve{Vec3(1, 0, 0), Vec3(0, 2, 0)}, {0, 1});
    const CurveJet j = eval_curve(c, 0.5);
    expect_vec(j.position, Vec3(1, 1, 0), 0.0);
    expect_vec(j.d1, Vec3(0, 2, 0), 0.0);
    expect_vec(j.d2, Vec3::Zero(), 0.0);
}

TEST(EvalCurve, CircleAtZero) {
    const auto c = make_curve(CircleCurve{Vec3::Zero(), 2.0, Vec3::UnitX(), Vec3::UnitY()},
                              {0, 2 * kPi});
    const CurveJet j = eval_curve(c, 0.0);
    expect_vec(j.position, Vec3(2, 0, 0), 1e-15);
    expect_vec(j.d1, Vec3(0, 2, 0), 1e-15);
}

TEST(EvalCurve, EllipseCentredBetweenFoci) {
    const auto c = make_curve(EllipseCurve{Vec3(-1, 0, 0), Vec3(3, 0, 0), 3.0, 2.0, Vec3::UnitX(),
                                           Vec3::UnitY()},
                              {0, 2 * kPi});
    expect_vec(eval_curve(c, 0.0).position, Vec3(4, 0, 0), 1e-15);
    expect_vec(eval_curve(c, kPi / 2).position, Vec3(1, 2, 0), 1e-15);
}

TEST(EvalCurve, CubicBezierWithUniformColinearPolesIsLinear) {
    BSplineCurve b;
    b.degree = 3;
    b.poles = {Vec3(0, 0, 0), Vec3(1, 1, 0), Vec3(2, 2, 0), Vec3(3, 3, 0)};
    b.knots = {0, 0, 0, 0, 1, 1, 1, 1};
    const auto c = make_curve(b, {0, 1});
    for (double t : {0.0, 0.13, 0.5, 0.77, 1.0}) {
        const CurveJet j = eval_curve(c, t);
        expect_vec(j.position, Vec3(3 * t, 3 * t, 0), 1e-12);
        expect_vec(j.d1, Vec3(3, 3, 0), 1e-12);
        EXPECT_LE(j.d2.norm(), 1e-10);
        if (t < 1.0) expect_vec(j.position, brute_force_bspline(b, t), 1e-12);
    }
}

TEST(EvalCurve, GrevillePlacedPolesGiveLinearSpline) {
    // Poles at the Greville abscissae reproduce the identity map (linear precision).
    BSplineCurve b;
    b.degree = 3;
    b.knots = {0, 0, 0, 0, 0.25, 0.5, 0.75, 1, 1, 1, 1};
    const int n = 7;
    for (int i = 0; i < n; ++i) {
        const double g = (b.knots[i + 1] + b.knots[i + 2] + b.knots[i + 3]) / 3.0;
        b.poles.push_back(Vec3(g, -2 * g, 0));
    }
    const auto c = make_curve(b, {0, 1});
    Rng rng(7);
    for (int k = 0; k < 50; ++k) {
        const double t = uniform(rng, 0.0, 1.0);
        const CurveJet j = eval_curve(c, t);
        expect_vec(j.position, Vec3(t, -2 * t, 0), 1e-12);
        expect_vec(j.position, brute_force_bspline(b, t), 1e-12);
        EXPECT_LE(j.d2.norm(), 1e-10);
    }
}

TEST(EvalCurve, RationalQuarterCircleStaysOnCircle) {
    const double r = 1.7;
    const auto c = make_curve(quarter_circle(r), {0, 1});
    Rng rng(11);
    for (int k = 0; k < 100; ++k) {
        const double t = uniform(rng, 0.0, 1.0);
        EXPECT_NEAR(eval_curve(c, t).position.norm(), r, 1e-12);
    }
    expect_vec(eval_curve(c, 0.5).position, Vec3(r, r, 0) / std::sqrt(2.0), 1e-12);
}

TEST(EvalCurve, DeBoorMatchesCoxDeBoorOnRandomSplines) {
    Rng rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const int degree = 1 + trial % 5;
        const int poles = degree + 1 + static_cast<int>(rng() % (20 - degree));
        const BSplineCurve b = random_bspline_curve(rng, 3, degree, poles, trial % 2 == 1);
        for (int k = 0; k < 20; ++k) {
            const double t = uniform(rng, 0.0, 1.0);
            const Vec3 fast = bspline::curve_derivatives(b, t, 0)[0];
            expect_vec(fast, brute_force_bspline(b, t), 1e-12);
        }
    }
}

TEST(EvalSurface, BSplineSurfaceMatchesCoxDeBoor) {
    Rng rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        const BSplineSurface s = random_bspline_surface(rng, 1 + trial % 4, 1 + (trial + 2) % 4,
                                                        7, 6, trial % 2 == 0);
        for (int k = 0; k < 20; ++k) {
            const double u = uniform(rng, 0, 1), v = uniform(rng, 0, 1);
            expect_vec(bspline::surface_derivatives(s, u, v, 0)[0],
                       brute_force_bspline_surface(s, u, v), 1e-12);
        }
    }
}

TEST(EvalCurve, DerivativesMatchFiniteDifferences) {
    Rng rng(5);
    const double h = 1e-5;
    for (int dim : {2, 3}) {
        for (const CurveSpec& c : curve_zoo(rng, dim)) {
            SCOPED_TRACE(curve_type_name(c) + " dim " + std::to_string(dim));
            auto pos = [&](double t) { return eval_curve(c, t).position; };
            auto d1 = [&](double t) { return eval_curve(c, t).d1; };
            std::vector<double> breaks;
            if (const auto* b = std::get_if<BSplineCurve>(&c.geometry)) breaks = b->knots;
            for (int k = 0; k < 200; ++k) {
                const double t = uniform(rng, c.interval.t0 + 3 * h, c.interval.t1 - 3 * h);
                if (near_any(breaks, t, 3 * h)) {
                    --k;
                    continue;
                }
                const CurveJet j = eval_curve(c, t);
                EXPECT_TRUE(rel_close(j.d1, central_diff(pos, t, h), 1e-6));
                EXPECT_TRUE(rel_close(j.d2, central_diff(d1, t, h), 1e-6));
            }
            for (auto [t, dir] : {std::pair{c.interval.t0, 1}, std::pair{c.interval.t1, -1}}) {
                const CurveJet j = eval_curve(c, t);
                EXPECT_TRUE(rel_close(j.d1, one_sided_diff(pos, t, h, dir), 1e-4));
                EXPECT_TRUE(rel_close(j.d2, one_sided_diff(d1, t, h, dir), 1e-4));
            }
        }
    }
}

TEST(EvalSurface, JetsMatchFiniteDifferences) {
    Rng rng(8);
    const double h = 1e-5;
    for (const SurfaceSpec& s : surface_zoo(rng)) {
        SCOPED_TRACE(surface_type_name(s));
        const UVBox& d = s.trim_domain;
        std::vector<double> ubreaks, vbreaks;
        collect_breaks(s, ubreaks, vbreaks);
        for (int k = 0; k < 200; ++k) {
            const double u = uniform(rng, d.u0 + 3 * h, d.u1 - 3 * h);
            const double v = uniform(rng, d.v0 + 3 * h, d.v1 - 3 * h);
            if (near_any(ubreaks, u, 3 * h) || near_any(vbreaks, v, 3 * h)) {
                --k;
                continue;
            }
            const SurfaceJet j = eval_surface(s, u, v);
            auto pu = [&](double x) { return eval_surface(s, x, v).position; };
            auto pv = [&](double y) { return eval_surface(s, u, y).position; };
            auto su_u = [&](double x) { return eval_surface(s, x, v).su; };
            auto su_v = [&](double y) { return eval_surface(s, u, y).su; };
            auto sv_v = [&](double y) { return eval_surface(s, u, y).sv; };
            EXPECT_TRUE(rel_close(j.su, central_diff(pu, u, h), 1e-6));
            EXPECT_TRUE(rel_close(j.sv, central_diff(pv, v, h), 1e-6));
            EXPECT_TRUE(rel_close(j.suu, central_diff(su_u, u, h), 1e-6));
            EXPECT_TRUE(rel_close(j.suv, central_diff(su_v, v, h), 1e-6));
            EXPECT_TRUE(rel_close(j.svv, central_diff(sv_v, v, h), 1e-6));
        }
    }
}

TEST(EvalSurface, PlaneSubstitution) {
    const auto s = make_surface(PlaneSurface{}, {-5, 5, -5, 5});
    const SurfaceJet j = eval_surface(s, 2, 3);
    expect_vec(j.position, Vec3(2, 3, 0), 0.0);
    expect_vec(j.su, Vec3::UnitX(), 0.0);
    expect_vec(j.sv, Vec3::UnitY(), 0.0);
    EXPECT_EQ(j.suu.norm() + j.suv.norm() + j.svv.norm(), 0.0);
}

TEST(EvalSurface, TorusAtOrigin) {
    const auto s = make_surface(TorusSurface{Vec3::Zero(), 3.0, 1.0}, {0, 2 * kPi, 0, 2 * kPi});
    expect_vec(eval_surface(s, 0, 0).position, Vec3(4, 0, 0), 1e-15);
}

TEST(EvalSurface, ConeSubstitution) {
    ConeSurface cone;
    cone.location = Vec3(1, 2, 3);
    cone.radius = 1.0;
    cone.angle = kPi / 4;
    const auto s = make_surface(cone, {0, 2 * kPi, -1, 2});
    expect_vec(eval_surface(s, 0, std::sqrt(2.0)).position,
               cone.location + 2 * cone.x_axis + cone.z_axis, 1e-14);
}

TEST(EvalSurface, SphereUsesConventionalZTerm) {
    const auto s = make_surface(SphereSurface{Vec3::Zero(), 2.0}, {0, 2 * kPi, -kPi / 2, kPi / 2});
    expect_vec(eval_surface(s, 0.3, kPi / 2).position, Vec3(0, 0, 2), 1e-15);
    expect_vec(eval_surface(s, 0.0, 0.0).position, Vec3(2, 0, 0), 1e-15);
}

TEST(EvalSurface, RevolutionOfParallelLineIsCylinder) {
    Rng rng(3);
    const Frame f = random_frame(rng);
    const Vec3 loc(0.5, -1.0, 2.0);
    CurveSpec line = make_curve(LineCurve{loc + 2.0 * f.x, f.z}, {-3, 3});
    const auto s = make_surface(RevolutionSurface{line, loc, f.z}, {0, 2 * kPi, -3, 3});
    for (int k = 0; k < 100; ++k) {
        const double u = uniform(rng, 0, 2 * kPi), v = uniform(rng, -3, 3);
        const Vec3 rel = eval_surface(s, u, v).position - loc;
        const Vec3 perp = rel - f.z * f.z.dot(rel);
        EXPECT_NEAR(perp.norm(), 2.0, 1e-12);
    }
}

TEST(EvalSurface, OffsetOfSphereIsLargerSphere) {
    SurfaceSpec sphere = make_surface(SphereSurface{Vec3(1, 1, 1), 2.0}, {0, 2 * kPi, -1.5, 1.5});
    const auto s = make_surface(OffsetSurface{sphere, 0.5}, sphere.trim_domain);
    Rng rng(4);
    for (int k = 0; k < 50; ++k) {
        const double u = uniform(rng, 0, 2 * kPi), v = uniform(rng, -1.5, 1.5);
        EXPECT_NEAR((eval_surface(s, u, v).position - Vec3(1, 1, 1)).norm(), 2.5, 1e-12);
        const CurvatureInfo c = curvature(s, u, v);
        EXPECT_NEAR(c.gaussian, 1.0 / 6.25, 1e-9);
    }
}

TEST(EvalTransform, EquivarianceOfPositionsAndDerivatives) {
    Rng rng(12);
    for (SurfaceSpec s : surface_zoo(rng)) {
        s.transform.reset();
        SurfaceSpec moved = s;
        const Transform tf = random_transform(rng);
        moved.transform = tf;
        for (int k = 0; k < 20; ++k) {
            const double u = uniform(rng, s.trim_domain.u0, s.trim_domain.u1);
            const double v = uniform(rng, s.trim_domain.v0, s.trim_domain.v1);
            const SurfaceJet a = eval_surface(s, u, v);
            const SurfaceJet b = eval_surface(moved, u, v);
            expect_vec(b.position, tf.apply_point(a.position), 1e-12 * std::max(1.0, a.position.norm()));
            expect_vec(b.su, tf.rotation * a.su, 1e-12 * std::max(1.0, a.su.norm()));
            expect_vec(b.svv, tf.rotation * a.svv, 1e-12 * std::max(1.0, a.svv.norm()));
            if (first_fundamental_density(s, u, v) > 1e-6)
                expect_vec(surface_normal(moved, u, v), tf.rotation * surface_normal(s, u, v),
                           1e-12);
        }
    }
}

TEST(EvalPeriodic, WrapAgreesAcrossOnePeriod) {
    const auto circle =
        make_curve(CircleCurve{Vec3::Zero(), 1.5, Vec3::UnitX(), Vec3::UnitY()}, {0, 2 * kPi});
    const auto torus = make_surface(TorusSurface{}, {0, 2 * kPi, 0, 2 * kPi});
    Rng rng(6);
    for (int k = 0; k < 50; ++k) {
        const double t = uniform(rng, 0, 2 * kPi);
        expect_vec(eval_curve(circle, t + 2 * kPi).position, eval_curve(circle, t).position, 1e-12);
        const double u = uniform(rng, 0, 2 * kPi), v = uniform(rng, 0, 2 * kPi);
        expect_vec(eval_surface(torus, u + 2 * kPi, v - 2 * kPi).position,
                   eval_surface(torus, u, v).position, 1e-12);
    }
}

TEST(EvalPeriodic, PeriodicSplineWrapsByKnotDomain) {
    // Uniform periodic quadratic with the first two poles repeated at the end.
    BSplineCurve b;
    b.degree = 2;
    const std::vector<Vec3> base = {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(-1, 0, 0), Vec3(0, -1, 0)};
    b.poles = base;
    b.poles.push_back(base[0]);
    b.poles.push_back(base[1]);
    for (int i = 0; i < 9; ++i) b.knots.push_back(i);
    b.periodic = true;
    const auto c = make_curve(b, {2, 6});
    ASSERT_TRUE(curve_period(c).has_value());
    EXPECT_DOUBLE_EQ(*curve_period(c), 4.0);
    for (double t : {2.0, 2.3, 4.1, 5.9})
        expect_vec(eval_curve(c, t + 4.0).position, eval_curve(c, t).position, 1e-12);
}

TEST(EvalErrors, OutOfIntervalOnNonPeriodicThrows) {
    const auto c = make_curve(LineCurve{}, {0, 1});
    EXPECT_THROW(eval_curve(c, 1.5), DomainError);
    const auto arc =
        make_curve(CircleCurve{Vec3::Zero(), 1.0, Vec3::UnitX(), Vec3::UnitY()}, {0, kPi});
    EXPECT_NO_THROW(eval_curve(arc, 2 * kPi + 0.5));
    EXPECT_THROW(eval_curve(arc, -0.5), DomainError);
    const auto plane = make_surface(PlaneSurface{}, {0, 1, 0, 1});
    EXPECT_THROW(eval_surface(plane, 0.5, 2.0), DomainError);
}

TEST(EvalErrors, OtherKindsNeedAFallback) {
    clear_other_evaluators();
    const auto c = make_curve(OtherCurve{"Hyperbola", {}}, {0, 1});
    EXPECT_THROW(eval_curve(c, 0.5), UnsupportedKind);
    EXPECT_FALSE(is_evaluable(c));
    register_other_curve_evaluator("Hyperbola", [](const OtherCurve&, double t, int order) {
        std::vector<Vec3> d(static_cast<std::size_t>(order + 1), Vec3::Zero());
        d[0] = Vec3(std::cosh(t), std::sinh(t), 0);
        if (order >= 1) d[1] = Vec3(std::sinh(t), std::cosh(t), 0);
        if (order >= 2) d[2] = d[0];
        return d;
    });
    EXPECT_TRUE(is_evaluable(c));
    expect_vec(eval_curve(c, 0.0).position, Vec3(1, 0, 0), 0.0);
    clear_other_evaluators();

    const auto s = make_surface(OtherSurface{"Mystery", {}}, {0, 1, 0, 1});
    EXPECT_THROW(eval_surface(s, 0.5, 0.5), UnsupportedKind);
}

TEST(EvalErrors, NestingDepthIsCapped) {
    SurfaceSpec s = make_surface(PlaneSurface{}, {0, 1, 0, 1});
    for (int i = 0; i < kMaxNestingDepth; ++i) s = make_surface(OffsetSurface{s, 0.1}, {0, 1, 0, 1});
    EXPECT_THROW(eval_surface(s, 0.5, 0.5), UnsupportedKind);
}

TEST(SurfaceNormal, SphereNormalIsRadial) {
    Rng rng(21);
    const Vec3 centre(0.3, -0.7, 1.1);
    const auto s = make_surface(SphereSurface{centre, 1.3}, {0, 2 * kPi, -kPi / 2, kPi / 2});
    for (int k = 0; k < 100; ++k) {
        const double u = uniform(rng, 0, 2 * kPi), v = uniform(rng, -1.5, 1.5);
        const Vec3 p = eval_surface(s, u, v).position;
        expect_vec(surface_normal(s, u, v, true), (p - centre).normalized(), 1e-10);
    }
}

TEST(SurfaceNormal, FlippedPlane) {
    const auto s = make_surface(PlaneSurface{}, {0, 1, 0, 1});
    expect_vec(surface_normal(s, 0.5, 0.5, false), Vec3(0, 0, -1), 0.0);
}

TEST(SurfaceNormal, SingularPointsThrow) {
    const auto sphere = make_surface(SphereSurface{}, {0, 2 * kPi, -kPi / 2, kPi / 2});
    EXPECT_THROW(surface_normal(sphere, 0.2, kPi / 2), SingularJet);
    EXPECT_NEAR(first_fundamental_density(sphere, 0.2, kPi / 2), 0.0, 1e-15);
    ConeSurface cone;
    cone.radius = 1.0;
    cone.angle = kPi / 6;
    const auto s = make_surface(cone, {0, 2 * kPi, -3, 1});
    EXPECT_THROW(surface_normal(s, 0.4, -2.0), SingularJet);  // apex at v = -r / sin(angle)
    EXPECT_THROW(curvature(s, 0.4, -2.0), SingularJet);
}

TEST(Curvature, SphereClosedForm) {
    Rng rng(31);
    const double r = 2.5;
    const auto s = make_surface(SphereSurface{Vec3(1, 2, 3), r}, {0, 2 * kPi, -kPi / 2, kPi / 2});
    for (int k = 0; k < 50; ++k) {
        const CurvatureInfo c = curvature(s, uniform(rng, 0, 2 * kPi), uniform(rng, -1.4, 1.4));
        EXPECT_NEAR(c.gaussian * r * r, 1.0, 1e-9);
        EXPECT_NEAR(std::abs(c.mean) * r, 1.0, 1e-9);
        EXPECT_NEAR(std::abs(c.normal.norm() - 1.0), 0.0, 1e-12);
    }
}

TEST(Curvature, PlaneIsFlat) {
    const CurvatureInfo c = curvature(make_surface(PlaneSurface{}, {0, 1, 0, 1}), 0.2, 0.7);
    EXPECT_EQ(c.gaussian, 0.0);
    EXPECT_EQ(c.mean, 0.0);
}

TEST(Curvature, CylinderPrincipalCurvatures) {
    const double r = 0.8;
    const auto s = make_surface(CylinderSurface{Vec3::Zero(), r}, {0, 2 * kPi, -1, 1});
    const CurvatureInfo c = curvature(s, 1.1, 0.3);
    EXPECT_NEAR(c.k1 * c.k2, 0.0, 1e-12);
    EXPECT_NEAR(std::max(std::abs(c.k1), std::abs(c.k2)) * r, 1.0, 1e-9);
}

TEST(Curvature, InvariantsHoldOnAllKinds) {
    Rng rng(41);
    for (const SurfaceSpec& s : surface_zoo(rng)) {
        SCOPED_TRACE(surface_type_name(s));
        for (int k = 0; k < 30; ++k) {
            const double u = uniform(rng, s.trim_domain.u0, s.trim_domain.u1);
            const double v = uniform(rng, s.trim_domain.v0, s.trim_domain.v1);
            if (first_fundamental_density(s, u, v) < 1e-6) continue;
            const CurvatureInfo c = curvature(s, u, v);
            const double scale = std::max({1.0, std::abs(c.gaussian), c.mean * c.mean});
            EXPECT_NEAR(c.k1 * c.k2, c.gaussian, 1e-8 * scale);
            EXPECT_NEAR(0.5 * (c.k1 + c.k2), c.mean, 1e-8 * std::max(1.0, std::abs(c.mean)));
            EXPECT_GE(c.k1, c.k2);
        }
    }
}

TEST(FundamentalDensity, ClosedForms) {
    const auto plane = make_surface(PlaneSurface{}, {-1, 1, -1, 1});
    EXPECT_DOUBLE_EQ(first_fundamental_density(plane, 0.3, -0.2), 1.0);
    const double r = 1.5;
    const auto sphere = make_surface(SphereSurface{Vec3::Zero(), r}, {0, 2 * kPi, -kPi / 2, kPi / 2});
    Rng rng(51);
    for (int k = 0; k < 50; ++k) {
        const double u = uniform(rng, 0, 2 * kPi), v = uniform(rng, -1.5, 1.5);
        EXPECT_NEAR(first_fundamental_density(sphere, u, v), r * r * std::abs(std::cos(v)), 1e-13);
        const SurfaceJet j = eval_surface(sphere, u, v);
        EXPECT_NEAR(first_fundamental_density(sphere, u, v), j.su.cross(j.sv).norm(), 1e-14);
    }
}
