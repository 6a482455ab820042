#include "brep/bspline.hpp"

#include "brep/errors.hpp"

#include <algorithm>
#include <cmath>

namespace brep::bspline {

namespace {

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double wrap_periodic(double t, const Interval& dom) {
    const double period = dom.t1 - dom.t0;
    if (period <= 0.0 || (t >= dom.t0 && t <= dom.t1)) return t;
    double r = std::fmod(t - dom.t0, period);
    if (r < 0.0) r += period;
    return dom.t0 + r;
}

Vec4 homogeneous(const Vec3& p, double w) { return {w * p.x(), w * p.y(), w * p.z(), w}; }

}  // namespace

Interval domain(std::span<const double> knots, int degree, int pole_count) {
    if (degree < 1 || pole_count <= degree ||
        knots.size() != static_cast<std::size_t>(pole_count + degree + 1))
        throw DomainError("malformed B-spline: knot count must equal poles + degree + 1");
    const Interval dom{knots[static_cast<std::size_t>(degree)],
                       knots[static_cast<std::size_t>(pole_count)]};
    if (!(dom.t1 > dom.t0)) throw DomainError("B-spline has an empty parameter domain");
    return dom;
}

int find_span(std::span<const double> knots, int degree, int pole_count, double t) {
    const auto first = knots.begin() + degree;
    const auto last = knots.begin() + pole_count + 1;
    int s = static_cast<int>(std::upper_bound(first, last, t) - knots.begin()) - 1;
    s = std::clamp(s, degree, pole_count - 1);
    // At t == knots[n] (or beyond) step back to the last non-empty span.
    while (s > degree && knots[static_cast<std::size_t>(s)] == knots[static_cast<std::size_t>(s + 1)]) --s;
    while (s < pole_count - 1 &&
           knots[static_cast<std::size_t>(s)] == knots[static_cast<std::size_t>(s + 1)])
        ++s;
    return s;
}

std::vector<Vec4> deboor_derivatives(std::span<const double> knots, int degree, int span,
                                     std::span<const Vec4> local, double t, int order) {
    const int p = degree;
    std::vector<Vec4> result(static_cast<std::size_t>(order + 1), Vec4::Zero());
    std::vector<Vec4> q(local.begin(), local.end());
    std::vector<Vec4> d;
    auto knot = [&](int i) { return knots[static_cast<std::size_t>(i)]; };

    for (int k = 0; k <= std::min(order, p); ++k) {
        if (k > 0) {
            // Control points of the k-th derivative, valid for local indices k..p.
            for (int j = p; j >= k; --j) {
                const int i = span - p + j;
                const double denom = knot(i + p - k + 1) - knot(i);
                q[static_cast<std::size_t>(j)] =
                    denom > 0.0 ? Vec4((p - k + 1) * (q[static_cast<std::size_t>(j)] -
                                                      q[static_cast<std::size_t>(j - 1)]) /
                                       denom)
                                : Vec4::Zero();
            }
        }
        const int deg = p - k;
        d.assign(q.begin() + k, q.end());
        for (int r = 1; r <= deg; ++r) {
            for (int j = deg; j >= r; --j) {
                const int i = span - deg + j;
                const double alpha = (t - knot(i)) / (knot(i + deg + 1 - r) - knot(i));
                d[static_cast<std::size_t>(j)] = (1.0 - alpha) * d[static_cast<std::size_t>(j - 1)] +
                                                 alpha * d[static_cast<std::size_t>(j)];
            }
        }
        result[static_cast<std::size_t>(k)] = d[static_cast<std::size_t>(deg)];
    }
    return result;
}

std::vector<Vec3> curve_derivatives(const BSplineCurve& curve, double t, int order) {
    const int n = static_cast<int>(curve.poles.size());
    const int p = curve.degree;
    const Interval dom = domain(curve.knots, p, n);
    if (curve.periodic) t = wrap_periodic(t, dom);
    const bool weighted = !curve.weights.empty();
    if (weighted && curve.weights.size() != curve.poles.size())
        throw DomainError("B-spline weight count does not match pole count");

    const int span = find_span(curve.knots, p, n, t);
    std::vector<Vec4> local(static_cast<std::size_t>(p + 1));
    for (int j = 0; j <= p; ++j) {
        const auto i = static_cast<std::size_t>(span - p + j);
        local[static_cast<std::size_t>(j)] =
            homogeneous(curve.poles[i], weighted ? curve.weights[i] : 1.0);
    }
    const std::vector<Vec4> h = deboor_derivatives(curve.knots, p, span, local, t, order);

    // Quotient rule: C^(k) = (A^(k) - sum_{i>=1} C(k,i) w^(i) C^(k-i)) / w
    std::vector<Vec3> out(static_cast<std::size_t>(order + 1));
    const double w0 = h[0].w();
    for (int k = 0; k <= order; ++k) {
        Vec3 v = h[static_cast<std::size_t>(k)].head<3>();
        for (int i = 1; i <= k; ++i)
            v -= binomial(k, i) * h[static_cast<std::size_t>(i)].w() *
                 out[static_cast<std::size_t>(k - i)];
        out[static_cast<std::size_t>(k)] = v / w0;
    }
    return out;
}

std::vector<Vec3> surface_derivatives(const BSplineSurface& s, double u, double v, int order) {
    const int pu = s.u_degree;
    const int pv = s.v_degree;
    Interval udom = domain(s.u_knots, pu, s.nu);
    Interval vdom = domain(s.v_knots, pv, s.nv);
    if (s.poles.size() != static_cast<std::size_t>(s.nu) * static_cast<std::size_t>(s.nv))
        throw DomainError("B-spline surface pole grid does not match nu x nv");
    if (!s.weights.empty() && s.weights.size() != s.poles.size())
        throw DomainError("B-spline surface weight grid does not match pole grid");
    if (s.u_periodic) u = wrap_periodic(u, udom);
    if (s.v_periodic) v = wrap_periodic(v, vdom);

    const int uspan = find_span(s.u_knots, pu, s.nu, u);
    const int vspan = find_span(s.v_knots, pv, s.nv, v);
    const int K = order;
    const auto dim = static_cast<std::size_t>(K + 1);

    // rows[a][l]: l-th v-derivative of the row curve through poles P[uspan-pu+a][*].
    std::vector<std::vector<Vec4>> rows(static_cast<std::size_t>(pu + 1));
    std::vector<Vec4> local(static_cast<std::size_t>(pv + 1));
    for (int a = 0; a <= pu; ++a) {
        const int i = uspan - pu + a;
        for (int b = 0; b <= pv; ++b) {
            const int j = vspan - pv + b;
            local[static_cast<std::size_t>(b)] = homogeneous(s.pole(i, j), s.weight(i, j));
        }
        rows[static_cast<std::size_t>(a)] = deboor_derivatives(s.v_knots, pv, vspan, local, v, K);
    }

    std::vector<Vec4> hom(dim * dim, Vec4::Zero());
    std::vector<Vec4> column(static_cast<std::size_t>(pu + 1));
    for (int l = 0; l <= K; ++l) {
        for (int a = 0; a <= pu; ++a)
            column[static_cast<std::size_t>(a)] =
                rows[static_cast<std::size_t>(a)][static_cast<std::size_t>(l)];
        const std::vector<Vec4> du = deboor_derivatives(s.u_knots, pu, uspan, column, u, K - l);
        for (int k = 0; k + l <= K; ++k)
            hom[static_cast<std::size_t>(k) * dim + static_cast<std::size_t>(l)] =
                du[static_cast<std::size_t>(k)];
    }

    // Two-variable quotient rule.
    std::vector<Vec3> out(dim * dim, Vec3::Zero());
    auto at = [dim](int i, int j) { return static_cast<std::size_t>(i) * dim + static_cast<std::size_t>(j); };
    const double w0 = hom[0].w();
    for (int k = 0; k <= K; ++k) {
        for (int l = 0; k + l <= K; ++l) {
            Vec3 val = hom[at(k, l)].head<3>();
            for (int j = 1; j <= l; ++j)
                val -= binomial(l, j) * hom[at(0, j)].w() * out[at(k, l - j)];
            for (int i = 1; i <= k; ++i) {
                val -= binomial(k, i) * hom[at(i, 0)].w() * out[at(k - i, l)];
                for (int j = 1; j <= l; ++j)
                    val -= binomial(k, i) * binomial(l, j) * hom[at(i, j)].w() *
                           out[at(k - i, l - j)];
            }
            out[at(k, l)] = val / w0;
        }
    }
    return out;
}

}  // namespace brep::bspline
