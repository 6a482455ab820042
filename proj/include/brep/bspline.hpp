#pragma once

// De Boor evaluation of (rational) B-spline curves and tensor-product surfaces,
// including parametric derivatives of any order.

#include "brep/model.hpp"

#include <Eigen/Core>
#include <span>
#include <vector>

namespace brep::bspline {

using Vec4 = Eigen::Vector4d;

/// Valid parameter range [knots[degree], knots[n_poles]].
Interval domain(std::span<const double> knots, int degree, int pole_count);

/// Index s of the knot span with knots[s] <= t < knots[s+1], clamped into the
/// valid range so that parameters slightly outside the domain extrapolate the end
/// polynomial pieces.
int find_span(std::span<const double> knots, int degree, int pole_count, double t);

/// Derivatives 0..order of a non-rational spline with homogeneous (4D) poles,
/// evaluated by running de Boor on successive derivative control polygons of the
/// active span. `local` holds the degree+1 poles P[span-degree .. span].
std::vector<Vec4> deboor_derivatives(std::span<const double> knots, int degree, int span,
                                     std::span<const Vec4> local, double t, int order);

/// Derivatives 0..order of the curve (rational splines handled through the
/// homogeneous quotient rule). No transform, no domain check; periodic splines
/// wrap t into their domain.
std::vector<Vec3> curve_derivatives(const BSplineCurve& curve, double t, int order);

/// Mixed partials d^(i+j) S / du^i dv^j for i + j <= order, stored as a
/// (order+1) x (order+1) row-major grid (entries with i + j > order are zero).
std::vector<Vec3> surface_derivatives(const BSplineSurface& surface, double u, double v,
                                      int order);

}  // namespace brep::bspline
