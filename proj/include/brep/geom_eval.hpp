#pragma once

// Exact evaluation of every curve and surface kind: positions, parametric
// derivatives, normals and curvature. All functions are pure and thread-safe.

#include "brep/model.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace brep {

struct CurveJet {
    Vec3 position;
    Vec3 d1;
    Vec3 d2;
};

struct SurfaceJet {
    Vec3 position;
    Vec3 su;
    Vec3 sv;
    Vec3 suu;
    Vec3 suv;
    Vec3 svv;
};

struct CurvatureInfo {
    double gaussian = 0.0;
    double mean = 0.0;
    double k1 = 0.0;  // k1 >= k2
    double k2 = 0.0;
    Vec3 normal = Vec3::UnitZ();
};

/// Mixed partial derivatives of a surface up to a total order.
class SurfaceDerivatives {
public:
    explicit SurfaceDerivatives(int order)
        : order_(order), data_(static_cast<std::size_t>((order + 1) * (order + 1)), Vec3::Zero()) {}

    int order() const { return order_; }
    /// d^(i+j) S / du^i dv^j
    const Vec3& operator()(int i, int j) const { return data_[index(i, j)]; }
    Vec3& operator()(int i, int j) { return data_[index(i, j)]; }

private:
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(order_ + 1) +
               static_cast<std::size_t>(j);
    }
    int order_;
    std::vector<Vec3> data_;
};

/// |Su x Sv| below this has no defined normal.
inline constexpr double kSingularJetThreshold = 1e-12;

/// Offsets and extrusions/revolutions nest; deeper specs are rejected.
inline constexpr int kMaxNestingDepth = 8;

/// Period of the curve parameter, if the curve is periodic (2*pi for circles and
/// ellipses, knot-domain length for periodic splines).
std::optional<double> curve_period(const CurveSpec& curve);
std::optional<double> surface_u_period(const SurfaceSpec& surface);
std::optional<double> surface_v_period(const SurfaceSpec& surface);

/// Maps t into the curve interval, reducing by the period when the curve is
/// periodic. Throws DomainError when t cannot be brought inside.
double reduce_curve_parameter(const CurveSpec& curve, double t);
Vec2 reduce_surface_parameters(const SurfaceSpec& surface, double u, double v);

/// Derivatives 0..order at t, transform applied (derivatives are rotated only).
std::vector<Vec3> curve_derivatives(const CurveSpec& curve, double t, int order);

CurveJet eval_curve(const CurveSpec& curve, double t);

SurfaceDerivatives surface_derivatives(const SurfaceSpec& surface, double u, double v, int order);

SurfaceJet eval_surface(const SurfaceSpec& surface, double u, double v);

/// unit(Su x Sv), negated when `orientation` is false. Throws SingularJet.
Vec3 surface_normal(const SurfaceSpec& surface, double u, double v, bool orientation = true);

/// Curvature with respect to the unflipped normal unit(Su x Sv). Throws SingularJet.
CurvatureInfo curvature(const SurfaceSpec& surface, double u, double v);

/// sqrt(EG - F^2) = |Su x Sv|; zero at singular points.
double first_fundamental_density(const SurfaceSpec& surface, double u, double v);

// ---------------------------------------------------------------------------
// Evaluation of "Other" entities through registered fallbacks.

/// Returns derivatives 0..order of the untransformed curve.
using OtherCurveEvaluator =
    std::function<std::vector<Vec3>(const OtherCurve& curve, double t, int order)>;
/// Returns the (order+1)^2 row-major grid of mixed partials of the untransformed surface.
using OtherSurfaceEvaluator =
    std::function<std::vector<Vec3>(const OtherSurface& surface, double u, double v, int order)>;

void register_other_curve_evaluator(const std::string& type_name, OtherCurveEvaluator evaluator);
void register_other_surface_evaluator(const std::string& type_name,
                                      OtherSurfaceEvaluator evaluator);
void clear_other_evaluators();
bool has_other_curve_evaluator(const std::string& type_name);
bool has_other_surface_evaluator(const std::string& type_name);

/// True when the curve can be evaluated (not an Other without fallback).
bool is_evaluable(const CurveSpec& curve);
bool is_evaluable(const SurfaceSpec& surface);

}  // namespace brep
