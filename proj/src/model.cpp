#include "brep/model.hpp"

#include <array>

namespace brep {

namespace {

constexpr std::array<std::string_view, 5> kCurveNames = {"Line", "Circle", "Ellipse", "BSpline",
                                                         "Other"};
constexpr std::array<std::string_view, 10> kSurfaceNames = {
    "Plane", "Cylinder", "Cone", "Sphere", "Torus", "BSpline", "Extrusion", "Revolution",
    "Offset", "Other"};

}  // namespace

std::string_view curve_kind_name(CurveKind kind) {
    return kCurveNames[static_cast<std::size_t>(kind)];
}

std::string_view surface_kind_name(SurfaceKind kind) {
    return kSurfaceNames[static_cast<std::size_t>(kind)];
}

std::optional<CurveKind> curve_kind_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kCurveNames.size(); ++i)
        if (kCurveNames[i] == name) return static_cast<CurveKind>(i);
    return std::nullopt;
}

std::optional<SurfaceKind> surface_kind_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kSurfaceNames.size(); ++i)
        if (kSurfaceNames[i] == name) return static_cast<SurfaceKind>(i);
    return std::nullopt;
}

std::string curve_type_name(const CurveSpec& curve) {
    if (const auto* other = std::get_if<OtherCurve>(&curve.geometry)) return other->type_name;
    return std::string(curve_kind_name(curve.kind()));
}

std::string surface_type_name(const SurfaceSpec& surface) {
    if (const auto* other = std::get_if<OtherSurface>(&surface.geometry)) return other->type_name;
    return std::string(surface_kind_name(surface.kind()));
}

}  // namespace brep
