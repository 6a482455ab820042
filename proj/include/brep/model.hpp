#pragma once

// In-memory model of one B-rep part. Every type mirrors one group of the HDF5
// layout; indices are 0-based regardless of the zero-padded group names on disk.

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace brep {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Index = std::int64_t;

/// Heap-allocated value with deep copy and deep equality; used for recursive
/// geometry (an offset surface owns its base surface).
template <typename T>
class Boxed {
public:
    Boxed() : ptr_(std::make_unique<T>()) {}
    Boxed(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
    Boxed(const Boxed& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
    Boxed(Boxed&&) noexcept = default;
    Boxed& operator=(const Boxed& other) {
        if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
        return *this;
    }
    Boxed& operator=(Boxed&&) noexcept = default;
    ~Boxed() = default;

    const T& operator*() const { return *ptr_; }
    T& operator*() { return *ptr_; }
    const T* operator->() const { return ptr_.get(); }
    T* operator->() { return ptr_.get(); }

    friend bool operator==(const Boxed& a, const Boxed& b) { return *a.ptr_ == *b.ptr_; }

private:
    std::unique_ptr<T> ptr_;
};

/// Rigid placement stored on disk as a 3x4 homogeneous matrix [R | t].
struct Transform {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    Vec3 apply_point(const Vec3& p) const { return rotation * p + translation; }
    Vec3 apply_vector(const Vec3& v) const { return rotation * v; }

    bool operator==(const Transform&) const = default;
};

struct Interval {
    double t0 = 0.0;
    double t1 = 1.0;
    bool operator==(const Interval&) const = default;
};

struct UVBox {
    double u0 = 0.0;
    double u1 = 1.0;
    double v0 = 0.0;
    double v1 = 1.0;

    double width() const { return u1 - u0; }
    double height() const { return v1 - v0; }
    bool contains(const Vec2& uv) const {
        return uv.x() >= u0 && uv.x() <= u1 && uv.y() >= v0 && uv.y() <= v1;
    }
    bool operator==(const UVBox&) const = default;
};

struct BoundingBox {
    Vec3 min = Vec3::Zero();
    Vec3 max = Vec3::Zero();

    double diagonal() const { return (max - min).norm(); }
    bool operator==(const BoundingBox&) const = default;
};

/// One dataset of an entity whose type the kernel does not interpret.
struct RawField {
    std::vector<std::uint64_t> dims;
    std::variant<std::vector<double>, std::vector<std::int64_t>, std::string> data;
    bool operator==(const RawField&) const = default;
};
using RawFields = std::map<std::string, RawField>;

// ---------------------------------------------------------------------------
// Curves

enum class CurveKind { Line, Circle, Ellipse, BSpline, Other };

struct LineCurve {
    Vec3 location = Vec3::Zero();
    Vec3 direction = Vec3::UnitX();
    bool operator==(const LineCurve&) const = default;
};

struct CircleCurve {
    Vec3 location = Vec3::Zero();
    double radius = 1.0;
    Vec3 x_axis = Vec3::UnitX();
    Vec3 y_axis = Vec3::UnitY();
    bool operator==(const CircleCurve&) const = default;
};

struct EllipseCurve {
    Vec3 focus1 = Vec3::Zero();
    Vec3 focus2 = Vec3::Zero();
    double maj_radius = 1.0;
    double min_radius = 1.0;
    Vec3 x_axis = Vec3::UnitX();
    Vec3 y_axis = Vec3::UnitY();
    bool operator==(const EllipseCurve&) const = default;
};

/// Knots are the full (repeated) knot vector: knots.size() == poles.size() + degree + 1.
struct BSplineCurve {
    std::vector<Vec3> poles;
    std::vector<double> knots;
    int degree = 1;
    bool rational = false;
    std::vector<double> weights;  // empty unless rational
    bool periodic = false;
    bool closed = false;
    int continuity = 0;
    bool operator==(const BSplineCurve&) const = default;
};

struct OtherCurve {
    std::string type_name = "Other";
    RawFields fields;
    bool operator==(const OtherCurve&) const = default;
};

using CurveGeometry = std::variant<LineCurve, CircleCurve, EllipseCurve, BSplineCurve, OtherCurve>;

/// A 2D or 3D parametric curve. 2D curves keep z = 0 in every Vec3 and never
/// carry a transform.
struct CurveSpec {
    int dim = 3;
    Interval interval;
    std::optional<Transform> transform;
    CurveGeometry geometry;

    CurveKind kind() const { return static_cast<CurveKind>(geometry.index()); }
    bool operator==(const CurveSpec&) const = default;
};

// ---------------------------------------------------------------------------
// Surfaces

enum class SurfaceKind {
    Plane, Cylinder, Cone, Sphere, Torus, BSpline, Extrusion, Revolution, Offset, Other
};

struct PlaneSurface {
    Vec3 location = Vec3::Zero();
    Vec3 x_axis = Vec3::UnitX();
    Vec3 y_axis = Vec3::UnitY();
    bool operator==(const PlaneSurface&) const = default;
};

struct CylinderSurface {
    Vec3 location = Vec3::Zero();
    double radius = 1.0;
    Vec3 x_axis = Vec3::UnitX();
    Vec3 y_axis = Vec3::UnitY();
    Vec3 z_axis = Vec3::UnitZ();
    bool operator==(const CylinderSurface&) const = default;
};

/// `angle` is the half-angle in radians; `radius` is the radius at v = 0.
struct ConeSurface {
    Vec3 location = Vec3::Zero();
    double radius = 1.0;
    double angle = 0.5;
    Vec3 x_axis = Vec3::UnitX();
    Vec3 y_axis = Vec3::UnitY();
    Vec3 z_axis = Vec3::UnitZ();
    bool operator==(const ConeSurface&) const = default;
};

struct SphereSurface {
    Vec3 location = Vec3::Zero();
    double radius = 1.0;
    Vec3 x_axis = Vec3::UnitX();
    Vec3 y_axis = Vec3::UnitY();
    Vec3 z_axis = Vec3::UnitZ();
    bool operator==(const SphereSurface&) const = default;
};

struct TorusSurface {
    Vec3 location = Vec3::Zero();
    double max_radius = 2.0;
    double min_radius = 1.0;
    Vec3 x_axis = Vec3::UnitX();
    Vec3 y_axis = Vec3::UnitY();
    Vec3 z_axis = Vec3::UnitZ();
    bool operator==(const TorusSurface&) const = default;
};

/// Poles and weights are row-major over (u, v): index = i * nv + j.
struct BSplineSurface {
    int nu = 0;
    int nv = 0;
    std::vector<Vec3> poles;
    std::vector<double> u_knots;
    std::vector<double> v_knots;
    int u_degree = 1;
    int v_degree = 1;
    bool u_rational = false;
    bool v_rational = false;
    std::vector<double> weights;  // empty unless u_rational || v_rational
    bool u_periodic = false;
    bool v_periodic = false;
    bool u_closed = false;
    bool v_closed = false;
    int continuity = 0;

    const Vec3& pole(int i, int j) const { return poles[static_cast<std::size_t>(i * nv + j)]; }
    double weight(int i, int j) const {
        return weights.empty() ? 1.0 : weights[static_cast<std::size_t>(i * nv + j)];
    }
    bool rational() const { return u_rational || v_rational; }
    bool operator==(const BSplineSurface&) const = default;
};

/// E(u, v) = curve(u) + v * direction
struct ExtrusionSurface {
    CurveSpec curve;
    Vec3 direction = Vec3::UnitZ();
    bool operator==(const ExtrusionSurface&) const = default;
};

/// R(u, v) = Rot(z_axis, u) * (curve(v) - location) + location
struct RevolutionSurface {
    CurveSpec curve;
    Vec3 location = Vec3::Zero();
    Vec3 z_axis = Vec3::UnitZ();
    bool operator==(const RevolutionSurface&) const = default;
};

struct SurfaceSpec;

/// base(u, v) + value * unit_normal(base)(u, v)
struct OffsetSurface {
    Boxed<SurfaceSpec> surface;
    double value = 0.0;
    bool operator==(const OffsetSurface&) const = default;
};

struct OtherSurface {
    std::string type_name = "Other";
    RawFields fields;
    bool operator==(const OtherSurface&) const = default;
};

using SurfaceGeometry =
    std::variant<PlaneSurface, CylinderSurface, ConeSurface, SphereSurface, TorusSurface,
                 BSplineSurface, ExtrusionSurface, RevolutionSurface, OffsetSurface, OtherSurface>;

struct SurfaceSpec {
    UVBox trim_domain;
    std::optional<Transform> transform;
    SurfaceGeometry geometry;

    SurfaceKind kind() const { return static_cast<SurfaceKind>(geometry.index()); }
    bool operator==(const SurfaceSpec&) const = default;
};

std::string_view curve_kind_name(CurveKind kind);
std::string_view surface_kind_name(SurfaceKind kind);
std::optional<CurveKind> curve_kind_from_name(std::string_view name);
std::optional<SurfaceKind> surface_kind_from_name(std::string_view name);

/// Name used on disk for this curve ("Line", ..., or the preserved name of an Other).
std::string curve_type_name(const CurveSpec& curve);
std::string surface_type_name(const SurfaceSpec& surface);

struct GeometryStore {
    std::vector<CurveSpec> curves2d;
    std::vector<CurveSpec> curves3d;
    std::vector<SurfaceSpec> surfaces;
    std::vector<Vec3> vertices;
    BoundingBox bbox;
    bool operator==(const GeometryStore&) const = default;
};

// ---------------------------------------------------------------------------
// Topology (top-down links only)

struct Solid {
    std::vector<Index> shells;
    bool operator==(const Solid&) const = default;
};

/// orientation_wrt_solid[k] belongs to the use of faces[k] in this shell.
struct Shell {
    std::vector<Index> faces;
    std::vector<bool> orientation_wrt_solid;
    bool operator==(const Shell&) const = default;
};

struct Face {
    Index surface = 0;
    bool surface_orientation = true;
    std::vector<Index> loops;
    Index outer_loop = 0;
    UVBox exact_domain;
    bool has_singularities = false;
    Index nr_singularities = 0;
    std::vector<Vec2> singularities;
    bool operator==(const Face&) const = default;
};

struct Loop {
    std::vector<Index> halfedges;
    bool operator==(const Loop&) const = default;
};

struct HalfEdge {
    Index curve2d = 0;
    Index edge = 0;
    std::vector<Index> mates;
    bool orientation_wrt_edge = true;
    bool operator==(const HalfEdge&) const = default;
};

struct Edge {
    Index curve3d = 0;
    Index start_vertex = 0;
    Index end_vertex = 0;
    bool operator==(const Edge&) const = default;
};

struct TopologyStore {
    std::vector<Solid> solids;
    std::vector<Shell> shells;
    std::vector<Face> faces;
    std::vector<Loop> loops;
    std::vector<HalfEdge> halfedges;
    std::vector<Edge> edges;
    bool operator==(const TopologyStore&) const = default;
};

/// Triangle mesh of one face; a face the mesher failed on has no points and no triangles.
struct FaceMesh {
    std::vector<Vec3> points;
    std::vector<std::array<Index, 3>> triangles;

    bool empty() const { return points.empty() && triangles.empty(); }
    bool operator==(const FaceMesh&) const = default;
};

/// meshes has exactly one slot per face.
struct Part {
    GeometryStore geometry;
    TopologyStore topology;
    std::vector<FaceMesh> meshes;
    bool operator==(const Part&) const = default;
};

}  // namespace brep
