#pragma once

// Random point sampling directly on the parametric faces and edges of parts.
//
// Faces are trimmed by their loops (discretized in UV), sampled uniformly in
// area, and receive a share of the budget proportional to their trimmed area.
// Edges optionally receive a fixed fraction of the budget, split by arc length.
// A user callback attaches data to each entity's batch of points or skips it.

#include "brep/model.hpp"
#include "brep/topo_nav.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace brep {

struct TrimLoop {
    std::vector<Vec2> points;  // closed: front() == back()
    bool outer = false;
    // Segment ids bucketed by v for fast crossing and proximity queries.
    double v0 = 0.0;
    double band_height = 1.0;
    std::vector<std::vector<std::uint32_t>> bands;
};

struct TrimRegion {
    Index face = 0;
    UVBox box;          // trim_domain intersected with exact_domain
    double tolerance = 0.0;  // chord tolerance actually used (also the boundary band)
    std::vector<TrimLoop> loops;  // empty: the whole box
};

/// Discretizes every loop of the face adaptively until the chord deviation is
/// below chord_tol (capped at 1e-3 of the smaller box side for tiny faces).
/// Throws OpenLoop, and UnsupportedKind naming the half-edge for pcurves that
/// cannot be evaluated.
TrimRegion build_trim_region(const Part& part, Index face, double chord_tol = 1e-4);

/// Inside the outer loop and outside every inner loop (even-odd rule each).
/// Points within the region tolerance of a loop count as outside.
bool point_in_face(const TrimRegion& region, const Vec2& uv);

/// Parametric coordinates handed to the callback: uv for faces, t for edges.
struct ParamBatch {
    std::vector<Vec2> uv;
    std::vector<double> t;

    std::size_t size() const { return uv.empty() ? t.size() : uv.size(); }
};

/// Row-major values. A single row is broadcast to every point of the entity.
struct Payload {
    std::size_t width = 1;
    std::vector<double> values;

    static Payload scalar(double x) { return {1, {x}}; }
    std::size_t rows() const { return width == 0 ? 0 : values.size() / width; }
};

/// Returns the entity's data, or nullopt to drop all of its points. Called once
/// per sampled entity, never concurrently.
using SampleCallback =
    std::function<std::optional<Payload>(const Part&, const TopoRef&, const ParamBatch&)>;

struct SamplerConfig {
    std::size_t num_samples = 1000;
    bool include_edges = false;
    double edge_fraction = 0.1;
    std::uint64_t seed = 0;
    double chord_tol = 1e-4;
    double singularity_radius = 1e-6;
    int area_draws = 512;
    /// Worker threads for per-face sampling; 0 picks the hardware count.
    unsigned threads = 1;
};

struct SamplePoint {
    std::size_t part = 0;  // index into the sampled parts
    TopoKind kind = TopoKind::Face;
    Index index = 0;
    Vec2 uv = Vec2::Zero();  // faces
    double t = 0.0;          // edges
    Vec3 position = Vec3::Zero();
};

struct SampleWarning {
    std::size_t part = 0;
    TopoKind kind = TopoKind::Face;
    Index index = 0;
    std::string message;
};

struct SampleResult {
    std::vector<SamplePoint> points;
    std::size_t payload_width = 0;
    std::vector<double> payloads;  // points.size() x payload_width, row-major
    std::vector<SampleWarning> warnings;

    std::vector<Vec3> positions() const;
};

/// Throws ValidationError for parts with invariant errors, and Error when
/// callbacks return payloads of inconsistent width. Per-entity problems
/// (unsupported kinds, exhausted rejection, callback errors) become warnings.
SampleResult sample_parts(const std::vector<Part>& parts, const SampleCallback& callback,
                          const SamplerConfig& config);
SampleResult sample_parts(const std::vector<Part>& parts, std::size_t num_samples,
                          const SampleCallback& callback, SamplerConfig config = {});

/// Trimmed area of a face from cfg.area_draws stratified draws of the
/// first-form density; what sample_parts uses to split the budget.
double face_area_estimate(const Part& part, Index face, const SamplerConfig& config = {});

/// Unit normals at the batch's uv points, oriented by the face's surface_orientation.
std::vector<Vec3> face_normals(const Part& part, const TopoRef& face, const ParamBatch& batch);

struct BuiltinCallback {
    std::string name;
    SampleCallback callback;
    bool wants_edges = false;
    std::vector<std::string> columns;
};

/// points, normals, feature_edge and primitive_degree.
const std::vector<BuiltinCallback>& builtin_callbacks();
/// Throws DomainError for unknown names.
const BuiltinCallback& builtin_callback(std::string_view name);

/// Degree pairs used by primitive_degree; nullopt when the face is skipped.
/// A single pair is reported twice.
std::optional<std::array<int, 4>> primitive_degrees(const SurfaceSpec& surface);

/// Adds i.i.d. Gaussian offsets with standard deviation sigma times the
/// diagonal of the points' bounding box.
std::vector<Vec3> add_noise(const std::vector<Vec3>& positions, double sigma, std::uint64_t seed);

/// Deterministic per-entity seed derived from a root seed.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b, std::uint64_t c = 0);

}  // namespace brep
