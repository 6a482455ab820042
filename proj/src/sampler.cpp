#include "brep/sampler.hpp"

#include "brep/errors.hpp"
#include "brep/geom_eval.hpp"
#include "brep/validate.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

namespace brep {

namespace {

constexpr double kMinDensity = 1e-12;
constexpr double kDensityMargin = 1.2;
constexpr std::uint64_t kExhaustionWindow = 1'000'000;
constexpr double kMinAcceptance = 1e-4;
constexpr int kMaxRefineDepth = 20;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

private:
    std::mt19937_64 engine_;
};

Vec2 uv_of(const Vec3& p) { return p.head<2>(); }

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double s = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (p - (a + s * ab)).norm();
}

void refine(const CurveSpec& c, double a, const Vec2& pa, double b, const Vec2& pb, double tol,
            int depth, int min_depth, std::vector<Vec2>& out) {
    const double m = 0.5 * (a + b);
    const Vec2 pm = uv_of(eval_curve(c, m).position);
    if (depth < kMaxRefineDepth && (depth < min_depth || segment_distance(pm, pa, pb) > tol)) {
        refine(c, a, pa, m, pm, tol, depth + 1, min_depth, out);
        refine(c, m, pm, b, pb, tol, depth + 1, min_depth, out);
    } else {
        out.push_back(pb);
    }
}

void build_bands(TrimLoop& loop, double tol) {
    const auto& p = loop.points;
    const std::size_t segments = p.size() - 1;
    double lo = p[0].y(), hi = p[0].y();
    for (const Vec2& q : p) {
        lo = std::min(lo, q.y());
        hi = std::max(hi, q.y());
    }
    const std::size_t nb = std::clamp<std::size_t>(segments / 4, 1, 1024);
    loop.v0 = lo;
    loop.band_height = hi > lo ? (hi - lo) / static_cast<double>(nb) : 1.0;
    loop.bands.assign(nb, {});
    auto band = [&](double v) {
        const double k = std::floor((v - loop.v0) / loop.band_height);
        return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(nb - 1)));
    };
    for (std::size_t i = 0; i < segments; ++i) {
        const double a = std::min(p[i].y(), p[i + 1].y()) - tol;
        const double b = std::max(p[i].y(), p[i + 1].y()) + tol;
        for (std::size_t k = band(a); k <= band(b); ++k)
            loop.bands[k].push_back(static_cast<std::uint32_t>(i));
    }
}

// 0 outside, 1 inside, -1 within tolerance of the polyline.
int classify(const TrimLoop& loop, const Vec2& uv, double tol) {
    const double v = uv.y();
    const double hi = loop.v0 + loop.band_height * static_cast<double>(loop.bands.size());
    if (v < loop.v0 - tol || v > hi + tol) return 0;
    const double k = std::floor((v - loop.v0) / loop.band_height);
    const auto b = static_cast<std::size_t>(
        std::clamp(k, 0.0, static_cast<double>(loop.bands.size() - 1)));
    bool inside = false;
    const auto& p = loop.points;
    for (std::uint32_t i : loop.bands[b]) {
        const Vec2& a = p[i];
        const Vec2& c = p[i + 1];
        if (segment_distance(uv, a, c) <= tol) return -1;
        if ((a.y() > v) != (c.y() > v)) {
            const double x = a.x() + (v - a.y()) * (c.x() - a.x()) / (c.y() - a.y());
            if (uv.x() < x) inside = !inside;
        }
    }
    return inside ? 1 : 0;
}

template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
    for (auto& t : pool) t.join();
}

/// Largest-remainder apportionment of `total` by `weights`; ties go to the lower index.
std::vector<std::size_t> apportion(const std::vector<double>& weights, std::size_t total) {
    std::vector<std::size_t> out(weights.size(), 0);
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (sum <= 0 || total == 0) return out;
    std::vector<std::pair<double, std::size_t>> rem;
    std::size_t used = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double q = static_cast<double>(total) * weights[i] / sum;
        out[i] = static_cast<std::size_t>(std::floor(q));
        used += out[i];
        rem.emplace_back(q - std::floor(q), i);
    }
    std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; used < total && k < rem.size(); ++k, ++used) ++out[rem[k].second];
    return out;
}

struct FaceJob {
    std::size_t part;
    Index face;
    std::optional<TrimRegion> region;
    double area = 0.0;
    double max_density = 0.0;
    std::size_t count = 0;
    std::vector<SamplePoint> samples;
    std::vector<std::string> problems;
};

struct EdgeJob {
    std::size_t part;
    Index edge;
    double length = 0.0;
    double max_speed = 0.0;
    std::size_t count = 0;
    std::vector<SamplePoint> samples;
    std::vector<std::string> problems;
};

struct FaceSampler {
    const Part& part;
    const SurfaceSpec& surface;
    const Face& face;
    const TrimRegion& region;
    double singularity_radius;

    // Returns the first-form density at uv, or 0 where the point is rejected.
    double density(const Vec2& uv) const {
        if (!point_in_face(region, uv)) return 0.0;
        for (const Vec2& s : face.singularities)
            if ((uv - s).norm() < singularity_radius) return 0.0;
        const double d = first_fundamental_density(surface, uv.x(), uv.y());
        return d < kMinDensity ? 0.0 : d;
    }
    Vec2 draw(Rng& rng) const {
        return {rng.uniform(region.box.u0, region.box.u1), rng.uniform(region.box.v0, region.box.v1)};
    }
};

void estimate_area(FaceJob& job, const FaceSampler& fs, const SamplerConfig& cfg, Rng& rng) {
    const UVBox& box = fs.region.box;
    const int n = std::max(cfg.area_draws, 1);
    const int gx = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(n)))));
    const int gy = std::max(1, n / gx);
    double sum = 0.0;
    int hits = 0;
    for (int j = 0; j < gy; ++j)
        for (int i = 0; i < gx; ++i) {
            const Vec2 uv(box.u0 + (i + rng.uniform()) / gx * box.width(),
                          box.v0 + (j + rng.uniform()) / gy * box.height());
            const double d = fs.density(uv);
            sum += d;
            hits += d > 0;
            job.max_density = std::max(job.max_density, d);
        }
    double draws = gx * gy;
    // Small regions inside large boxes: keep drawing until a few hits land.
    for (int extra = 0; hits < 16 && extra < 64 * n; ++extra) {
        const double d = fs.density(fs.draw(rng));
        sum += d;
        hits += d > 0;
        job.max_density = std::max(job.max_density, d);
        draws += 1;
    }
    job.area = box.width() * box.height() * sum / draws;
}

void sample_face(FaceJob& job, const FaceSampler& fs, Rng& rng) {
    std::uint64_t draws = 0;
    const double ceiling = kDensityMargin * job.max_density;
    while (job.samples.size() < job.count) {
        const Vec2 uv = fs.draw(rng);
        const double gate = rng.uniform();
        ++draws;
        if (draws % kExhaustionWindow == 0 &&
            static_cast<double>(job.samples.size()) < kMinAcceptance * static_cast<double>(draws)) {
            job.problems.push_back(fmt::format("exhausted rejection: {} of {} draws accepted",
                                               job.samples.size(), draws));
            break;
        }
        const double d = fs.density(uv);
        if (d <= 0 || gate * ceiling > d) continue;
        SamplePoint sp;
        sp.part = job.part;
        sp.kind = TopoKind::Face;
        sp.index = job.face;
        sp.uv = uv;
        sp.position = eval_surface(fs.surface, uv.x(), uv.y()).position;
        job.samples.push_back(sp);
    }
}

void measure_edge(EdgeJob& job, const CurveSpec& c) {
    constexpr int kSteps = 64;
    const double dt = (c.interval.t1 - c.interval.t0) / kSteps;
    for (int k = 0; k < kSteps; ++k) {
        const double speed = eval_curve(c, c.interval.t0 + (k + 0.5) * dt).d1.norm();
        job.length += speed * dt;
        job.max_speed = std::max(job.max_speed, speed);
    }
}

void sample_edge(EdgeJob& job, const Part& part, const CurveSpec& c, Rng& rng) {
    const double ceiling = kDensityMargin * job.max_speed;
    std::uint64_t draws = 0;
    while (job.samples.size() < job.count) {
        const double t = rng.uniform(c.interval.t0, c.interval.t1);
        const double gate = rng.uniform();
        ++draws;
        if (draws % kExhaustionWindow == 0 &&
            static_cast<double>(job.samples.size()) < kMinAcceptance * static_cast<double>(draws)) {
            job.problems.push_back("exhausted rejection");
            break;
        }
        const CurveJet jet = eval_curve(c, t);
        const double speed = jet.d1.norm();
        if (speed < kMinDensity || gate * ceiling > speed) continue;
        SamplePoint sp;
        sp.part = job.part;
        sp.kind = TopoKind::Edge;
        sp.index = job.edge;
        sp.t = t;
        sp.position = jet.position;
        job.samples.push_back(sp);
    }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t h = splitmix64(root);
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ b);
    return splitmix64(h ^ c);
}

TrimRegion build_trim_region(const Part& part, Index face_index, double chord_tol) {
    const auto& faces = part.topology.faces;
    if (face_index < 0 || static_cast<std::size_t>(face_index) >= faces.size())
        throw DomainError(fmt::format("face {} out of range", face_index));
    const Face& face = faces[static_cast<std::size_t>(face_index)];
    const SurfaceSpec& s = part.geometry.surfaces.at(static_cast<std::size_t>(face.surface));
    TrimRegion r;
    r.face = face_index;
    const UVBox& a = s.trim_domain;
    const UVBox& b = face.exact_domain;
    r.box = {std::max(a.u0, b.u0), std::min(a.u1, b.u1), std::max(a.v0, b.v0), std::min(a.v1, b.v1)};
    if (!(r.box.width() > 0 && r.box.height() > 0))
        throw DomainError(fmt::format("face {}: empty UV domain", face_index));
    r.tolerance = std::min(chord_tol, 1e-3 * std::min(r.box.width(), r.box.height()));

    for (Index l : face.loops) {
        TrimLoop loop;
        loop.outer = l == face.outer_loop;
        for (const OrientedHalfEdge& oh : loop_halfedges_oriented(part, l)) {
            const HalfEdge& he = part.topology.halfedges[static_cast<std::size_t>(oh.halfedge)];
            const CurveSpec& pc = part.geometry.curves2d.at(static_cast<std::size_t>(he.curve2d));
            if (!is_evaluable(pc))
                throw UnsupportedKind(fmt::format("half-edge {}: pcurve of kind {} cannot be evaluated",
                                                  oh.halfedge, curve_type_name(pc)));
            const double t0 = pc.interval.t0, t1 = pc.interval.t1;
            const Vec2 p0 = uv_of(eval_curve(pc, t0).position);
            if (loop.points.empty() || (loop.points.back() - p0).norm() > 1e-12)
                loop.points.push_back(p0);
            const int min_depth = pc.kind() == CurveKind::Line ? 0 : 3;
            refine(pc, t0, p0, t1, uv_of(eval_curve(pc, t1).position), r.tolerance, 0, min_depth,
                   loop.points);
        }
        if ((loop.points.front() - loop.points.back()).norm() > 1e-9)
            loop.points.push_back(loop.points.front());
        else
            loop.points.back() = loop.points.front();
        if (loop.points.size() < 2) loop.points.push_back(loop.points.front());
        build_bands(loop, r.tolerance);
        r.loops.push_back(std::move(loop));
    }
    return r;
}

bool point_in_face(const TrimRegion& region, const Vec2& uv) {
    if (!region.box.contains(uv)) return false;
    for (const TrimLoop& loop : region.loops) {
        const int c = classify(loop, uv, region.tolerance);
        if (c < 0) return false;
        if (loop.outer != (c == 1)) return false;
    }
    return true;
}

double face_area_estimate(const Part& part, Index face, const SamplerConfig& cfg) {
    FaceJob job{0, face, build_trim_region(part, face, cfg.chord_tol), 0, 0, 0, {}, {}};
    const Face& f = part.topology.faces[static_cast<std::size_t>(face)];
    const FaceSampler fs{part, part.geometry.surfaces.at(static_cast<std::size_t>(f.surface)), f, *job.region,
                         cfg.singularity_radius};
    Rng rng(derive_seed(cfg.seed, 0, static_cast<std::uint64_t>(face), 0));
    estimate_area(job, fs, cfg, rng);
    return job.area;
}

std::vector<Vec3> SampleResult::positions() const {
    std::vector<Vec3> out;
    out.reserve(points.size());
    for (const SamplePoint& p : points) out.push_back(p.position);
    return out;
}

SampleResult sample_parts(const std::vector<Part>& parts, std::size_t num_samples,
                          const SampleCallback& callback, SamplerConfig config) {
    config.num_samples = num_samples;
    return sample_parts(parts, callback, config);
}

SampleResult sample_parts(const std::vector<Part>& parts, const SampleCallback& callback,
                          const SamplerConfig& cfg) {
    for (std::size_t p = 0; p < parts.size(); ++p)
        for (const Violation& v : validate_part(parts[p]))
            if (v.severity == Severity::Error)
                throw ValidationError(fmt::format("part {}: {}: {}", p, v.path, v.message));

    SampleResult result;
    std::vector<FaceJob> faces;
    std::vector<EdgeJob> edges;
    for (std::size_t p = 0; p < parts.size(); ++p) {
        for (std::size_t f = 0; f < parts[p].topology.faces.size(); ++f)
            faces.push_back({p, static_cast<Index>(f), std::nullopt, 0, 0, 0, {}, {}});
        if (cfg.include_edges)
            for (std::size_t e = 0; e < parts[p].topology.edges.size(); ++e)
                edges.push_back({p, static_cast<Index>(e), 0, 0, 0, {}, {}});
    }

    auto face_sampler = [&](const FaceJob& job) {
        const Part& part = parts[job.part];
        const Face& face = part.topology.faces[static_cast<std::size_t>(job.face)];
        return FaceSampler{part, part.geometry.surfaces[static_cast<std::size_t>(face.surface)], face,
                           *job.region, cfg.singularity_radius};
    };
    auto edge_curve = [&](const EdgeJob& job) -> const CurveSpec& {
        const Part& part = parts[job.part];
        const Edge& e = part.topology.edges[static_cast<std::size_t>(job.edge)];
        return part.geometry.curves3d[static_cast<std::size_t>(e.curve3d)];
    };

    parallel_for(faces.size(), cfg.threads, [&](std::size_t i) {
        FaceJob& job = faces[i];
        const Part& part = parts[job.part];
        const Face& face = part.topology.faces[static_cast<std::size_t>(job.face)];
        try {
            const SurfaceSpec& s = part.geometry.surfaces[static_cast<std::size_t>(face.surface)];
            if (!is_evaluable(s))
                throw UnsupportedKind(fmt::format("surface kind {} cannot be evaluated", surface_type_name(s)));
            job.region = build_trim_region(part, job.face, cfg.chord_tol);
            Rng rng(derive_seed(cfg.seed, job.part, static_cast<std::uint64_t>(job.face), 0));
            estimate_area(job, face_sampler(job), cfg, rng);
            if (job.area <= 0) job.problems.push_back("no draw landed inside the face; not sampled");
        } catch (const Error& e) {
            job.region.reset();
            job.area = 0;
            job.problems.push_back(e.what());
        }
    });
    parallel_for(edges.size(), cfg.threads, [&](std::size_t i) {
        EdgeJob& job = edges[i];
        try {
            const CurveSpec& c = edge_curve(job);
            if (!is_evaluable(c))
                throw UnsupportedKind(fmt::format("curve kind {} cannot be evaluated", curve_type_name(c)));
            measure_edge(job, c);
        } catch (const Error& e) {
            job.length = 0;
            job.problems.push_back(e.what());
        }
        const double diag = parts[job.part].geometry.bbox.diagonal();
        if (job.length <= 1e-12 * std::max(1.0, diag)) job.length = 0;
    });

    std::vector<double> edge_weights;
    for (const EdgeJob& e : edges) edge_weights.push_back(e.length);
    const bool any_edge = std::any_of(edge_weights.begin(), edge_weights.end(), [](double w) { return w > 0; });
    const std::size_t edge_budget =
        any_edge ? static_cast<std::size_t>(std::llround(std::clamp(cfg.edge_fraction, 0.0, 1.0) *
                                                          static_cast<double>(cfg.num_samples)))
                 : 0;
    std::vector<double> face_weights;
    for (const FaceJob& f : faces) face_weights.push_back(f.area);
    const auto face_counts = apportion(face_weights, cfg.num_samples - edge_budget);
    const auto edge_counts = apportion(edge_weights, edge_budget);
    for (std::size_t i = 0; i < faces.size(); ++i) faces[i].count = face_counts[i];
    for (std::size_t i = 0; i < edges.size(); ++i) edges[i].count = edge_counts[i];

    parallel_for(faces.size(), cfg.threads, [&](std::size_t i) {
        FaceJob& job = faces[i];
        if (job.count == 0 || !job.region) return;
        try {
            Rng rng(derive_seed(cfg.seed, job.part, static_cast<std::uint64_t>(job.face), 1));
            sample_face(job, face_sampler(job), rng);
        } catch (const Error& e) {
            job.samples.clear();
            job.problems.push_back(e.what());
        }
    });
    parallel_for(edges.size(), cfg.threads, [&](std::size_t i) {
        EdgeJob& job = edges[i];
        if (job.count == 0) return;
        try {
            Rng rng(derive_seed(cfg.seed, job.part, static_cast<std::uint64_t>(job.edge), 2));
            sample_edge(job, parts[job.part], edge_curve(job), rng);
        } catch (const Error& e) {
            job.samples.clear();
            job.problems.push_back(e.what());
        }
    });

    bool width_known = false;
    auto emit = [&](std::size_t part, TopoKind kind, Index index, std::vector<SamplePoint>& samples,
                    const std::vector<std::string>& problems) {
        for (const std::string& m : problems) result.warnings.push_back({part, kind, index, m});
        if (samples.empty()) return;
        ParamBatch batch;
        for (const SamplePoint& s : samples) {
            if (kind == TopoKind::Face) batch.uv.push_back(s.uv);
            else batch.t.push_back(s.t);
        }
        const TopoRef ref{kind, index, &parts[part]};
        std::optional<Payload> payload;
        try {
            payload = callback(parts[part], ref, batch);
        } catch (const Error& e) {
            result.warnings.push_back({part, kind, index, fmt::format("callback failed: {}", e.what())});
            return;
        }
        if (!payload) return;
        const std::size_t rows = payload->rows();
        if (payload->width == 0 || payload->values.size() != rows * payload->width ||
            (rows != 1 && rows != samples.size()))
            throw Error(fmt::format("callback payload for {} {} has {} values for {} points",
                                    kind == TopoKind::Face ? "face" : "edge", index,
                                    payload->values.size(), samples.size()));
        if (!width_known) {
            result.payload_width = payload->width;
            width_known = true;
        } else if (payload->width != result.payload_width) {
            throw Error(fmt::format("callback payload width {} differs from earlier width {}",
                                    payload->width, result.payload_width));
        }
        for (std::size_t k = 0; k < samples.size(); ++k) {
            const std::size_t row = rows == 1 ? 0 : k;
            result.payloads.insert(result.payloads.end(),
                                   payload->values.begin() + static_cast<std::ptrdiff_t>(row * payload->width),
                                   payload->values.begin() + static_cast<std::ptrdiff_t>((row + 1) * payload->width));
            result.points.push_back(samples[k]);
        }
    };
    std::size_t fi = 0, ei = 0;
    for (std::size_t p = 0; p < parts.size(); ++p) {
        for (; fi < faces.size() && faces[fi].part == p; ++fi)
            emit(p, TopoKind::Face, faces[fi].face, faces[fi].samples, faces[fi].problems);
        for (; ei < edges.size() && edges[ei].part == p; ++ei)
            emit(p, TopoKind::Edge, edges[ei].edge, edges[ei].samples, edges[ei].problems);
    }
    return result;
}

std::vector<Vec3> face_normals(const Part& part, const TopoRef& face, const ParamBatch& batch) {
    std::vector<Vec3> out;
    out.reserve(batch.uv.size());
    for (const Vec2& uv : batch.uv) out.push_back(face_oriented_normal(part, face.index, uv.x(), uv.y()));
    return out;
}

std::optional<std::array<int, 4>> primitive_degrees(const SurfaceSpec& surface) {
    switch (surface.kind()) {
        case SurfaceKind::BSpline: {
            const auto& b = std::get<BSplineSurface>(surface.geometry);
            if (b.rational()) return std::nullopt;
            return std::array<int, 4>{b.u_degree, b.v_degree, b.u_degree, b.v_degree};
        }
        case SurfaceKind::Plane: return std::array<int, 4>{1, 1, 1, 1};
        case SurfaceKind::Sphere: return std::array<int, 4>{2, 2, 3, 3};
        default: return std::array<int, 4>{2, 3, 3, 2};
    }
}

namespace {

Payload normals_payload(const Part& part, const TopoRef& topo, const ParamBatch& batch,
                        std::size_t extra) {
    Payload out{3 + extra, {}};
    out.values.reserve(batch.size() * out.width);
    for (const Vec3& n : face_normals(part, topo, batch)) {
        out.values.insert(out.values.end(), {n.x(), n.y(), n.z()});
        out.values.resize(out.values.size() + extra);
    }
    return out;
}

std::vector<BuiltinCallback> make_builtins() {
    std::vector<BuiltinCallback> out;
    out.push_back({"points",
                   [](const Part&, const TopoRef& topo, const ParamBatch&) -> std::optional<Payload> {
                       if (!topo.is_face()) return std::nullopt;
                       return Payload::scalar(1);
                   },
                   false,
                   {"value"}});
    out.push_back({"normals",
                   [](const Part& part, const TopoRef& topo, const ParamBatch& batch) -> std::optional<Payload> {
                       if (!topo.is_face()) return std::nullopt;
                       return normals_payload(part, topo, batch, 0);
                   },
                   false,
                   {"nx", "ny", "nz"}});
    out.push_back({"feature_edge",
                   [](const Part&, const TopoRef& topo, const ParamBatch&) -> std::optional<Payload> {
                       return Payload::scalar(topo.is_face() ? 0 : 1);
                   },
                   true,
                   {"label"}});
    out.push_back({"primitive_degree",
                   [](const Part& part, const TopoRef& topo, const ParamBatch& batch) -> std::optional<Payload> {
                       if (!topo.is_face()) return std::nullopt;
                       const auto degrees = primitive_degrees(topo.surface());
                       if (!degrees) return std::nullopt;
                       Payload p = normals_payload(part, topo, batch, 4);
                       for (std::size_t r = 0; r < p.rows(); ++r)
                           for (std::size_t k = 0; k < 4; ++k) p.values[r * 7 + 3 + k] = (*degrees)[k];
                       return p;
                   },
                   false,
                   {"nx", "ny", "nz", "deg_u1", "deg_v1", "deg_u2", "deg_v2"}});
    return out;
}

}  // namespace

const std::vector<BuiltinCallback>& builtin_callbacks() {
    static const std::vector<BuiltinCallback> builtins = make_builtins();
    return builtins;
}

const BuiltinCallback& builtin_callback(std::string_view name) {
    for (const BuiltinCallback& b : builtin_callbacks())
        if (b.name == name) return b;
    throw DomainError(fmt::format("unknown task '{}'", name));
}

std::vector<Vec3> add_noise(const std::vector<Vec3>& positions, double sigma, std::uint64_t seed) {
    if (sigma < 0) throw DomainError("noise sigma must be non-negative");
    if (positions.empty() || sigma == 0) return positions;
    Vec3 lo = positions[0], hi = positions[0];
    for (const Vec3& p : positions) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double scale = sigma * (hi - lo).norm();
    std::mt19937_64 engine(splitmix64(seed));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Vec3> out;
    out.reserve(positions.size());
    for (const Vec3& p : positions) {
        const double x = gauss(engine), y = gauss(engine), z = gauss(engine);
        out.push_back(p + scale * Vec3(x, y, z));
    }
    return out;
}

}  // namespace brep
