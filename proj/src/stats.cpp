#include "brep/stats.hpp"

#include "brep/errors.hpp"
#include "brep/hdf5_io.hpp"
#include "brep/mesh_utils.hpp"

#include <fmt/core.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <bit>
#include <ostream>
#include <random>
#include <thread>

namespace brep {

namespace {

std::string surface_category(const SurfaceSpec& s) { return std::string(surface_kind_name(s.kind())); }

std::string curve_category(const CurveSpec& c) { return std::string(curve_kind_name(c.kind())); }

void merge(Histogram& into, const Histogram& from) {
    for (const auto& [k, n] : from) into[k] += n;
}

double ratio(std::size_t a, std::size_t b) {
    return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
}

}  // namespace

std::vector<std::string> surface_categories() {
    std::vector<std::string> out;
    for (int k = 0; k <= static_cast<int>(SurfaceKind::Other); ++k)
        out.emplace_back(surface_kind_name(static_cast<SurfaceKind>(k)));
    return out;
}

std::vector<std::string> curve_categories() {
    std::vector<std::string> out;
    for (int k = 0; k <= static_cast<int>(CurveKind::Other); ++k)
        out.emplace_back(curve_kind_name(static_cast<CurveKind>(k)));
    return out;
}

std::size_t face_bucket(std::size_t faces) {
    if (faces == 0) throw DomainError("a part with no faces has no bucket");
    return std::min<std::size_t>(static_cast<std::size_t>(std::bit_width(faces)) - 1, kFaceBuckets - 1);
}

double CorpusReport::mean_faces_per_part() const { return parts == 0 ? 0.0 : ratio(faces, parts); }

double CorpusReport::mean_parts_per_file() const {
    const std::size_t readable = files.size() - skipped;
    return ratio(parts, readable);
}

double CorpusReport::mesh_failure_rate() const { return ratio(failed_meshes, faces); }

std::map<std::string, double> CorpusReport::shares(const Histogram& h) {
    std::size_t total = 0;
    for (const auto& [k, n] : h) total += n;
    std::map<std::string, double> out;
    for (const auto& [k, n] : h) out[k] = ratio(n, total);
    return out;
}

FileStats part_stats(const std::vector<Part>& parts) {
    FileStats s;
    s.parts = parts.size();
    for (const Part& p : parts) {
        const std::size_t nf = p.topology.faces.size();
        s.faces_per_part.push_back(nf);
        s.faces += nf;
        s.failed_meshes += failed_mesh_count(p);
        for (const Face& f : p.topology.faces) {
            const auto i = static_cast<std::size_t>(f.surface);
            s.surface_types[i < p.geometry.surfaces.size() ? surface_category(p.geometry.surfaces[i]) : "Other"]++;
        }
        for (const CurveSpec& c : p.geometry.curves3d) s.curve_types[curve_category(c)]++;
    }
    return s;
}

FileStats file_stats(const std::filesystem::path& path) {
    FileStats s;
    try {
        s = part_stats(read_parts(path));
    } catch (const Error& e) {
        s = FileStats{};
        s.error = e.what();
    }
    s.path = path;
    return s;
}

std::vector<std::size_t> sample_indices(std::size_t count, std::size_t limit, std::uint64_t seed) {
    std::vector<std::size_t> idx(count);
    for (std::size_t i = 0; i < count; ++i) idx[i] = i;
    if (limit >= count) return idx;
    // Partial Fisher-Yates with an explicitly specified engine, so the subset
    // does not depend on the standard library's shuffle.
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < limit; ++i) {
        const std::size_t span = count - i;
        const std::size_t j = i + static_cast<std::size_t>(rng() % span);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(limit);
    std::sort(idx.begin(), idx.end());
    return idx;
}

CorpusReport corpus_stats(const std::vector<std::filesystem::path>& paths,
                          std::optional<std::size_t> sample_limit, std::uint64_t seed, unsigned threads) {
    const auto chosen = sample_indices(paths.size(), sample_limit.value_or(paths.size()), seed);
    CorpusReport r;
    r.files.resize(chosen.size());
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, chosen.size()));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < chosen.size(); i = next++) r.files[i] = file_stats(paths[chosen[i]]);
    };
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < threads; ++k) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (const FileStats& f : r.files) {
        if (!f.error.empty()) {
            ++r.skipped;
            continue;
        }
        r.parts += f.parts;
        r.faces += f.faces;
        r.failed_meshes += f.failed_meshes;
        for (std::size_t n : f.faces_per_part) {
            if (n == 0) ++r.empty_parts;
            else ++r.face_buckets[face_bucket(n)];
        }
        merge(r.surface_types, f.surface_types);
        merge(r.curve_types, f.curve_types);
    }
    return r;
}

void write_report_jsonl(const CorpusReport& r, std::ostream& out) {
    using nlohmann::ordered_json;
    for (const FileStats& f : r.files) {
        ordered_json j;
        j["record"] = "file";
        j["path"] = f.path.string();
        if (!f.error.empty()) {
            j["error"] = f.error;
        } else {
            j["parts"] = f.parts;
            j["faces"] = f.faces;
            j["faces_per_part"] = f.faces_per_part;
            j["surface_types"] = f.surface_types;
            j["curve_types"] = f.curve_types;
            j["mesh_failure_rate"] = f.mesh_failure_rate();
        }
        out << j.dump() << '\n';
    }
    ordered_json c;
    c["record"] = "corpus";
    c["files"] = r.files.size();
    c["skipped"] = r.skipped;
    c["parts"] = r.parts;
    c["faces"] = r.faces;
    c["mean_faces_per_part"] = r.mean_faces_per_part();
    c["mean_parts_per_file"] = r.mean_parts_per_file();
    c["mesh_failure_rate"] = r.mesh_failure_rate();
    c["empty_parts"] = r.empty_parts;
    ordered_json buckets = ordered_json::array();
    for (std::size_t k = 0; k < kFaceBuckets; ++k)
        buckets.push_back({{"min_faces", std::size_t{1} << k}, {"parts", r.face_buckets[k]}});
    c["face_buckets"] = buckets;
    c["surface_types"] = r.surface_types;
    c["surface_shares"] = CorpusReport::shares(r.surface_types);
    c["curve_types"] = r.curve_types;
    c["curve_shares"] = CorpusReport::shares(r.curve_types);
    out << c.dump() << '\n';
}

std::string format_report_table(const CorpusReport& r) {
    std::string s;
    s += fmt::format("files {}  skipped {}  parts {}  faces {}\n", r.files.size(), r.skipped, r.parts, r.faces);
    s += fmt::format("mean faces/part {:.3f}  mesh failure rate {:.4f}%\n", r.mean_faces_per_part(),
                     100.0 * r.mesh_failure_rate());
    auto table = [&s](const char* title, const Histogram& h, const std::vector<std::string>& cats) {
        const auto sh = CorpusReport::shares(h);
        s += fmt::format("\n{:<12} {:>10} {:>8}\n", title, "count", "share");
        for (const std::string& c : cats) {
            const auto it = h.find(c);
            const std::size_t n = it == h.end() ? 0 : it->second;
            s += fmt::format("{:<12} {:>10} {:>7.2f}%\n", c, n, n ? 100.0 * sh.at(c) : 0.0);
        }
    };
    table("surface", r.surface_types, surface_categories());
    table("curve", r.curve_types, curve_categories());
    s += fmt::format("\n{:<12} {:>10}\n", "faces>=", "parts");
    for (std::size_t k = 0; k < kFaceBuckets; ++k)
        s += fmt::format("{:<12} {:>10}\n", std::size_t{1} << k, r.face_buckets[k]);
    for (const FileStats& f : r.files)
        if (!f.error.empty()) s += fmt::format("skipped {}: {}\n", f.path.string(), f.error);
    return s;
}

void write_bucket_data(const CorpusReport& r, std::ostream& out) {
    for (std::size_t k = 0; k < kFaceBuckets; ++k) out << (std::size_t{1} << k) << ' ' << r.face_buckets[k] << '\n';
}

}  // namespace brep
