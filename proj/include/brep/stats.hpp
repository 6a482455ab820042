#pragma once

// Corpus statistics: faces per part, surface and curve type histograms, and
// mesh failure rates over a set of part files.

#include "brep/model.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace brep {

/// Lower edges 1, 2, 4, ..., 2^15 of the faces-per-part buckets; the last one
/// is open-ended.
inline constexpr std::size_t kFaceBuckets = 16;

using Histogram = std::map<std::string, std::size_t>;

struct FileStats {
    std::filesystem::path path;
    std::string error;  // non-empty: file skipped
    std::size_t parts = 0;
    std::vector<std::size_t> faces_per_part;
    std::size_t faces = 0;
    std::size_t failed_meshes = 0;
    Histogram surface_types;  // per face, by the kind of its surface
    Histogram curve_types;    // per 3D curve

    double mesh_failure_rate() const {
        return faces == 0 ? 0.0 : static_cast<double>(failed_meshes) / static_cast<double>(faces);
    }
};

struct CorpusReport {
    std::vector<FileStats> files;  // selected files, in input order
    std::size_t skipped = 0;       // unreadable files among them
    std::size_t parts = 0;
    std::size_t faces = 0;
    std::size_t failed_meshes = 0;
    std::size_t empty_parts = 0;  // parts with no faces (outside every bucket)
    std::array<std::size_t, kFaceBuckets> face_buckets{};
    Histogram surface_types;
    Histogram curve_types;

    double mean_faces_per_part() const;
    double mean_parts_per_file() const;
    double mesh_failure_rate() const;
    static std::map<std::string, double> shares(const Histogram& h);
};

/// Category names used in the histograms; "Other" collects every
/// uninterpreted kind.
std::vector<std::string> surface_categories();
std::vector<std::string> curve_categories();

/// Bucket index for a part with `faces` >= 1 faces.
std::size_t face_bucket(std::size_t faces);

FileStats part_stats(const std::vector<Part>& parts);
FileStats file_stats(const std::filesystem::path& path);

/// Statistics over `paths`, or over `sample_limit` of them chosen by `seed`
/// (same seed, same subset). Unreadable files are listed and skipped.
CorpusReport corpus_stats(const std::vector<std::filesystem::path>& paths,
                          std::optional<std::size_t> sample_limit = std::nullopt,
                          std::uint64_t seed = 0, unsigned threads = 1);

/// Indices chosen by corpus_stats, sorted ascending.
std::vector<std::size_t> sample_indices(std::size_t count, std::size_t limit, std::uint64_t seed);

/// One JSON object per line: a "file" record per file, then one "corpus" record.
void write_report_jsonl(const CorpusReport& report, std::ostream& out);
/// Human-readable summary table.
std::string format_report_table(const CorpusReport& report);
/// "bucket count" lines for plotting the faces-per-part distribution.
void write_bucket_data(const CorpusReport& report, std::ostream& out);

}  // namespace brep
