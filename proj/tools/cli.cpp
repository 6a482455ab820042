#include "cli.hpp"

#include "brep/errors.hpp"
#include "brep/hdf5_io.hpp"
#include "brep/mesh_utils.hpp"
#include "brep/sampler.hpp"
#include "brep/stats.hpp"
#include "brep/synth.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>
#include <fmt/format.h>

#include <glob.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

namespace brep::cli {

namespace fs = std::filesystem;

namespace {

bool has_glob_chars(const std::string& s) { return s.find_first_of("*?[") != std::string::npos; }

bool is_part_file(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".h5" || ext == ".hdf5";
}

unsigned resolve_threads(unsigned requested) {
    return requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
}

template <class F>
void parallel_each(std::size_t n, unsigned threads, F&& f) {
    threads = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), n));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) f(i);
    };
    if (threads <= 1) return work();
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(work);
    for (auto& t : pool) t.join();
}

// Writes to --out when given, else to the command's stdout.
class Output {
public:
    Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (path.empty()) return;
        file_.open(path, std::ios::binary | std::ios::trunc);
        if (!file_) throw IoError(fmt::format("cannot write {}", path));
        stream_ = &file_;
    }
    std::ostream& operator*() { return *stream_; }
    void finish(const std::string& path) {
        stream_->flush();
        if (!*stream_) throw IoError(fmt::format("write failed: {}", path.empty() ? "<stdout>" : path));
    }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

struct Options {
    std::vector<std::string> inputs;
    std::string out;
    std::uint64_t seed = 0;
    std::size_t samples = 1000;
    std::string task = "points";
    double sigma = 0.0;
    unsigned threads = 1;
    std::optional<std::size_t> limit;
    std::string plot;
    bool with_corrupt = false;
};

std::vector<fs::path> matched_paths(const std::vector<InputFile>& files, std::ostream& err, bool& missing) {
    std::vector<fs::path> out;
    for (const InputFile& f : files) {
        if (f.matched) out.push_back(f.path);
        else {
            err << fmt::format("{}: no such file\n", f.pattern);
            missing = true;
        }
    }
    return out;
}

std::vector<Part> read_all(const std::vector<fs::path>& paths) {
    std::vector<Part> parts;
    for (const auto& p : paths) {
        auto more = read_parts(p);
        std::move(more.begin(), more.end(), std::back_inserter(parts));
    }
    return parts;
}

// ---------------------------------------------------------------------------

int cmd_validate(const Options& o, std::ostream& out, std::ostream&) {
    const auto files = expand_inputs(o.inputs);
    if (files.empty()) {
        out << "no input files\n";
        return kExitIo;
    }
    std::vector<std::string> text(files.size());
    std::vector<int> codes(files.size());
    parallel_each(files.size(), o.threads, [&](std::size_t i) {
        const InputFile& f = files[i];
        if (!f.matched) {
            text[i] = fmt::format("{}: error: no such file\n", f.pattern);
            codes[i] = kExitIo;
            return;
        }
        const FileReport r = validate_file(f.path);
        std::string s;
        std::size_t errors = 0, warnings = 0;
        for (const auto& p : r.parts)
            for (const auto& v : p.violations) (v.severity == Severity::Error ? errors : warnings)++;
        const std::string name = f.path.string();
        if (r.clean())
            s += fmt::format("{}: OK ({} parts{})\n", name, r.parts.size(),
                             warnings ? fmt::format(", {} warnings", warnings) : "");
        else if (r.exit_code() == kExitIo)
            s += fmt::format("{}: unreadable\n", name);
        else
            s += fmt::format("{}: {} violations\n", name, errors);
        for (const auto& e : r.errors) s += fmt::format("  error: {}\n", e);
        for (const auto& p : r.parts)
            for (const auto& v : p.violations)
                s += fmt::format("  {}: {}/{}: {}: {}\n", v.severity == Severity::Error ? "error" : "warning",
                                 p.group, v.path, violation_kind_name(v.kind), v.message);
        text[i] = std::move(s);
        codes[i] = r.exit_code();
    });
    for (const auto& s : text) out << s;
    return *std::max_element(codes.begin(), codes.end());
}

int cmd_sample(const Options& o, std::ostream& out, std::ostream& err) {
    bool missing = false;
    const auto paths = matched_paths(expand_inputs(o.inputs), err, missing);
    if (missing) return kExitIo;
    if (paths.empty()) {
        err << "no input files\n";
        return kExitIo;
    }
    const BuiltinCallback& task = builtin_callback(o.task);
    const std::vector<Part> parts = read_all(paths);

    SamplerConfig cfg;
    cfg.seed = o.seed;
    cfg.num_samples = o.samples;
    cfg.include_edges = task.wants_edges;
    cfg.threads = resolve_threads(o.threads);
    const SampleResult res = sample_parts(parts, task.callback, cfg);
    for (const auto& w : res.warnings)
        err << fmt::format("warning: part {} {} {}: {}\n", w.part, w.kind == TopoKind::Face ? "face" : "edge",
                           w.index, w.message);

    std::vector<Vec3> pos = res.positions();
    if (o.sigma > 0) pos = add_noise(pos, o.sigma, o.seed);

    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "x y z");
    for (const auto& c : task.columns) fmt::format_to(std::back_inserter(buf), " {}", c);
    buf.push_back('\n');
    const std::size_t w = res.payload_width;
    for (std::size_t i = 0; i < pos.size(); ++i) {
        fmt::format_to(std::back_inserter(buf), "{:.17g} {:.17g} {:.17g}", pos[i].x(), pos[i].y(), pos[i].z());
        for (std::size_t k = 0; k < w; ++k)
            fmt::format_to(std::back_inserter(buf), " {:.17g}", res.payloads[i * w + k]);
        buf.push_back('\n');
    }
    Output dst(o.out, out);
    (*dst).write(buf.data(), static_cast<std::streamsize>(buf.size()));
    dst.finish(o.out);
    if (pos.empty()) {
        err << "no points produced\n";
        return kExitDomain;
    }
    return kExitOk;
}

int cmd_stats(const Options& o, std::ostream& out, std::ostream&) {
    std::vector<fs::path> paths;
    for (const InputFile& f : expand_inputs(o.inputs)) paths.push_back(f.matched ? f.path : fs::path(f.pattern));
    const CorpusReport r = corpus_stats(paths, o.limit, o.seed, resolve_threads(o.threads));
    if (!o.out.empty()) {
        Output dst(o.out, out);
        write_report_jsonl(r, *dst);
        dst.finish(o.out);
    }
    if (!o.plot.empty()) {
        Output dst(o.plot, out);
        write_bucket_data(r, *dst);
        dst.finish(o.plot);
    }
    out << format_report_table(r);
    return kExitOk;
}

int cmd_mesh(const Options& o, std::ostream& out, std::ostream& err) {
    bool missing = false;
    const auto paths = matched_paths(expand_inputs(o.inputs), err, missing);
    if (missing) return kExitIo;
    if (paths.empty()) {
        err << "no input files\n";
        return kExitIo;
    }
    const TriangleMesh mesh = get_mesh(read_all(paths));
    Output dst(o.out, out);
    write_obj(mesh, *dst);
    dst.finish(o.out);
    if (mesh.dropped_triangles)
        err << fmt::format("warning: dropped {} triangles with invalid indices\n", mesh.dropped_triangles);
    if (mesh.triangles.empty()) {
        err << "warning: no mesh triangles in input\n";
        return kExitDomain;
    }
    err << fmt::format("{} vertices, {} triangles\n", mesh.vertices.size(), mesh.triangles.size());
    return kExitOk;
}

int cmd_fixtures(const Options& o, std::ostream& out, std::ostream&) {
    const fs::path dir = o.out.empty() ? fs::path("fixtures") : fs::path(o.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
    const auto fixtures = synth::standard_fixtures(o.seed);
    for (const auto& fx : fixtures) {
        const fs::path p = dir / (fx.name + ".h5");
        write_parts({fx.part}, p);
        out << p.string() << '\n';
    }
    if (!o.with_corrupt) return kExitOk;
    WriteOptions raw;
    raw.validate = false;
    for (synth::Mutation m : synth::all_mutations()) {
        // First fixture the mutation applies to.
        for (const auto& fx : fixtures) {
            Part bad;
            try {
                bad = synth::corrupt(fx.part, m);
            } catch (const UnknownMutation&) {
                throw;
            } catch (const Error&) {
                continue;
            }
            const fs::path p = dir / fmt::format("corrupt_{}.h5", synth::mutation_name(m));
            write_parts({bad}, p, raw);
            out << p.string() << '\n';
            break;
        }
    }
    return kExitOk;
}

}  // namespace

std::vector<InputFile> expand_inputs(const std::vector<std::string>& args) {
    std::vector<InputFile> out;
    for (const std::string& a : args) {
        if (has_glob_chars(a) && !fs::exists(a)) {
            glob_t g{};
            const int rc = ::glob(a.c_str(), 0, nullptr, &g);
            std::vector<fs::path> hits;
            if (rc == 0)
                for (std::size_t i = 0; i < g.gl_pathc; ++i) hits.emplace_back(g.gl_pathv[i]);
            ::globfree(&g);
            std::sort(hits.begin(), hits.end());
            if (hits.empty()) out.push_back({a, a, false});
            for (auto& h : hits) {
                if (fs::is_directory(h)) {
                    auto sub = expand_inputs({h.string()});
                    for (auto& s : sub) s.pattern = a;
                    out.insert(out.end(), sub.begin(), sub.end());
                } else {
                    out.push_back({std::move(h), a, true});
                }
            }
        } else if (fs::is_directory(a)) {
            std::vector<fs::path> hits;
            for (const auto& e : fs::recursive_directory_iterator(a, fs::directory_options::skip_permission_denied))
                if (e.is_regular_file() && is_part_file(e.path())) hits.push_back(e.path());
            std::sort(hits.begin(), hits.end());
            for (auto& h : hits) out.push_back({std::move(h), a, true});
        } else {
            out.push_back({a, a, fs::exists(a)});
        }
    }
    return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Read, check, sample and summarize B-rep part files."};
    app.name("brep");
    app.require_subcommand(1, 1);
    Options o;

    auto add_threads = [&](CLI::App* sc) {
        sc->add_option("--threads", o.threads, "Worker threads, 0 = all cores")
            ->envname(kThreadsEnv)
            ->capture_default_str();
    };
    auto add_seed = [&](CLI::App* sc) { sc->add_option("--seed", o.seed, "Random seed")->capture_default_str(); };

    auto* validate = app.add_subcommand("validate", "Check files against the format and part invariants");
    validate->add_option("paths", o.inputs, "Files, directories or globs")->required();
    add_threads(validate);

    std::vector<std::string> task_names;
    for (const auto& b : builtin_callbacks()) task_names.push_back(b.name);
    auto* sample = app.add_subcommand("sample", "Write a point cloud sampled from the parts");
    sample->add_option("paths", o.inputs, "Part files")->required();
    sample->add_option("--task", o.task, "Per-point data")->check(CLI::IsMember(task_names))->capture_default_str();
    sample->add_option("--samples", o.samples, "Number of points")->capture_default_str();
    sample->add_option("--sigma", o.sigma, "Gaussian noise, relative to the bounding-box diagonal")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sample->add_option("--out", o.out, "Output file (default stdout)");
    add_seed(sample);
    add_threads(sample);

    auto* stats = app.add_subcommand("stats", "Corpus statistics");
    stats->add_option("paths", o.inputs, "Files, directories or globs");
    stats->add_option("--limit", o.limit, "Use a random subset of this many files");
    stats->add_option("--out", o.out, "JSON-lines report file");
    stats->add_option("--plot", o.plot, "Faces-per-part bucket data file");
    add_seed(stats);
    add_threads(stats);

    auto* mesh = app.add_subcommand("mesh", "Export the stored meshes as one welded OBJ");
    mesh->add_option("paths", o.inputs, "Part files")->required();
    mesh->add_option("--out", o.out, "Output OBJ (default stdout)");

    auto* fixtures = app.add_subcommand("fixtures", "Write the synthetic fixture files");
    fixtures->add_option("--out", o.out, "Output directory")->capture_default_str();
    fixtures->add_flag("--with-corrupt", o.with_corrupt, "Also write one corrupted file per mutation");
    add_seed(fixtures);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? kExitOk : kExitIo;
    }

    try {
        if (validate->parsed()) return cmd_validate(o, out, err);
        if (sample->parsed()) return cmd_sample(o, out, err);
        if (stats->parsed()) return cmd_stats(o, out, err);
        if (mesh->parsed()) return cmd_mesh(o, out, err);
        if (fixtures->parsed()) return cmd_fixtures(o, out, err);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitIo;
}

}  // namespace brep::cli
