#include "brep/hdf5_io.hpp"
#include "brep/synth.hpp"
#include "cli.hpp"
#include "support/tempdir.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

using namespace brep;
using brep::testing::TempDir;

namespace {

struct CliRun {
    int code;
    std::string out, err;
};

CliRun brep_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "brep");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::vector<double>> rows(const std::string& text, std::string* header = nullptr) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    if (header) *header = line;
    std::vector<std::vector<double>> out;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<double> r;
        double x;
        while (ls >> x) r.push_back(x);
        out.push_back(std::move(r));
    }
    return out;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        write_parts({synth::primitive_box(1, 1, 1)}, dir / "box.h5");
    }
    TempDir dir;
    std::string box() const { return (dir / "box.h5").string(); }
};

}  // namespace

TEST_F(Cli, NoSubcommandIsUsageError) {
    EXPECT_EQ(brep_cli({}).code, cli::kExitIo);
    EXPECT_EQ(brep_cli({"frobnicate"}).code, cli::kExitIo);
    EXPECT_EQ(brep_cli({"--help"}).code, cli::kExitOk);
}

TEST_F(Cli, ValidateExitCodes) {
    EXPECT_EQ(brep_cli({"validate", box()}).code, 0);
    const Part bad = synth::corrupt(synth::primitive_box(1, 1, 1), synth::Mutation::OpenLoop);
    WriteOptions raw;
    raw.validate = false;
    write_parts({bad}, dir / "bad.h5", raw);
    const CliRun r = brep_cli({"validate", box(), (dir / "bad.h5").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find(synth::mutation_target(synth::primitive_box(1, 1, 1), synth::Mutation::OpenLoop).path),
              std::string::npos)
        << r.out;
    EXPECT_EQ(brep_cli({"validate", (dir / "missing.h5").string()}).code, 2);
    EXPECT_EQ(brep_cli({"validate", box(), (dir / "missing.h5").string()}).code, 2);
    std::ofstream(dir / "junk.h5") << "junk";
    EXPECT_EQ(brep_cli({"validate", (dir / "junk.h5").string()}).code, 2);
}

TEST_F(Cli, InputExpansion) {
    std::filesystem::create_directories(dir / "sub" / "deep");
    write_parts({synth::primitive_torus(2, 1)}, dir / "sub" / "deep" / "t.h5");
    std::ofstream(dir / "sub" / "notes.txt") << "x";
    const auto walked = cli::expand_inputs({(dir / "sub").string()});
    ASSERT_EQ(walked.size(), 1u);
    EXPECT_EQ(walked[0].path.filename(), "t.h5");

    const auto globbed = cli::expand_inputs({(dir / "*.h5").string()});
    ASSERT_EQ(globbed.size(), 1u);
    EXPECT_TRUE(globbed[0].matched);

    const auto none = cli::expand_inputs({(dir / "*.nothing").string()});
    ASSERT_EQ(none.size(), 1u);
    EXPECT_FALSE(none[0].matched);
}

TEST_F(Cli, SampleNormalsOnBox) {
    const CliRun r = brep_cli({"sample", box(), "--task", "normals", "--samples", "1000"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::string header;
    const auto rs = rows(r.out, &header);
    EXPECT_EQ(header, "x y z nx ny nz");
    ASSERT_EQ(rs.size(), 1000u);
    for (const auto& row : rs) {
        ASSERT_EQ(row.size(), 6u);
        EXPECT_NEAR(std::hypot(row[3], row[4], row[5]), 1.0, 1e-12);
    }
}

TEST_F(Cli, SampleFeatureEdgeLabels) {
    const CliRun r = brep_cli({"sample", box(), "--task", "feature_edge", "--samples", "500"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::set<double> labels;
    for (const auto& row : rows(r.out)) labels.insert(row.at(3));
    EXPECT_EQ(labels, (std::set<double>{0.0, 1.0}));
}

TEST_F(Cli, SampleNoiseChangesPositions) {
    const CliRun a = brep_cli({"sample", box(), "--samples", "100"});
    const CliRun b = brep_cli({"sample", box(), "--samples", "100", "--sigma", "0.01"});
    ASSERT_EQ(a.code, 0);
    ASSERT_EQ(b.code, 0);
    const auto ra = rows(a.out), rb = rows(b.out);
    ASSERT_EQ(ra.size(), rb.size());
    std::size_t moved = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) moved += ra[i] != rb[i];
    EXPECT_EQ(moved, ra.size());
    EXPECT_EQ(brep_cli({"sample", box(), "--sigma", "-1"}).code, 2);
}

TEST_F(Cli, SampleDeterministicAcrossThreads) {
    const auto a = dir / "a.txt", b = dir / "b.txt", c = dir / "c.txt";
    ASSERT_EQ(brep_cli({"sample", box(), "--seed", "7", "--threads", "1", "--out", a.string()}).code, 0);
    ASSERT_EQ(brep_cli({"sample", box(), "--seed", "7", "--threads", "8", "--out", b.string()}).code, 0);
    ASSERT_EQ(brep_cli({"sample", box(), "--seed", "8", "--threads", "1", "--out", c.string()}).code, 0);
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_NE(slurp(a), slurp(c));
}

TEST_F(Cli, ThreadsFromEnvironment) {
    ::setenv(cli::kThreadsEnv, "4", 1);
    const CliRun env = brep_cli({"sample", box(), "--samples", "200"});
    ::unsetenv(cli::kThreadsEnv);
    const CliRun one = brep_cli({"sample", box(), "--samples", "200"});
    EXPECT_EQ(env.code, 0);
    EXPECT_EQ(env.out, one.out);
    ::setenv(cli::kThreadsEnv, "lots", 1);
    EXPECT_EQ(brep_cli({"sample", box(), "--samples", "10"}).code, 2);
    ::unsetenv(cli::kThreadsEnv);
}

TEST_F(Cli, SampleErrors) {
    EXPECT_EQ(brep_cli({"sample", box(), "--task", "bogus"}).code, 2);
    EXPECT_EQ(brep_cli({"sample", (dir / "missing.h5").string()}).code, 2);
    EXPECT_EQ(brep_cli({"sample", box(), "--samples", "0"}).code, 1);
}

TEST_F(Cli, StatsWritesReportAndPlotData) {
    write_parts({synth::primitive_cylinder_capped(1, 2)}, dir / "cyl.h5");
    const auto jl = dir / "r.jsonl", plot = dir / "p.txt";
    const CliRun r = brep_cli({"stats", box(), (dir / "cyl.h5").string(), "--out", jl.string(), "--plot", plot.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(slurp(jl));
    std::string line, last;
    while (std::getline(in, line)) last = line;
    const auto j = nlohmann::json::parse(last);
    EXPECT_EQ(j["surface_types"]["Plane"], 8);
    EXPECT_EQ(j["surface_types"]["Cylinder"], 1);
    EXPECT_NE(r.out.find("Plane"), std::string::npos);
    EXPECT_FALSE(slurp(plot).empty());
}

TEST_F(Cli, StatsEmptyCorpusSucceeds) {
    std::filesystem::create_directories(dir / "empty");
    const CliRun r = brep_cli({"stats", (dir / "empty").string()});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("faces 0"), std::string::npos);
}

TEST_F(Cli, StatsSubsetIsSeeded) {
    for (int k = 0; k < 6; ++k) write_parts({synth::primitive_box(1, 1, 1 + k)}, dir / ("f" + std::to_string(k) + ".h5"));
    const auto a = dir / "a.jsonl", b = dir / "b.jsonl";
    brep_cli({"stats", dir.path().string(), "--limit", "3", "--seed", "5", "--out", a.string()});
    brep_cli({"stats", dir.path().string(), "--limit", "3", "--seed", "5", "--out", b.string()});
    EXPECT_EQ(slurp(a), slurp(b));
}

TEST_F(Cli, MeshExport) {
    const auto obj = dir / "box.obj";
    const CliRun r = brep_cli({"mesh", box(), "--out", obj.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(slurp(obj));
    std::string line;
    std::size_t v = 0, f = 0;
    while (std::getline(in, line)) {
        v += line.rfind("v ", 0) == 0;
        f += line.rfind("f ", 0) == 0;
    }
    EXPECT_EQ(v, 8u);
    EXPECT_EQ(f, 12u);
}

TEST_F(Cli, MeshEmptyAndInvalid) {
    Part p = synth::primitive_box(1, 1, 1);
    for (auto& m : p.meshes) m = FaceMesh{};
    write_parts({p}, dir / "bare.h5");
    const auto obj = dir / "bare.obj";
    const CliRun r = brep_cli({"mesh", (dir / "bare.h5").string(), "--out", obj.string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("warning"), std::string::npos);
    EXPECT_TRUE(std::filesystem::exists(obj));
    EXPECT_EQ(std::filesystem::file_size(obj), 0u);

    std::ofstream(dir / "junk.h5") << "junk";
    EXPECT_EQ(brep_cli({"mesh", (dir / "junk.h5").string()}).code, 2);
}

TEST_F(Cli, FixturesValidateAndAreDeterministic) {
    const auto a = dir / "a", b = dir / "b";
    const CliRun ra = brep_cli({"fixtures", "--out", a.string(), "--with-corrupt"});
    ASSERT_EQ(ra.code, 0) << ra.err;
    ASSERT_EQ(brep_cli({"fixtures", "--out", b.string(), "--with-corrupt"}).code, 0);
    std::size_t clean = 0, corrupt = 0;
    for (const auto& e : std::filesystem::directory_iterator(a)) {
        const auto name = e.path().filename().string();
        EXPECT_EQ(slurp(e.path()), slurp(b / name)) << name;
        const int code = brep_cli({"validate", e.path().string()}).code;
        if (name.rfind("corrupt_", 0) == 0) {
            ++corrupt;
            EXPECT_EQ(code, 1) << name;
        } else {
            ++clean;
            EXPECT_EQ(code, 0) << name;
        }
    }
    EXPECT_GE(clean, 5u);
    EXPECT_EQ(corrupt, synth::all_mutations().size());
}
