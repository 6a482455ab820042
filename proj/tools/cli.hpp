#pragma once

// The `brep` command line: validate, sample, stats, mesh and fixtures.
//
// Exit codes: 0 success, 1 invariant violations or empty result, 2 I/O,
// format or usage errors.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace brep::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitIo = 2;

/// Environment variable holding the default --threads value.
inline constexpr const char* kThreadsEnv = "BREP_THREADS";

struct InputFile {
    std::filesystem::path path;
    std::string pattern;  // argument it came from
    bool matched = true;  // false: glob or path matched nothing
};

/// Globs are expanded (sorted), directories are walked recursively for
/// .h5/.hdf5 files (sorted), other arguments are taken as given.
std::vector<InputFile> expand_inputs(const std::vector<std::string>& args);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace brep::cli
