#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cartanflow::cli {

inline constexpr const char* kToolName = "cartanflow";
inline constexpr const char* kToolVersion = "0.1.0";

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitValidation = 2,
  kExitConsistency = 3,
};

/// Runs one command line (without the program name). Data goes to `out` or to
/// the --out file, diagnostics to `err` as a single JSON line
///   {"error": "<category>", "message": "..."}
/// Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker count from --threads, else CARTANFLOW_THREADS, else 1. Throws
/// ValidationError for values below 1 or unparsable environment values.
int resolve_threads(std::optional<int> flag_value);

/// Writes `content` to `path` through a sibling temporary file and a rename,
/// so readers never observe a partial file.
void write_file_atomically(const std::string& path, const std::string& content);

}  // namespace cartanflow::cli
