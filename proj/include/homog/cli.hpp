#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "homog/verify.hpp"

namespace homog {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitPass = 0, kExitProperty = 1, kExitConfig = 2, kExitSolver = 3 };

struct RunConfig {
  /// Builtin "constant(...)", "laminate(a,b)", "checkerboard(a,b)", "smooth(c)" or "file:<header>".
  std::string coefficients = "laminate(1,2)";
  std::size_t d = 2;
  std::size_t n = 64;
  int m_max = 6;
  SolveOptions solver;
  std::filesystem::path output_dir = "homog-out";
  /// Existing corrector manifest to reuse instead of solving.
  std::optional<std::filesystem::path> table;
  ScalingConfig study;
  bool minimal_scale = false;
  /// verify: identity tolerance (default: the table's own schedule).
  std::optional<double> identity_tol;
  double residual_ratio_min = 1.7;
  int verify_degree = 4;

  /// Raises ConfigError on any invariant violation; resolves nothing on disk.
  void validate() const;
};

/// key = value lines, '#' comments. Relative paths resolve against the file's directory.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& file);

CoefficientField make_coefficients(const RunConfig& cfg);

int cmd_correctors(const RunConfig& cfg, std::ostream& out);
int cmd_study(const RunConfig& cfg, std::ostream& out, bool negative_control = false);
int cmd_verify(const RunConfig& cfg, std::ostream& out, bool negative_control = false);

/// Wraps a command: maps exceptions to exit codes and prints them to err.
int run_guarded(const std::function<int()>& fn, std::ostream& err);

}  // namespace homog
