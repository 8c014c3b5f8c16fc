#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "odepth/io.hpp"

namespace odepth::cli {

enum ExitCode : int {
  kOk = 0,
  kModuleError = 1,
  kUsage = 2,
  kUndetermined = 3,
  kResourceCap = 4,
};

struct RunConfig {
  std::string command;
  std::string input;  // instance, system or paths file
  std::string forms;  // chen only
  std::string fixture;
  std::string output;
  std::string csv;
  int kmax = 6;
  bool kmax_set = false;
  std::string mode;
  int order = 4;
  double tol = 1e-10;      // quadrature / transport
  double ode_tol = 1e-12;  // return map
  double join_tol = 1e-9;
  double pole_margin = 1e-3;
  double check_tol = 1e-8;
  std::string t_grid;
  std::string eps_grid = "0.02:0.5:8";
  int threads = 1;
  unsigned long long seed = 1;
  int samples = 100;
  int random_words = 0;
  int random_length = 4;

  /// Throws SchemaError on non-positive tolerances, kmax < 2 and the like.
  void validate() const;
};

/// Runs the command line; output goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int run_depth(const RunConfig& config, std::ostream& out);
int run_chen(const RunConfig& config, std::ostream& out);
int run_melnikov(const RunConfig& config, std::ostream& out);

/// Human-readable catalog listing; identical on every run.
std::string examples_listing();
io::json examples_json();
/// Input documents of the bundled fixtures as (file name, document).
std::vector<std::pair<std::string, io::json>> fixture_documents();

/// "a:b:m" -> m evenly spaced values from a to b.
std::vector<double> parse_linear_grid(const std::string& spec);
/// "e0:r:k" -> e0, e0 r, ..., e0 r^(k-1).
std::vector<double> parse_geometric_grid(const std::string& spec);

}  // namespace odepth::cli
