#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "borelsum/cauchy.hpp"
#include "borelsum/errors.hpp"

namespace borelsum {

// Tool-level configuration.  Values come from defaults, then an optional JSON
// config file, then BORELSUM_* environment overrides, then command flags.
struct RunConfig {
  int order = 32;
  int maxdeg = 6;
  int pade_num = -1;  // -1 selects (order-1)/2
  int pade_den = -1;
  double tail_cut = 1e-16;
  double quad_tol = 1e-6;
  double direction_guard = 0.05;
  double froissart_rel = 1e-10;
  int threads = 1;
  std::string out_dir = ".";

  void validate() const;
  ResumOptions resum_options() const;
};

RunConfig load_config(const std::string& path);
void apply_env_overrides(RunConfig& cfg);

// Canonical serialization (sorted keys, round-trip floats) and its FNV-1a
// 64-bit hash as 16 hex digits; every CSV row carries the hash so reruns are
// attributable to an exact configuration.
std::string serialize_config(const RunConfig& cfg);
std::string config_hash(const RunConfig& cfg);

struct ProblemBundle {
  CauchyProblem problem;
  MultiLevel ml;
};

// JSON problem files: fields m, n_space, initial (one monomial map per
// unknown), terms (list of {i, alpha, A, t_coeffs}), levels {ks, thetas}.
// Monomial maps use comma-joined exponent keys; values are numbers or
// [re, im] pairs.  n_space = 0 is extended to one dummy space variable.
// The multidirection condition is validated at load.
ProblemBundle load_problem(const std::string& path);
void save_problem(const std::string& path, const ProblemBundle& b);

// t values for the resum table: JSON {"t": [...], "x": [[...], ...]} where
// complex entries are [re, im] pairs and reals are accepted directly.  The x
// list is optional (default: the origin).
struct PointSet {
  std::vector<cplx> t;
  std::vector<std::vector<cplx>> x;
};
PointSet load_points(const std::string& path, int n_space);
PointSet default_points(int n_space);

void write_solution_csv(std::ostream& os, const SolutionTable& table,
                        const std::string& cfg_hash);

// Full command dispatcher used by the borelsum binary.  Returns the process
// exit code: 0 success, 2 input/validation failure, 3 numeric failure.  On
// failure a single-line JSON error record is written to stderr.
int run_cli(int argc, char** argv);

}  // namespace borelsum
