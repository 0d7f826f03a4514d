#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "oplab/generator.hpp"
#include "oplab/operator_core.hpp"

namespace oplab {

struct Tolerances {
  double quadrature = 1e-8;
  double residual = 1e-8;
  double fd_step = 1e-4;
};

struct SuiteConfig {
  unsigned seed = 1;
  std::vector<int> dims{2, 4};
  int n_instances = 3;
  double gap = 0.5;
  std::string battery_kind = "default";  // default|resolvent_powers|lower_poles|disk_polys|mixed
  int battery_count = 0;                 // used for non-default kinds
  Tolerances tol;
  std::vector<std::string> suites{"core",  "funcalc", "semispectral",
                                  "doi",   "shift",   "multiplier"};
  int workers = 0;  // 0 = library default
  std::string out_dir = "out";

  void validate() const;  // throws ConfigError
  static SuiteConfig from_file(const std::string& path);
  // every config key is overridable by a same-named CLI flag; the CLI layer
  // applies overrides after from_file.
  nlohmann::json to_json() const;
};

struct CheckResult {
  std::string name;       // suite/check id
  std::string coord;      // seed/dim/function coordinates
  double value = 0.0;     // observed residual or margin
  double tol = 0.0;
  bool pass = true;
  std::string repro;      // command line reproducing the instance
};

struct SuiteStats {
  int pass = 0;
  int fail = 0;
  double worst = 0.0;
  std::string worst_coord;
};

struct Report {
  nlohmann::json config_echo;
  std::map<std::string, SuiteStats> suites;
  std::vector<CheckResult> failures;
  double total_seconds = 0.0;
  std::string version;

  bool ok() const { return failures.empty(); }
  nlohmann::json to_json() const;  // timing isolated under the "timing" key
};

Report run_suite(const SuiteConfig& config);

// Writes xi.csv (s, re_xi, im_xi) and xi_summary.json under config.out_dir;
// returns the summary. pair generated from (config.seed, dim, kind).
nlohmann::json xi_command(const SuiteConfig& config, int dim, PairKind kind,
                          int s_points = 201, double s_span = 50.0);

// Row-major re/im hex-float dump for replay; one matrix per block.
void write_matrix_artifact(std::ostream& os, const std::string& label,
                           const CMat& m);

inline constexpr const char* kArtifactVersion = "oplab-1.0.0";

}  // namespace oplab
