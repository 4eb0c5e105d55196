#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "todalab/bounds.hpp"
#include "todalab/ghs.hpp"
#include "todalab/hierarchy.hpp"
#include "todalab/integrator.hpp"
#include "todalab/perturbation.hpp"
#include "todalab/sensitivity.hpp"
#include "todalab/soliton.hpp"

namespace todalab {

enum class Scenario {
  kTodaLightcone,
  kSolitonValidate,
  kHierarchy,
  kPerturbed,
  kInterpolation,
  kTimedep,
  kObservables,
  kGhs,
};

std::string scenario_name(Scenario s);

enum class InitialKind { kBackground, kSoliton, kRandom, kCsv };

struct ExperimentConfig {
  Scenario scenario = Scenario::kTodaLightcone;
  long window = 401;
  int guard = 20;
  double t_final = 5.0;
  double sample_dt = 0.05;
  std::vector<Seed> seeds{{0, Coord::kB}};
  std::optional<double> mu;  // empty: optimal
  double epsilon = 0.1;
  std::uint64_t random_seed = 42;
  double envelope_scale = 1.0;
  double front_threshold = 1e-8;
  double conservation_tolerance = 1e-6;
  bool use_hierarchy = false;  // perturbed / interpolation with the order-r flow
  HierarchyVelocityMode hierarchy_mode = HierarchyVelocityMode::kMatrixNorm;
  IntegratorConfig integrator;

  InitialKind initial = InitialKind::kBackground;
  std::string initial_csv;

  std::optional<SolitonSpec> soliton;
  std::optional<HierarchySpec> hierarchy;
  std::optional<PerturbationSpec> perturbation;
  std::optional<PotentialSpec> potential;
  double random_amplitude = 0.1;
  int random_width = 10;

  std::string base_dir;  // relative CSV paths resolve against this
};

// Parses a JSON config. Absent top-level fields take defaults; a block that is
// present must be complete. Errors carry `origin:line: field 'path': ...`.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>");

std::string default_config_json();
std::string config_to_json(const ExperimentConfig& cfg);

struct RunOutcome {
  int exit_code = 0;         // 0 pass, 1 verification failure, 2 config error
  std::string summary_json;  // empty for config errors
  std::string message;       // first violation or error text
};

// Runs one experiment and writes artifacts into out_dir (skipped when empty).
RunOutcome run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

// Parses and runs; config problems become exit code 2.
RunOutcome run_config_text(const std::string& text, const std::string& origin,
                           const std::string& out_dir);

// Sweeps one numeric field (alias kappa, w0, beta, mu or a dotted path) over
// the values, running jobs in parallel. summary_json is an array ordered as
// `values`; the exit code is the largest job exit code.
RunOutcome run_sweep_text(const std::string& text, const std::string& origin,
                          const std::string& axis, const std::vector<double>& values,
                          const std::string& out_dir, unsigned jobs = 0);

}  // namespace todalab
