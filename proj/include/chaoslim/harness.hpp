#pragma once

// Experiment orchestration: configs, seeded samplers, convergence studies,
// the Lindeberg audit and report emission.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chaoslim/chaos_core.hpp"
#include "chaoslim/disorder.hpp"
#include "chaoslim/pinning.hpp"
#include "chaoslim/polymer.hpp"

namespace chaoslim {

using Json = nlohmann::json;

/// Worker count: CHAOSLIM_THREADS if set and positive, else the hardware
/// concurrency.
std::size_t worker_count();

/// out[i] = fn(i) for i < n, evaluated on the worker pool.
std::vector<double> parallel_map(std::size_t n, const std::function<double(std::size_t)>& fn);

struct ExperimentConfig {
  std::string model;
  Json params = Json::object();
  std::vector<double> grid;
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  std::string csv_path;
  std::string json_path;

  /// Validates model name, grid monotonicity and sample counts.
  static ExperimentConfig from_json(const Json& j);
};

struct ReportRow {
  double grid;
  /// formula-exact, DP-exact or MC-with-CI.
  std::string provenance;
  std::map<std::string, double> values;
};

struct Verdict {
  std::string name;
  bool passed;
  std::string tolerance;
  std::string detail;
  /// The threshold is a calibration choice, not a theorem-backed constant.
  bool calibration = false;
};

struct ComparisonReport {
  std::string model;
  std::vector<ReportRow> rows;
  std::vector<Verdict> verdicts;

  bool all_passed() const;
  Json to_json() const;
  void write_csv(std::ostream& out) const;
};

// ---------------------------------------------------------------------------
// Samplers. Sample s of a run with key `seed` uses the stream derive_seed(seed, s).

struct PinningSample {
  std::uint64_t seed;
  double z;
};

std::vector<PinningSample> sample_pinning(const RenewalLaw& law, const DisorderLaw& disorder,
                                          std::size_t n, double beta_hat, double h_hat,
                                          PinMode mode, std::size_t samples, std::uint64_t seed);

struct PolymerSample {
  std::uint64_t seed;
  double z;
};

std::vector<PolymerSample> sample_polymer(const WalkLaw& walk, const DisorderLaw& disorder,
                                          std::size_t n, double beta_hat, PolymerMode mode,
                                          std::optional<std::int64_t> endpoint,
                                          std::size_t samples, std::uint64_t seed);

// ---------------------------------------------------------------------------

struct LindebergAudit {
  double distance;   ///< |mean f(Ψ(ζ)) − mean f(Ψ(ξ))|
  double std_error;
  double ci_upper;   ///< distance + z_{99%}·SE
  double bound;
  bool passed;
};

/// Audits |E f(Ψ(ζ)) − E f(Ψ(ξ))| ≤ bound for f = cos (C_f = 1) with
/// degree-ℓ truncation of the kernel. Laws are named "gaussian" or "rademacher".
LindebergAudit lindeberg_audit(const Kernel& kernel, const std::string& law_a,
                               const std::string& law_b, std::size_t samples, std::uint64_t seed,
                               double threshold = kInfinity);

/// Kernel ψ({i}) = 1/√n on sites 1..n.
Kernel degree_one_kernel(std::size_t n);

RenewalLaw renewal_from_params(const Json& params, std::size_t n_max);
WalkLaw walk_from_params(const Json& params);
PinMode pin_mode_from_name(const std::string& name);
PolymerMode polymer_mode_from_name(const std::string& name);

/// Runs the study described by `config` and writes the configured outputs.
ComparisonReport run_convergence_study(const ExperimentConfig& config);

}  // namespace chaoslim
