#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "karlin/geometry.hpp"
#include "karlin/process.hpp"

namespace karlin::verify {

enum class Suite {
  kSibuya,
  kStable,
  kOccupancy,
  kRsm,
  kRegime,
  kPoissonization,
};

std::string suite_name(Suite suite);
Suite suite_from_name(const std::string& name);  // throws on unknown name

// One verification experiment. Zero-valued counts mean "suite default";
// resolved values are echoed into the report. `threads` is execution advice
// only (results are independent of it) and is not part of the config echo.
struct ExperimentConfig {
  Suite suite = Suite::kSibuya;
  process::ModelParams params =
      process::ModelParams::standard(1.0, 2.0, 0.5);
  std::uint64_t n = 0;            // path length (0 -> suite default)
  double lambda = 0.0;            // Poisson intensity (0 -> n)
  std::uint64_t reps = 0;         // Monte Carlo replications
  std::uint64_t realizations = 0; // limit-measure / sampler draw count
  std::vector<geometry::Box> boxes;  // empty -> suite default
  std::uint64_t seed = 1;
  int threads = 0;                // 0 -> library default
  double ks_tolerance = 0.0;      // 0 -> per-test default, else override
  std::string expected_regime;    // "", or one of noise|signal|critical

  void validate() const;  // throws std::invalid_argument on bad combinations
  nlohmann::ordered_json to_json() const;  // resolved, deterministic echo
  static ExperimentConfig from_json(const nlohmann::json& j);
};

// One comparison inside a report. Two verdict styles share the record:
//  - target-style: pass iff |statistic - target| <= tolerance;
//  - threshold-style (target carried as 0 with level > 0): pass iff
//    statistic <= tolerance, where tolerance is the critical value at
//    significance `level` and p_value is the attained level.
// p_value = -1 marks fixed-tolerance engineering checks with no p-value.
struct TestRecord {
  std::string name;
  std::string detail;
  double statistic = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  double mc_stderr = 0.0;
  double p_value = -1.0;
  double level = 0.0;
  bool pass = false;
};

// Empirical-vs-target CDF table for CSV export (`z, F_emp, F_target`).
struct CdfTable {
  std::string name;
  std::vector<std::array<double, 3>> rows;
};

struct VerificationReport {
  std::string suite;
  nlohmann::ordered_json config;  // resolved ExperimentConfig echo
  std::uint64_t seed = 0;
  std::string version;
  double normalizer_value = 0.0;     // regime/poissonization suites
  double normalizer_residual = 0.0;
  std::vector<TestRecord> records;
  std::vector<CdfTable> cdf_tables;
  bool all_pass = false;
  bool bonferroni_pass = false;
  double bonferroni_level = 0.01;
  // Volatile fields, isolated in the JSON under a single "timestamp" key.
  std::string generated_at;
  double runtime_seconds = 0.0;

  // Deterministic part: same config + seed -> byte-identical dump.
  nlohmann::ordered_json core_json() const;
  // Full report: core plus the isolated volatile "timestamp" object.
  nlohmann::ordered_json to_json() const;
};

// Dispatch on cfg.suite. Runs replications on an internal worker pool (one
// RNG stream per replication, order-independent aggregation), so the report
// does not depend on thread count or scheduling.
VerificationReport run_experiment(const ExperimentConfig& cfg);

VerificationReport run_sibuya_experiment(const ExperimentConfig& cfg);
VerificationReport run_stable_experiment(const ExperimentConfig& cfg);
VerificationReport run_occupancy_experiment(const ExperimentConfig& cfg);
VerificationReport run_rsm_experiment(const ExperimentConfig& cfg);
VerificationReport run_regime_experiment(const ExperimentConfig& cfg);
VerificationReport run_poissonization_experiment(const ExperimentConfig& cfg);

void write_report_json(const VerificationReport& report, std::ostream& out);

}  // namespace karlin::verify
