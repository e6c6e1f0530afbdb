// Copyright 2026 The Unlearn-DP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Batch experiments on the hard instance: deletion-capacity sweeps, constant
// and slope fits, and the capacity contract on held-out grid points.

#ifndef UNLEARN_EXPERIMENTS_H_
#define UNLEARN_EXPERIMENTS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "unlearn/accountant.h"
#include "unlearn/unlearning.h"

namespace unlearn {

// Grid and run settings. Text form: one `key = value` per line, lists
// comma-separated, `#` starts a comment. Keys are the field names below
// (`eps` is accepted for `epsilon`).
struct ExperimentConfig {
  std::vector<int64_t> n = {256, 1024};
  std::vector<int64_t> d = {2, 8, 32};
  // m = 0 is the non-private baseline: no deletions, no noise.
  std::vector<int64_t> m = {0, 1, 2, 4, 8};
  std::vector<double> epsilon = {1.0, 2.0};
  std::vector<double> delta = {1e-5};
  std::vector<double> alpha = {0.1};
  int64_t seeds = 200;
  uint64_t seed = 0;
  CapacityRegime regime = CapacityRegime::kApproxConvexFloor;
  // Gradient steps; 0 selects round(steps_factor * n^2).
  int64_t steps = 0;
  double steps_factor = 1.0 / 16.0;
  // Coordinate bias of the hard-instance distribution.
  double bias = 0.75;
  // Constant used for the recorded capacity prediction.
  double capacity_constant = 1.0;
  // Audit trials per grid point with m >= 1; 0 disables auditing.
  int64_t audit_trials = 0;
  std::string output_dir;
};

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(absl::string_view text);
absl::StatusOr<ExperimentConfig> ReadExperimentConfig(const std::string& path);
std::string ExperimentConfigToText(const ExperimentConfig& config);
absl::Status ValidateExperimentConfig(const ExperimentConfig& config);

// Gradient steps used at training-set size n.
int64_t StepsFor(const ExperimentConfig& config, int64_t n);

struct SweepRecord {
  int64_t n = 0;
  int64_t d = 0;
  int64_t m = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  double alpha = 0.0;
  int64_t seeds = 0;
  int64_t steps = 0;
  // Excess empirical loss on S \ U of the unlearned model.
  double mean_excess_empirical = 0.0;
  double se_excess_empirical = 0.0;
  // Closed-form population excess risk of the unlearned model.
  double mean_population_risk = 0.0;
  double se_population_risk = 0.0;
  // Seed-paired risk difference against the m = 0 baseline on the same
  // datasets; absent when the config has no m = 0 column.
  std::optional<double> privacy_term;
  std::optional<double> se_privacy_term;
  int64_t predicted_capacity = 0;
  bool within_alpha = false;
  std::optional<double> audit_epsilon;
  // Nonempty when the grid point failed; the sweep continues.
  std::string error;

  bool ok() const { return error.empty(); }
};

struct SweepResult {
  ExperimentConfig config;
  std::vector<SweepRecord> records;
};

// Runs every grid point with noisy gradient descent on the hard-instance
// linear loss: generate the hard instance, learn with budget
// (epsilon, delta) and group size m, delete the m most aligned points,
// unlearn lazily and measure the risks. Grid order is n, d, m, epsilon,
// delta, alpha (last fastest). Bitwise reproducible from the config.
absl::StatusOr<SweepResult> RunCapacitySweep(const ExperimentConfig& config);

// The regime's deletion-term feature: m sqrt(d ln(1/delta)) / (n epsilon)
// for approximate regimes, m d / (n epsilon) for pure ones.
absl::StatusOr<double> CapacityFeature(CapacityRegime regime,
                                       const SweepRecord& record);

// A record is privacy dominated when its privacy term is at least twice the
// baseline risk and its mean risk is at most 0.1 (the unsaturated range).
bool PrivacyDominated(const SweepRecord& record);

struct ConstantFit {
  // Least-squares constant.
  double constant = 0.0;
  // Smallest C with mean risk <= C x at every fitted point: the constant
  // for capacity predictions that must bound the risk, not track it.
  double envelope = 0.0;
  // Root mean square of (y - C x) / (C x) over the fitted points.
  double relative_rms = 0.0;
  std::vector<double> residuals;
  int64_t points = 0;
};

// Least-squares C in y = C x through the origin, where y is the privacy term
// (if present, else the mean risk) and x the regime feature, over the
// privacy-dominated records with m >= 1. Fewer than six usable points or a
// zero design is InsufficientData.
absl::StatusOr<ConstantFit> FitCapacityConstant(
    const std::vector<SweepRecord>& records, CapacityRegime regime);

struct SlopeFit {
  // Exponents of m, 1/n, sqrt(d) and 1/epsilon.
  double m = 0.0;
  double inv_n = 0.0;
  double sqrt_d = 0.0;
  double inv_epsilon = 0.0;
  double intercept = 0.0;
  std::vector<double> standard_errors;  // same order, intercept last
  double r_squared = 0.0;
  int64_t points = 0;
};

// Multivariate OLS of ln(privacy term) on ln m, ln(1/n), ln sqrt(d) and
// ln(1/epsilon) over privacy-dominated records. A rank-deficient design is
// InsufficientData.
absl::StatusOr<SlopeFit> FitRiskSlopes(const std::vector<SweepRecord>& records);

struct TightnessReport {
  SlopeFit slopes;
  ConstantFit pooled;
  // One fit per value of n.
  std::vector<std::pair<int64_t, ConstantFit>> by_n;
  bool slopes_ok = false;    // every slope within 1 +- 0.2
  bool constant_ok = false;  // every subgrid C within +-25% of the pooled C
  bool ok() const { return slopes_ok && constant_ok; }
};

absl::StatusOr<TightnessReport> CheckTightness(const SweepResult& sweep);

struct ContractPoint {
  SweepRecord record;
  bool evaluated = false;  // false when the capacity is 0
  bool satisfied = false;
};

struct ContractResult {
  double constant = 0.0;
  std::vector<ContractPoint> points;
  int64_t evaluated = 0;
  int64_t satisfied = 0;
  double fraction() const {
    return evaluated > 0 ? static_cast<double>(satisfied) / evaluated : 0.0;
  }
  bool ok() const { return evaluated > 0 && fraction() >= 0.9; }
};

// For every (n, d, epsilon, delta, alpha) of `config` (its m list is
// ignored) sets m = DeletionCapacity(regime, constant = 1 / fitted_constant)
// (pass ConstantFit::envelope for a bounding constant)
// and checks that deleting m aligned points keeps the mean population risk
// at or below alpha.
absl::StatusOr<ContractResult> EvaluateCapacityContract(
    const ExperimentConfig& config, double fitted_constant);

// Fixed header, one row per record.
std::string SweepCsv(const SweepResult& sweep);
// {config, records, fitted constant, slopes, pass/fail}.
std::string SweepSummaryJson(const SweepResult& sweep,
                             const absl::StatusOr<TightnessReport>& tightness);
// Writes sweep.csv and summary.json into config.output_dir.
absl::Status WriteSweep(const SweepResult& sweep,
                        const absl::StatusOr<TightnessReport>& tightness);

}  // namespace unlearn

#endif  // UNLEARN_EXPERIMENTS_H_
