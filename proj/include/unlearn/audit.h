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

// Empirical (epsilon, delta) audits of two mechanism output distributions.
// Outputs are projected to scalars; the gap between the two projected
// distributions is estimated from binned samples. An estimate lower-bounds
// the true epsilon: a pass is evidence, a fail is a bug signal.

#ifndef UNLEARN_AUDIT_H_
#define UNLEARN_AUDIT_H_

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "unlearn/accountant.h"
#include "unlearn/dataset.h"
#include "unlearn/trainer.h"
#include "unlearn/unlearning.h"
#include "unlearn/vector_ops.h"

namespace unlearn {

struct SampleBatch {
  // <output, direction> per trial, in trial order.
  std::vector<double> values;
  std::string source;
  // Trial t ran with DeriveSeed(base_seed, t).
  uint64_t base_seed = 0;

  int64_t trials() const { return static_cast<int64_t>(values.size()); }
};

// A randomized mechanism: dataset and seed to an output vector.
using Mechanism =
    std::function<absl::StatusOr<Vector>(const Dataset&, uint64_t seed)>;

// Runs `mechanism` `trials` times with seeds DeriveSeed(seed, t) (in
// parallel, see WorkerCount) and records the projections onto `direction`.
// A failing trial's error is returned annotated with its index.
absl::StatusOr<SampleBatch> SampleOutputs(const Mechanism& mechanism,
                                          const Dataset& dataset,
                                          const Vector& direction,
                                          int64_t trials, uint64_t seed,
                                          absl::string_view source = "");

// One scalar per line, shortest round-trip formatting.
absl::Status WriteBatchCsv(const SampleBatch& batch, const std::string& path);

enum class Verdict { kPass, kFail, kInconclusive };
absl::string_view VerdictName(Verdict verdict);

enum class EstimatorKind {
  // Binormal ROC fit: probit-transformed tail frequencies at the bin edges
  // are regressed on each other, and epsilon is the exact hockey-stick
  // epsilon of the fitted Gaussian pair. Falls back to kHistogram when
  // fewer than three edges have enough mass on both sides.
  kBinormal,
  // Max over sets W (single cells and upper/lower tails) and both
  // directions of ln((p(W) - delta) / q(W)), add-one smoothed counts.
  kHistogram,
};
absl::string_view EstimatorName(EstimatorKind kind);

struct EstimateOptions {
  int bins = 64;
  int bootstrap = 1000;
  uint64_t seed = 0;
  EstimatorKind estimator = EstimatorKind::kBinormal;
  // An edge enters the binormal fit only if each of its four tails holds at
  // least this many samples.
  int64_t min_tail_count = 30;
  double certified_epsilon = std::numeric_limits<double>::infinity();
  double tolerance = 0.3;
};

struct AuditReport {
  double epsilon_hat = 0.0;
  // 95% bootstrap percentile interval, widened to contain epsilon_hat.
  double lower = 0.0;
  double upper = 0.0;
  double delta = 0.0;
  int64_t trials_p = 0;
  int64_t trials_q = 0;
  int bins = 0;
  Verdict verdict = Verdict::kInconclusive;
  double certified_epsilon = 0.0;
  double tolerance = 0.0;
  // Estimator that produced epsilon_hat ("binormal" or "histogram").
  std::string method;
  // Largest value the smoothed histogram estimator can report.
  double smoothing_cap = 0.0;
  // Set when an audit deliberately exceeded the certified capacity.
  bool over_capacity = false;
};

std::string ReportToJson(const AuditReport& report);
absl::StatusOr<AuditReport> ReportFromJson(const std::string& json);
absl::Status WriteReport(const AuditReport& report, const std::string& path);

// Estimates the smallest epsilon with P(W) <= e^epsilon Q(W) + delta and the
// same with P and Q swapped, over sets W of the projected outputs. All mass
// of one batch in a single bin gives an inconclusive verdict. The verdict is
// pass iff upper <= certified_epsilon + tolerance.
absl::StatusOr<AuditReport> EstimateEpsilon(const SampleBatch& p,
                                            const SampleBatch& q, double delta,
                                            const EstimateOptions& options = {});

// sup_W P(W) - e^epsilon Q(W) for P = N(mean_p, sd_p^2), Q = N(mean_q,
// sd_q^2).
absl::StatusOr<double> GaussianHockeyStick(double mean_p, double sd_p,
                                           double mean_q, double sd_q,
                                           double epsilon);

// Smallest epsilon >= 0 with GaussianHockeyStick(...) <= delta, one
// direction only.
absl::StatusOr<double> GaussianPairEpsilon(double mean_p, double sd_p,
                                           double mean_q, double sd_q,
                                           double delta);

// Exact epsilon at which N(0, sigma^2) and N(sensitivity, sigma^2) are
// (epsilon, delta)-indistinguishable, by bisection on
//   Phi(D/(2s) - e s/D) - e^e Phi(-D/(2s) - e s/D) = delta.
absl::StatusOr<double> AnalyticGaussianEpsilon(double sensitivity,
                                               double sigma, double delta);

// Renyi divergence of order `order` between N(mu1, sigma^2 I) and
// N(mu2, sigma^2 I) with ||mu1 - mu2|| = shift: order shift^2 / (2 sigma^2).
absl::StatusOr<double> GaussianRenyiDivergence(double shift, double sigma,
                                               double order);

struct AuditOptions {
  int64_t trials = 100000;
  uint64_t seed = 0;
  // Retrain trial t reuses the seed of unlearn trial t. Otherwise the two
  // schedules are derived from independent base seeds.
  bool shared_seeds = true;
  // When false, requests larger than m are audited against the m-certified
  // pair (the report is flagged over_capacity).
  bool enforce_capacity = true;
  double alpha = 0.1;
  LearnOptions learn;
  // certified_epsilon is taken from the certificate.
  EstimateOptions estimate;
  // Projection direction; defaults to theta*(S).
  std::optional<Vector> direction;
};

// batch P: UnlearnLazy(U, Learn(S)); batch Q: RetrainBaseline(S, U). Both
// projected onto theta*(S) and compared with the certificate's delta; the
// verdict is against the certificate's epsilon.
absl::StatusOr<AuditReport> AuditUnlearning(const Dataset& dataset,
                                            const DeletionRequest& request,
                                            const LossSpec& loss,
                                            const ApproxDpBudget& target,
                                            int64_t m,
                                            const AuditOptions& options = {});

}  // namespace unlearn

#endif  // UNLEARN_AUDIT_H_
