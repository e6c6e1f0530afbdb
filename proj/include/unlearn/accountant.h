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

// Privacy-budget arithmetic: zero-concentrated DP (zCDP) composition and
// group privacy, conversion to approximate (epsilon, delta)-DP, the budget
// calculus for chained and merged unlearners, and deletion-capacity formulas.
//
// Every function here is pure and thread-safe.

#ifndef UNLEARN_ACCOUNTANT_H_
#define UNLEARN_ACCOUNTANT_H_

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace unlearn {

// rho-zCDP. An infinite rho marks a non-private computation.
struct ZcdpBudget {
  double rho = 0.0;

  static ZcdpBudget NonPrivate() {
    return {std::numeric_limits<double>::infinity()};
  }
  bool is_non_private() const {
    return rho == std::numeric_limits<double>::infinity();
  }
};

struct ApproxDpBudget {
  double epsilon = 0.0;
  double delta = 0.0;
};

absl::Status ValidateZcdp(const ZcdpBudget& budget);
absl::Status ValidateApproxDp(const ApproxDpBudget& budget);

enum class CapacityRegime {
  kApproxConvexFloor,
  kApproxConvexCeiling,
  kApproxStronglyConvex,
  kPureConvexFloor,
  kPureConvexCeiling,
};

// Accepts both "approx_convex_floor" and "approx-convex-floor".
absl::StatusOr<CapacityRegime> ParseCapacityRegime(absl::string_view name);
absl::string_view RegimeName(CapacityRegime regime);
bool IsPureRegime(CapacityRegime regime);

struct CapacityQuery {
  CapacityRegime regime = CapacityRegime::kApproxConvexFloor;
  int64_t n = 1;
  int64_t d = 1;
  double alpha = 0.1;
  ApproxDpBudget budget;
  // The loss-dependent constant hidden by the asymptotic bounds.
  double constant = 1.0;
  double lipschitz = 1.0;
  // Strong-convexity parameter; required by kPureConvexFloor.
  std::optional<double> strong_convexity;
};

// Gaussian mechanism with l2 sensitivity `sensitivity` and noise scale
// `sigma`: rho = sensitivity^2 / (2 sigma^2).
absl::StatusOr<ZcdpBudget> GaussianZcdp(double sensitivity, double sigma);

// Additive composition, summed with Neumaier compensation so long
// compositions of identical steps reproduce their product exactly.
ZcdpBudget ComposeZcdp(const std::vector<ZcdpBudget>& budgets);

// rho-zCDP for neighbours implies k^2 rho-zCDP for datasets at distance k.
absl::StatusOr<ZcdpBudget> GroupZcdp(int64_t k, const ZcdpBudget& budget);

// rho-zCDP implies (rho + 2 sqrt(rho ln(1/delta)), delta)-DP.
absl::StatusOr<ApproxDpBudget> ZcdpToDp(const ZcdpBudget& budget,
                                        double delta);

// The rho whose m-group conversion at target.delta lands exactly on
// target.epsilon.
absl::StatusOr<ZcdpBudget> RhoForTarget(const ApproxDpBudget& target,
                                        int64_t m);

// Budget after sequentially unlearning k disjoint requests with an
// (epsilon, delta) lazy unlearner.
absl::StatusOr<ApproxDpBudget> ChainBudget(int64_t k,
                                           const ApproxDpBudget& per_step);

// Budget of k unlearners merged by an arbitrary function.
absl::StatusOr<ApproxDpBudget> GroupositionBudget(
    int64_t k, const ApproxDpBudget& per_alg, double delta_prime);

// The real-valued capacity formula with unit constant (before scaling by
// query.constant, flooring and clamping).
absl::StatusOr<double> CapacityFormula(const CapacityQuery& query);

// clamp(floor(constant * formula), 0, n).
absl::StatusOr<int64_t> DeletionCapacity(const CapacityQuery& query);

}  // namespace unlearn

#endif  // UNLEARN_ACCOUNTANT_H_
