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

#include "unlearn/accountant.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_replace.h"
#include "unlearn/errors.h"

namespace unlearn {
namespace {

absl::Status Invalid(absl::string_view message) {
  return MakeError(ErrorKind::kInvalidParameter, message);
}

absl::Status CheckGroupSize(int64_t k) {
  if (k < 1) return Invalid(absl::StrCat("group size must be >= 1, got ", k));
  return absl::OkStatus();
}

}  // namespace

absl::Status ValidateZcdp(const ZcdpBudget& budget) {
  // NaN fails both comparisons.
  if (!(budget.rho >= 0.0)) {
    return Invalid(absl::StrCat("rho must be >= 0, got ", budget.rho));
  }
  return absl::OkStatus();
}

absl::Status ValidateApproxDp(const ApproxDpBudget& budget) {
  if (!(budget.epsilon >= 0.0) || std::isinf(budget.epsilon)) {
    return Invalid(
        absl::StrCat("epsilon must be finite and >= 0, got ", budget.epsilon));
  }
  if (!(budget.delta >= 0.0 && budget.delta <= 1.0)) {
    return Invalid(absl::StrCat("delta must lie in [0, 1], got ", budget.delta));
  }
  return absl::OkStatus();
}

absl::StatusOr<CapacityRegime> ParseCapacityRegime(absl::string_view name) {
  const std::string normalized = absl::StrReplaceAll(name, {{"-", "_"}});
  for (CapacityRegime regime :
       {CapacityRegime::kApproxConvexFloor, CapacityRegime::kApproxConvexCeiling,
        CapacityRegime::kApproxStronglyConvex, CapacityRegime::kPureConvexFloor,
        CapacityRegime::kPureConvexCeiling}) {
    if (RegimeName(regime) == normalized) return regime;
  }
  return Invalid(absl::StrCat("unknown capacity regime '", name, "'"));
}

absl::string_view RegimeName(CapacityRegime regime) {
  switch (regime) {
    case CapacityRegime::kApproxConvexFloor:
      return "approx_convex_floor";
    case CapacityRegime::kApproxConvexCeiling:
      return "approx_convex_ceiling";
    case CapacityRegime::kApproxStronglyConvex:
      return "approx_strongly_convex";
    case CapacityRegime::kPureConvexFloor:
      return "pure_convex_floor";
    case CapacityRegime::kPureConvexCeiling:
      return "pure_convex_ceiling";
  }
  return "unknown";
}

bool IsPureRegime(CapacityRegime regime) {
  return regime == CapacityRegime::kPureConvexFloor ||
         regime == CapacityRegime::kPureConvexCeiling;
}

absl::StatusOr<ZcdpBudget> GaussianZcdp(double sensitivity, double sigma) {
  if (!(sigma > 0.0)) {
    return Invalid(absl::StrCat("sigma must be > 0, got ", sigma));
  }
  if (!(sensitivity >= 0.0)) {
    return Invalid(absl::StrCat("sensitivity must be >= 0, got ", sensitivity));
  }
  return ZcdpBudget{sensitivity * sensitivity / (2.0 * sigma * sigma)};
}

ZcdpBudget ComposeZcdp(const std::vector<ZcdpBudget>& budgets) {
  double sum = 0.0;
  double compensation = 0.0;
  for (const ZcdpBudget& b : budgets) {
    const double t = sum + b.rho;
    if (std::abs(sum) >= std::abs(b.rho)) {
      compensation += (sum - t) + b.rho;
    } else {
      compensation += (b.rho - t) + sum;
    }
    sum = t;
  }
  if (std::isinf(sum)) return ZcdpBudget{sum};
  return ZcdpBudget{sum + compensation};
}

absl::StatusOr<ZcdpBudget> GroupZcdp(int64_t k, const ZcdpBudget& budget) {
  if (absl::Status s = CheckGroupSize(k); !s.ok()) return s;
  if (absl::Status s = ValidateZcdp(budget); !s.ok()) return s;
  const double kd = static_cast<double>(k);
  return ZcdpBudget{kd * kd * budget.rho};
}

absl::StatusOr<ApproxDpBudget> ZcdpToDp(const ZcdpBudget& budget,
                                        double delta) {
  if (absl::Status s = ValidateZcdp(budget); !s.ok()) return s;
  if (!(delta > 0.0 && delta <= 1.0)) {
    return Invalid(absl::StrCat("delta must lie in (0, 1], got ", delta));
  }
  const double log_inv_delta = -std::log(delta);
  return ApproxDpBudget{
      budget.rho + 2.0 * std::sqrt(budget.rho * log_inv_delta), delta};
}

absl::StatusOr<ZcdpBudget> RhoForTarget(const ApproxDpBudget& target,
                                        int64_t m) {
  if (absl::Status s = CheckGroupSize(m); !s.ok()) return s;
  if (!(target.epsilon > 0.0) || std::isinf(target.epsilon)) {
    return Invalid(absl::StrCat("target epsilon must be finite and > 0, got ",
                                target.epsilon));
  }
  if (!(target.delta > 0.0 && target.delta < 1.0)) {
    return Invalid(
        absl::StrCat("target delta must lie in (0, 1), got ", target.delta));
  }
  const double l = -std::log(target.delta);
  // sqrt(l + eps) - sqrt(l), rationalized to avoid cancellation.
  const double s = target.epsilon / (std::sqrt(l + target.epsilon) + std::sqrt(l));
  const double md = static_cast<double>(m);
  return ZcdpBudget{(s * s) / (md * md)};
}

absl::StatusOr<ApproxDpBudget> ChainBudget(int64_t k,
                                           const ApproxDpBudget& per_step) {
  if (absl::Status s = CheckGroupSize(k); !s.ok()) return s;
  if (absl::Status s = ValidateApproxDp(per_step); !s.ok()) return s;
  const double kd = static_cast<double>(k);
  if (per_step.epsilon == 0.0) {
    return ApproxDpBudget{0.0, kd * per_step.delta};
  }
  const double growth =
      std::expm1(kd * per_step.epsilon) / std::expm1(per_step.epsilon);
  return ApproxDpBudget{kd * per_step.epsilon, per_step.delta * growth};
}

absl::StatusOr<ApproxDpBudget> GroupositionBudget(
    int64_t k, const ApproxDpBudget& per_alg, double delta_prime) {
  if (absl::Status s = CheckGroupSize(k); !s.ok()) return s;
  if (absl::Status s = ValidateApproxDp(per_alg); !s.ok()) return s;
  if (!(delta_prime > 0.0 && delta_prime < 1.0)) {
    return Invalid(
        absl::StrCat("delta_prime must lie in (0, 1), got ", delta_prime));
  }
  const double kd = static_cast<double>(k);
  const double e = per_alg.epsilon;
  const double epsilon =
      kd * e * e / 2.0 + e * std::sqrt(2.0 * kd * -std::log(delta_prime));
  return ApproxDpBudget{epsilon, delta_prime + kd * per_alg.delta};
}

absl::StatusOr<double> CapacityFormula(const CapacityQuery& query) {
  if (query.n < 1) {
    return Invalid(absl::StrCat("n must be >= 1, got ", query.n));
  }
  if (query.d < 1) {
    return Invalid(absl::StrCat("d must be >= 1, got ", query.d));
  }
  if (!(query.alpha >= 0.0 && query.alpha <= 1.0)) {
    return Invalid(absl::StrCat("alpha must lie in [0, 1], got ", query.alpha));
  }
  if (!(query.constant > 0.0) || std::isinf(query.constant)) {
    return Invalid(
        absl::StrCat("constant must be finite and > 0, got ", query.constant));
  }
  if (absl::Status s = ValidateApproxDp(query.budget); !s.ok()) return s;

  const double n = static_cast<double>(query.n);
  const double d = static_cast<double>(query.d);
  const double eps = query.budget.epsilon;
  const double alpha = query.alpha;

  if (IsPureRegime(query.regime)) {
    if (query.budget.delta > 0.0) {
      return MakeError(
          ErrorKind::kRegimeMismatch,
          absl::StrCat(RegimeName(query.regime),
                       " is a pure-DP regime but delta = ", query.budget.delta));
    }
    if (query.regime == CapacityRegime::kPureConvexCeiling) {
      return eps * n * alpha / d;
    }
    if (!query.strong_convexity.has_value()) {
      return Invalid("pure_convex_floor requires the strong-convexity parameter");
    }
    const double big_delta = *query.strong_convexity;
    if (!(big_delta > 0.0)) {
      return Invalid(
          absl::StrCat("strong convexity must be > 0, got ", big_delta));
    }
    if (!(query.lipschitz > 0.0)) {
      return Invalid(
          absl::StrCat("lipschitz must be > 0, got ", query.lipschitz));
    }
    return eps * n * alpha * alpha * big_delta / (d * query.lipschitz);
  }

  if (!(query.budget.delta > 0.0 && query.budget.delta < 1.0)) {
    return Invalid(absl::StrCat("approximate-DP regimes need delta in (0, 1), got ",
                                query.budget.delta));
  }
  const double denom = std::sqrt(d * -std::log(query.budget.delta));
  if (query.regime == CapacityRegime::kApproxStronglyConvex) {
    return eps * n * std::sqrt(alpha) / denom;
  }
  return eps * n * alpha / denom;
}

absl::StatusOr<int64_t> DeletionCapacity(const CapacityQuery& query) {
  absl::StatusOr<double> formula = CapacityFormula(query);
  if (!formula.ok()) return formula.status();
  const double scaled = std::floor(query.constant * *formula);
  if (!(scaled > 0.0)) return 0;
  if (scaled >= static_cast<double>(query.n)) return query.n;
  return static_cast<int64_t>(scaled);
}

}  // namespace unlearn
