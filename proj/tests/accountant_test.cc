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

#include <cmath>
#include <cstdint>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "unlearn/errors.h"

namespace unlearn {
namespace {

using ::testing::DoubleNear;

// Independent inverse of eps(rho) = m^2 rho + 2 sqrt(m^2 rho ln(1/delta)) by
// bisection; shares no code with the closed form under test.
double BisectRho(double eps, double delta, int64_t m) {
  auto forward = [&](double rho) {
    const double g = static_cast<double>(m * m) * rho;
    return g + 2.0 * std::sqrt(g * std::log(1.0 / delta));
  };
  double lo = 0.0, hi = eps;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (forward(mid) < eps ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double GeometricDelta(int64_t k, double eps, double delta) {
  double sum = 0.0;
  for (int64_t i = 0; i < k; ++i) sum += std::exp(static_cast<double>(i) * eps);
  return sum * delta;
}

TEST(GaussianZcdpTest, Examples) {
  EXPECT_EQ(GaussianZcdp(0.0, 1.0)->rho, 0.0);
  EXPECT_DOUBLE_EQ(GaussianZcdp(1.0, 1.0)->rho, 1.0 * 1.0 / (2.0 * 1.0 * 1.0));
  EXPECT_DOUBLE_EQ(GaussianZcdp(0.2, 0.1)->rho, 0.2 * 0.2 / (2.0 * 0.1 * 0.1));
  EXPECT_NEAR(GaussianZcdp(0.2, 0.1)->rho, 2.0, 1e-12);
}

TEST(GaussianZcdpTest, RejectsNonPositiveSigma) {
  EXPECT_TRUE(IsErrorKind(GaussianZcdp(1.0, 0.0).status(),
                          ErrorKind::kInvalidParameter));
  EXPECT_TRUE(IsErrorKind(GaussianZcdp(1.0, -2.0).status(),
                          ErrorKind::kInvalidParameter));
}

TEST(ComposeZcdpTest, Additivity) {
  EXPECT_EQ(ComposeZcdp({}).rho, 0.0);
  EXPECT_NEAR(ComposeZcdp({{0.1}, {0.2}}).rho, 0.3, 1e-15);
  EXPECT_EQ(ComposeZcdp(std::vector<ZcdpBudget>(4, {0.5})).rho, 2.0);
}

TEST(ComposeZcdpTest, LongCompositionMatchesProduct) {
  const double per_step = 0.1 / 65536.0 / 3.0;
  const int64_t steps = 1000003;
  const ZcdpBudget total =
      ComposeZcdp(std::vector<ZcdpBudget>(steps, {per_step}));
  const double expected = per_step * static_cast<double>(steps);
  EXPECT_NEAR(total.rho, expected, 1e-12 * expected);
}

TEST(GroupZcdpTest, Examples) {
  EXPECT_EQ(GroupZcdp(1, {0.5})->rho, 0.5);
  EXPECT_EQ(GroupZcdp(2, {0.5})->rho, 2.0);
  EXPECT_EQ(GroupZcdp(3, {0.1})->rho, 9.0 * 0.1);
  EXPECT_TRUE(
      IsErrorKind(GroupZcdp(0, {0.5}).status(), ErrorKind::kInvalidParameter));
}

TEST(GroupZcdpTest, ExactSquareScalingOverGrid) {
  for (int64_t k = 1; k <= 50; ++k) {
    for (double rho : {0.0, 1e-9, 0.013, 0.5, 7.25}) {
      const double kd = static_cast<double>(k);
      EXPECT_EQ(GroupZcdp(k, {rho})->rho, kd * kd * rho);
    }
  }
}

TEST(ZcdpToDpTest, Examples) {
  EXPECT_EQ(ZcdpToDp({0.0}, 1e-5)->epsilon, 0.0);
  EXPECT_EQ(ZcdpToDp({1.0}, 1.0)->epsilon, 1.0);
  const double oracle = 0.5 + 2.0 * std::sqrt(0.5 * std::log(1e5));
  const ApproxDpBudget b = *ZcdpToDp({0.5}, 1e-5);
  EXPECT_NEAR(b.epsilon, oracle, 1e-12);
  EXPECT_NEAR(b.epsilon, 5.2983, 1e-3);
  EXPECT_EQ(b.delta, 1e-5);
}

TEST(ZcdpToDpTest, RejectsBadDelta) {
  for (double delta : {0.0, -1e-3, 1.5}) {
    EXPECT_TRUE(IsErrorKind(ZcdpToDp({1.0}, delta).status(),
                            ErrorKind::kInvalidParameter));
  }
}

TEST(ZcdpToDpTest, MonotoneInRhoAndDelta) {
  const std::vector<double> rhos = {1e-4, 1e-3, 0.01, 0.1, 0.5, 1, 4, 16};
  const std::vector<double> deltas = {1e-12, 1e-9, 1e-6, 1e-5, 1e-3, 0.1, 0.5};
  for (double delta : deltas) {
    for (size_t i = 1; i < rhos.size(); ++i) {
      EXPECT_LT(ZcdpToDp({rhos[i - 1]}, delta)->epsilon,
                ZcdpToDp({rhos[i]}, delta)->epsilon);
    }
  }
  for (double rho : rhos) {
    for (size_t i = 1; i < deltas.size(); ++i) {
      EXPECT_GT(ZcdpToDp({rho}, deltas[i - 1])->epsilon,
                ZcdpToDp({rho}, deltas[i])->epsilon);
    }
  }
}

TEST(RhoForTargetTest, RoundTrip) {
  const ZcdpBudget rho = *RhoForTarget({1.0, 1e-5}, 3);
  const ZcdpBudget group = *GroupZcdp(3, rho);
  EXPECT_NEAR(ZcdpToDp(group, 1e-5)->epsilon, 1.0, 1e-12);
}

TEST(RhoForTargetTest, MatchesBisectionOracle) {
  const double oracle = BisectRho(1.0, 1e-5, 1);
  EXPECT_NEAR(RhoForTarget({1.0, 1e-5}, 1)->rho, oracle, 1e-12);
  // Frozen from the oracle above: 0.02081993833953...
  EXPECT_NEAR(oracle, 0.0208199383, 1e-10);
}

TEST(RhoForTargetTest, DoublingGroupQuartersRho) {
  for (int64_t m : {1, 2, 3, 8, 100}) {
    const double a = RhoForTarget({0.7, 1e-6}, m)->rho;
    const double b = RhoForTarget({0.7, 1e-6}, 2 * m)->rho;
    EXPECT_NEAR(b, a / 4.0, 1e-15 * a);
  }
}

TEST(RhoForTargetTest, InverseOverGrid) {
  for (double eps : {0.01, 0.1, 0.5, 1.0, 2.0, 8.0}) {
    for (double delta : {1e-10, 1e-6, 1e-5, 1e-2, 0.3}) {
      for (int64_t m : {1, 2, 5, 17}) {
        const ZcdpBudget rho = *RhoForTarget({eps, delta}, m);
        EXPECT_NEAR(ZcdpToDp(*GroupZcdp(m, rho), delta)->epsilon, eps,
                    1e-12 * std::max(1.0, eps));
        EXPECT_NEAR(rho.rho, BisectRho(eps, delta, m), 1e-12);
      }
    }
  }
}

TEST(RhoForTargetTest, RejectsInfeasible) {
  EXPECT_TRUE(IsErrorKind(RhoForTarget({0.0, 1e-5}, 1).status(),
                          ErrorKind::kInvalidParameter));
  EXPECT_TRUE(IsErrorKind(RhoForTarget({1.0, 0.0}, 1).status(),
                          ErrorKind::kInvalidParameter));
  EXPECT_TRUE(IsErrorKind(RhoForTarget({1.0, 1.0}, 1).status(),
                          ErrorKind::kInvalidParameter));
  EXPECT_TRUE(IsErrorKind(RhoForTarget({1.0, 1e-5}, 0).status(),
                          ErrorKind::kInvalidParameter));
}

TEST(ChainBudgetTest, Examples) {
  const ApproxDpBudget one = *ChainBudget(1, {0.3, 1e-6});
  EXPECT_EQ(one.epsilon, 0.3);
  EXPECT_NEAR(one.delta, 1e-6, 1e-21);

  const ApproxDpBudget zero = *ChainBudget(3, {0.0, 2e-6});
  EXPECT_EQ(zero.epsilon, 0.0);
  EXPECT_EQ(zero.delta, 6e-6);

  const ApproxDpBudget two = *ChainBudget(2, {0.1, 1e-6});
  EXPECT_NEAR(two.epsilon, 0.2, 1e-15);
  const double oracle = 1e-6 * (1.0 + std::exp(0.1));
  EXPECT_NEAR(two.delta, oracle, 1e-12 * oracle);
  EXPECT_NEAR(two.delta, 2.1052e-6, 1e-10);
}

TEST(ChainBudgetTest, GeometricSumIdentity) {
  for (int64_t k = 1; k <= 40; k += 3) {
    for (double eps : {1e-6, 0.01, 0.1, 0.5, 1.0, 2.0}) {
      for (double delta : {1e-9, 1e-6, 1e-3}) {
        const double oracle = GeometricDelta(k, eps, delta);
        EXPECT_NEAR(ChainBudget(k, {eps, delta})->delta, oracle,
                    1e-12 * oracle);
      }
    }
  }
}

TEST(GroupositionBudgetTest, Examples) {
  const ApproxDpBudget zero = *GroupositionBudget(5, {0.0, 1e-6}, 1e-4);
  EXPECT_EQ(zero.epsilon, 0.0);
  EXPECT_NEAR(zero.delta, 1e-4 + 5e-6, 1e-18);

  const double oracle1 = 0.125 + 0.5 * std::sqrt(2.0 * std::log(1000.0));
  EXPECT_NEAR(GroupositionBudget(1, {0.5, 0.0}, 1e-3)->epsilon, oracle1,
              1e-12);
  EXPECT_NEAR(oracle1, 1.983461, 1e-6);

  const ApproxDpBudget four = *GroupositionBudget(4, {0.1, 1e-6}, 1e-5);
  EXPECT_NEAR(four.epsilon, 0.02 + 0.1 * std::sqrt(8.0 * std::log(1e5)),
              1e-12);
  EXPECT_NEAR(four.epsilon, 0.97968, 1e-4);
  EXPECT_NEAR(four.delta, 1e-5 + 4e-6, 1e-18);
}

TEST(GroupositionBudgetTest, RejectsBadDeltaPrime) {
  EXPECT_TRUE(IsErrorKind(GroupositionBudget(2, {0.1, 0}, 0.0).status(),
                          ErrorKind::kInvalidParameter));
  EXPECT_TRUE(IsErrorKind(GroupositionBudget(2, {0.1, 0}, 1.0).status(),
                          ErrorKind::kInvalidParameter));
}

CapacityQuery BaseQuery(CapacityRegime regime) {
  CapacityQuery q;
  q.regime = regime;
  q.n = 1000;
  q.d = 10;
  q.alpha = 0.1;
  q.budget = {1.0, 1e-5};
  q.constant = 1.0;
  return q;
}

TEST(DeletionCapacityTest, HandEvaluatedExamples) {
  // 100 / sqrt(10 ln 1e5) = 9.3198...
  EXPECT_EQ(*DeletionCapacity(BaseQuery(CapacityRegime::kApproxConvexFloor)),
            9);
  // 1000 sqrt(0.1) / sqrt(10 ln 1e5) = 29.4718...
  EXPECT_EQ(
      *DeletionCapacity(BaseQuery(CapacityRegime::kApproxStronglyConvex)), 29);
}

TEST(DeletionCapacityTest, ZeroAlphaGivesZero) {
  for (CapacityRegime regime :
       {CapacityRegime::kApproxConvexFloor, CapacityRegime::kApproxConvexCeiling,
        CapacityRegime::kApproxStronglyConvex, CapacityRegime::kPureConvexFloor,
        CapacityRegime::kPureConvexCeiling}) {
    CapacityQuery q = BaseQuery(regime);
    q.alpha = 0.0;
    if (IsPureRegime(regime)) q.budget.delta = 0.0;
    q.strong_convexity = 1.0;
    EXPECT_EQ(*DeletionCapacity(q), 0) << RegimeName(regime);
  }
}

TEST(DeletionCapacityTest, PureRegimes) {
  CapacityQuery q = BaseQuery(CapacityRegime::kPureConvexCeiling);
  EXPECT_TRUE(IsErrorKind(DeletionCapacity(q).status(),
                          ErrorKind::kRegimeMismatch));
  q.budget.delta = 0.0;
  EXPECT_EQ(*DeletionCapacity(q), 10);  // 1 * 1000 * 0.1 / 10

  CapacityQuery f = BaseQuery(CapacityRegime::kPureConvexFloor);
  f.budget.delta = 0.0;
  EXPECT_TRUE(
      IsErrorKind(DeletionCapacity(f).status(), ErrorKind::kInvalidParameter));
  f.strong_convexity = 2.0;
  f.lipschitz = 0.5;
  f.alpha = 0.5;
  // 1 * 1000 * 0.25 * 2 / (10 * 0.5) = 100
  EXPECT_EQ(*DeletionCapacity(f), 100);
}

TEST(DeletionCapacityTest, ClampsToDatasetSize) {
  CapacityQuery q = BaseQuery(CapacityRegime::kApproxConvexFloor);
  q.constant = 1e6;
  EXPECT_EQ(*DeletionCapacity(q), q.n);
}

TEST(DeletionCapacityTest, FloorAndCeilingAgreeWithEqualConstants) {
  for (int64_t n : {10, 100, 5000}) {
    for (int64_t d : {1, 4, 64}) {
      for (double c : {0.3, 1.0, 7.0}) {
        CapacityQuery a = BaseQuery(CapacityRegime::kApproxConvexFloor);
        CapacityQuery b = BaseQuery(CapacityRegime::kApproxConvexCeiling);
        a.n = b.n = n;
        a.d = b.d = d;
        a.constant = b.constant = c;
        EXPECT_EQ(*DeletionCapacity(a), *DeletionCapacity(b));
      }
    }
  }
}

TEST(DeletionCapacityTest, Monotonicity) {
  for (CapacityRegime regime :
       {CapacityRegime::kApproxConvexFloor, CapacityRegime::kApproxConvexCeiling,
        CapacityRegime::kApproxStronglyConvex, CapacityRegime::kPureConvexFloor,
        CapacityRegime::kPureConvexCeiling}) {
    CapacityQuery base = BaseQuery(regime);
    base.strong_convexity = 1.0;
    if (IsPureRegime(regime)) base.budget.delta = 0.0;
    base.n = 2000;
    base.d = 3;
    base.alpha = 0.3;
    const int64_t ref = *DeletionCapacity(base);

    for (int64_t n = 1; n <= 4096; n *= 2) {
      CapacityQuery lo = base, hi = base;
      lo.n = n;
      hi.n = n + 1;
      EXPECT_LE(*DeletionCapacity(lo), *DeletionCapacity(hi));
    }
    for (int64_t d = 1; d <= 128; ++d) {
      CapacityQuery lo = base, hi = base;
      lo.d = d + 1;
      hi.d = d;
      EXPECT_LE(*DeletionCapacity(lo), *DeletionCapacity(hi));
    }
    for (double f : {1.01, 1.5, 2.0, 3.0}) {
      CapacityQuery eps = base, alpha = base, c = base;
      eps.budget.epsilon *= f;
      alpha.alpha = std::min(1.0, base.alpha * f);
      c.constant *= f;
      EXPECT_LE(ref, *DeletionCapacity(eps));
      EXPECT_LE(ref, *DeletionCapacity(alpha));
      EXPECT_LE(ref, *DeletionCapacity(c));
    }
  }
}

TEST(RegimeNameTest, ParsesBothSpellings) {
  EXPECT_EQ(*ParseCapacityRegime("approx-convex-floor"),
            CapacityRegime::kApproxConvexFloor);
  EXPECT_EQ(*ParseCapacityRegime("pure_convex_ceiling"),
            CapacityRegime::kPureConvexCeiling);
  EXPECT_FALSE(ParseCapacityRegime("nonsense").ok());
}

}  // namespace
}  // namespace unlearn
