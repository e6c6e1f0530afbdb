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

#include "unlearn/experiments.h"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"
#include "json.hpp"
#include "unlearn/errors.h"

namespace unlearn {
namespace {

ExperimentConfig TinyConfig() {
  ExperimentConfig c;
  c.n = {32, 64};
  c.d = {2, 4};
  c.m = {0, 1, 2};
  c.epsilon = {1.0, 2.0};
  c.seeds = 6;
  c.seed = 3;
  return c;
}

// Records built exactly from y = C * m sqrt(d ln(1/delta)) / (n eps).
std::vector<SweepRecord> SyntheticRecords(double c, bool with_privacy_term) {
  std::vector<SweepRecord> out;
  for (int64_t n : {100, 400, 1600}) {
    for (int64_t d : {2, 8}) {
      for (int64_t m : {1, 2, 4}) {
        for (double eps : {1.0, 2.0}) {
          SweepRecord r;
          r.n = n;
          r.d = d;
          r.m = m;
          r.epsilon = eps;
          r.delta = 1e-5;
          const double y = c * m * std::sqrt(d * std::log(1e5)) / (n * eps);
          // Keep the risk within the unsaturated range.
          r.mean_population_risk = y / 100.0 + 1e-12;
          if (with_privacy_term) {
            r.privacy_term = y / 100.0;
          } else {
            r.mean_population_risk = y / 100.0;
          }
          out.push_back(r);
        }
      }
    }
  }
  return out;
}

TEST(ExperimentConfigTest, ParsesFlatKeyValueText) {
  auto c = ParseExperimentConfig(R"(
# grid
n = 128, 256
d = 4
m = 0,1
eps = 0.5,1
delta = 1e-6
alpha = 0.05, 0.1
seeds = 10
seed = 42
regime = approx-strongly-convex
steps = 100
bias = 0.8
audit_trials = 0
output_dir = /tmp/x  # trailing comment
)");
  ASSERT_TRUE(c.ok()) << c.status();
  EXPECT_EQ(c->n, (std::vector<int64_t>{128, 256}));
  EXPECT_EQ(c->d, (std::vector<int64_t>{4}));
  EXPECT_EQ(c->epsilon, (std::vector<double>{0.5, 1.0}));
  EXPECT_EQ(c->delta, (std::vector<double>{1e-6}));
  EXPECT_EQ(c->seeds, 10);
  EXPECT_EQ(c->seed, 42u);
  EXPECT_EQ(c->regime, CapacityRegime::kApproxStronglyConvex);
  EXPECT_EQ(c->steps, 100);
  EXPECT_EQ(c->bias, 0.8);
  EXPECT_EQ(c->output_dir, "/tmp/x");
  EXPECT_EQ(StepsFor(*c, 128), 100);
}

TEST(ExperimentConfigTest, TextRoundTrips) {
  ExperimentConfig c = TinyConfig();
  c.delta = {1e-5, 1e-7};
  c.steps_factor = 0.3;
  c.output_dir = "out";
  auto back = ParseExperimentConfig(ExperimentConfigToText(c));
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(ExperimentConfigToText(*back), ExperimentConfigToText(c));
  EXPECT_EQ(StepsFor(c, 10), 30);
}

TEST(ExperimentConfigTest, RejectsBadConfigs) {
  for (const char* text :
       {"n = 0", "bogus = 1", "n = 12\nn = 13", "eps = 0", "delta = 1",
        "alpha = 2", "seeds = 0", "m = -1", "bias = 0.5", "n = abc",
        "seed = 1,2", "regime = pure_convex_ceiling", "audit_trials = 10",
        "no equals sign"}) {
    EXPECT_FALSE(ParseExperimentConfig(text).ok()) << text;
  }
  EXPECT_TRUE(IsErrorKind(ParseExperimentConfig("regime = pure_convex_ceiling")
                              .status(),
                          ErrorKind::kRegimeMismatch));
  EXPECT_FALSE(ReadExperimentConfig("/nonexistent/config.txt").ok());
}

TEST(FitCapacityConstantTest, RecoversSyntheticConstant) {
  for (bool paired : {false, true}) {
    auto fit = FitCapacityConstant(SyntheticRecords(2.0, paired),
                                   CapacityRegime::kApproxConvexFloor);
    ASSERT_TRUE(fit.ok()) << fit.status();
    EXPECT_NEAR(fit->constant * 100.0, 2.0, 1e-6);
    EXPECT_NEAR(fit->relative_rms, 0.0, 1e-9);
    EXPECT_GE(fit->envelope, fit->constant * (1.0 - 1e-12));
    EXPECT_EQ(fit->points, 36);
  }
}

TEST(FitCapacityConstantTest, EnvelopeBoundsEveryPoint) {
  std::vector<SweepRecord> records = SyntheticRecords(2.0, false);
  for (size_t i = 0; i < records.size(); ++i) {
    records[i].mean_population_risk *= 1.0 + 0.1 * std::sin(i);
  }
  auto fit =
      FitCapacityConstant(records, CapacityRegime::kApproxConvexFloor).value();
  for (const SweepRecord& r : records) {
    const double x =
        CapacityFeature(CapacityRegime::kApproxConvexFloor, r).value();
    EXPECT_LE(r.mean_population_risk, fit.envelope * x * (1 + 1e-12));
  }
}

TEST(FitCapacityConstantTest, TooFewPointsIsInsufficientData) {
  std::vector<SweepRecord> records = SyntheticRecords(2.0, false);
  records.resize(5);
  EXPECT_TRUE(IsErrorKind(
      FitCapacityConstant(records, CapacityRegime::kApproxConvexFloor).status(),
      ErrorKind::kInsufficientData));
  // Baseline rows (m = 0) carry no deletion term.
  std::vector<SweepRecord> baseline = SyntheticRecords(2.0, false);
  for (SweepRecord& r : baseline) r.m = 0;
  EXPECT_TRUE(IsErrorKind(
      FitCapacityConstant(baseline, CapacityRegime::kApproxConvexFloor)
          .status(),
      ErrorKind::kInsufficientData));
}

TEST(CapacityFeatureTest, MatchesRegimeFormula) {
  SweepRecord r;
  r.n = 1000;
  r.d = 10;
  r.m = 3;
  r.epsilon = 2.0;
  r.delta = 1e-5;
  EXPECT_DOUBLE_EQ(
      CapacityFeature(CapacityRegime::kApproxConvexFloor, r).value(),
      3.0 * std::sqrt(10.0 * std::log(1e5)) / 2000.0);
  EXPECT_DOUBLE_EQ(
      CapacityFeature(CapacityRegime::kPureConvexCeiling, r).value(),
      30.0 / 2000.0);
}

TEST(FitRiskSlopesTest, RecoversExactPowerLaw) {
  // privacy term = 0.3 m^1 n^-1 d^{1/2} eps^-1.
  auto slopes = FitRiskSlopes(SyntheticRecords(0.3 / std::sqrt(std::log(1e5)),
                                               true));
  ASSERT_TRUE(slopes.ok()) << slopes.status();
  EXPECT_NEAR(slopes->m, 1.0, 1e-9);
  EXPECT_NEAR(slopes->inv_n, 1.0, 1e-9);
  EXPECT_NEAR(slopes->sqrt_d, 1.0, 1e-9);
  EXPECT_NEAR(slopes->inv_epsilon, 1.0, 1e-9);
  EXPECT_NEAR(slopes->r_squared, 1.0, 1e-9);
  EXPECT_EQ(slopes->points, 36);
}

TEST(FitRiskSlopesTest, FixedFactorIsInsufficientData) {
  std::vector<SweepRecord> records;
  for (const SweepRecord& r : SyntheticRecords(1.0, true)) {
    if (r.epsilon == 1.0) records.push_back(r);
  }
  EXPECT_TRUE(IsErrorKind(FitRiskSlopes(records).status(),
                          ErrorKind::kInsufficientData));
}

TEST(PrivacyDominatedTest, Selection) {
  SweepRecord r;
  r.m = 1;
  r.mean_population_risk = 0.03;
  r.privacy_term = 0.02;
  EXPECT_TRUE(PrivacyDominated(r));
  r.privacy_term = 0.019;  // baseline 0.011 > half
  EXPECT_FALSE(PrivacyDominated(r));
  r.privacy_term = 0.02;
  r.mean_population_risk = 0.2;
  r.privacy_term = 0.19;
  EXPECT_FALSE(PrivacyDominated(r));  // saturated range
  r.mean_population_risk = 0.03;
  r.privacy_term.reset();
  EXPECT_FALSE(PrivacyDominated(r));
}

TEST(RunCapacitySweepTest, OneRecordPerGridPoint) {
  const ExperimentConfig c = TinyConfig();
  auto sweep = RunCapacitySweep(c);
  ASSERT_TRUE(sweep.ok()) << sweep.status();
  ASSERT_EQ(sweep->records.size(), 2u * 2u * 3u * 2u);
  for (const SweepRecord& r : sweep->records) {
    EXPECT_TRUE(r.ok()) << r.error;
    EXPECT_EQ(r.seeds, 6);
    EXPECT_EQ(r.steps, StepsFor(c, r.n));
    EXPECT_GE(r.mean_population_risk, 0.0);
    EXPECT_GE(r.se_population_risk, 0.0);
    EXPECT_GE(r.mean_excess_empirical, 0.0);
    ASSERT_TRUE(r.privacy_term.has_value());
    ASSERT_TRUE(r.se_privacy_term.has_value());
    EXPECT_EQ(r.within_alpha, r.mean_population_risk <= r.alpha);
  }
  // Grid order: n, d, m, epsilon (fastest).
  EXPECT_EQ(sweep->records[0].n, 32);
  EXPECT_EQ(sweep->records[1].epsilon, 2.0);
  EXPECT_EQ(sweep->records[2].m, 1);
}

TEST(RunCapacitySweepTest, BaselineColumnIsTheNonPrivateCurve) {
  auto sweep = RunCapacitySweep(TinyConfig()).value();
  for (size_t i = 0; i < sweep.records.size(); ++i) {
    const SweepRecord& r = sweep.records[i];
    if (r.m != 0) continue;
    EXPECT_EQ(*r.privacy_term, 0.0);
    // No noise: the budget does not matter.
    const SweepRecord& other = sweep.records[i + 1];
    ASSERT_EQ(other.m, 0);
    EXPECT_EQ(r.mean_population_risk, other.mean_population_risk);
    ++i;
  }
}

TEST(RunCapacitySweepTest, PrivacyTermGrowsWithGroupSize) {
  ExperimentConfig c = TinyConfig();
  c.n = {64};
  c.d = {4};
  c.m = {0, 1, 4};
  c.epsilon = {1.0};
  c.seeds = 40;
  auto sweep = RunCapacitySweep(c).value();
  ASSERT_EQ(sweep.records.size(), 3u);
  EXPECT_LT(*sweep.records[1].privacy_term, *sweep.records[2].privacy_term);
  EXPECT_GT(*sweep.records[1].privacy_term, 0.0);
}

TEST(RunCapacitySweepTest, BitwiseReproducibleAcrossThreadCounts) {
  const ExperimentConfig c = TinyConfig();
  setenv("UNLEARN_DP_THREADS", "1", 1);
  const std::string one = SweepCsv(RunCapacitySweep(c).value());
  setenv("UNLEARN_DP_THREADS", "3", 1);
  const std::string three = SweepCsv(RunCapacitySweep(c).value());
  unsetenv("UNLEARN_DP_THREADS");
  EXPECT_EQ(one, three);
  ExperimentConfig other = c;
  other.seed = 4;
  EXPECT_NE(SweepCsv(RunCapacitySweep(other).value()), one);
}

TEST(RunCapacitySweepTest, WritesCsvAndSummary) {
  ExperimentConfig c = TinyConfig();
  c.output_dir = testing::TempDir() + "/sweep_out";
  const SweepResult sweep = RunCapacitySweep(c).value();
  const absl::StatusOr<TightnessReport> tightness = CheckTightness(sweep);
  ASSERT_TRUE(WriteSweep(sweep, tightness).ok());
  std::ifstream csv(c.output_dir + "/sweep.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header.rfind("n,d,m,epsilon,delta,alpha,seeds,steps,", 0), 0u);
  int rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  EXPECT_EQ(rows, static_cast<int>(sweep.records.size()));
  std::stringstream summary;
  summary << std::ifstream(c.output_dir + "/summary.json").rdbuf();
  const auto j = nlohmann::json::parse(summary.str());
  EXPECT_EQ(j.at("records").get<size_t>(), sweep.records.size());
  EXPECT_TRUE(j.contains("pass"));

  ExperimentConfig no_dir = c;
  no_dir.output_dir.clear();
  EXPECT_FALSE(WriteSweep(RunCapacitySweep(no_dir).value(), tightness).ok());
}

TEST(RunCapacitySweepTest, OptionalAuditColumn) {
  ExperimentConfig c;
  c.n = {16};
  c.d = {1};
  c.m = {1};
  c.epsilon = {1.0};
  c.seeds = 2;
  c.steps = 4;
  c.audit_trials = 1000;
  auto sweep = RunCapacitySweep(c).value();
  ASSERT_EQ(sweep.records.size(), 1u);
  EXPECT_TRUE(sweep.records[0].ok()) << sweep.records[0].error;
  ASSERT_TRUE(sweep.records[0].audit_epsilon.has_value());
  EXPECT_GE(*sweep.records[0].audit_epsilon, 0.0);
  // No baseline column, no privacy term.
  EXPECT_FALSE(sweep.records[0].privacy_term.has_value());
}

TEST(EvaluateCapacityContractTest, SkipsZeroCapacityAndChecksAlpha) {
  ExperimentConfig c = TinyConfig();
  c.n = {64};
  c.d = {2};
  c.epsilon = {2.0};
  c.alpha = {0.1, 0.3};
  // Formula 64 * 2 * alpha / sqrt(2 ln 1e5) = 2.67 and 8.0 before scaling.
  auto contract = EvaluateCapacityContract(c, 1.0);
  ASSERT_TRUE(contract.ok()) << contract.status();
  ASSERT_EQ(contract->points.size(), 2u);
  EXPECT_EQ(contract->points[0].record.m, 2);
  EXPECT_EQ(contract->points[1].record.m, 8);
  EXPECT_EQ(contract->evaluated, 2);
  for (const ContractPoint& p : contract->points) {
    EXPECT_EQ(p.satisfied, p.record.mean_population_risk <= p.record.alpha);
  }
  auto none = EvaluateCapacityContract(c, 100.0).value();
  EXPECT_EQ(none.evaluated, 0);
  EXPECT_FALSE(none.ok());
  EXPECT_FALSE(EvaluateCapacityContract(c, 0.0).ok());
}

}  // namespace
}  // namespace unlearn
