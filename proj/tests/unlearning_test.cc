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

#include "unlearn/unlearning.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "json.hpp"
#include "unlearn/errors.h"
#include "unlearn/hard_instance.h"
#include "unlearn/random.h"

namespace unlearn {
namespace {

constexpr ApproxDpBudget kTarget = {1.0, 1e-5};

LearnOptions FastOptions() {
  LearnOptions o;
  o.steps = 200;
  return o;
}

UnlearningCertificate MakeCertificate(int64_t capacity, int64_t n) {
  UnlearningCertificate c;
  c.budget = {0.1, 1e-6};
  c.capacity = capacity;
  c.training_size = n;
  return c;
}

TEST(ValidateRequestTest, RangeAndDistinctness) {
  EXPECT_TRUE(ValidateRequest({{0, 3, 4}}, 5).ok());
  EXPECT_TRUE(IsErrorKind(ValidateRequest({{5}}, 5),
                          ErrorKind::kInvalidParameter));
  EXPECT_TRUE(IsErrorKind(ValidateRequest({{1, 1}}, 5),
                          ErrorKind::kInvalidParameter));
}

TEST(AlignedDeletionTest, PicksMostAlignedPoints) {
  // q = (0.2, 0) in d = 1 terms; the +1 points are aligned.
  const Dataset s = *Dataset::Create({{1.0}, {-1.0}, {1.0}, {1.0}, {-1.0}});
  EXPECT_EQ(AlignedDeletion(s, 2)->indices, (std::vector<size_t>{0, 2}));
  EXPECT_TRUE(AlignedDeletion(s, 0)->empty());
  EXPECT_FALSE(AlignedDeletion(s, 6).ok());
}

TEST(AlignedDeletionTest, MaximizesMarginalShift) {
  const Dataset s = *GenerateHardDataset(12, 3, 4);
  const Vector q = *OneWayMarginal(s);
  const DeletionRequest best = *AlignedDeletion(s, 2);
  auto shift = [&](const std::vector<size_t>& idx) {
    return -Dot(*OneWayMarginal(*RemoveIndices(s, idx)), q);
  };
  const double aligned = shift(best.indices);
  for (size_t i = 0; i < 12; ++i) {
    for (size_t j = i + 1; j < 12; ++j) {
      EXPECT_LE(shift({i, j}), aligned + 1e-15);
    }
  }
}

TEST(SideInformationTest, DatasetIndependent) {
  const std::string a =
      ComputeSideInformation(*GenerateHardDataset(10, 2, 1)).Serialize();
  const std::string b =
      ComputeSideInformation(*GenerateHardDataset(500, 9, 2)).Serialize();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, SideInformation{}.Serialize());
}

TEST(LearnTest, GroupOfOneIsPlainDpTraining) {
  const Dataset s = *GenerateHardDataset(40, 2, 1);
  const LearnResult r =
      *Learn(s, LinearHardInstanceLoss(), kTarget, 1, 0.1, FastOptions());
  EXPECT_EQ(r.model.certificate.rho, RhoForTarget(kTarget, 1)->rho);
  EXPECT_EQ(r.certificate.capacity, 1);
  EXPECT_TRUE(r.certificate.lazy);
  EXPECT_EQ(r.certificate.budget.epsilon, 1.0);
  EXPECT_EQ(r.certificate.budget.delta, 1e-5);
}

TEST(LearnTest, RhoScalesWithInverseSquareOfCapacity) {
  const Dataset s = *GenerateHardDataset(1024, 8, 3);
  const LearnResult one =
      *Learn(s, LinearHardInstanceLoss(), kTarget, 1, 0.1, FastOptions());
  const LearnResult four =
      *Learn(s, LinearHardInstanceLoss(), kTarget, 4, 0.1, FastOptions());
  const double l = std::log(1e5);
  const double s_closed = std::sqrt(l + 1.0) - std::sqrt(l);
  EXPECT_NEAR(four.certificate.rho.rho, s_closed * s_closed / 16.0, 1e-15);
  EXPECT_NEAR(four.certificate.rho.rho, one.certificate.rho.rho / 16.0, 1e-17);
  EXPECT_EQ(four.certificate.capacity, 4);
  // D L (1/sqrt(n) + m sqrt(d ln(1/delta)) / (eps n)) with D = 2, L = 1.
  EXPECT_NEAR(four.certificate.excess_loss_bound,
              2.0 * (1.0 / 32.0 + 4.0 * std::sqrt(8.0 * l) / 1024.0), 1e-15);
}

TEST(LearnTest, DefaultStepsAreNSquared) {
  const Dataset s = *GenerateHardDataset(12, 2, 3);
  const LearnResult r = *Learn(s, LinearHardInstanceLoss(), kTarget, 1, 0.1);
  EXPECT_NE(r.model.config.find(";steps=144;"), std::string::npos);
}

TEST(LearnTest, InfeasibleBudget) {
  const Dataset s = *GenerateHardDataset(12, 2, 3);
  EXPECT_TRUE(IsErrorKind(
      Learn(s, LinearHardInstanceLoss(), {0.0, 1e-5}, 1, 0.1).status(),
      ErrorKind::kInvalidParameter));
  EXPECT_TRUE(IsErrorKind(
      Learn(s, LinearHardInstanceLoss(), kTarget, 0, 0.1).status(),
      ErrorKind::kInvalidParameter));
}

TEST(UnlearnLazyTest, ReturnsInputBitwise) {
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const int64_t n = 20 + t;
    const Dataset s = *GenerateHardDataset(n, 1 + t % 5, t);
    LearnOptions o = FastOptions();
    o.seed = t;
    const LearnResult r =
        *Learn(s, LinearHardInstanceLoss(), kTarget, 5, 0.1, o);
    CertificateLedger ledger(r.certificate);
    std::vector<size_t> idx(static_cast<size_t>(n));
    std::iota(idx.begin(), idx.end(), size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(static_cast<size_t>(t % 6));
    const Model out =
        *UnlearnLazy({idx}, r.model, ComputeSideInformation(s), ledger);
    EXPECT_TRUE(BitwiseEqual(out, r.model));
  }
}

TEST(UnlearnLazyTest, CapacityBoundary) {
  const Dataset s = *GenerateHardDataset(30, 2, 0);
  const LearnResult r =
      *Learn(s, LinearHardInstanceLoss(), kTarget, 3, 0.1, FastOptions());
  CertificateLedger ledger(r.certificate);
  EXPECT_TRUE(IsErrorKind(
      UnlearnLazy({{0, 1, 2, 3}}, r.model, {}, ledger).status(),
      ErrorKind::kCapacityExceeded));
  EXPECT_EQ(ledger.remaining(), 3);
  EXPECT_TRUE(UnlearnLazy({}, r.model, {}, ledger).ok());
  EXPECT_TRUE(UnlearnLazy({{0, 1, 2}}, r.model, {}, ledger).ok());
  EXPECT_EQ(ledger.remaining(), 0);
  EXPECT_TRUE(IsErrorKind(UnlearnLazy({{4}}, r.model, {}, ledger).status(),
                          ErrorKind::kCapacityExceeded));
}

TEST(CertificateLedgerTest, RejectsRepeatsAndOutOfRange) {
  CertificateLedger ledger(MakeCertificate(10, 8));
  EXPECT_TRUE(ledger.Record({{1, 2}}).ok());
  EXPECT_TRUE(
      IsErrorKind(ledger.Record({{2, 3}}), ErrorKind::kOverlappingRequests));
  EXPECT_TRUE(IsErrorKind(ledger.Record({{8}}), ErrorKind::kInvalidParameter));
  EXPECT_EQ(ledger.deleted(), (std::set<size_t>{1, 2}));
  EXPECT_EQ(ledger.requests(), 1);
}

TEST(CertificateLedgerTest, AppendsJsonLines) {
  const std::string path =
      (std::filesystem::temp_directory_path() / "unlearn_ledger_test.jsonl")
          .string();
  std::remove(path.c_str());
  CertificateLedger ledger(MakeCertificate(5, 10), path);
  ledger.set_clock([] { return int64_t{1700000000}; });
  ASSERT_TRUE(ledger.Record({{4, 2}}).ok());
  ASSERT_TRUE(ledger.Record({{7}}).ok());
  std::ifstream in(path);
  std::string line;
  std::vector<nlohmann::json> lines;
  while (std::getline(in, line)) lines.push_back(nlohmann::json::parse(line));
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0]["indices"], nlohmann::json({4, 2}));
  EXPECT_EQ(lines[0]["timestamp"], 1700000000);
  EXPECT_EQ(lines[0]["remaining_capacity"], 3);
  EXPECT_EQ(lines[1]["remaining_capacity"], 2);
  std::remove(path.c_str());
}

TEST(CertificateLedgerTest, OpenResumesFromFile) {
  const std::string path =
      (std::filesystem::temp_directory_path() / "unlearn_ledger_open.jsonl")
          .string();
  std::remove(path.c_str());
  {
    CertificateLedger fresh = *CertificateLedger::Open(MakeCertificate(5, 10),
                                                       path);
    EXPECT_EQ(fresh.remaining(), 5);
    ASSERT_TRUE(fresh.Record({{4, 2}}).ok());
  }
  CertificateLedger resumed =
      *CertificateLedger::Open(MakeCertificate(5, 10), path);
  EXPECT_EQ(resumed.deleted(), (std::set<size_t>{2, 4}));
  EXPECT_EQ(resumed.remaining(), 3);
  EXPECT_TRUE(
      IsErrorKind(resumed.Record({{4}}), ErrorKind::kOverlappingRequests));
  ASSERT_TRUE(resumed.Record({{1, 3, 5}}).ok());
  EXPECT_TRUE(IsErrorKind(resumed.Record({{6}}), ErrorKind::kCapacityExceeded));
  // A smaller certificate cannot absorb the stored history.
  EXPECT_TRUE(IsErrorKind(
      CertificateLedger::Open(MakeCertificate(2, 10), path).status(),
      ErrorKind::kInvalidParameter));
  {
    std::ofstream out(path, std::ios::app);
    out << "not json\n";
  }
  EXPECT_TRUE(IsErrorKind(
      CertificateLedger::Open(MakeCertificate(5, 10), path).status(),
      ErrorKind::kInvalidParameter));
  std::remove(path.c_str());
}

TEST(CertificateJsonTest, RoundTrip) {
  const Dataset s = *GenerateHardDataset(30, 2, 0);
  const LearnResult r =
      *Learn(s, LinearHardInstanceLoss(), kTarget, 3, 0.1, FastOptions());
  const UnlearningCertificate back =
      *CertificateFromJson(CertificateToJson(r.certificate));
  EXPECT_EQ(back.budget.epsilon, r.certificate.budget.epsilon);
  EXPECT_EQ(back.budget.delta, r.certificate.budget.delta);
  EXPECT_EQ(back.capacity, 3);
  EXPECT_EQ(back.rho.rho, r.certificate.rho.rho);
  EXPECT_EQ(back.training_size, 30);
  EXPECT_EQ(back.excess_loss_bound, r.certificate.excess_loss_bound);
}

TEST(RetrainBaselineTest, EmptyRequestMatchesLearn) {
  const Dataset s = *GenerateHardDataset(25, 3, 2);
  LearnOptions o = FastOptions();
  o.seed = 99;
  const LearnResult learned =
      *Learn(s, LinearHardInstanceLoss(), kTarget, 2, 0.1, o);
  const Model retrained =
      *RetrainBaseline(s, {}, LinearHardInstanceLoss(), kTarget, 2, 99, o);
  EXPECT_TRUE(BitwiseEqual(learned.model, retrained));
}

TEST(RetrainBaselineTest, RemovesRequestedPoints) {
  // Five-point d = 1 instance: +1, +1, -1, +1, -1. Removing {0, 2} leaves
  // +1, +1, -1 with mean 1/3.
  const Dataset s = *Dataset::Create({{1.0}, {1.0}, {-1.0}, {1.0}, {-1.0}});
  const Dataset rest = *RemoveIndices(s, {0, 2});
  EXPECT_EQ(rest.size(), 3u);
  EXPECT_EQ((*OneWayMarginal(rest))[0], 1.0 / 3.0);
  LearnOptions o;
  o.learner = LearnerKind::kGaussianMean;
  // The non-private limit exposes the recomputed mean.
  const Model m = *RetrainBaseline(s, {{0, 2}}, LinearHardInstanceLoss(),
                                   {1e6, 0.5}, 1, 3, o);
  EXPECT_NEAR(m.params[0], 1.0 / 3.0, 2e-3);  // sigma is about 3e-4
  EXPECT_TRUE(IsErrorKind(RetrainBaseline(s, {{5}}, LinearHardInstanceLoss(),
                                          kTarget, 1, 3, o)
                              .status(),
                          ErrorKind::kInvalidParameter));
}

TEST(PostProcessTest, IdentityAndProjection) {
  const Dataset s = *GenerateHardDataset(30, 4, 1);
  const UnlearningPair pair =
      MakeLazyPair(LinearHardInstanceLoss(), kTarget, 2, 0.1, FastOptions());
  const LearnResult r = *pair.learn(s, 7);

  const UnlearningPair same =
      PostProcess([](const Model& m) { return m; }, pair, true);
  CertificateLedger l1(r.certificate);
  EXPECT_TRUE(BitwiseEqual(*same.unlearn({{1}}, r.model, {}, l1), r.model));
  EXPECT_TRUE(same.lazy);

  const UnlearningPair shrunk = PostProcess(
      [](const Model& m) {
        Model out = m;
        out.params = ProjectBall(m.params, 0.25);
        return out;
      },
      pair);
  CertificateLedger l2(r.certificate);
  const Model projected = *shrunk.unlearn({{1}}, r.model, {}, l2);
  EXPECT_LE(Norm(projected.params), 0.25);
  EXPECT_EQ(shrunk.budget.epsilon, pair.budget.epsilon);
  EXPECT_EQ(shrunk.budget.delta, pair.budget.delta);
  EXPECT_FALSE(shrunk.lazy);
}

TEST(ChainUnlearnTest, BudgetsAndLaziness) {
  CertificateLedger ledger(MakeCertificate(6, 20));
  Model model;
  model.params = {0.1, 0.2};
  const auto one = *ChainUnlearn({{{3}}}, model, ledger);
  EXPECT_EQ(one.second.epsilon, 0.1);
  EXPECT_NEAR(one.second.delta, 1e-6, 1e-21);

  const auto two = *ChainUnlearn({{{0, 1}}, {{5}}}, model, ledger);
  EXPECT_TRUE(BitwiseEqual(two.first, model));
  const ApproxDpBudget expected = *ChainBudget(2, {0.1, 1e-6});
  EXPECT_EQ(two.second.epsilon, expected.epsilon);
  EXPECT_EQ(two.second.delta, expected.delta);
  EXPECT_NEAR(two.second.delta, 2.1052e-6, 1e-10);
}

TEST(ChainUnlearnTest, Errors) {
  CertificateLedger ledger(MakeCertificate(3, 20));
  Model model;
  EXPECT_TRUE(IsErrorKind(ChainUnlearn({{{0, 1}}, {{1}}}, model, ledger).status(),
                          ErrorKind::kOverlappingRequests));
  EXPECT_TRUE(
      IsErrorKind(ChainUnlearn({{{0, 1}}, {{2, 3}}}, model, ledger).status(),
                  ErrorKind::kCapacityExceeded));
  EXPECT_TRUE(ledger.deleted().empty());  // failed chains record nothing
}

}  // namespace
}  // namespace unlearn
