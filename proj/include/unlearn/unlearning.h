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

// Learning and unlearning through differential privacy. A model trained
// with group-m privacy needs no work to forget up to m points: the lazy
// unlearner returns it unchanged, and its output is (epsilon, delta)-close
// to a model retrained without the deleted points.

#ifndef UNLEARN_UNLEARNING_H_
#define UNLEARN_UNLEARNING_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "unlearn/accountant.h"
#include "unlearn/dataset.h"
#include "unlearn/trainer.h"

namespace unlearn {

struct DeletionRequest {
  std::vector<size_t> indices;

  size_t size() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
};

// Indices must be distinct and below `dataset_size`.
absl::Status ValidateRequest(const DeletionRequest& request,
                             size_t dataset_size);

// The m points with the largest <x, q(S)>, ties broken by lower index.
// Removing them moves the mean furthest against its own direction.
absl::StatusOr<DeletionRequest> AlignedDeletion(const Dataset& dataset,
                                                int64_t m);

// Auxiliary state kept for the unlearner. Always empty here.
struct SideInformation {
  std::string Serialize() const;
};
SideInformation ComputeSideInformation(const Dataset& dataset);

struct UnlearningCertificate {
  ApproxDpBudget budget;
  int64_t capacity = 0;
  CapacityRegime regime = CapacityRegime::kApproxConvexFloor;
  bool lazy = true;
  double alpha = 0.0;
  // Capacity the regime's formula predicts for (n, d, alpha, budget) with
  // the supplied constant; informational.
  int64_t predicted_capacity = 0;
  // D L (1/sqrt(n) + m sqrt(d ln(1/delta)) / (epsilon n)), unit constant.
  double excess_loss_bound = 0.0;
  ZcdpBudget rho;
  int64_t training_size = 0;
};

std::string CertificateToJson(const UnlearningCertificate& certificate);
absl::StatusOr<UnlearningCertificate> CertificateFromJson(
    const std::string& json);

// Tracks deletions made against one certificate. Once cumulative deletions
// would exceed the capacity the request is refused. Not thread-safe; callers
// serialize updates.
class CertificateLedger {
 public:
  // When `path` is set every recorded request appends one JSON line
  // {"indices", "timestamp", "remaining_capacity"}.
  CertificateLedger(UnlearningCertificate certificate,
                    std::optional<std::string> path = std::nullopt);

  // Resumes the ledger stored at `path`, replaying its lines; a missing
  // file starts an empty ledger. Lines that fail the request checks are
  // InvalidParameter.
  static absl::StatusOr<CertificateLedger> Open(
      UnlearningCertificate certificate, const std::string& path);

  // Validates and records a request: out-of-range or repeated indices are
  // InvalidParameter, indices already deleted are OverlappingRequests, and
  // exceeding the capacity is CapacityExceeded. Nothing is recorded on error.
  absl::Status Record(const DeletionRequest& request);
  // The same checks without recording.
  absl::Status Check(const DeletionRequest& request) const;

  const UnlearningCertificate& certificate() const { return certificate_; }
  int64_t remaining() const;
  const std::set<size_t>& deleted() const { return deleted_; }
  int64_t requests() const { return requests_; }

  // Clock used for ledger timestamps (seconds since the epoch); overridable
  // for deterministic output.
  void set_clock(std::function<int64_t()> clock) { clock_ = std::move(clock); }

 private:
  UnlearningCertificate certificate_;
  std::optional<std::string> path_;
  std::set<size_t> deleted_;
  int64_t requests_ = 0;
  std::function<int64_t()> clock_;
};

enum class LearnerKind {
  kNoisyGd,
  // One-shot Gaussian release of the dataset mean (hard instance).
  kGaussianMean,
};

absl::StatusOr<LearnerKind> ParseLearnerKind(absl::string_view name);
absl::string_view LearnerName(LearnerKind kind);

struct LearnOptions {
  LearnerKind learner = LearnerKind::kNoisyGd;
  // Trainer settings; rho, seed and steps are overwritten by Learn.
  TrainerConfig trainer;
  // Gradient steps; 0 selects the default T = n^2.
  int64_t steps = 0;
  uint64_t seed = 0;
  // Overrides n in the noise calibration (see TrainerConfig).
  std::optional<int64_t> calibration_size;
  CapacityRegime regime = CapacityRegime::kApproxConvexFloor;
  double capacity_constant = 1.0;
};

struct LearnResult {
  Model model;
  UnlearningCertificate certificate;
};

// Trains with rho = RhoForTarget(target, m), so the release is
// (epsilon, delta)-indistinguishable for datasets differing in m points.
absl::StatusOr<LearnResult> Learn(const Dataset& dataset, const LossSpec& loss,
                                  const ApproxDpBudget& target, int64_t m,
                                  double alpha,
                                  const LearnOptions& options = {});

// Returns `model` unchanged after recording the request in `ledger`.
absl::StatusOr<Model> UnlearnLazy(const DeletionRequest& request,
                                  const Model& model,
                                  const SideInformation& side,
                                  CertificateLedger& ledger);

// Retrains on S \ U with `seed`. Unless options.calibration_size is set
// the noise is calibrated to |S|, which keeps the noise scale of the
// reference identical to the deployed model's.
absl::StatusOr<Model> RetrainBaseline(const Dataset& dataset,
                                      const DeletionRequest& request,
                                      const LossSpec& loss,
                                      const ApproxDpBudget& target, int64_t m,
                                      uint64_t seed, LearnOptions options = {});

// A learning algorithm and its unlearner.
struct UnlearningPair {
  std::function<absl::StatusOr<LearnResult>(const Dataset&, uint64_t seed)>
      learn;
  std::function<absl::StatusOr<Model>(const DeletionRequest&, const Model&,
                                      const SideInformation&,
                                      CertificateLedger&)>
      unlearn;
  ApproxDpBudget budget;
  bool lazy = true;
};

UnlearningPair MakeLazyPair(const LossSpec& loss, const ApproxDpBudget& target,
                            int64_t m, double alpha,
                            const LearnOptions& options = {});

// (f o unlearn, learn) with the same budget. `f` must not look at the data.
// The result is not lazy in general, so the flag is cleared unless
// `f_is_identity`.
UnlearningPair PostProcess(std::function<Model(const Model&)> f,
                           UnlearningPair pair, bool f_is_identity = false);

// Sequentially unlearns pairwise-disjoint requests with the lazy unlearner.
// All requests are validated before any is recorded.
absl::StatusOr<std::pair<Model, ApproxDpBudget>> ChainUnlearn(
    const std::vector<DeletionRequest>& requests, const Model& model,
    CertificateLedger& ledger);

}  // namespace unlearn

#endif  // UNLEARN_UNLEARNING_H_
