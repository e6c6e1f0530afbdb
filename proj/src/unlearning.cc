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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "unlearn/errors.h"
#include "unlearn/hard_instance.h"
#include "unlearn/status_macros.h"

namespace unlearn {
namespace {

int64_t WallClockSeconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

absl::Status ValidateRequest(const DeletionRequest& request,
                             size_t dataset_size) {
  std::set<size_t> seen;
  for (size_t i : request.indices) {
    if (i >= dataset_size) {
      return MakeError(ErrorKind::kInvalidParameter,
                       absl::StrCat("index ", i, " is outside the training set",
                                    " of ", dataset_size, " points"));
    }
    if (!seen.insert(i).second) {
      return MakeError(ErrorKind::kInvalidParameter,
                       absl::StrCat("index ", i, " is repeated in the request"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<DeletionRequest> AlignedDeletion(const Dataset& dataset,
                                                int64_t m) {
  if (m < 0 || static_cast<size_t>(m) > dataset.size()) {
    return MakeError(ErrorKind::kInvalidParameter,
                     absl::StrCat("cannot delete ", m, " of ", dataset.size(),
                                  " points"));
  }
  UNLEARN_ASSIGN_OR_RETURN(const Vector q, OneWayMarginal(dataset));
  std::vector<double> score(dataset.size());
  for (size_t i = 0; i < dataset.size(); ++i) {
    score[i] = Dot(dataset.point(i), q);
  }
  std::vector<size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return score[a] > score[b]; });
  order.resize(static_cast<size_t>(m));
  std::sort(order.begin(), order.end());
  return DeletionRequest{std::move(order)};
}

std::string SideInformation::Serialize() const { return "{}"; }

SideInformation ComputeSideInformation(const Dataset&) { return {}; }

std::string CertificateToJson(const UnlearningCertificate& c) {
  nlohmann::json j;
  j["epsilon"] = c.budget.epsilon;
  j["delta"] = c.budget.delta;
  j["capacity"] = c.capacity;
  j["regime"] = std::string(RegimeName(c.regime));
  j["lazy"] = c.lazy;
  j["alpha"] = c.alpha;
  j["predicted_capacity"] = c.predicted_capacity;
  j["excess_loss_bound"] = c.excess_loss_bound;
  if (c.rho.is_non_private()) {
    j["rho"] = "non-private";
  } else {
    j["rho"] = c.rho.rho;
  }
  j["training_size"] = c.training_size;
  return j.dump(2);
}

absl::StatusOr<UnlearningCertificate> CertificateFromJson(
    const std::string& json) {
  nlohmann::json j = nlohmann::json::parse(json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return MakeError(ErrorKind::kInvalidParameter, "certificate is not JSON");
  }
  try {
    UnlearningCertificate c;
    c.budget = {j.at("epsilon").get<double>(), j.at("delta").get<double>()};
    c.capacity = j.at("capacity").get<int64_t>();
    UNLEARN_ASSIGN_OR_RETURN(
        c.regime, ParseCapacityRegime(j.at("regime").get<std::string>()));
    c.lazy = j.at("lazy").get<bool>();
    c.alpha = j.value("alpha", 0.0);
    c.predicted_capacity = j.value("predicted_capacity", int64_t{0});
    c.excess_loss_bound = j.value("excess_loss_bound", 0.0);
    const nlohmann::json& rho = j.at("rho");
    c.rho = rho.is_string() ? ZcdpBudget::NonPrivate()
                            : ZcdpBudget{rho.get<double>()};
    c.training_size = j.at("training_size").get<int64_t>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    return MakeError(ErrorKind::kInvalidParameter,
                     absl::StrCat("malformed certificate: ", e.what()));
  }
}

CertificateLedger::CertificateLedger(UnlearningCertificate certificate,
                                     std::optional<std::string> path)
    : certificate_(std::move(certificate)),
      path_(std::move(path)),
      clock_(WallClockSeconds) {}

absl::StatusOr<CertificateLedger> CertificateLedger::Open(
    UnlearningCertificate certificate, const std::string& path) {
  CertificateLedger ledger(std::move(certificate));
  std::ifstream in(path);
  std::string line;
  int64_t line_number = 0;
  while (in && std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    DeletionRequest request;
    if (j.is_discarded() || !j.is_object() || !j.contains("indices") ||
        !j["indices"].is_array()) {
      return MakeError(ErrorKind::kInvalidParameter,
                       absl::StrCat(path, ":", line_number,
                                    ": malformed ledger line"));
    }
    for (const nlohmann::json& index : j["indices"]) {
      if (!index.is_number_unsigned()) {
        return MakeError(ErrorKind::kInvalidParameter,
                         absl::StrCat(path, ":", line_number,
                                      ": index is not a nonnegative integer"));
      }
      request.indices.push_back(index.get<size_t>());
    }
    const absl::Status status = ledger.Record(request);
    if (!status.ok()) {
      return MakeError(ErrorKind::kInvalidParameter,
                       absl::StrCat(path, ":", line_number, ": ",
                                    status.message()));
    }
  }
  ledger.path_ = path;
  return ledger;
}

int64_t CertificateLedger::remaining() const {
  return certificate_.capacity - static_cast<int64_t>(deleted_.size());
}

absl::Status CertificateLedger::Check(const DeletionRequest& request) const {
  UNLEARN_RETURN_IF_ERROR(ValidateRequest(
      request, static_cast<size_t>(certificate_.training_size)));
  for (size_t i : request.indices) {
    if (deleted_.count(i) > 0) {
      return MakeError(ErrorKind::kOverlappingRequests,
                       absl::StrCat("index ", i, " was already deleted"));
    }
  }
  if (static_cast<int64_t>(request.size()) > remaining()) {
    return MakeError(
        ErrorKind::kCapacityExceeded,
        absl::StrCat("request of ", request.size(), " deletions exceeds the ",
                     remaining(), " remaining of capacity ",
                     certificate_.capacity));
  }
  return absl::OkStatus();
}

absl::Status CertificateLedger::Record(const DeletionRequest& request) {
  UNLEARN_RETURN_IF_ERROR(Check(request));
  deleted_.insert(request.indices.begin(), request.indices.end());
  ++requests_;
  if (path_.has_value()) {
    nlohmann::json line;
    line["indices"] = request.indices;
    line["timestamp"] = clock_();
    line["remaining_capacity"] = remaining();
    std::ofstream out(*path_, std::ios::app);
    out << line.dump() << '\n';
    if (!out) {
      return absl::DataLossError(
          absl::StrCat("failed appending to ledger ", *path_));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<LearnerKind> ParseLearnerKind(absl::string_view name) {
  if (name == "noisy_gd" || name == "noisy-gd") return LearnerKind::kNoisyGd;
  if (name == "gaussian_mean" || name == "gaussian-mean") {
    return LearnerKind::kGaussianMean;
  }
  return MakeError(ErrorKind::kInvalidParameter,
                   absl::StrCat("unknown learner '", name, "'"));
}

absl::string_view LearnerName(LearnerKind kind) {
  return kind == LearnerKind::kNoisyGd ? "noisy_gd" : "gaussian_mean";
}

absl::StatusOr<LearnResult> Learn(const Dataset& dataset, const LossSpec& loss,
                                  const ApproxDpBudget& target, int64_t m,
                                  double alpha, const LearnOptions& options) {
  if (dataset.empty()) {
    return MakeError(ErrorKind::kEmptyDataset, "training set is empty");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    return MakeError(ErrorKind::kInvalidParameter,
                     absl::StrCat("alpha must lie in [0, 1], got ", alpha));
  }
  UNLEARN_ASSIGN_OR_RETURN(const ZcdpBudget rho, RhoForTarget(target, m));
  const int64_t n = static_cast<int64_t>(dataset.size());
  const int64_t d = static_cast<int64_t>(dataset.dimension());

  UnlearningCertificate cert;
  cert.budget = target;
  cert.capacity = m;
  cert.regime = options.regime;
  cert.lazy = true;
  cert.alpha = alpha;
  cert.rho = rho;
  cert.training_size = n;
  CapacityQuery query;
  query.regime = options.regime;
  query.n = n;
  query.d = d;
  query.alpha = alpha;
  query.budget = target;
  query.constant = options.capacity_constant;
  query.lipschitz = loss.lipschitz;
  if (loss.strong_convexity > 0.0) query.strong_convexity = loss.strong_convexity;
  UNLEARN_ASSIGN_OR_RETURN(cert.predicted_capacity, DeletionCapacity(query));
  const double nd = static_cast<double>(n);
  cert.excess_loss_bound =
      loss.diameter * loss.lipschitz *
      (1.0 / std::sqrt(nd) +
       static_cast<double>(m) *
           std::sqrt(static_cast<double>(d) * -std::log(target.delta)) /
           (target.epsilon * nd));

  LearnResult result;
  result.certificate = cert;
  if (options.learner == LearnerKind::kGaussianMean) {
    UNLEARN_ASSIGN_OR_RETURN(
        Vector params, GaussianMeanRelease(dataset, rho, options.seed,
                                           options.calibration_size));
    Model& model = result.model;
    model.params = std::move(params);
    model.certificate = rho;
    model.seed = options.seed;
    model.learner = std::string(LearnerName(options.learner));
    model.config = absl::StrCat(
        "learner=gaussian_mean;n=", n, ";d=", d, ";rho=", FormatDouble(rho.rho),
        ";calibration=", options.calibration_size.value_or(n),
        ";seed=", options.seed);
    model.fingerprint = ConfigFingerprint(model.config);
    return result;
  }

  TrainerConfig config = options.trainer;
  config.steps = options.steps > 0 ? options.steps : n * n;
  config.rho = rho;
  config.seed = options.seed;
  if (options.calibration_size.has_value()) {
    config.calibration_size = options.calibration_size;
  }
  UNLEARN_ASSIGN_OR_RETURN(result.model,
                           NoisyGradientDescent(dataset, loss, config));
  return result;
}

absl::StatusOr<Model> UnlearnLazy(const DeletionRequest& request,
                                  const Model& model, const SideInformation&,
                                  CertificateLedger& ledger) {
  UNLEARN_RETURN_IF_ERROR(ledger.Record(request));
  return model;
}

absl::StatusOr<Model> RetrainBaseline(const Dataset& dataset,
                                      const DeletionRequest& request,
                                      const LossSpec& loss,
                                      const ApproxDpBudget& target, int64_t m,
                                      uint64_t seed, LearnOptions options) {
  UNLEARN_RETURN_IF_ERROR(ValidateRequest(request, dataset.size()));
  UNLEARN_ASSIGN_OR_RETURN(const Dataset remainder,
                           RemoveIndices(dataset, request.indices));
  if (!options.calibration_size.has_value()) {
    options.calibration_size = static_cast<int64_t>(dataset.size());
  }
  options.seed = seed;
  UNLEARN_ASSIGN_OR_RETURN(LearnResult learned,
                           Learn(remainder, loss, target, m, 0.0, options));
  CertificateLedger ledger(learned.certificate);
  return UnlearnLazy(DeletionRequest{}, learned.model,
                     ComputeSideInformation(remainder), ledger);
}

UnlearningPair MakeLazyPair(const LossSpec& loss, const ApproxDpBudget& target,
                            int64_t m, double alpha,
                            const LearnOptions& options) {
  UnlearningPair pair;
  pair.learn = [=](const Dataset& data,
                   uint64_t seed) -> absl::StatusOr<LearnResult> {
    LearnOptions o = options;
    o.seed = seed;
    return Learn(data, loss, target, m, alpha, o);
  };
  pair.unlearn = UnlearnLazy;
  pair.budget = target;
  pair.lazy = true;
  return pair;
}

UnlearningPair PostProcess(std::function<Model(const Model&)> f,
                           UnlearningPair pair, bool f_is_identity) {
  auto inner = std::move(pair.unlearn);
  pair.unlearn = [f = std::move(f), inner = std::move(inner)](
                     const DeletionRequest& request, const Model& model,
                     const SideInformation& side,
                     CertificateLedger& ledger) -> absl::StatusOr<Model> {
    UNLEARN_ASSIGN_OR_RETURN(Model out, inner(request, model, side, ledger));
    return f(out);
  };
  pair.lazy = pair.lazy && f_is_identity;
  return pair;
}

absl::StatusOr<std::pair<Model, ApproxDpBudget>> ChainUnlearn(
    const std::vector<DeletionRequest>& requests, const Model& model,
    CertificateLedger& ledger) {
  if (requests.empty()) {
    return MakeError(ErrorKind::kInvalidParameter, "no requests to chain");
  }
  if (!ledger.certificate().lazy) {
    return MakeError(ErrorKind::kInvalidParameter,
                     "chaining requires a lazy unlearning pair");
  }
  std::set<size_t> all;
  for (const DeletionRequest& r : requests) {
    UNLEARN_RETURN_IF_ERROR(ValidateRequest(
        r, static_cast<size_t>(ledger.certificate().training_size)));
    for (size_t i : r.indices) {
      if (!all.insert(i).second) {
        return MakeError(ErrorKind::kOverlappingRequests,
                         absl::StrCat("index ", i,
                                      " appears in more than one request"));
      }
    }
  }
  // One combined check so that a failing chain records nothing.
  UNLEARN_RETURN_IF_ERROR(
      ledger.Check(DeletionRequest{std::vector<size_t>(all.begin(), all.end())}));
  const SideInformation side;
  Model current = model;
  for (const DeletionRequest& r : requests) {
    UNLEARN_ASSIGN_OR_RETURN(current, UnlearnLazy(r, current, side, ledger));
  }
  UNLEARN_ASSIGN_OR_RETURN(
      const ApproxDpBudget budget,
      ChainBudget(static_cast<int64_t>(requests.size()),
                  ledger.certificate().budget));
  return std::make_pair(std::move(current), budget);
}

}  // namespace unlearn
