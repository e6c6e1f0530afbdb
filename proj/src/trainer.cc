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

#include "unlearn/trainer.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "unlearn/errors.h"
#include "unlearn/hard_instance.h"
#include "unlearn/random.h"
#include "unlearn/status_macros.h"

namespace unlearn {
namespace {

absl::string_view StepRuleName(StepRule rule) {
  return rule == StepRule::kConstant ? "constant" : "decaying";
}

absl::string_view OutputRuleName(OutputRule rule) {
  switch (rule) {
    case OutputRule::kLast:
      return "last";
    case OutputRule::kAverage:
      return "average";
    case OutputRule::kSuffixAverage:
      return "suffix_average";
  }
  return "unknown";
}

std::string RhoString(const ZcdpBudget& rho) {
  return rho.is_non_private() ? "inf" : FormatDouble(rho.rho);
}

absl::Status CheckDataset(const Dataset& dataset) {
  if (dataset.empty()) {
    return MakeError(ErrorKind::kEmptyDataset, "training set is empty");
  }
  return absl::OkStatus();
}

void MeanGradient(const LossSpec& loss, const Vector& w, const Dataset& data,
                  const std::vector<size_t>* batch, Vector& scratch,
                  Vector& out) {
  std::fill(out.begin(), out.end(), 0.0);
  const size_t count = batch ? batch->size() : data.size();
  for (size_t k = 0; k < count; ++k) {
    const size_t i = batch ? (*batch)[k] : k;
    loss.gradient(w, data.point(i), scratch);
    for (size_t j = 0; j < out.size(); ++j) out[j] += scratch[j];
  }
  const double inv = 1.0 / static_cast<double>(count);
  for (double& g : out) g *= inv;
}

}  // namespace

uint64_t ConfigFingerprint(const std::string& config) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

LossSpec LinearHardInstanceLoss() {
  LossSpec loss;
  loss.name = "linear";
  loss.convexity = Convexity::kLinear;
  loss.lipschitz = 1.0;
  loss.diameter = 2.0;
  loss.value = [](const Vector& w, const Vector& x) { return -Dot(w, x); };
  loss.gradient = [](const Vector&, const Vector& x, Vector& grad) {
    for (size_t j = 0; j < x.size(); ++j) grad[j] = -x[j];
  };
  loss.gradient_independent_of_params = true;
  loss.empirical_value = [](const Vector& w, const Dataset& data) {
    return LinearLoss(w, data);
  };
  loss.minimizer = [](const Dataset& data) { return MinimizerThetaStar(data); };
  return loss;
}

LossSpec SquaredDistanceLoss(double radius, double data_radius) {
  LossSpec loss;
  loss.name = "squared_distance";
  loss.convexity = Convexity::kStronglyConvex;
  loss.strong_convexity = 1.0;
  loss.lipschitz = radius + data_radius;
  loss.diameter = 2.0 * radius;
  loss.value = [](const Vector& w, const Vector& x) {
    return 0.5 * SquaredDistance(w, x);
  };
  loss.gradient = [](const Vector& w, const Vector& x, Vector& grad) {
    for (size_t j = 0; j < x.size(); ++j) grad[j] = w[j] - x[j];
  };
  // The mean loss is |w - mean|^2 / 2 + const, minimized over the ball by
  // projecting the mean.
  loss.minimizer = [radius](const Dataset& data) -> absl::StatusOr<Vector> {
    UNLEARN_ASSIGN_OR_RETURN(Vector mean, ExactMean(data));
    return ProjectBall(mean, radius);
  };
  return loss;
}

bool BitwiseEqual(const Model& a, const Model& b) {
  if (a.params.size() != b.params.size()) return false;
  if (!a.params.empty() &&
      std::memcmp(a.params.data(), b.params.data(),
                  a.params.size() * sizeof(double)) != 0) {
    return false;
  }
  return std::memcmp(&a.certificate.rho, &b.certificate.rho, sizeof(double)) ==
             0 &&
         a.seed == b.seed && a.learner == b.learner && a.config == b.config &&
         a.fingerprint == b.fingerprint;
}

absl::StatusOr<double> NoiseScale(double lipschitz, int64_t batch,
                                  int64_t steps, const ZcdpBudget& rho) {
  if (rho.is_non_private()) return 0.0;
  if (!(rho.rho > 0.0)) {
    return MakeError(ErrorKind::kInvalidParameter,
                     absl::StrCat("rho must be > 0 (or non-private), got ",
                                  rho.rho));
  }
  if (batch < 1 || steps < 1) {
    return MakeError(ErrorKind::kInvalidParameter,
                     "batch size and step count must be >= 1");
  }
  return (2.0 * lipschitz / static_cast<double>(batch)) *
         std::sqrt(static_cast<double>(steps) / (2.0 * rho.rho));
}

void ProjectBallInPlace(Vector& w, double radius) {
  const double norm = Norm(w);
  if (norm <= radius) return;
  const double scale = radius / norm;
  for (double& v : w) v *= scale;
  // Guard against the rescaled norm rounding just above the radius.
  while (Norm(w) > radius) {
    for (double& v : w) v = std::nextafter(v, 0.0);
  }
}

Vector ProjectBall(const Vector& w, double radius) {
  Vector out = w;
  ProjectBallInPlace(out, radius);
  return out;
}

absl::StatusOr<Model> NoisyGradientDescent(const Dataset& dataset,
                                           const LossSpec& loss,
                                           const TrainerConfig& config) {
  UNLEARN_RETURN_IF_ERROR(CheckDataset(dataset));
  if (config.steps < 1) {
    return MakeError(ErrorKind::kInvalidParameter,
                     absl::StrCat("steps must be >= 1, got ", config.steps));
  }
  if (!(loss.lipschitz > 0.0 && loss.diameter > 0.0)) {
    return MakeError(ErrorKind::kInvalidParameter,
                     "loss needs positive lipschitz constant and diameter");
  }
  const size_t d = dataset.dimension();
  const int64_t n = static_cast<int64_t>(dataset.size());
  const double radius = loss.radius();

  Vector w = config.init.value_or(Vector(d, 0.0));
  if (w.size() != d) {
    return MakeError(ErrorKind::kDimensionMismatch,
                     absl::StrCat("init has dimension ", w.size(),
                                  ", dataset has ", d));
  }
  if (Norm(w) > radius * (1.0 + 1e-12)) {
    return MakeError(ErrorKind::kInvalidParameter, "init lies outside the ball");
  }
  if (config.batch_size < 0 || config.batch_size > n) {
    return MakeError(ErrorKind::kInvalidParameter,
                     absl::StrCat("batch size ", config.batch_size,
                                  " is not in [0, n = ", n, "]"));
  }
  const bool full_batch = config.batch_size == 0 || config.batch_size == n;
  int64_t calibration = full_batch ? n : config.batch_size;
  if (config.calibration_size.has_value()) {
    if (*config.calibration_size < 1) {
      return MakeError(ErrorKind::kInvalidParameter,
                       "calibration size must be >= 1");
    }
    if (full_batch) calibration = *config.calibration_size;
  }
  UNLEARN_ASSIGN_OR_RETURN(
      const double sigma,
      NoiseScale(loss.lipschitz, calibration, config.steps, config.rho));

  const double steps = static_cast<double>(config.steps);
  const double base_scale =
      loss.lipschitz + sigma * std::sqrt(static_cast<double>(d));
  double eta;
  if (config.step_size.has_value()) {
    if (!(*config.step_size >= 0.0)) {
      return MakeError(ErrorKind::kInvalidParameter, "step size must be >= 0");
    }
    eta = *config.step_size;
  } else if (config.step_rule == StepRule::kConstant) {
    eta = loss.diameter / (std::sqrt(steps) * base_scale);
  } else {
    eta = loss.diameter / base_scale;
  }

  Rng rng = MakeRng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector grad(d, 0.0), scratch(d, 0.0), sum(d, 0.0);
  std::vector<size_t> order;
  if (!full_batch) {
    order.resize(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), size_t{0});
  }
  const bool fixed_gradient = full_batch && loss.gradient_independent_of_params;
  if (fixed_gradient) MeanGradient(loss, w, dataset, nullptr, scratch, grad);

  const int64_t suffix_start = config.steps / 2;  // keeps ceil(T/2) iterates
  int64_t averaged = 0;
  std::vector<size_t> batch;
  for (int64_t t = 0; t < config.steps; ++t) {
    if (!fixed_gradient) {
      if (full_batch) {
        MeanGradient(loss, w, dataset, nullptr, scratch, grad);
      } else {
        // Partial Fisher-Yates: a uniform batch without replacement.
        for (int64_t k = 0; k < config.batch_size; ++k) {
          std::uniform_int_distribution<int64_t> pick(k, n - 1);
          std::swap(order[k], order[pick(rng)]);
        }
        batch.assign(order.begin(), order.begin() + config.batch_size);
        MeanGradient(loss, w, dataset, &batch, scratch, grad);
      }
    }
    const double eta_t = config.step_rule == StepRule::kConstant
                             ? eta
                             : eta / std::sqrt(static_cast<double>(t + 1));
    if (sigma > 0.0) {
      for (size_t j = 0; j < d; ++j) {
        w[j] -= eta_t * (grad[j] + sigma * normal(rng));
      }
    } else {
      for (size_t j = 0; j < d; ++j) w[j] -= eta_t * grad[j];
    }
    ProjectBallInPlace(w, radius);
    if (config.observer) config.observer(t, w);
    if (config.output == OutputRule::kAverage ||
        (config.output == OutputRule::kSuffixAverage && t >= suffix_start)) {
      for (size_t j = 0; j < d; ++j) sum[j] += w[j];
      ++averaged;
    }
  }

  Model model;
  model.params = config.output == OutputRule::kLast
                     ? w
                     : ProjectBall(Scaled(sum, 1.0 / averaged), radius);
  model.certificate = config.rho;
  model.seed = config.seed;
  model.learner = "noisy_gd";
  model.config = absl::StrCat(
      "learner=noisy_gd;loss=", loss.name, ";n=", n, ";d=", d,
      ";steps=", config.steps, ";rule=", StepRuleName(config.step_rule),
      ";eta=", FormatDouble(eta), ";sigma=", FormatDouble(sigma),
      ";rho=", RhoString(config.rho), ";batch=", config.batch_size,
      ";calibration=", calibration, ";output=", OutputRuleName(config.output),
      ";seed=", config.seed);
  model.fingerprint = ConfigFingerprint(model.config);
  return model;
}

absl::StatusOr<double> MeanReleaseSensitivity(
    const Dataset& dataset, std::optional<int64_t> calibration_size) {
  UNLEARN_RETURN_IF_ERROR(CheckDataset(dataset));
  double max_norm = 0.0;
  for (const Vector& x : dataset.points()) max_norm = std::max(max_norm, Norm(x));
  int64_t n = static_cast<int64_t>(dataset.size());
  if (calibration_size.has_value()) {
    if (*calibration_size < 1) {
      return MakeError(ErrorKind::kInvalidParameter,
                       "calibration size must be >= 1");
    }
    n = *calibration_size;
  }
  return 2.0 * max_norm / static_cast<double>(n);
}

absl::StatusOr<Vector> GaussianMeanRelease(
    const Dataset& dataset, const ZcdpBudget& rho, uint64_t seed,
    std::optional<int64_t> calibration_size) {
  UNLEARN_ASSIGN_OR_RETURN(const double sensitivity,
                           MeanReleaseSensitivity(dataset, calibration_size));
  UNLEARN_ASSIGN_OR_RETURN(Vector out, ExactMean(dataset));
  if (rho.is_non_private()) return out;
  if (!(rho.rho > 0.0)) {
    return MakeError(ErrorKind::kInvalidParameter,
                     absl::StrCat("rho must be > 0, got ", rho.rho));
  }
  const double sigma = sensitivity / std::sqrt(2.0 * rho.rho);
  Rng rng = MakeRng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : out) v += sigma * normal(rng);
  return out;
}

absl::StatusOr<double> EmpiricalLoss(const Vector& w, const Dataset& dataset,
                                     const LossSpec& loss) {
  UNLEARN_RETURN_IF_ERROR(CheckDataset(dataset));
  if (w.size() != dataset.dimension()) {
    return MakeError(ErrorKind::kDimensionMismatch,
                     absl::StrCat("parameters have dimension ", w.size(),
                                  ", dataset has ", dataset.dimension()));
  }
  if (loss.empirical_value) return loss.empirical_value(w, dataset);
  std::vector<double> values;
  values.reserve(dataset.size());
  for (const Vector& x : dataset.points()) values.push_back(loss.value(w, x));
  return ExactAverage(values, static_cast<double>(dataset.size()));
}

absl::StatusOr<double> ExcessEmpiricalLoss(const Vector& w,
                                           const Dataset& dataset,
                                           const LossSpec& loss) {
  UNLEARN_ASSIGN_OR_RETURN(const double at_w, EmpiricalLoss(w, dataset, loss));
  Vector best;
  if (loss.minimizer) {
    UNLEARN_ASSIGN_OR_RETURN(best, loss.minimizer(dataset));
  } else {
    TrainerConfig reference;
    reference.steps = 200000;
    reference.step_rule = StepRule::kDecaying;
    reference.output = OutputRule::kLast;
    UNLEARN_ASSIGN_OR_RETURN(Model m,
                             NoisyGradientDescent(dataset, loss, reference));
    best = std::move(m.params);
  }
  UNLEARN_ASSIGN_OR_RETURN(const double at_best,
                           EmpiricalLoss(best, dataset, loss));
  return std::max(0.0, at_w - at_best);
}

std::string ModelToJson(const Model& model) {
  nlohmann::json j;
  j["dimension"] = model.params.size();
  j["params"] = model.params;
  if (model.certificate.is_non_private()) {
    j["rho"] = "non-private";
  } else {
    j["rho"] = model.certificate.rho;
  }
  j["seed"] = model.seed;
  j["learner"] = model.learner;
  j["config"] = model.config;
  j["fingerprint"] = model.fingerprint;
  return j.dump(2);
}

absl::StatusOr<Model> ModelFromJson(const std::string& json) {
  nlohmann::json j = nlohmann::json::parse(json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return MakeError(ErrorKind::kInvalidParameter, "model is not JSON");
  }
  try {
    Model m;
    m.params = j.at("params").get<Vector>();
    if (j.at("dimension").get<size_t>() != m.params.size()) {
      return MakeError(ErrorKind::kDimensionMismatch,
                       "model dimension does not match its parameters");
    }
    const nlohmann::json& rho = j.at("rho");
    m.certificate = rho.is_string() ? ZcdpBudget::NonPrivate()
                                    : ZcdpBudget{rho.get<double>()};
    m.seed = j.at("seed").get<uint64_t>();
    m.learner = j.value("learner", "");
    m.config = j.value("config", "");
    m.fingerprint = j.value("fingerprint", uint64_t{0});
    return m;
  } catch (const nlohmann::json::exception& e) {
    return MakeError(ErrorKind::kInvalidParameter,
                     absl::StrCat("malformed model: ", e.what()));
  }
}

absl::Status WriteModel(const Model& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) return absl::InvalidArgumentError(absl::StrCat("cannot open ", path));
  out << ModelToJson(model) << '\n';
  return out ? absl::OkStatus()
             : absl::DataLossError(absl::StrCat("failed writing ", path));
}

absl::StatusOr<Model> ReadModel(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ModelFromJson(buffer.str());
}

}  // namespace unlearn
