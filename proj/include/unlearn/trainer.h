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

// zCDP projected noisy gradient descent over the centered ball of diameter
// D, and a one-shot Gaussian release of the dataset mean.

#ifndef UNLEARN_TRAINER_H_
#define UNLEARN_TRAINER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "unlearn/accountant.h"
#include "unlearn/dataset.h"
#include "unlearn/vector_ops.h"

namespace unlearn {

enum class Convexity { kConvex, kStronglyConvex, kLinear };

// A per-point loss f(w, x) on the ball of radius diameter/2. The gradient
// norm must not exceed `lipschitz` anywhere on the domain.
struct LossSpec {
  std::string name;
  Convexity convexity = Convexity::kConvex;
  double lipschitz = 1.0;
  double diameter = 2.0;
  double strong_convexity = 0.0;

  std::function<double(const Vector& w, const Vector& x)> value;
  // Writes the gradient of f(., x) at w into `grad` (pre-sized to d).
  std::function<void(const Vector& w, const Vector& x, Vector& grad)> gradient;
  // Set when the gradient does not depend on w; the full-batch gradient is
  // then computed once.
  bool gradient_independent_of_params = false;
  // Optional closed-form empirical loss and minimizer over the ball.
  std::function<absl::StatusOr<double>(const Vector&, const Dataset&)>
      empirical_value;
  std::function<absl::StatusOr<Vector>(const Dataset&)> minimizer;

  double radius() const { return diameter / 2.0; }
};

// f(theta, x) = -<theta, x> on the unit ball: L = 1, D = 2. The empirical
// loss is -<theta, q(S)>.
LossSpec LinearHardInstanceLoss();

// f(w, x) = |w - x|^2 / 2 on the ball of radius `radius`, for data with
// norm at most `data_radius`: 1-strongly convex with
// L = radius + data_radius.
LossSpec SquaredDistanceLoss(double radius, double data_radius);

enum class StepRule { kConstant, kDecaying };

enum class OutputRule {
  kLast,
  kAverage,
  // Mean of the last ceil(T/2) iterates.
  kSuffixAverage,
};

struct TrainerConfig {
  int64_t steps = 1;
  StepRule step_rule = StepRule::kConstant;
  // Base step size; defaults to D / (sqrt(T) (L + sigma sqrt(d))) for the
  // constant rule and D / (L + sigma sqrt(d)) for the decaying rule, which
  // uses eta / sqrt(t + 1) at step t.
  std::optional<double> step_size;
  ZcdpBudget rho = ZcdpBudget::NonPrivate();
  uint64_t seed = 0;
  // Defaults to the origin.
  std::optional<Vector> init;
  // 0 selects full-batch gradients.
  int64_t batch_size = 0;
  OutputRule output = OutputRule::kSuffixAverage;
  // Dataset size used to calibrate the noise; defaults to the training set
  // size. Set it to a public upper bound to keep the noise scale fixed across
  // datasets of different sizes.
  std::optional<int64_t> calibration_size;
  // Called with every iterate after projection; for diagnostics.
  std::function<void(int64_t step, const Vector& w)> observer;
};

struct Model {
  Vector params;
  // The zCDP budget the release satisfies (infinite when non-private).
  ZcdpBudget certificate;
  uint64_t seed = 0;
  std::string learner;
  std::string config;  // canonical description of the training run
  uint64_t fingerprint = 0;
};

// 64-bit FNV-1a hash of a canonical configuration string.
uint64_t ConfigFingerprint(const std::string& config);

// Equality of every field, comparing parameters bit by bit.
bool BitwiseEqual(const Model& a, const Model& b);

// Per-coordinate noise scale (2L/b) sqrt(T / (2 rho)) for batch size b.
absl::StatusOr<double> NoiseScale(double lipschitz, int64_t batch, int64_t steps,
                                  const ZcdpBudget& rho);

Vector ProjectBall(const Vector& w, double radius);
void ProjectBallInPlace(Vector& w, double radius);

absl::StatusOr<Model> NoisyGradientDescent(const Dataset& dataset,
                                           const LossSpec& loss,
                                           const TrainerConfig& config);

// q(S) plus N(0, sigma^2 I) with sigma = (2 max|x| / n) / sqrt(2 rho); the
// exact mean is returned for a non-private rho. `calibration_size`
// overrides n in the sensitivity.
absl::StatusOr<Vector> GaussianMeanRelease(
    const Dataset& dataset, const ZcdpBudget& rho, uint64_t seed,
    std::optional<int64_t> calibration_size = std::nullopt);

// Replace-one l2 sensitivity of the mean release.
absl::StatusOr<double> MeanReleaseSensitivity(
    const Dataset& dataset, std::optional<int64_t> calibration_size);

// Mean of f(w, x_i) over the dataset.
absl::StatusOr<double> EmpiricalLoss(const Vector& w, const Dataset& dataset,
                                     const LossSpec& loss);

// Empirical loss at w minus the minimum over the ball. Uses the closed-form
// minimizer when the loss provides one and a long noiseless reference run
// otherwise.
absl::StatusOr<double> ExcessEmpiricalLoss(const Vector& w,
                                           const Dataset& dataset,
                                           const LossSpec& loss);

std::string ModelToJson(const Model& model);
absl::StatusOr<Model> ModelFromJson(const std::string& json);
absl::Status WriteModel(const Model& model, const std::string& path);
absl::StatusOr<Model> ReadModel(const std::string& path);

}  // namespace unlearn

#endif  // UNLEARN_TRAINER_H_
