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

// The scaled-hypercube instance family. Points live in {-1/sqrt(d),
// +1/sqrt(d)}^d, so every point has unit norm. The loss is linear,
// L(theta, S) = -<theta, q(S)>, with q(S) the coordinate-wise mean (the
// one-way marginal). Over the unit ball its minimizer is q(S)/|q(S)| and
//
//   L(theta, S) - L(theta*, S) = |q(S)|/2 * |theta - theta*|^2
//
// for every unit theta.

#ifndef UNLEARN_HARD_INSTANCE_H_
#define UNLEARN_HARD_INSTANCE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "unlearn/dataset.h"
#include "unlearn/vector_ops.h"

namespace unlearn {

inline constexpr double kDefaultBias = 0.75;
inline constexpr double kDegenerateTolerance = 1e-12;

// Coordinate value of a hard-instance point in dimension d.
inline double HypercubeCoordinate(size_t d) {
  return 1.0 / std::sqrt(static_cast<double>(d));
}

// Independent coordinates, coordinate i equal to +1/sqrt(d) with
// probability bias[i] and -1/sqrt(d) otherwise.
class ProductDistribution {
 public:
  static absl::StatusOr<ProductDistribution> Create(std::vector<double> bias);
  static absl::StatusOr<ProductDistribution> Uniform(size_t d,
                                                     double bias = kDefaultBias);

  size_t dimension() const { return bias_.size(); }
  const std::vector<double>& bias() const { return bias_; }
  // mu = (2p - 1) / sqrt(d).
  Vector Mean() const;

 private:
  explicit ProductDistribution(std::vector<double> bias)
      : bias_(std::move(bias)) {}
  std::vector<double> bias_;
};

// n i.i.d. draws from the product distribution; deterministic per seed. The
// default bias is 3/4 in every coordinate.
absl::StatusOr<Dataset> GenerateHardDataset(
    int64_t n, int64_t d, uint64_t seed,
    std::optional<std::vector<double>> bias = std::nullopt);

// Draws n points from `dist` using `seed`.
absl::StatusOr<Dataset> SampleProduct(const ProductDistribution& dist,
                                      int64_t n, uint64_t seed);

// True when every coordinate is exactly +-1/sqrt(d).
bool IsHardInstance(const Dataset& dataset);

// q(S) = (1/n) sum_i x_i, correctly rounded per coordinate.
absl::StatusOr<Vector> OneWayMarginal(const Dataset& dataset);

// -<theta, q(S)>.
absl::StatusOr<double> LinearLoss(const Vector& theta, const Dataset& dataset);

// q(S) / |q(S)|; DegenerateDataset when |q(S)| <= kDegenerateTolerance.
absl::StatusOr<Vector> MinimizerThetaStar(const Dataset& dataset);
absl::StatusOr<Vector> UnitDirection(const Vector& q);

// Appends ceil(r/2) copies of `anchor` then floor(r/2) copies of -anchor,
// r = n_target - |dataset|.
absl::StatusOr<Dataset> PadDataset(const Dataset& dataset, int64_t n_target,
                                   const Vector& anchor);

// Each point repeated m times consecutively.
absl::StatusOr<Dataset> ReplicateDataset(const Dataset& dataset, int64_t m);

// {+-1}^d <-> {+-1/sqrt(d)}^d. Both directions check the support and map
// the two admissible values exactly, so the round trip is bitwise.
absl::StatusOr<Dataset> RescaleToHardInstance(const Dataset& sign_cube);
absl::StatusOr<Dataset> RescaleToSignCube(const Dataset& hard_instance);

// F(theta) - min F = -<theta, mu> + |mu| for the per-point linear loss.
absl::StatusOr<double> PopulationExcessRisk(const Vector& theta,
                                            const ProductDistribution& dist);

// Searches a uniform bias so that |q(S)| of the generated instance lies in
// [norm_lo, norm_hi]. This is a heuristic: the uniforms are fixed by the
// seed and the bias is bisected, then scanned, over [1/2, 1].
struct MarginalNormResult {
  Dataset dataset;
  double bias = kDefaultBias;
  double marginal_norm = 0.0;
};
absl::StatusOr<MarginalNormResult> GenerateWithMarginalNorm(int64_t n,
                                                            int64_t d,
                                                            uint64_t seed,
                                                            double norm_lo,
                                                            double norm_hi);

// Generator parameters written next to a CSV export.
struct HardInstanceManifest {
  int64_t n = 0;
  int64_t d = 0;
  uint64_t seed = 0;
  std::vector<double> bias;
};
std::string ManifestToJson(const HardInstanceManifest& manifest);
absl::StatusOr<HardInstanceManifest> ManifestFromJson(const std::string& json);
absl::Status WriteManifest(const HardInstanceManifest& manifest,
                           const std::string& path);

}  // namespace unlearn

#endif  // UNLEARN_HARD_INSTANCE_H_
