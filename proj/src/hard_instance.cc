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

#include "unlearn/hard_instance.h"

#include <cmath>
#include <fstream>
#include <random>
#include <utility>

#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "unlearn/errors.h"
#include "unlearn/random.h"
#include "unlearn/status_macros.h"

namespace unlearn {
namespace {

absl::Status CheckSizes(int64_t n, int64_t d) {
  if (n < 1 || d < 1) {
    return MakeError(ErrorKind::kInvalidParameter,
                     absl::StrCat("need n, d >= 1, got n=", n, " d=", d));
  }
  return absl::OkStatus();
}

// Row-major n x d uniforms in [0, 1) drawn from `seed`.
std::vector<double> DrawUniforms(int64_t n, int64_t d, uint64_t seed) {
  Rng rng = MakeRng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> u(static_cast<size_t>(n * d));
  for (double& v : u) v = uniform(rng);
  return u;
}

Dataset Threshold(const std::vector<double>& uniforms, int64_t n, int64_t d,
                  const std::vector<double>& bias) {
  const double c = HypercubeCoordinate(static_cast<size_t>(d));
  std::vector<Vector> points(static_cast<size_t>(n), Vector(d));
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < d; ++j) {
      points[i][j] = uniforms[i * d + j] < bias[j] ? c : -c;
    }
  }
  return *Dataset::Create(std::move(points));
}

absl::StatusOr<Dataset> MapSupport(const Dataset& in, double from, double to,
                                   absl::string_view what) {
  std::vector<Vector> points = in.points();
  for (size_t i = 0; i < points.size(); ++i) {
    for (double& v : points[i]) {
      if (v == from) {
        v = to;
      } else if (v == -from) {
        v = -to;
      } else {
        return MakeError(ErrorKind::kInvalidParameter,
                         absl::StrCat("point ", i, " has a coordinate off the ",
                                      what, " support"));
      }
    }
  }
  return Dataset::Create(std::move(points), in.dimension());
}

}  // namespace

absl::StatusOr<ProductDistribution> ProductDistribution::Create(
    std::vector<double> bias) {
  if (bias.empty()) {
    return MakeError(ErrorKind::kInvalidParameter, "bias vector is empty");
  }
  for (size_t i = 0; i < bias.size(); ++i) {
    if (!(bias[i] >= 0.0 && bias[i] <= 1.0)) {
      return MakeError(
          ErrorKind::kInvalidParameter,
          absl::StrCat("bias[", i, "] = ", bias[i], " is outside [0, 1]"));
    }
  }
  return ProductDistribution(std::move(bias));
}

absl::StatusOr<ProductDistribution> ProductDistribution::Uniform(size_t d,
                                                                 double bias) {
  return Create(std::vector<double>(d, bias));
}

Vector ProductDistribution::Mean() const {
  const double c = HypercubeCoordinate(bias_.size());
  Vector mu(bias_.size());
  for (size_t i = 0; i < bias_.size(); ++i) mu[i] = (2.0 * bias_[i] - 1.0) * c;
  return mu;
}

absl::StatusOr<Dataset> GenerateHardDataset(
    int64_t n, int64_t d, uint64_t seed,
    std::optional<std::vector<double>> bias) {
  UNLEARN_RETURN_IF_ERROR(CheckSizes(n, d));
  std::vector<double> p =
      bias.has_value() ? *std::move(bias)
                       : std::vector<double>(static_cast<size_t>(d), kDefaultBias);
  if (p.size() != static_cast<size_t>(d)) {
    return MakeError(ErrorKind::kInvalidParameter,
                     absl::StrCat("bias has ", p.size(), " entries, d = ", d));
  }
  UNLEARN_ASSIGN_OR_RETURN(ProductDistribution dist,
                           ProductDistribution::Create(std::move(p)));
  return SampleProduct(dist, n, seed);
}

absl::StatusOr<Dataset> SampleProduct(const ProductDistribution& dist,
                                      int64_t n, uint64_t seed) {
  const int64_t d = static_cast<int64_t>(dist.dimension());
  UNLEARN_RETURN_IF_ERROR(CheckSizes(n, d));
  return Threshold(DrawUniforms(n, d, seed), n, d, dist.bias());
}

bool IsHardInstance(const Dataset& dataset) {
  if (dataset.dimension() == 0) return false;
  const double c = HypercubeCoordinate(dataset.dimension());
  for (const Vector& p : dataset.points()) {
    for (double v : p) {
      if (v != c && v != -c) return false;
    }
  }
  return true;
}

absl::StatusOr<Vector> OneWayMarginal(const Dataset& dataset) {
  return ExactMean(dataset);
}

absl::StatusOr<double> LinearLoss(const Vector& theta, const Dataset& dataset) {
  if (dataset.empty()) {
    return MakeError(ErrorKind::kEmptyDataset, "loss on an empty dataset");
  }
  if (theta.size() != dataset.dimension()) {
    return MakeError(ErrorKind::kDimensionMismatch,
                     absl::StrCat("theta has dimension ", theta.size(),
                                  ", dataset has ", dataset.dimension()));
  }
  UNLEARN_ASSIGN_OR_RETURN(Vector q, OneWayMarginal(dataset));
  return -Dot(theta, q);
}

absl::StatusOr<Vector> UnitDirection(const Vector& q) {
  const double norm = Norm(q);
  if (!(norm > kDegenerateTolerance)) {
    return MakeError(ErrorKind::kDegenerateDataset,
                     "marginal is (numerically) zero; minimizer undefined");
  }
  return Scaled(q, 1.0 / norm);
}

absl::StatusOr<Vector> MinimizerThetaStar(const Dataset& dataset) {
  UNLEARN_ASSIGN_OR_RETURN(Vector q, OneWayMarginal(dataset));
  if (!(Norm(q) * static_cast<double>(dataset.size()) > kDegenerateTolerance)) {
    return MakeError(ErrorKind::kDegenerateDataset,
                     "sum of points is (numerically) zero; minimizer undefined");
  }
  return UnitDirection(q);
}

absl::StatusOr<Dataset> PadDataset(const Dataset& dataset, int64_t n_target,
                                   const Vector& anchor) {
  const int64_t n = static_cast<int64_t>(dataset.size());
  if (n_target < n) {
    return MakeError(ErrorKind::kInvalidParameter,
                     absl::StrCat("cannot pad ", n, " points down to ", n_target));
  }
  if (!dataset.empty() && anchor.size() != dataset.dimension()) {
    return MakeError(ErrorKind::kDimensionMismatch,
                     absl::StrCat("anchor has dimension ", anchor.size(),
                                  ", dataset has ", dataset.dimension()));
  }
  const int64_t r = n_target - n;
  std::vector<Vector> points = dataset.points();
  points.reserve(static_cast<size_t>(n_target));
  const Vector negated = Scaled(anchor, -1.0);
  for (int64_t i = 0; i < (r + 1) / 2; ++i) points.push_back(anchor);
  for (int64_t i = 0; i < r / 2; ++i) points.push_back(negated);
  return Dataset::Create(std::move(points), anchor.size());
}

absl::StatusOr<Dataset> ReplicateDataset(const Dataset& dataset, int64_t m) {
  if (m < 1) {
    return MakeError(ErrorKind::kInvalidParameter,
                     absl::StrCat("replication factor must be >= 1, got ", m));
  }
  std::vector<Vector> points;
  points.reserve(dataset.size() * static_cast<size_t>(m));
  for (const Vector& p : dataset.points()) {
    for (int64_t k = 0; k < m; ++k) points.push_back(p);
  }
  return Dataset::Create(std::move(points), dataset.dimension());
}

absl::StatusOr<Dataset> RescaleToHardInstance(const Dataset& sign_cube) {
  return MapSupport(sign_cube, 1.0, HypercubeCoordinate(sign_cube.dimension()),
                    "{-1, +1}");
}

absl::StatusOr<Dataset> RescaleToSignCube(const Dataset& hard_instance) {
  return MapSupport(hard_instance,
                    HypercubeCoordinate(hard_instance.dimension()), 1.0,
                    "{-1/sqrt(d), +1/sqrt(d)}");
}

absl::StatusOr<double> PopulationExcessRisk(const Vector& theta,
                                            const ProductDistribution& dist) {
  if (theta.size() != dist.dimension()) {
    return MakeError(ErrorKind::kDimensionMismatch,
                     absl::StrCat("theta has dimension ", theta.size(),
                                  ", distribution has ", dist.dimension()));
  }
  if (Norm(theta) > 1.0 + 1e-12) {
    return MakeError(ErrorKind::kInvalidParameter,
                     "theta lies outside the unit ball");
  }
  const Vector mu = dist.Mean();
  const double mu_norm = Norm(mu);
  if (!(mu_norm > kDegenerateTolerance)) {
    return MakeError(ErrorKind::kDegenerateDistribution,
                     "distribution mean is zero; every theta is optimal");
  }
  return std::max(0.0, mu_norm - Dot(theta, mu));
}

absl::StatusOr<MarginalNormResult> GenerateWithMarginalNorm(int64_t n,
                                                            int64_t d,
                                                            uint64_t seed,
                                                            double norm_lo,
                                                            double norm_hi) {
  UNLEARN_RETURN_IF_ERROR(CheckSizes(n, d));
  if (!(norm_lo >= 0.0 && norm_lo <= norm_hi && norm_hi <= 1.0)) {
    return MakeError(ErrorKind::kInvalidParameter,
                     absl::StrCat("bad norm interval [", norm_lo, ", ",
                                  norm_hi, "]"));
  }
  const std::vector<double> uniforms = DrawUniforms(n, d, seed);
  auto evaluate = [&](double p, MarginalNormResult& out) {
    out.dataset = Threshold(uniforms, n, d, std::vector<double>(d, p));
    out.bias = p;
    out.marginal_norm = Norm(*OneWayMarginal(out.dataset));
    return out.marginal_norm >= norm_lo && out.marginal_norm <= norm_hi;
  };
  MarginalNormResult result;
  double lo = 0.5, hi = 1.0;
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (evaluate(mid, result)) return result;
    (result.marginal_norm < norm_lo ? lo : hi) = mid;
  }
  // The norm is not monotone in p for every seed; fall back to a scan.
  constexpr int kScan = 4096;
  for (int k = 0; k <= kScan; ++k) {
    if (evaluate(0.5 + 0.5 * k / kScan, result)) return result;
  }
  return MakeError(ErrorKind::kInvalidParameter,
                   absl::StrCat("no bias reaches |q| in [", norm_lo, ", ",
                                norm_hi, "] for n=", n, " d=", d));
}

std::string ManifestToJson(const HardInstanceManifest& manifest) {
  nlohmann::json j;
  j["generator"] = "hard_instance";
  j["n"] = manifest.n;
  j["d"] = manifest.d;
  j["seed"] = manifest.seed;
  j["bias"] = manifest.bias;
  return j.dump(2);
}

absl::StatusOr<HardInstanceManifest> ManifestFromJson(const std::string& json) {
  nlohmann::json j = nlohmann::json::parse(json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return MakeError(ErrorKind::kInvalidParameter, "manifest is not JSON");
  }
  try {
    HardInstanceManifest m;
    m.n = j.at("n").get<int64_t>();
    m.d = j.at("d").get<int64_t>();
    m.seed = j.at("seed").get<uint64_t>();
    m.bias = j.at("bias").get<std::vector<double>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    return MakeError(ErrorKind::kInvalidParameter,
                     absl::StrCat("malformed manifest: ", e.what()));
  }
}

absl::Status WriteManifest(const HardInstanceManifest& manifest,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) return absl::InvalidArgumentError(absl::StrCat("cannot open ", path));
  out << ManifestToJson(manifest) << '\n';
  return out ? absl::OkStatus()
             : absl::DataLossError(absl::StrCat("failed writing ", path));
}

}  // namespace unlearn
