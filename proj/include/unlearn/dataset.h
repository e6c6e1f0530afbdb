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

#ifndef UNLEARN_DATASET_H_
#define UNLEARN_DATASET_H_

#include <cstddef>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "unlearn/vector_ops.h"

namespace unlearn {

// An immutable, ordered collection of points sharing one dimension.
class Dataset {
 public:
  // Fails with DimensionMismatch if the points disagree on dimension. An
  // empty list yields an empty dataset of dimension `empty_dimension`.
  static absl::StatusOr<Dataset> Create(std::vector<Vector> points,
                                        size_t empty_dimension = 0);

  Dataset() = default;

  size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  size_t dimension() const { return dimension_; }
  const Vector& point(size_t i) const { return points_[i]; }
  const std::vector<Vector>& points() const { return points_; }

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.dimension_ == b.dimension_ && a.points_ == b.points_;
  }

 private:
  Dataset(std::vector<Vector> points, size_t dimension)
      : points_(std::move(points)), dimension_(dimension) {}

  std::vector<Vector> points_;
  size_t dimension_ = 0;
};

// Coordinate-wise mean, correctly rounded: each coordinate is the double
// nearest to the exact rational average (ties to even). The result depends
// only on the multiset of points, never on summation order.
absl::StatusOr<Vector> ExactMean(const Dataset& dataset);

// The correctly rounded value of sum(values) / divisor.
double ExactAverage(const std::vector<double>& values, double divisor);

// Returns a copy without the listed indices; indices must be in range.
absl::StatusOr<Dataset> RemoveIndices(const Dataset& dataset,
                                      const std::vector<size_t>& indices);

// CSV: one row per point, comma-separated decimal coordinates, no header.
// Values are written in shortest round-trip form so reading back is exact.
absl::Status WriteDatasetCsv(const Dataset& dataset, const std::string& path);
absl::StatusOr<Dataset> ReadDatasetCsv(const std::string& path);
absl::StatusOr<Dataset> ParseDatasetCsv(absl::string_view text);

// Shortest decimal string that parses back to exactly `value`.
std::string FormatDouble(double value);

}  // namespace unlearn

#endif  // UNLEARN_DATASET_H_
