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

// Small dense-vector helpers. Callers are responsible for matching sizes.

#ifndef UNLEARN_VECTOR_OPS_H_
#define UNLEARN_VECTOR_OPS_H_

#include <cmath>
#include <cstddef>
#include <vector>

namespace unlearn {

using Vector = std::vector<double>;

inline double Dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double SquaredNorm(const Vector& a) { return Dot(a, a); }

inline double Norm(const Vector& a) { return std::sqrt(SquaredNorm(a)); }

inline Vector Subtract(const Vector& a, const Vector& b) {
  Vector out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline Vector Scaled(const Vector& a, double c) {
  Vector out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = c * a[i];
  return out;
}

// y += c * x
inline void Axpy(double c, const Vector& x, Vector& y) {
  for (size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

inline double SquaredDistance(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

}  // namespace unlearn

#endif  // UNLEARN_VECTOR_OPS_H_
