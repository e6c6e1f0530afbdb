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

#include "unlearn/dataset.h"

#include <algorithm>
#include <charconv>
#include <climits>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <system_error>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "boost/multiprecision/cpp_int.hpp"
#include "unlearn/errors.h"

namespace unlearn {
namespace {

using boost::multiprecision::cpp_int;

// v == mantissa * 2^exponent with |mantissa| < 2^53.
void Decompose(double v, int64_t& mantissa, int& exponent) {
  int e = 0;
  const double f = std::frexp(v, &e);
  mantissa = static_cast<int64_t>(std::ldexp(f, 53));
  exponent = e - 53;
}

int BitLength(const cpp_int& x) {
  return x == 0 ? 0 : static_cast<int>(boost::multiprecision::msb(x)) + 1;
}

// Correctly rounded (ties-to-even) value of num / den * 2^scale, den > 0.
// Results in the subnormal range may be rounded twice.
double RoundQuotient(cpp_int num, const cpp_int& den, int scale) {
  if (num == 0) return 0.0;
  const bool negative = num < 0;
  if (negative) num = -num;
  int t = 53 - (BitLength(num) - BitLength(den));
  cpp_int q, r;
  for (;;) {
    cpp_int a = num, b = den;
    if (t >= 0) {
      a <<= t;
    } else {
      b <<= -t;
    }
    q = a / b;
    r = a - q * b;
    const int bits = BitLength(q);
    if (bits == 53) {
      // Round half to even against the scaled divisor.
      const cpp_int twice = r << 1;
      if (twice > b || (twice == b && (q & 1) != 0)) ++q;
      break;
    }
    t += (bits < 53) ? 1 : -1;
  }
  const double magnitude =
      std::ldexp(static_cast<double>(q.convert_to<int64_t>()), scale - t);
  return negative ? -magnitude : magnitude;
}

}  // namespace

absl::StatusOr<Dataset> Dataset::Create(std::vector<Vector> points,
                                        size_t empty_dimension) {
  if (points.empty()) return Dataset({}, empty_dimension);
  const size_t d = points.front().size();
  for (size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != d) {
      return MakeError(ErrorKind::kDimensionMismatch,
                       absl::StrCat("point ", i, " has dimension ",
                                    points[i].size(), ", expected ", d));
    }
    for (double v : points[i]) {
      if (!std::isfinite(v)) {
        return MakeError(ErrorKind::kInvalidParameter,
                         absl::StrCat("point ", i, " has a non-finite value"));
      }
    }
  }
  return Dataset(std::move(points), d);
}

double ExactAverage(const std::vector<double>& values, double divisor) {
  int min_exponent = INT_MAX;
  std::vector<std::pair<int64_t, int>> parts;
  parts.reserve(values.size());
  for (double v : values) {
    if (v == 0.0) continue;
    int64_t m;
    int e;
    Decompose(v, m, e);
    parts.emplace_back(m, e);
    min_exponent = std::min(min_exponent, e);
  }
  if (parts.empty()) return 0.0;
  cpp_int sum = 0;
  for (const auto& [m, e] : parts) {
    cpp_int term = m;
    sum += term << (e - min_exponent);
  }
  int64_t dm;
  int de;
  Decompose(divisor, dm, de);
  cpp_int den = dm;
  if (dm < 0) {
    den = -den;
    sum = -sum;
  }
  return RoundQuotient(sum, den, min_exponent - de);
}

absl::StatusOr<Vector> ExactMean(const Dataset& dataset) {
  if (dataset.empty()) {
    return MakeError(ErrorKind::kEmptyDataset, "mean of an empty dataset");
  }
  const size_t n = dataset.size();
  const size_t d = dataset.dimension();
  Vector mean(d);
  std::vector<double> column(n);
  for (size_t j = 0; j < d; ++j) {
    for (size_t i = 0; i < n; ++i) column[i] = dataset.point(i)[j];
    mean[j] = ExactAverage(column, static_cast<double>(n));
  }
  return mean;
}

absl::StatusOr<Dataset> RemoveIndices(const Dataset& dataset,
                                      const std::vector<size_t>& indices) {
  std::vector<bool> drop(dataset.size(), false);
  for (size_t i : indices) {
    if (i >= dataset.size()) {
      return MakeError(ErrorKind::kInvalidParameter,
                       absl::StrCat("index ", i, " out of range for dataset of ",
                                    dataset.size(), " points"));
    }
    drop[i] = true;
  }
  std::vector<Vector> kept;
  kept.reserve(dataset.size());
  for (size_t i = 0; i < dataset.size(); ++i) {
    if (!drop[i]) kept.push_back(dataset.point(i));
  }
  return Dataset::Create(std::move(kept), dataset.dimension());
}

std::string FormatDouble(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

absl::Status WriteDatasetCsv(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    return absl::InvalidArgumentError(absl::StrCat("cannot open ", path));
  }
  for (const Vector& p : dataset.points()) {
    for (size_t j = 0; j < p.size(); ++j) {
      if (j > 0) out << ',';
      out << FormatDouble(p[j]);
    }
    out << '\n';
  }
  out.close();
  if (!out) return absl::DataLossError(absl::StrCat("failed writing ", path));
  return absl::OkStatus();
}

absl::StatusOr<Dataset> ParseDatasetCsv(absl::string_view text) {
  std::vector<Vector> points;
  size_t line_no = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_no;
    line = absl::StripAsciiWhitespace(line);
    if (line.empty()) continue;
    Vector row;
    for (absl::string_view field : absl::StrSplit(line, ',')) {
      field = absl::StripAsciiWhitespace(field);
      double v = 0.0;
      const auto [ptr, ec] =
          std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size()) {
        return MakeError(ErrorKind::kInvalidParameter,
                         absl::StrCat("line ", line_no, ": cannot parse '",
                                      field, "' as a number"));
      }
      row.push_back(v);
    }
    points.push_back(std::move(row));
  }
  return Dataset::Create(std::move(points));
}

absl::StatusOr<Dataset> ReadDatasetCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseDatasetCsv(buffer.str());
}

}  // namespace unlearn
