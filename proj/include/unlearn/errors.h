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

#ifndef UNLEARN_ERRORS_H_
#define UNLEARN_ERRORS_H_

#include <optional>

#include "absl/status/status.h"
#include "absl/strings/string_view.h"

namespace unlearn {

// Domain error kinds. Each maps onto a canonical absl status code and is
// attached to the status as a payload so callers can branch on it.
enum class ErrorKind {
  kInvalidParameter,
  kEmptyDataset,
  kDimensionMismatch,
  kDegenerateDataset,
  kDegenerateDistribution,
  kRegimeMismatch,
  kCapacityExceeded,
  kOverlappingRequests,
  kInsufficientData,
};

absl::Status MakeError(ErrorKind kind, absl::string_view message);

// Returns the domain error kind carried by `status`, if any.
std::optional<ErrorKind> GetErrorKind(const absl::Status& status);

absl::string_view ErrorKindName(ErrorKind kind);

inline bool IsErrorKind(const absl::Status& status, ErrorKind kind) {
  return GetErrorKind(status) == kind;
}

}  // namespace unlearn

#endif  // UNLEARN_ERRORS_H_
