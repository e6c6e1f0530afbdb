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

#include "unlearn/errors.h"

#include <array>
#include <string>

#include "absl/strings/cord.h"
#include "absl/strings/str_cat.h"

namespace unlearn {
namespace {

constexpr char kPayloadUrl[] = "type.unlearn/error_kind";

constexpr std::array<ErrorKind, 9> kAllKinds = {
    ErrorKind::kInvalidParameter,       ErrorKind::kEmptyDataset,
    ErrorKind::kDimensionMismatch,      ErrorKind::kDegenerateDataset,
    ErrorKind::kDegenerateDistribution, ErrorKind::kRegimeMismatch,
    ErrorKind::kCapacityExceeded,       ErrorKind::kOverlappingRequests,
    ErrorKind::kInsufficientData,
};

absl::StatusCode CodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidParameter:
    case ErrorKind::kDimensionMismatch:
    case ErrorKind::kRegimeMismatch:
    case ErrorKind::kOverlappingRequests:
      return absl::StatusCode::kInvalidArgument;
    case ErrorKind::kEmptyDataset:
    case ErrorKind::kDegenerateDataset:
    case ErrorKind::kDegenerateDistribution:
    case ErrorKind::kInsufficientData:
      return absl::StatusCode::kFailedPrecondition;
    case ErrorKind::kCapacityExceeded:
      return absl::StatusCode::kResourceExhausted;
  }
  return absl::StatusCode::kUnknown;
}

}  // namespace

absl::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidParameter:
      return "InvalidParameter";
    case ErrorKind::kEmptyDataset:
      return "EmptyDataset";
    case ErrorKind::kDimensionMismatch:
      return "DimensionMismatch";
    case ErrorKind::kDegenerateDataset:
      return "DegenerateDataset";
    case ErrorKind::kDegenerateDistribution:
      return "DegenerateDistribution";
    case ErrorKind::kRegimeMismatch:
      return "RegimeMismatch";
    case ErrorKind::kCapacityExceeded:
      return "CapacityExceeded";
    case ErrorKind::kOverlappingRequests:
      return "OverlappingRequests";
    case ErrorKind::kInsufficientData:
      return "InsufficientData";
  }
  return "Unknown";
}

absl::Status MakeError(ErrorKind kind, absl::string_view message) {
  absl::Status status(CodeFor(kind),
                      absl::StrCat(ErrorKindName(kind), ": ", message));
  status.SetPayload(kPayloadUrl, absl::Cord(ErrorKindName(kind)));
  return status;
}

std::optional<ErrorKind> GetErrorKind(const absl::Status& status) {
  auto payload = status.GetPayload(kPayloadUrl);
  if (!payload.has_value()) return std::nullopt;
  const std::string name(*payload);
  for (ErrorKind kind : kAllKinds) {
    if (ErrorKindName(kind) == name) return kind;
  }
  return std::nullopt;
}

}  // namespace unlearn
