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

#ifndef UNLEARN_STATUS_MACROS_H_
#define UNLEARN_STATUS_MACROS_H_

#include <utility>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define UNLEARN_RETURN_IF_ERROR(expr)          \
  do {                                         \
    ::absl::Status _unlearn_status = (expr);   \
    if (!_unlearn_status.ok()) return _unlearn_status; \
  } while (0)

#define UNLEARN_STATUS_CONCAT_INNER(a, b) a##b
#define UNLEARN_STATUS_CONCAT(a, b) UNLEARN_STATUS_CONCAT_INNER(a, b)

#define UNLEARN_ASSIGN_OR_RETURN_IMPL(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                                  \
  if (!statusor.ok()) return statusor.status();             \
  lhs = std::move(statusor).value()

#define UNLEARN_ASSIGN_OR_RETURN(lhs, rexpr) \
  UNLEARN_ASSIGN_OR_RETURN_IMPL(             \
      UNLEARN_STATUS_CONCAT(_unlearn_statusor_, __LINE__), lhs, rexpr)

#endif  // UNLEARN_STATUS_MACROS_H_
