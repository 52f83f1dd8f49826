// Copyright 2026 The sparsecomp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sparsecomp {

enum class ErrorCode {
  InvalidArgument,
  WrongLength,
  NegativeEntry,
  SumMismatch,
  OutOfRange,
  StepTooLarge,
  InvalidPrior,
  ScorerFailure,
  AllZeroWeights,
  InvariantViolation,
  EmptyChain,
  SpaceTooLarge,
  DegenerateTarget,
  SupportMismatch,
  UnknownUnit,
  MalformedRow,
  EmptyDataset,
  DegenerateLabels,
  VocabularyMismatch,
  UnknownLabel,
  ModelFormat,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (and tests) can branch on the kind of error rather than the text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

  /// Chain iteration at which the error happened, or -1 outside a chain.
  std::int64_t iteration() const noexcept { return iteration_; }

  /// Returns a copy of this error annotated with the chain iteration index.
  Error at_iteration(std::int64_t iteration) const;

 private:
  ErrorCode code_;
  std::int64_t iteration_ = -1;
};

}  // namespace sparsecomp
