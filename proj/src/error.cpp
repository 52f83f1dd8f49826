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

#include "sparsecomp/error.hpp"

namespace sparsecomp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::WrongLength: return "WrongLength";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::SumMismatch: return "SumMismatch";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::InvalidPrior: return "InvalidPrior";
    case ErrorCode::ScorerFailure: return "ScorerFailure";
    case ErrorCode::AllZeroWeights: return "AllZeroWeights";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::EmptyChain: return "EmptyChain";
    case ErrorCode::SpaceTooLarge: return "SpaceTooLarge";
    case ErrorCode::DegenerateTarget: return "DegenerateTarget";
    case ErrorCode::SupportMismatch: return "SupportMismatch";
    case ErrorCode::UnknownUnit: return "UnknownUnit";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
    case ErrorCode::VocabularyMismatch: return "VocabularyMismatch";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::ModelFormat: return "ModelFormat";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {

std::string prefixed(ErrorCode code, const std::string& message) {
  std::string text(to_string(code));
  text.append(": ").append(message);
  return text;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message) : std::runtime_error(prefixed(code, message)), code_(code) {}

Error Error::at_iteration(std::int64_t iteration) const {
  // what() already carries the code prefix; keep the original text after it.
  std::string text = what();
  const auto prefix = std::string(to_string(code_)) + ": ";
  if (text.rfind(prefix, 0) == 0) text.erase(0, prefix.size());
  Error annotated(code_, "iteration " + std::to_string(iteration) + ": " + text);
  annotated.iteration_ = iteration;
  return annotated;
}

}  // namespace sparsecomp
