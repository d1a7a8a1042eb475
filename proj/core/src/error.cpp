// Copyright 2026 The RepAL Toolkit Authors.
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

#include "repal/error.hpp"

#include <sstream>

namespace repal {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kEmptyMatrix: return "EmptyMatrix";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kMissingEmbedding: return "MissingEmbedding";
    case ErrorCode::kRemoteUnavailable: return "RemoteUnavailable";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kTooFewPairs: return "TooFewPairs";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kDegenerateRanking: return "DegenerateRanking";
    case ErrorCode::kBadGridSpec: return "BadGridSpec";
    case ErrorCode::kSentenceTooShort: return "SentenceTooShort";
    case ErrorCode::kNoEligiblePairs: return "NoEligiblePairs";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

bool is_encoder_error(ErrorCode code) {
  return code == ErrorCode::kMissingEmbedding ||
         code == ErrorCode::kRemoteUnavailable ||
         code == ErrorCode::kDimMismatch;
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code) {}

namespace {

std::string no_convergence_message(double last_estimate, int iterations) {
  std::ostringstream out;
  out.precision(17);
  out << "power iteration did not converge after " << iterations
      << " iterations (last estimate " << last_estimate << ")";
  return out.str();
}

}  // namespace

NoConvergenceError::NoConvergenceError(double last_estimate, int iterations)
    : Error(ErrorCode::kNoConvergence,
            no_convergence_message(last_estimate, iterations)),
      last_estimate_(last_estimate),
      iterations_(iterations) {}

ParseError::ParseError(std::size_t line, const std::string& reason)
    : Error(ErrorCode::kParseError,
            "line " + std::to_string(line) + ": " + reason),
      line_(line) {}

}  // namespace repal
