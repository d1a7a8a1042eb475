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

#ifndef REPAL_ERROR_HPP_
#define REPAL_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace repal {

enum class ErrorCode {
  kDimensionMismatch,
  kZeroVector,
  kEmptyMatrix,
  kNoConvergence,
  kInvalidArgument,
  kEmptyInput,
  kEmptyCorpus,
  kIndexOutOfRange,
  kMissingEmbedding,
  kRemoteUnavailable,
  kDimMismatch,  // remote service returned vectors of the wrong width
  kParseError,
  kTooFewPairs,
  kLengthMismatch,
  kDegenerateRanking,
  kBadGridSpec,
  kSentenceTooShort,
  kNoEligiblePairs,
  kIoError,
};

std::string_view error_code_name(ErrorCode code);

// True for failures originating at the encoder boundary (remote transport,
// missing precomputed vectors, width mismatches).
bool is_encoder_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

class NoConvergenceError : public Error {
 public:
  NoConvergenceError(double last_estimate, int iterations);

  double last_estimate() const { return last_estimate_; }
  int iterations() const { return iterations_; }

 private:
  double last_estimate_;
  int iterations_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason);

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace repal

#endif  // REPAL_ERROR_HPP_
