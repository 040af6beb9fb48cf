// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fermat {

enum class ErrorCode {
  DegenerateBasis,
  ShapeMismatch,
  DegenerateSegment,
  ZeroDirection,
  NonUniformBatch,
  NotAllPlanes,
  NoIntersection,
  SingularHessian,
  NoConvergence,
  NotStationary,
  SingularSystem,
  InvalidArgument,
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fermat
