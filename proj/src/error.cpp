// SPDX-License-Identifier: Apache-2.0
#include "fermat/error.hpp"

namespace fermat {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateBasis: return "DegenerateBasis";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DegenerateSegment: return "DegenerateSegment";
    case ErrorCode::ZeroDirection: return "ZeroDirection";
    case ErrorCode::NonUniformBatch: return "NonUniformBatch";
    case ErrorCode::NotAllPlanes: return "NotAllPlanes";
    case ErrorCode::NoIntersection: return "NoIntersection";
    case ErrorCode::SingularHessian: return "SingularHessian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotStationary: return "NotStationary";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace fermat
