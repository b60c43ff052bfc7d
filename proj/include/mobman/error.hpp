#pragma once

#include <stdexcept>
#include <string>

namespace mobman {

// Every failure the toolkit reports. The numeric values are mirrored by the
// C API status codes, so only append.
enum class ErrorCode {
  InvalidArgument = 1,
  ParseError,
  // cloud
  NonPositiveLeaf,
  InvertedRange,
  TooFewPoints,
  DegenerateNeighborhood,
  NoAdmissiblePlane,
  DegenerateInliers,
  InvertedHeightRange,
  // recognition
  DegenerateCluster,
  NoAdmissibleLabel,
  // tracking
  NonMonotonicTimestamp,
  CollinearPoints,
  ZeroTimeSpan,
  TableStationary,
  DimensionMismatch,
  RoiOutOfBounds,
  // grasping / placement
  NoConvergence,
  NoReachableCandidate,
  NoFreeSpace,
  NoReachablePlacement,
  // navigation
  TrajectoryLeavesMap,
  NoAdmissibleVelocity,
  // task planning
  SyntaxError,
  UnsupportedRequirement,
  ArityMismatch,
  UnknownType,
  UndeclaredObject,
  Unsolvable,
  // execution
  UnknownAction,
  ReplanBudgetExhausted,
  IoError,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace mobman
