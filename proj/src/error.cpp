#include "mobman/error.hpp"

namespace mobman {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonPositiveLeaf: return "NonPositiveLeaf";
    case ErrorCode::InvertedRange: return "InvertedRange";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::DegenerateNeighborhood: return "DegenerateNeighborhood";
    case ErrorCode::NoAdmissiblePlane: return "NoAdmissiblePlane";
    case ErrorCode::DegenerateInliers: return "DegenerateInliers";
    case ErrorCode::InvertedHeightRange: return "InvertedHeightRange";
    case ErrorCode::DegenerateCluster: return "DegenerateCluster";
    case ErrorCode::NoAdmissibleLabel: return "NoAdmissibleLabel";
    case ErrorCode::NonMonotonicTimestamp: return "NonMonotonicTimestamp";
    case ErrorCode::CollinearPoints: return "CollinearPoints";
    case ErrorCode::ZeroTimeSpan: return "ZeroTimeSpan";
    case ErrorCode::TableStationary: return "TableStationary";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RoiOutOfBounds: return "RoiOutOfBounds";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NoReachableCandidate: return "NoReachableCandidate";
    case ErrorCode::NoFreeSpace: return "NoFreeSpace";
    case ErrorCode::NoReachablePlacement: return "NoReachablePlacement";
    case ErrorCode::TrajectoryLeavesMap: return "TrajectoryLeavesMap";
    case ErrorCode::NoAdmissibleVelocity: return "NoAdmissibleVelocity";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnsupportedRequirement: return "UnsupportedRequirement";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::UnknownType: return "UnknownType";
    case ErrorCode::UndeclaredObject: return "UndeclaredObject";
    case ErrorCode::Unsolvable: return "Unsolvable";
    case ErrorCode::UnknownAction: return "UnknownAction";
    case ErrorCode::ReplanBudgetExhausted: return "ReplanBudgetExhausted";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace mobman
