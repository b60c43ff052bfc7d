#pragma once

#include "mobman/cloud.hpp"

#include <map>
#include <set>
#include <string>

namespace mobman {

enum class ScoreSource { TwoD, ThreeD };

struct ObjectScores {
  std::map<std::string, double> scores;
  ScoreSource source = ScoreSource::ThreeD;

  void validate() const;
};

using Inventory = std::set<std::string>;

struct ObjectHypothesis {
  std::string label;
  double confidence = 0.0;
  Pose pose;
  Eigen::Vector3d extents = Eigen::Vector3d::Zero();  // descending
};

struct PcaResult {
  Pose pose;
  Eigen::Vector3d extents;  // sqrt of covariance eigenvalues, descending
};

// Principal axes of a cluster. Column 0 of the orientation is the major
// (grasping) axis, sign-fixed to point toward +x (then +y, then +z on ties);
// column 1 follows the same rule and column 2 completes a right-handed frame.
PcaResult pca_pose(const PointCloud& cloud, const Cluster& cluster);

struct FusionResult {
  std::string label;
  double confidence = 0.0;
};

// Product fusion of the two classifier outputs restricted to the inventory.
// A label scored by only one source gets the neutral 0.5 from the other;
// a label neither source scored contributes nothing.
FusionResult fuse(const ObjectScores& scores3d, const ObjectScores& scores2d,
                  const Inventory& inventory);

}  // namespace mobman
