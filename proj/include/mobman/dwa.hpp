#pragma once

#include "mobman/geometry.hpp"
#include "mobman/kdtree.hpp"

#include <memory>
#include <string>
#include <vector>

namespace mobman {

enum class Cell : unsigned char { Free, Occupied, Unknown };

struct OccupancyGrid {
  int width = 0, height = 0;  // cells
  double resolution = 0.05;   // m/cell
  Vec2 origin = Vec2::Zero(); // world position of cell (0, 0)'s lower-left corner
  std::vector<Cell> cells;    // row-major, row 0 at origin.y

  void validate() const;
  Cell at(int col, int row) const { return cells[static_cast<std::size_t>(row) * width + col]; }
  Cell& at(int col, int row) { return cells[static_cast<std::size_t>(row) * width + col]; }
  Vec2 cell_center(int col, int row) const {
    return origin + resolution * Vec2(col + 0.5, row + 0.5);
  }
  bool contains(const Vec2& p) const;
  double diagonal() const { return std::hypot(width * resolution, height * resolution); }

  static OccupancyGrid empty(int width, int height, double resolution, Vec2 origin = Vec2::Zero());
};

/// Text PGM (P2): 0 occupied, 255 free, 128 unknown (nearest class for other
/// values). The image top row is the grid's highest row.
OccupancyGrid parse_pgm(const std::string& pgm, double resolution, Vec2 origin);
OccupancyGrid read_grid(const std::string& pgm_path, const std::string& meta_json_path);
std::string format_pgm(const OccupancyGrid& grid);
std::string format_grid_meta(const OccupancyGrid& grid);

// Nearest blocking (occupied or unknown) cell-center lookup.
class ObstacleField {
public:
  explicit ObstacleField(const OccupancyGrid& grid);

  /// Distance from p to the nearest blocking cell center; the map diagonal
  /// when there is none.
  double distance(const Vec2& p) const;
  const OccupancyGrid& grid() const { return *grid_; }

private:
  const OccupancyGrid* grid_;
  std::vector<Point3> centers_;
  std::unique_ptr<KdTree> tree_;
};

struct RobotState {
  double x = 0, y = 0, theta = 0;
  double vx = 0, vy = 0, omega = 0;  // body frame
};

struct VelocityCommand {
  double vx = 0, vy = 0, omega = 0;
};

struct DwaConfig {
  double v_max = 0.8, v_min = -0.8;  // per body axis, m/s
  double omega_max = 1.5;
  double ax = 1.0, ay = 1.0, aomega = 2.0;
  double dt = 0.1;
  double horizon = 1.5;
  int samples_vx = 7, samples_vy = 7, samples_omega = 9;
  double w_goal = 1.0, w_obs = 0.2, w_vel = 0.1;
  double robot_radius = 0.2;
  double epsilon = 1e-3;

  void validate() const;
};

struct Interval {
  double lo = 0, hi = 0;
};

struct DynamicWindow {
  Interval vx, vy, omega;
};

struct TrajectoryPose {
  double x = 0, y = 0, theta = 0;
};

DynamicWindow dynamic_window(const RobotState& state, const DwaConfig& cfg);

/// Constant body-velocity motion sampled at dt, 2dt, ... horizon.
std::vector<TrajectoryPose> rollout(const RobotState& state, const VelocityCommand& cmd, const DwaConfig& cfg);

/// Pose after holding cmd for duration seconds (exact arc integration).
TrajectoryPose integrate(const TrajectoryPose& start, const VelocityCommand& cmd, double duration);

double clearance(const std::vector<TrajectoryPose>& traj, const ObstacleField& field, double robot_radius);
double clearance(const std::vector<TrajectoryPose>& traj, const OccupancyGrid& grid, double robot_radius);

struct DwaChoice {
  VelocityCommand cmd;
  double cost = 0.0;
  double clearance = 0.0;
  std::vector<TrajectoryPose> trajectory;
};

/// Uniform grid over the window, endpoint inclusive, vx slowest-varying.
std::vector<VelocityCommand> window_samples(const DynamicWindow& w, const DwaConfig& cfg);

DwaChoice dwa_step(const RobotState& state, const Vec2& goal, const ObstacleField& field, const DwaConfig& cfg);
DwaChoice dwa_step(const RobotState& state, const Vec2& goal, const OccupancyGrid& grid, const DwaConfig& cfg);

struct EpisodeStep {
  int step = 0;
  RobotState state;  // after applying cmd for dt
  VelocityCommand cmd;
  double clearance = 0.0;
};

struct EpisodeResult {
  std::vector<EpisodeStep> steps;
  bool reached = false;
  bool blocked = false;  // NoAdmissibleVelocity ended the episode
  double final_distance = 0.0;
};

/// Closed loop: the robot executes each chosen command exactly for dt.
EpisodeResult run_episode(const OccupancyGrid& grid, RobotState start, const Vec2& goal, const DwaConfig& cfg,
                          int max_steps, double goal_tolerance);

}  // namespace mobman
