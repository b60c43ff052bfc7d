#include "mobman/dwa.hpp"
#include "mobman/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mobman {

namespace {

Interval window_axis(double current, double accel, double dt, double lo, double hi) {
  Interval w{std::max(current - accel * dt, lo), std::min(current + accel * dt, hi)};
  if (w.lo > w.hi) {
    // current velocity is outside the absolute limits: pin to the nearer one
    const double v = current > hi ? hi : lo;
    w = {v, v};
  }
  return w;
}

std::vector<double> linspace(const Interval& w, int n) {
  if (n <= 1) return {0.5 * (w.lo + w.hi)};
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = w.lo + (w.hi - w.lo) * i / (n - 1);
  out.back() = w.hi;
  return out;
}

}  // namespace

void DwaConfig::validate() const {
  if (!(dt > 0.0) || !(horizon >= dt)) fail(ErrorCode::InvalidArgument, "DWA needs dt > 0 and horizon >= dt");
  if (w_goal < 0 || w_obs < 0 || w_vel < 0) fail(ErrorCode::InvalidArgument, "DWA weights must be >= 0");
  if (!(v_min <= v_max) || !(omega_max >= 0.0)) fail(ErrorCode::InvalidArgument, "DWA velocity limits inverted");
  if (ax < 0 || ay < 0 || aomega < 0) fail(ErrorCode::InvalidArgument, "DWA accelerations must be >= 0");
  if (samples_vx < 1 || samples_vy < 1 || samples_omega < 1)
    fail(ErrorCode::InvalidArgument, "DWA sample counts must be >= 1");
  if (!(robot_radius >= 0.0) || !(epsilon > 0.0)) fail(ErrorCode::InvalidArgument, "bad DWA radius/epsilon");
}

DynamicWindow dynamic_window(const RobotState& s, const DwaConfig& cfg) {
  DynamicWindow w;
  w.vx = window_axis(s.vx, cfg.ax, cfg.dt, cfg.v_min, cfg.v_max);
  w.vy = window_axis(s.vy, cfg.ay, cfg.dt, cfg.v_min, cfg.v_max);
  w.omega = window_axis(s.omega, cfg.aomega, cfg.dt, -cfg.omega_max, cfg.omega_max);
  return w;
}

TrajectoryPose integrate(const TrajectoryPose& start, const VelocityCommand& cmd, double duration) {
  const double th0 = start.theta;
  const double th1 = th0 + cmd.omega * duration;
  TrajectoryPose out;
  out.theta = th1;
  if (std::abs(cmd.omega) < 1e-12) {
    const double c = std::cos(th0), s = std::sin(th0);
    out.x = start.x + (cmd.vx * c - cmd.vy * s) * duration;
    out.y = start.y + (cmd.vx * s + cmd.vy * c) * duration;
  } else {
    const double ds = (std::sin(th1) - std::sin(th0)) / cmd.omega;  // integral of cos
    const double dc = (std::cos(th0) - std::cos(th1)) / cmd.omega;  // integral of sin
    out.x = start.x + cmd.vx * ds - cmd.vy * dc;
    out.y = start.y + cmd.vx * dc + cmd.vy * ds;
  }
  return out;
}

std::vector<TrajectoryPose> rollout(const RobotState& state, const VelocityCommand& cmd, const DwaConfig& cfg) {
  const int steps = std::max(1, static_cast<int>(std::floor(cfg.horizon / cfg.dt + 1e-9)));
  std::vector<TrajectoryPose> traj;
  traj.reserve(static_cast<std::size_t>(steps));
  const TrajectoryPose start{state.x, state.y, state.theta};
  for (int k = 1; k <= steps; ++k) traj.push_back(integrate(start, cmd, k * cfg.dt));
  return traj;
}

double clearance(const std::vector<TrajectoryPose>& traj, const ObstacleField& field, double robot_radius) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : traj) {
    const Vec2 q(p.x, p.y);
    if (!field.grid().contains(q)) fail(ErrorCode::TrajectoryLeavesMap, "trajectory leaves the map");
    best = std::min(best, field.distance(q) - robot_radius);
  }
  if (traj.empty()) return field.grid().diagonal();
  return std::max(0.0, best);
}

double clearance(const std::vector<TrajectoryPose>& traj, const OccupancyGrid& grid, double robot_radius) {
  return clearance(traj, ObstacleField(grid), robot_radius);
}

std::vector<VelocityCommand> window_samples(const DynamicWindow& w, const DwaConfig& cfg) {
  const auto vxs = linspace(w.vx, cfg.samples_vx);
  const auto vys = linspace(w.vy, cfg.samples_vy);
  const auto oms = linspace(w.omega, cfg.samples_omega);
  std::vector<VelocityCommand> out;
  out.reserve(vxs.size() * vys.size() * oms.size());
  for (double vx : vxs)
    for (double vy : vys)
      for (double om : oms) out.push_back({vx, vy, om});
  return out;
}

DwaChoice dwa_step(const RobotState& state, const Vec2& goal, const ObstacleField& field, const DwaConfig& cfg) {
  cfg.validate();
  if (!goal.allFinite()) fail(ErrorCode::InvalidArgument, "goal must be finite");
  const DynamicWindow w = dynamic_window(state, cfg);

  DwaChoice best;
  bool found = false;
  for (const auto& cmd : window_samples(w, cfg)) {
    auto traj = rollout(state, cmd, cfg);
    const bool inside = std::all_of(traj.begin(), traj.end(),
                                    [&](const TrajectoryPose& p) { return field.grid().contains({p.x, p.y}); });
    if (!inside) continue;
    const double c = clearance(traj, field, cfg.robot_radius);
    if (!(c > 0.0)) continue;
    const double goal_dist = std::hypot(traj.back().x - goal.x(), traj.back().y - goal.y());
    const double speed = std::hypot(cmd.vx, cmd.vy);
    const double cost = cfg.w_goal * goal_dist + cfg.w_obs / (c + cfg.epsilon) + cfg.w_vel * (cfg.v_max - speed);
    if (!found || cost < best.cost) {
      best.cmd = cmd;
      best.cost = cost;
      best.clearance = c;
      best.trajectory = std::move(traj);
      found = true;
    }
  }
  if (!found) fail(ErrorCode::NoAdmissibleVelocity, "every sampled velocity collides");
  return best;
}

DwaChoice dwa_step(const RobotState& state, const Vec2& goal, const OccupancyGrid& grid, const DwaConfig& cfg) {
  return dwa_step(state, goal, ObstacleField(grid), cfg);
}

EpisodeResult run_episode(const OccupancyGrid& grid, RobotState state, const Vec2& goal, const DwaConfig& cfg,
                          int max_steps, double goal_tolerance) {
  const ObstacleField field(grid);
  EpisodeResult res;
  for (int step = 0; step < max_steps; ++step) {
    if (std::hypot(state.x - goal.x(), state.y - goal.y()) <= goal_tolerance) break;
    DwaChoice choice;
    try {
      choice = dwa_step(state, goal, field, cfg);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoAdmissibleVelocity) throw;
      res.blocked = true;
      break;
    }
    const TrajectoryPose next = integrate({state.x, state.y, state.theta}, choice.cmd, cfg.dt);
    state = {next.x, next.y, wrap_angle(next.theta), choice.cmd.vx, choice.cmd.vy, choice.cmd.omega};
    res.steps.push_back({step, state, choice.cmd, choice.clearance});
  }
  res.final_distance = std::hypot(state.x - goal.x(), state.y - goal.y());
  res.reached = res.final_distance <= goal_tolerance;
  return res;
}

}  // namespace mobman
