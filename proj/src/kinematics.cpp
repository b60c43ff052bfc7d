#include "mobman/kinematics.hpp"

#include "mobman/error.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <cmath>

namespace mobman {

namespace {

Eigen::Isometry3d dh_transform(const DhJoint& j, double q) {
  const double th = q + j.theta_offset;
  const double ct = std::cos(th), st = std::sin(th);
  const double ca = std::cos(j.alpha), sa = std::sin(j.alpha);
  Eigen::Matrix4d m;
  m << ct, -st * ca, st * sa, j.a * ct,
       st, ct * ca, -ct * sa, j.a * st,
       0, sa, ca, j.d,
       0, 0, 0, 1;
  Eigen::Isometry3d t;
  t.matrix() = m;
  return t;
}

Eigen::Vector3d rotation_log(const Eigen::Matrix3d& r) {
  const Eigen::AngleAxisd aa(r);
  return aa.angle() * aa.axis();
}

}  // namespace

void KinematicChain::validate() const {
  for (std::size_t i = 0; i < kArmDof; ++i) {
    const auto& j = joints[i];
    if (!std::isfinite(j.a) || !std::isfinite(j.alpha) || !std::isfinite(j.d) ||
        !std::isfinite(j.theta_offset))
      fail(ErrorCode::InvalidArgument, "joint " + std::to_string(i) + " has non-finite DH values");
    if (!(j.lo < j.hi))
      fail(ErrorCode::InvalidArgument, "joint " + std::to_string(i) + " limits need lo < hi");
  }
}

bool KinematicChain::within_limits(const JointVector& q, double tol) const {
  for (std::size_t i = 0; i < kArmDof; ++i)
    if (q[i] < joints[i].lo - tol || q[i] > joints[i].hi + tol) return false;
  return true;
}

JointVector KinematicChain::clamp(const JointVector& q) const {
  return q.cwiseMax(lower()).cwiseMin(upper());
}

JointVector KinematicChain::lower() const {
  JointVector v;
  for (std::size_t i = 0; i < kArmDof; ++i) v[i] = joints[i].lo;
  return v;
}

JointVector KinematicChain::upper() const {
  JointVector v;
  for (std::size_t i = 0; i < kArmDof; ++i) v[i] = joints[i].hi;
  return v;
}

KinematicChain chain_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("chain file: ") + e.what());
  }
  // either a bare joint array or {"joints": [...], "base": [x,y,z,qw,qx,qy,qz]}
  const nlohmann::json* rows = &j;
  KinematicChain chain;
  if (j.is_object()) {
    if (!j.contains("joints")) fail(ErrorCode::ParseError, "chain file: missing 'joints'");
    rows = &j.at("joints");
    if (j.contains("base")) {
      const auto& b = j.at("base");
      if (!b.is_array() || b.size() != 7) fail(ErrorCode::ParseError, "chain file: base needs 7 numbers");
      chain.base.position = Point3(b[0].get<double>(), b[1].get<double>(), b[2].get<double>());
      chain.base.orientation =
          Eigen::Quaterniond(b[3].get<double>(), b[4].get<double>(), b[5].get<double>(), b[6].get<double>())
              .normalized();
    }
  }
  if (!rows->is_array() || rows->size() != kArmDof)
    fail(ErrorCode::ParseError, "chain file: expected exactly 5 joints");
  try {
    for (std::size_t i = 0; i < kArmDof; ++i) {
      const auto& r = (*rows)[i];
      DhJoint& d = chain.joints[i];
      d.a = r.at("a").get<double>();
      d.alpha = r.at("alpha").get<double>();
      d.d = r.at("d").get<double>();
      d.theta_offset = r.value("theta_offset", 0.0);
      d.lo = r.at("lo").get<double>();
      d.hi = r.at("hi").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("chain file: ") + e.what());
  }
  chain.validate();
  return chain;
}

std::string chain_to_json(const KinematicChain& chain) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& d : chain.joints)
    rows.push_back({{"a", d.a}, {"alpha", d.alpha}, {"d", d.d}, {"theta_offset", d.theta_offset},
                    {"lo", d.lo}, {"hi", d.hi}});
  const auto& b = chain.base;
  nlohmann::json out = {{"joints", rows},
                        {"base", {b.position.x(), b.position.y(), b.position.z(), b.orientation.w(),
                                  b.orientation.x(), b.orientation.y(), b.orientation.z()}}};
  return out.dump(2);
}

Eigen::Isometry3d fk_transform(const KinematicChain& chain, const JointVector& q) {
  Eigen::Isometry3d t = chain.base.isometry();
  for (std::size_t i = 0; i < kArmDof; ++i) t = t * dh_transform(chain.joints[i], q[i]);
  return t;
}

Pose fk(const KinematicChain& chain, const JointVector& q) {
  return Pose::from_isometry(fk_transform(chain, q));
}

Eigen::Matrix<double, 6, 1> pose_error(const Eigen::Isometry3d& current, const Pose& target,
                                       const Eigen::Vector3d& weights) {
  Eigen::Matrix<double, 6, 1> e;
  e.head<3>() = target.position - current.translation();
  const Eigen::Matrix3d rc = current.linear();
  e.tail<3>() = weights.cwiseProduct(rotation_log(rc.transpose() * target.orientation.toRotationMatrix()));
  return e;
}

PoseJacobian numeric_jacobian(const KinematicChain& chain, const JointVector& q, double step) {
  PoseJacobian jac;
  const Eigen::Matrix3d rc = fk_transform(chain, q).linear();
  for (std::size_t i = 0; i < kArmDof; ++i) {
    JointVector qp = q, qm = q;
    qp[i] += step;
    qm[i] -= step;
    const Eigen::Isometry3d tp = fk_transform(chain, qp);
    const Eigen::Isometry3d tm = fk_transform(chain, qm);
    jac.block<3, 1>(0, i) = (tp.translation() - tm.translation()) / (2.0 * step);
    // angular velocity in the end-effector frame
    const Eigen::Vector3d w_world = rotation_log(tp.linear() * tm.linear().transpose()) / (2.0 * step);
    jac.block<3, 1>(3, i) = rc.transpose() * w_world;
  }
  return jac;
}

IkResult ik_dls(const KinematicChain& chain, const Pose& target, const JointVector& q0,
                const IkParams& params) {
  if (!(params.tol_pos > 0.0) || !(params.tol_ang > 0.0) || params.max_iters < 0 ||
      !(params.lambda >= 0.0))
    fail(ErrorCode::InvalidArgument, "IK tolerances must be positive");

  IkResult best;
  best.q = chain.clamp(q0);
  JointVector q = best.q;
  double best_cost = std::numeric_limits<double>::infinity();

  Eigen::Matrix<double, 6, 1> w6;
  w6 << 1, 1, 1, params.orientation_weights;

  for (int it = 0;; ++it) {
    const Eigen::Isometry3d cur = fk_transform(chain, q);
    const auto e = pose_error(cur, target, params.orientation_weights);
    const double pe = e.head<3>().norm();
    const double ae = e.tail<3>().norm();
    const double cost = pe / params.tol_pos + ae / params.tol_ang;
    if (cost < best_cost) {
      best_cost = cost;
      best.q = q;
      best.pos_error = pe;
      best.ang_error = ae;
      best.iterations = it;
    }
    if (pe <= params.tol_pos && ae <= params.tol_ang) {
      best.q = q;
      best.pos_error = pe;
      best.ang_error = ae;
      best.iterations = it;
      best.success = true;
      return best;
    }
    if (it >= params.max_iters) break;

    const PoseJacobian j = w6.asDiagonal() * numeric_jacobian(chain, q, params.fd_step);
    const Eigen::Matrix<double, 6, 6> jjt =
        j * j.transpose() + params.lambda * params.lambda * Eigen::Matrix<double, 6, 6>::Identity();
    JointVector dq = j.transpose() * jjt.ldlt().solve(e);
    const double step_norm = dq.cwiseAbs().maxCoeff();
    if (step_norm > 0.5) dq *= 0.5 / step_norm;
    q = chain.clamp(q + dq);
  }
  best.success = false;
  return best;
}

KinematicChain example_chain() {
  KinematicChain c;
  // shoulder height + horizontal offset + upper arm + forearm + wrist/gripper = 0.65 m
  c.joints[0] = {0.033, kPi / 2, 0.127, 0.0, -2.9496, 2.9496};
  c.joints[1] = {0.155, 0.0, 0.0, kPi / 2, -1.1345, 1.5708};
  c.joints[2] = {0.135, 0.0, 0.0, 0.0, -2.5482, 2.6354};
  c.joints[3] = {0.0, kPi / 2, 0.0, kPi / 2, -1.7890, 1.7890};
  c.joints[4] = {0.0, 0.0, 0.200, 0.0, -2.9234, 2.9234};
  return c;
}

}  // namespace mobman
