#include "rigidflow/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rigidflow {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTinyNorm = 1e-12;
}  // namespace

Quat canonical_sign(const Quat& q) {
  double lead = q.w();
  if (lead == 0) lead = q.x();
  if (lead == 0) lead = q.y();
  if (lead == 0) lead = q.z();
  if (lead < 0) return Quat(-q.w(), -q.x(), -q.y(), -q.z());
  return q;
}

Vec3 AxisAngle::axis() const {
  const double n = v.norm();
  if (n < kTinyNorm) return Vec3::UnitX();
  return v / n;
}

Quat AxisAngle::to_quat() const {
  const double a = v.norm();
  if (a < kTinyNorm) return Quat::Identity();
  return Quat(Eigen::AngleAxisd(a, v / a));
}

AxisAngle AxisAngle::from_quat(const Quat& q) {
  const Quat qc = canonical_sign(q.normalized());
  const double vnorm = qc.vec().norm();
  if (vnorm < kTinyNorm) return AxisAngle();
  // canonical sign gives w >= 0, so the angle is already in [0, pi]
  const double angle = 2.0 * std::atan2(vnorm, qc.w());
  return AxisAngle(qc.vec() / vnorm * angle);
}

Vec3 rotate(const Vec3& p, const AxisAngle& Q) {
  const double angle = Q.angle();
  if (angle < kTinyNorm) return p;
  const Vec3 k = Q.v / angle;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return p * c + k.cross(p) * s + k * (k.dot(p)) * (1.0 - c);
}

TransportResult transport_point(const Vec3& p_t, const RigidMotion& m) {
  const Vec3 p_prev = rotate(p_t - m.X, m.Q) + m.X + m.T;
  return {p_prev, p_prev - p_t};
}

SwingTwist swing_twist(const Quat& q, const Vec3& axis) {
  SwingTwist out;
  const Quat qc = canonical_sign(q.normalized());
  const double proj = axis.dot(qc.vec());

  Quat twist;
  const double tn = std::sqrt(qc.w() * qc.w() + proj * proj);
  if (tn < 1e-9) {
    // 180 deg rotation with axis orthogonal to the twist axis; the twist
    // about `axis` is unobservable. Convention: alpha = pi.
    out.degenerate = true;
    out.alpha = kPi;
    twist = Quat(Eigen::AngleAxisd(kPi, axis));
  } else {
    twist = Quat(qc.w() / tn, proj / tn * axis.x(), proj / tn * axis.y(),
                 proj / tn * axis.z());
    out.alpha = 2.0 * std::atan2(proj, qc.w());
  }

  out.swing = (qc * twist.conjugate()).normalized();
  const double sn = out.swing.vec().norm();
  const double sw = std::abs(out.swing.w());
  out.theta = 2.0 * std::atan2(sn, sw);
  if (sn > kTinyNorm) {
    out.swing_axis = out.swing.vec() / sn;
    if (out.swing.w() < 0) out.swing_axis = -out.swing_axis;
  }
  return out;
}

Quat canonicalize_rotation(const Quat& q,
                           const std::vector<SymmetrySpec>& syms) {
  Quat cur = canonical_sign(q.normalized());
  for (const SymmetrySpec& sym : syms) {
    const SwingTwist st = swing_twist(cur, sym.axis);
    double alpha_hat = 0;
    if (!sym.infinite()) {
      const double bound = kPi / sym.order;
      const double period = 2.0 * bound;
      alpha_hat = st.alpha - period * std::floor((st.alpha + bound) / period);
      if (alpha_hat <= -bound) alpha_hat += period;  // keep (-pi/n, pi/n]
    }
    if (alpha_hat == st.alpha) continue;  // already in range, q unchanged
    const Quat twist_hat(Eigen::AngleAxisd(alpha_hat, sym.axis));
    cur = canonical_sign((st.swing * twist_hat).normalized());
  }
  return cur;
}

Pixel project(const Vec3& p, const CameraIntrinsics& cam) {
  if (p.z() <= 0) throw std::domain_error("project: point behind camera");
  return {cam.fx * p.x() / p.z() + cam.cx, cam.fy * p.y() / p.z() + cam.cy};
}

Vec3 backproject(double u, double v, double z, const CameraIntrinsics& cam) {
  return Vec3((u - cam.cx) / cam.fx * z, (v - cam.cy) / cam.fy * z, z);
}

}  // namespace rigidflow
