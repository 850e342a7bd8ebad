#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <limits>
#include <vector>

namespace rigidflow {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

// Resolves the q / -q ambiguity: w >= 0, and if w == 0 the first nonzero
// of (x, y, z) is positive.
Quat canonical_sign(const Quat& q);

// Rotation as a single 3-vector: direction = axis, magnitude = angle in
// radians, wrapped to [0, pi]. Zero vector is the identity.
struct AxisAngle {
  Vec3 v = Vec3::Zero();

  AxisAngle() = default;
  explicit AxisAngle(const Vec3& vec) : v(vec) {}
  AxisAngle(double x, double y, double z) : v(x, y, z) {}

  double angle() const { return v.norm(); }
  Vec3 axis() const;  // unit axis; arbitrary fixed axis for identity

  Quat to_quat() const;
  static AxisAngle from_quat(const Quat& q);
};

// Per-object rigid motion between frames: rotation Q about center X,
// followed by translation T of the center.
struct RigidMotion {
  AxisAngle Q;
  Vec3 T = Vec3::Zero();
  Vec3 X = Vec3::Zero();
};

// Rotational symmetry of order n about an object-frame axis.
// order == kInfiniteOrder marks a surface of revolution (C_inf).
struct SymmetrySpec {
  static constexpr int kInfiniteOrder = 0;

  Vec3 axis = Vec3::UnitZ();
  int order = kInfiniteOrder;

  bool infinite() const { return order == kInfiniteOrder; }
};

struct CameraIntrinsics {
  double fx = 1, fy = 1, cx = 0, cy = 0;
  int width = 0, height = 0;
};

// Rodrigues rotation of p by Q.
Vec3 rotate(const Vec3& p, const AxisAngle& Q);

struct TransportResult {
  Vec3 p_prev;  // corresponding point in the previous frame
  Vec3 flow;    // p_prev - p_t
};

// Applies the rigid motion to a point of the current frame:
// p_prev = R (p - X) + X + T.
TransportResult transport_point(const Vec3& p_t, const RigidMotion& m);

struct SwingTwist {
  double alpha = 0;     // twist angle about the given axis
  double theta = 0;     // swing angle about swing_axis
  Vec3 swing_axis = Vec3::Zero();  // zero when theta == 0
  Quat swing = Quat::Identity();
  bool degenerate = false;  // 180 deg rotation with no twist component
};

// Decomposes q into twist about `axis` and a swing perpendicular to it,
// such that q = swing * twist. `axis` must be unit length.
SwingTwist swing_twist(const Quat& q, const Vec3& axis);

// Wraps the twist angle about each symmetry axis into (-pi/n, pi/n]
// (removes it entirely for infinite order). Axes are expected in the
// previous frame; multiple axes are processed in listed order.
Quat canonicalize_rotation(const Quat& q, const std::vector<SymmetrySpec>& syms);

struct Pixel {
  double u = 0, v = 0;
};

// Pinhole projection; throws for z <= 0.
Pixel project(const Vec3& p, const CameraIntrinsics& cam);
Vec3 backproject(double u, double v, double z, const CameraIntrinsics& cam);

}  // namespace rigidflow
