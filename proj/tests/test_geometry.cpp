#include <doctest.h>

#include <numbers>
#include <random>

#include "rigidflow/geometry.hpp"

using namespace rigidflow;

namespace {

constexpr double kPi = std::numbers::pi;

std::mt19937_64 rng(12345);

Vec3 random_vec(double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return Vec3(u(rng), u(rng), u(rng));
}

Vec3 random_unit() {
  Vec3 v = random_vec();
  while (v.norm() < 1e-3) v = random_vec();
  return v.normalized();
}

Quat random_quat() {
  std::normal_distribution<double> n;
  Quat q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return canonical_sign(q);
}

double quat_distance(const Quat& a, const Quat& b) {
  const Quat d = a * b.conjugate();
  return 2.0 * std::atan2(d.vec().norm(), std::abs(d.w()));
}

// Rotation-matrix oracle, independent of the Rodrigues path.
Vec3 matrix_rotate(const Vec3& p, const AxisAngle& aa) {
  if (aa.angle() == 0) return p;
  return Eigen::AngleAxisd(aa.angle(), aa.axis()).toRotationMatrix() * p;
}

// Set equality under nearest-neighbor matching.
bool sets_equal(const std::vector<Vec3>& a, const std::vector<Vec3>& b,
                double tol) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (const Vec3& p : a) {
    double best = 1e300;
    size_t best_j = 0;
    for (size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = (p - b[j]).norm();
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    if (best > tol) return false;
    used[best_j] = true;
  }
  return true;
}

std::vector<Vec3> c4_orbit(const std::vector<Vec3>& seeds) {
  std::vector<Vec3> out;
  for (int k = 0; k < 4; ++k) {
    const double a = k * kPi / 2;
    for (const Vec3& p : seeds)
      out.emplace_back(std::cos(a) * p.x() - std::sin(a) * p.y(),
                       std::sin(a) * p.x() + std::cos(a) * p.y(), p.z());
  }
  return out;
}

}  // namespace

TEST_CASE("rotate basics") {
  CHECK((rotate(Vec3(1, 0, 0), AxisAngle()) - Vec3(1, 0, 0)).norm() == 0);
  const Vec3 r = rotate(Vec3(1, 0, 0), AxisAngle(0, 0, kPi / 2));
  CHECK((r - Vec3(0, 1, 0)).norm() < 1e-12);
}

TEST_CASE("rotate matches rotation-matrix oracle") {
  for (int i = 0; i < 200; ++i) {
    const Vec3 p = random_vec(2.0);
    const AxisAngle aa(random_unit() * std::uniform_real_distribution<double>(
                                           0, kPi)(rng));
    CHECK((rotate(p, aa) - matrix_rotate(p, aa)).norm() < 1e-12);
  }
}

TEST_CASE("rotate preserves norms and inner products") {
  for (int i = 0; i < 100; ++i) {
    const AxisAngle aa(random_unit() * 1.3);
    const Vec3 a = random_vec(), b = random_vec();
    CHECK(rotate(a, aa).norm() == doctest::Approx(a.norm()).epsilon(1e-12));
    CHECK(rotate(a, aa).dot(rotate(b, aa)) ==
          doctest::Approx(a.dot(b)).epsilon(1e-12));
  }
}

TEST_CASE("transport_point") {
  RigidMotion m;
  SUBCASE("static object") {
    const auto r = transport_point(Vec3(0.3, 0.2, 1.0), m);
    CHECK(r.flow.norm() == 0);
  }
  SUBCASE("pure translation") {
    m.T = Vec3(0.1, 0, 0);
    m.X = Vec3(0.4, -0.2, 0.9);
    const auto r = transport_point(Vec3(0, 0, 1), m);
    CHECK((r.flow - Vec3(0.1, 0, 0)).norm() < 1e-15);
  }
  SUBCASE("half turn about offset center") {
    m.Q = AxisAngle(0, 0, kPi);
    m.X = Vec3(0, 0, 1);
    const auto r = transport_point(Vec3(1, 0, 1), m);
    CHECK((r.p_prev - Vec3(-1, 0, 1)).norm() < 1e-12);
    CHECK((r.flow - Vec3(-2, 0, 0)).norm() < 1e-12);
  }
}

TEST_CASE("transport inverse recovers the point") {
  for (int i = 0; i < 100; ++i) {
    RigidMotion m;
    m.Q = AxisAngle(random_unit() *
                    std::uniform_real_distribution<double>(0, 3.0)(rng));
    m.T = random_vec(0.2);
    m.X = random_vec(0.5);
    const Vec3 p = random_vec();
    const auto fwd = transport_point(p, m);
    const Vec3 back = rotate(fwd.p_prev - m.T - m.X, AxisAngle(-m.Q.v)) + m.X;
    CHECK((back - p).norm() < 1e-9);
  }
}

TEST_CASE("swing_twist identity and pure twist") {
  const auto id = swing_twist(Quat::Identity(), Vec3::UnitZ());
  CHECK(id.alpha == doctest::Approx(0.0));
  CHECK(id.theta == doctest::Approx(0.0));

  const double a170 = 170.0 * kPi / 180.0;
  const auto st = swing_twist(Quat(Eigen::AngleAxisd(a170, Vec3::UnitZ())),
                              Vec3::UnitZ());
  CHECK(st.alpha == doctest::Approx(a170).epsilon(1e-12));
  CHECK(st.theta == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("swing_twist alpha equals the input twist angle") {
  for (int i = 0; i < 200; ++i) {
    const Vec3 axis = random_unit();
    // canonical wrap of the input: (-pi, pi]
    double a = std::uniform_real_distribution<double>(-kPi + 1e-6, kPi)(rng);
    const auto st = swing_twist(Quat(Eigen::AngleAxisd(a, axis)), axis);
    CHECK(st.alpha == doctest::Approx(a).epsilon(1e-12));
  }
}

TEST_CASE("swing_twist recomposition matches the input") {
  SUBCASE("twist about z composed with swing about x") {
    const Quat twist(Eigen::AngleAxisd(30 * kPi / 180, Vec3::UnitZ()));
    const Quat swing(Eigen::AngleAxisd(20 * kPi / 180, Vec3::UnitX()));
    const Quat q = swing * twist;  // twist first, then swing
    const auto st = swing_twist(q, Vec3::UnitZ());
    const Quat rebuilt =
        st.swing * Quat(Eigen::AngleAxisd(st.alpha, Vec3::UnitZ()));
    CHECK(quat_distance(rebuilt, q) < 1e-9);
    CHECK(st.alpha == doctest::Approx(30 * kPi / 180).epsilon(1e-9));
    CHECK(st.theta == doctest::Approx(20 * kPi / 180).epsilon(1e-9));
  }
  SUBCASE("random rotations") {
    for (int i = 0; i < 200; ++i) {
      const Quat q = random_quat();
      const Vec3 axis = random_unit();
      const auto st = swing_twist(q, axis);
      const Quat rebuilt = st.swing * Quat(Eigen::AngleAxisd(st.alpha, axis));
      CHECK(quat_distance(rebuilt, q) < 1e-9);
      // swing really is perpendicular to the twist axis
      CHECK(std::abs(st.swing.vec().dot(axis)) < 1e-9);
    }
  }
}

TEST_CASE("swing_twist degenerate half turn") {
  const Quat q(Eigen::AngleAxisd(kPi, Vec3::UnitX()));
  const auto st = swing_twist(q, Vec3::UnitZ());
  CHECK(st.degenerate);
  CHECK(st.alpha == doctest::Approx(kPi));
  const Quat rebuilt = st.swing * Quat(Eigen::AngleAxisd(st.alpha, Vec3::UnitZ()));
  CHECK(quat_distance(rebuilt, q) < 1e-9);
}

TEST_CASE("canonicalize_rotation C4 wraps 170 deg to -10 deg") {
  const std::vector<SymmetrySpec> syms{{Vec3::UnitZ(), 4}};
  const Quat q(Eigen::AngleAxisd(170 * kPi / 180, Vec3::UnitZ()));
  const Quat qh = canonicalize_rotation(q, syms);
  const Quat expected(Eigen::AngleAxisd(-10 * kPi / 180, Vec3::UnitZ()));
  CHECK(quat_distance(qh, expected) < 1e-12);
}

TEST_CASE("canonicalize_rotation returns q unchanged when in range") {
  const std::vector<SymmetrySpec> syms{{Vec3::UnitZ(), 4}};
  const Quat q = canonical_sign(
      Quat(Eigen::AngleAxisd(0.3, Vec3::UnitZ())) *
      Quat(Eigen::AngleAxisd(0.4, Vec3::UnitX())));
  // twist 0.3 is inside (-pi/4, pi/4]
  const Quat qh = canonicalize_rotation(q, syms);
  CHECK(quat_distance(qh, q) < 1e-15);
}

TEST_CASE("canonicalize_rotation removes infinite-order twist") {
  const std::vector<SymmetrySpec> syms{
      {Vec3::UnitZ(), SymmetrySpec::kInfiniteOrder}};
  for (int i = 0; i < 50; ++i) {
    const double a = std::uniform_real_distribution<double>(-3.0, 3.0)(rng);
    const Quat q(Eigen::AngleAxisd(a, Vec3::UnitZ()));
    const Quat qh = canonicalize_rotation(q, syms);
    CHECK(quat_distance(qh, Quat::Identity()) < 1e-9);
  }
}

TEST_CASE("canonicalized rotations act identically on symmetric point sets") {
  std::vector<Vec3> seeds;
  for (int i = 0; i < 8; ++i) seeds.push_back(random_vec(0.3));
  const std::vector<Vec3> pts = c4_orbit(seeds);
  const std::vector<SymmetrySpec> syms{{Vec3::UnitZ(), 4}};

  for (int i = 0; i < 50; ++i) {
    const Quat q = random_quat();
    const Quat qh = canonicalize_rotation(q, syms);
    const auto st = swing_twist(qh, Vec3::UnitZ());
    CHECK(std::abs(st.alpha) <= kPi / 4 + 1e-12);

    std::vector<Vec3> rot_q, rot_qh;
    for (const Vec3& p : pts) {
      rot_q.push_back(q * p);
      rot_qh.push_back(qh * p);
    }
    CHECK(sets_equal(rot_q, rot_qh, 1e-9));
  }
}

TEST_CASE("infinite-order canonicalization fixes on-axis points") {
  const std::vector<SymmetrySpec> syms{
      {Vec3::UnitZ(), SymmetrySpec::kInfiniteOrder}};
  std::vector<Vec3> pts;
  for (int i = -3; i <= 3; ++i) pts.emplace_back(0, 0, 0.1 * i);
  for (int i = 0; i < 50; ++i) {
    const Quat q = random_quat();
    const Quat qh = canonicalize_rotation(q, syms);
    CHECK(std::abs(swing_twist(qh, Vec3::UnitZ()).alpha) < 1e-9);
    std::vector<Vec3> rot_q, rot_qh;
    for (const Vec3& p : pts) {
      rot_q.push_back(q * p);
      rot_qh.push_back(qh * p);
    }
    CHECK(sets_equal(rot_q, rot_qh, 1e-9));
  }
}

TEST_CASE("multiple symmetry axes processed in order") {
  // order matters only for exotic configurations; with orthogonal axes the
  // listed order still has to bound both twists
  const std::vector<SymmetrySpec> syms{{Vec3::UnitZ(), 4}, {Vec3::UnitX(), 2}};
  const Quat q = random_quat();
  const Quat qh = canonicalize_rotation(q, syms);
  CHECK(std::abs(swing_twist(qh, Vec3::UnitX()).alpha) <= kPi / 2 + 1e-9);
}

TEST_CASE("project and backproject") {
  CameraIntrinsics cam{200, 200, 160, 120, 320, 240};
  const Pixel c = project(Vec3(0, 0, 1), cam);
  CHECK(c.u == doctest::Approx(160));
  CHECK(c.v == doctest::Approx(120));

  const Pixel off = project(Vec3(0.5, 0, 1), cam);
  CHECK(off.u == doctest::Approx(260));

  for (int i = 0; i < 100; ++i) {
    Vec3 p = random_vec();
    p.z() = std::uniform_real_distribution<double>(0.1, 3.0)(rng);
    const Pixel px = project(p, cam);
    CHECK((backproject(px.u, px.v, p.z(), cam) - p).norm() < 1e-12);
  }

  CHECK_THROWS_AS(project(Vec3(0, 0, -1), cam), std::domain_error);
  CHECK_THROWS_AS(project(Vec3(0, 0, 0), cam), std::domain_error);
}

TEST_CASE("axis-angle quaternion round trip wraps to [0, pi]") {
  for (int i = 0; i < 100; ++i) {
    const Quat q = random_quat();
    const AxisAngle aa = AxisAngle::from_quat(q);
    CHECK(aa.angle() <= kPi + 1e-12);
    CHECK(quat_distance(aa.to_quat(), q) < 1e-9);
  }
}
