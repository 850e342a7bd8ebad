#include "rigidflow/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rigidflow {

namespace {

constexpr double kPi = std::numbers::pi;

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Quat random_rotation(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Quat q(n(rng), n(rng), n(rng), n(rng));
  while (q.norm() < 1e-6) q = Quat(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return canonical_sign(q);
}

Vec3 random_unit(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v(n(rng), n(rng), n(rng));
  while (v.norm() < 1e-6) v = Vec3(n(rng), n(rng), n(rng));
  return v.normalized();
}

Vec3 random_color(Rng& rng) {
  return Vec3(uniform(rng, 0.15, 0.95), uniform(rng, 0.15, 0.95),
              uniform(rng, 0.15, 0.95));
}

// Uniform surface sampling of an axis-aligned box, per-face tinted so
// boxes carry texture for correlation matching.
void sample_box(Rng& rng, const Vec3& dims, int n, const Vec3& base,
                std::vector<Vec3>& pts, std::vector<Vec3>& cols) {
  const double ax = dims.x(), ay = dims.y(), az = dims.z();
  const double areas[3] = {ay * az, ax * az, ax * ay};
  const double total = 2 * (areas[0] + areas[1] + areas[2]);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    double pick = u01(rng) * total;
    int axis = 0;
    double sign = 1.0;
    for (int a = 0; a < 3; ++a) {
      if (pick < areas[a]) { axis = a; sign = 1.0; break; }
      pick -= areas[a];
      if (pick < areas[a]) { axis = a; sign = -1.0; break; }
      pick -= areas[a];
    }
    Vec3 p(uniform(rng, -ax / 2, ax / 2), uniform(rng, -ay / 2, ay / 2),
           uniform(rng, -az / 2, az / 2));
    p[axis] = sign * dims[axis] / 2;
    pts.push_back(p);
    const double tint = 0.55 + 0.15 * axis + (sign > 0 ? 0.12 : 0.0);
    cols.push_back((base * tint).cwiseMin(1.0));
  }
}

// Square prism with exact C4 symmetry about z: a quarter of the surface
// is sampled and replicated under 90-degree rotations.
void sample_prism(Rng& rng, double side, double height, int n,
                  const Vec3& color, std::vector<Vec3>& pts,
                  std::vector<Vec3>& cols) {
  std::vector<Vec3> quarter, qcols;
  sample_box(rng, Vec3(side, side, height), (n + 3) / 4, color, quarter, qcols);
  for (int k = 0; k < 4; ++k) {
    const double a = k * kPi / 2;
    const double c = std::cos(a), s = std::sin(a);
    for (const Vec3& p : quarter) {
      pts.emplace_back(c * p.x() - s * p.y(), s * p.x() + c * p.y(), p.z());
      cols.push_back(color);
    }
  }
}

// Cylinder sampled on an angular lattice; the set is invariant under a
// fine discrete rotation group, standing in for C_inf.
void sample_cylinder(Rng& rng, double radius, double height, int n,
                     const Vec3& color, std::vector<Vec3>& pts,
                     std::vector<Vec3>& cols) {
  const double area = 2 * kPi * radius * height + 2 * kPi * radius * radius;
  double d = std::sqrt(area / std::max(n, 1));
  const int n_angles = std::max<int>(48, int(std::ceil(2 * kPi * radius / d)));
  d = 2 * kPi * radius / n_angles;
  const int n_rows = std::max<int>(2, int(std::ceil(height / d)));
  (void)rng;
  for (int a = 0; a < n_angles; ++a) {
    const double th = 2 * kPi * a / n_angles;
    const double cx = radius * std::cos(th), cy = radius * std::sin(th);
    for (int r = 0; r <= n_rows; ++r) {
      const double z = -height / 2 + height * r / n_rows;
      pts.emplace_back(cx, cy, z);
      cols.push_back(color);
    }
  }
  // cap rings
  for (double rr = radius - d; rr > d / 2; rr -= d) {
    for (int a = 0; a < n_angles; ++a) {
      const double th = 2 * kPi * a / n_angles;
      pts.emplace_back(rr * std::cos(th), rr * std::sin(th), height / 2);
      pts.emplace_back(rr * std::cos(th), rr * std::sin(th), -height / 2);
      cols.push_back(color);
      cols.push_back(color);
    }
  }
  pts.emplace_back(0, 0, height / 2);
  pts.emplace_back(0, 0, -height / 2);
  cols.push_back(color);
  cols.push_back(color);
}

}  // namespace

void GeneratorConfig::validate() const {
  if (min_objects < 1 || max_objects < min_objects)
    throw std::invalid_argument("GeneratorConfig: bad object-count range");
  if (width < 4 || height < 4)
    throw std::invalid_argument("GeneratorConfig: bad resolution");
  if (min_displacement < 0 || max_displacement < min_displacement)
    throw std::invalid_argument("GeneratorConfig: bad displacement range");
  if (min_size <= 0 || max_size < min_size)
    throw std::invalid_argument("GeneratorConfig: bad size range");
  if (min_depth <= 0 || max_depth < min_depth || floor_depth <= max_depth)
    throw std::invalid_argument("GeneratorConfig: bad depth layout");
  if (symmetric_prob < 0 || symmetric_prob > 1)
    throw std::invalid_argument("GeneratorConfig: bad symmetry probability");
  if (centroid_top_d < 1)
    throw std::invalid_argument("GeneratorConfig: centroid_top_d must be >= 1");
}

CameraIntrinsics GeneratorConfig::camera() const {
  CameraIntrinsics cam;
  cam.width = width;
  cam.height = height;
  cam.fx = cam.fy = 1.1 * width;
  cam.cx = width / 2.0 - 0.5;
  cam.cy = height / 2.0 - 0.5;
  return cam;
}

ScenePair generate_scene_pair(const GeneratorConfig& cfg, uint64_t seed) {
  cfg.validate();
  Rng rng(seed);

  ScenePair scene;
  scene.seed = seed;
  scene.cam = cfg.camera();
  scene.floor.depth = cfg.floor_depth;
  scene.floor.extent =
      std::max(cfg.workspace_x, cfg.workspace_y) + cfg.max_size;

  const int n_objects =
      std::uniform_int_distribution<int>(cfg.min_objects, cfg.max_objects)(rng);
  int points_per_object = cfg.points_per_object;
  if (points_per_object <= 0)
    points_per_object = std::max(600, cfg.width * cfg.height / 4);

  for (int k = 0; k < n_objects; ++k) {
    SceneObject obj;
    obj.id = k + 1;
    const double size = uniform(rng, cfg.min_size, cfg.max_size);
    const Vec3 color = random_color(rng);
    const bool symmetric = uniform(rng, 0.0, 1.0) < cfg.symmetric_prob;
    if (!symmetric) {
      const Vec3 dims(size, size * uniform(rng, 0.6, 1.0),
                      size * uniform(rng, 0.6, 1.0));
      sample_box(rng, dims, points_per_object, color, obj.points, obj.colors);
    } else if (uniform(rng, 0.0, 1.0) < 0.5) {
      sample_cylinder(rng, size * 0.35, size, points_per_object, color,
                      obj.points, obj.colors);
      obj.syms.push_back({Vec3::UnitZ(), SymmetrySpec::kInfiniteOrder});
    } else {
      sample_prism(rng, size * 0.7, size, points_per_object, color,
                   obj.points, obj.colors);
      obj.syms.push_back({Vec3::UnitZ(), 4});
    }
    scene.objects.push_back(std::move(obj));
  }

  // Pose sampling; retried as a block when trajectory features collide.
  const int kMaxAttempts = 64;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    for (SceneObject& obj : scene.objects) {
      obj.pose_t.q = random_rotation(rng);
      obj.pose_t.t = Vec3(uniform(rng, -cfg.workspace_x, cfg.workspace_x),
                          uniform(rng, -cfg.workspace_y, cfg.workspace_y),
                          uniform(rng, cfg.min_depth, cfg.max_depth));
      const double mag =
          uniform(rng, cfg.min_displacement, cfg.max_displacement);
      const double rot = uniform(rng, 0.0, cfg.max_rotation);
      if (mag == 0.0 && rot == 0.0) {
        obj.pose_tm1 = obj.pose_t;
        continue;
      }
      const Quat dq(Eigen::AngleAxisd(rot, random_unit(rng)));
      obj.pose_tm1.q = canonical_sign((dq * obj.pose_t.q).normalized());
      obj.pose_tm1.t = obj.pose_t.t + mag * random_unit(rng);
    }
    if (cfg.allow_degenerate_xi) break;
    const auto xi = trajectory_features(scene);
    double min_dist = std::numeric_limits<double>::infinity();
    for (size_t a = 0; a < xi.size(); ++a)
      for (size_t b = a + 1; b < xi.size(); ++b)
        min_dist = std::min(min_dist, (xi[a] - xi[b]).norm());
    if (scene.objects.size() < 2 || min_dist >= cfg.min_xi_separation) break;
    if (attempt == kMaxAttempts - 1)
      throw std::runtime_error(
          "generate_scene_pair: could not separate trajectory features");
  }
  return scene;
}

RenderedView render_view(const ScenePair& scene, Frame frame,
                         double depth_noise_sigma, uint64_t noise_seed) {
  const CameraIntrinsics& cam = scene.cam;
  const int H = cam.height, W = cam.width;
  RenderedView out;
  out.P = Imaged(H, W, 3);
  out.I = Imaged(H, W, 3);
  out.obj_id = Imagei(H, W, 1, 0);
  Imaged zbuf(H, W, 1, std::numeric_limits<double>::infinity());

  for (const SceneObject& obj : scene.objects) {
    const Pose& pose = (frame == Frame::t) ? obj.pose_t : obj.pose_tm1;
    const Eigen::Matrix3d R = pose.q.toRotationMatrix();
    for (size_t i = 0; i < obj.points.size(); ++i) {
      const Vec3 p = R * obj.points[i] + pose.t;
      if (p.z() <= 0) continue;
      const Pixel px = project(p, cam);
      const int u = int(std::lround(px.u));
      const int v = int(std::lround(px.v));
      if (u < 0 || u >= W || v < 0 || v >= H) continue;
      if (p.z() < zbuf(v, u)) {
        zbuf(v, u) = p.z();
        out.P.set_vec3(v, u, p);
        out.I.set_vec3(v, u, obj.colors[i]);
        out.obj_id(v, u) = obj.id;
      }
    }
  }

  // Floor fills the remaining pixels.
  for (int v = 0; v < H; ++v)
    for (int u = 0; u < W; ++u)
      if (out.obj_id(v, u) == 0) {
        out.P.set_vec3(v, u, backproject(u, v, scene.floor.depth, cam));
        out.I.set_vec3(v, u, scene.floor.color);
      }

  if (depth_noise_sigma > 0) {
    Rng rng(noise_seed);
    std::normal_distribution<double> n(0.0, depth_noise_sigma);
    for (int v = 0; v < H; ++v)
      for (int u = 0; u < W; ++u) {
        Vec3 p = out.P.vec3(v, u);
        const double z = p.z();
        if (z > 0) out.P.set_vec3(v, u, p * ((z + n(rng)) / z));
      }
  }
  return out;
}

std::vector<Eigen::Matrix<double, 6, 1>> trajectory_features(
    const ScenePair& scene) {
  std::vector<Eigen::Matrix<double, 6, 1>> xi;
  xi.reserve(scene.objects.size());
  for (const SceneObject& obj : scene.objects) {
    Eigen::Matrix<double, 6, 1> v;
    v << obj.center_t(), obj.center_tm1();
    xi.push_back(v);
  }
  return xi;
}

Imaged compute_boundary_radii(const ScenePair& scene, const Imagei& obj_id,
                              double default_radius) {
  const auto xi = trajectory_features(scene);
  std::vector<double> radius(scene.objects.size(), default_radius);
  for (size_t k = 0; k < xi.size(); ++k) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t l = 0; l < xi.size(); ++l)
      if (l != k) best = std::min(best, (xi[k] - xi[l]).norm());
    if (std::isfinite(best)) radius[k] = 0.5 * best;
  }

  Imaged B(obj_id.height(), obj_id.width(), 1, 0.0);
  for (int v = 0; v < obj_id.height(); ++v)
    for (int u = 0; u < obj_id.width(); ++u) {
      const int id = obj_id(v, u);
      if (id > 0) B(v, u) = radius[id - 1];
    }
  return B;
}

Imaged compute_centroid_labels(const Imagei& obj_id, const Imaged& P,
                               const std::vector<SceneObject>& objects,
                               int D) {
  if (D < 1) throw std::invalid_argument("compute_centroid_labels: D >= 1");
  Imaged eta(obj_id.height(), obj_id.width(), 1, 0.0);
  for (const SceneObject& obj : objects) {
    std::vector<std::pair<double, int>> ranked;  // (distance, row-major index)
    for (int v = 0; v < obj_id.height(); ++v)
      for (int u = 0; u < obj_id.width(); ++u)
        if (obj_id(v, u) == obj.id)
          ranked.emplace_back((P.vec3(v, u) - obj.center_t()).norm(),
                              v * obj_id.width() + u);
    std::sort(ranked.begin(), ranked.end());
    const int take = std::min<int>(D, int(ranked.size()));
    for (int i = 0; i < take; ++i) {
      const int idx = ranked[i].second;
      eta(idx / obj_id.width(), idx % obj_id.width()) = 1.0;
    }
  }
  return eta;
}

PixelMaps compute_gt_maps(const ScenePair& scene, const GeneratorConfig& cfg) {
  const RenderedView view_t =
      render_view(scene, Frame::t, cfg.depth_noise_sigma, scene.seed * 2 + 1);
  const RenderedView view_tm1 =
      render_view(scene, Frame::tm1, cfg.depth_noise_sigma, scene.seed * 2 + 2);
  const int H = view_t.P.height(), W = view_t.P.width();

  // Per-object relative motion t -> t-1 with symmetry-canonicalized
  // rotation (axes expressed in frame t-1).
  std::vector<RigidMotion> motions(scene.objects.size());
  std::vector<bool> in_tm1(scene.objects.size() + 1, false);
  for (size_t k = 0; k < scene.objects.size(); ++k) {
    const SceneObject& obj = scene.objects[k];
    Quat q_rel =
        canonical_sign((obj.pose_tm1.q * obj.pose_t.q.conjugate()).normalized());
    if (!obj.syms.empty()) {
      std::vector<SymmetrySpec> world_syms = obj.syms;
      const Eigen::Matrix3d R_tm1 = obj.pose_tm1.q.toRotationMatrix();
      for (SymmetrySpec& s : world_syms) s.axis = (R_tm1 * s.axis).normalized();
      q_rel = canonicalize_rotation(q_rel, world_syms);
    }
    motions[k].Q = AxisAngle::from_quat(q_rel);
    motions[k].X = obj.center_t();
    motions[k].T = obj.center_tm1() - obj.center_t();
  }
  for (int v = 0; v < H; ++v)
    for (int u = 0; u < W; ++u) {
      const int id = view_tm1.obj_id(v, u);
      if (id > 0) in_tm1[id] = true;
    }

  PixelMaps maps;
  maps.P = view_t.P;
  maps.I = view_t.I;
  maps.obj_id = view_t.obj_id;
  maps.Q = Imaged(H, W, 3);
  maps.T = Imaged(H, W, 3);
  maps.X = Imaged(H, W, 3);
  maps.S = Imaged(H, W, 3);
  maps.mask = Imaged(H, W, 1);
  maps.eta = Imaged(H, W, 1);
  maps.both_frames = Imaged(H, W, 1);
  maps.B = compute_boundary_radii(scene, view_t.obj_id, cfg.default_radius);
  maps.eta = compute_centroid_labels(view_t.obj_id, view_t.P, scene.objects,
                                     cfg.centroid_top_d);

  for (int v = 0; v < H; ++v)
    for (int u = 0; u < W; ++u) {
      const int id = maps.obj_id(v, u);
      if (id == 0) continue;
      const RigidMotion& m = motions[id - 1];
      maps.mask(v, u) = 1.0;
      maps.Q.set_vec3(v, u, m.Q.v);
      maps.T.set_vec3(v, u, m.T);
      maps.X.set_vec3(v, u, m.X);
      maps.S.set_vec3(v, u, transport_point(maps.P.vec3(v, u), m).flow);
      if (in_tm1[id]) maps.both_frames(v, u) = 1.0;
    }
  return maps;
}

}  // namespace rigidflow
