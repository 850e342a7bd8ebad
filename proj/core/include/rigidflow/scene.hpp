#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rigidflow/geometry.hpp"
#include "rigidflow/image.hpp"

namespace rigidflow {

struct Pose {
  Quat q = Quat::Identity();
  Vec3 t = Vec3::Zero();
};

struct SceneObject {
  int id = 0;  // >= 1, unique within the scene
  std::vector<Vec3> points;  // object frame
  std::vector<Vec3> colors;  // per-point RGB in [0,1]
  Pose pose_t, pose_tm1;     // world poses at the two frames
  std::vector<SymmetrySpec> syms;

  Vec3 center_t() const { return pose_t.t; }
  Vec3 center_tm1() const { return pose_tm1.t; }
};

struct Floor {
  double depth = 1.5;   // camera-frame z of the plane
  double extent = 1.0;  // half-size, kept for serialization
  Vec3 color = Vec3(0.45, 0.42, 0.40);
};

struct ScenePair {
  std::vector<SceneObject> objects;
  Floor floor;
  CameraIntrinsics cam;
  uint64_t seed = 0;
};

// The per-pixel image stack at frame t. Background pixels carry zeros in
// every channel except P and I (floor geometry/color) and have obj_id 0.
struct PixelMaps {
  Imaged P;            // camera-frame XYZ
  Imaged I;            // RGB
  Imaged Q, T, X, S;   // per-pixel rigid motion and scene flow
  Imaged mask;         // {0,1}
  Imaged B;            // enclosing-sphere radius, meters
  Imaged eta;          // centroid label in [0,1]
  Imagei obj_id;       // 0 = background
  Imaged both_frames;  // 1 where the pixel's object is visible in both frames

  int height() const { return P.height(); }
  int width() const { return P.width(); }
};

struct RenderedView {
  Imaged P;  // camera-frame XYZ
  Imaged I;  // RGB
  Imagei obj_id;
};

enum class Frame { t, tm1 };

struct GeneratorConfig {
  int min_objects = 2, max_objects = 6;
  int width = 80, height = 60;
  double min_displacement = 0.05;   // meters, uniform range
  double max_displacement = 0.12;   // mean 0.085
  double max_rotation = 0.6;        // radians
  double symmetric_prob = 0.5;      // chance of a cylinder / square prism
  double min_size = 0.06, max_size = 0.16;  // meters
  int points_per_object = 0;        // 0 = derived from resolution
  double workspace_x = 0.30, workspace_y = 0.20;
  double min_depth = 0.90, max_depth = 1.30;
  double floor_depth = 1.50;
  double default_radius = 0.05;     // B for single-object scenes
  double min_xi_separation = 0.03;  // resample poses below this
  bool allow_degenerate_xi = false;
  double depth_noise_sigma = 0.0;   // optional augmentation, off by default
  int centroid_top_d = 300;         // D pixels labeled 1 per object

  void validate() const;  // throws std::invalid_argument
  CameraIntrinsics camera() const;
};

// Deterministic given (cfg, seed). Objects are point-sampled primitives
// (boxes, cylinders C_inf, square prisms C4) with two sampled poses each.
ScenePair generate_scene_pair(const GeneratorConfig& cfg, uint64_t seed);

// Point-splat z-buffer render; floor fills empty pixels with obj_id 0.
RenderedView render_view(const ScenePair& scene, Frame frame,
                         double depth_noise_sigma = 0.0, uint64_t noise_seed = 0);

// Full ground-truth stack at frame t. Per-pixel Q is the symmetry-
// canonicalized relative rotation t -> t-1; S follows from the stored
// (Q, T, X) so oracle predictions close the pipeline exactly.
PixelMaps compute_gt_maps(const ScenePair& scene,
                          const GeneratorConfig& cfg = GeneratorConfig{});

// Trajectory features [center_t, center_tm1] per object, keyed by id.
std::vector<Eigen::Matrix<double, 6, 1>> trajectory_features(
    const ScenePair& scene);

// B at pixels of object k = half the min trajectory distance to any other
// object; single-object scenes use default_radius.
Imaged compute_boundary_radii(const ScenePair& scene, const Imagei& obj_id,
                              double default_radius);

// Per object, the D pixels whose 3D points are nearest the object center
// get label 1 (all of them when the object has <= D pixels). Distance
// ties at rank D break by row-major pixel order.
Imaged compute_centroid_labels(const Imagei& obj_id, const Imaged& P,
                               const std::vector<SceneObject>& objects, int D);

}  // namespace rigidflow
