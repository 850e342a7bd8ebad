#include "rigidflow/segmentation.hpp"

#include <cmath>
#include <stdexcept>

namespace rigidflow {

Imaged trajectory_map(const Imaged& X, const Imaged& T) {
  require_same_shape(X, T, "trajectory_map");
  Imaged xi(X.height(), X.width(), 6);
  for (int v = 0; v < X.height(); ++v)
    for (int u = 0; u < X.width(); ++u) {
      const Vec3 x = X.vec3(v, u);
      const Vec3 t = T.vec3(v, u);
      Eigen::Matrix<double, 6, 1> f;
      f << x, x + t;
      xi.set_vec6(v, u, f);
    }
  return xi;
}

SegmentationResult greedy_cluster(const Imaged& xi, const Imaged& B,
                                  const Imaged& eta, const Imaged& mask) {
  if (!xi.same_plane(B) || !xi.same_plane(eta) || !xi.same_plane(mask))
    throw std::invalid_argument("greedy_cluster: map shapes differ");
  const int H = xi.height(), W = xi.width();

  SegmentationResult res;
  res.labels = Imagei(H, W, 1, 0);

  std::vector<int> unassigned;  // row-major foreground indices
  for (int v = 0; v < H; ++v)
    for (int u = 0; u < W; ++u)
      if (mask(v, u) > 0.5) unassigned.push_back(v * W + u);

  int next_label = 1;
  while (!unassigned.empty()) {
    // seed = max eta; row-major order breaks ties by construction
    size_t seed_pos = 0;
    double best_eta = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < unassigned.size(); ++i) {
      const int idx = unassigned[i];
      const double e = eta(idx / W, idx % W);
      if (e > best_eta) {
        best_eta = e;
        seed_pos = i;
      }
    }
    const int seed = unassigned[seed_pos];
    const auto seed_xi = xi.vec6(seed / W, seed % W);
    const double radius = B(seed / W, seed % W);

    std::vector<int> keep;
    keep.reserve(unassigned.size());
    int count = 0;
    for (const int idx : unassigned) {
      const bool inside =
          idx == seed ||
          (xi.vec6(idx / W, idx % W) - seed_xi).norm() <= radius;
      if (inside) {
        res.labels(idx / W, idx % W) = next_label;
        ++count;
      } else {
        keep.push_back(idx);
      }
    }
    res.counts.push_back(count);
    unassigned.swap(keep);
    ++next_label;
  }
  res.motions.resize(res.counts.size());
  return res;
}

std::vector<RigidMotion> refine_rigid(const Imagei& labels, const Imaged& Q,
                                      const Imaged& T, const Imaged& X) {
  int K = 0;
  for (int v = 0; v < labels.height(); ++v)
    for (int u = 0; u < labels.width(); ++u) K = std::max(K, labels(v, u));

  std::vector<Vec3> sum_t(K, Vec3::Zero()), sum_x(K, Vec3::Zero());
  std::vector<Eigen::Vector4d> sum_q(K, Eigen::Vector4d::Zero());
  std::vector<Quat> ref_q(K, Quat::Identity());
  std::vector<bool> has_ref(K, false);
  std::vector<int> n(K, 0);

  for (int v = 0; v < labels.height(); ++v)
    for (int u = 0; u < labels.width(); ++u) {
      const int k = labels(v, u);
      if (k <= 0) continue;
      sum_t[k - 1] += T.vec3(v, u);
      sum_x[k - 1] += X.vec3(v, u);
      Quat q = AxisAngle(Q.vec3(v, u)).to_quat();
      if (!has_ref[k - 1]) {
        ref_q[k - 1] = q;
        has_ref[k - 1] = true;
      } else if (q.dot(ref_q[k - 1]) < 0) {
        q.coeffs() = -q.coeffs();
      }
      sum_q[k - 1] += Eigen::Vector4d(q.w(), q.x(), q.y(), q.z());
      ++n[k - 1];
    }

  std::vector<RigidMotion> motions(K);
  for (int k = 0; k < K; ++k) {
    if (n[k] == 0) continue;
    motions[k].T = sum_t[k] / n[k];
    motions[k].X = sum_x[k] / n[k];
    const Eigen::Vector4d q = sum_q[k].normalized();
    motions[k].Q = AxisAngle::from_quat(Quat(q[0], q[1], q[2], q[3]));
  }
  return motions;
}

Imaged recompute_flow(const Imagei& labels,
                      const std::vector<RigidMotion>& motions,
                      const Imaged& P) {
  if (P.height() != labels.height() || P.width() != labels.width())
    throw std::invalid_argument("recompute_flow: shape mismatch");
  Imaged S(P.height(), P.width(), 3, 0.0);
  for (int v = 0; v < P.height(); ++v)
    for (int u = 0; u < P.width(); ++u) {
      const int k = labels(v, u);
      if (k <= 0) continue;
      if (k > int(motions.size()))
        throw std::invalid_argument("recompute_flow: label without motion");
      S.set_vec3(v, u, transport_point(P.vec3(v, u), motions[k - 1]).flow);
    }
  return S;
}

Imaged threshold_mask(const Imaged& mask_prob) {
  Imaged out(mask_prob.height(), mask_prob.width(), 1, 0.0);
  for (int v = 0; v < out.height(); ++v)
    for (int u = 0; u < out.width(); ++u)
      out(v, u) = mask_prob(v, u) > 0.5 ? 1.0 : 0.0;
  return out;
}

}  // namespace rigidflow
