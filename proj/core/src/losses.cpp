#include "rigidflow/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "rigidflow/segmentation.hpp"

namespace rigidflow {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// BCE(z, y) = max(z, 0) - z y + log(1 + exp(-|z|))
double bce(double z, double y) {
  return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

int foreground_count(const Imaged& mask) {
  int n = 0;
  for (double m : mask.data())
    if (m > 0.5) ++n;
  return n;
}

}  // namespace

PredictionMaps PredictionMaps::zeros_like(const PixelMaps& gt) {
  PredictionMaps p;
  const int H = gt.height(), W = gt.width();
  p.Q = Imaged(H, W, 3);
  p.T = Imaged(H, W, 3);
  p.X = Imaged(H, W, 3);
  p.S = Imaged(H, W, 3);
  p.B = Imaged(H, W, 1);
  p.mask_logits = Imaged(H, W, 1);
  p.eta_logits = Imaged(H, W, 1);
  return p;
}

PredictionMaps PredictionMaps::oracle(const PixelMaps& gt, double logit_scale) {
  PredictionMaps p;
  p.Q = gt.Q;
  p.T = gt.T;
  p.X = gt.X;
  p.S = gt.S;
  p.B = gt.B;
  const int H = gt.height(), W = gt.width();
  p.mask_logits = Imaged(H, W, 1);
  p.eta_logits = Imaged(H, W, 1);
  for (int v = 0; v < H; ++v)
    for (int u = 0; u < W; ++u) {
      p.mask_logits(v, u) = gt.mask(v, u) > 0.5 ? logit_scale : -logit_scale;
      p.eta_logits(v, u) = gt.eta(v, u) > 0.5 ? logit_scale : -logit_scale;
    }
  return p;
}

ScalarWithGrad mask_loss(const Imaged& logits, const Imaged& gt_mask) {
  require_same_shape(logits, gt_mask, "mask_loss");
  ScalarWithGrad out;
  out.grad = Imaged(logits.height(), logits.width(), 1, 0.0);
  const double n = double(logits.size());
  for (int v = 0; v < logits.height(); ++v)
    for (int u = 0; u < logits.width(); ++u) {
      const double z = logits(v, u), y = gt_mask(v, u);
      out.value += bce(z, y) / n;
      out.grad(v, u) = (sigmoid(z) - y) / n;
    }
  return out;
}

ScalarWithGrad center_loss(const Imaged& logits, const Imaged& gt_eta,
                           const Imaged& fg_mask) {
  require_same_shape(logits, gt_eta, "center_loss");
  ScalarWithGrad out;
  out.grad = Imaged(logits.height(), logits.width(), 1, 0.0);
  const int n = foreground_count(fg_mask);
  if (n == 0) return out;
  for (int v = 0; v < logits.height(); ++v)
    for (int u = 0; u < logits.width(); ++u) {
      if (fg_mask(v, u) <= 0.5) continue;
      const double z = logits(v, u), y = gt_eta(v, u);
      out.value += bce(z, y) / n;
      out.grad(v, u) = (sigmoid(z) - y) / n;
    }
  return out;
}

PixelwiseResult pixelwiseLossImpl(const PredictionMaps& pred,
                                  const PixelMaps& gt, const LossWeights& w) {
  const int H = gt.height(), W = gt.width();
  PixelwiseResult res;
  res.grad_Q = Imaged(H, W, 3, 0.0);
  res.grad_T = Imaged(H, W, 3, 0.0);
  res.grad_X = Imaged(H, W, 3, 0.0);
  res.grad_S = Imaged(H, W, 3, 0.0);
  res.grad_B = Imaged(H, W, 1, 0.0);

  const int n = foreground_count(gt.mask);
  if (n == 0) return res;

  // attr index: 0 Q, 1 T, 2 X, 3 S, 4 B, 5 xi
  const double lambdas[6] = {w.Q, w.T, w.X, w.S, w.B, w.xi};

  for (int v = 0; v < H; ++v)
    for (int u = 0; u < W; ++u) {
      if (gt.mask(v, u) <= 0.5) continue;

      auto add3 = [&](int attr, const Vec3& d, Imaged& grad) {
        const double norm = d.norm();
        res.per_attr[attr] += lambdas[attr] * norm / n;
        if (norm > 0) {
          const Vec3 g = lambdas[attr] / n * d / norm;
          grad(v, u, 0) += g.x();
          grad(v, u, 1) += g.y();
          grad(v, u, 2) += g.z();
        }
      };

      add3(0, pred.Q.vec3(v, u) - gt.Q.vec3(v, u), res.grad_Q);
      add3(1, pred.T.vec3(v, u) - gt.T.vec3(v, u), res.grad_T);
      add3(2, pred.X.vec3(v, u) - gt.X.vec3(v, u), res.grad_X);
      add3(3, pred.S.vec3(v, u) - gt.S.vec3(v, u), res.grad_S);

      const double db = pred.B(v, u) - gt.B(v, u);
      res.per_attr[4] += lambdas[4] * std::abs(db) / n;
      if (db != 0) res.grad_B(v, u) += lambdas[4] / n * (db > 0 ? 1.0 : -1.0);

      // trajectory attribute; gradient flows into X (both halves) and T
      const Vec3 dx = pred.X.vec3(v, u) - gt.X.vec3(v, u);
      const Vec3 dt = pred.T.vec3(v, u) - gt.T.vec3(v, u);
      Eigen::Matrix<double, 6, 1> dxi;
      dxi << dx, dx + dt;
      const double norm = dxi.norm();
      res.per_attr[5] += lambdas[5] * norm / n;
      if (norm > 0) {
        const Eigen::Matrix<double, 6, 1> g = lambdas[5] / n * dxi / norm;
        for (int i = 0; i < 3; ++i) {
          res.grad_X(v, u, i) += g[i] + g[i + 3];
          res.grad_T(v, u, i) += g[i + 3];
        }
      }
    }

  for (double a : res.per_attr) res.value += a;
  return res;
}

PixelwiseResult pixelwise_loss(const PredictionMaps& pred, const PixelMaps& gt,
                               const LossWeights& w) {
  return pixelwiseLossImpl(pred, gt, w);
}

ScalarWithGrad variance_loss(const Imaged& xi_hat, const Imagei& gt_labels) {
  const int H = xi_hat.height(), W = xi_hat.width();
  ScalarWithGrad out;
  out.grad = Imaged(H, W, 6, 0.0);

  int K = 0;
  for (int v = 0; v < H; ++v)
    for (int u = 0; u < W; ++u) K = std::max(K, gt_labels(v, u));
  if (K == 0) return out;

  std::vector<Eigen::Matrix<double, 6, 1>> mean(
      K, Eigen::Matrix<double, 6, 1>::Zero());
  std::vector<int> count(K, 0);
  for (int v = 0; v < H; ++v)
    for (int u = 0; u < W; ++u) {
      const int k = gt_labels(v, u);
      if (k <= 0) continue;
      mean[k - 1] += xi_hat.vec6(v, u);
      ++count[k - 1];
    }
  for (int k = 0; k < K; ++k)
    if (count[k] > 0) mean[k] /= count[k];

  // Residuals about each object's mean sum to zero, so the
  // through-the-mean term of the full derivative cancels exactly.
  for (int v = 0; v < H; ++v)
    for (int u = 0; u < W; ++u) {
      const int k = gt_labels(v, u);
      if (k <= 0) continue;
      const Eigen::Matrix<double, 6, 1> d = xi_hat.vec6(v, u) - mean[k - 1];
      out.value += d.squaredNorm() / count[k - 1];
      const Eigen::Matrix<double, 6, 1> g = 2.0 / count[k - 1] * d;
      for (int i = 0; i < 6; ++i) out.grad(v, u, i) += g[i];
    }
  return out;
}

ScalarWithGrad violation_loss(const Imaged& xi_hat, const Imaged& gt_xi,
                              const Imaged& gt_B, const Imaged& fg_mask) {
  require_same_shape(xi_hat, gt_xi, "violation_loss");
  const int H = xi_hat.height(), W = xi_hat.width();
  ScalarWithGrad out;
  out.grad = Imaged(H, W, 6, 0.0);
  for (int v = 0; v < H; ++v)
    for (int u = 0; u < W; ++u) {
      if (fg_mask(v, u) <= 0.5) continue;
      const Eigen::Matrix<double, 6, 1> d = xi_hat.vec6(v, u) - gt_xi.vec6(v, u);
      const double norm = d.norm();
      if (norm <= gt_B(v, u) / 5.0) continue;  // subgradient 0 at boundary
      out.value += norm;
      if (norm > 0)
        for (int i = 0; i < 6; ++i) out.grad(v, u, i) += d[i] / norm;
    }
  return out;
}

TotalLossResult total_loss(const PredictionMaps& pred, const PixelMaps& gt,
                           const LossWeights& w) {
  TotalLossResult res;
  res.grad = PredictionMaps::zeros_like(gt);

  const ScalarWithGrad lm = mask_loss(pred.mask_logits, gt.mask);
  const ScalarWithGrad lc = center_loss(pred.eta_logits, gt.eta, gt.mask);
  const PixelwiseResult lp = pixelwiseLossImpl(pred, gt, w);

  const Imaged xi_hat = trajectory_map(pred.X, pred.T);
  const Imaged gt_xi = trajectory_map(gt.X, gt.T);
  const ScalarWithGrad lvar = variance_loss(xi_hat, gt.obj_id);
  const ScalarWithGrad lvio = violation_loss(xi_hat, gt_xi, gt.B, gt.mask);

  LossBreakdown& b = res.breakdown;
  b.mask = lm.value;
  b.center = lc.value;
  b.pixelwise = lp.value;
  b.p_Q = lp.per_attr[0];
  b.p_T = lp.per_attr[1];
  b.p_X = lp.per_attr[2];
  b.p_S = lp.per_attr[3];
  b.p_B = lp.per_attr[4];
  b.p_xi = lp.per_attr[5];
  b.variance = lvar.value;
  b.violation = lvio.value;
  b.total = w.m * b.mask + w.center * b.center + b.pixelwise +
            w.var * b.variance + w.vio * b.violation;

  const int H = gt.height(), W = gt.width();
  res.grad.Q = lp.grad_Q;
  res.grad.S = lp.grad_S;
  res.grad.B = lp.grad_B;
  res.grad.T = lp.grad_T;
  res.grad.X = lp.grad_X;
  for (int v = 0; v < H; ++v)
    for (int u = 0; u < W; ++u) {
      res.grad.mask_logits(v, u) = w.m * lm.grad(v, u);
      res.grad.eta_logits(v, u) = w.center * lc.grad(v, u);
      for (int i = 0; i < 3; ++i) {
        const double gx = w.var * lvar.grad(v, u, i) + w.vio * lvio.grad(v, u, i);
        const double gx2 =
            w.var * lvar.grad(v, u, i + 3) + w.vio * lvio.grad(v, u, i + 3);
        res.grad.X(v, u, i) += gx + gx2;
        res.grad.T(v, u, i) += gx2;
      }
    }
  return res;
}

DirectFitResult direct_fit(const PixelMaps& gt, const PredictionMaps& init,
                           int steps, double step_size, const LossWeights& w) {
  if (steps < 1) throw std::invalid_argument("direct_fit: steps >= 1");
  DirectFitResult res;
  res.pred = init;

  auto step_maps = [&](PredictionMaps& p, const PredictionMaps& g) {
    auto upd = [&](Imaged& dst, const Imaged& grad) {
      for (size_t i = 0; i < dst.data().size(); ++i)
        dst.data()[i] -= step_size * grad.data()[i];
    };
    upd(p.Q, g.Q);
    upd(p.T, g.T);
    upd(p.X, g.X);
    upd(p.S, g.S);
    upd(p.B, g.B);
    upd(p.mask_logits, g.mask_logits);
    upd(p.eta_logits, g.eta_logits);
  };

  for (int s = 0; s < steps; ++s) {
    const TotalLossResult r = total_loss(res.pred, gt, w);
    if (!std::isfinite(r.breakdown.total))
      throw std::runtime_error("direct_fit: non-finite loss at step " +
                               std::to_string(s));
    res.trace.push_back(r.breakdown);
    step_maps(res.pred, r.grad);
  }
  const TotalLossResult fin = total_loss(res.pred, gt, w);
  if (!std::isfinite(fin.breakdown.total))
    throw std::runtime_error("direct_fit: non-finite final loss");
  res.trace.push_back(fin.breakdown);
  return res;
}

}  // namespace rigidflow
