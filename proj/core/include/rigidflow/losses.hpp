#pragma once

#include <vector>

#include "rigidflow/image.hpp"
#include "rigidflow/scene.hpp"

namespace rigidflow {

struct LossWeights {
  double m = 1.0;
  double center = 1.0;
  double var = 0.1;
  double vio = 0.1;
  double Q = 0.1;
  double T = 100.0;
  double X = 10.0;
  double S = 10.0;
  double B = 1.0;
  double xi = 1.0;
};

// Free prediction parameters, same channel layout as the ground-truth
// stack. Classification channels are parameterized as logits.
struct PredictionMaps {
  Imaged Q, T, X, S, B;
  Imaged mask_logits, eta_logits;

  static PredictionMaps zeros_like(const PixelMaps& gt);
  // Oracle predictions: regression channels copied, logits saturated.
  static PredictionMaps oracle(const PixelMaps& gt, double logit_scale = 12.0);
};

struct LossBreakdown {
  double mask = 0;       // unweighted term values
  double center = 0;
  double pixelwise = 0;  // already includes the per-attribute weights
  double variance = 0;
  double violation = 0;
  double p_Q = 0, p_T = 0, p_X = 0, p_S = 0, p_B = 0, p_xi = 0;
  double total = 0;
};

struct ScalarWithGrad {
  double value = 0;
  Imaged grad;
};

// Mean binary cross-entropy over all pixels, stable log-sum-exp form.
ScalarWithGrad mask_loss(const Imaged& logits, const Imaged& gt_mask);

// Mean binary cross-entropy over foreground pixels only; gradient is
// zero on background. Empty foreground gives loss 0.
ScalarWithGrad center_loss(const Imaged& logits, const Imaged& gt_eta,
                           const Imaged& fg_mask);

struct PixelwiseResult {
  double value = 0;  // sum of weighted per-attribute means
  double per_attr[6] = {0, 0, 0, 0, 0, 0};  // Q, T, X, S, B, xi (weighted)
  Imaged grad_Q, grad_T, grad_X, grad_S, grad_B;
};

// Weighted per-attribute mean L2-norm over foreground; the trajectory
// attribute is formed from X and T, so its gradient flows into both.
PixelwiseResult pixelwise_loss(const PredictionMaps& pred, const PixelMaps& gt,
                               const LossWeights& w);

// Eq-style within-object variance of predicted trajectory features;
// gradient w.r.t. the 6-channel trajectory map.
ScalarWithGrad variance_loss(const Imaged& xi_hat, const Imagei& gt_labels);

// Sum over foreground of the trajectory residual norm where it exceeds
// one fifth of the ground-truth sphere radius.
ScalarWithGrad violation_loss(const Imaged& xi_hat, const Imaged& gt_xi,
                              const Imaged& gt_B, const Imaged& fg_mask);

struct TotalLossResult {
  LossBreakdown breakdown;
  PredictionMaps grad;
};

TotalLossResult total_loss(const PredictionMaps& pred, const PixelMaps& gt,
                           const LossWeights& w);

struct DirectFitResult {
  PredictionMaps pred;
  std::vector<LossBreakdown> trace;  // steps + 1 entries, final included
};

// Fixed-step gradient descent on total_loss with the prediction maps as
// free parameters. Throws on non-finite loss.
DirectFitResult direct_fit(const PixelMaps& gt, const PredictionMaps& init,
                           int steps, double step_size,
                           const LossWeights& w = LossWeights{});

}  // namespace rigidflow
