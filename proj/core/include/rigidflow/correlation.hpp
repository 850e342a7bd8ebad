#pragma once

#include "rigidflow/image.hpp"

namespace rigidflow {

// Patch inner products between two feature maps. Channel
// (du + L) * (2L + 1) + (dv + L) holds the correlation at row/col
// displacement (du, dv); out-of-bounds displacements are 0.
struct CorrelationVolume {
  Imaged data;  // (H, W, (2L+1)^2)
  int L = 0;

  int channel(int du, int dv) const { return (du + L) * (2 * L + 1) + (dv + L); }
};

// c[(u,v),(k,l)] = <f_t[u,v], f_tm1[k,l]> over the (2L+1)^2 patch,
// computed densely at stride 1.
CorrelationVolume correlate(const Imaged& f_t, const Imaged& f_tm1, int L);

// Per-channel max over patch cells of corr * f_tm1 (Eq-style weighting of
// the previous-frame features by RGB correlation).
Imaged weighted_maxpool(const CorrelationVolume& corr, const Imaged& pf_tm1);

struct CorrFlowResult {
  Imaged flow;          // (H/cell, W/cell, 3) coarse scene flow
  Imagei displacement;  // (H/cell, W/cell, 2) matched (du, dv) per cell
};

// Argmax-matching baseline: features are mean RGB per cell x cell block,
// flow is XYZ(matched t-1 cell) - XYZ(t cell). Ties break by smallest
// displacement magnitude, then row-major channel order.
CorrFlowResult corr_flow_baseline(const Imaged& rgb_t, const Imaged& xyz_t,
                                  const Imaged& rgb_tm1, const Imaged& xyz_tm1,
                                  int L, int cell);

// Mean over cell x cell blocks; used as the baseline's feature encoder.
Imaged downsample_mean(const Imaged& img, int cell);

}  // namespace rigidflow
