#pragma once

#include <vector>

#include "rigidflow/geometry.hpp"
#include "rigidflow/image.hpp"

namespace rigidflow {

// Per-pixel trajectory feature [X, X + T] as a 6-channel map.
Imaged trajectory_map(const Imaged& X, const Imaged& T);

struct SegmentationResult {
  Imagei labels;  // 0 = background, 1..K
  std::vector<RigidMotion> motions;  // per label, filled by refine step
  std::vector<int> counts;           // per label pixel counts
  int num_segments() const { return int(counts.size()); }
};

// Greedy enclosing-sphere clustering: repeatedly seed at the unassigned
// foreground pixel with maximum eta (row-major ties) and absorb every
// unassigned pixel whose trajectory feature lies within the seed's
// sphere radius. Deterministic; covers the foreground exactly.
SegmentationResult greedy_cluster(const Imaged& xi, const Imaged& B,
                                  const Imaged& eta, const Imaged& mask);

// Per-label motion averages: arithmetic means for T and X, sign-aligned
// normalized quaternion mean for the rotations.
std::vector<RigidMotion> refine_rigid(const Imagei& labels, const Imaged& Q,
                                      const Imaged& T, const Imaged& X);

// Scene flow from each pixel's refined label motion; background flow 0.
Imaged recompute_flow(const Imagei& labels,
                      const std::vector<RigidMotion>& motions,
                      const Imaged& P);

// Converts a probability/logit-free mask map to binary via > 0.5.
Imaged threshold_mask(const Imaged& mask_prob);

}  // namespace rigidflow
