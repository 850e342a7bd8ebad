#pragma once

#include <string>
#include <vector>

#include "rigidflow/image.hpp"

namespace rigidflow {

struct MeanStd {
  double mean = 0, std = 0;  // population std
};

struct FlowMetrics {
  MeanStd epe_all, epe_masked;  // cm
  MeanStd aae_all, aae_masked;  // degrees, 4D convention
};

struct SegMetrics {
  double precision = 0, recall = 0, fmeasure = 0;
  int extracted = 0;   // matched gt objects with pair F >= 0.75
  int gt_objects = 0;
};

// Endpoint and 4D angular error; "all" averages over every pixel,
// "masked" over the pixels flagged in both_frames. Flows are in meters,
// EPE is reported in cm.
FlowMetrics flow_metrics(const Imaged& pred_S, const Imaged& gt_S,
                         const Imaged& both_frames);

// Injective greedy max-F matching between gt objects and predicted
// clusters (label 0 is background on both sides). Reported values are
// means over gt objects; unmatched objects contribute 0.
SegMetrics seg_metrics(const Imagei& pred_labels, const Imagei& gt_labels,
                       double extract_threshold = 0.75);

struct SceneEval {
  FlowMetrics flow;
  SegMetrics seg;
};

struct MetricReport {
  MeanStd epe_all, epe_masked, aae_all, aae_masked;
  MeanStd precision, recall, fmeasure;
  int extracted_sum = 0, gt_objects_sum = 0;
  int scenes = 0;

  std::string to_csv() const;
  std::string to_table() const;
};

// Mean +/- population std across scenes; extracted reported as sum/total.
MetricReport metric_report(const std::vector<SceneEval>& scenes);

}  // namespace rigidflow
