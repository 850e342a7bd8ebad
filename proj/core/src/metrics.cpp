#include "rigidflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace rigidflow {

namespace {

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  if (xs.empty()) return out;
  for (double x : xs) out.mean += x;
  out.mean /= xs.size();
  double var = 0;
  for (double x : xs) var += (x - out.mean) * (x - out.mean);
  out.std = std::sqrt(var / xs.size());
  return out;
}

// 4D angular error: both flows get a unit fourth component. The angle
// arccos((a.b + 1) / (|(a,1)| |(b,1)|)) is evaluated as
// 2 atan2(|A - B|, |A + B|) on the normalized 4-vectors, which stays
// accurate near 0 where acos loses half the significant digits.
double aae_deg(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  Eigen::Vector4d A(a.x(), a.y(), a.z(), 1.0);
  Eigen::Vector4d B(b.x(), b.y(), b.z(), 1.0);
  A.normalize();
  B.normalize();
  const double angle = 2.0 * std::atan2((A - B).norm(), (A + B).norm());
  return angle * 180.0 / std::numbers::pi;
}

}  // namespace

FlowMetrics flow_metrics(const Imaged& pred_S, const Imaged& gt_S,
                         const Imaged& both_frames) {
  require_same_shape(pred_S, gt_S, "flow_metrics");
  std::vector<double> epe_all, epe_masked, aae_all, aae_masked;
  for (int v = 0; v < pred_S.height(); ++v)
    for (int u = 0; u < pred_S.width(); ++u) {
      const Eigen::Vector3d p = pred_S.vec3(v, u);
      const Eigen::Vector3d g = gt_S.vec3(v, u);
      const double epe = (p - g).norm() * 100.0;  // cm
      const double aae = aae_deg(p, g);
      epe_all.push_back(epe);
      aae_all.push_back(aae);
      if (both_frames(v, u) > 0.5) {
        epe_masked.push_back(epe);
        aae_masked.push_back(aae);
      }
    }
  FlowMetrics m;
  m.epe_all = mean_std(epe_all);
  m.epe_masked = mean_std(epe_masked);
  m.aae_all = mean_std(aae_all);
  m.aae_masked = mean_std(aae_masked);
  return m;
}

SegMetrics seg_metrics(const Imagei& pred_labels, const Imagei& gt_labels,
                       double extract_threshold) {
  if (pred_labels.height() != gt_labels.height() ||
      pred_labels.width() != gt_labels.width())
    throw std::invalid_argument("seg_metrics: labelings differ in shape");

  std::map<int, int> gt_sizes, pred_sizes;
  std::map<std::pair<int, int>, int> overlap;
  for (int v = 0; v < gt_labels.height(); ++v)
    for (int u = 0; u < gt_labels.width(); ++u) {
      const int g = gt_labels(v, u), p = pred_labels(v, u);
      if (g > 0) ++gt_sizes[g];
      if (p > 0) ++pred_sizes[p];
      if (g > 0 && p > 0) ++overlap[{g, p}];
    }

  SegMetrics out;
  out.gt_objects = int(gt_sizes.size());
  if (out.gt_objects == 0) return out;

  struct Pair {
    double f, p, r;
    int gt, pred;
  };
  std::vector<Pair> pairs;
  for (const auto& [key, inter] : overlap) {
    const double p = double(inter) / pred_sizes[key.second];
    const double r = double(inter) / gt_sizes[key.first];
    pairs.push_back({2 * p * r / (p + r), p, r, key.first, key.second});
  }
  // Greedy highest-F-first injective assignment; deterministic ties.
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.f != b.f) return a.f > b.f;
    if (a.gt != b.gt) return a.gt < b.gt;
    return a.pred < b.pred;
  });

  std::map<int, Pair> matched;  // by gt id
  std::map<int, bool> pred_used;
  for (const Pair& pr : pairs) {
    if (matched.count(pr.gt) || pred_used[pr.pred]) continue;
    matched[pr.gt] = pr;
    pred_used[pr.pred] = true;
  }

  for (const auto& [gt_id, size] : gt_sizes) {
    (void)size;
    auto it = matched.find(gt_id);
    if (it == matched.end()) continue;
    out.precision += it->second.p;
    out.recall += it->second.r;
    out.fmeasure += it->second.f;
    if (it->second.f >= extract_threshold) ++out.extracted;
  }
  out.precision /= out.gt_objects;
  out.recall /= out.gt_objects;
  out.fmeasure /= out.gt_objects;
  return out;
}

MetricReport metric_report(const std::vector<SceneEval>& scenes) {
  MetricReport rep;
  rep.scenes = int(scenes.size());
  std::vector<double> ea, em, aa, am, pr, rc, fm;
  for (const SceneEval& s : scenes) {
    ea.push_back(s.flow.epe_all.mean);
    em.push_back(s.flow.epe_masked.mean);
    aa.push_back(s.flow.aae_all.mean);
    am.push_back(s.flow.aae_masked.mean);
    pr.push_back(s.seg.precision);
    rc.push_back(s.seg.recall);
    fm.push_back(s.seg.fmeasure);
    rep.extracted_sum += s.seg.extracted;
    rep.gt_objects_sum += s.seg.gt_objects;
  }
  rep.epe_all = mean_std(ea);
  rep.epe_masked = mean_std(em);
  rep.aae_all = mean_std(aa);
  rep.aae_masked = mean_std(am);
  rep.precision = mean_std(pr);
  rep.recall = mean_std(rc);
  rep.fmeasure = mean_std(fm);
  return rep;
}

std::string MetricReport::to_csv() const {
  std::ostringstream os;
  os.precision(9);
  os << "metric,mean,std\n";
  os << "epe_all_cm," << epe_all.mean << "," << epe_all.std << "\n";
  os << "epe_masked_cm," << epe_masked.mean << "," << epe_masked.std << "\n";
  os << "aae_all_deg," << aae_all.mean << "," << aae_all.std << "\n";
  os << "aae_masked_deg," << aae_masked.mean << "," << aae_masked.std << "\n";
  os << "precision," << precision.mean << "," << precision.std << "\n";
  os << "recall," << recall.mean << "," << recall.std << "\n";
  os << "fmeasure," << fmeasure.mean << "," << fmeasure.std << "\n";
  os << "extracted," << extracted_sum << "/" << gt_objects_sum << ",\n";
  os << "scenes," << scenes << ",\n";
  return os.str();
}

std::string MetricReport::to_table() const {
  std::ostringstream os;
  os.precision(4);
  os << "scenes: " << scenes << "\n";
  os << "EPE all    : " << epe_all.mean << " +/- " << epe_all.std << " cm\n";
  os << "EPE masked : " << epe_masked.mean << " +/- " << epe_masked.std
     << " cm\n";
  os << "AAE all    : " << aae_all.mean << " +/- " << aae_all.std << " deg\n";
  os << "AAE masked : " << aae_masked.mean << " +/- " << aae_masked.std
     << " deg\n";
  os << "precision  : " << precision.mean << " +/- " << precision.std << "\n";
  os << "recall     : " << recall.mean << " +/- " << recall.std << "\n";
  os << "F-measure  : " << fmeasure.mean << " +/- " << fmeasure.std << "\n";
  os << "extracted  : " << extracted_sum << "/" << gt_objects_sum << "\n";
  return os.str();
}

}  // namespace rigidflow
