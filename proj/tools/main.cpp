// Command-line front end: gen -> gt -> predict/fit -> segment -> eval -> viz.

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rigidflow/archive.hpp"
#include "rigidflow/losses.hpp"
#include "rigidflow/metrics.hpp"
#include "rigidflow/scene.hpp"
#include "rigidflow/segmentation.hpp"
#include "rigidflow/viz.hpp"

namespace fs = std::filesystem;
using namespace rigidflow;

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void parse_range(const std::string& text, int& lo, int& hi) {
  const auto pos = text.find("..");
  if (pos == std::string::npos) {
    lo = hi = std::stoi(text);
  } else {
    lo = std::stoi(text.substr(0, pos));
    hi = std::stoi(text.substr(pos + 2));
  }
}

void parse_resolution(const std::string& text, int& h, int& w) {
  const auto pos = text.find('x');
  if (pos == std::string::npos)
    throw CLI::ValidationError("--resolution", "expected HxW");
  h = std::stoi(text.substr(0, pos));
  w = std::stoi(text.substr(pos + 1));
}

void write_text_atomic(const fs::path& file, const std::string& text) {
  const fs::path tmp = file.string() + ".tmp";
  std::ofstream os(tmp, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + tmp.string());
  os << text;
  os.close();
  fs::rename(tmp, file);
}

std::string trace_csv(const std::vector<LossBreakdown>& trace) {
  std::ostringstream os;
  os.precision(12);
  os << "step,mask,center,p_Q,p_T,p_X,p_S,p_B,p_xi,variance,violation,total\n";
  for (size_t i = 0; i < trace.size(); ++i) {
    const LossBreakdown& b = trace[i];
    os << i << "," << b.mask << "," << b.center << "," << b.p_Q << ","
       << b.p_T << "," << b.p_X << "," << b.p_S << "," << b.p_B << ","
       << b.p_xi << "," << b.variance << "," << b.violation << "," << b.total
       << "\n";
  }
  return os.str();
}

void add_noise(Imaged& img, std::mt19937_64& rng, double sigma) {
  std::normal_distribution<double> n(0.0, sigma);
  for (double& x : img.data()) x += n(rng);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rigidflow: object scene flow and motion segmentation"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic scene pair");
  uint64_t seed = 0;
  std::string objects = "2..6", resolution = "60x80", out_dir, scene_file;
  double noise_sigma = 0.0;
  gen->add_option("--seed", seed, "RNG seed");
  gen->add_option("--objects", objects, "object count, N or A..B");
  gen->add_option("--resolution", resolution, "HxW");
  gen->add_option("--out", out_dir, "output directory")->required();

  // gt
  auto* gt_cmd = app.add_subcommand("gt", "compute ground-truth maps");
  GeneratorConfig gt_cfg;
  gt_cmd->add_option("--scene", scene_file, "scene JSON file")->required();
  gt_cmd->add_option("--out", out_dir, "output directory")->required();
  gt_cmd->add_option("--centroid-d", gt_cfg.centroid_top_d,
                     "pixels labeled 1 per object");
  gt_cmd->add_option("--default-radius", gt_cfg.default_radius,
                     "B for single-object scenes");
  gt_cmd->add_option("--depth-noise", gt_cfg.depth_noise_sigma,
                     "Gaussian depth noise sigma (augmentation)");

  // predict
  auto* predict = app.add_subcommand("predict", "oracle or noisy predictions");
  std::string gt_dir, source = "oracle";
  predict->add_option("--gt", gt_dir, "ground-truth archive")->required();
  predict->add_option("--source", source, "oracle|noisy");
  predict->add_option("--noise-sigma", noise_sigma, "Gaussian sigma (noisy)");
  predict->add_option("--seed", seed, "noise seed");
  predict->add_option("--out", out_dir, "output directory")->required();

  // fit
  auto* fit = app.add_subcommand("fit", "gradient descent on the loss");
  int steps = 500;
  double step_size = 0.02, fit_noise = 0.02;
  fit->add_option("--gt", gt_dir, "ground-truth archive")->required();
  fit->add_option("--steps", steps, "descent steps");
  fit->add_option("--step-size", step_size, "descent step size");
  fit->add_option("--noise-sigma", fit_noise, "init noise on X,T (meters)");
  fit->add_option("--seed", seed, "noise seed");
  fit->add_option("--out", out_dir, "output directory")->required();

  // segment
  auto* segment = app.add_subcommand("segment", "greedy trajectory clustering");
  std::string pred_dir;
  bool refine = false;
  segment->add_option("--pred", pred_dir, "prediction archive")->required();
  segment->add_option("--out", out_dir, "output directory")->required();
  segment->add_flag("--refine", refine, "rigidity refinement + flow recompute");

  // eval
  auto* eval = app.add_subcommand("eval", "flow and segmentation metrics");
  bool with_seg = false;
  std::string report_file;
  eval->add_option("--pred", pred_dir, "prediction/segmentation archive")
      ->required();
  eval->add_option("--gt", gt_dir, "ground-truth archive")->required();
  eval->add_flag("--seg", with_seg, "also evaluate segmentation labels");
  eval->add_option("--out", report_file, "write the CSV report here too");

  // viz
  auto* viz = app.add_subcommand("viz", "PPM renderings of maps");
  std::string maps_dir;
  double vmax = 0.15;
  viz->add_option("--maps", maps_dir, "map archive")->required();
  viz->add_option("--vmax", vmax, "flow normalization, m/frame");
  viz->add_option("--out", out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      GeneratorConfig cfg;
      parse_range(objects, cfg.min_objects, cfg.max_objects);
      parse_resolution(resolution, cfg.height, cfg.width);
      const ScenePair scene = generate_scene_pair(cfg, seed);
      fs::create_directories(out_dir);
      save_scene(fs::path(out_dir) / "scene.json", scene);
    } else if (gt_cmd->parsed()) {
      const ScenePair scene = load_scene(scene_file);
      const PixelMaps maps = compute_gt_maps(scene, gt_cfg);
      save_maps(out_dir, to_mapset(maps));
    } else if (predict->parsed()) {
      const MapSet gt_set = load_maps(gt_dir);
      const PixelMaps gt = pixelmaps_from(gt_set);
      PredictionMaps pred = PredictionMaps::oracle(gt);
      if (source == "noisy" && noise_sigma > 0) {
        std::mt19937_64 rng(seed);
        add_noise(pred.Q, rng, noise_sigma);
        add_noise(pred.T, rng, noise_sigma);
        add_noise(pred.X, rng, noise_sigma);
        add_noise(pred.S, rng, noise_sigma);
        add_noise(pred.B, rng, noise_sigma);
      } else if (source != "oracle" && source != "noisy") {
        throw std::runtime_error("unknown --source: " + source);
      }
      MapSet out = to_mapset(pred);
      out.f32["P"] = gt_set.f32.at("P");  // input geometry rides along
      save_maps(out_dir, out);
    } else if (fit->parsed()) {
      const MapSet gt_set = load_maps(gt_dir);
      const PixelMaps gt = pixelmaps_from(gt_set);
      PredictionMaps init = PredictionMaps::oracle(gt);
      init.mask_logits = Imaged(gt.height(), gt.width(), 1, 0.0);
      init.eta_logits = Imaged(gt.height(), gt.width(), 1, 0.0);
      std::mt19937_64 rng(seed);
      add_noise(init.X, rng, fit_noise);
      add_noise(init.T, rng, fit_noise);
      const DirectFitResult res = direct_fit(gt, init, steps, step_size);
      MapSet out = to_mapset(res.pred);
      out.f32["P"] = gt_set.f32.at("P");
      save_maps(out_dir, out);
      write_text_atomic(fs::path(out_dir) / "loss.csv", trace_csv(res.trace));
    } else if (segment->parsed()) {
      const MapSet pred_set = load_maps(pred_dir);
      const PredictionMaps pred = predictions_from(pred_set);
      const int H = pred.X.height(), W = pred.X.width();
      Imaged mask(H, W, 1), eta(H, W, 1);
      for (int v = 0; v < H; ++v)
        for (int u = 0; u < W; ++u) {
          mask(v, u) = sigmoid(pred.mask_logits(v, u)) > 0.5 ? 1.0 : 0.0;
          eta(v, u) = sigmoid(pred.eta_logits(v, u));
        }
      const Imaged xi = trajectory_map(pred.X, pred.T);
      SegmentationResult seg = greedy_cluster(xi, pred.B, eta, mask);
      MapSet out;
      out.i32["labels"] = seg.labels;
      if (refine) {
        if (!pred_set.f32.count("P"))
          throw std::runtime_error("--refine needs a 'P' map in the archive");
        const Imaged P = widen(pred_set.f32.at("P"));
        seg.motions = refine_rigid(seg.labels, pred.Q, pred.T, pred.X);
        out.f32["S"] = narrow(recompute_flow(seg.labels, seg.motions, P));
        nlohmann::json motions = nlohmann::json::array();
        for (size_t k = 0; k < seg.motions.size(); ++k) {
          const RigidMotion& m = seg.motions[k];
          motions.push_back({{"label", k + 1},
                             {"pixels", seg.counts[k]},
                             {"Q", {m.Q.v.x(), m.Q.v.y(), m.Q.v.z()}},
                             {"T", {m.T.x(), m.T.y(), m.T.z()}},
                             {"X", {m.X.x(), m.X.y(), m.X.z()}}});
        }
        save_maps(out_dir, out);
        write_text_atomic(fs::path(out_dir) / "motions.json", motions.dump(2));
      } else {
        out.f32["S"] = narrow(pred.S);
        save_maps(out_dir, out);
      }
    } else if (eval->parsed()) {
      const MapSet pred_set = load_maps(pred_dir);
      const MapSet gt_set = load_maps(gt_dir);
      const PixelMaps gt = pixelmaps_from(gt_set);
      if (!pred_set.f32.count("S"))
        throw std::runtime_error("prediction archive has no 'S' map");
      const Imaged pred_S = widen(pred_set.f32.at("S"));
      if (!pred_S.same_shape(gt.S))
        throw std::runtime_error(
            "shape mismatch between predicted and ground-truth flow");
      SceneEval ev;
      ev.flow = flow_metrics(pred_S, gt.S, gt.both_frames);
      if (with_seg) {
        if (!pred_set.i32.count("labels"))
          throw std::runtime_error("--seg needs a 'labels' map (run segment)");
        ev.seg = seg_metrics(pred_set.i32.at("labels"), gt.obj_id);
      }
      const MetricReport rep = metric_report({ev});
      std::cout << rep.to_csv();
      std::cerr << rep.to_table();
      if (!report_file.empty()) write_text_atomic(report_file, rep.to_csv());
    } else if (viz->parsed()) {
      const MapSet set = load_maps(maps_dir);
      fs::create_directories(out_dir);
      if (set.f32.count("S"))
        write_bytes(fs::path(out_dir) / "flow.ppm",
                    viz_flow(widen(set.f32.at("S")), vmax));
      if (set.i32.count("labels"))
        write_bytes(fs::path(out_dir) / "labels.ppm",
                    viz_labels(set.i32.at("labels")));
      if (set.i32.count("obj_id"))
        write_bytes(fs::path(out_dir) / "objects.ppm",
                    viz_labels(set.i32.at("obj_id")));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
