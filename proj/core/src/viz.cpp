#include "rigidflow/viz.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

namespace rigidflow {

namespace {

std::vector<uint8_t> ppm_header(int w, int h) {
  const std::string head =
      "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  return std::vector<uint8_t>(head.begin(), head.end());
}

uint8_t clamp255(double x) {
  return uint8_t(std::clamp(std::lround(x * 255.0), 0L, 255L));
}

}  // namespace

std::vector<uint8_t> viz_flow(const Imaged& S, double vmax) {
  if (vmax <= 0) throw std::invalid_argument("viz_flow: vmax must be > 0");
  std::vector<uint8_t> out = ppm_header(S.width(), S.height());
  for (int v = 0; v < S.height(); ++v)
    for (int u = 0; u < S.width(); ++u) {
      const Eigen::Vector3d s = S.vec3(v, u);
      out.push_back(clamp255(std::abs(s.z()) / vmax));  // red  <- Z
      out.push_back(clamp255(std::abs(s.x()) / vmax));  // green <- X
      out.push_back(clamp255(std::abs(s.y()) / vmax));  // blue <- Y
    }
  return out;
}

std::vector<uint8_t> viz_labels(const Imagei& labels) {
  std::vector<uint8_t> out = ppm_header(labels.width(), labels.height());
  for (int v = 0; v < labels.height(); ++v)
    for (int u = 0; u < labels.width(); ++u) {
      const int id = labels(v, u);
      if (id <= 0) {
        out.insert(out.end(), {30, 30, 30});
        continue;
      }
      // golden-ratio hue walk keyed on the label id
      const double hue = std::fmod(0.618033988749895 * id, 1.0) * 6.0;
      const int i = int(hue);
      const double f = hue - i;
      const double p = 0.15, q = 1.0 - 0.85 * f, t = 0.15 + 0.85 * f;
      double r = 1, g = 1, b = 1;
      switch (i % 6) {
        case 0: r = 1; g = t; b = p; break;
        case 1: r = q; g = 1; b = p; break;
        case 2: r = p; g = 1; b = t; break;
        case 3: r = p; g = q; b = 1; break;
        case 4: r = t; g = p; b = 1; break;
        default: r = 1; g = p; b = q; break;
      }
      out.push_back(clamp255(r));
      out.push_back(clamp255(g));
      out.push_back(clamp255(b));
    }
  return out;
}

void write_bytes(const std::filesystem::path& file,
                 const std::vector<uint8_t>& bytes) {
  const std::filesystem::path tmp = file.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string());
    os.write(reinterpret_cast<const char*>(bytes.data()),
             std::streamsize(bytes.size()));
  }
  std::filesystem::rename(tmp, file);
}

}  // namespace rigidflow
