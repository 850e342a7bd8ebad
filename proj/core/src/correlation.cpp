#include "rigidflow/correlation.hpp"

#include <cmath>
#include <stdexcept>

#include "rigidflow/parallel.hpp"

namespace rigidflow {

CorrelationVolume correlate(const Imaged& f_t, const Imaged& f_tm1, int L) {
  if (!f_t.same_shape(f_tm1))
    throw std::invalid_argument("correlate: feature maps differ in shape");
  if (L < 0) throw std::invalid_argument("correlate: L must be >= 0");

  const int H = f_t.height(), W = f_t.width(), C = f_t.channels();
  const int side = 2 * L + 1;
  CorrelationVolume vol;
  vol.L = L;
  vol.data = Imaged(H, W, side * side, 0.0);

  parallel_for(H, [&](int u) {
    for (int v = 0; v < W; ++v) {
      const double* a = f_t.pixel(u, v);
      for (int du = -L; du <= L; ++du) {
        const int k = u + du;
        if (k < 0 || k >= H) continue;
        for (int dv = -L; dv <= L; ++dv) {
          const int l = v + dv;
          if (l < 0 || l >= W) continue;
          const double* b = f_tm1.pixel(k, l);
          double dot = 0;
          for (int c = 0; c < C; ++c) dot += a[c] * b[c];
          vol.data(u, v, vol.channel(du, dv)) = dot;
        }
      }
    }
  });
  return vol;
}

Imaged weighted_maxpool(const CorrelationVolume& corr, const Imaged& pf_tm1) {
  if (!corr.data.same_plane(pf_tm1))
    throw std::invalid_argument("weighted_maxpool: spatial dims differ");
  const int H = pf_tm1.height(), W = pf_tm1.width(), C = pf_tm1.channels();
  const int L = corr.L;

  Imaged out(H, W, C);
  parallel_for(H, [&](int u) {
    for (int v = 0; v < W; ++v) {
      for (int c = 0; c < C; ++c) {
        double best = -std::numeric_limits<double>::infinity();
        for (int du = -L; du <= L; ++du) {
          const int k = u + du;
          if (k < 0 || k >= H) continue;
          for (int dv = -L; dv <= L; ++dv) {
            const int l = v + dv;
            if (l < 0 || l >= W) continue;
            best = std::max(best, corr.data(u, v, corr.channel(du, dv)) *
                                      pf_tm1(k, l, c));
          }
        }
        out(u, v, c) = best;
      }
    }
  });
  return out;
}

Imaged downsample_mean(const Imaged& img, int cell) {
  if (cell < 1) throw std::invalid_argument("downsample_mean: cell >= 1");
  const int H = img.height() / cell, W = img.width() / cell;
  if (H < 1 || W < 1)
    throw std::invalid_argument("downsample_mean: cell larger than image");
  Imaged out(H, W, img.channels(), 0.0);
  for (int u = 0; u < H; ++u)
    for (int v = 0; v < W; ++v)
      for (int c = 0; c < img.channels(); ++c) {
        double sum = 0;
        for (int i = 0; i < cell; ++i)
          for (int j = 0; j < cell; ++j) sum += img(u * cell + i, v * cell + j, c);
        out(u, v, c) = sum / (cell * cell);
      }
  return out;
}

CorrFlowResult corr_flow_baseline(const Imaged& rgb_t, const Imaged& xyz_t,
                                  const Imaged& rgb_tm1, const Imaged& xyz_tm1,
                                  int L, int cell) {
  const Imaged f_t = downsample_mean(rgb_t, cell);
  const Imaged f_tm1 = downsample_mean(rgb_tm1, cell);
  const Imaged p_t = downsample_mean(xyz_t, cell);
  const Imaged p_tm1 = downsample_mean(xyz_tm1, cell);
  const CorrelationVolume vol = correlate(f_t, f_tm1, L);

  const int H = f_t.height(), W = f_t.width();
  CorrFlowResult res;
  res.flow = Imaged(H, W, 3, 0.0);
  res.displacement = Imagei(H, W, 2, 0);

  for (int u = 0; u < H; ++u)
    for (int v = 0; v < W; ++v) {
      double best = -std::numeric_limits<double>::infinity();
      int best_du = 0, best_dv = 0;
      long best_mag = 0;
      for (int du = -L; du <= L; ++du) {
        const int k = u + du;
        if (k < 0 || k >= H) continue;
        for (int dv = -L; dv <= L; ++dv) {
          const int l = v + dv;
          if (l < 0 || l >= W) continue;
          const double c = vol.data(u, v, vol.channel(du, dv));
          const long mag = long(du) * du + long(dv) * dv;
          // ties: smaller displacement first, then row-major channel order
          const bool better =
              c > best || (c == best && mag < best_mag);
          if (better) {
            best = c;
            best_du = du;
            best_dv = dv;
            best_mag = mag;
          }
        }
      }
      res.displacement(u, v, 0) = best_du;
      res.displacement(u, v, 1) = best_dv;
      res.flow.set_vec3(u, v,
                        p_tm1.vec3(u + best_du, v + best_dv) - p_t.vec3(u, v));
    }
  return res;
}

}  // namespace rigidflow
