#include <doctest.h>

#include <random>

#include "rigidflow/correlation.hpp"

using namespace rigidflow;

namespace {

Imaged random_map(int H, int W, int C, uint64_t seed, double lo = -1,
                  double hi = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Imaged img(H, W, C);
  for (double& x : img.data()) x = u(rng);
  return img;
}

// RGB image that is constant within each cell x cell block, with a random
// unit vector per block. Unit-norm features make the self inner product a
// strict argmax, so matching is unambiguous.
Imaged unit_cell_rgb(int H, int W, int cell, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Imaged img(H, W, 3, 0.0);
  for (int cu = 0; cu < H / cell; ++cu)
    for (int cv = 0; cv < W / cell; ++cv) {
      Eigen::Vector3d f(n(rng), n(rng), n(rng));
      f = f.cwiseAbs().normalized();
      for (int i = 0; i < cell; ++i)
        for (int j = 0; j < cell; ++j)
          for (int c = 0; c < 3; ++c) img(cu * cell + i, cv * cell + j, c) = f[c];
    }
  return img;
}

}  // namespace

TEST_CASE("correlate: identical constant maps") {
  const int C = 3;
  const double c = 0.7;
  Imaged f(6, 8, C, c);
  const CorrelationVolume vol = correlate(f, f, 2);
  REQUIRE(vol.data.channels() == 25);
  for (int u = 0; u < 6; ++u)
    for (int v = 0; v < 8; ++v)
      for (int du = -2; du <= 2; ++du)
        for (int dv = -2; dv <= 2; ++dv) {
          const bool in = u + du >= 0 && u + du < 6 && v + dv >= 0 && v + dv < 8;
          const double want = in ? C * c * c : 0.0;
          CHECK(vol.data(u, v, vol.channel(du, dv)) ==
                doctest::Approx(want).epsilon(1e-15));
        }
}

TEST_CASE("correlate: one-hot shifted maps give a unique max channel") {
  std::mt19937_64 rng(42);
  const int H = 12, W = 16, L = 4;
  std::uniform_int_distribution<int> du_d(-L, L), dv_d(-L, L);
  std::uniform_int_distribution<int> u_d(L, H - 1 - L), v_d(L, W - 1 - L);
  for (int trial = 0; trial < 50; ++trial) {
    const int u = u_d(rng), v = v_d(rng);
    const int du = du_d(rng), dv = dv_d(rng);
    Imaged f_t(H, W, 2, 0.0), f_tm1(H, W, 2, 0.0);
    f_t(u, v, 0) = 1.0;
    f_tm1(u + du, v + dv, 0) = 1.0;
    const CorrelationVolume vol = correlate(f_t, f_tm1, L);
    for (int c = 0; c < vol.data.channels(); ++c) {
      const double want = (c == vol.channel(du, dv)) ? 1.0 : 0.0;
      CHECK(vol.data(u, v, c) == want);
    }
  }
}

TEST_CASE("correlate: orthogonal feature vectors give zero everywhere") {
  Imaged f_t(5, 5, 2, 0.0), f_tm1(5, 5, 2, 0.0);
  for (int u = 0; u < 5; ++u)
    for (int v = 0; v < 5; ++v) {
      f_t(u, v, 0) = 1.0;    // (1, 0)
      f_tm1(u, v, 1) = 1.0;  // (0, 1)
    }
  const CorrelationVolume vol = correlate(f_t, f_tm1, 2);
  for (double x : vol.data.data()) CHECK(x == 0.0);
}

TEST_CASE("correlate: shape mismatch and negative L are errors") {
  Imaged a(4, 4, 3), b(4, 5, 3);
  CHECK_THROWS_AS(correlate(a, b, 1), std::invalid_argument);
  CHECK_THROWS_AS(correlate(a, a, -1), std::invalid_argument);
}

TEST_CASE("correlate is bilinear in its inputs") {
  const Imaged f = random_map(6, 7, 3, 1);
  const Imaged g = random_map(6, 7, 3, 2);
  const Imaged h = random_map(6, 7, 3, 3);
  const double a = 0.3, b = -1.7;
  Imaged mix(6, 7, 3);
  for (size_t i = 0; i < mix.data().size(); ++i)
    mix.data()[i] = a * f.data()[i] + b * g.data()[i];
  const CorrelationVolume vm = correlate(mix, h, 2);
  const CorrelationVolume vf = correlate(f, h, 2);
  const CorrelationVolume vg = correlate(g, h, 2);
  for (size_t i = 0; i < vm.data.data().size(); ++i)
    CHECK(vm.data.data()[i] ==
          doctest::Approx(a * vf.data.data()[i] + b * vg.data.data()[i])
              .epsilon(1e-12));
}

TEST_CASE("correlate: zero displacement of a map with itself is its norm") {
  const Imaged f = random_map(5, 6, 4, 9);
  const CorrelationVolume vol = correlate(f, f, 1);
  for (int u = 0; u < 5; ++u)
    for (int v = 0; v < 6; ++v) {
      double norm2 = 0;
      for (int c = 0; c < 4; ++c) norm2 += f(u, v, c) * f(u, v, c);
      CHECK(vol.data(u, v, vol.channel(0, 0)) ==
            doctest::Approx(norm2).epsilon(1e-14));
    }
}

TEST_CASE("correlate: joint shift moves the volume interior identically") {
  const int H = 10, W = 12, L = 2, sy = 1, sx = 2;
  const Imaged f = random_map(H, W, 3, 17);
  const Imaged g = random_map(H, W, 3, 18);
  Imaged fs(H, W, 3, 0.0), gs(H, W, 3, 0.0);
  for (int u = 0; u + sy < H; ++u)
    for (int v = 0; v + sx < W; ++v)
      for (int c = 0; c < 3; ++c) {
        fs(u + sy, v + sx, c) = f(u, v, c);
        gs(u + sy, v + sx, c) = g(u, v, c);
      }
  const CorrelationVolume va = correlate(f, g, L);
  const CorrelationVolume vb = correlate(fs, gs, L);
  // interior: stay L away from every border in both the original and the
  // shifted frame
  for (int u = L; u + sy + L < H; ++u)
    for (int v = L; v + sx + L < W; ++v)
      for (int c = 0; c < va.data.channels(); ++c)
        CHECK(vb.data(u + sy, v + sx, c) ==
              doctest::Approx(va.data(u, v, c)).epsilon(1e-14));
}

TEST_CASE("weighted_maxpool: single nonzero correlation selects that cell") {
  const int H = 7, W = 7, L = 2, C = 3;
  Imaged f_t(H, W, C, 0.0), f_tm1(H, W, C, 0.0);
  // build a volume with exactly one nonzero correlation at (3,3)->(4,2)
  f_t(3, 3, 0) = 2.0;
  f_tm1(4, 2, 0) = 1.5;
  const CorrelationVolume vol = correlate(f_t, f_tm1, L);
  const double c_l = 2.0 * 1.5;

  Imaged pf = random_map(H, W, C, 23, 0.1, 1.0);  // positive features
  const Imaged out = weighted_maxpool(vol, pf);
  for (int c = 0; c < C; ++c)
    CHECK(out(3, 3, c) == doctest::Approx(c_l * pf(4, 2, c)).epsilon(1e-14));
}

TEST_CASE("weighted_maxpool: all-ones correlations give the patch max") {
  const int H = 6, W = 6, L = 1, C = 2;
  CorrelationVolume vol;
  vol.L = L;
  vol.data = Imaged(H, W, 9, 1.0);
  const Imaged pf = random_map(H, W, C, 31);
  const Imaged out = weighted_maxpool(vol, pf);
  for (int u = 0; u < H; ++u)
    for (int v = 0; v < W; ++v)
      for (int c = 0; c < C; ++c) {
        double best = -std::numeric_limits<double>::infinity();
        for (int du = -L; du <= L; ++du)
          for (int dv = -L; dv <= L; ++dv) {
            const int k = u + du, l = v + dv;
            if (k < 0 || k >= H || l < 0 || l >= W) continue;
            best = std::max(best, pf(k, l, c));
          }
        CHECK(out(u, v, c) == best);
      }
}

TEST_CASE("weighted_maxpool: zero correlations give zero output") {
  CorrelationVolume vol;
  vol.L = 1;
  vol.data = Imaged(5, 5, 9, 0.0);
  const Imaged pf = random_map(5, 5, 3, 7);
  const Imaged out = weighted_maxpool(vol, pf);
  for (double x : out.data()) CHECK(x == 0.0);
}

TEST_CASE("weighted_maxpool is monotone for nonnegative correlations") {
  const int H = 5, W = 5, L = 1, C = 2;
  CorrelationVolume vol;
  vol.L = L;
  vol.data = random_map(H, W, 9, 51, 0.0, 1.0);
  const Imaged pf = random_map(H, W, C, 52, 0.0, 1.0);
  const Imaged base = weighted_maxpool(vol, pf);

  std::mt19937_64 rng(53);
  std::uniform_int_distribution<int> idx(0, int(vol.data.data().size()) - 1);
  for (int trial = 0; trial < 20; ++trial) {
    CorrelationVolume bumped = vol;
    bumped.data.data()[idx(rng)] += 0.5;
    const Imaged out = weighted_maxpool(bumped, pf);
    for (size_t i = 0; i < out.data().size(); ++i)
      CHECK(out.data()[i] >= base.data()[i]);
  }
}

TEST_CASE("weighted_maxpool: spatial mismatch is an error") {
  CorrelationVolume vol;
  vol.L = 1;
  vol.data = Imaged(5, 5, 9, 0.0);
  Imaged pf(5, 6, 3);
  CHECK_THROWS_AS(weighted_maxpool(vol, pf), std::invalid_argument);
}

TEST_CASE("corr_flow_baseline: static textured scene has zero flow") {
  const Imaged rgb = unit_cell_rgb(16, 16, 2, 61);
  const Imaged xyz = random_map(16, 16, 3, 62, 0.5, 1.5);
  const CorrFlowResult res = corr_flow_baseline(rgb, xyz, rgb, xyz, 2, 2);
  for (int x : res.displacement.data()) CHECK(x == 0);
  for (double x : res.flow.data()) CHECK(x == 0.0);
}

TEST_CASE("corr_flow_baseline: one-cell shift is recovered") {
  // cell = 2; frame t-1 is frame t shifted down by one cell (2 pixels).
  const int H = 16, W = 16, cell = 2;
  const Imaged rgb_t = unit_cell_rgb(H, W, cell, 71);
  Imaged rgb_tm1(H, W, 3, 0.0);
  for (int u = 0; u + cell < H; ++u)
    for (int v = 0; v < W; ++v)
      for (int c = 0; c < 3; ++c) rgb_tm1(u + cell, v, c) = rgb_t(u, v, c);
  const Imaged xyz_t = random_map(H, W, 3, 72, 0.5, 1.5);
  const Imaged xyz_tm1 = random_map(H, W, 3, 73, 0.5, 1.5);

  const CorrFlowResult res =
      corr_flow_baseline(rgb_t, xyz_t, rgb_tm1, xyz_tm1, 2, cell);
  const Imaged p_t = downsample_mean(xyz_t, cell);
  const Imaged p_tm1 = downsample_mean(xyz_tm1, cell);
  // interior coarse cells away from the zero-padded border
  for (int u = 2; u < H / cell - 2; ++u)
    for (int v = 2; v < W / cell - 2; ++v) {
      CHECK(res.displacement(u, v, 0) == 1);
      CHECK(res.displacement(u, v, 1) == 0);
      CHECK((res.flow.vec3(u, v) - (p_tm1.vec3(u + 1, v) - p_t.vec3(u, v)))
                .norm() < 1e-12);
    }
}

TEST_CASE("corr_flow_baseline: textureless scene resolves ties to zero") {
  Imaged rgb(12, 12, 3, 0.4);
  const Imaged xyz = random_map(12, 12, 3, 81, 0.5, 1.5);
  const CorrFlowResult res = corr_flow_baseline(rgb, xyz, rgb, xyz, 3, 2);
  for (int x : res.displacement.data()) CHECK(x == 0);
}
