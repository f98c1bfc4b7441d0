#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "unistitch/error.hpp"
#include "unistitch/geometry.hpp"
#include "unistitch/maskgen.hpp"
#include "unistitch/morphology.hpp"

using namespace unistitch;

namespace {

BinaryMask left_part(int w, int h, int cols) {
  BinaryMask m(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < cols; ++x) m.set(x, y, true);
  }
  return m;
}

int expected_band(int w_star, double lambda, int delta) {
  int k = static_cast<int>(std::ceil(w_star / lambda)) * delta;
  return k % 2 == 0 ? k + 1 : k;
}

}  // namespace

TEST(SeamBandWidth, FormulaCases) {
  StitchConfig cfg;
  EXPECT_EQ(seam_band_width({1024, 10, 0, 0}, cfg), 61);
  EXPECT_EQ(seam_band_width({200, 10, 0, 0}, cfg), 11);
  EXPECT_EQ(seam_band_width({1, 1, 0, 0}, cfg), 11);
  EXPECT_EQ(seam_band_width({201, 10, 0, 0}, cfg), 21);
  cfg.delta = 3;
  EXPECT_EQ(seam_band_width({512, 10, 0, 0}, cfg), 9);
}

TEST(SeamBandWidth, MatchesFormulaOverRange) {
  for (double lambda : {50.0, 100.0, 200.0, 333.0}) {
    for (int delta : {1, 2, 7, 10}) {
      StitchConfig cfg;
      cfg.lambda = lambda;
      cfg.delta = delta;
      for (int w = 1; w <= 2048; w += 37) {
        EXPECT_EQ(seam_band_width({w, 10, 0, 0}, cfg), expected_band(w, lambda, delta));
      }
    }
  }
}

TEST(SeamMask, TrivialCases) {
  EXPECT_FALSE(build_seam_mask(BinaryMask(20, 10, true), BinaryMask(20, 10), Kernel(5)).any());
  EXPECT_FALSE(build_seam_mask(BinaryMask(20, 10, true), BinaryMask(20, 10, true), Kernel(5)).any());
}

TEST(SeamMask, LeftHalfGivesBandOfWidthTwo) {
  const BinaryMask seam = build_seam_mask(left_part(20, 10, 10), BinaryMask(20, 10, true), Kernel(3));
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 20; ++x) EXPECT_EQ(seam.get(x, y), x == 9 || x == 10) << x << "," << y;
  }
}

TEST(SeamMask, MatchesSetAlgebraOracle) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> dim(1, 48);
  std::uniform_int_distribution<int> ks(1, 13);
  for (int i = 0; i < 200; ++i) {
    const int w = dim(rng);
    const int h = dim(rng);
    const BinaryMask wl = oracle::random_mask(rng, w, h);
    const BinaryMask wr = oracle::random_mask(rng, w, h);
    const Kernel k(ks(rng));
    const BinaryMask got = build_seam_mask(wl, wr, k);
    ASSERT_EQ(got, oracle::seam(wl, wr, k.radius())) << "case " << i;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (got.get(x, y)) {
          ASSERT_LE(oracle::boundary_distance(wl, x, y), k.radius());
        }
      }
    }
  }
}

TEST(RectMask, ComplementOfUnion) {
  std::mt19937_64 rng(32);
  for (int i = 0; i < 50; ++i) {
    const BinaryMask wl = oracle::random_mask(rng, 30, 20);
    const BinaryMask wr = oracle::random_mask(rng, 30, 20);
    const RectMasks r = build_rect_mask(wl, wr);
    EXPECT_EQ(r.m_union_content, wl | wr);
    EXPECT_FALSE((r.m_rect & r.m_union_content).any());
    EXPECT_EQ((r.m_rect | r.m_union_content).popcount(), r.m_rect.size());
  }
  EXPECT_FALSE(build_rect_mask(BinaryMask(4, 4, true), BinaryMask(4, 4)).m_rect.any());
}

TEST(RectMask, CornerTriangles) {
  // Rotated square footprint inside a square raster leaves the four corners.
  const int n = 41;
  BinaryMask diamond(n, n);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) diamond.set(x, y, std::abs(x - 20) + std::abs(y - 20) <= 20);
  }
  const RectMasks r = build_rect_mask(diamond, diamond);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) EXPECT_EQ(r.m_rect.get(x, y), std::abs(x - 20) + std::abs(y - 20) > 20);
  }
}

TEST(NormalizedRamp, PeaksAtOneInsideRegion) {
  const BinaryMask band = left_part(21, 9, 21) & ~left_part(21, 9, 5) & left_part(21, 9, 16);
  const WeightMask ramp = normalized_ramp(band, Kernel(3));
  double peak = 0.0;
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 21; ++x) {
      if (!band.get(x, y)) {
        EXPECT_EQ(ramp.get(x, y), 0.0);
      }
      peak = std::max(peak, ramp.get(x, y));
    }
  }
  EXPECT_DOUBLE_EQ(peak, 1.0);
  EXPECT_DOUBLE_EQ(ramp.get(10, 4), 1.0);
  EXPECT_LT(ramp.get(5, 4), ramp.get(7, 4));
  const WeightMask none = normalized_ramp(BinaryMask(5, 5), Kernel(3));
  for (double v : none.weights()) EXPECT_EQ(v, 0.0);
}

TEST(WeightedMasks, FormulaCases) {
  const BinaryMask wl = left_part(60, 20, 30);
  const BinaryMask wr = ~left_part(60, 20, 20);
  const BinaryMask seam = build_seam_mask(wl, wr, Kernel(11));
  const BinaryMask rect(60, 20);

  StitchConfig cfg;
  cfg.eps1 = 0;
  cfg.eps2 = 0;
  for (double v : build_weighted_masks(seam, rect, cfg).w_init.weights()) EXPECT_EQ(v, 1.0);

  const WeightMask ramp = normalized_ramp(seam, Kernel(cfg.k_g));
  int cx = -1;
  for (int x = 0; x < 60 && cx < 0; ++x) {
    if (ramp.get(x, 10) == 1.0) cx = x;
  }
  ASSERT_GE(cx, 0);
  cfg.eps1 = 255;
  EXPECT_NEAR(build_weighted_masks(seam, rect, cfg).w_init.get(cx, 10), 0.0, 1e-12);
  cfg.eps1 = 128;
  EXPECT_NEAR(build_weighted_masks(seam, rect, cfg).w_init.get(cx, 10), 1.0 - 128.0 / 255.0, 1e-12);
}

TEST(WeightedMasks, InvariantsOnWarpedPairs) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 25; ++i) {
    const Homography h({1 + 0.1 * u(rng), 0.1 * u(rng), 40 + 10 * u(rng), 0.1 * u(rng),
                        1 + 0.1 * u(rng), 15 * u(rng), 2e-4 * u(rng), 2e-4 * u(rng), 1});
    const ImageBuffer img = oracle::scene(80, 60, i);
    const WarpedPair pair = align_pair(img, img, h);
    StitchConfig cfg;
    cfg.lambda = 20;
    cfg.delta = 2;
    const MaskSet m = build_masks(pair, cfg);
    EXPECT_EQ(m.k_s, seam_band_width(pair.domain, cfg));
    EXPECT_EQ(m.m_inpaint, m.m_seam | m.m_rect);
    EXPECT_EQ(m.m_union_content, pair.m_wl | pair.m_wr);
    EXPECT_FALSE((m.m_rect & m.m_union_content).any());
    EXPECT_TRUE(m.w_init.valid());
    EXPECT_TRUE(m.w_inpaint.valid());
    for (std::size_t p = 0; p < m.m_rect.size(); ++p) {
      if (m.m_rect[p]) {
        EXPECT_EQ(m.w_inpaint[p], 1.0);
      }
      if (!m.m_inpaint[p]) {
        EXPECT_EQ(m.w_inpaint[p], 0.0);
        EXPECT_EQ(m.w_init[p], 1.0);
      }
      if (m.w_inpaint[p] == 0.0 && !m.m_rect[p]) {
        EXPECT_EQ(m.w_init[p], 1.0);
      }
    }
  }
}

TEST(StepMask, PublishedCases) {
  WeightMask w(3, 1);
  w.set(0, 0, 1.0);
  w.set(1, 0, 0.0);
  w.set(2, 0, 0.5);
  for (int t = 0; t < 50; ++t) {
    const BinaryMask s = step_mask(w, t, 50);
    EXPECT_TRUE(s.get(0, 0)) << t;
    EXPECT_FALSE(s.get(1, 0)) << t;
    EXPECT_EQ(s.get(2, 0), t >= 25) << t;
  }
}

TEST(StepMask, ExhaustiveAgainstIntegerOracle) {
  for (int n : {1, 2, 10, 50, 64}) {
    WeightMask w(n + 1, 1);
    for (int k = 0; k <= n; ++k) w.set(k, 0, static_cast<double>(k) / n);
    std::size_t previous = w.size() + 1;
    for (int t = n - 1; t >= 0; --t) {
      const BinaryMask s = step_mask(w, t, n);
      for (int k = 0; k <= n; ++k) ASSERT_EQ(s.get(k, 0), oracle::inpaint_at(k, t, n)) << n << " " << t;
      EXPECT_LE(s.popcount(), previous);
      previous = s.popcount();
    }
  }
}

TEST(StepMask, RejectsOutOfRangeStep) {
  EXPECT_THROW(step_mask(WeightMask(2, 2), -1, 50), Error);
  EXPECT_THROW(step_mask(WeightMask(2, 2), 51, 50), Error);
}
