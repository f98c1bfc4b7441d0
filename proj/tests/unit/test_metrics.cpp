#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "unistitch/metrics.hpp"

using namespace unistitch;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::Io;
}

// Per-channel mean plus one: small enough to hand-compute cosines.
class MeanColorProvider : public ContentProvider {
 public:
  int calls = 0;
  Embedding describe(const ImageBuffer& img) override {
    ++calls;
    Embedding e;
    for (int c = 0; c < img.channels(); ++c) {
      double s = 0;
      for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) s += img.at(x, y, c);
      }
      e.values.push_back(1.0 + s / (static_cast<double>(img.width()) * img.height()));
    }
    return e;
  }
};

double ref_cos(const std::vector<double>& a, const std::vector<double>& b) {
  const double dot = std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
  const double na = std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0));
  const double nb = std::sqrt(std::inner_product(b.begin(), b.end(), b.begin(), 0.0));
  return dot / (na * nb);
}

ImageBuffer upscale2(const ImageBuffer& img) {
  ImageBuffer out(img.width() * 2, img.height() * 2, img.channels());
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      for (int c = 0; c < img.channels(); ++c) out.at(x, y, c) = img.at(x / 2, y / 2, c);
    }
  }
  return out;
}

}  // namespace

TEST(Cosine, HandCases) {
  EXPECT_NEAR(cosine({{1, 2, 2}}, {{2, 1, 2}}), 8.0 / 9.0, 1e-12);
  EXPECT_NEAR(cosine({{1, 0}}, {{0, 3}}), 0.0, 1e-12);
  EXPECT_NEAR(cosine({{1, 1}}, {{-2, -2}}), -1.0, 1e-12);
  EXPECT_NEAR(cosine({{3, 4}}, {{6, 8}}), 1.0, 1e-12);
  EXPECT_EQ(code_of([] { cosine({{0, 0}}, {{1, 2}}); }), ErrorCode::ZeroVector);
  EXPECT_EQ(code_of([] { cosine({{1, 2}}, {{1, 2, 3}}); }), ErrorCode::InvalidArgument);
}

TEST(Cosine, MatchesReferenceOnRandomVectors) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> g;
  for (int i = 0; i < 100; ++i) {
    Embedding a;
    Embedding b;
    for (int k = 0; k < 17; ++k) {
      a.values.push_back(g(rng));
      b.values.push_back(g(rng));
    }
    EXPECT_NEAR(cosine(a, b), ref_cos(a.values, b.values), 1e-12);
  }
}

TEST(GridSplit, PartitionsEveryPixelOnce) {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> dim(64, 200);
  for (int i = 0; i < 50; ++i) {
    const int w = dim(rng);
    const int h = dim(rng);
    ImageBuffer img(w, h, 1);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) img.at(x, y, 0) = static_cast<float>(y * w + x);
    }
    const auto tiles = grid_split(img, 4);
    ASSERT_EQ(tiles.size(), 4u);
    std::vector<int> seen(static_cast<std::size_t>(w) * h, 0);
    for (const auto& t : tiles) {
      EXPECT_GE(t.width(), kMinTileSide);
      EXPECT_GE(t.height(), kMinTileSide);
      for (float v : t.data()) ++seen[static_cast<std::size_t>(v)];
    }
    for (int s : seen) ASSERT_EQ(s, 1);
    EXPECT_EQ(tiles[0].width(), w / 2);
    EXPECT_EQ(tiles[1].width(), w - w / 2);
    EXPECT_EQ(tiles[2].height(), h - h / 2);
    EXPECT_EQ(tiles[1].at(0, 0, 0), static_cast<float>(w / 2));
  }
}

TEST(GridSplit, Errors) {
  EXPECT_EQ(code_of([] { grid_split(ImageBuffer(63, 100, 3), 4); }), ErrorCode::TileTooSmall);
  EXPECT_EQ(code_of([] { grid_split(ImageBuffer(100, 95, 3), 9); }), ErrorCode::TileTooSmall);
  EXPECT_EQ(code_of([] { grid_split(ImageBuffer(100, 100, 3), 3); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { grid_split(ImageBuffer(100, 100, 3), 0); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(grid_split(ImageBuffer(96, 96, 3), 9).size(), 9u);
  EXPECT_EQ(grid_split(ImageBuffer(40, 40, 3), 1).size(), 1u);
}

TEST(ConcatHorizontal, PadsShorterImage) {
  const ImageBuffer l(3, 2, 3, 0.5F);
  const ImageBuffer r(2, 4, 3, 0.25F);
  const ImageBuffer c = concat_horizontal(l, r);
  EXPECT_EQ(c.width(), 5);
  EXPECT_EQ(c.height(), 4);
  EXPECT_EQ(c.at(1, 1, 0), 0.5F);
  EXPECT_EQ(c.at(1, 3, 0), 0.0F);
  EXPECT_EQ(c.at(4, 3, 2), 0.25F);
}

TEST(Fingerprint, DimensionNormAndDeterminism) {
  FingerprintProvider p;
  const ImageBuffer img = oracle::scene(70, 50, 1);
  const Embedding e = p.describe(img);
  EXPECT_EQ(e.dim(), 128u);
  double norm = 0;
  for (double v : e.values) norm += v * v;
  EXPECT_NEAR(norm, 1.0, 1e-12);
  EXPECT_EQ(p.describe(img), e);
  EXPECT_EQ(FingerprintProvider().describe(img), e);
  EXPECT_NE(p.describe(oracle::scene(70, 50, 2)), e);
  EXPECT_EQ(code_of([&] { p.describe(ImageBuffer()); }), ErrorCode::ProviderError);
}

TEST(Fingerprint, ScaleInvariant) {
  FingerprintProvider p;
  for (int i = 0; i < 10; ++i) {
    const ImageBuffer img = oracle::scene(64, 48, 10 + i);
    const Embedding a = p.describe(img);
    const Embedding b = p.describe(upscale2(img));
    for (std::size_t k = 0; k < a.dim(); ++k) EXPECT_NEAR(a.values[k], b.values[k], 1e-9);
  }
}

TEST(Ccs, IdenticalQuadrupleScoresOne) {
  FingerprintProvider p;
  for (int i = 0; i < 10; ++i) {
    const ImageBuffer img = oracle::scene(96 + 7 * i, 80, 20 + i);
    for (auto agg : {TileAggregation::Concatenate, TileAggregation::MeanCosine}) {
      CcsOptions opt;
      opt.aggregation = agg;
      const CcsResult r = ccs(img, img, img, img, p, opt);
      EXPECT_NEAR(r.ccs, 1.0, 1e-9);
      EXPECT_NEAR(r.ccs_n, 1.0, 1e-9);
      EXPECT_NEAR(r.ccs_g, 1.0, 1e-9);
    }
  }
}

TEST(Ccs, MatchesHandComputedTerms) {
  // Quadrants with distinct constant colors make every embedding explicit.
  ImageBuffer stitched(64, 64, 3);
  ImageBuffer fusion(64, 64, 3);
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      const int q = (y / 32) * 2 + x / 32;
      for (int c = 0; c < 3; ++c) {
        stitched.at(x, y, c) = 0.1F * static_cast<float>(q + c);
        fusion.at(x, y, c) = c == q % 3 ? 0.6F : 0.2F;
      }
    }
  }
  const ImageBuffer left(32, 64, 3, 0.3F);
  const ImageBuffer right(32, 64, 3, 0.7F);
  MeanColorProvider p;

  std::vector<double> cs;
  std::vector<double> cf;
  double mean_cos = 0;
  for (int q = 0; q < 4; ++q) {
    std::vector<double> s;
    std::vector<double> f;
    for (int c = 0; c < 3; ++c) {
      s.push_back(1.0 + static_cast<double>(0.1F * static_cast<float>(q + c)));
      f.push_back(1.0 + (c == q % 3 ? static_cast<double>(0.6F) : static_cast<double>(0.2F)));
    }
    cs.insert(cs.end(), s.begin(), s.end());
    cf.insert(cf.end(), f.begin(), f.end());
    mean_cos += ref_cos(s, f) / 4;
  }
  std::vector<double> whole(3, 0.0);
  for (int q = 0; q < 4; ++q) {
    for (int c = 0; c < 3; ++c) whole[c] += cs[q * 3 + c] / 4;
  }
  const std::vector<double> pair_mean(3, 1.5);  // mean of (1.3,..) and (1.7,..)
  const std::vector<double> pair_sbs(3, 1.5);

  CcsOptions opt;
  CcsResult r = ccs(stitched, fusion, left, right, p, opt);
  EXPECT_NEAR(r.ccs_n, ref_cos(cs, cf), 1e-6);
  EXPECT_NEAR(r.ccs_g, ref_cos(whole, pair_mean), 1e-6);
  EXPECT_NEAR(r.ccs, 0.5 * (r.ccs_n + r.ccs_g), 1e-12);

  opt.aggregation = TileAggregation::MeanCosine;
  opt.pair = PairEmbedding::SideBySide;
  r = ccs(stitched, fusion, left, right, p, opt);
  EXPECT_NEAR(r.ccs_n, mean_cos, 1e-6);
  EXPECT_NEAR(r.ccs_g, ref_cos(whole, pair_sbs), 1e-6);
}

TEST(Ccs, RangeAndSensitivity) {
  FingerprintProvider p;
  const ImageBuffer a = oracle::scene(128, 96, 50);
  ImageBuffer damaged = a;
  for (int y = 20; y < 70; ++y) {
    for (int x = 30; x < 100; ++x) {
      for (int c = 0; c < 3; ++c) damaged.at(x, y, c) = 0.0F;
    }
  }
  const CcsResult clean = ccs(a, a, a, a, p);
  const CcsResult hole = ccs(damaged, a, a, a, p);
  EXPECT_LT(hole.ccs, clean.ccs);
  EXPECT_GE(hole.ccs, -1.0);
  EXPECT_LE(hole.ccs, 1.0);
}

TEST(Ccs, TileErrorsPropagate) {
  FingerprintProvider p;
  const ImageBuffer small(40, 40, 3, 0.5F);
  EXPECT_EQ(code_of([&] { ccs(small, small, small, small, p); }), ErrorCode::TileTooSmall);
}
