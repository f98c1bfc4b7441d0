#include "unistitch/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "unistitch/error.hpp"
#include "unistitch/io.hpp"
#include "unistitch/remote_backend.hpp"
#include "unistitch/wire.hpp"

namespace unistitch {
namespace {

void l2_normalize(std::vector<double>& v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) return;
  for (double& x : v) x /= norm;
}

ImageBuffer sub_image(const ImageBuffer& img, int x0, int y0, int w, int h) {
  ImageBuffer out(w, h, img.channels());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < img.channels(); ++c) out.at(x, y, c) = img.at(x0 + x, y0 + y, c);
    }
  }
  return out;
}

Embedding concat(const std::vector<Embedding>& parts) {
  Embedding out;
  for (const auto& p : parts) out.values.insert(out.values.end(), p.values.begin(), p.values.end());
  return out;
}

}  // namespace

Embedding FingerprintProvider::describe(const ImageBuffer& img) {
  if (img.empty()) fail(ErrorCode::ProviderError, "cannot describe an empty image");
  const int w = img.width();
  const int h = img.height();
  std::vector<double> values(kHistogramBins + kPoolSide * kPoolSide, 0.0);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double lum = std::clamp(static_cast<double>(luminance(img, x, y)), 0.0, 1.0);
      const int bin = std::min(kHistogramBins - 1, static_cast<int>(lum * kHistogramBins));
      values[bin] += 1.0;
    }
  }
  const double count = static_cast<double>(w) * h;
  for (int b = 0; b < kHistogramBins; ++b) values[b] /= count;

  for (int by = 0; by < kPoolSide; ++by) {
    const int y0 = by * h / kPoolSide;
    const int y1 = std::max(y0 + 1, (by + 1) * h / kPoolSide);
    for (int bx = 0; bx < kPoolSide; ++bx) {
      const int x0 = bx * w / kPoolSide;
      const int x1 = std::max(x0 + 1, (bx + 1) * w / kPoolSide);
      double sum = 0.0;
      int n = 0;
      for (int y = y0; y < std::min(y1, h); ++y) {
        for (int x = x0; x < std::min(x1, w); ++x) {
          sum += luminance(img, x, y);
          ++n;
        }
      }
      values[kHistogramBins + by * kPoolSide + bx] = n > 0 ? sum / n : 0.0;
    }
  }
  l2_normalize(values);
  return Embedding{std::move(values)};
}

RemoteProvider::RemoteProvider(std::string url) : url_(std::move(url)) {}

Embedding RemoteProvider::describe(const ImageBuffer& img) {
  HttpJsonClient client(url_);
  const auto png = encode_png(img);
  const nlohmann::json res =
      client.post("/v1/describe", nlohmann::json{{"image_png", wire::base64_encode(png)}});
  if (!res.is_object() || !res.contains("values") || !res["values"].is_array()) {
    fail(ErrorCode::ProviderError, "describe response lacks 'values'");
  }
  Embedding e;
  for (const auto& v : res["values"]) {
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      fail(ErrorCode::ProviderError, "describe returned a non-finite embedding");
    }
    e.values.push_back(v.get<double>());
  }
  if (e.values.empty() || res.value("dim", std::size_t{0}) != e.values.size()) {
    fail(ErrorCode::ProviderError, "describe returned an inconsistent embedding dimension");
  }
  return e;
}

std::vector<ImageBuffer> grid_split(const ImageBuffer& img, int n) {
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(std::max(n, 0)))));
  if (n < 1 || side * side != n) {
    fail(ErrorCode::InvalidArgument, "tile count must be a perfect square");
  }
  const int tw = img.width() / side;
  const int th = img.height() / side;
  if (tw < kMinTileSide || th < kMinTileSide) {
    fail(ErrorCode::TileTooSmall, "tiles of " + std::to_string(tw) + "x" + std::to_string(th) +
                                      " are below the " + std::to_string(kMinTileSide) +
                                      " px minimum");
  }
  std::vector<ImageBuffer> tiles;
  tiles.reserve(static_cast<std::size_t>(n));
  for (int r = 0; r < side; ++r) {
    const int y0 = r * th;
    const int h = r == side - 1 ? img.height() - y0 : th;
    for (int c = 0; c < side; ++c) {
      const int x0 = c * tw;
      const int w = c == side - 1 ? img.width() - x0 : tw;
      tiles.push_back(sub_image(img, x0, y0, w, h));
    }
  }
  return tiles;
}

double cosine(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim() || a.dim() == 0) {
    fail(ErrorCode::InvalidArgument, "embedding dimensions differ");
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) fail(ErrorCode::ZeroVector, "cosine of a zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

ImageBuffer concat_horizontal(const ImageBuffer& left, const ImageBuffer& right) {
  const int channels = std::max(left.channels(), right.channels());
  ImageBuffer out(left.width() + right.width(), std::max(left.height(), right.height()), channels);
  auto blit = [&](const ImageBuffer& src, int x0) {
    for (int y = 0; y < src.height(); ++y) {
      for (int x = 0; x < src.width(); ++x) {
        for (int c = 0; c < channels; ++c) {
          out.at(x0 + x, y, c) = src.at(x, y, src.channels() == channels ? c : 0);
        }
      }
    }
  };
  blit(left, 0);
  blit(right, left.width());
  return out;
}

CcsResult ccs(const ImageBuffer& stitched, const ImageBuffer& fusion, const ImageBuffer& left,
              const ImageBuffer& right, ContentProvider& provider, const CcsOptions& options) {
  const auto tiles_s = grid_split(stitched, options.tiles);
  const auto tiles_f = grid_split(fusion, options.tiles);
  std::vector<Embedding> emb_s;
  std::vector<Embedding> emb_f;
  for (const auto& t : tiles_s) emb_s.push_back(provider.describe(t));
  for (const auto& t : tiles_f) emb_f.push_back(provider.describe(t));

  CcsResult r;
  if (options.aggregation == TileAggregation::Concatenate) {
    r.ccs_n = cosine(concat(emb_s), concat(emb_f));
  } else {
    double sum = 0.0;
    for (std::size_t i = 0; i < emb_s.size(); ++i) sum += cosine(emb_s[i], emb_f[i]);
    r.ccs_n = sum / static_cast<double>(emb_s.size());
  }

  const Embedding whole = provider.describe(stitched);
  Embedding pair;
  if (options.pair == PairEmbedding::SideBySide) {
    pair = provider.describe(concat_horizontal(left, right));
  } else {
    Embedding el = provider.describe(left);
    const Embedding er = provider.describe(right);
    if (el.dim() != er.dim()) fail(ErrorCode::ProviderError, "provider dimension changed");
    std::vector<double> a = el.values;
    std::vector<double> b = er.values;
    l2_normalize(a);
    l2_normalize(b);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = 0.5 * (a[i] + b[i]);
    pair.values = std::move(a);
  }
  r.ccs_g = cosine(whole, pair);
  r.ccs = 0.5 * (r.ccs_n + r.ccs_g);
  return r;
}

}  // namespace unistitch
