#pragma once

#include <memory>
#include <string>
#include <vector>

#include "unistitch/image.hpp"

namespace unistitch {

struct Embedding {
  std::vector<double> values;

  [[nodiscard]] std::size_t dim() const noexcept { return values.size(); }
  friend bool operator==(const Embedding&, const Embedding&) = default;
};

/// Maps an image to a content embedding. Implementations must be
/// deterministic per (provider, image).
class ContentProvider {
 public:
  virtual ~ContentProvider() = default;
  virtual Embedding describe(const ImageBuffer& img) = 0;
};

/// Offline provider: 64-bin luminance histogram followed by an 8x8
/// area-mean luminance pool, L2-normalized (128 values).
class FingerprintProvider final : public ContentProvider {
 public:
  static constexpr int kHistogramBins = 64;
  static constexpr int kPoolSide = 8;

  Embedding describe(const ImageBuffer& img) override;
};

/// Provider behind the sidecar's `/v1/describe` endpoint.
class RemoteProvider final : public ContentProvider {
 public:
  explicit RemoteProvider(std::string url);
  Embedding describe(const ImageBuffer& img) override;

 private:
  std::string url_;
};

/// sqrt(n) x sqrt(n) tiles in row-major order; the last row and column
/// absorb the remainder. Throws InvalidArgument when n is not a perfect
/// square and TileTooSmall when a tile side drops below 32 pixels.
std::vector<ImageBuffer> grid_split(const ImageBuffer& img, int n);

inline constexpr int kMinTileSide = 32;

/// dot(a, b) / (|a| |b|). Throws ZeroVector on a zero norm and
/// InvalidArgument on a dimension mismatch.
double cosine(const Embedding& a, const Embedding& b);

/// Side-by-side concatenation; the shorter image is zero-padded at the bottom.
ImageBuffer concat_horizontal(const ImageBuffer& left, const ImageBuffer& right);

enum class TileAggregation {
  Concatenate,  // one cosine over the concatenated tile embeddings
  MeanCosine,   // mean of the per-tile cosines
};

struct CcsResult {
  double ccs = 0.0;
  double ccs_n = 0.0;
  double ccs_g = 0.0;
};

/// How the two inputs are embedded for the global term.
enum class PairEmbedding {
  Mean,        // normalized mean of describe(left) and describe(right)
  SideBySide,  // describe(concat_horizontal(left, right))
};

struct CcsOptions {
  int tiles = 4;
  TileAggregation aggregation = TileAggregation::Concatenate;
  PairEmbedding pair = PairEmbedding::Mean;
};

/// Content consistency: the local term compares tiles of `stitched` and
/// `fusion`, the global term compares `stitched` with the two inputs;
/// the result is their mean.
CcsResult ccs(const ImageBuffer& stitched, const ImageBuffer& fusion, const ImageBuffer& left,
              const ImageBuffer& right, ContentProvider& provider, const CcsOptions& options = {});

}  // namespace unistitch
