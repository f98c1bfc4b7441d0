#include "unistitch/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "unistitch/error.hpp"

namespace unistitch {
namespace {

void check_dims(int width, int height) {
  if (width < 0 || height < 0) {
    fail(ErrorCode::InvalidArgument, "negative raster dimensions");
  }
}

template <typename Op>
BinaryMask combine(const BinaryMask& a, const BinaryMask& b, Op op) {
  if (!a.same_shape(b)) fail(ErrorCode::InvalidArgument, "mask size mismatch");
  BinaryMask out(a.width(), a.height());
  auto src_a = a.bits();
  auto src_b = b.bits();
  auto dst = out.bits();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = static_cast<std::uint8_t>(op(src_a[i], src_b[i]) & 1U);
  }
  return out;
}

}  // namespace

ImageBuffer::ImageBuffer(int width, int height, int channels, float fill)
    : width_(width), height_(height), channels_(channels) {
  check_dims(width, height);
  if (channels != 1 && channels != 3) {
    fail(ErrorCode::InvalidArgument, "images carry 1 or 3 channels");
  }
  data_.assign(pixel_count() * static_cast<std::size_t>(channels), fill);
}

ImageBuffer::ImageBuffer(int width, int height, int channels, std::vector<float> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  check_dims(width, height);
  if (channels != 1 && channels != 3) {
    fail(ErrorCode::InvalidArgument, "images carry 1 or 3 channels");
  }
  if (data_.size() != pixel_count() * static_cast<std::size_t>(channels)) {
    fail(ErrorCode::InvalidArgument, "image data length does not match dimensions");
  }
}

BinaryMask::BinaryMask(int width, int height, bool fill) : width_(width), height_(height) {
  check_dims(width, height);
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
               fill ? 1 : 0);
}

std::size_t BinaryMask::popcount() const noexcept {
  return static_cast<std::size_t>(
      std::accumulate(bits_.begin(), bits_.end(), std::size_t{0}));
}

BinaryMask operator&(const BinaryMask& a, const BinaryMask& b) {
  return combine(a, b, [](unsigned x, unsigned y) { return x & y; });
}
BinaryMask operator|(const BinaryMask& a, const BinaryMask& b) {
  return combine(a, b, [](unsigned x, unsigned y) { return x | y; });
}
BinaryMask operator^(const BinaryMask& a, const BinaryMask& b) {
  return combine(a, b, [](unsigned x, unsigned y) { return x ^ y; });
}
BinaryMask operator~(const BinaryMask& a) {
  BinaryMask out(a.width(), a.height());
  auto src = a.bits();
  auto dst = out.bits();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i] ? 0 : 1;
  return out;
}

WeightMask::WeightMask(int width, int height, double fill) : width_(width), height_(height) {
  check_dims(width, height);
  weights_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

bool WeightMask::valid() const noexcept {
  return std::all_of(weights_.begin(), weights_.end(),
                     [](double w) { return std::isfinite(w) && w >= 0.0 && w <= 1.0; });
}

WeightMask to_weights(const BinaryMask& m) {
  WeightMask w(m.width(), m.height());
  for (std::size_t i = 0; i < m.size(); ++i) w[i] = m[i] ? 1.0 : 0.0;
  return w;
}

float luminance(const ImageBuffer& img, int x, int y) noexcept {
  if (img.channels() == 1) return img.at(x, y, 0);
  return 0.299F * img.at(x, y, 0) + 0.587F * img.at(x, y, 1) + 0.114F * img.at(x, y, 2);
}

}  // namespace unistitch
