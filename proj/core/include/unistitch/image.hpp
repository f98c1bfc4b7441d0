#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace unistitch {

/// H x W x C raster, row-major interleaved, values normalized to [0,1].
/// 8-bit data exists only at the file boundary (see io.hpp).
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(int width, int height, int channels, float fill = 0.0F);
  ImageBuffer(int width, int height, int channels, std::vector<float> data);

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] int channels() const noexcept { return channels_; }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }
  [[nodiscard]] std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  [[nodiscard]] float& at(int x, int y, int c) noexcept {
    return data_[index(x, y, c)];
  }
  [[nodiscard]] float at(int x, int y, int c) const noexcept {
    return data_[index(x, y, c)];
  }

  [[nodiscard]] std::span<float> data() noexcept { return data_; }
  [[nodiscard]] std::span<const float> data() const noexcept { return data_; }

  [[nodiscard]] bool same_shape(const ImageBuffer& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ &&
           channels_ == other.channels_;
  }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  [[nodiscard]] std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

/// Row-major boolean raster stored one byte per pixel (0 or 1).
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, bool fill = false);

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] std::size_t size() const noexcept { return bits_.size(); }

  [[nodiscard]] bool get(int x, int y) const noexcept {
    return bits_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                 static_cast<std::size_t>(x)] != 0;
  }
  void set(int x, int y, bool v) noexcept {
    bits_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
          static_cast<std::size_t>(x)] = v ? 1 : 0;
  }
  [[nodiscard]] bool operator[](std::size_t i) const noexcept { return bits_[i] != 0; }

  [[nodiscard]] std::span<std::uint8_t> bits() noexcept { return bits_; }
  [[nodiscard]] std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  [[nodiscard]] std::size_t popcount() const noexcept;
  [[nodiscard]] bool any() const noexcept { return popcount() != 0; }
  [[nodiscard]] bool same_shape(const BinaryMask& o) const noexcept {
    return width_ == o.width_ && height_ == o.height_;
  }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

BinaryMask operator&(const BinaryMask& a, const BinaryMask& b);
BinaryMask operator|(const BinaryMask& a, const BinaryMask& b);
BinaryMask operator^(const BinaryMask& a, const BinaryMask& b);
BinaryMask operator~(const BinaryMask& a);

/// Real-valued per-pixel weights in [0,1].
class WeightMask {
 public:
  WeightMask() = default;
  WeightMask(int width, int height, double fill = 0.0);

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }

  [[nodiscard]] double get(int x, int y) const noexcept {
    return weights_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                    static_cast<std::size_t>(x)];
  }
  void set(int x, int y, double v) noexcept {
    weights_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
             static_cast<std::size_t>(x)] = v;
  }
  [[nodiscard]] double operator[](std::size_t i) const noexcept { return weights_[i]; }
  [[nodiscard]] double& operator[](std::size_t i) noexcept { return weights_[i]; }

  [[nodiscard]] std::span<double> weights() noexcept { return weights_; }
  [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }

  /// True when every weight is finite and inside [0,1].
  [[nodiscard]] bool valid() const noexcept;

  friend bool operator==(const WeightMask&, const WeightMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> weights_;
};

WeightMask to_weights(const BinaryMask& m);

/// Quantizes a [0,1] value to 8 bits with round-half-up.
[[nodiscard]] inline std::uint8_t to_u8(float v) noexcept {
  const float c = v < 0.0F ? 0.0F : (v > 1.0F ? 1.0F : v);
  return static_cast<std::uint8_t>(c * 255.0F + 0.5F);
}
[[nodiscard]] inline float from_u8(std::uint8_t v) noexcept {
  return static_cast<float>(v) / 255.0F;
}

/// Rec.601 luma for 3-channel images, identity for single-channel ones.
[[nodiscard]] float luminance(const ImageBuffer& img, int x, int y) noexcept;

}  // namespace unistitch
