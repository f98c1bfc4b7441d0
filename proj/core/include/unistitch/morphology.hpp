#pragma once

#include "unistitch/image.hpp"

namespace unistitch {

/// Square structuring element. Even sizes round up to the next odd size.
class Kernel {
 public:
  explicit Kernel(int size);

  [[nodiscard]] int size() const noexcept { return size_; }
  [[nodiscard]] int radius() const noexcept { return (size_ - 1) / 2; }

 private:
  int size_;
};

/// How pixels outside the raster are treated.
///  - Zero: outside counts as unset.
///  - Neutral: outside never changes the result (unset for dilation, set
///    for erosion; for distance transforms outside is never a source).
enum class Border { Zero, Neutral };

BinaryMask dilate(const BinaryMask& m, Kernel k);
BinaryMask erode(const BinaryMask& m, Kernel k, Border border = Border::Zero);

/// Chamfer coefficients: axial and diagonal steps for 3x3, plus the knight
/// step for 5x5.
struct ChamferMask {
  double axial;
  double diagonal;
  double knight;  // 0 for the 3x3 mask
};

ChamferMask chamfer_mask(Kernel k);

/// Two-pass chamfer distance from each set pixel to the nearest unset pixel.
/// k selects the 3x3 (0.955 / 1.3693) or 5x5 (1 / 1.4 / 2.1969) L2
/// approximation. Unset pixels are 0. With Border::Zero the frame outside
/// the raster counts as unset. With Border::Neutral it does not, except
/// that a mask with no unset pixel falls back to Border::Zero.
WeightMask distance_transform(const BinaryMask& m, Kernel k, Border border = Border::Zero);

/// Fast-marching inpainting of `hole` with a circular neighborhood of
/// `radius`. Pixels outside the hole are returned bit-exact.
ImageBuffer telea_inpaint(const ImageBuffer& img, const BinaryMask& hole, int radius);

}  // namespace unistitch
