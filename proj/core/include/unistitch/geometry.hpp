#pragma once

#include <utility>

#include "unistitch/homography.hpp"
#include "unistitch/image.hpp"

namespace unistitch {

/// Minimal raster holding both registered images. Plane coordinate (u, v)
/// lands on domain pixel (u + offset_x, v + offset_y).
struct StitchDomain {
  int w_star = 0;
  int h_star = 0;
  int offset_x = 0;
  int offset_y = 0;

  friend bool operator==(const StitchDomain&, const StitchDomain&) = default;
};

struct WarpedPair {
  ImageBuffer i_wl;
  ImageBuffer i_wr;
  BinaryMask m_wl;
  BinaryMask m_wr;
  StitchDomain domain;
};

enum class Interpolation { Nearest, Bilinear };

struct Size2 {
  int width = 0;
  int height = 0;
};

/// Corner min/max rule over the identity-mapped left corners and the
/// h-mapped right corners.
StitchDomain compute_domain(Size2 left, Size2 right, const Homography& h);

/// Inverse-maps every domain pixel through h. Pixels whose nearest source
/// sample falls outside the source raster are 0; bilinear sampling clamps
/// its 2x2 footprint to the source so image and coverage mask agree.
ImageBuffer warp(const ImageBuffer& img, const Homography& h, const StitchDomain& domain,
                 Interpolation interp);

/// Coverage mask of a width x height source under h (all-ones raster, nearest).
BinaryMask warp_coverage(Size2 source, const Homography& h, const StitchDomain& domain);

/// Registers the pair: left by identity, right by h. Throws NoOverlap.
WarpedPair align_pair(const ImageBuffer& i_l, const ImageBuffer& i_r, const Homography& h);

/// Builds a WarpedPair from already-aligned rasters. Mask images are
/// binarized at 0.5 on their first channel. Throws InvalidArgument on
/// mismatched sizes and NoOverlap on disjoint masks.
WarpedPair pair_from_prealigned(ImageBuffer i_wl, ImageBuffer i_wr, const ImageBuffer& mask_l,
                                const ImageBuffer& mask_r);

}  // namespace unistitch
