#pragma once

#include "unistitch/config.hpp"
#include "unistitch/geometry.hpp"
#include "unistitch/image.hpp"
#include "unistitch/morphology.hpp"

namespace unistitch {

/// Every mask the pipeline derives from a registered pair.
struct MaskSet {
  BinaryMask m_seam;
  BinaryMask m_rect;           // missing region: NOT (m_wl OR m_wr)
  BinaryMask m_union_content;  // m_wl OR m_wr
  BinaryMask m_inpaint;        // m_seam OR m_rect
  WeightMask w_init;           // retention of the conditioning image, 1 = keep
  WeightMask w_inpaint;        // inpainting intensity, 1 = modifiable at every step
  int k_s = 1;
};

/// ceil(w_star / lambda) * delta, bumped to the next odd value.
int seam_band_width(const StitchDomain& domain, const StitchConfig& cfg);

/// (dilate(m_wl) XOR m_wl) OR ((erode(m_wl) XOR m_wl) AND m_wr).
/// The erosion uses a neutral border so the raster frame is not a seam.
BinaryMask build_seam_mask(const BinaryMask& m_wl, const BinaryMask& m_wr, Kernel k_s);

struct RectMasks {
  BinaryMask m_rect;
  BinaryMask m_union_content;
};
RectMasks build_rect_mask(const BinaryMask& m_wl, const BinaryMask& m_wr);

/// Distance-transform ramp normalized by its own maximum; 0 outside `region`
/// and all-zero for an empty region.
WeightMask normalized_ramp(const BinaryMask& region, Kernel k_g);

struct WeightedMasks {
  WeightMask w_init;
  WeightMask w_inpaint;
};

/// w_init = clamp01(1 - eps1/255 * ramp_seam - eps2/255 * ramp_rect);
/// w_inpaint = 1 on m_rect, ramp_seam on the rest of m_seam, 0 elsewhere.
WeightedMasks build_weighted_masks(const BinaryMask& m_seam, const BinaryMask& m_rect,
                                   const StitchConfig& cfg);

/// Threshold of the inpaint schedule at step t of n: (n - t) / n.
[[nodiscard]] inline double step_threshold(int t, int n) noexcept {
  return static_cast<double>(n - t) / static_cast<double>(n);
}

/// Pixel is FOR-INPAINT (1) iff w >= (n - t) / n; retained pixels satisfy
/// the strict w < (n - t) / n. Requires 0 <= t <= n.
BinaryMask step_mask(const WeightMask& w_inpaint, int t, int n);

/// Full mask derivation for a registered pair. Ablation flags are not
/// applied here; run_wmgrp substitutes the hard masks it needs.
MaskSet build_masks(const WarpedPair& pair, const StitchConfig& cfg);

}  // namespace unistitch
