#include "unistitch/maskgen.hpp"

#include <algorithm>
#include <cmath>

#include "unistitch/error.hpp"

namespace unistitch {

int seam_band_width(const StitchDomain& domain, const StitchConfig& cfg) {
  const auto units = static_cast<int>(std::ceil(static_cast<double>(domain.w_star) / cfg.lambda));
  int k = std::max(units, 1) * cfg.delta;
  if (k % 2 == 0) ++k;
  return k;
}

BinaryMask build_seam_mask(const BinaryMask& m_wl, const BinaryMask& m_wr, Kernel k_s) {
  if (!m_wl.same_shape(m_wr)) fail(ErrorCode::InvalidArgument, "mask size mismatch");
  const BinaryMask outer = dilate(m_wl, k_s) ^ m_wl;
  const BinaryMask inner = (erode(m_wl, k_s, Border::Neutral) ^ m_wl) & m_wr;
  return outer | inner;
}

RectMasks build_rect_mask(const BinaryMask& m_wl, const BinaryMask& m_wr) {
  RectMasks out;
  out.m_union_content = m_wl | m_wr;
  out.m_rect = ~out.m_union_content;
  return out;
}

WeightMask normalized_ramp(const BinaryMask& region, Kernel k_g) {
  // The raster frame is not a boundary of either region, so distances are
  // measured to in-raster unset pixels only.
  WeightMask ramp = distance_transform(region, k_g, Border::Neutral);
  const auto w = ramp.weights();
  const double peak = w.empty() ? 0.0 : *std::max_element(w.begin(), w.end());
  if (peak <= 0.0) return WeightMask(region.width(), region.height());
  for (double& v : w) v /= peak;
  return ramp;
}

WeightedMasks build_weighted_masks(const BinaryMask& m_seam, const BinaryMask& m_rect,
                                   const StitchConfig& cfg) {
  if (!m_seam.same_shape(m_rect)) fail(ErrorCode::InvalidArgument, "mask size mismatch");
  const Kernel k_g(cfg.k_g);
  const WeightMask ramp_seam = normalized_ramp(m_seam, k_g);
  const WeightMask ramp_rect = normalized_ramp(m_rect, k_g);
  const double s1 = cfg.eps1 / 255.0;
  const double s2 = cfg.eps2 / 255.0;

  WeightedMasks out{WeightMask(m_seam.width(), m_seam.height()),
                    WeightMask(m_seam.width(), m_seam.height())};
  for (std::size_t i = 0; i < m_seam.size(); ++i) {
    out.w_init[i] = std::clamp(1.0 - s1 * ramp_seam[i] - s2 * ramp_rect[i], 0.0, 1.0);
    if (m_rect[i]) {
      out.w_inpaint[i] = 1.0;
    } else if (m_seam[i]) {
      out.w_inpaint[i] = ramp_seam[i];
    }
  }
  return out;
}

BinaryMask step_mask(const WeightMask& w_inpaint, int t, int n) {
  if (n < 1 || t < 0 || t > n) fail(ErrorCode::InvalidArgument, "step index out of range");
  const double threshold = step_threshold(t, n);
  BinaryMask out(w_inpaint.width(), w_inpaint.height());
  auto bits = out.bits();
  for (std::size_t i = 0; i < bits.size(); ++i) {
    bits[i] = w_inpaint[i] < threshold ? 0 : 1;
  }
  return out;
}

MaskSet build_masks(const WarpedPair& pair, const StitchConfig& cfg) {
  validate_config(cfg);
  MaskSet set;
  set.k_s = seam_band_width(pair.domain, cfg);
  set.m_seam = build_seam_mask(pair.m_wl, pair.m_wr, Kernel(set.k_s));
  RectMasks rect = build_rect_mask(pair.m_wl, pair.m_wr);
  set.m_rect = std::move(rect.m_rect);
  set.m_union_content = std::move(rect.m_union_content);
  set.m_inpaint = set.m_seam | set.m_rect;
  WeightedMasks weighted = build_weighted_masks(set.m_seam, set.m_rect, cfg);
  set.w_init = std::move(weighted.w_init);
  set.w_inpaint = std::move(weighted.w_inpaint);
  return set;
}

}  // namespace unistitch
