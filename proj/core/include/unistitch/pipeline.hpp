#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "unistitch/backend.hpp"
#include "unistitch/config.hpp"
#include "unistitch/geometry.hpp"
#include "unistitch/maskgen.hpp"

namespace unistitch {

struct PipelineArtifacts {
  WarpedPair pair;
  ImageBuffer coarse_fusion;       // overlap from the left image, rest from the right
  ImageBuffer coarse_rectangling;  // coarse fusion with the missing region Telea-filled
  MaskSet masks;
  ImageBuffer stitched;
  std::vector<BinaryMask> per_step_masks;  // latent resolution, t = N-1 ... 0
  std::vector<std::pair<std::string, double>> stage_seconds;
};

/// I_wl where m_wl is set; I_wr where only m_wr is set; 0 elsewhere.
ImageBuffer coarse_fuse(const WarpedPair& pair);

/// Telea fill of the missing region, or a pass-through under the
/// disable_coarse_rectangling ablation.
ImageBuffer coarse_rectangle(const ImageBuffer& i_cf, const BinaryMask& m_rect,
                             const StitchConfig& cfg);

/// Edge-replication padding to multiples of `multiple` on the right/bottom.
ImageBuffer pad_to_multiple(const ImageBuffer& img, int multiple);
WeightMask pad_to_multiple(const WeightMask& m, int multiple);
ImageBuffer crop(const ImageBuffer& img, int width, int height);

/// Area-mean downsampling by an integer factor; dimensions must divide.
WeightMask downsample_area(const WeightMask& m, int factor);

/// The weighted-mask guided reverse process followed by pixel-space
/// paste-back over m_inpaint. The initial step at level N is conditioned on
/// the downsampled init mask; steps t = N-1 ... 0 on the thresholded inpaint
/// schedule. Thresholded step masks are appended to `step_masks` in that
/// order when it is non-null.
ImageBuffer run_wmgrp(const ImageBuffer& i_cfr, const MaskSet& masks, const StitchConfig& cfg,
                      InpaintBackend& backend, std::vector<BinaryMask>* step_masks = nullptr);

struct StitchOptions {
  bool record_step_masks = false;
};

/// Registration through rectangling for a pair plus homography.
PipelineArtifacts stitch(const ImageBuffer& i_l, const ImageBuffer& i_r, const Homography& h,
                         const StitchConfig& cfg, InpaintBackend& backend,
                         const StitchOptions& options = {});

/// Same flow for rasters that are already registered.
PipelineArtifacts stitch_prealigned(WarpedPair pair, const StitchConfig& cfg,
                                    InpaintBackend& backend, const StitchOptions& options = {});

/// Mask stage only: fusion, masks and coarse rectangling, no reverse process.
PipelineArtifacts prepare(WarpedPair pair, const StitchConfig& cfg);

}  // namespace unistitch
