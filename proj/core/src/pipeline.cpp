#include "unistitch/pipeline.hpp"

#include <algorithm>
#include <chrono>

#include "unistitch/error.hpp"
#include "unistitch/morphology.hpp"

namespace unistitch {
namespace {

class StageClock {
 public:
  explicit StageClock(std::vector<std::pair<std::string, double>>& sink) : sink_(sink) {}

  void lap(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    sink_.emplace_back(stage, std::chrono::duration<double>(now - last_).count());
    last_ = now;
  }

 private:
  std::vector<std::pair<std::string, double>>& sink_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

ImageBuffer as_rgb(const ImageBuffer& img) {
  if (img.channels() == 3) return img;
  ImageBuffer out(img.width(), img.height(), 3);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = img.at(x, y, 0);
    }
  }
  return out;
}

ImageBuffer as_channels(const ImageBuffer& img, int channels) {
  if (img.channels() == channels) return img;
  if (channels == 3) return as_rgb(img);
  ImageBuffer out(img.width(), img.height(), 1);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out.at(x, y, 0) = luminance(img, x, y);
  }
  return out;
}

ImageBuffer multiply(const ImageBuffer& img, const WeightMask& w) {
  ImageBuffer out = img;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double k = w.get(x, y);
      for (int c = 0; c < img.channels(); ++c) {
        out.at(x, y, c) = static_cast<float>(img.at(x, y, c) * k);
      }
    }
  }
  return out;
}

void check_mask_shapes(const ImageBuffer& img, const MaskSet& masks) {
  const int w = img.width();
  const int h = img.height();
  auto ok = [&](const auto& m) { return m.width() == w && m.height() == h; };
  if (!ok(masks.m_seam) || !ok(masks.m_rect) || !ok(masks.m_union_content) ||
      !ok(masks.m_inpaint) || !ok(masks.w_init) || !ok(masks.w_inpaint)) {
    fail(ErrorCode::InvalidArgument, "mask set does not match the image size");
  }
}

}  // namespace

ImageBuffer coarse_fuse(const WarpedPair& pair) {
  const ImageBuffer& l = pair.i_wl;
  const ImageBuffer& r = pair.i_wr;
  if (!l.same_shape(r) || l.width() != pair.m_wl.width() || l.height() != pair.m_wl.height() ||
      !pair.m_wl.same_shape(pair.m_wr)) {
    fail(ErrorCode::InvalidArgument, "warped pair rasters disagree in shape");
  }
  ImageBuffer out(l.width(), l.height(), l.channels());
  for (int y = 0; y < l.height(); ++y) {
    for (int x = 0; x < l.width(); ++x) {
      const ImageBuffer* src = nullptr;
      if (pair.m_wl.get(x, y)) {
        src = &l;
      } else if (pair.m_wr.get(x, y)) {
        src = &r;
      }
      if (src == nullptr) continue;
      for (int c = 0; c < l.channels(); ++c) out.at(x, y, c) = src->at(x, y, c);
    }
  }
  return out;
}

ImageBuffer coarse_rectangle(const ImageBuffer& i_cf, const BinaryMask& m_rect,
                             const StitchConfig& cfg) {
  if (i_cf.width() != m_rect.width() || i_cf.height() != m_rect.height()) {
    fail(ErrorCode::InvalidArgument, "rectangling mask does not match the fusion image");
  }
  if (cfg.ablation.disable_coarse_rectangling) return i_cf;
  return telea_inpaint(i_cf, m_rect, cfg.r_telea);
}

ImageBuffer pad_to_multiple(const ImageBuffer& img, int multiple) {
  const int w = (img.width() + multiple - 1) / multiple * multiple;
  const int h = (img.height() + multiple - 1) / multiple * multiple;
  if (w == img.width() && h == img.height()) return img;
  ImageBuffer out(w, h, img.channels());
  for (int y = 0; y < h; ++y) {
    const int sy = std::min(y, img.height() - 1);
    for (int x = 0; x < w; ++x) {
      const int sx = std::min(x, img.width() - 1);
      for (int c = 0; c < img.channels(); ++c) out.at(x, y, c) = img.at(sx, sy, c);
    }
  }
  return out;
}

WeightMask pad_to_multiple(const WeightMask& m, int multiple) {
  const int w = (m.width() + multiple - 1) / multiple * multiple;
  const int h = (m.height() + multiple - 1) / multiple * multiple;
  if (w == m.width() && h == m.height()) return m;
  WeightMask out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      out.set(x, y, m.get(std::min(x, m.width() - 1), std::min(y, m.height() - 1)));
    }
  }
  return out;
}

ImageBuffer crop(const ImageBuffer& img, int width, int height) {
  if (width > img.width() || height > img.height()) {
    fail(ErrorCode::BackendShapeMismatch, "decoded image is smaller than the working raster");
  }
  if (width == img.width() && height == img.height()) return img;
  ImageBuffer out(width, height, img.channels());
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < img.channels(); ++c) out.at(x, y, c) = img.at(x, y, c);
    }
  }
  return out;
}

WeightMask downsample_area(const WeightMask& m, int factor) {
  if (factor < 1 || m.width() % factor != 0 || m.height() % factor != 0) {
    fail(ErrorCode::InvalidArgument, "downsample factor must divide the mask size");
  }
  if (factor == 1) return m;
  const int w = m.width() / factor;
  const int h = m.height() / factor;
  const double area = static_cast<double>(factor) * factor;
  WeightMask out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double sum = 0.0;
      for (int dy = 0; dy < factor; ++dy) {
        for (int dx = 0; dx < factor; ++dx) sum += m.get(x * factor + dx, y * factor + dy);
      }
      out.set(x, y, std::clamp(sum / area, 0.0, 1.0));
    }
  }
  return out;
}

ImageBuffer run_wmgrp(const ImageBuffer& i_cfr, const MaskSet& masks, const StitchConfig& cfg,
                      InpaintBackend& backend, std::vector<BinaryMask>* step_masks) {
  validate_config(cfg);
  check_mask_shapes(i_cfr, masks);
  if (!masks.m_inpaint.any()) return i_cfr;

  const BackendCapabilities caps = backend.capabilities();
  validate_capabilities(caps);
  const int scale = caps.latent_scale;
  const int n = cfg.steps_n;
  if (caps.max_side > 0 && std::max(i_cfr.width(), i_cfr.height()) > caps.max_side) {
    fail(ErrorCode::BackendShapeMismatch, "image exceeds the backend's max_side");
  }

  const WeightMask init_w = cfg.ablation.disable_weighted_init
                                ? to_weights(masks.m_union_content)
                                : masks.w_init;
  const WeightMask inpaint_w = cfg.ablation.disable_weighted_inpaint
                                   ? to_weights(masks.m_inpaint)
                                   : masks.w_inpaint;

  const ImageBuffer work = as_rgb(i_cfr);
  const ImageBuffer work_padded = pad_to_multiple(work, scale);
  const ImageBuffer cond_padded = pad_to_multiple(multiply(work, init_w), scale);
  const WeightMask inpaint_small = downsample_area(pad_to_multiple(inpaint_w, scale), scale);
  const WeightMask init_small = downsample_area(pad_to_multiple(init_w, scale), scale);

  backend.begin_session(cfg.seed, n);
  const Latent x_n = backend.encode(work_padded);
  const Latent x_cond = backend.encode(cond_padded);
  if (!x_n.same_shape(x_cond) || x_n.w != inpaint_small.width() || x_n.h != inpaint_small.height()) {
    fail(ErrorCode::BackendShapeMismatch, "encoded latents disagree with the declared latent scale");
  }

  // Level N: conditioned on the init mask before the scheduled loop starts.
  Latent x_hat = backend.denoise_step(backend.add_noise(x_n, n, cfg.seed), init_small, x_cond,
                                      cfg.prompt, n, cfg.guidance_scale);
  for (int t = n - 1; t >= 0; --t) {
    const Latent noisy = backend.add_noise(x_hat, t, cfg.seed);
    BinaryMask m_t = step_mask(inpaint_small, t, n);
    x_hat = backend.denoise_step(noisy, to_weights(m_t), x_cond, cfg.prompt, t,
                                 cfg.guidance_scale);
    if (!x_hat.finite()) fail(ErrorCode::NonFiniteLatent, "denoise_step produced non-finite values");
    if (step_masks != nullptr) step_masks->push_back(std::move(m_t));
  }

  const ImageBuffer decoded =
      as_channels(crop(backend.decode(x_hat), i_cfr.width(), i_cfr.height()), i_cfr.channels());

  ImageBuffer out = i_cfr;
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      if (!masks.m_inpaint.get(x, y)) continue;
      for (int c = 0; c < out.channels(); ++c) out.at(x, y, c) = decoded.at(x, y, c);
    }
  }
  return out;
}

PipelineArtifacts prepare(WarpedPair pair, const StitchConfig& cfg) {
  validate_config(cfg);
  PipelineArtifacts art;
  StageClock clock(art.stage_seconds);
  art.pair = std::move(pair);
  art.coarse_fusion = coarse_fuse(art.pair);
  clock.lap("coarse_fusion");
  art.masks = build_masks(art.pair, cfg);
  clock.lap("masks");
  art.coarse_rectangling = coarse_rectangle(art.coarse_fusion, art.masks.m_rect, cfg);
  clock.lap("coarse_rectangling");
  return art;
}

PipelineArtifacts stitch_prealigned(WarpedPair pair, const StitchConfig& cfg,
                                    InpaintBackend& backend, const StitchOptions& options) {
  PipelineArtifacts art = prepare(std::move(pair), cfg);
  StageClock clock(art.stage_seconds);
  art.stitched = run_wmgrp(art.coarse_rectangling, art.masks, cfg, backend,
                           options.record_step_masks ? &art.per_step_masks : nullptr);
  clock.lap("reverse_process");
  return art;
}

PipelineArtifacts stitch(const ImageBuffer& i_l, const ImageBuffer& i_r, const Homography& h,
                         const StitchConfig& cfg, InpaintBackend& backend,
                         const StitchOptions& options) {
  validate_config(cfg);
  const auto start = std::chrono::steady_clock::now();
  WarpedPair pair = align_pair(i_l, i_r, h);
  const double align_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  PipelineArtifacts art = stitch_prealigned(std::move(pair), cfg, backend, options);
  art.stage_seconds.insert(art.stage_seconds.begin(), {"registration", align_s});
  return art;
}

}  // namespace unistitch
