#include "unistitch/backend.hpp"

#include <algorithm>
#include <cmath>

#include "unistitch/error.hpp"

namespace unistitch {

void validate_capabilities(const BackendCapabilities& caps) {
  if (caps.latent_scale < 1) fail(ErrorCode::BackendShapeMismatch, "latent_scale must be >= 1");
  if (caps.latent_channels < 1) {
    fail(ErrorCode::BackendShapeMismatch, "latent_channels must be >= 1");
  }
  if (!(caps.roundtrip_tolerance >= 0.0 && caps.roundtrip_tolerance < 1.0)) {
    fail(ErrorCode::BackendShapeMismatch, "roundtrip_tolerance must lie in [0,1)");
  }
}

bool Latent::finite() const noexcept {
  return std::all_of(data.begin(), data.end(), [](float v) { return std::isfinite(v); });
}

BackendCapabilities ReferenceBackend::capabilities() {
  BackendCapabilities caps;
  caps.latent_scale = 1;
  caps.latent_channels = 3;
  caps.max_side = 0;
  caps.supports_guidance = false;
  caps.roundtrip_tolerance = 0.0;
  caps.name = "reference";
  caps.solver = "zero-noise; 10 Jacobi iterations of 4-neighbor mean over inpaint cells";
  return caps;
}

Latent ReferenceBackend::encode(const ImageBuffer& img) {
  const int channels = img.channels();
  Latent x(3, img.height(), img.width());
  for (int y = 0; y < img.height(); ++y) {
    for (int px = 0; px < img.width(); ++px) {
      for (int c = 0; c < 3; ++c) x.at(c, y, px) = img.at(px, y, channels == 3 ? c : 0);
    }
  }
  return x;
}

Latent ReferenceBackend::add_noise(const Latent& x, int t, std::uint64_t /*seed*/) {
  Latent out = x;
  out.t = t;
  return out;
}

Latent ReferenceBackend::denoise_step(const Latent& x, const WeightMask& mask_small,
                                      const Latent& x_cond, const std::string& /*prompt*/, int t,
                                      double /*guidance*/) {
  if (!x.same_shape(x_cond) || mask_small.width() != x.w || mask_small.height() != x.h) {
    fail(ErrorCode::BackendShapeMismatch, "denoise_step: latent/mask shapes disagree");
  }
  if (!x.finite() || !x_cond.finite()) {
    fail(ErrorCode::NonFiniteLatent, "denoise_step: non-finite latent input");
  }
  const int h = x.h;
  const int w = x.w;
  // Cells start from the current estimate where they are inpainted and from
  // the conditioning latent where they are retained.
  Latent cur = x;
  for (int c = 0; c < x.channels; ++c) {
    for (int y = 0; y < h; ++y) {
      for (int px = 0; px < w; ++px) {
        const double m = mask_small.get(px, y);
        if (m == 0.0) cur.at(c, y, px) = x_cond.at(c, y, px);
      }
    }
  }
  Latent next = cur;
  for (int iter = 0; iter < kSmoothingIterations; ++iter) {
    for (int c = 0; c < x.channels; ++c) {
      for (int y = 0; y < h; ++y) {
        for (int px = 0; px < w; ++px) {
          const double m = mask_small.get(px, y);
          if (m == 0.0) {
            next.at(c, y, px) = x_cond.at(c, y, px);
            continue;
          }
          double sum = 0.0;
          int count = 0;
          if (px > 0) sum += cur.at(c, y, px - 1), ++count;
          if (px + 1 < w) sum += cur.at(c, y, px + 1), ++count;
          if (y > 0) sum += cur.at(c, y - 1, px), ++count;
          if (y + 1 < h) sum += cur.at(c, y + 1, px), ++count;
          const double avg = count > 0 ? sum / count : cur.at(c, y, px);
          next.at(c, y, px) = static_cast<float>((1.0 - m) * x_cond.at(c, y, px) + m * avg);
        }
      }
    }
    std::swap(cur, next);
  }
  cur.t = t;
  return cur;
}

ImageBuffer ReferenceBackend::decode(const Latent& x) {
  if (x.channels != 3) fail(ErrorCode::BackendShapeMismatch, "reference decode expects 3 channels");
  ImageBuffer img(x.w, x.h, 3);
  for (int y = 0; y < x.h; ++y) {
    for (int px = 0; px < x.w; ++px) {
      for (int c = 0; c < 3; ++c) img.at(px, y, c) = std::clamp(x.at(c, y, px), 0.0F, 1.0F);
    }
  }
  return img;
}

HandshakeReport handshake(InpaintBackend& backend) {
  HandshakeReport report;
  report.caps = backend.capabilities();
  validate_capabilities(report.caps);
  const int side = 4 * report.caps.latent_scale;
  ImageBuffer probe(side * 2, side, 3);
  for (int y = 0; y < probe.height(); ++y) {
    for (int x = 0; x < probe.width(); ++x) {
      probe.at(x, y, 0) = static_cast<float>(x) / static_cast<float>(probe.width());
      probe.at(x, y, 1) = static_cast<float>(y) / static_cast<float>(probe.height());
      probe.at(x, y, 2) = 0.5F;
    }
  }
  const Latent z = backend.encode(probe);
  if (z.channels != report.caps.latent_channels || z.w * report.caps.latent_scale != probe.width() ||
      z.h * report.caps.latent_scale != probe.height()) {
    fail(ErrorCode::BackendShapeMismatch, "encode returned a latent inconsistent with capabilities");
  }
  const ImageBuffer back = backend.decode(z);
  if (back.width() != probe.width() || back.height() != probe.height() || back.channels() != 3) {
    fail(ErrorCode::BackendShapeMismatch, "decode returned an image of the wrong shape");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < back.data().size(); ++i) {
    worst = std::max(worst, static_cast<double>(std::abs(back.data()[i] - probe.data()[i])));
  }
  report.measured_roundtrip_error = worst;
  if (worst > report.caps.roundtrip_tolerance + 1e-6) {
    fail(ErrorCode::BackendShapeMismatch,
         "measured round-trip error " + std::to_string(worst) + " exceeds declared tolerance " +
             std::to_string(report.caps.roundtrip_tolerance));
  }
  return report;
}

}  // namespace unistitch
