#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "unistitch/image.hpp"

namespace unistitch {

struct BackendCapabilities {
  int latent_scale = 1;     // pixels per latent cell
  int latent_channels = 3;
  int max_side = 0;         // 0: unbounded
  bool supports_guidance = false;
  double roundtrip_tolerance = 0.0;  // max per-pixel decode(encode(x)) error, [0,1] scale
  std::string name;
  std::string solver;       // free-form description of the denoising step

  friend bool operator==(const BackendCapabilities&, const BackendCapabilities&) = default;
};

/// Throws BackendShapeMismatch when a capability invariant is violated.
void validate_capabilities(const BackendCapabilities& caps);

/// channels x h x w tensor, row-major (channel planes).
struct Latent {
  int channels = 0;
  int h = 0;
  int w = 0;
  std::vector<float> data;
  int t = 0;

  Latent() = default;
  Latent(int c, int height, int width, float fill = 0.0F)
      : channels(c), h(height), w(width),
        data(static_cast<std::size_t>(c) * height * width, fill) {}

  [[nodiscard]] float& at(int c, int y, int x) noexcept {
    return data[(static_cast<std::size_t>(c) * h + y) * w + x];
  }
  [[nodiscard]] float at(int c, int y, int x) const noexcept {
    return data[(static_cast<std::size_t>(c) * h + y) * w + x];
  }
  [[nodiscard]] bool same_shape(const Latent& o) const noexcept {
    return channels == o.channels && h == o.h && w == o.w;
  }
  [[nodiscard]] bool finite() const noexcept;

  friend bool operator==(const Latent&, const Latent&) = default;
};

/// The four reverse-process primitives plus the capability handshake.
/// Implementations are pure functions of (arguments, seed).
class InpaintBackend {
 public:
  virtual ~InpaintBackend() = default;

  virtual BackendCapabilities capabilities() = 0;
  virtual Latent encode(const ImageBuffer& img) = 0;
  virtual Latent add_noise(const Latent& x, int t, std::uint64_t seed) = 0;
  /// `mask_small` holds per-cell inpaint weights at latent resolution
  /// (1 = inpaint, 0 = retain `x_cond`).
  virtual Latent denoise_step(const Latent& x, const WeightMask& mask_small,
                              const Latent& x_cond, const std::string& prompt, int t,
                              double guidance) = 0;
  virtual ImageBuffer decode(const Latent& x) = 0;

  /// Starts a new reverse trajectory of `steps` steps. Remote sessions pin
  /// their RNG and timestep table here.
  virtual void begin_session(std::uint64_t seed, int steps) {
    (void)seed;
    (void)steps;
  }
};

/// Model-free backend: identity codec, zero noise, and a smoothing fill
/// (retained cells copied from x_cond, inpaint cells replaced by the mean
/// of their in-bounds 4-neighbors, 10 Jacobi iterations seeded from x).
class ReferenceBackend final : public InpaintBackend {
 public:
  static constexpr int kSmoothingIterations = 10;

  BackendCapabilities capabilities() override;
  Latent encode(const ImageBuffer& img) override;
  Latent add_noise(const Latent& x, int t, std::uint64_t seed) override;
  Latent denoise_step(const Latent& x, const WeightMask& mask_small, const Latent& x_cond,
                      const std::string& prompt, int t, double guidance) override;
  ImageBuffer decode(const Latent& x) override;
};

/// Outcome of the capability handshake.
struct HandshakeReport {
  BackendCapabilities caps;
  double measured_roundtrip_error = 0.0;
};

/// Validates capabilities and measures decode(encode(probe)) error on a
/// smooth synthetic probe. Throws BackendShapeMismatch if the decoded shape
/// is wrong or the error exceeds the declared tolerance.
HandshakeReport handshake(InpaintBackend& backend);

}  // namespace unistitch
