#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace unistitch {

/// Design switches for the ablation study. Each flag removes one element.
struct AblationFlags {
  bool disable_coarse_rectangling = false;
  bool disable_weighted_init = false;
  bool disable_weighted_inpaint = false;

  friend bool operator==(const AblationFlags&, const AblationFlags&) = default;
};

/// Every tunable of a stitch job. Defaults are the published settings.
struct StitchConfig {
  double lambda = 200.0;   // seam-band divisor
  int delta = 10;          // seam-band multiplier
  int k_g = 3;             // distance-transform kernel (3 or 5)
  int r_telea = 20;        // coarse-rectangling neighborhood radius
  int eps1 = 128;          // seam-region inpainting strength, 0..255
  int eps2 = 128;          // rectangling-region inpainting strength, 0..255
  int steps_n = 50;        // reverse-process steps
  double guidance_scale = 7.5;
  std::uint64_t seed = 0;
  std::string prompt;      // empty: no prompt guidance
  AblationFlags ablation;

  friend bool operator==(const StitchConfig&, const StitchConfig&) = default;
};

/// Throws Error(InvalidConfig) naming the first violated field.
void validate_config(const StitchConfig& cfg);

/// Applies one `key = value` assignment. Keys match the CLI flag names
/// (lambda, delta, kg, radius, eps1, eps2, steps, guidance, seed, prompt,
/// no_coarse_rect, no_weighted_init, no_weighted_inpaint). Unknown keys and
/// unparsable values throw Error(InvalidConfig).
void apply_config_value(StitchConfig& cfg, const std::string& key, const std::string& value);

/// Parses a flat `key = value` file. Blank lines and `#` comments are skipped.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

StitchConfig load_config(const std::filesystem::path& path, StitchConfig base = {});

/// Flat key/value view, used for manifests and `--help` text.
std::map<std::string, std::string> config_to_map(const StitchConfig& cfg);

}  // namespace unistitch
