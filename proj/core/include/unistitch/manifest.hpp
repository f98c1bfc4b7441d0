#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "unistitch/backend.hpp"
#include "unistitch/config.hpp"

namespace unistitch {

struct InputHash {
  std::string role;    // left, right, homography, warp1, ...
  std::string path;
  std::string sha256;  // lowercase hex

  friend bool operator==(const InputHash&, const InputHash&) = default;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;

  friend bool operator==(const StageTiming&, const StageTiming&) = default;
};

/// Reproducibility record written as `manifest.json` next to the outputs.
struct RunManifest {
  std::string tool_version;
  std::string mode;  // homography | prealigned
  StitchConfig config;
  std::vector<InputHash> inputs;
  BackendCapabilities backend;
  std::string backend_url;  // empty for the in-process reference backend
  std::vector<StageTiming> timings;

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

/// Equality ignoring wall-clock timings.
bool same_run(const RunManifest& a, const RunManifest& b);

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_file(const std::filesystem::path& path);

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& dir);

std::string version_string();

}  // namespace unistitch
