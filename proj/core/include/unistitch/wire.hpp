#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "unistitch/backend.hpp"
#include "unistitch/error.hpp"
#include "unistitch/image.hpp"

// JSON encodings shared by the remote backend client and the sidecar server.
namespace unistitch::wire {

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// `{shape: [c,h,w], dtype: "f32le", data: base64}`.
nlohmann::json tensor_to_json(const Latent& x);
Latent tensor_from_json(const nlohmann::json& j);

/// Images travel as tensors of shape [c,h,w] (channel planes).
nlohmann::json image_to_json(const ImageBuffer& img);
ImageBuffer image_from_json(const nlohmann::json& j);

/// Weight masks travel as tensors of shape [1,h,w].
nlohmann::json mask_to_json(const WeightMask& m);
WeightMask mask_from_json(const nlohmann::json& j);

nlohmann::json capabilities_to_json(const BackendCapabilities& caps);
BackendCapabilities capabilities_from_json(const nlohmann::json& j);

nlohmann::json error_body(ErrorCode code, std::string_view message);

}  // namespace unistitch::wire
