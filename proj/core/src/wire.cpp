#include "unistitch/wire.hpp"

#include <bit>
#include <cstring>

#include <openssl/evp.h>

namespace unistitch::wire {
namespace {

static_assert(std::endian::native == std::endian::little,
              "f32le tensors are copied without byte swapping");

using nlohmann::json;

std::vector<int> read_shape(const json& j) {
  if (!j.is_object() || !j.contains("shape") || !j.contains("data") || !j.contains("dtype")) {
    fail(ErrorCode::BackendShapeMismatch, "tensor needs shape, dtype and data");
  }
  if (j["dtype"] != "f32le") fail(ErrorCode::BackendShapeMismatch, "tensor dtype must be f32le");
  const auto& shape = j["shape"];
  if (!shape.is_array() || shape.size() != 3) {
    fail(ErrorCode::BackendShapeMismatch, "tensor shape must be [c,h,w]");
  }
  std::vector<int> dims;
  for (const auto& d : shape) {
    if (!d.is_number_integer() || d.get<long long>() < 0 || d.get<long long>() > (1LL << 20)) {
      fail(ErrorCode::BackendShapeMismatch, "tensor shape entries must be small non-negative integers");
    }
    dims.push_back(d.get<int>());
  }
  return dims;
}

std::vector<float> read_floats(const json& j, std::size_t expected) {
  const auto bytes = base64_decode(j["data"].get<std::string>());
  if (bytes.size() != expected * sizeof(float)) {
    fail(ErrorCode::BackendShapeMismatch, "tensor data length does not match its shape");
  }
  std::vector<float> out(expected);
  std::memcpy(out.data(), bytes.data(), bytes.size());
  return out;
}

json make_tensor(int c, int h, int w, std::span<const float> values) {
  const auto* raw = reinterpret_cast<const std::uint8_t*>(values.data());
  return json{{"shape", {c, h, w}},
              {"dtype", "f32le"},
              {"data", base64_encode({raw, values.size() * sizeof(float)})}};
}

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) fail(ErrorCode::BackendShapeMismatch, "malformed base64 payload");
  std::vector<std::uint8_t> out(3 * (text.size() / 4));
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) fail(ErrorCode::BackendShapeMismatch, "malformed base64 payload");
  std::size_t padding = 0;
  if (!text.empty() && text.back() == '=') ++padding;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++padding;
  out.resize(static_cast<std::size_t>(n) - padding);
  return out;
}

json tensor_to_json(const Latent& x) {
  json j = make_tensor(x.channels, x.h, x.w, x.data);
  j["t"] = x.t;
  return j;
}

Latent tensor_from_json(const json& j) {
  const auto dims = read_shape(j);
  Latent x;
  x.channels = dims[0];
  x.h = dims[1];
  x.w = dims[2];
  x.data = read_floats(j, static_cast<std::size_t>(dims[0]) * dims[1] * dims[2]);
  if (j.contains("t") && j["t"].is_number_integer()) x.t = j["t"].get<int>();
  return x;
}

json image_to_json(const ImageBuffer& img) {
  const int c = img.channels();
  const int h = img.height();
  const int w = img.width();
  std::vector<float> planes(img.data().size());
  for (int ch = 0; ch < c; ++ch) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        planes[(static_cast<std::size_t>(ch) * h + y) * w + x] = img.at(x, y, ch);
      }
    }
  }
  return make_tensor(c, h, w, planes);
}

ImageBuffer image_from_json(const json& j) {
  const auto dims = read_shape(j);
  const int c = dims[0];
  const int h = dims[1];
  const int w = dims[2];
  if (c != 1 && c != 3) fail(ErrorCode::BackendShapeMismatch, "images carry 1 or 3 channels");
  const auto planes = read_floats(j, static_cast<std::size_t>(c) * h * w);
  ImageBuffer img(w, h, c);
  for (int ch = 0; ch < c; ++ch) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        img.at(x, y, ch) = planes[(static_cast<std::size_t>(ch) * h + y) * w + x];
      }
    }
  }
  return img;
}

json mask_to_json(const WeightMask& m) {
  std::vector<float> values(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) values[i] = static_cast<float>(m[i]);
  return make_tensor(1, m.height(), m.width(), values);
}

WeightMask mask_from_json(const json& j) {
  const auto dims = read_shape(j);
  if (dims[0] != 1) fail(ErrorCode::BackendShapeMismatch, "mask tensors have one channel");
  const auto values = read_floats(j, static_cast<std::size_t>(dims[1]) * dims[2]);
  WeightMask m(dims[2], dims[1]);
  for (std::size_t i = 0; i < values.size(); ++i) m[i] = values[i];
  return m;
}

json capabilities_to_json(const BackendCapabilities& caps) {
  return json{{"latent_scale", caps.latent_scale},
              {"latent_channels", caps.latent_channels},
              {"max_side", caps.max_side},
              {"supports_guidance", caps.supports_guidance},
              {"roundtrip_tolerance", caps.roundtrip_tolerance},
              {"name", caps.name},
              {"solver", caps.solver}};
}

BackendCapabilities capabilities_from_json(const json& j) {
  BackendCapabilities caps;
  try {
    caps.latent_scale = j.at("latent_scale").get<int>();
    caps.latent_channels = j.at("latent_channels").get<int>();
    caps.max_side = j.value("max_side", 0);
    caps.supports_guidance = j.value("supports_guidance", false);
    caps.roundtrip_tolerance = j.at("roundtrip_tolerance").get<double>();
    caps.name = j.value("name", std::string{});
    caps.solver = j.value("solver", std::string{});
  } catch (const json::exception& e) {
    fail(ErrorCode::BackendShapeMismatch, std::string("malformed capabilities: ") + e.what());
  }
  return caps;
}

json error_body(ErrorCode code, std::string_view message) {
  return json{{"code", std::string(to_string(code))}, {"message", std::string(message)}};
}

}  // namespace unistitch::wire
