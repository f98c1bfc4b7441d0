#include "unistitch/remote_backend.hpp"

#include <algorithm>
#include <chrono>
#include <atomic>
#include <cmath>
#include <sstream>

#include <httplib.h>

#include "unistitch/error.hpp"
#include "unistitch/wire.hpp"

namespace unistitch {

using nlohmann::json;

Endpoint parse_endpoint(const std::string& url) {
  Endpoint ep;
  std::string rest = url;
  const auto scheme_end = rest.find("://");
  if (scheme_end != std::string::npos) {
    ep.scheme = rest.substr(0, scheme_end);
    rest = rest.substr(scheme_end + 3);
  }
  if (ep.scheme != "http") {
    fail(ErrorCode::InvalidArgument, "unsupported backend scheme '" + ep.scheme + "' in " + url);
  }
  const auto slash = rest.find('/');
  std::string authority = rest.substr(0, slash);
  if (slash != std::string::npos) ep.base_path = rest.substr(slash);
  while (!ep.base_path.empty() && ep.base_path.back() == '/') ep.base_path.pop_back();
  const auto colon = authority.rfind(':');
  if (colon != std::string::npos) {
    ep.host = authority.substr(0, colon);
    try {
      ep.port = std::stoi(authority.substr(colon + 1));
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidArgument, "invalid port in backend url " + url);
    }
    if (ep.port < 1 || ep.port > 65535) fail(ErrorCode::InvalidArgument, "port out of range in " + url);
  } else {
    ep.host = authority;
  }
  if (ep.host.empty()) fail(ErrorCode::InvalidArgument, "missing host in backend url " + url);
  return ep;
}

constexpr std::chrono::seconds kConnectTimeout{10};

struct HttpJsonClient::Impl {
  Endpoint endpoint;
  httplib::Client client;

  Impl(Endpoint ep, std::chrono::seconds timeout)
      : endpoint(std::move(ep)), client(endpoint.host, endpoint.port) {
    client.set_connection_timeout(std::min(timeout, kConnectTimeout));
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    client.set_keep_alive(true);
  }
};

HttpJsonClient::HttpJsonClient(const std::string& url, std::chrono::seconds timeout)
    : impl_(std::make_unique<Impl>(parse_endpoint(url), timeout)), url_(url) {}

HttpJsonClient::~HttpJsonClient() = default;
HttpJsonClient::HttpJsonClient(HttpJsonClient&&) noexcept = default;
HttpJsonClient& HttpJsonClient::operator=(HttpJsonClient&&) noexcept = default;

json HttpJsonClient::post(const std::string& path, const json& body) {
  const std::string target = impl_->endpoint.base_path + path;
  auto res = impl_->client.Post(target, body.dump(), "application/json");
  if (!res) {
    fail(ErrorCode::BackendUnavailable,
         "backend " + url_ + target + " unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status == 200) {
    try {
      return json::parse(res->body);
    } catch (const json::exception& e) {
      fail(ErrorCode::BackendShapeMismatch, "backend returned malformed JSON: " + std::string(e.what()));
    }
  }
  if (res->status == 422) {
    json err = json::parse(res->body, nullptr, false);
    if (err.is_object() && err.contains("code") && err["code"].is_string()) {
      fail(error_code_from_string(err["code"].get<std::string>()),
           "backend " + target + ": " + err.value("message", std::string{}));
    }
    fail(ErrorCode::BackendShapeMismatch, "backend " + target + " rejected the request");
  }
  fail(ErrorCode::BackendUnavailable,
       "backend " + target + " answered HTTP " + std::to_string(res->status));
}

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    fail(ErrorCode::BackendShapeMismatch, std::string("backend response lacks '") + key + "'");
  }
  return j[key];
}

std::string make_session_id(std::uint64_t seed) {
  static std::atomic<std::uint64_t> counter{0};
  std::ostringstream os;
  os << "s" << std::hex << seed << "-" << std::dec << counter.fetch_add(1);
  return os.str();
}

}  // namespace

RemoteBackend::RemoteBackend(const std::string& url, std::chrono::seconds timeout)
    : client_(url, timeout), session_id_(make_session_id(0)) {}

json RemoteBackend::request(const std::string& path, json body) {
  body["session_id"] = session_id_;
  body["seed"] = seed_;
  return client_.post(path, body);
}

void RemoteBackend::begin_session(std::uint64_t seed, int steps) {
  seed_ = seed;
  steps_ = steps;
  session_id_ = make_session_id(seed);
}

BackendCapabilities RemoteBackend::capabilities() {
  if (!have_caps_) {
    caps_ = wire::capabilities_from_json(request("/v1/capabilities", json::object()));
    validate_capabilities(caps_);
    have_caps_ = true;
  }
  return caps_;
}

void RemoteBackend::check_latent(const Latent& x, int expect_h, int expect_w) {
  if (x.channels != caps_.latent_channels || x.h != expect_h || x.w != expect_w) {
    fail(ErrorCode::BackendShapeMismatch,
         "backend returned latent " + std::to_string(x.channels) + "x" + std::to_string(x.h) +
             "x" + std::to_string(x.w) + ", expected " + std::to_string(caps_.latent_channels) +
             "x" + std::to_string(expect_h) + "x" + std::to_string(expect_w));
  }
  if (!x.finite()) fail(ErrorCode::NonFiniteLatent, "backend returned a non-finite latent");
}

Latent RemoteBackend::encode(const ImageBuffer& img) {
  const auto caps = capabilities();
  if (img.width() % caps.latent_scale != 0 || img.height() % caps.latent_scale != 0) {
    fail(ErrorCode::BackendShapeMismatch, "encode input is not a multiple of the latent scale");
  }
  const json res = request("/v1/encode", json{{"image", wire::image_to_json(img)}});
  Latent x = wire::tensor_from_json(field(res, "latent"));
  check_latent(x, img.height() / caps.latent_scale, img.width() / caps.latent_scale);
  return x;
}

Latent RemoteBackend::add_noise(const Latent& x, int t, std::uint64_t seed) {
  capabilities();
  json body{{"latent", wire::tensor_to_json(x)}, {"t", t}, {"steps", steps_}};
  body["seed"] = seed;
  body["session_id"] = session_id_;
  Latent out = wire::tensor_from_json(field(client_.post("/v1/add_noise", body), "latent"));
  check_latent(out, x.h, x.w);
  out.t = t;
  return out;
}

Latent RemoteBackend::denoise_step(const Latent& x, const WeightMask& mask_small,
                                   const Latent& x_cond, const std::string& prompt, int t,
                                   double guidance) {
  capabilities();
  if (!x.same_shape(x_cond) || mask_small.width() != x.w || mask_small.height() != x.h) {
    fail(ErrorCode::BackendShapeMismatch, "denoise_step: latent/mask shapes disagree");
  }
  const json res = request("/v1/denoise_step", json{{"latent", wire::tensor_to_json(x)},
                                                    {"mask", wire::mask_to_json(mask_small)},
                                                    {"cond", wire::tensor_to_json(x_cond)},
                                                    {"prompt", prompt},
                                                    {"t", t},
                                                    {"steps", steps_},
                                                    {"guidance", guidance}});
  Latent out = wire::tensor_from_json(field(res, "latent"));
  check_latent(out, x.h, x.w);
  out.t = t;
  return out;
}

ImageBuffer RemoteBackend::decode(const Latent& x) {
  const auto caps = capabilities();
  const json res = request("/v1/decode", json{{"latent", wire::tensor_to_json(x)}});
  ImageBuffer img = wire::image_from_json(field(res, "image"));
  if (img.width() != x.w * caps.latent_scale || img.height() != x.h * caps.latent_scale) {
    fail(ErrorCode::BackendShapeMismatch, "decoded image size does not match latent scale");
  }
  for (float& v : img.data()) {
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteLatent, "backend decoded non-finite pixels");
    v = std::clamp(v, 0.0F, 1.0F);
  }
  return img;
}

}  // namespace unistitch
