#pragma once

#include <chrono>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "unistitch/backend.hpp"

namespace unistitch {

/// Parsed `http://host:port` endpoint.
struct Endpoint {
  std::string scheme = "http";
  std::string host;
  int port = 80;
  std::string base_path;  // prefix before /v1/...
};

Endpoint parse_endpoint(const std::string& url);

/// Blocking JSON-over-HTTP client for the sidecar protocol.
class HttpJsonClient {
 public:
  explicit HttpJsonClient(const std::string& url,
                          std::chrono::seconds timeout = std::chrono::seconds(120));
  ~HttpJsonClient();
  HttpJsonClient(HttpJsonClient&&) noexcept;
  HttpJsonClient& operator=(HttpJsonClient&&) noexcept;

  /// POSTs `body` to base_path + path. Connection failures and 5xx map to
  /// BackendUnavailable; 422 bodies map to their declared error code.
  nlohmann::json post(const std::string& path, const nlohmann::json& body);

  [[nodiscard]] const std::string& url() const noexcept { return url_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::string url_;
};

/// Backend reached through `/v1/{capabilities,encode,add_noise,denoise_step,decode}`.
/// Every request carries the session id and seed set by begin_session.
class RemoteBackend final : public InpaintBackend {
 public:
  explicit RemoteBackend(const std::string& url,
                         std::chrono::seconds timeout = std::chrono::seconds(120));

  BackendCapabilities capabilities() override;
  Latent encode(const ImageBuffer& img) override;
  Latent add_noise(const Latent& x, int t, std::uint64_t seed) override;
  Latent denoise_step(const Latent& x, const WeightMask& mask_small, const Latent& x_cond,
                      const std::string& prompt, int t, double guidance) override;
  ImageBuffer decode(const Latent& x) override;
  void begin_session(std::uint64_t seed, int steps) override;

 private:
  nlohmann::json request(const std::string& path, nlohmann::json body);
  void check_latent(const Latent& x, int expect_h, int expect_w);

  HttpJsonClient client_;
  std::string session_id_;
  std::uint64_t seed_ = 0;
  int steps_ = 0;
  BackendCapabilities caps_;
  bool have_caps_ = false;
};

}  // namespace unistitch
