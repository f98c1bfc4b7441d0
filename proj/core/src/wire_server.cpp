#include "unistitch/wire_server.hpp"

#include <map>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "unistitch/error.hpp"
#include "unistitch/io.hpp"
#include "unistitch/metrics.hpp"
#include "unistitch/wire.hpp"

namespace unistitch {

using nlohmann::json;

struct WireServer::Impl {
  BackendFactory factory;
  std::shared_ptr<ContentProvider> provider;
  httplib::Server server;
  std::thread thread;
  std::string host = "127.0.0.1";
  int port = 0;

  // One worker: requests are handled one at a time in arrival order.
  std::mutex mutex;
  std::map<std::string, std::unique_ptr<InpaintBackend>> sessions;

  InpaintBackend& session(const json& body) {
    const std::string id = body.value("session_id", std::string{"default"});
    auto it = sessions.find(id);
    if (it == sessions.end()) it = sessions.emplace(id, factory()).first;
    return *it->second;
  }

  static const json& field(const json& j, const char* key) {
    if (!j.contains(key)) {
      fail(ErrorCode::InvalidArgument, std::string("request lacks '") + key + "'");
    }
    return j[key];
  }

  json dispatch(const std::string& route, const json& body) {
    if (route == "describe") {
      if (!provider) fail(ErrorCode::BackendUnavailable, "no content provider loaded");
      const auto png = wire::base64_decode(field(body, "image_png").get<std::string>());
      const Embedding e = provider->describe(decode_image(png));
      return json{{"dim", e.dim()}, {"values", e.values}};
    }
    InpaintBackend& backend = session(body);
    const auto seed = body.value("seed", std::uint64_t{0});
    if (route == "capabilities") return wire::capabilities_to_json(backend.capabilities());
    if (route == "encode") {
      return json{{"latent", wire::tensor_to_json(
                                 backend.encode(wire::image_from_json(field(body, "image"))))}};
    }
    if (route == "add_noise") {
      const Latent x = wire::tensor_from_json(field(body, "latent"));
      return json{{"latent", wire::tensor_to_json(
                                 backend.add_noise(x, field(body, "t").get<int>(), seed))}};
    }
    if (route == "denoise_step") {
      const Latent x = wire::tensor_from_json(field(body, "latent"));
      const Latent cond = wire::tensor_from_json(field(body, "cond"));
      const WeightMask mask = wire::mask_from_json(field(body, "mask"));
      return json{{"latent", wire::tensor_to_json(backend.denoise_step(
                                 x, mask, cond, body.value("prompt", std::string{}),
                                 field(body, "t").get<int>(), body.value("guidance", 7.5)))}};
    }
    if (route == "decode") {
      return json{{"image", wire::image_to_json(
                                backend.decode(wire::tensor_from_json(field(body, "latent"))))}};
    }
    fail(ErrorCode::InvalidArgument, "unknown route " + route);
  }

  void install() {
    for (const char* route :
         {"capabilities", "encode", "add_noise", "denoise_step", "decode", "describe"}) {
      const std::string name = route;
      server.Post("/v1/" + name, [this, name](const httplib::Request& req, httplib::Response& res) {
        std::lock_guard lock(mutex);
        try {
          const json body = json::parse(req.body);
          res.set_content(dispatch(name, body).dump(), "application/json");
        } catch (const Error& e) {
          res.status = e.code() == ErrorCode::BackendUnavailable ? 503 : 422;
          res.set_content(wire::error_body(e.code(), e.what()).dump(), "application/json");
        } catch (const json::exception& e) {
          res.status = 422;
          res.set_content(wire::error_body(ErrorCode::InvalidArgument, e.what()).dump(),
                          "application/json");
        }
      });
    }
  }
};

WireServer::WireServer(BackendFactory factory, std::shared_ptr<ContentProvider> provider)
    : impl_(std::make_unique<Impl>()) {
  impl_->factory = std::move(factory);
  impl_->provider = std::move(provider);
  impl_->install();
}

WireServer::~WireServer() { stop(); }

int WireServer::start(const std::string& host, int port) {
  impl_->host = host;
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
  } else {
    impl_->port = impl_->server.bind_to_port(host, port) ? port : -1;
  }
  if (impl_->port <= 0) fail(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->port;
}

void WireServer::listen(const std::string& host, int port) {
  impl_->host = host;
  impl_->port = port;
  if (!impl_->server.listen(host, port)) {
    fail(ErrorCode::Io, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

void WireServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string WireServer::url() const {
  return "http://" + impl_->host + ":" + std::to_string(impl_->port);
}

int WireServer::port() const noexcept { return impl_->port; }

}  // namespace unistitch
