#pragma once

#include <functional>
#include <memory>
#include <string>

#include "unistitch/backend.hpp"

namespace unistitch {

class ContentProvider;

/// In-process HTTP server speaking the sidecar protocol on top of any
/// InpaintBackend (and optionally a ContentProvider for `/v1/describe`).
/// Used by the reference sidecar tool and by the protocol tests.
class WireServer {
 public:
  using BackendFactory = std::function<std::unique_ptr<InpaintBackend>()>;

  WireServer(BackendFactory factory, std::shared_ptr<ContentProvider> provider = nullptr);
  ~WireServer();
  WireServer(const WireServer&) = delete;
  WireServer& operator=(const WireServer&) = delete;

  /// Binds to host:port (port 0 picks a free port) and serves on a
  /// background thread. Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Serves on the calling thread until stop().
  void listen(const std::string& host, int port);
  void stop();

  [[nodiscard]] std::string url() const;
  [[nodiscard]] int port() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace unistitch
