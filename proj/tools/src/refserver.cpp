#include <csignal>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "unistitch/backend.hpp"
#include "unistitch/metrics.hpp"
#include "unistitch/wire_server.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Reference sidecar: the model-free backend and fingerprint provider over HTTP"};
  std::string host = "127.0.0.1";
  int port = 8765;
  app.add_option("--host", host, "Bind address")->capture_default_str();
  app.add_option("--port", port, "Port (0 picks a free one)")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  // Block termination signals before the worker thread exists so that
  // only sigwait below sees them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  unistitch::WireServer server(
      [] { return std::make_unique<unistitch::ReferenceBackend>(); },
      std::make_shared<unistitch::FingerprintProvider>());
  try {
    server.start(host, port);
  } catch (const std::exception& e) {
    std::cerr << "unistitch-refserver: " << e.what() << '\n';
    return 1;
  }
  std::cout << "listening on " << server.url() << std::endl;
  int received = 0;
  sigwait(&signals, &received);
  server.stop();
  return 0;
}
