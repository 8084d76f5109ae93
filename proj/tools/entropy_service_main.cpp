// entropy-service: HTTP backend serving GET /random_number/{num_bytes}.
#include "qeaas/service/service.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <thread>

namespace {
std::atomic<bool> g_stop{false};
void on_signal(int) { g_stop = true; }
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QEaaS entropy backend (HTTP)"};
  std::string mode_str = "mixed";
  std::string stream_file;
  uint64_t seed = 0;
  uint16_t port = 6065;
  std::string bind = "0.0.0.0";
  app.add_option("--mode", mode_str, "entropy source: direct | mixed | test")
      ->check(CLI::IsMember({"direct", "mixed", "test"}))
      ->capture_default_str();
  app.add_option("--stream-file", stream_file, "QRNG byte-stream file (direct mode)");
  app.add_option("--seed", seed, "deterministic stream seed (test mode)")
      ->capture_default_str();
  app.add_option("--port", port, "listen port (0 = ephemeral)")->capture_default_str();
  app.add_option("--bind", bind, "bind address")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  qeaas::service::ServiceConfig config;
  config.mode = *qeaas::service::mode_from_string(mode_str);
  config.stream_file = stream_file;
  config.seed = seed;
  config.port = port;
  config.bind_addr = bind;
  if (config.mode == qeaas::service::ServiceMode::Direct && stream_file.empty()) {
    std::fprintf(stderr, "error: --mode direct requires --stream-file\n");
    return 64;
  }

  try {
    qeaas::service::EntropyService service(config);
    service.start();
    std::printf("entropy-service listening on %s:%u (mode=%s)\n", bind.c_str(),
                static_cast<unsigned>(service.port()), mode_str.c_str());
    std::fflush(stdout);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    service.stop();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
