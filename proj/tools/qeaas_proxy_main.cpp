// qeaas-proxy: CoAP→HTTP forwarding proxy, plain CoAP + secure channel.
#include "qeaas/crypto/random.hpp"
#include "qeaas/proxy/proxy.hpp"

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
  CLI::App app{"QEaaS CoAP-to-HTTP forwarding proxy"};
  qeaas::proxy::ProxyConfig config;
  std::string kex = "mlkem512", sig = "mldsa44", verify = "full-chain";
  std::string cert_file, key_file, write_anchor, cookie_secret_hex;
  app.add_option("--coap-port", config.coap_port, "plain CoAP UDP port (0 = ephemeral)")
      ->capture_default_str();
  app.add_option("--coaps-port", config.coaps_port, "secure CoAP UDP port (0 = ephemeral)")
      ->capture_default_str();
  app.add_option("--bind", config.bind_addr, "bind address")->capture_default_str();
  app.add_option("--backend-timeout-ms", config.backend_timeout_ms, "HTTP fetch deadline")
      ->capture_default_str();
  app.add_option("--allow-prefix", config.backend_allow_prefix,
                 "only forward Proxy-Uri values with this prefix");
  app.add_option("--kex", kex, "key exchange: mlkem512 | x25519 | p256")
      ->capture_default_str();
  app.add_option("--sig", sig, "signature: mldsa44 | ecdsa-p256")->capture_default_str();
  app.add_option("--verify", verify, "client verification mode: no-verify | full-chain")
      ->capture_default_str();
  app.add_option("--mtu", config.handshake.mtu_bytes, "datagram MTU")->capture_default_str();
  app.add_flag("!--no-force-hrr", config.handshake.force_hrr,
               "skip the cookie round trip (accept ClientHello without HelloRetry)");
  app.add_option("--cert", cert_file, "server certificate chain (PEM)");
  app.add_option("--key", key_file, "server private key (PEM)");
  app.add_option("--write-anchor", write_anchor,
                 "with an ephemeral identity, write the CA certificate here");
  app.add_option("--cookie-secret-hex", cookie_secret_hex,
                 "32-byte cookie secret as hex (default: random)");
  app.add_option("--workers", config.worker_threads, "backend worker threads")
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  auto kex_alg = qeaas::pqch::kex_from_string(kex);
  auto sig_alg = qeaas::pqch::sig_from_string(sig);
  auto verify_mode = qeaas::pqch::verify_from_string(verify);
  if (!kex_alg || !sig_alg || !verify_mode) {
    std::fprintf(stderr, "error: unknown --kex/--sig/--verify value\n");
    return 64;
  }
  if (cert_file.empty() != key_file.empty()) {
    std::fprintf(stderr, "error: --cert and --key must be given together\n");
    return 64;
  }
  config.handshake.kex = *kex_alg;
  config.handshake.sig = *sig_alg;
  config.handshake.verify_mode = *verify_mode;

  try {
    if (!cert_file.empty()) {
      config.key_store.chain =
          qeaas::pqch::cert_chain_from_pem(qeaas::pqch::load_text_file(cert_file));
      auto [alg, key] = qeaas::pqch::private_key_from_pem(qeaas::pqch::load_text_file(key_file));
      config.key_store.sig_alg = alg;
      config.key_store.private_key = std::move(key);
      config.key_store.cookie_secret = qeaas::crypto::os_random(32);
    } else {
      auto pki = qeaas::pqch::make_test_pki(*sig_alg);
      config.key_store = std::move(pki.store);
      if (!write_anchor.empty())
        qeaas::pqch::save_text_file(write_anchor,
                                    qeaas::pqch::cert_chain_to_pem({pki.trust_anchor}));
    }
    if (!cookie_secret_hex.empty())
      config.key_store.cookie_secret = qeaas::hex_decode(cookie_secret_hex);

    qeaas::proxy::Proxy proxy(config);
    proxy.start();
    std::printf("qeaas-proxy listening on %s: coap=%u coaps=%u (%s %s %s)\n",
                config.bind_addr.c_str(), static_cast<unsigned>(proxy.coap_port()),
                static_cast<unsigned>(proxy.coaps_port()), kex.c_str(), sig.c_str(),
                verify.c_str());
    std::fflush(stdout);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    proxy.stop();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
