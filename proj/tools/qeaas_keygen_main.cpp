// qeaas-keygen: generate a CA + server identity for the secure channel.
#include "qeaas/pqch/cert.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>

int main(int argc, char** argv) {
  CLI::App app{"QEaaS certificate/key generator"};
  std::string sig = "mldsa44", server_name = "qeaas-proxy", out_dir = ".";
  app.add_option("--sig", sig, "signature algorithm: mldsa44 | ecdsa-p256")
      ->capture_default_str();
  app.add_option("--server-name", server_name, "server certificate subject")
      ->capture_default_str();
  app.add_option("--out-dir", out_dir, "where to write ca.pem / server-chain.pem / server-key.pem")
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  auto sig_alg = qeaas::pqch::sig_from_string(sig);
  if (!sig_alg) {
    std::fprintf(stderr, "error: unknown --sig value\n");
    return 64;
  }

  try {
    std::filesystem::create_directories(out_dir);
    auto pki = qeaas::pqch::make_test_pki(*sig_alg, server_name);
    auto path = [&](const char* name) {
      return (std::filesystem::path(out_dir) / name).string();
    };
    qeaas::pqch::save_text_file(path("ca.pem"),
                                qeaas::pqch::cert_chain_to_pem({pki.trust_anchor}));
    qeaas::pqch::save_text_file(path("server-chain.pem"),
                                qeaas::pqch::cert_chain_to_pem(pki.store.chain));
    qeaas::pqch::save_text_file(
        path("server-key.pem"),
        qeaas::pqch::private_key_to_pem(pki.store.sig_alg, pki.store.private_key));
    std::printf("wrote %s, %s, %s\n", path("ca.pem").c_str(), path("server-chain.pem").c_str(),
                path("server-key.pem").c_str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
