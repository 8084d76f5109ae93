// qeaas-client: fetch entropy through the proxy and run the benchmark loops.
//
// Exit codes: 0 success, 2 transport, 3 handshake, 4 backend error response,
// 5 JSON parse, 6 hex decode, 64 usage, 1 anything else.
#include "qeaas/bench/runner.hpp"
#include "qeaas/report/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace {

int exit_code_for(const qeaas::bench::FetchError& e) {
  using K = qeaas::bench::FetchError::Kind;
  switch (e.kind) {
    case K::Transport: return 2;
    case K::Handshake: return 3;
    case K::Backend: return 4;
    case K::Json: return 5;
    case K::Hex: return 6;
  }
  return 1;
}

nlohmann::json summary_json(const std::vector<qeaas::bench::BenchRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& g : qeaas::report::summarize_rows(rows)) {
    out.push_back({{"config", g.key.config},
                   {"kex", g.key.kex},
                   {"sig", g.key.sig},
                   {"verify", g.key.verify},
                   {"transport", g.key.transport},
                   {"op", g.key.op},
                   {"size_bytes", g.key.size_bytes},
                   {"n", g.stats.n},
                   {"failed", g.failed},
                   {"mean_us", g.stats.mean},
                   {"std_us", g.stats.stddev},
                   {"sem_us", g.stats.sem},
                   {"min_us", g.min_us},
                   {"max_us", g.max_us}});
  }
  return out;
}

void write_outputs(const std::string& out_dir, const std::string& stem,
                   const std::vector<qeaas::bench::BenchRow>& rows) {
  std::filesystem::create_directories(out_dir);
  auto base = std::filesystem::path(out_dir) / stem;
  std::string summary = summary_json(rows).dump(2);  // may throw: all rows failed
  qeaas::bench::write_csv(base.string() + ".csv", rows);
  std::ofstream f(base.string() + "-summary.json", std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write summary JSON");
  f << summary << "\n";
  std::printf("wrote %s.csv and %s-summary.json\n", base.string().c_str(),
              base.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QEaaS client: entropy fetch + benchmark drivers"};
  app.require_subcommand(1);

  qeaas::bench::ClientConfig config;
  std::string kex = "mlkem512", sig = "mldsa44", verify = "full-chain", anchor_file;
  std::string out_dir = "bench-out";

  auto add_common = [&](CLI::App* cmd, bool with_bench_flags) {
    cmd->add_option("--proxy-host", config.proxy_host)->capture_default_str();
    cmd->add_option("--proxy-port", config.proxy_port)->capture_default_str();
    cmd->add_option("--proxy-uri", config.proxy_uri, "backend URI for the Proxy-Uri option")
        ->capture_default_str();
    cmd->add_flag("--secure", config.secure, "use the secure channel (coaps port)");
    cmd->add_option("--kex", kex, "mlkem512 | x25519 | p256")->capture_default_str();
    cmd->add_option("--sig", sig, "mldsa44 | ecdsa-p256")->capture_default_str();
    cmd->add_option("--verify", verify, "no-verify | full-chain")->capture_default_str();
    cmd->add_option("--anchor", anchor_file, "trust-anchor certificate (PEM), full-chain mode");
    cmd->add_option("--timeout-ms", config.request_timeout_ms)->capture_default_str();
    cmd->add_option("--mtu", config.handshake.mtu_bytes)->capture_default_str();
    if (with_bench_flags) {
      cmd->add_option("--iterations", config.iterations)->capture_default_str();
      cmd->add_option("--warmup", config.warmup)->capture_default_str();
      cmd->add_option("--delay-ms", config.inter_iteration_delay_ms,
                      "inter-iteration delay (-1 = 1000 ms secure / 100 ms plain)")
          ->capture_default_str();
      cmd->add_option("--out", out_dir, "output directory")->capture_default_str();
    }
  };

  auto* fetch = app.add_subcommand("fetch", "one GET via the proxy + pool inject/extract");
  add_common(fetch, false);
  fetch->add_option("--inject-bits", config.inject_entropy_bits_per_byte,
                    "entropy bits credited per injected byte")
      ->capture_default_str();

  auto* bench_pool_cmd = app.add_subcommand("bench-pool", "time pool inject/extract by size");
  std::vector<size_t> sizes = {16, 32, 64, 128, 256};
  uint64_t pool_seed = 1;
  size_t pool_iters = 100, pool_warmup = 5;
  bench_pool_cmd->add_option("--sizes", sizes, "buffer sizes")->capture_default_str();
  bench_pool_cmd->add_option("--seed", pool_seed)->capture_default_str();
  bench_pool_cmd->add_option("--iterations", pool_iters)->capture_default_str();
  bench_pool_cmd->add_option("--warmup", pool_warmup)->capture_default_str();
  bench_pool_cmd->add_option("--out", out_dir)->capture_default_str();

  auto* bench_hs = app.add_subcommand("bench-handshake",
                                      "fresh session + first request per iteration");
  add_common(bench_hs, true);
  auto* bench_rtt_cmd = app.add_subcommand("bench-rtt", "round trips on one session");
  add_common(bench_rtt_cmd, true);

  CLI11_PARSE(app, argc, argv);

  auto kex_alg = qeaas::pqch::kex_from_string(kex);
  auto sig_alg = qeaas::pqch::sig_from_string(sig);
  auto verify_mode = qeaas::pqch::verify_from_string(verify);
  if (!kex_alg || !sig_alg || !verify_mode) {
    std::fprintf(stderr, "error: unknown --kex/--sig/--verify value\n");
    return 64;
  }
  config.handshake.kex = *kex_alg;
  config.handshake.sig = *sig_alg;
  config.handshake.verify_mode = *verify_mode;

  qeaas::bench::SteadyClock clock;
  try {
    if (!anchor_file.empty()) {
      auto anchors = qeaas::pqch::cert_chain_from_pem(qeaas::pqch::load_text_file(anchor_file));
      if (anchors.empty()) throw std::invalid_argument("anchor file holds no certificate");
      config.trust_anchor = anchors.front();
    }

    if (fetch->parsed()) {
      auto result = qeaas::bench::fetch_entropy(config, clock);
      nlohmann::json doc{{"injected_hex", qeaas::hex_encode(result.injected)},
                         {"num_bytes", result.injected.size()},
                         {"extracted_hex", qeaas::hex_encode(result.extracted)},
                         {"source", result.backend_source},
                         {"fetch_us", result.fetch_us},
                         {"inject_us", result.inject_us},
                         {"extract_us", result.extract_us},
                         {"transport", config.transport_name()}};
      std::printf("%s\n", doc.dump(2).c_str());
    } else if (bench_pool_cmd->parsed()) {
      qeaas::bench::PoolBenchOptions options;
      options.sizes = sizes;
      options.seed = pool_seed;
      options.iterations = pool_iters;
      options.warmup = pool_warmup;
      write_outputs(out_dir, "pool", qeaas::bench::bench_pool(options, clock));
    } else if (bench_hs->parsed()) {
      write_outputs(out_dir, "handshake-" + config.config_id(),
                    qeaas::bench::bench_handshake(config, clock));
    } else if (bench_rtt_cmd->parsed()) {
      write_outputs(out_dir, "rtt-" + config.config_id(),
                    qeaas::bench::bench_rtt(config, clock));
    }
  } catch (const qeaas::bench::FetchError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 64;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
