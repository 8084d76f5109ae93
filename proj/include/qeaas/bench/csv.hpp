#pragma once
// Benchmark CSV schema (documented in docs/bench-data.md):
//   config,kex,sig,verify,transport,op,size_bytes,iteration,latency_us,failed
// One row per measured operation; failed=1 rows carry latency_us=0 and are
// excluded from statistics but counted.

#include <cstdint>
#include <string>
#include <vector>

namespace qeaas::bench {

struct BenchRow {
  std::string config;     // e.g. "mlkem512-mldsa44-fullchain-secure", "pool"
  std::string kex;        // mlkem512 | x25519 | p256 | none
  std::string sig;        // mldsa44 | ecdsa-p256 | none
  std::string verify;     // full-chain | no-verify | none
  std::string transport;  // plain | secure | local
  std::string op;         // handshake | rtt | inject | extract
  uint64_t size_bytes = 0;
  uint64_t iteration = 0;
  uint64_t latency_us = 0;
  bool failed = false;

  bool operator==(const BenchRow&) const = default;
};

std::string csv_header();
std::string to_csv_line(const BenchRow& row);

// Throws std::runtime_error on I/O failure or schema mismatch.
void write_csv(const std::string& path, const std::vector<BenchRow>& rows);
std::vector<BenchRow> parse_csv(const std::string& content);
std::vector<BenchRow> read_csv(const std::string& path);

}  // namespace qeaas::bench
