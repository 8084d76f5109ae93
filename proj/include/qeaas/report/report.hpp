#pragma once
// Offline benchmark reporting: groups per-iteration CSV rows, computes
// summaries, reproduces the three-component handshake decomposition, and
// writes deterministic CSV/JSON/plot-data artifacts.

#include "qeaas/bench/csv.hpp"
#include "qeaas/bench/stats.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qeaas::report {

struct GroupKey {
  std::string config;
  std::string kex;
  std::string sig;
  std::string verify;
  std::string transport;
  std::string op;
  uint64_t size_bytes = 0;

  auto operator<=>(const GroupKey&) const = default;
};

struct GroupSummary {
  GroupKey key;
  bench::Summary stats;  // microseconds, non-failed rows only
  uint64_t min_us = 0;
  uint64_t max_us = 0;
  size_t failed = 0;  // failed-row count (excluded from stats)
  size_t total = 0;   // all rows in the group
};

// Groups rows by (config,kex,sig,verify,transport,op,size_bytes), sorted by
// key. Throws std::runtime_error if any group has fewer than 2 valid rows.
std::vector<GroupSummary> summarize_rows(const std::vector<bench::BenchRow>& rows);

// Mean of non-failed op=="rtt" rows, in milliseconds. Throws on < 2 rows.
double baseline_rtt_ms(const std::vector<bench::BenchRow>& rows);

struct DecompositionRow {
  std::string kex;
  std::string sig;
  bench::Summary nonverify_ms;  // handshake summary, no-verify mode
  bench::Summary verify_ms;     // handshake summary, full-chain mode
  bench::Decomposition parts;
};

struct ComparisonRow {
  std::string label;  // e.g. "mlkem512 vs p256 (ecdsa-p256, no-verify)"
  double a_ms = 0;
  double b_ms = 0;
  bench::Comparison rel;  // (a − b) / b
};

struct DecomposeReport {
  double baseline_rtt_mean_ms = 0;
  std::vector<DecompositionRow> rows;  // one per kex × sig with both modes
  // Per signature algorithm: flat-pooled (verify − no-verify) delta across
  // key exchanges, in ms.
  std::map<std::string, bench::PooledDelta> pooled_verify_delta_ms;
  std::vector<ComparisonRow> comparisons;
};

// Builds the decomposition from secure-handshake group summaries (op ==
// "handshake", transport == "secure"). Throws std::runtime_error when no
// (kex, sig) pair has both verify modes.
DecomposeReport build_decomposition(const std::vector<GroupSummary>& summaries,
                                    double baseline_rtt_mean_ms);

struct ReportOptions {
  std::string out_dir;
  bool decompose = false;
  std::optional<std::string> baseline_csv;  // plain-RTT rows, for --decompose
};

struct EmitResult {
  std::vector<std::string> files_written;  // paths, in write order
};

// Writes summary.csv, summary.json and one scatter-<config>.csv per
// configuration; with options.decompose also decomposition.csv and
// decomposition.json. Deterministic: identical input yields byte-identical
// files. Throws std::runtime_error on empty input (before creating any file)
// or unwritable paths.
EmitResult emit(const std::vector<bench::BenchRow>& rows, const ReportOptions& options);

}  // namespace qeaas::report
