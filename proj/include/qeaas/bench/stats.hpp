#pragma once
// Benchmark statistics: mean, sample standard deviation (n−1 denominator,
// documented choice), SEM = σ/√n, first-order error propagation for relative
// comparisons, flat pooling of paired deltas, and the three-component
// handshake decomposition (network = 3 × baseline RTT, compute residual as a
// conservative lower bound, verification overhead as an exact difference).

#include <cstddef>
#include <vector>

namespace qeaas::bench {

struct Summary {
  double mean = 0;
  double stddev = 0;  // sample std, n−1 denominator
  double sem = 0;     // stddev / sqrt(n)
  size_t n = 0;
};

// Throws std::invalid_argument with fewer than 2 samples.
Summary summarize(const std::vector<double>& samples);

struct Comparison {
  double relative;  // (a − b) / b
  double sem;       // first-order Taylor propagation of both SEMs
};
// Throws std::invalid_argument when b.mean == 0.
Comparison compare(const Summary& a, const Summary& b);

struct PooledDelta {
  double mean;  // flat average of (verify − nonverify) deltas
  double sem;   // (1/k) * sqrt(Σ (sem_v² + sem_nv²))
};
// pairs = {verify summary, nonverify summary} per key exchange.
PooledDelta pool_deltas(const std::vector<std::pair<Summary, Summary>>& pairs);

struct Decomposition {
  double network_ms = 0;           // 3 × baseline RTT mean
  double compute_residual_ms = 0;  // nonverify − network (lower bound)
  double verify_overhead_ms = 0;   // verify − nonverify (exact)
  double total_ms = 0;             // verify mean
  // The residual is always a conservative lower bound (the baseline RTT
  // includes backend processing that only applies to the final flight).
  bool residual_lower_bound = true;
  // Set when nonverify ≤ network and the residual was clamped to 0; the sum
  // identity does not hold in that case.
  bool degenerate = false;
};
Decomposition decompose(double nonverify_mean, double verify_mean, double baseline_rtt_mean);

}  // namespace qeaas::bench
