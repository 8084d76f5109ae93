#include "qeaas/bench/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace qeaas::bench {

Summary summarize(const std::vector<double>& samples) {
  if (samples.size() < 2)
    throw std::invalid_argument("summarize needs at least 2 samples");
  Summary s;
  s.n = samples.size();
  double sum = 0;
  for (double v : samples) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  double ss = 0;
  for (double v : samples) ss += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(ss / static_cast<double>(s.n - 1));
  s.sem = s.stddev / std::sqrt(static_cast<double>(s.n));
  return s;
}

Comparison compare(const Summary& a, const Summary& b) {
  if (b.mean == 0) throw std::invalid_argument("compare: reference mean is zero");
  Comparison c;
  c.relative = (a.mean - b.mean) / b.mean;
  double da = a.sem / b.mean;
  double db = a.mean * b.sem / (b.mean * b.mean);
  c.sem = std::sqrt(da * da + db * db);
  return c;
}

PooledDelta pool_deltas(const std::vector<std::pair<Summary, Summary>>& pairs) {
  if (pairs.empty()) throw std::invalid_argument("pool_deltas: no pairs");
  double sum = 0;
  double var = 0;
  for (const auto& [verify, nonverify] : pairs) {
    sum += verify.mean - nonverify.mean;
    var += verify.sem * verify.sem + nonverify.sem * nonverify.sem;
  }
  double k = static_cast<double>(pairs.size());
  return {sum / k, std::sqrt(var) / k};
}

Decomposition decompose(double nonverify_mean, double verify_mean, double baseline_rtt_mean) {
  if (nonverify_mean < 0 || verify_mean < 0 || baseline_rtt_mean < 0)
    throw std::invalid_argument("decompose: negative input");
  Decomposition d;
  d.network_ms = 3.0 * baseline_rtt_mean;
  d.compute_residual_ms = nonverify_mean - d.network_ms;
  if (d.compute_residual_ms < 0) {
    d.compute_residual_ms = 0;
    d.degenerate = true;
  }
  d.verify_overhead_ms = verify_mean - nonverify_mean;
  d.total_ms = verify_mean;
  return d;
}

}  // namespace qeaas::bench
