#include "qeaas/report/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace qeaas::report {

namespace {

using nlohmann::json;

std::string fmt3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

bench::Summary us_to_ms(const bench::Summary& s) {
  return {s.mean / 1000.0, s.stddev / 1000.0, s.sem / 1000.0, s.n};
}

std::string key_label(const GroupKey& k) {
  return k.config + "/" + k.transport + "/" + k.op + "/" + std::to_string(k.size_bytes);
}

std::string sanitize_filename(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '_' && c != '-')
      c = '-';
  return out;
}

void write_text(const std::string& path, const std::string& content,
                std::vector<std::string>& written) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
  if (!f.good()) throw std::runtime_error("write failed: " + path);
  written.push_back(path);
}

json summary_to_json(const GroupSummary& g) {
  return json{{"config", g.key.config},
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
              {"max_us", g.max_us}};
}

}  // namespace

std::vector<GroupSummary> summarize_rows(const std::vector<bench::BenchRow>& rows) {
  struct Acc {
    std::vector<double> valid;
    uint64_t min_us = 0, max_us = 0;
    size_t failed = 0, total = 0;
  };
  std::map<GroupKey, Acc> groups;
  for (const bench::BenchRow& r : rows) {
    GroupKey key{r.config, r.kex, r.sig, r.verify, r.transport, r.op, r.size_bytes};
    Acc& acc = groups[key];
    ++acc.total;
    if (r.failed) {
      ++acc.failed;
      continue;
    }
    if (acc.valid.empty()) {
      acc.min_us = acc.max_us = r.latency_us;
    } else {
      acc.min_us = std::min(acc.min_us, r.latency_us);
      acc.max_us = std::max(acc.max_us, r.latency_us);
    }
    acc.valid.push_back(static_cast<double>(r.latency_us));
  }

  std::vector<GroupSummary> out;
  out.reserve(groups.size());
  for (auto& [key, acc] : groups) {
    if (acc.valid.size() < 2)
      throw std::runtime_error("group " + key_label(key) + " has fewer than 2 valid rows");
    GroupSummary g;
    g.key = key;
    g.stats = bench::summarize(acc.valid);
    g.min_us = acc.min_us;
    g.max_us = acc.max_us;
    g.failed = acc.failed;
    g.total = acc.total;
    out.push_back(std::move(g));
  }
  return out;
}

double baseline_rtt_ms(const std::vector<bench::BenchRow>& rows) {
  std::vector<double> samples;
  for (const bench::BenchRow& r : rows)
    if (r.op == "rtt" && !r.failed) samples.push_back(static_cast<double>(r.latency_us));
  if (samples.size() < 2) throw std::runtime_error("baseline needs >= 2 valid rtt rows");
  return bench::summarize(samples).mean / 1000.0;
}

DecomposeReport build_decomposition(const std::vector<GroupSummary>& summaries,
                                    double baseline_rtt_mean_ms) {
  // (kex, sig, verify) -> handshake summary in ms; first occurrence wins.
  std::map<std::tuple<std::string, std::string, std::string>, bench::Summary> hs;
  for (const GroupSummary& g : summaries) {
    if (g.key.op != "handshake" || g.key.transport != "secure") continue;
    hs.emplace(std::make_tuple(g.key.kex, g.key.sig, g.key.verify), us_to_ms(g.stats));
  }

  auto find = [&](const std::string& kex, const std::string& sig,
                  const std::string& verify) -> const bench::Summary* {
    auto it = hs.find(std::make_tuple(kex, sig, verify));
    return it == hs.end() ? nullptr : &it->second;
  };

  std::set<std::string> kexes, sigs;
  for (const auto& [key, summary] : hs) {
    kexes.insert(std::get<0>(key));
    sigs.insert(std::get<1>(key));
  }

  DecomposeReport report;
  report.baseline_rtt_mean_ms = baseline_rtt_mean_ms;

  std::map<std::string, std::vector<std::pair<bench::Summary, bench::Summary>>> per_sig_pairs;
  for (const std::string& kex : kexes) {
    for (const std::string& sig : sigs) {
      const bench::Summary* nv = find(kex, sig, "no-verify");
      const bench::Summary* fv = find(kex, sig, "full-chain");
      if (!nv || !fv) continue;
      DecompositionRow row;
      row.kex = kex;
      row.sig = sig;
      row.nonverify_ms = *nv;
      row.verify_ms = *fv;
      row.parts = bench::decompose(nv->mean, fv->mean, baseline_rtt_mean_ms);
      report.rows.push_back(std::move(row));
      per_sig_pairs[sig].push_back({*fv, *nv});
    }
  }
  if (report.rows.empty())
    throw std::runtime_error("no (kex, sig) pair has handshake rows for both verify modes");

  for (const auto& [sig, pairs] : per_sig_pairs)
    report.pooled_verify_delta_ms[sig] = bench::pool_deltas(pairs);

  const char* modes[] = {"no-verify", "full-chain"};
  for (const std::string& sig : sigs) {
    for (const char* mode : modes) {
      const bench::Summary* a = find("mlkem512", sig, mode);
      const bench::Summary* b = find("p256", sig, mode);
      if (!a || !b) continue;
      ComparisonRow c;
      c.label = "mlkem512 vs p256 (" + sig + ", " + mode + ")";
      c.a_ms = a->mean;
      c.b_ms = b->mean;
      c.rel = bench::compare(*a, *b);
      report.comparisons.push_back(std::move(c));
    }
  }
  for (const char* mode : modes) {
    const bench::Summary* a = find("mlkem512", "mldsa44", mode);
    const bench::Summary* b = find("p256", "ecdsa-p256", mode);
    if (!a || !b) continue;
    ComparisonRow c;
    c.label = std::string("mlkem512+mldsa44 vs p256+ecdsa-p256 (") + mode + ")";
    c.a_ms = a->mean;
    c.b_ms = b->mean;
    c.rel = bench::compare(*a, *b);
    report.comparisons.push_back(std::move(c));
  }
  return report;
}

EmitResult emit(const std::vector<bench::BenchRow>& rows, const ReportOptions& options) {
  if (rows.empty()) throw std::runtime_error("no benchmark rows; nothing to report");
  if (options.out_dir.empty()) throw std::runtime_error("output directory not set");
  if (options.decompose && !options.baseline_csv)
    throw std::runtime_error("--decompose needs --baseline <csv>");

  std::vector<GroupSummary> summaries = summarize_rows(rows);

  // Everything below is derived before the first write so a late error
  // cannot leave a partial artifact set... except filesystem failures, which
  // abort loudly anyway.
  std::optional<DecomposeReport> decomp;
  double baseline_ms = 0;
  if (options.decompose) {
    baseline_ms = baseline_rtt_ms(bench::read_csv(*options.baseline_csv));
    decomp = build_decomposition(summaries, baseline_ms);
  }

  std::filesystem::create_directories(options.out_dir);
  auto path_of = [&](const std::string& name) {
    return (std::filesystem::path(options.out_dir) / name).string();
  };
  EmitResult result;

  {
    std::ostringstream csv;
    csv << "config,kex,sig,verify,transport,op,size_bytes,n,failed,mean_us,std_us,sem_us,"
           "min_us,max_us\n";
    for (const GroupSummary& g : summaries) {
      csv << g.key.config << ',' << g.key.kex << ',' << g.key.sig << ',' << g.key.verify << ','
          << g.key.transport << ',' << g.key.op << ',' << g.key.size_bytes << ',' << g.stats.n
          << ',' << g.failed << ',' << fmt3(g.stats.mean) << ',' << fmt3(g.stats.stddev) << ','
          << fmt3(g.stats.sem) << ',' << g.min_us << ',' << g.max_us << '\n';
    }
    write_text(path_of("summary.csv"), csv.str(), result.files_written);
  }
  {
    json doc = json::array();
    for (const GroupSummary& g : summaries) doc.push_back(summary_to_json(g));
    write_text(path_of("summary.json"), doc.dump(2) + "\n", result.files_written);
  }

  std::set<std::string> configs;
  for (const bench::BenchRow& r : rows) configs.insert(r.config);
  for (const std::string& config : configs) {
    std::ostringstream csv;
    csv << "op,size_bytes,iteration,latency_us,failed\n";
    for (const bench::BenchRow& r : rows) {
      if (r.config != config) continue;
      csv << r.op << ',' << r.size_bytes << ',' << r.iteration << ',' << r.latency_us << ','
          << (r.failed ? 1 : 0) << '\n';
    }
    write_text(path_of("scatter-" + sanitize_filename(config) + ".csv"), csv.str(),
               result.files_written);
  }

  if (decomp) {
    {
      std::ostringstream csv;
      csv << "kex,sig,nonverify_ms,verify_ms,network_ms,compute_residual_ms,"
             "verify_overhead_ms,total_ms,degenerate\n";
      for (const DecompositionRow& r : decomp->rows) {
        csv << r.kex << ',' << r.sig << ',' << fmt3(r.nonverify_ms.mean) << ','
            << fmt3(r.verify_ms.mean) << ',' << fmt3(r.parts.network_ms) << ','
            << fmt3(r.parts.compute_residual_ms) << ',' << fmt3(r.parts.verify_overhead_ms) << ','
            << fmt3(r.parts.total_ms) << ',' << (r.parts.degenerate ? 1 : 0) << '\n';
      }
      write_text(path_of("decomposition.csv"), csv.str(), result.files_written);
    }
    json doc;
    doc["baseline_rtt_mean_ms"] = baseline_ms;
    doc["network_model"] = "3 round trips: network_ms = 3 * baseline_rtt_mean_ms";
    doc["note"] = "compute_residual_ms is a conservative lower bound";
    doc["rows"] = json::array();
    for (const DecompositionRow& r : decomp->rows) {
      doc["rows"].push_back({{"kex", r.kex},
                             {"sig", r.sig},
                             {"nonverify_ms", r.nonverify_ms.mean},
                             {"verify_ms", r.verify_ms.mean},
                             {"network_ms", r.parts.network_ms},
                             {"compute_residual_ms", r.parts.compute_residual_ms},
                             {"verify_overhead_ms", r.parts.verify_overhead_ms},
                             {"total_ms", r.parts.total_ms},
                             {"degenerate", r.parts.degenerate}});
    }
    doc["pooled_verify_delta_ms"] = json::object();
    for (const auto& [sig, delta] : decomp->pooled_verify_delta_ms)
      doc["pooled_verify_delta_ms"][sig] = {{"mean", delta.mean}, {"sem", delta.sem}};
    doc["comparisons"] = json::array();
    for (const ComparisonRow& c : decomp->comparisons)
      doc["comparisons"].push_back({{"label", c.label},
                                    {"a_ms", c.a_ms},
                                    {"b_ms", c.b_ms},
                                    {"relative", c.rel.relative},
                                    {"sem", c.rel.sem}});
    write_text(path_of("decomposition.json"), doc.dump(2) + "\n", result.files_written);
  }
  return result;
}

}  // namespace qeaas::report
