// bench-report: offline statistics + handshake decomposition from bench CSVs.
#include "qeaas/report/report.hpp"

#include <CLI11.hpp>

#include <cstdio>

int main(int argc, char** argv) {
  CLI::App app{"QEaaS benchmark report generator"};
  std::vector<std::string> inputs;
  qeaas::report::ReportOptions options;
  std::string baseline;
  app.add_option("--in", inputs, "benchmark CSV file(s)")->required()->expected(-1);
  app.add_option("--out", options.out_dir, "output directory")->required();
  app.add_option("--baseline", baseline, "plain-RTT CSV used as the network baseline");
  app.add_flag("--decompose", options.decompose,
               "emit the three-component handshake decomposition (needs --baseline)");
  CLI11_PARSE(app, argc, argv);
  if (!baseline.empty()) options.baseline_csv = baseline;

  try {
    std::vector<qeaas::bench::BenchRow> rows;
    for (const std::string& path : inputs) {
      auto part = qeaas::bench::read_csv(path);
      rows.insert(rows.end(), part.begin(), part.end());
    }
    auto result = qeaas::report::emit(rows, options);
    for (const std::string& file : result.files_written) std::printf("wrote %s\n", file.c_str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
