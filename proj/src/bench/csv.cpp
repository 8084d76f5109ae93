#include "qeaas/bench/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qeaas::bench {

namespace {

constexpr const char* kHeader =
    "config,kex,sig,verify,transport,op,size_bytes,iteration,latency_us,failed";

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else if (c != '\r') {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

uint64_t parse_u64(const std::string& s, const char* what) {
  uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::runtime_error(std::string("bad CSV field ") + what + ": '" + s + "'");
  return v;
}

}  // namespace

std::string csv_header() { return kHeader; }

std::string to_csv_line(const BenchRow& row) {
  std::ostringstream os;
  os << row.config << ',' << row.kex << ',' << row.sig << ',' << row.verify << ','
     << row.transport << ',' << row.op << ',' << row.size_bytes << ',' << row.iteration
     << ',' << row.latency_us << ',' << (row.failed ? 1 : 0);
  return os.str();
}

void write_csv(const std::string& path, const std::vector<BenchRow>& rows) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << kHeader << '\n';
  for (const BenchRow& row : rows) f << to_csv_line(row) << '\n';
  if (!f.good()) throw std::runtime_error("write failed: " + path);
}

std::vector<BenchRow> parse_csv(const std::string& content) {
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV");
  // Tolerate a trailing \r from CRLF files.
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader)
    throw std::runtime_error("unexpected CSV header: '" + line + "'");

  std::vector<BenchRow> rows;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split_line(line);
    if (fields.size() != 10)
      throw std::runtime_error("CSV line " + std::to_string(line_no) + ": expected 10 fields");
    BenchRow row;
    row.config = fields[0];
    row.kex = fields[1];
    row.sig = fields[2];
    row.verify = fields[3];
    row.transport = fields[4];
    row.op = fields[5];
    row.size_bytes = parse_u64(fields[6], "size_bytes");
    row.iteration = parse_u64(fields[7], "iteration");
    row.latency_us = parse_u64(fields[8], "latency_us");
    uint64_t failed = parse_u64(fields[9], "failed");
    if (failed > 1) throw std::runtime_error("CSV line " + std::to_string(line_no) +
                                             ": failed must be 0 or 1");
    row.failed = failed == 1;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<BenchRow> read_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace qeaas::bench
