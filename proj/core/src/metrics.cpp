#include "svi/metrics.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace svi {

std::string format_real(double value) {
  if (std::isnan(value)) {
    return "nan";
  }
  if (std::isinf(value)) {
    return value > 0 ? "inf" : "-inf";
  }
  std::array<char, 64> buf{};
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                    std::chars_format::general, 17);
  return std::string(buf.data(), result.ptr);
}

MetricsWriter::MetricsWriter(std::ostream &out, std::int64_t flush_interval)
    : out_(out), flush_interval_(flush_interval < 1 ? 1 : flush_interval) {}

void MetricsWriter::check() const {
  if (!out_) {
    throw std::runtime_error("metrics: write failed after " + std::to_string(rows_) +
                             " rows");
  }
}

void MetricsWriter::write(const IterationRecord &r) {
  if (rows_ == 0) {
    out_ << kMetricsHeader << '\n';
  }
  out_ << r.iter << ',' << format_real(r.eta) << ',' << format_real(r.elbo_estimate) << ',';
  if (r.mean_snr) out_ << format_real(*r.mean_snr);
  out_ << ',' << (r.decayed ? 1 : 0) << ',';
  if (r.jeffreys_to_opt) out_ << format_real(*r.jeffreys_to_opt);
  out_ << ',';
  if (r.wall_nanos) out_ << *r.wall_nanos;
  out_ << '\n';
  ++rows_;
  if (rows_ % flush_interval_ == 0) {
    out_.flush();
  }
  check();
}

void MetricsWriter::flush() {
  out_.flush();
  check();
}

namespace {

double parse_real(const std::string &s, std::size_t line) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) {
    throw std::runtime_error("metrics line " + std::to_string(line) + ": bad number '" + s +
                             "'");
  }
  return value;
}

std::int64_t parse_int(const std::string &s, std::size_t line) {
  std::int64_t value = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) {
    throw std::runtime_error("metrics line " + std::to_string(line) + ": bad integer '" + s +
                             "'");
  }
  return value;
}

} // namespace

std::vector<IterationRecord> read_metrics(std::istream &in) {
  std::vector<IterationRecord> records;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    return records;
  }
  ++line_no;
  if (line != kMetricsHeader) {
    throw std::runtime_error("metrics: unexpected header '" + line + "'");
  }
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<std::string> f;
    std::string field;
    std::istringstream row(line);
    while (std::getline(row, field, ',')) {
      f.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
      f.emplace_back();
    }
    if (f.size() != 7) {
      throw std::runtime_error("metrics line " + std::to_string(line_no) +
                               ": expected 7 fields");
    }
    IterationRecord r;
    r.iter = parse_int(f[0], line_no);
    r.eta = parse_real(f[1], line_no);
    r.elbo_estimate = parse_real(f[2], line_no);
    if (!f[3].empty()) r.mean_snr = parse_real(f[3], line_no);
    r.decayed = parse_int(f[4], line_no) != 0;
    if (!f[5].empty()) r.jeffreys_to_opt = parse_real(f[5], line_no);
    if (!f[6].empty()) r.wall_nanos = parse_int(f[6], line_no);
    records.push_back(r);
  }
  return records;
}

std::vector<IterationRecord> read_metrics_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("metrics: cannot open '" + path + "'");
  }
  return read_metrics(in);
}

} // namespace svi
