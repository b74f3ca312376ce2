#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace svi {

struct IterationRecord {
  std::int64_t iter = 0;
  double eta = 0.0;
  double elbo_estimate = 0.0;
  std::optional<double> mean_snr;
  bool decayed = false;
  std::optional<double> jeffreys_to_opt;
  std::optional<std::int64_t> wall_nanos;

  bool operator==(const IterationRecord &) const = default;
};

/// Column order of the metrics file.
inline constexpr const char *kMetricsHeader =
    "iter,eta,elbo_estimate,mean_snr,decayed,jeffreys_to_opt,wall_nanos";

/// Formats a real with 17 significant digits; "inf", "-inf", "nan" otherwise.
std::string format_real(double value);

/**
 * Comma-separated metrics writer. The header goes out with the first row;
 * unavailable values are empty fields. Throws std::runtime_error as soon as
 * the stream reports a failure, leaving what was already written intact.
 */
class MetricsWriter {
public:
  explicit MetricsWriter(std::ostream &out, std::int64_t flush_interval = 1000);

  void write(const IterationRecord &record);
  void flush();

  std::int64_t rows() const { return rows_; }

private:
  void check() const;

  std::ostream &out_;
  std::int64_t flush_interval_;
  std::int64_t rows_ = 0;
};

/// Parses a metrics file written by MetricsWriter.
std::vector<IterationRecord> read_metrics(std::istream &in);
std::vector<IterationRecord> read_metrics_file(const std::string &path);

} // namespace svi
