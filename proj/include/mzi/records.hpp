#pragma once

// Flat output records and their CSV / JSON-lines encodings.

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mzi/optimize.hpp"

namespace mzi {

/// Numbers are printed with 12 significant digits in both formats so that
/// the two encodings of a run carry identical values.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

enum class OutputFormat { Csv, Json };

struct OutputRecord {
  std::string scheme;
  std::string resource;
  double nbar = 0.0;
  std::string loss_kind;
  double loss_rate = 0.0;
  std::optional<double> phi_star;  // none for the QCRB
  std::optional<double> mu;        // CSV only
  double delta2phi = HUGE_VAL;
  double snl = 0.0;
  std::string status = "ok";

  bool beats_snl() const { return beats_shot_noise(delta2phi, nbar); }

  static OutputRecord from(const SweepRow& row) {
    OutputRecord r;
    r.scheme = to_string(row.scheme);
    r.resource = to_string(row.resource);
    r.nbar = row.nbar;
    r.loss_kind = to_string(row.loss_kind);
    r.loss_rate = row.loss_rate;
    if (row.scheme != Scheme::QFI && row.status == "ok") r.phi_star = row.point.phi_star;
    if (row.resource == ResourceKind::CSV) r.mu = row.point.mu;
    r.delta2phi = row.point.delta2phi;
    r.snl = mzi::snl(row.nbar);
    r.status = row.status;
    return r;
  }
};

namespace detail {

inline std::string optional_csv(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

inline std::string json_number(double v) { return std::isfinite(v) ? format_number(v) : std::string("null"); }

inline std::string json_optional(const std::optional<double>& v) { return v ? json_number(*v) : std::string("null"); }

inline std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline const char* record_header() { return "scheme,resource,nbar,loss_kind,loss_rate,phi_star,mu,delta2phi,snl,beats_snl,status"; }

inline std::string to_csv(const OutputRecord& r) {
  return r.scheme + "," + r.resource + "," + format_number(r.nbar) + "," + r.loss_kind + "," +
         format_number(r.loss_rate) + "," + detail::optional_csv(r.phi_star) + "," + detail::optional_csv(r.mu) + "," +
         format_number(r.delta2phi) + "," + format_number(r.snl) + "," + (r.beats_snl() ? "true" : "false") + "," +
         r.status;
}

inline std::string to_json(const OutputRecord& r) {
  using detail::json_number;
  using detail::json_string;
  return "{\"scheme\":" + json_string(r.scheme) + ",\"resource\":" + json_string(r.resource) +
         ",\"nbar\":" + json_number(r.nbar) + ",\"loss_kind\":" + json_string(r.loss_kind) +
         ",\"loss_rate\":" + json_number(r.loss_rate) + ",\"phi_star\":" + detail::json_optional(r.phi_star) +
         ",\"mu\":" + detail::json_optional(r.mu) + ",\"delta2phi\":" + json_number(r.delta2phi) +
         ",\"snl\":" + json_number(r.snl) + ",\"beats_snl\":" + (r.beats_snl() ? "true" : "false") +
         ",\"status\":" + json_string(r.status) + "}";
}

struct ThresholdRecord {
  std::string scheme;
  std::string resource;
  double nbar = 0.0;
  std::string loss_kind;
  ThresholdResult result;
};

inline const char* threshold_header() { return "scheme,resource,nbar,loss_kind,status,loss_rate,lo,hi,iterations"; }

inline std::string to_csv(const ThresholdRecord& t) {
  const auto& r = t.result;
  return t.scheme + "," + t.resource + "," + format_number(t.nbar) + "," + t.loss_kind + "," + to_string(r.status) +
         "," + format_number(r.loss_rate) + "," + format_number(r.lo) + "," + format_number(r.hi) + "," +
         std::to_string(r.iterations);
}

inline std::string to_json(const ThresholdRecord& t) {
  using detail::json_number;
  using detail::json_string;
  const auto& r = t.result;
  return "{\"scheme\":" + json_string(t.scheme) + ",\"resource\":" + json_string(t.resource) +
         ",\"nbar\":" + json_number(t.nbar) + ",\"loss_kind\":" + json_string(t.loss_kind) +
         ",\"status\":" + json_string(to_string(r.status)) + ",\"loss_rate\":" + json_number(r.loss_rate) +
         ",\"lo\":" + json_number(r.lo) + ",\"hi\":" + json_number(r.hi) +
         ",\"iterations\":" + std::to_string(r.iterations) + "}";
}

/// Writes records with a header row (CSV) or one object per line (JSON).
template <class Record>
void write_records(std::ostream& os, const std::vector<Record>& records, OutputFormat format, const char* header) {
  if (format == OutputFormat::Csv) os << header << '\n';
  for (const auto& r : records) os << (format == OutputFormat::Csv ? to_csv(r) : to_json(r)) << '\n';
}

inline void write_records(std::ostream& os, const std::vector<OutputRecord>& records, OutputFormat format) {
  write_records(os, records, format, record_header());
}

inline void write_records(std::ostream& os, const std::vector<ThresholdRecord>& records, OutputFormat format) {
  write_records(os, records, format, threshold_header());
}

}  // namespace mzi
