#pragma once

// Experiment records and their serialization. Numbers are written as the
// shortest decimal that round-trips to the same double.

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "strichartz/error.hpp"
#include "strichartz/fit.hpp"

namespace strichartz::harness {

struct ExperimentRecord {
  std::string experiment;  // experiment id, optionally with a series suffix ("E2a", "E5.lq")
  std::optional<double> p, q, s, h, lambda;
  std::optional<int> N;
  std::optional<double> T_w;
  double value = 0.0;
  std::string method;  // "ascent", "random", "family", "kernel"
  std::optional<bool> converged;
  std::optional<double> resid_x, resid_t;
  std::uint64_t seed = 0;
  std::string config_hash;
  double walltime_s = 0.0;

  /// Above this relative refinement change a record is flagged and left out of fits.
  static constexpr double kResidualLimit = 1e-3;

  bool flagged() const noexcept {
    return (resid_x && !(*resid_x <= kResidualLimit)) || (resid_t && !(*resid_t <= kResidualLimit));
  }
};

inline const std::vector<std::string>& record_columns() {
  static const std::vector<std::string> cols = {"experiment", "p", "q", "s", "h", "lambda", "N", "T_w", "value", "method",
                                                "converged", "resid_x", "resid_t", "seed", "config_hash", "walltime_s"};
  return cols;
}

/// Shortest round-trip decimal; "inf"/"-inf"/"nan" for non-finite values.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline double parse_number(const std::string& s) {
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ConfigError("malformed number '" + s + "'");
  return x;
}

namespace detail {

/// Field values as text, empty for inapplicable fields.
inline std::vector<std::string> record_fields(const ExperimentRecord& r) {
  auto num = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  return {r.experiment,
          num(r.p),
          num(r.q),
          num(r.s),
          num(r.h),
          num(r.lambda),
          r.N ? std::to_string(*r.N) : std::string(),
          num(r.T_w),
          format_number(r.value),
          r.method,
          r.converged ? (*r.converged ? "true" : "false") : std::string(),
          num(r.resid_x),
          num(r.resid_t),
          std::to_string(r.seed),
          r.config_hash,
          format_number(r.walltime_s)};
}

inline std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

/// Key used to sort records so the output does not depend on scheduling.
inline auto sort_key(const ExperimentRecord& r) {
  auto v = [](const std::optional<double>& x) { return x ? *x : -HUGE_VAL; };
  return std::make_tuple(r.experiment, v(r.p), v(r.q), v(r.s), -v(r.h), v(r.lambda), r.N ? *r.N : -1, v(r.T_w));
}

}  // namespace detail

inline void sort_records(std::vector<ExperimentRecord>& recs) {
  std::stable_sort(recs.begin(), recs.end(),
                   [](const ExperimentRecord& a, const ExperimentRecord& b) { return detail::sort_key(a) < detail::sort_key(b); });
}

inline std::string records_csv(const std::vector<ExperimentRecord>& recs) {
  std::string out;
  const auto& cols = record_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += '\n';
  for (const auto& r : recs) {
    const auto f = detail::record_fields(r);
    for (std::size_t i = 0; i < f.size(); ++i) out += (i ? "," : "") + f[i];
    out += '\n';
  }
  return out;
}

/// One object per record; inapplicable fields are null. Numbers use the same
/// text as the CSV (non-finite values become strings).
inline std::string records_json(const std::vector<ExperimentRecord>& recs) {
  const auto& cols = record_columns();
  std::string out = "[\n";
  for (std::size_t k = 0; k < recs.size(); ++k) {
    const auto f = detail::record_fields(recs[k]);
    out += "  {";
    for (std::size_t i = 0; i < cols.size(); ++i) {
      out += (i ? ", " : "") + detail::json_string(cols[i]) + ": ";
      const std::string& v = f[i];
      const bool text = cols[i] == "experiment" || cols[i] == "method" || cols[i] == "config_hash";
      if (v.empty()) out += "null";
      else if (text || v == "inf" || v == "-inf" || v == "nan") out += detail::json_string(v);
      else out += v;
    }
    out += k + 1 < recs.size() ? "},\n" : "}\n";
  }
  return out + "]\n";
}

/// A fitted power law over one series, with its expected exponent.
struct FitReport {
  std::string series;
  std::string x_label;
  std::vector<std::pair<double, double>> points;
  LogLogFit fit;
  std::optional<double> expected;
  double tolerance = 0.0;
  std::string verdict;
};

/// Everything an experiment produces.
struct ExperimentResult {
  std::string experiment;
  std::string config_hash;
  std::vector<ExperimentRecord> records;
  std::vector<FitReport> fits;
  std::vector<std::string> notes;
};

inline std::string summary_text(const ExperimentResult& res) {
  std::ostringstream os;
  os << "experiment " << res.experiment << "  config " << res.config_hash << '\n';
  for (const auto& f : res.fits) {
    os << "fit " << f.series << ": slope " << format_number(f.fit.slope) << " +- " << format_number(f.fit.stderr_slope)
       << " vs " << f.x_label << " (" << f.fit.points << " points)";
    if (f.expected) os << "  expected " << format_number(*f.expected) << " +- " << format_number(f.tolerance);
    if (!f.verdict.empty()) os << "  -> " << f.verdict;
    os << '\n';
  }
  for (const auto& n : res.notes) os << "note " << n << '\n';
  return os.str();
}

inline std::string summary_json(const ExperimentResult& res) {
  std::ostringstream os;
  os << "{\n  \"experiment\": " << detail::json_string(res.experiment) << ",\n  \"config_hash\": "
     << detail::json_string(res.config_hash) << ",\n  \"fits\": [";
  for (std::size_t i = 0; i < res.fits.size(); ++i) {
    const auto& f = res.fits[i];
    os << (i ? "," : "") << "\n    {\"series\": " << detail::json_string(f.series) << ", \"x\": " << detail::json_string(f.x_label)
       << ", \"slope\": " << format_number(f.fit.slope) << ", \"stderr\": " << format_number(f.fit.stderr_slope)
       << ", \"intercept\": " << format_number(f.fit.intercept) << ", \"points\": " << f.fit.points
       << ", \"expected\": " << (f.expected ? format_number(*f.expected) : "null")
       << ", \"tolerance\": " << format_number(f.tolerance) << ", \"verdict\": " << detail::json_string(f.verdict) << "}";
  }
  os << "\n  ],\n  \"notes\": [";
  for (std::size_t i = 0; i < res.notes.size(); ++i) os << (i ? ", " : "") << detail::json_string(res.notes[i]);
  os << "]\n}\n";
  return os.str();
}

/// Two-column "x y" text for one fitted series.
inline std::string plot_data(const FitReport& f) {
  std::string out = "# " + f.series + ": " + f.x_label + " value\n";
  for (const auto& [x, y] : f.points) out += format_number(x) + " " + format_number(y) + "\n";
  return out;
}

inline std::string file_stem(std::string s) {
  for (char& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
  return s;
}

/// Writes a set of files into `dir` all-or-nothing: everything goes to
/// temporary names first and is renamed only when every write succeeded.
inline void write_files_atomically(const std::filesystem::path& dir, const std::vector<std::pair<std::string, std::string>>& files) {
  namespace fs = std::filesystem;
  std::error_code ec;
  const bool existed = fs::exists(dir, ec);
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ResourceError("cannot create output directory " + dir.string());

  std::vector<fs::path> temps;
  auto cleanup = [&] {
    for (const auto& t : temps) fs::remove(t, ec);
    if (!existed) {
      fs::remove(dir / "plot", ec);
      fs::remove(dir, ec);
    }
  };
  for (const auto& [name, content] : files) {
    const fs::path target = dir / name;
    fs::create_directories(target.parent_path(), ec);
    const fs::path tmp = target.string() + ".tmp";
    temps.push_back(tmp);
    std::ofstream out(tmp, std::ios::binary);
    out << content;
    out.close();
    if (!out) {
      cleanup();
      throw ResourceError("cannot write " + target.string());
    }
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    fs::rename(temps[i], dir / files[i].first, ec);
    if (ec) {
      cleanup();
      throw ResourceError("cannot finalize " + (dir / files[i].first).string());
    }
  }
}

/// Checks that `dir` can be created and written before any work is done.
inline void probe_output_directory(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  const bool existed = fs::exists(dir, ec);
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ResourceError("cannot create output directory " + dir.string());
  const fs::path probe = dir / ".write_probe";
  {
    std::ofstream out(probe);
    out << "x";
    out.close();
    if (!out) {
      fs::remove(probe, ec);
      if (!existed) fs::remove(dir, ec);
      throw ResourceError("output directory " + dir.string() + " is not writable");
    }
  }
  fs::remove(probe, ec);
  if (!existed) fs::remove(dir, ec);
}

}  // namespace strichartz::harness
