#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

namespace vcplab {

// One long-format result row. Unused numeric columns stay empty in the CSV.
struct ResultRow {
  std::string experiment;
  std::optional<int> N, M, D;
  std::optional<double> p, alpha;
  std::optional<int> L;
  std::optional<double> P;
  std::string metric;
  double value = 0.0;
  std::optional<double> stderr_;
  std::optional<int> n;
  std::string error;
};

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{"experiment", "N", "M", "D", "p", "alpha", "L",
                                             "P", "metric", "value", "stderr", "n", "error"};
  return cols;
}

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

namespace detail {

template <class T>
std::string opt_field(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_integral_v<T>) return std::to_string(*v);
  else return format_number(*v);
}

inline auto row_key(const ResultRow& r) {
  constexpr double nan_key = -1e300;
  return std::make_tuple(r.experiment, r.N.value_or(-1), r.M.value_or(-1), r.D.value_or(-1),
                         r.p.value_or(nan_key), r.alpha.value_or(nan_key), r.L.value_or(-1),
                         r.P.value_or(nan_key), r.metric);
}

}  // namespace detail

inline void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ResultRow& a, const ResultRow& b) { return detail::row_key(a) < detail::row_key(b); });
}

// Header plus rows in canonical order, RFC-4180 quoting, CRLF-free.
inline void write_csv(std::ostream& os, std::vector<ResultRow> rows) {
  sort_rows(rows);
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
  for (const auto& r : rows) {
    os << csv_quote(r.experiment) << ',' << detail::opt_field(r.N) << ',' << detail::opt_field(r.M) << ','
       << detail::opt_field(r.D) << ',' << detail::opt_field(r.p) << ',' << detail::opt_field(r.alpha) << ','
       << detail::opt_field(r.L) << ',' << detail::opt_field(r.P) << ',' << csv_quote(r.metric) << ','
       << format_number(r.value) << ',' << detail::opt_field(r.stderr_) << ',' << detail::opt_field(r.n) << ','
       << csv_quote(r.error) << "\n";
  }
}

}  // namespace vcplab
