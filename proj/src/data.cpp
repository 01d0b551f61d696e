#include "treeviz/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace treeviz {

const Column& Dataset::covariate(const std::string& name) const {
  for (const auto& c : covariates) {
    if (c.name == name) return c;
  }
  throw DataError("unknown covariate: " + name);
}

bool Dataset::has_covariate(const std::string& name) const {
  for (const auto& c : covariates) {
    if (c.name == name) return true;
  }
  return false;
}

namespace {

// RFC-4180 style row split: commas, double-quote quoting, "" escapes.
std::vector<std::string> split_csv_row(const std::string& line, std::size_t lineno) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  if (quoted) {
    throw DataError("unterminated quote on line " + std::to_string(lineno));
  }
  fields.push_back(cur);
  return fields;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size() && std::isfinite(out);
}

Column build_column(const std::string& name, const std::vector<std::string>& raw,
                    const std::optional<ColumnKind>& hint) {
  bool all_numeric = true;
  std::vector<double> numeric(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (trim(raw[i]).empty()) {
      throw DataError("missing value in column '" + name + "' at row " +
                      std::to_string(i + 1));
    }
    if (!parse_number(raw[i], numeric[i])) {
      all_numeric = false;
      break;
    }
  }
  ColumnKind kind = hint.value_or(all_numeric ? ColumnKind::Continuous
                                              : ColumnKind::Categorical);
  Column col;
  col.name = name;
  col.kind = kind;
  if (kind == ColumnKind::Continuous) {
    if (!all_numeric) {
      throw DataError("unparseable cell in continuous column '" + name + "'");
    }
    col.values = std::move(numeric);
  } else {
    std::map<std::string, std::size_t> code_of;
    for (const auto& cell : raw) {
      const std::string v = trim(cell);
      auto it = code_of.find(v);
      if (it == code_of.end()) {
        it = code_of.emplace(v, col.labels.size()).first;
        col.labels.push_back(v);
      }
      col.values.push_back(static_cast<double>(it->second));
    }
  }
  return col;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& outcome_name,
                 const std::vector<std::string>& covariate_names,
                 const std::vector<std::pair<std::string, ColumnKind>>& kind_hints) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file: " + path);
  const std::vector<std::string> header = split_csv_row(line, 1);

  std::vector<std::vector<std::string>> cells(header.size());
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_csv_row(line, lineno);
    if (fields.size() != header.size()) {
      throw DataError("row " + std::to_string(lineno) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(header.size()));
    }
    for (std::size_t j = 0; j < fields.size(); ++j) {
      cells[j].push_back(std::move(fields[j]));
    }
  }
  if (cells.empty() || cells[0].empty()) throw DataError("no data rows in " + path);

  auto col_index = [&](const std::string& name) -> std::size_t {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (trim(header[j]) == name) return j;
    }
    throw DataError("missing column: " + name);
  };
  auto hint_for = [&](const std::string& name) -> std::optional<ColumnKind> {
    for (const auto& [n, k] : kind_hints) {
      if (n == name) return k;
    }
    return std::nullopt;
  };

  Dataset ds;
  ds.outcome = build_column(outcome_name, cells[col_index(outcome_name)],
                            hint_for(outcome_name));
  for (const auto& name : covariate_names) {
    if (name == outcome_name) {
      throw DataError("outcome repeated as covariate: " + name);
    }
    ds.covariates.push_back(
        build_column(name, cells[col_index(name)], hint_for(name)));
  }
  if (ds.covariates.empty()) throw DataError("no covariates requested");
  return ds;
}

double quantile(const std::vector<double>& values, double p) {
  if (values.empty()) throw DataError("quantile of empty vector");
  if (p < 0.0 || p > 1.0) throw DataError("quantile p outside [0,1]");
  std::vector<double> v(values);
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (h - std::floor(h)) * (v[lo + 1] - v[lo]);
}

double percentile_of(const std::vector<double>& values, double x) {
  if (values.empty()) throw DataError("percentile_of empty vector");
  std::size_t count = 0;
  for (double v : values) {
    if (v <= x) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(values.size());
}

Histogram histogram(const std::vector<double>& values,
                    const std::vector<double>* paired_outcomes) {
  if (values.empty()) throw DataError("histogram of empty vector");
  if (paired_outcomes && paired_outcomes->size() != values.size()) {
    throw DataError("paired outcome length mismatch");
  }
  const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
  const double mn = *mn_it, mx = *mx_it;

  Histogram h;
  std::size_t k;
  if (mn == mx) {
    // Degenerate range: one unit-width bin centered on the value.
    k = 1;
    h.bin_edges = {mn - 0.5, mn + 0.5};
  } else {
    k = static_cast<std::size_t>(
            std::ceil(std::log2(static_cast<double>(values.size())))) + 1;
    const double width = (mx - mn) / static_cast<double>(k);
    for (std::size_t i = 0; i <= k; ++i) {
      h.bin_edges.push_back(mn + width * static_cast<double>(i));
    }
    h.bin_edges.back() = mx;  // guard against accumulation past max
  }
  h.counts.assign(k, 0);
  std::vector<double> sums(k, 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::size_t bin;
    if (k == 1) {
      bin = 0;
    } else {
      // (a, b] bins, first closed on the left
      auto it = std::lower_bound(h.bin_edges.begin() + 1, h.bin_edges.end(),
                                 values[i]);
      bin = static_cast<std::size_t>(it - h.bin_edges.begin()) - 1;
      if (bin >= k) bin = k - 1;
    }
    h.counts[bin] += 1;
    sums[bin] += paired_outcomes ? (*paired_outcomes)[i] : values[i];
  }
  h.bin_means.assign(k, std::nullopt);
  for (std::size_t b = 0; b < k; ++b) {
    if (h.counts[b] > 0) {
      h.bin_means[b] = sums[b] / static_cast<double>(h.counts[b]);
    }
  }
  return h;
}

DensityCurve kde(const std::vector<double>& values) {
  if (values.size() < 2) throw DataError("kde needs at least 2 values");
  const double sd = sample_sd(values);
  if (sd == 0.0) throw DataError("kde needs nonzero spread");
  const double iqr = quantile(values, 0.75) - quantile(values, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  const double n = static_cast<double>(values.size());
  const double bw = 0.9 * spread * std::pow(n, -0.2);

  const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *mn_it - 3.0 * bw;
  const double hi = *mx_it + 3.0 * bw;
  constexpr std::size_t kGrid = 512;
  constexpr double inv_sqrt_2pi = 0.3989422804014327;

  DensityCurve curve;
  curve.grid.resize(kGrid);
  curve.density.resize(kGrid);
  for (std::size_t i = 0; i < kGrid; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) /
                              static_cast<double>(kGrid - 1);
    double sum = 0.0;
    for (double v : values) {
      const double z = (x - v) / bw;
      sum += std::exp(-0.5 * z * z);
    }
    curve.grid[i] = x;
    curve.density[i] = inv_sqrt_2pi * sum / (n * bw);
  }
  return curve;
}

std::string format_significant(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
  return buf;
}

Column discretize(const std::vector<double>& values,
                  const std::vector<double>& breakpoints, bool include_lowest,
                  int label_digits, const std::string& name) {
  if (breakpoints.size() < 2) throw DataError("discretize needs >= 2 breakpoints");
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i - 1] < breakpoints[i])) {
      throw DataError("breakpoints not strictly increasing");
    }
  }
  Column col;
  col.name = name;
  col.kind = ColumnKind::Categorical;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const std::string a = format_significant(breakpoints[i], label_digits);
    const std::string b = format_significant(breakpoints[i + 1], label_digits);
    const bool closed = include_lowest && i == 0;
    col.labels.push_back((closed ? "[" : "(") + a + "," + b + "]");
  }
  for (double v : values) {
    if (v > breakpoints.back() || v < breakpoints.front() ||
        (v == breakpoints.front() && !include_lowest)) {
      throw DataError("value " + std::to_string(v) + " outside breakpoint range");
    }
    // (a, b] intervals; include_lowest folds the minimum into interval 0
    auto it = std::lower_bound(breakpoints.begin() + 1, breakpoints.end(), v);
    std::size_t code = static_cast<std::size_t>(it - breakpoints.begin()) - 1;
    if (code + 2 > breakpoints.size()) code = breakpoints.size() - 2;
    col.values.push_back(static_cast<double>(code));
  }
  return col;
}

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double sample_sd(const std::vector<double>& values) {
  const double m = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace treeviz
