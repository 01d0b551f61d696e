#pragma once

#include <optional>
#include <string>
#include <vector>

#include "treeviz/errors.hpp"

namespace treeviz {

enum class ColumnKind { Continuous, Categorical };

// One named column. Continuous columns store finite values directly;
// categorical columns store 0-based codes into `labels`.
struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::Continuous;
  std::vector<double> values;       // continuous values or category codes
  std::vector<std::string> labels;  // categorical only, ordered

  std::size_t size() const { return values.size(); }
};

// Immutable column-major table: one outcome plus m covariates.
struct Dataset {
  Column outcome;
  std::vector<Column> covariates;

  std::size_t n_rows() const { return outcome.size(); }
  std::size_t n_covariates() const { return covariates.size(); }
  const Column& covariate(const std::string& name) const;
  bool has_covariate(const std::string& name) const;
};

struct Histogram {
  std::vector<double> bin_edges;                  // k+1, strictly increasing
  std::vector<std::size_t> counts;                // k
  std::vector<std::optional<double>> bin_means;   // k, absent for empty bins

  std::size_t n_bins() const { return counts.size(); }
};

struct DensityCurve {
  std::vector<double> grid;     // 512 ascending points
  std::vector<double> density;  // same length, >= 0
};

// Reads a CSV (comma separated, double-quote quoting, header row, UTF-8)
// and assembles the named columns in the requested order. Columns not
// listed are dropped. A column is continuous when every entry parses as a
// number, otherwise categorical, unless `kind_hints` overrides by name.
Dataset load_csv(const std::string& path, const std::string& outcome_name,
                 const std::vector<std::string>& covariate_names,
                 const std::vector<std::pair<std::string, ColumnKind>>& kind_hints = {});

// Type-7 quantile: h = (n-1)p + 1 over the sorted values, linear
// interpolation between the two straddling order statistics.
double quantile(const std::vector<double>& values, double p);

// Empirical CDF: fraction of values <= x.
double percentile_of(const std::vector<double>& values, double x);

// Sturges histogram (k = ceil(log2 n) + 1, equal-width over [min, max]).
// Bins are (a, b] except the first, which is [a, b]. When all values are
// equal the result is a single unit-width bin centered on the value.
// Bin means come from `paired_outcomes` when given, else from the values.
Histogram histogram(const std::vector<double>& values,
                    const std::vector<double>* paired_outcomes = nullptr);

// Gaussian KDE on a 512-point grid spanning [min - 3bw, max + 3bw] with
// the rule-of-thumb bandwidth 0.9 * min(sd, IQR/1.34) * n^(-1/5).
// Requires at least 2 values and nonzero spread.
DensityCurve kde(const std::vector<double>& values);

// cut-style discretization into left-open right-closed intervals; with
// `include_lowest` the first interval is closed on the left. Labels show
// endpoints with `label_digits` significant digits.
Column discretize(const std::vector<double>& values,
                  const std::vector<double>& breakpoints, bool include_lowest,
                  int label_digits, const std::string& name = "bin");

// Significant-digit endpoint formatting shared by discretize labels.
std::string format_significant(double x, int digits);

double mean_of(const std::vector<double>& values);
double sample_sd(const std::vector<double>& values);

}  // namespace treeviz
