#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "treeviz/data.hpp"
#include "treeviz/treemodel.hpp"

namespace treeviz {

// Tree-growing controls. alpha and mincriterion are two views of the
// same threshold: mincriterion = 1 - alpha.
struct FitControls {
  double alpha = 0.05;
  std::size_t minbucket = 7;
  std::size_t minsplit = 20;
  std::size_t maxdepth = 0;  // 0 = unlimited

  double mincriterion() const { return 1.0 - alpha; }
  static FitControls with_mincriterion(double mc);
  void validate() const;
};

struct TestResult {
  std::size_t covariate_index = 0;
  double t_statistic = 0.0;
  double p_value = 1.0;
};

struct SplitDecision {
  bool split = false;
  std::size_t covariate_index = 0;  // valid when split
  double adjusted_p = 1.0;
};

// Association test of one covariate against a continuous outcome:
// OLS of y on x with intercept, two-sided p from t(n-2).
// Zero-variance x gives t = 0, p = 1; an exact fit gives p = 0.
TestResult covariate_test(const std::vector<double>& y,
                          const std::vector<double>& x);

// Categorical outcome analog: one-way ANOVA F-test of x grouped by the
// outcome category, p from F(c-1, n-c). `y_codes` are category codes.
TestResult covariate_test_categorical(const std::vector<double>& y_codes,
                                      const std::vector<double>& x,
                                      std::size_t n_categories);

// View of a dataset restricted to a row subset: outcome plus covariate
// columns gathered once for the node being considered.
struct NodeView {
  std::vector<double> y;                      // outcome values or codes
  std::vector<std::vector<double>> x;         // one vector per covariate
  ColumnKind outcome_kind = ColumnKind::Continuous;
  std::size_t n_categories = 0;               // categorical outcomes only
};

// Tests every covariate, Bonferroni-adjusts the minimum p over m, and
// splits only when the adjusted p passes alpha. p ties break to the
// lowest covariate index.
SplitDecision select_split_variable(const NodeView& view,
                                    const FitControls& controls);

struct SplitPoint {
  double breakpoint = 0.0;
  double criterion = 0.0;
};

// Maximizes the between-group discrepancy over candidate breakpoints
// (distinct observed x values leaving >= minbucket rows on each side).
// Continuous outcome: between-group sum of squares. Categorical:
// Pearson chi-square of the 2 x c table. Ties break to the smallest v.
SplitPoint best_split_point(const std::vector<double>& y,
                            const std::vector<double>& x,
                            std::size_t minbucket,
                            ColumnKind outcome_kind = ColumnKind::Continuous,
                            std::size_t n_categories = 0);

Tree fit(const Dataset& dataset, const FitControls& controls);

// Routes one row (values aligned with the tree's covariate order) to a
// terminal node and returns its id.
std::size_t predict_node(const Tree& tree, const std::vector<double>& row);

// Terminal mean for continuous outcomes.
double predict(const Tree& tree, const std::vector<double>& row);

// Class-probability vector for categorical outcomes.
std::vector<double> predict_distribution(const Tree& tree,
                                         const std::vector<double>& row);

}  // namespace treeviz
