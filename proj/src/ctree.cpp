#include "treeviz/ctree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace treeviz {

FitControls FitControls::with_mincriterion(double mc) {
  FitControls c;
  c.alpha = 1.0 - mc;
  return c;
}

void FitControls::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DataError("alpha must lie in (0,1)");
  }
  if (minbucket < 1) throw DataError("minbucket must be >= 1");
  if (minsplit < 2) throw DataError("minsplit must be >= 2");
}

TestResult covariate_test(const std::vector<double>& y,
                          const std::vector<double>& x) {
  const std::size_t n = y.size();
  if (n != x.size()) throw DataError("covariate_test: length mismatch");
  if (n < 3) throw DataError("covariate_test needs n >= 3");

  const double xbar = mean_of(x);
  const double ybar = mean_of(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - xbar;
    const double dy = y[i] - ybar;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }

  TestResult res;
  if (sxx == 0.0) {
    res.t_statistic = 0.0;
    res.p_value = 1.0;
    return res;
  }
  const double slope = sxy / sxx;
  const double rss = syy - slope * sxy;
  if (syy == 0.0 || slope == 0.0) {
    res.t_statistic = 0.0;
    res.p_value = 1.0;
    return res;
  }
  if (rss <= 1e-12 * syy) {
    // exact linear fit
    res.t_statistic = slope > 0 ? std::numeric_limits<double>::infinity()
                                : -std::numeric_limits<double>::infinity();
    res.p_value = 0.0;
    return res;
  }
  const double df = static_cast<double>(n - 2);
  const double se = std::sqrt(rss / df / sxx);
  res.t_statistic = slope / se;
  boost::math::students_t dist(df);
  res.p_value = 2.0 * boost::math::cdf(boost::math::complement(
                          dist, std::fabs(res.t_statistic)));
  res.p_value = std::clamp(res.p_value, 0.0, 1.0);
  return res;
}

TestResult covariate_test_categorical(const std::vector<double>& y_codes,
                                      const std::vector<double>& x,
                                      std::size_t n_categories) {
  const std::size_t n = y_codes.size();
  if (n != x.size()) throw DataError("covariate_test: length mismatch");
  if (n < 3) throw DataError("covariate_test needs n >= 3");

  std::vector<std::size_t> count(n_categories, 0);
  std::vector<double> sum(n_categories, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto g = static_cast<std::size_t>(y_codes[i]);
    count[g] += 1;
    sum[g] += x[i];
  }
  std::size_t groups = 0;
  for (std::size_t c : count) {
    if (c > 0) ++groups;
  }

  TestResult res;
  if (groups < 2 || n <= groups) {
    res.p_value = 1.0;
    return res;
  }
  const double grand = mean_of(x);
  double ssb = 0.0, sst = 0.0;
  for (std::size_t g = 0; g < n_categories; ++g) {
    if (count[g] == 0) continue;
    const double gm = sum[g] / static_cast<double>(count[g]);
    ssb += static_cast<double>(count[g]) * (gm - grand) * (gm - grand);
  }
  for (std::size_t i = 0; i < n; ++i) {
    sst += (x[i] - grand) * (x[i] - grand);
  }
  const double ssw = sst - ssb;
  const double df1 = static_cast<double>(groups - 1);
  const double df2 = static_cast<double>(n - groups);
  if (ssw <= 1e-12 * std::max(sst, 1e-300)) {
    res.p_value = ssb > 0.0 ? 0.0 : 1.0;
    res.t_statistic = ssb > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return res;
  }
  const double f = (ssb / df1) / (ssw / df2);
  res.t_statistic = f;
  boost::math::fisher_f dist(df1, df2);
  res.p_value = boost::math::cdf(boost::math::complement(dist, f));
  res.p_value = std::clamp(res.p_value, 0.0, 1.0);
  return res;
}

SplitDecision select_split_variable(const NodeView& view,
                                    const FitControls& controls) {
  const std::size_t m = view.x.size();
  SplitDecision decision;
  double best_p = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m; ++j) {
    TestResult r = view.outcome_kind == ColumnKind::Continuous
                       ? covariate_test(view.y, view.x[j])
                       : covariate_test_categorical(view.y, view.x[j],
                                                    view.n_categories);
    if (r.p_value < best_p) {
      best_p = r.p_value;
      decision.covariate_index = j;
    }
  }
  decision.adjusted_p = std::min(1.0, static_cast<double>(m) * best_p);
  decision.split = decision.adjusted_p <= controls.alpha;
  return decision;
}

SplitPoint best_split_point(const std::vector<double>& y,
                            const std::vector<double>& x,
                            std::size_t minbucket, ColumnKind outcome_kind,
                            std::size_t n_categories) {
  const std::size_t n = y.size();
  if (n != x.size()) throw DataError("best_split_point: length mismatch");
  if (n < 2 * minbucket) throw DataError("best_split_point: too few rows");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

  const bool categorical = outcome_kind == ColumnKind::Categorical;
  std::vector<std::size_t> total_counts(categorical ? n_categories : 0, 0);
  std::vector<std::size_t> left_counts(categorical ? n_categories : 0, 0);
  double total_sum = 0.0;
  if (categorical) {
    for (double code : y) total_counts[static_cast<std::size_t>(code)] += 1;
  } else {
    for (double v : y) total_sum += v;
  }
  const double grand_mean = total_sum / static_cast<double>(n);

  bool found = false;
  SplitPoint best;
  double left_sum = 0.0;
  std::size_t left_n = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t row = order[i];
    left_n += 1;
    if (categorical) {
      left_counts[static_cast<std::size_t>(y[row])] += 1;
    } else {
      left_sum += y[row];
    }
    // candidate breakpoint at the last occurrence of each distinct value
    if (i + 1 < n && x[order[i + 1]] == x[row]) continue;
    const std::size_t right_n = n - left_n;
    if (left_n < minbucket || right_n < minbucket) continue;

    double criterion;
    if (categorical) {
      // Pearson chi-square of the 2 x c contingency table
      criterion = 0.0;
      for (std::size_t c = 0; c < n_categories; ++c) {
        if (total_counts[c] == 0) continue;
        const double col = static_cast<double>(total_counts[c]);
        const double e_left =
            static_cast<double>(left_n) * col / static_cast<double>(n);
        const double e_right =
            static_cast<double>(right_n) * col / static_cast<double>(n);
        const double o_left = static_cast<double>(left_counts[c]);
        const double o_right = col - o_left;
        criterion += (o_left - e_left) * (o_left - e_left) / e_left;
        criterion += (o_right - e_right) * (o_right - e_right) / e_right;
      }
    } else {
      const double mean_left = left_sum / static_cast<double>(left_n);
      const double mean_right =
          (total_sum - left_sum) / static_cast<double>(right_n);
      criterion =
          static_cast<double>(left_n) * (mean_left - grand_mean) * (mean_left - grand_mean) +
          static_cast<double>(right_n) * (mean_right - grand_mean) * (mean_right - grand_mean);
    }
    if (!found || criterion > best.criterion) {
      found = true;
      best.criterion = criterion;
      best.breakpoint = x[row];
    }
  }
  if (!found) throw DataError("no admissible split point");
  return best;
}

namespace {

NodeSummary summarize(const std::vector<double>& y,
                      const std::vector<std::size_t>& rows,
                      ColumnKind outcome_kind, std::size_t n_categories) {
  NodeSummary s;
  if (outcome_kind == ColumnKind::Categorical) {
    s.category_counts.assign(n_categories, 0);
    for (std::size_t r : rows) {
      s.category_counts[static_cast<std::size_t>(y[r])] += 1;
    }
  } else {
    double sum = 0.0;
    for (std::size_t r : rows) sum += y[r];
    s.mean = sum / static_cast<double>(rows.size());
    for (std::size_t r : rows) s.err += (y[r] - s.mean) * (y[r] - s.mean);
  }
  return s;
}

struct Fitter {
  const Dataset& dataset;
  const FitControls& controls;
  Tree tree;

  std::size_t grow(const std::vector<std::size_t>& rows, std::size_t depth) {
    const std::size_t id = tree.nodes.size() + 1;
    tree.nodes.emplace_back();

    const auto& y = dataset.outcome.values;
    const std::size_t n_cat = dataset.outcome.labels.size();
    Node nd;
    nd.id = id;
    nd.n = rows.size();
    nd.summary = summarize(y, rows, dataset.outcome.kind, n_cat);

    std::optional<std::pair<std::size_t, double>> chosen;  // covariate, breakpoint
    const bool depth_ok = controls.maxdepth == 0 || depth < controls.maxdepth;
    if (depth_ok && rows.size() >= controls.minsplit) {
      NodeView view;
      view.outcome_kind = dataset.outcome.kind;
      view.n_categories = n_cat;
      view.y.reserve(rows.size());
      for (std::size_t r : rows) view.y.push_back(y[r]);
      view.x.resize(dataset.n_covariates());
      for (std::size_t j = 0; j < dataset.n_covariates(); ++j) {
        view.x[j].reserve(rows.size());
        for (std::size_t r : rows) {
          view.x[j].push_back(dataset.covariates[j].values[r]);
        }
      }
      const SplitDecision decision = select_split_variable(view, controls);
      if (decision.split) {
        try {
          const SplitPoint sp =
              best_split_point(view.y, view.x[decision.covariate_index],
                               controls.minbucket, dataset.outcome.kind, n_cat);
          chosen = {decision.covariate_index, sp.breakpoint};
        } catch (const DataError&) {
          // no admissible split; node stays terminal
        }
      }
    }

    if (!chosen) {
      TerminalData term;
      term.row_ids = rows;
      nd.kind = std::move(term);
      tree.nodes[id - 1] = std::move(nd);
      return id;
    }

    const auto [cov, breakpoint] = *chosen;
    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : rows) {
      (dataset.covariates[cov].values[r] <= breakpoint ? left_rows : right_rows)
          .push_back(r);
    }
    InnerData in;
    in.split.covariate = dataset.covariates[cov].name;
    in.split.breakpoint = breakpoint;
    in.split.predicate = SplitPredicate::Le;
    in.left_id = grow(left_rows, depth + 1);
    in.right_id = grow(right_rows, depth + 1);
    nd.kind = std::move(in);
    tree.nodes[id - 1] = std::move(nd);
    return id;
  }
};

}  // namespace

Tree fit(const Dataset& dataset, const FitControls& controls) {
  controls.validate();
  if (dataset.n_rows() < 1 || dataset.n_covariates() < 1) {
    throw DataError("fit: empty dataset");
  }
  for (const auto& cov : dataset.covariates) {
    if (cov.kind != ColumnKind::Continuous) {
      throw DataError("fit: covariate '" + cov.name +
                      "' is categorical; only continuous covariates are supported");
    }
  }

  Fitter fitter{dataset, controls, {}};
  fitter.tree.outcome_meta.name = dataset.outcome.name;
  fitter.tree.outcome_meta.kind = dataset.outcome.kind;
  fitter.tree.outcome_meta.categories = dataset.outcome.labels;
  for (const auto& cov : dataset.covariates) {
    fitter.tree.covariate_meta.push_back({cov.name, cov.kind});
  }
  std::vector<std::size_t> all_rows(dataset.n_rows());
  for (std::size_t r = 0; r < all_rows.size(); ++r) all_rows[r] = r;
  fitter.grow(all_rows, 0);
  return fitter.tree;
}

std::size_t predict_node(const Tree& tree, const std::vector<double>& row) {
  if (row.size() != tree.covariate_meta.size()) {
    throw DataError("predict: row has " + std::to_string(row.size()) +
                    " values, tree expects " +
                    std::to_string(tree.covariate_meta.size()));
  }
  std::size_t id = 1;
  while (!tree.node(id).is_terminal()) {
    const InnerData& in = tree.node(id).inner();
    std::size_t j = 0;
    while (tree.covariate_meta[j].name != in.split.covariate) ++j;
    id = in.split.goes_left(row[j]) ? in.left_id : in.right_id;
  }
  return id;
}

double predict(const Tree& tree, const std::vector<double>& row) {
  return tree.node(predict_node(tree, row)).summary.mean;
}

std::vector<double> predict_distribution(const Tree& tree,
                                         const std::vector<double>& row) {
  const Node& nd = tree.node(predict_node(tree, row));
  std::vector<double> probs;
  for (std::size_t c : nd.summary.category_counts) {
    probs.push_back(static_cast<double>(c) / static_cast<double>(nd.n));
  }
  return probs;
}

}  // namespace treeviz
