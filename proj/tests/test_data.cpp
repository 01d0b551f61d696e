#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "treeviz/data.hpp"

using namespace treeviz;

namespace {

std::string write_temp_csv(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path.string();
}

// Independent type-7 oracle: walks the sorted vector and interpolates
// from index arithmetic only.
double quantile_oracle(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = (v.size() - 1) * p + 1;  // 1-based
  const std::size_t lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo >= v.size()) return v.back();
  return v[lo - 1] * (1 - frac) + v[lo] * frac;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double area = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    area += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  }
  return area;
}

}  // namespace

TEST_CASE("load_csv minimal table") {
  const auto path = write_temp_csv("tv_min.csv", "y,x\n1,2\n3,4\n");
  const Dataset ds = load_csv(path, "y", {"x"});
  CHECK(ds.n_rows() == 2);
  CHECK(ds.n_covariates() == 1);
  CHECK(ds.outcome.kind == ColumnKind::Continuous);
  CHECK(ds.outcome.values == std::vector<double>{1, 3});
}

TEST_CASE("load_csv missing column") {
  const auto path = write_temp_csv("tv_min2.csv", "y,x\n1,2\n3,4\n");
  CHECK_THROWS_AS(load_csv(path, "z", {"x"}), DataError);
  CHECK_THROWS_AS(load_csv("/no/such/file.csv", "y", {"x"}), DataError);
}

TEST_CASE("load_csv kind inference falls back to categorical") {
  const auto path = write_temp_csv("tv_cat.csv", "y,x\n1,abc\n2,abc\n");
  const Dataset ds = load_csv(path, "y", {"x"});
  CHECK(ds.covariates[0].kind == ColumnKind::Categorical);
  CHECK(ds.covariates[0].labels == std::vector<std::string>{"abc"});
}

TEST_CASE("load_csv rejects bad rows") {
  const auto path = write_temp_csv("tv_bad.csv", "y,x\n1,2,3\n");
  CHECK_THROWS_AS(load_csv(path, "y", {"x"}), DataError);
  const auto path2 = write_temp_csv("tv_bad2.csv", "y,x\n1,abc\n");
  CHECK_THROWS_AS(
      load_csv(path2, "y", {"x"}, {{"x", ColumnKind::Continuous}}), DataError);
  const auto path3 = write_temp_csv("tv_bad3.csv", "y,x\n1,\n");
  CHECK_THROWS_AS(load_csv(path3, "y", {"x"}), DataError);
}

TEST_CASE("quantile type-7 hand values") {
  CHECK(quantile({5}, 0.0) == 5);
  CHECK(quantile({5}, 0.73) == 5);
  CHECK(quantile({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(quantile({10, 20}, 0.25) == doctest::Approx(12.5).epsilon(1e-12));
  CHECK_THROWS_AS(quantile({}, 0.5), DataError);
  CHECK_THROWS_AS(quantile({1.0}, 1.5), DataError);
}

TEST_CASE("quantile agrees with oracle and is monotone") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unif(-100, 100);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> v(1 + rng() % 60);
    for (auto& x : v) x = unif(rng);
    double prev = -1e300;
    for (int i = 0; i <= 20; ++i) {
      const double p = i / 20.0;
      const double q = quantile(v, p);
      CHECK(q == doctest::Approx(quantile_oracle(v, p)).epsilon(1e-12));
      CHECK(q >= prev);
      prev = q;
    }
    CHECK(quantile(v, 0.0) == *std::min_element(v.begin(), v.end()));
    CHECK(quantile(v, 1.0) == *std::max_element(v.begin(), v.end()));
  }
}

TEST_CASE("percentile_of counts") {
  CHECK(percentile_of({1, 2, 3, 4}, 4) == 1.0);
  CHECK(percentile_of({1, 2, 3, 4}, 0) == 0.0);
  CHECK(percentile_of({1, 2, 3, 4, 5}, 2) == doctest::Approx(0.4));
  CHECK_THROWS_AS(percentile_of({}, 1.0), DataError);
}

TEST_CASE("quantile/percentile consistency on the grid") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unif(0, 1);
  std::vector<double> v(40);
  for (auto& x : v) x = unif(rng);
  const auto n = static_cast<double>(v.size());
  // tiny nudge absorbs the float error in the p grid itself
  const double eps = 1e-9;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double p = static_cast<double>(i) / (n - 1);
    CHECK(percentile_of(v, quantile(v, p) + eps) >= p - 1e-12);
    const double down = std::max(0.0, p - 1.0 / (2 * n));
    CHECK(percentile_of(v, quantile(v, p) + eps) -
              percentile_of(v, quantile(v, down) - eps) <=
          1.0 / n + 1e-12);
  }
}

TEST_CASE("histogram sturges binning") {
  const Histogram h = histogram({0, 1, 2, 3});
  REQUIRE(h.n_bins() == 3);
  CHECK(h.counts == std::vector<std::size_t>{2, 1, 1});
  CHECK(h.bin_edges.front() == 0);
  CHECK(h.bin_edges.back() == 3);

  const Histogram h2 = histogram({0, 1});
  REQUIRE(h2.n_bins() == 2);
  CHECK(h2.counts == std::vector<std::size_t>{1, 1});
  CHECK(h2.bin_edges[1] == doctest::Approx(0.5));
}

TEST_CASE("histogram degenerate range") {
  const Histogram h = histogram({7, 7, 7});
  REQUIRE(h.n_bins() == 1);
  CHECK(h.counts[0] == 3);
  CHECK(h.bin_edges == std::vector<double>{6.5, 7.5});
  CHECK(*h.bin_means[0] == doctest::Approx(7.0));
  CHECK_THROWS_AS(histogram({}), DataError);
}

TEST_CASE("histogram counts sum and membership reconstitution") {
  std::mt19937 rng(3);
  std::normal_distribution<double> norm(0, 2);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> v(2 + rng() % 200);
    for (auto& x : v) x = norm(rng);
    const Histogram h = histogram(v);
    std::size_t total = 0;
    for (auto c : h.counts) total += c;
    CHECK(total == v.size());
    // recompute bin assignment directly against edges
    std::vector<std::size_t> counts(h.n_bins(), 0);
    for (double x : v) {
      for (std::size_t b = 0; b < h.n_bins(); ++b) {
        const bool in_left = b == 0 ? x >= h.bin_edges[0] : x > h.bin_edges[b];
        if (in_left && x <= h.bin_edges[b + 1]) {
          counts[b] += 1;
          break;
        }
      }
    }
    CHECK(counts == h.counts);
  }
}

TEST_CASE("histogram paired bin means") {
  const std::vector<double> v{0, 1, 2, 3};
  const std::vector<double> y{10, 20, 30, 40};
  const Histogram h = histogram(v, &y);
  CHECK(*h.bin_means[0] == doctest::Approx(15.0));
  CHECK(*h.bin_means[1] == doctest::Approx(30.0));
  CHECK(*h.bin_means[2] == doctest::Approx(40.0));
}

TEST_CASE("kde errors") {
  CHECK_THROWS_AS(kde({0, 0, 0}), DataError);
  CHECK_THROWS_AS(kde({1}), DataError);
}

TEST_CASE("kde normal sample matches the density at 0") {
  std::mt19937 rng(1234);
  std::normal_distribution<double> norm(0, 1);
  std::vector<double> v(1000);
  for (auto& x : v) x = norm(rng);
  const DensityCurve curve = kde(v);
  std::size_t nearest = 0;
  for (std::size_t i = 1; i < curve.grid.size(); ++i) {
    if (std::fabs(curve.grid[i]) < std::fabs(curve.grid[nearest])) nearest = i;
  }
  CHECK(curve.density[nearest] == doctest::Approx(0.399).epsilon(0.13));
  CHECK(std::fabs(curve.density[nearest] - 0.399) < 0.05);
}

TEST_CASE("kde symmetry and normalization") {
  const DensityCurve curve = kde({-1, 1});
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    const std::size_t j = curve.grid.size() - 1 - i;
    CHECK(std::fabs(curve.density[i] - curve.density[j]) < 1e-9);
  }
  std::mt19937 rng(5);
  std::normal_distribution<double> norm(3, 7);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> v(20 + rng() % 300);
    for (auto& x : v) x = norm(rng);
    const DensityCurve c = kde(v);
    for (double d : c.density) CHECK(d >= 0.0);
    CHECK(trapezoid(c.grid, c.density) == doctest::Approx(1.0).epsilon(0.01));
  }
}

TEST_CASE("discretize quartile labels") {
  std::vector<double> values{558, 1200, 1561, 1700, 1908, 2000, 2356, 5956};
  const Column c = discretize(values, {558, 1561, 1908, 2356, 5956}, true, 4);
  CHECK(c.labels == std::vector<std::string>{"[558,1561]", "(1561,1908]",
                                             "(1908,2356]", "(2356,5956]"});
  CHECK(c.values[0] == 0);   // 558 folded into the first interval
  CHECK(c.values[2] == 0);   // 1561 right-closed
  CHECK(c.values[3] == 1);
}

TEST_CASE("discretize interval rule") {
  const Column c = discretize({1, 2, 3}, {1, 2, 3}, true, 4);
  CHECK(c.values == std::vector<double>{0, 0, 1});
  CHECK(c.labels == std::vector<std::string>{"[1,2]", "(2,3]"});
  CHECK_THROWS_AS(discretize({0}, {1, 2}, true, 4), DataError);
  CHECK_THROWS_AS(discretize({1.5}, {2, 1}, true, 4), DataError);
}

TEST_CASE("discretize assigned intervals contain their values") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> unif(0, 10);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<double> breaks{0, 2.5, 5, 7.5, 10};
    std::vector<double> v(50);
    for (auto& x : v) x = unif(rng);
    const Column c = discretize(v, breaks, true, 4);
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto code = static_cast<std::size_t>(c.values[i]);
      const bool left_ok =
          code == 0 ? v[i] >= breaks[code] : v[i] > breaks[code];
      CHECK(left_ok);
      CHECK(v[i] <= breaks[code + 1]);
    }
  }
}
