#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "test_helpers.hpp"
#include "treeviz/ctree.hpp"
#include "treeviz/treemodel.hpp"

using namespace treeviz;

namespace {

const std::string kFixtureDir = TREEVIZ_FIXTURE_DIR;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RawCondition upper(const std::string& cov, double bound, bool open = false) {
  return {cov, true, open, bound};
}
RawCondition lower(const std::string& cov, double bound, bool open = true) {
  return {cov, false, open, bound};
}

}  // namespace

TEST_CASE("import of the cart fixture") {
  const Tree tree = import_tree_file(kFixtureDir + "/rpart_tree.json");
  CHECK(tree.inner_count() == 2);
  const auto terminals = tree.terminal_ids();
  REQUIRE(terminals == std::vector<std::size_t>{3, 4, 5});
  CHECK(tree.node(3).summary.mean == 1660.134);
  CHECK(tree.node(4).summary.mean == 2101.469);
  CHECK(tree.node(5).summary.mean == 2392.051);
  CHECK(tree.node(3).n == 78);
  CHECK(tree.node(4).n == 99);
  CHECK(tree.node(5).n == 49);
  CHECK(tree.node(3).summary.err == 24027139.4);
}

TEST_CASE("import of a single-node document") {
  const std::string doc = R"({
    "version": 1,
    "outcome": {"name": "y", "kind": "continuous"},
    "covariates": [{"name": "x", "kind": "continuous"}],
    "nodes": [{"id": 1, "n": 10, "terminal": {"mean": 5.0, "err": 0.0}}]
  })";
  const Tree tree = import_tree(doc);
  CHECK(tree.nodes.size() == 1);
  CHECK(tree.node(1).is_terminal());
  CHECK(tree.node(1).summary.mean == 5.0);
}

TEST_CASE("import rejects malformed documents") {
  const std::string base = slurp(kFixtureDir + "/rpart_tree.json");

  SUBCASE("inconsistent n bookkeeping") {
    std::string doc = base;
    const auto pos = doc.find("\"n\": 177");
    doc.replace(pos, 8, "\"n\": 178");
    CHECK_THROWS_AS(import_tree(doc), DataError);
  }
  SUBCASE("unknown field") {
    std::string doc = base;
    doc.replace(doc.find("\"version\""), 9, "\"comment\": 0, \"version\"");
    CHECK_THROWS_AS(import_tree(doc), DataError);
  }
  SUBCASE("non-preorder ids") {
    std::string doc = base;
    doc.replace(doc.find("\"left\": 2"), 9, "\"left\": 5");
    CHECK_THROWS_AS(import_tree(doc), DataError);
  }
  SUBCASE("bad version") {
    std::string doc = base;
    doc.replace(doc.find("\"version\": 1"), 12, "\"version\": 2");
    CHECK_THROWS_AS(import_tree(doc), DataError);
  }
  SUBCASE("undeclared split covariate") {
    std::string doc = base;
    doc.replace(doc.find("\"covariate\": \"liking\""), 21,
                "\"covariate\": \"age\"");
    CHECK_THROWS_AS(import_tree(doc), DataError);
  }
  SUBCASE("not json") { CHECK_THROWS_AS(import_tree("nope"), DataError); }
}

TEST_CASE("export_text reproduces the fixture printout") {
  const Tree tree = import_tree_file(kFixtureDir + "/rpart_tree.json");
  const std::string text = export_text(tree);
  const std::string expected =
      "[1] root\n"
      "|   [2] rrvfood < 0.84444\n"
      "|   |   [3] liking < -12.0625: 1660.134 (n = 78, err = 24027139.4)\n"
      "|   |   [4] liking >= -12.0625: 2101.469 (n = 99, err = 29803292.7)\n"
      "|   [5] rrvfood >= 0.84444: 2392.051 (n = 49, err = 34387536.3)\n"
      "\n"
      "Number of inner nodes: 2\n"
      "Number of terminal nodes: 3\n";
  CHECK(text == expected);
  CHECK(text.find("2392.051 (n = 49") != std::string::npos);
}

TEST_CASE("export_text of a root-only tree") {
  Tree tree;
  tree.outcome_meta = {"y", ColumnKind::Continuous, {}};
  tree.covariate_meta.push_back({"x", ColumnKind::Continuous});
  Node nd;
  nd.id = 1;
  nd.n = 10;
  nd.summary.mean = 5.0;
  nd.kind = TerminalData{};
  tree.nodes.push_back(nd);
  const std::string text = export_text(tree);
  CHECK(text.find("[1] root: 5 (n = 10") != std::string::npos);
  CHECK(text.find("Number of inner nodes: 0") != std::string::npos);
}

TEST_CASE("document round trip is stable") {
  const Tree tree = import_tree_file(kFixtureDir + "/rpart_tree.json");
  const std::string doc = export_document(tree);
  const Tree again = import_tree(doc);
  CHECK(export_document(again) == doc);
  CHECK(export_text(again) == export_text(tree));
  REQUIRE(again.nodes.size() == tree.nodes.size());
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    CHECK(again.nodes[i].n == tree.nodes[i].n);
    CHECK(again.nodes[i].is_terminal() == tree.nodes[i].is_terminal());
  }
}

TEST_CASE("path_node on the fixture tree") {
  const Tree tree = import_tree_file(kFixtureDir + "/rpart_tree.json");
  const SubgroupPath path = path_node(tree, 4);
  CHECK(path.n == 99);
  CHECK(path.summary.mean == 2101.469);
  REQUIRE(path.raw_conditions.size() == 2);
  CHECK(path.raw_conditions[0].covariate == "rrvfood");
  CHECK(path.raw_conditions[0].is_upper);
  CHECK(path.raw_conditions[0].open);  // lt split keeps "<" on the left
  CHECK(path.raw_conditions[0].bound == 0.84444);
  CHECK(path.raw_conditions[1].covariate == "liking");
  CHECK(!path.raw_conditions[1].is_upper);
  CHECK(!path.raw_conditions[1].open);  // ">= -12.0625"
  CHECK(path.raw_conditions[1].bound == -12.0625);

  CHECK_THROWS_AS(path_node(tree, 2), DataError);   // inner node
  CHECK_THROWS_AS(path_node(tree, 99), DataError);  // unknown id
}

TEST_CASE("path_node on a root-only tree") {
  const std::string doc = R"({
    "version": 1,
    "outcome": {"name": "y", "kind": "continuous"},
    "covariates": [{"name": "x", "kind": "continuous"}],
    "nodes": [{"id": 1, "n": 7, "terminal": {"mean": 2.0, "err": 1.0}}]
  })";
  const SubgroupPath path = path_node(import_tree(doc), 1);
  CHECK(path.raw_conditions.empty());
  CHECK(path.constraints.empty());
  CHECK(path.n == 7);
}

TEST_CASE("path_node keeps repeated splits in root-first order") {
  std::mt19937 rng(1);
  const Dataset ds = testing::random_dataset(rng, 60, 1);
  FitControls controls;
  controls.alpha = 0.9;  // permissive, force a deep chain
  controls.minbucket = 5;
  controls.minsplit = 10;
  const Tree tree = fit(ds, controls);
  for (std::size_t id : tree.terminal_ids()) {
    const SubgroupPath path = path_node(tree, id);
    // all raw conditions name the single covariate, consolidation yields one
    for (const auto& c : path.raw_conditions) CHECK(c.covariate == "x1");
    if (!path.raw_conditions.empty()) {
      CHECK(path.constraints.size() == 1);
    }
  }
}

TEST_CASE("consolidate interval intersections") {
  const auto one = consolidate({upper("skcal", 500), lower("skcal", 200)});
  REQUIRE(one.size() == 1);
  CHECK(one[0].lower == 200);
  CHECK(one[0].upper == 500);
  CHECK(one[0].lower_open);
  CHECK(!one[0].upper_open);

  const auto two =
      consolidate({upper("x", 3), upper("x", 5), lower("x", 1)});
  REQUIRE(two.size() == 1);
  CHECK(two[0].lower == 1);
  CHECK(two[0].upper == 3);

  CHECK_THROWS_AS(consolidate({upper("x", 2), lower("x", 2)}), DataError);
}

TEST_CASE("consolidate is idempotent") {
  const auto first =
      consolidate({upper("a", 9), lower("a", 2), upper("b", 4)});
  std::vector<RawCondition> rebuilt;
  for (const auto& iv : first) {
    if (!iv.lower_unbounded()) {
      rebuilt.push_back({iv.covariate, false, iv.lower_open, iv.lower});
    }
    if (!iv.upper_unbounded()) {
      rebuilt.push_back({iv.covariate, true, iv.upper_open, iv.upper});
    }
  }
  const auto second = consolidate(rebuilt);
  REQUIRE(second.size() == first.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(second[i].lower == first[i].lower);
    CHECK(second[i].upper == first[i].upper);
    CHECK(second[i].lower_open == first[i].lower_open);
    CHECK(second[i].upper_open == first[i].upper_open);
  }
}

TEST_CASE("subgroup_rows evaluates intervals") {
  Dataset ds;
  ds.outcome = {"y", ColumnKind::Continuous, {1, 2, 3, 4}, {}};
  ds.covariates.push_back({"x", ColumnKind::Continuous, {1, 2, 3, 4}, {}});

  SubgroupPath path;
  CHECK(subgroup_rows(ds, path).size() == 4);  // unconstrained

  Interval iv;
  iv.covariate = "x";
  iv.lower = 1;
  iv.upper = 3;
  path.constraints.push_back(iv);
  CHECK(subgroup_rows(ds, path) == std::vector<std::size_t>{1, 2});

  path.constraints[0].covariate = "nope";
  CHECK_THROWS_AS(subgroup_rows(ds, path), DataError);
}

TEST_CASE("consolidated membership equals raw membership on fitted trees") {
  std::mt19937 rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    const Dataset ds = testing::random_dataset(rng, 80 + rng() % 200, 1 + rng() % 4);
    FitControls controls;
    controls.alpha = 0.5;
    controls.minbucket = 5;
    controls.minsplit = 15;
    const Tree tree = fit(ds, controls);
    std::set<std::size_t> all;
    for (std::size_t id : tree.terminal_ids()) {
      const SubgroupPath path = path_node(tree, id);
      const auto via_intervals = subgroup_rows(ds, path);
      CHECK(via_intervals == testing::rows_by_raw_conditions(ds, path.raw_conditions));
      CHECK(via_intervals == tree.node(id).terminal().row_ids);
      for (std::size_t r : via_intervals) CHECK(all.insert(r).second);
    }
    CHECK(all.size() == ds.n_rows());
  }
}

TEST_CASE("consolidated membership equals raw membership on random trees") {
  std::mt19937 rng(63);
  for (int rep = 0; rep < 25; ++rep) {
    const Dataset ds = testing::random_dataset(rng, 50 + rng() % 100, 1 + rng() % 5);
    const Tree tree = testing::random_tree(rng, ds, 5);
    std::set<std::size_t> all;
    for (std::size_t id : tree.terminal_ids()) {
      const SubgroupPath path = path_node(tree, id);
      const auto via_intervals = subgroup_rows(ds, path);
      CHECK(via_intervals == testing::rows_by_raw_conditions(ds, path.raw_conditions));
      for (std::size_t r : via_intervals) CHECK(all.insert(r).second);
    }
    CHECK(all.size() == ds.n_rows());
  }
}
