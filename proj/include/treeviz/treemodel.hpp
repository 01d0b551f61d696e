#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "treeviz/data.hpp"

namespace treeviz {

// Split predicate direction: Le routes value <= breakpoint left,
// Lt routes value < breakpoint left. Fitted trees always use Le;
// Lt exists so imported "<" splits keep their printed breakpoints.
enum class SplitPredicate { Le, Lt };

struct Split {
  std::string covariate;
  double breakpoint = 0.0;
  SplitPredicate predicate = SplitPredicate::Le;

  bool goes_left(double value) const {
    return predicate == SplitPredicate::Le ? value <= breakpoint
                                           : value < breakpoint;
  }
};

// Outcome summary held by every node. Continuous: mean and residual
// sum of squares. Categorical: per-category counts.
struct NodeSummary {
  double mean = 0.0;
  double err = 0.0;
  std::vector<std::size_t> category_counts;  // empty for continuous

  std::size_t modal_category() const;
};

struct InnerData {
  Split split;
  std::size_t left_id = 0;
  std::size_t right_id = 0;
};

struct TerminalData {
  std::vector<std::size_t> row_ids;  // training membership; empty for imports
};

struct Node {
  std::size_t id = 0;
  std::size_t n = 0;
  NodeSummary summary;
  std::variant<InnerData, TerminalData> kind;

  bool is_terminal() const { return std::holds_alternative<TerminalData>(kind); }
  const InnerData& inner() const { return std::get<InnerData>(kind); }
  const TerminalData& terminal() const { return std::get<TerminalData>(kind); }
};

struct OutcomeMeta {
  std::string name;
  ColumnKind kind = ColumnKind::Continuous;
  std::vector<std::string> categories;
};

struct CovariateMeta {
  std::string name;
  ColumnKind kind = ColumnKind::Continuous;
};

// Recursive binary partition. Node ids are 1..N in preorder; node id i
// lives at nodes[i-1]. Immutable once built.
struct Tree {
  std::vector<Node> nodes;
  OutcomeMeta outcome_meta;
  std::vector<CovariateMeta> covariate_meta;

  const Node& node(std::size_t id) const;
  std::vector<std::size_t> terminal_ids() const;
  std::size_t inner_count() const;
};

// One raw root-to-leaf condition as collected by path_node.
struct RawCondition {
  std::string covariate;
  bool is_upper = false;   // true: x <= / < bound, false: x > / >= bound
  bool open = false;       // strict inequality
  double bound = 0.0;
};

// Consolidated covariate interval. Unbounded ends are +-infinity.
struct Interval {
  std::string covariate;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  bool lower_open = true;  // (lower, ...
  bool upper_open = false; // ..., upper]

  bool contains(double x) const;
  bool lower_unbounded() const { return lower == -std::numeric_limits<double>::infinity(); }
  bool upper_unbounded() const { return upper == std::numeric_limits<double>::infinity(); }
};

struct SubgroupPath {
  std::size_t terminal_id = 0;
  std::vector<RawCondition> raw_conditions;  // root-first order
  std::vector<Interval> constraints;         // one per covariate, first-seen order
  std::size_t n = 0;
  NodeSummary summary;
};

// Walks root -> terminal collecting one condition per inner node passed,
// then consolidates them into per-covariate intervals.
SubgroupPath path_node(const Tree& tree, std::size_t terminal_id);

// Intersects raw conditions per covariate: upper = tightest upper bound,
// lower = tightest lower bound. Throws on an empty intersection.
std::vector<Interval> consolidate(const std::vector<RawCondition>& conditions);

// Row indices (0-based) of the dataset satisfying every interval.
std::vector<std::size_t> subgroup_rows(const Dataset& dataset,
                                       const SubgroupPath& path);

// JSON interchange document, schema version 1. Unknown fields rejected.
Tree import_tree(const std::string& document);
Tree import_tree_file(const std::string& path);
std::string export_document(const Tree& tree);

// Bracketed indented listing in the style of a fitted-party printout,
// ending with inner/terminal node counts.
std::string export_text(const Tree& tree);

}  // namespace treeviz
