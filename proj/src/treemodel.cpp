#include "treeviz/treemodel.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace treeviz {

using nlohmann::json;

std::size_t NodeSummary::modal_category() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < category_counts.size(); ++i) {
    if (category_counts[i] > category_counts[best]) best = i;
  }
  return best;
}

const Node& Tree::node(std::size_t id) const {
  if (id < 1 || id > nodes.size()) {
    throw DataError("unknown node id: " + std::to_string(id));
  }
  return nodes[id - 1];
}

std::vector<std::size_t> Tree::terminal_ids() const {
  std::vector<std::size_t> ids;
  for (const auto& nd : nodes) {
    if (nd.is_terminal()) ids.push_back(nd.id);
  }
  return ids;
}

std::size_t Tree::inner_count() const {
  return nodes.size() - terminal_ids().size();
}

bool Interval::contains(double x) const {
  if (lower_open ? !(x > lower) : !(x >= lower)) return false;
  if (upper_open ? !(x < upper) : !(x <= upper)) return false;
  return true;
}

std::vector<Interval> consolidate(const std::vector<RawCondition>& conditions) {
  std::vector<Interval> result;
  auto interval_for = [&](const std::string& cov) -> Interval& {
    for (auto& iv : result) {
      if (iv.covariate == cov) return iv;
    }
    result.push_back(Interval{cov});
    return result.back();
  };
  for (const auto& c : conditions) {
    Interval& iv = interval_for(c.covariate);
    if (c.is_upper) {
      if (c.bound < iv.upper || (c.bound == iv.upper && c.open && !iv.upper_open)) {
        iv.upper = c.bound;
        iv.upper_open = c.open;
      }
    } else {
      if (c.bound > iv.lower || (c.bound == iv.lower && c.open && !iv.lower_open)) {
        iv.lower = c.bound;
        iv.lower_open = c.open;
      }
    }
  }
  for (const auto& iv : result) {
    const bool empty = iv.lower > iv.upper ||
                       (iv.lower == iv.upper && (iv.lower_open || iv.upper_open));
    if (empty) {
      throw DataError("empty interval for covariate '" + iv.covariate +
                      "': path conditions contradict");
    }
  }
  return result;
}

SubgroupPath path_node(const Tree& tree, std::size_t terminal_id) {
  const Node& target = tree.node(terminal_id);
  if (!target.is_terminal()) {
    throw DataError("node " + std::to_string(terminal_id) + " is not terminal");
  }

  // Root-to-leaf descent; each inner node contributes one condition.
  std::vector<RawCondition> raw;
  std::size_t id = 1;
  while (id != terminal_id) {
    const Node& nd = tree.node(id);
    if (nd.is_terminal()) {
      throw DataError("node " + std::to_string(terminal_id) + " unreachable");
    }
    const InnerData& in = nd.inner();
    // terminal_id lies in exactly one subtree; preorder ids make the
    // right subtree the ids >= right_id
    const bool go_left = terminal_id < in.right_id;
    RawCondition cond;
    cond.covariate = in.split.covariate;
    cond.bound = in.split.breakpoint;
    if (go_left) {
      cond.is_upper = true;
      cond.open = in.split.predicate == SplitPredicate::Lt;
      id = in.left_id;
    } else {
      cond.is_upper = false;
      cond.open = in.split.predicate == SplitPredicate::Le;
      id = in.right_id;
    }
    raw.push_back(cond);
  }

  SubgroupPath path;
  path.terminal_id = terminal_id;
  path.raw_conditions = std::move(raw);
  path.constraints = consolidate(path.raw_conditions);
  path.n = target.n;
  path.summary = target.summary;
  return path;
}

std::vector<std::size_t> subgroup_rows(const Dataset& dataset,
                                       const SubgroupPath& path) {
  for (const auto& iv : path.constraints) {
    if (!dataset.has_covariate(iv.covariate)) {
      throw DataError("dataset lacks covariate '" + iv.covariate + "'");
    }
  }
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < dataset.n_rows(); ++r) {
    bool ok = true;
    for (const auto& iv : path.constraints) {
      if (!iv.contains(dataset.covariate(iv.covariate).values[r])) {
        ok = false;
        break;
      }
    }
    if (ok) rows.push_back(r);
  }
  return rows;
}

namespace {

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw DataError("unknown field '" + it.key() + "' in " + where);
    }
  }
}

// Preorder check: node i's subtree occupies a contiguous id range
// starting at i. Returns one past the last id of the subtree.
std::size_t check_preorder(const Tree& tree, std::size_t id) {
  const Node& nd = tree.node(id);
  if (nd.id != id) throw DataError("node ids not in preorder");
  if (nd.is_terminal()) return id + 1;
  const InnerData& in = nd.inner();
  if (in.left_id != id + 1) throw DataError("node ids not in preorder");
  const std::size_t after_left = check_preorder(tree, in.left_id);
  if (in.right_id != after_left) throw DataError("node ids not in preorder");
  if (nd.n != tree.node(in.left_id).n + tree.node(in.right_id).n) {
    throw DataError("inner node " + std::to_string(id) +
                    ": n does not equal sum of children");
  }
  return check_preorder(tree, in.right_id);
}

}  // namespace

Tree import_tree(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw DataError("document root must be an object");
  require_keys(doc, {"version", "outcome", "covariates", "nodes"}, "document");
  if (!doc.contains("version") || !doc["version"].is_number_integer() ||
      doc["version"].get<int>() != 1) {
    throw DataError("unsupported document version (expected 1)");
  }

  Tree tree;
  const json& oc = doc.at("outcome");
  require_keys(oc, {"name", "kind", "categories"}, "outcome");
  tree.outcome_meta.name = oc.at("name").get<std::string>();
  const std::string okind = oc.at("kind").get<std::string>();
  if (okind == "continuous") {
    tree.outcome_meta.kind = ColumnKind::Continuous;
    if (oc.contains("categories")) {
      throw DataError("continuous outcome must not list categories");
    }
  } else if (okind == "categorical") {
    tree.outcome_meta.kind = ColumnKind::Categorical;
    tree.outcome_meta.categories =
        oc.at("categories").get<std::vector<std::string>>();
    if (tree.outcome_meta.categories.empty()) {
      throw DataError("categorical outcome needs categories");
    }
  } else {
    throw DataError("outcome kind must be 'continuous' or 'categorical'");
  }

  for (const json& cv : doc.at("covariates")) {
    require_keys(cv, {"name", "kind"}, "covariate");
    CovariateMeta meta;
    meta.name = cv.at("name").get<std::string>();
    const std::string ckind = cv.at("kind").get<std::string>();
    if (ckind != "continuous" && ckind != "categorical") {
      throw DataError("covariate kind must be 'continuous' or 'categorical'");
    }
    meta.kind = ckind == "continuous" ? ColumnKind::Continuous
                                      : ColumnKind::Categorical;
    tree.covariate_meta.push_back(meta);
  }

  const json& nodes = doc.at("nodes");
  if (!nodes.is_array() || nodes.empty()) throw DataError("nodes must be a non-empty list");
  for (const json& jn : nodes) {
    require_keys(jn, {"id", "n", "split", "terminal"}, "node");
    Node nd;
    nd.id = jn.at("id").get<std::size_t>();
    nd.n = jn.at("n").get<std::size_t>();
    const bool has_split = jn.contains("split");
    const bool has_terminal = jn.contains("terminal");
    if (has_split == has_terminal) {
      throw DataError("node " + std::to_string(nd.id) +
                      " needs exactly one of 'split' or 'terminal'");
    }
    if (has_split) {
      const json& js = jn.at("split");
      require_keys(js, {"covariate", "breakpoint", "predicate", "left", "right"},
                   "split");
      InnerData in;
      in.split.covariate = js.at("covariate").get<std::string>();
      in.split.breakpoint = js.at("breakpoint").get<double>();
      const std::string pred = js.at("predicate").get<std::string>();
      if (pred == "le") {
        in.split.predicate = SplitPredicate::Le;
      } else if (pred == "lt") {
        in.split.predicate = SplitPredicate::Lt;
      } else {
        throw DataError("split predicate must be 'le' or 'lt'");
      }
      in.left_id = js.at("left").get<std::size_t>();
      in.right_id = js.at("right").get<std::size_t>();
      bool known = false;
      for (const auto& meta : tree.covariate_meta) {
        known = known || meta.name == in.split.covariate;
      }
      if (!known) {
        throw DataError("split covariate '" + in.split.covariate +
                        "' not declared");
      }
      nd.kind = in;
    } else {
      const json& jt = jn.at("terminal");
      if (tree.outcome_meta.kind == ColumnKind::Continuous) {
        require_keys(jt, {"mean", "err"}, "terminal");
        nd.summary.mean = jt.at("mean").get<double>();
        nd.summary.err = jt.at("err").get<double>();
      } else {
        require_keys(jt, {"counts"}, "terminal");
        nd.summary.category_counts =
            jt.at("counts").get<std::vector<std::size_t>>();
        if (nd.summary.category_counts.size() !=
            tree.outcome_meta.categories.size()) {
          throw DataError("terminal counts length mismatch");
        }
        std::size_t total = 0;
        for (std::size_t c : nd.summary.category_counts) total += c;
        if (total != nd.n) {
          throw DataError("terminal counts do not sum to n");
        }
      }
      nd.kind = TerminalData{};
    }
    tree.nodes.push_back(std::move(nd));
  }

  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (tree.nodes[i].id != i + 1) {
      throw DataError("node ids must be 1..N in order");
    }
  }
  if (check_preorder(tree, 1) != tree.nodes.size() + 1) {
    throw DataError("unreachable nodes in document");
  }
  return tree;
}

Tree import_tree_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return import_tree(ss.str());
}

std::string export_document(const Tree& tree) {
  json doc;
  doc["version"] = 1;
  json oc;
  oc["name"] = tree.outcome_meta.name;
  oc["kind"] = tree.outcome_meta.kind == ColumnKind::Continuous ? "continuous"
                                                                 : "categorical";
  if (tree.outcome_meta.kind == ColumnKind::Categorical) {
    oc["categories"] = tree.outcome_meta.categories;
  }
  doc["outcome"] = oc;
  doc["covariates"] = json::array();
  for (const auto& meta : tree.covariate_meta) {
    doc["covariates"].push_back(
        {{"name", meta.name},
         {"kind", meta.kind == ColumnKind::Continuous ? "continuous"
                                                      : "categorical"}});
  }
  doc["nodes"] = json::array();
  for (const auto& nd : tree.nodes) {
    json jn;
    jn["id"] = nd.id;
    jn["n"] = nd.n;
    if (nd.is_terminal()) {
      if (tree.outcome_meta.kind == ColumnKind::Continuous) {
        jn["terminal"] = {{"mean", nd.summary.mean}, {"err", nd.summary.err}};
      } else {
        jn["terminal"] = {{"counts", nd.summary.category_counts}};
      }
    } else {
      const InnerData& in = nd.inner();
      jn["split"] = {
          {"covariate", in.split.covariate},
          {"breakpoint", in.split.breakpoint},
          {"predicate", in.split.predicate == SplitPredicate::Le ? "le" : "lt"},
          {"left", in.left_id},
          {"right", in.right_id}};
    }
    doc["nodes"].push_back(jn);
  }
  return doc.dump(2) + "\n";
}

namespace {

std::string format_stat(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.7g", x);
  return buf;
}

std::string terminal_suffix(const Tree& tree, const Node& nd) {
  char buf[128];
  if (tree.outcome_meta.kind == ColumnKind::Continuous) {
    std::snprintf(buf, sizeof(buf), ": %s (n = %zu, err = %.1f)",
                  format_stat(nd.summary.mean).c_str(), nd.n, nd.summary.err);
  } else {
    const auto& label = tree.outcome_meta.categories[nd.summary.modal_category()];
    std::snprintf(buf, sizeof(buf), ": %s (n = %zu)", label.c_str(), nd.n);
  }
  return buf;
}

void print_node(const Tree& tree, std::size_t id, std::size_t depth,
                const std::string& condition, std::ostream& out) {
  for (std::size_t i = 0; i < depth; ++i) out << "|   ";
  const Node& nd = tree.node(id);
  out << "[" << id << "] " << condition;
  if (nd.is_terminal()) {
    out << terminal_suffix(tree, nd);
  }
  out << "\n";
  if (!nd.is_terminal()) {
    const InnerData& in = nd.inner();
    const std::string v = format_stat(in.split.breakpoint);
    const bool lt = in.split.predicate == SplitPredicate::Lt;
    print_node(tree, in.left_id, depth + 1,
               in.split.covariate + (lt ? " < " : " <= ") + v, out);
    print_node(tree, in.right_id, depth + 1,
               in.split.covariate + (lt ? " >= " : " > ") + v, out);
  }
}

}  // namespace

std::string export_text(const Tree& tree) {
  std::ostringstream out;
  print_node(tree, 1, 0, "root", out);
  out << "\n";
  out << "Number of inner nodes: " << tree.inner_count() << "\n";
  out << "Number of terminal nodes: " << tree.terminal_ids().size() << "\n";
  return out.str();
}

}  // namespace treeviz
