#include "treeviz/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "treeviz/ctree.hpp"
#include "treeviz/data.hpp"
#include "treeviz/treemodel.hpp"
#include "treeviz/viz.hpp"

namespace treeviz {

std::pair<std::string, std::vector<std::string>> parse_formula(
    const std::string& text) {
  static const std::regex ident_re("[A-Za-z_.][A-Za-z0-9_.]*");
  const auto tilde = text.find('~');
  if (tilde == std::string::npos || text.find('~', tilde + 1) != std::string::npos) {
    throw UsageError("formula must have the form 'outcome ~ cov1 + cov2'");
  }
  auto trim = [](const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
  };
  auto check_ident = [&](const std::string& s) {
    if (!std::regex_match(s, ident_re)) {
      throw UsageError("invalid identifier in formula: '" + s + "'");
    }
    return s;
  };

  const std::string outcome = check_ident(trim(text.substr(0, tilde)));
  std::vector<std::string> covariates;
  std::set<std::string> seen;
  std::stringstream rhs(text.substr(tilde + 1));
  std::string term;
  while (std::getline(rhs, term, '+')) {
    const std::string name = check_ident(trim(term));
    if (name == outcome) {
      throw UsageError("outcome '" + outcome + "' repeated as covariate");
    }
    if (!seen.insert(name).second) {
      throw UsageError("duplicate covariate '" + name + "' in formula");
    }
    covariates.push_back(name);
  }
  if (covariates.empty()) throw UsageError("formula needs at least one covariate");
  return {outcome, covariates};
}

namespace {

constexpr double kCellPx = 360.0;

struct CommonArgs {
  std::string data_path;
  std::string tree_path;
  std::string formula;
  std::string out_path;
  std::vector<double> cut;

  double alpha = 0.05;
  double mincriterion = 0.95;
  bool alpha_set = false;
  bool mincriterion_set = false;
  FitControls controls;

  RenderOptions render;
  bool no_density = false;
};

void add_fit_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--alpha", args.alpha, "significance level for splitting")
      ->check(CLI::Range(1e-15, 1.0 - 1e-15));
  cmd->add_option("--mincriterion", args.mincriterion,
                  "1 - alpha; alternative way to set the split threshold")
      ->check(CLI::Range(1e-15, 1.0 - 1e-15));
  cmd->add_option("--minbucket", args.controls.minbucket,
                  "minimum rows in a terminal node")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--minsplit", args.controls.minsplit,
                  "minimum rows for a node to be considered for splitting")
      ->check(CLI::Range(2u, 1000000000u));
  cmd->add_option("--maxdepth", args.controls.maxdepth,
                  "maximum tree depth (0 = unlimited)");
  cmd->add_option("--cut", args.cut,
                  "comma-separated breakpoints; discretizes the outcome "
                  "before fitting")
      ->delimiter(',');
}

void add_render_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--color-type", args.render.color_type,
                  "palette: 1 rainbow, 2 heat, 3 terrain, 4 sequential, "
                  "5 diverging")
      ->check(CLI::Range(1, 5));
  cmd->add_option("--bar-alpha", args.render.bar_alpha,
                  "constraint-bar opacity in [0,1]")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--text-title", args.render.text_title, "title text scale");
  cmd->add_option("--text-axis", args.render.text_axis, "axis text scale");
  cmd->add_option("--text-main", args.render.text_main,
                  "main text scale (alias role of --text-title; both scale "
                  "the title region)");
  cmd->add_option("--text-label", args.render.text_label, "bin label scale");
  cmd->add_option("--text-bar", args.render.text_bar, "bar label scale");
  cmd->add_option("--text-percentile", args.render.text_percentile,
                  "percentile label scale");
  cmd->add_option("--text-round", args.render.text_round,
                  "decimal places on displayed values")
      ->check(CLI::NonNegativeNumber);
  cmd->add_flag("--interval", args.render.interval_mode,
                "categorical-outcome bin labeling");
  cmd->add_flag("--add-h-axis", args.render.add_h_axis,
                "draw the histogram value axis");
  cmd->add_flag("--add-p-axis", args.render.add_p_axis,
                "draw the percentile axis");
  cmd->add_flag("--density-line,!--no-density-line", args.render.density_line,
                "overlay the density curve (default on)");
}

FitControls resolve_controls(const CommonArgs& args) {
  if (args.alpha_set && args.mincriterion_set) {
    throw UsageError("--alpha and --mincriterion are two views of the same "
                     "threshold; supply only one");
  }
  FitControls c = args.controls;
  c.alpha = args.mincriterion_set ? 1.0 - args.mincriterion : args.alpha;
  return c;
}

Dataset load_dataset(const CommonArgs& args,
                     const std::pair<std::string, std::vector<std::string>>& model) {
  Dataset ds = load_csv(args.data_path, model.first, model.second);
  if (!args.cut.empty()) {
    if (args.cut.size() < 2) {
      throw UsageError("--cut needs at least two breakpoints");
    }
    ds.outcome = discretize(ds.outcome.values, args.cut, true, 4, model.first);
  }
  return ds;
}

Tree fit_from_args(const CommonArgs& args) {
  const auto model = parse_formula(args.formula);
  const Dataset ds = load_dataset(args, model);
  return fit(ds, resolve_controls(args));
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out << content;
}

int run_fit(const CommonArgs& args) {
  write_file(args.out_path, export_document(fit_from_args(args)));
  return 0;
}

int run_print(const CommonArgs& args) {
  const Tree tree = !args.tree_path.empty() ? import_tree_file(args.tree_path)
                                            : fit_from_args(args);
  std::cout << export_text(tree);
  return 0;
}

int run_render(const CommonArgs& args) {
  Tree tree;
  if (!args.tree_path.empty()) {
    tree = import_tree_file(args.tree_path);
  } else {
    tree = fit_from_args(args);
  }

  // the dataset drives histograms and percentile scaling, so rebuild it
  // from the tree's own column roster when --tree was given
  std::string outcome = tree.outcome_meta.name;
  std::vector<std::string> covariates;
  for (const auto& meta : tree.covariate_meta) covariates.push_back(meta.name);
  Dataset ds = load_csv(args.data_path, outcome, covariates);
  if (tree.outcome_meta.kind == ColumnKind::Categorical &&
      ds.outcome.kind == ColumnKind::Continuous) {
    throw DataError("--data outcome column '" + outcome +
                    "' is continuous but the tree expects categories");
  }

  const Scene scene = render_tree(tree, ds, args.render);
  write_file(args.out_path,
             render_svg(scene, kCellPx * scene.width, kCellPx * scene.height));
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Fit conditional inference trees and render terminal-node "
               "subgroups as SVG figures"};
  app.require_subcommand(1);

  CommonArgs args;

  CLI::App* fit_cmd = app.add_subcommand("fit", "fit a tree and write the "
                                                "interchange document");
  fit_cmd->add_option("--data", args.data_path, "input CSV")->required();
  fit_cmd->add_option("--formula", args.formula,
                      "model spec 'outcome ~ cov1 + cov2'")->required();
  fit_cmd->add_option("--out", args.out_path, "output JSON path")->required();
  add_fit_flags(fit_cmd, args);

  CLI::App* print_cmd = app.add_subcommand("print", "print a tree listing");
  print_cmd->add_option("--tree", args.tree_path, "tree interchange document");
  print_cmd->add_option("--data", args.data_path, "input CSV (when fitting)");
  print_cmd->add_option("--formula", args.formula, "model spec (when fitting)");
  add_fit_flags(print_cmd, args);

  CLI::App* render_cmd = app.add_subcommand("render", "render subgroup "
                                                      "subplots to SVG");
  render_cmd->add_option("--tree", args.tree_path, "tree interchange document");
  render_cmd->add_option("--data", args.data_path, "input CSV")->required();
  render_cmd->add_option("--formula", args.formula, "model spec (when fitting)");
  render_cmd->add_option("--out", args.out_path, "output SVG path")->required();
  add_fit_flags(render_cmd, args);
  add_render_flags(render_cmd, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    args.alpha_set = fit_cmd->count("--alpha") || print_cmd->count("--alpha") ||
                     render_cmd->count("--alpha");
    args.mincriterion_set = fit_cmd->count("--mincriterion") ||
                            print_cmd->count("--mincriterion") ||
                            render_cmd->count("--mincriterion");

    if (app.got_subcommand(fit_cmd)) return run_fit(args);
    if (app.got_subcommand(print_cmd)) {
      if (args.tree_path.empty() && (args.data_path.empty() || args.formula.empty())) {
        throw UsageError("print needs --tree, or --data with --formula");
      }
      return run_print(args);
    }
    if (args.tree_path.empty() && args.formula.empty()) {
      throw UsageError("render needs --tree, or --formula to fit first");
    }
    return run_render(args);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace treeviz
