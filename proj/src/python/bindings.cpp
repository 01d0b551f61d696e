#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "treeviz/ctree.hpp"
#include "treeviz/data.hpp"
#include "treeviz/treemodel.hpp"
#include "treeviz/viz.hpp"

namespace py = pybind11;
using namespace treeviz;

namespace {

Dataset make_dataset(
    const std::string& outcome_name, const std::vector<double>& outcome,
    const std::vector<std::pair<std::string, std::vector<double>>>& covariates,
    const std::vector<std::string>& outcome_labels) {
  Dataset ds;
  ds.outcome.name = outcome_name;
  ds.outcome.values = outcome;
  if (!outcome_labels.empty()) {
    ds.outcome.kind = ColumnKind::Categorical;
    ds.outcome.labels = outcome_labels;
  }
  for (const auto& [name, values] : covariates) {
    ds.covariates.push_back({name, ColumnKind::Continuous, values, {}});
  }
  return ds;
}

RenderOptions options_from_kwargs(int color_type, double bar_alpha,
                                  int text_round, bool density_line,
                                  bool add_h_axis, bool add_p_axis) {
  RenderOptions o;
  o.color_type = color_type;
  o.bar_alpha = bar_alpha;
  o.text_round = text_round;
  o.density_line = density_line;
  o.add_h_axis = add_h_axis;
  o.add_p_axis = add_p_axis;
  return o;
}

}  // namespace

PYBIND11_MODULE(_treeviz, m) {
  m.doc() = "Conditional inference trees with subgroup visualization";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&make_dataset), py::arg("outcome_name"),
           py::arg("outcome"), py::arg("covariates"),
           py::arg("outcome_labels") = std::vector<std::string>{})
      .def_property_readonly("n_rows", &Dataset::n_rows)
      .def_property_readonly("n_covariates", &Dataset::n_covariates);

  py::class_<FitControls>(m, "FitControls")
      .def(py::init([](double alpha, std::size_t minbucket, std::size_t minsplit,
                       std::size_t maxdepth) {
             FitControls c;
             c.alpha = alpha;
             c.minbucket = minbucket;
             c.minsplit = minsplit;
             c.maxdepth = maxdepth;
             return c;
           }),
           py::arg("alpha") = 0.05, py::arg("minbucket") = 7,
           py::arg("minsplit") = 20, py::arg("maxdepth") = 0)
      .def_readwrite("alpha", &FitControls::alpha)
      .def_readwrite("minbucket", &FitControls::minbucket)
      .def_readwrite("minsplit", &FitControls::minsplit)
      .def_readwrite("maxdepth", &FitControls::maxdepth);

  py::class_<Tree>(m, "Tree")
      .def_property_readonly("n_nodes",
                             [](const Tree& t) { return t.nodes.size(); })
      .def_property_readonly("terminal_ids", &Tree::terminal_ids)
      .def_property_readonly("inner_count", &Tree::inner_count)
      .def("predict", &predict, py::arg("row"))
      .def("predict_distribution", &predict_distribution, py::arg("row"))
      .def("to_json", &export_document)
      .def("to_text", &export_text);

  m.def("load_csv", &load_csv, py::arg("path"), py::arg("outcome"),
        py::arg("covariates"),
        py::arg("kind_hints") = std::vector<std::pair<std::string, ColumnKind>>{});
  m.def("fit", &fit, py::arg("dataset"), py::arg("controls") = FitControls{});
  m.def("import_tree", &import_tree, py::arg("document"));

  m.def("quantile", &quantile, py::arg("values"), py::arg("p"));
  m.def("percentile_of", &percentile_of, py::arg("values"), py::arg("x"));
  m.def(
      "histogram",
      [](const std::vector<double>& values) {
        const Histogram h = histogram(values);
        py::dict out;
        out["edges"] = h.bin_edges;
        out["counts"] = h.counts;
        out["means"] = h.bin_means;
        return out;
      },
      py::arg("values"));
  m.def(
      "kde",
      [](const std::vector<double>& values) {
        const DensityCurve c = kde(values);
        return py::make_tuple(c.grid, c.density);
      },
      py::arg("values"));
  m.def(
      "discretize",
      [](const std::vector<double>& values, const std::vector<double>& breaks,
         bool include_lowest, int digits) {
        const Column c = discretize(values, breaks, include_lowest, digits);
        return py::make_tuple(c.values, c.labels);
      },
      py::arg("values"), py::arg("breakpoints"), py::arg("include_lowest") = true,
      py::arg("label_digits") = 4);
  m.def(
      "palette",
      [](int color_type, std::size_t count, double alpha) {
        std::vector<std::tuple<double, double, double, double>> out;
        for (const auto& c : palette(color_type, count, alpha)) {
          out.emplace_back(c.r, c.g, c.b, c.opacity);
        }
        return out;
      },
      py::arg("color_type"), py::arg("count"), py::arg("alpha") = 1.0);
  m.def(
      "render_svg",
      [](const Tree& tree, const Dataset& ds, int color_type, double bar_alpha,
         int text_round, bool density_line, bool add_h_axis, bool add_p_axis,
         double cell_px) {
        const RenderOptions options = options_from_kwargs(
            color_type, bar_alpha, text_round, density_line, add_h_axis,
            add_p_axis);
        const Scene scene = render_tree(tree, ds, options);
        return render_svg(scene, cell_px * scene.width, cell_px * scene.height);
      },
      py::arg("tree"), py::arg("dataset"), py::arg("color_type") = 1,
      py::arg("bar_alpha") = 0.5, py::arg("text_round") = 1,
      py::arg("density_line") = true, py::arg("add_h_axis") = false,
      py::arg("add_p_axis") = false, py::arg("cell_px") = 360.0);

  py::enum_<ColumnKind>(m, "ColumnKind")
      .value("continuous", ColumnKind::Continuous)
      .value("categorical", ColumnKind::Categorical);
}
