#include "treeviz/viz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace treeviz {

void RenderOptions::validate() const {
  if (color_type < 1 || color_type > 5) {
    throw UsageError("color-type must be between 1 and 5");
  }
  if (bar_alpha < 0.0 || bar_alpha > 1.0) {
    throw UsageError("bar-alpha must lie in [0,1]");
  }
  for (double s : {text_title, text_axis, text_main, text_label, text_bar,
                   text_percentile}) {
    if (!(s > 0.0)) throw UsageError("text scale factors must be positive");
  }
  if (text_round < 0) throw UsageError("text-round must be non-negative");
}

SceneColor hcl_to_srgb(double hue_deg, double chroma, double luminance) {
  // CIELUV LCh with D65 white point
  const double rad = hue_deg * M_PI / 180.0;
  const double L = luminance;
  const double U = chroma * std::cos(rad);
  const double V = chroma * std::sin(rad);

  double X = 0.0, Y = 0.0, Z = 0.0;
  if (L > 0.0) {
    constexpr double un = 0.1978398;  // u' of D65
    constexpr double vn = 0.4683363;  // v' of D65
    Y = L > 8.0 ? std::pow((L + 16.0) / 116.0, 3.0) : L / 903.3;
    const double up = U / (13.0 * L) + un;
    const double vp = V / (13.0 * L) + vn;
    X = Y * 9.0 * up / (4.0 * vp);
    Z = Y * (12.0 - 3.0 * up - 20.0 * vp) / (4.0 * vp);
  }

  auto gamma = [](double c) {
    c = std::clamp(c, 0.0, 1.0);
    return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
  };
  SceneColor color;
  color.r = gamma(3.2404542 * X - 1.5371385 * Y - 0.4985314 * Z);
  color.g = gamma(-0.9692660 * X + 1.8760108 * Y + 0.0415560 * Z);
  color.b = gamma(0.0556434 * X - 0.2040259 * Y + 1.0572252 * Z);
  return color;
}

std::vector<SceneColor> palette(int color_type, std::size_t count, double alpha) {
  if (color_type < 1 || color_type > 5) {
    throw UsageError("color-type must be between 1 and 5");
  }
  if (count < 1) throw UsageError("palette needs count >= 1");
  std::vector<SceneColor> colors;
  colors.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t =
        count == 1 ? 0.0
                   : static_cast<double>(k) / static_cast<double>(count - 1);
    SceneColor c;
    switch (color_type) {
      case 1:
        c = hcl_to_srgb(360.0 * static_cast<double>(k) /
                            static_cast<double>(count),
                        50.0, 70.0);
        break;
      case 2:
        c = hcl_to_srgb(90.0 * t, 100.0 - 70.0 * t, 50.0 + 40.0 * t);
        break;
      case 3:
        c = hcl_to_srgb(130.0 - 130.0 * t, 80.0 - 80.0 * t, 60.0 + 35.0 * t);
        break;
      case 4:
        c = hcl_to_srgb(260.0, 80.0 - 80.0 * t, 30.0 + 60.0 * t);
        break;
      case 5: {
        const double s = 2.0 * t - 1.0;
        c = hcl_to_srgb(s < 0.0 ? 260.0 : 0.0, 80.0 * std::fabs(s),
                        90.0 - 60.0 * std::fabs(s));
        break;
      }
    }
    c.opacity = alpha;
    colors.push_back(c);
  }
  return colors;
}

namespace {

std::string round_to(double x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, x);
  return buf;
}

std::string interval_label(const Interval& iv, int decimals) {
  const std::string lo =
      iv.lower_unbounded() ? "-inf" : round_to(iv.lower, decimals);
  const std::string hi =
      iv.upper_unbounded() ? "inf" : round_to(iv.upper, decimals);
  const char open = iv.lower_open || iv.lower_unbounded() ? '(' : '[';
  const char close = iv.upper_open || iv.upper_unbounded() ? ')' : ']';
  return iv.covariate + " \xE2\x88\x88 " + open + lo + ", " + hi + close;
}

const SceneColor kBlack{0.0, 0.0, 0.0, 1.0};
const SceneColor kGrey{0.45, 0.45, 0.45, 1.0};
const SceneColor kHistFill{0.83, 0.83, 0.83, 1.0};

}  // namespace

Scene subplot_scene(const SubgroupPath& path, const Dataset& dataset,
                    const RenderOptions& options) {
  options.validate();
  const std::vector<std::size_t> rows = subgroup_rows(dataset, path);
  if (rows.empty()) throw DataError("empty subgroup: no rows match the path");

  const bool categorical = dataset.outcome.kind == ColumnKind::Categorical;
  std::vector<double> outcomes;
  outcomes.reserve(rows.size());
  for (std::size_t r : rows) outcomes.push_back(dataset.outcome.values[r]);

  using namespace geom;
  Scene scene;
  const double base_font = 0.035;

  // title
  TextPrim title;
  title.x = 0.5;
  title.y = 0.08;
  title.size = base_font * options.text_title;
  title.anchor = TextAnchor::Middle;
  title.fill = kBlack;
  title.cls = "title";
  if (categorical) {
    NodeSummary s;
    s.category_counts.assign(dataset.outcome.labels.size(), 0);
    for (double v : outcomes) s.category_counts[static_cast<std::size_t>(v)] += 1;
    title.text = "mode = " + dataset.outcome.labels[s.modal_category()] +
                 ", n = " + std::to_string(rows.size());
  } else {
    title.text = "mean = " + round_to(mean_of(outcomes), options.text_round) +
                 ", n = " + std::to_string(rows.size());
  }
  scene.primitives.push_back(title);

  // histogram (continuous) or category bar chart
  Histogram hist;
  if (categorical) {
    hist.bin_edges.push_back(-0.5);
    hist.counts.assign(dataset.outcome.labels.size(), 0);
    for (std::size_t c = 0; c < hist.counts.size(); ++c) {
      hist.bin_edges.push_back(static_cast<double>(c) + 0.5);
    }
    for (double v : outcomes) hist.counts[static_cast<std::size_t>(v)] += 1;
    hist.bin_means.assign(hist.counts.size(), std::nullopt);
  } else {
    hist = histogram(outcomes);
  }
  const std::size_t max_count = *std::max_element(hist.counts.begin(), hist.counts.end());
  const double v0 = hist.bin_edges.front();
  const double v1 = hist.bin_edges.back();
  auto value_to_x = [&](double v) {
    return kPlotX0 + (kPlotX1 - kPlotX0) * (v - v0) / (v1 - v0);
  };
  auto count_to_y = [&](double c) {
    return kPlotY1 - (kPlotY1 - kPlotY0) * c / static_cast<double>(max_count);
  };
  for (std::size_t b = 0; b < hist.n_bins(); ++b) {
    RectPrim bar;
    bar.x = value_to_x(hist.bin_edges[b]);
    bar.w = value_to_x(hist.bin_edges[b + 1]) - bar.x;
    bar.y = count_to_y(static_cast<double>(hist.counts[b]));
    bar.h = kPlotY1 - bar.y;
    bar.fill = kHistFill;
    bar.stroke = kGrey;
    bar.cls = "hist-bar";
    scene.primitives.push_back(bar);

    TextPrim label;
    label.x = bar.x + bar.w / 2.0;
    label.y = kPlotY1 - 0.01;
    label.size = base_font * 0.6 * options.text_label;
    label.fill = kBlack;
    if (categorical) {
      // category label printed on each bin
      label.text = dataset.outcome.labels[b];
      label.cls = "bin-label";
      scene.primitives.push_back(label);
    } else if (hist.bin_means[b]) {
      label.text = round_to(*hist.bin_means[b], options.text_round);
      label.cls = "bin-mean";
      scene.primitives.push_back(label);
    }
  }

  if (!categorical) {
    LinePrim mean_line;
    mean_line.x1 = mean_line.x2 = value_to_x(mean_of(outcomes));
    mean_line.y1 = kPlotY0;
    mean_line.y2 = kPlotY1;
    mean_line.stroke = kBlack;
    mean_line.cls = "mean-line";
    scene.primitives.push_back(mean_line);
  }

  if (!categorical && options.density_line && outcomes.size() >= 2 &&
      sample_sd(outcomes) > 0.0) {
    const DensityCurve curve = kde(outcomes);
    const double dmax = *std::max_element(curve.density.begin(), curve.density.end());
    PolylinePrim poly;
    poly.stroke = kBlack;
    poly.cls = "density";
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
      const double gx = std::clamp(curve.grid[i], v0, v1);
      poly.points.emplace_back(
          value_to_x(gx), kPlotY1 - (kPlotY1 - kPlotY0) * curve.density[i] / dmax);
    }
    scene.primitives.push_back(poly);
  }

  if (options.add_h_axis) {
    LinePrim axis{kPlotX0, kPlotY1, kPlotX1, kPlotY1, kBlack, "h-axis"};
    scene.primitives.push_back(axis);
    for (int i = 0; i <= 4; ++i) {
      const double v = v0 + (v1 - v0) * i / 4.0;
      TextPrim tick;
      tick.x = value_to_x(v);
      tick.y = kPlotY1 + 0.035;
      tick.text = categorical ? std::to_string(i) : round_to(v, options.text_round);
      tick.size = base_font * 0.55 * options.text_axis;
      tick.fill = kBlack;
      tick.cls = "h-axis-tick";
      if (!categorical) scene.primitives.push_back(tick);
    }
  }

  // constraint bars, root-to-leaf order, stacked bottom-up
  const auto colors =
      path.constraints.empty()
          ? std::vector<SceneColor>{}
          : palette(options.color_type, path.constraints.size(), options.bar_alpha);
  for (std::size_t i = 0; i < path.constraints.size(); ++i) {
    const Interval& iv = path.constraints[i];
    const auto& full = dataset.covariate(iv.covariate).values;
    const double lo_pct =
        iv.lower_unbounded() ? 0.0 : 100.0 * percentile_of(full, iv.lower);
    const double hi_pct =
        iv.upper_unbounded() ? 100.0 : 100.0 * percentile_of(full, iv.upper);

    RectPrim bar;
    bar.x = percentile_to_x(lo_pct);
    bar.w = percentile_to_x(hi_pct) - bar.x;
    bar.h = kBarHeight;
    bar.y = kBarBase - kBarHeight -
            static_cast<double>(i) * (kBarHeight + kBarGap);
    bar.fill = colors[i];
    bar.stroke = kGrey;
    bar.cls = "constraint-bar";
    scene.primitives.push_back(bar);

    TextPrim label;
    label.x = kPlotX0;
    label.y = bar.y + kBarHeight * 0.75;
    label.text = interval_label(iv, options.text_round);
    label.size = base_font * 0.6 * options.text_bar;
    label.anchor = TextAnchor::Start;
    label.fill = kBlack;
    label.cls = "bar-label";
    scene.primitives.push_back(label);

    TextPrim pct;
    pct.x = percentile_to_x(hi_pct) + 0.01;
    pct.y = bar.y + kBarHeight * 0.75;
    pct.text = round_to(hi_pct, 0);
    pct.size = base_font * 0.6 * options.text_percentile;
    pct.anchor = TextAnchor::Start;
    pct.fill = kGrey;
    pct.cls = "percentile";
    scene.primitives.push_back(pct);
  }

  if (options.add_p_axis) {
    LinePrim axis{kPlotX0, kBarBase + 0.02, kPlotX1, kBarBase + 0.02, kBlack,
                  "p-axis"};
    scene.primitives.push_back(axis);
    for (int pct = 0; pct <= 100; pct += 25) {
      TextPrim tick;
      tick.x = percentile_to_x(pct);
      tick.y = kBarBase + 0.055;
      tick.text = std::to_string(pct);
      tick.size = base_font * 0.55 * options.text_axis;
      tick.fill = kBlack;
      tick.cls = "p-axis-tick";
      scene.primitives.push_back(tick);
    }
  }

  return scene;
}

namespace {

Primitive translated(const Primitive& prim, double dx, double dy) {
  Primitive out = prim;
  std::visit(
      [&](auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RectPrim> || std::is_same_v<T, TextPrim>) {
          p.x += dx;
          p.y += dy;
        } else if constexpr (std::is_same_v<T, LinePrim>) {
          p.x1 += dx;
          p.y1 += dy;
          p.x2 += dx;
          p.y2 += dy;
        } else if constexpr (std::is_same_v<T, PolylinePrim>) {
          for (auto& pt : p.points) {
            pt.first += dx;
            pt.second += dy;
          }
        }
      },
      out);
  return out;
}

}  // namespace

Scene layout(const std::vector<Scene>& scenes) {
  if (scenes.empty()) throw DataError("layout needs at least one subplot");
  if (scenes.size() > 10) {
    throw DataError(
        "too many subplots (" + std::to_string(scenes.size()) +
        "); at most 10 are supported -- restrict the number of terminal "
        "nodes with stricter controls (lower alpha, maxdepth, minbucket)");
  }
  const auto cols = static_cast<std::size_t>(
      std::ceil(std::sqrt(static_cast<double>(scenes.size()))));
  const auto rows = (scenes.size() + cols - 1) / cols;

  Scene composed;
  composed.width = static_cast<double>(cols);
  composed.height = static_cast<double>(rows);
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const double dx = static_cast<double>(i % cols);
    const double dy = static_cast<double>(i / cols);
    for (const auto& prim : scenes[i].primitives) {
      composed.primitives.push_back(translated(prim, dx, dy));
    }
  }
  return composed;
}

Scene render_tree(const Tree& tree, const Dataset& dataset,
                  const RenderOptions& options) {
  std::vector<Scene> subplots;
  for (std::size_t id : tree.terminal_ids()) {  // preorder ids ascend
    subplots.push_back(subplot_scene(path_node(tree, id), dataset, options));
  }
  return layout(subplots);
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string color_attr(const SceneColor& c) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "rgb(%d,%d,%d)",
                static_cast<int>(std::lround(c.r * 255.0)),
                static_cast<int>(std::lround(c.g * 255.0)),
                static_cast<int>(std::lround(c.b * 255.0)));
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const Scene& scene, double width_px, double height_px) {
  if (!(width_px > 0.0 && height_px > 0.0)) {
    throw UsageError("SVG dimensions must be positive");
  }
  const double sx = width_px / scene.width;
  const double sy = height_px / scene.height;
  const double font_scale = std::min(sx, sy);

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
      << fmt(width_px) << "\" height=\"" << fmt(height_px) << "\">\n";
  for (const auto& prim : scene.primitives) {
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, RectPrim>) {
            out << "<rect class=\"" << p.cls << "\" x=\"" << fmt(p.x * sx)
                << "\" y=\"" << fmt(p.y * sy) << "\" width=\"" << fmt(p.w * sx)
                << "\" height=\"" << fmt(p.h * sy) << "\"";
            if (p.fill) {
              out << " fill=\"" << color_attr(*p.fill) << "\" fill-opacity=\""
                  << fmt(p.fill->opacity) << "\"";
            } else {
              out << " fill=\"none\"";
            }
            if (p.stroke) out << " stroke=\"" << color_attr(*p.stroke) << "\"";
            out << "/>\n";
          } else if constexpr (std::is_same_v<T, LinePrim>) {
            out << "<line class=\"" << p.cls << "\" x1=\"" << fmt(p.x1 * sx)
                << "\" y1=\"" << fmt(p.y1 * sy) << "\" x2=\"" << fmt(p.x2 * sx)
                << "\" y2=\"" << fmt(p.y2 * sy) << "\" stroke=\""
                << color_attr(p.stroke) << "\"/>\n";
          } else if constexpr (std::is_same_v<T, PolylinePrim>) {
            out << "<polyline class=\"" << p.cls << "\" fill=\"none\" stroke=\""
                << color_attr(p.stroke) << "\" points=\"";
            for (std::size_t i = 0; i < p.points.size(); ++i) {
              if (i) out << " ";
              out << fmt(p.points[i].first * sx) << ","
                  << fmt(p.points[i].second * sy);
            }
            out << "\"/>\n";
          } else if constexpr (std::is_same_v<T, TextPrim>) {
            const char* anchor = p.anchor == TextAnchor::Start ? "start"
                                 : p.anchor == TextAnchor::End ? "end"
                                                               : "middle";
            out << "<text class=\"" << p.cls << "\" x=\"" << fmt(p.x * sx)
                << "\" y=\"" << fmt(p.y * sy) << "\" font-size=\""
                << fmt(p.size * font_scale) << "\" text-anchor=\"" << anchor
                << "\" fill=\"" << color_attr(p.fill) << "\">"
                << escape_xml(p.text) << "</text>\n";
          }
        },
        prim);
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace treeviz
