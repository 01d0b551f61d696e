#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "treeviz/data.hpp"
#include "treeviz/treemodel.hpp"

namespace treeviz {

struct RenderOptions {
  int color_type = 1;          // 1 rainbow, 2 heat, 3 terrain, 4 sequential, 5 diverging
  double bar_alpha = 0.5;      // constraint-bar opacity
  double text_title = 1.5;
  double text_axis = 1.5;
  double text_main = 1.5;
  double text_label = 1.5;
  double text_bar = 1.5;
  double text_percentile = 0.7;
  int text_round = 1;          // decimals on titles, bar labels, bin means
  bool add_h_axis = false;
  bool add_p_axis = false;
  bool density_line = true;
  bool interval_mode = false;  // categorical-outcome bin labeling

  void validate() const;
};

struct SceneColor {
  double r = 0.0, g = 0.0, b = 0.0;  // sRGB in [0,1]
  double opacity = 1.0;
};

enum class TextAnchor { Start, Middle, End };

struct RectPrim {
  double x = 0, y = 0, w = 0, h = 0;
  std::optional<SceneColor> fill;
  std::optional<SceneColor> stroke;
  std::string cls;
};

struct LinePrim {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
  SceneColor stroke;
  std::string cls;
};

struct PolylinePrim {
  std::vector<std::pair<double, double>> points;
  SceneColor stroke;
  std::string cls;
};

struct TextPrim {
  double x = 0, y = 0;
  std::string text;
  double size = 0.03;  // em height in scene units
  TextAnchor anchor = TextAnchor::Middle;
  SceneColor fill;
  std::string cls;
};

using Primitive = std::variant<RectPrim, LinePrim, PolylinePrim, TextPrim>;

// Device-independent drawing: top-left origin, y grows downward.
// Subplot scenes occupy the unit square; layout() composes them onto a
// cols x rows canvas.
struct Scene {
  double width = 1.0;
  double height = 1.0;
  std::vector<Primitive> primitives;
};

// Subplot geometry shared with the tests.
namespace geom {
inline constexpr double kPlotX0 = 0.08;
inline constexpr double kPlotX1 = 0.92;
inline constexpr double kPlotY0 = 0.14;   // histogram top
inline constexpr double kPlotY1 = 0.58;   // histogram baseline
inline constexpr double kBarBase = 0.90;  // lowest constraint bar bottom
inline constexpr double kBarHeight = 0.05;
inline constexpr double kBarGap = 0.02;

inline double percentile_to_x(double pct) {
  return kPlotX0 + (kPlotX1 - kPlotX0) * pct / 100.0;
}
inline double x_to_percentile(double x) {
  return (x - kPlotX0) / (kPlotX1 - kPlotX0) * 100.0;
}
}  // namespace geom

// n colors from the HCL family selected by color_type, all with the
// given opacity.
std::vector<SceneColor> palette(int color_type, std::size_t count, double alpha);

SceneColor hcl_to_srgb(double hue_deg, double chroma, double luminance);

// One terminal-node subgroup: title, outcome histogram with per-bin
// means, subgroup-mean line, optional density curve, and one
// percentile-scaled colored bar per consolidated covariate constraint.
Scene subplot_scene(const SubgroupPath& path, const Dataset& dataset,
                    const RenderOptions& options);

// Near-square grid of at most 10 subplots, row-major in the given order.
Scene layout(const std::vector<Scene>& scenes);

// Subplots for every terminal node in id order, composed with layout().
Scene render_tree(const Tree& tree, const Dataset& dataset,
                  const RenderOptions& options);

// Deterministic SVG 1.1 serialization; scene coordinates are mapped
// affinely onto the pixel canvas.
std::string render_svg(const Scene& scene, double width_px, double height_px);

}  // namespace treeviz
