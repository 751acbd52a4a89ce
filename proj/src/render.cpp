#include "bbc/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

namespace bbc {

namespace {

constexpr std::array<MarkerShape, 6> kShapeCycle = {MarkerShape::plus,   MarkerShape::circle,  MarkerShape::cross,
                                                    MarkerShape::square, MarkerShape::diamond, MarkerShape::triangle};
constexpr std::array<const char*, 6> kPalette = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string marker_element(const MarkerStyle& style, const Point2d& c, const std::string& color) {
  const double h = style.size / 2;
  const std::string fill = style.filled ? color : "none";
  const std::string paint = " fill=\"" + fill + "\" stroke=\"" + color + "\"";
  const std::string m = "M" + num(c.x()) + "," + num(c.y());
  switch (style.shape) {
    case MarkerShape::circle:
      return "<circle class=\"marker\" cx=\"" + num(c.x()) + "\" cy=\"" + num(c.y()) + "\" r=\"" + num(h) + "\"" + paint +
             "/>";
    case MarkerShape::plus:
      return "<path class=\"marker\" d=\"" + m + "m" + num(-h) + ",0h" + num(2 * h) + "m" + num(-h) + "," + num(-h) +
             "v" + num(2 * h) + "\"" + paint + "/>";
    case MarkerShape::cross:
      return "<path class=\"marker\" d=\"" + m + "m" + num(-h) + "," + num(-h) + "l" + num(2 * h) + "," + num(2 * h) +
             "m" + num(-2 * h) + ",0l" + num(2 * h) + "," + num(-2 * h) + "\"" + paint + "/>";
    case MarkerShape::square:
      return "<path class=\"marker\" d=\"" + m + "m" + num(-h) + "," + num(-h) + "h" + num(2 * h) + "v" + num(2 * h) +
             "h" + num(-2 * h) + "z\"" + paint + "/>";
    case MarkerShape::diamond:
      return "<path class=\"marker\" d=\"" + m + "m0," + num(-h) + "l" + num(h) + "," + num(h) + "l" + num(-h) + "," +
             num(h) + "l" + num(-h) + "," + num(-h) + "z\"" + paint + "/>";
    case MarkerShape::triangle:
      return "<path class=\"marker\" d=\"" + m + "m0," + num(-h) + "l" + num(h) + "," + num(2 * h) + "h" +
             num(-2 * h) + "z\"" + paint + "/>";
  }
  return {};
}

std::string line_element(const Point2d& a, const Point2d& b, const char* cls, const char* stroke) {
  return "<line class=\"" + std::string(cls) + "\" x1=\"" + num(a.x()) + "\" y1=\"" + num(a.y()) + "\" x2=\"" +
         num(b.x()) + "\" y2=\"" + num(b.y()) + "\" stroke=\"" + stroke + "\"/>";
}

}  // namespace

MarkerStyle marker_for_class(int index) {
  if (index < 0) index = 0;
  const int cycle = index / static_cast<int>(kShapeCycle.size());
  MarkerStyle style;
  style.shape = kShapeCycle[static_cast<std::size_t>(index) % kShapeCycle.size()];
  style.size = kBaseMarkerSize * std::max(0.4, 1.0 - 0.2 * cycle);
  style.filled = cycle % 2 == 1;
  return style;
}

Scene Scene::for_classes(int k) {
  Scene s;
  s.k = k;
  if (k >= 3) s.map = build_projection<double>(k);
  else if (k != 2) throw InvalidClassCount("scene needs k >= 2");
  return s;
}

std::vector<Point2d> Scene::outline() const {
  if (map) return map->vertices;
  return {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
}

PixelTransform fit_transform(const Scene& scene, int width, int height, int margin) {
  Point2d lo = Point2d::Constant(std::numeric_limits<double>::infinity());
  Point2d hi = -lo;
  auto grow = [&](const Point2d& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  };
  for (const auto& v : scene.outline()) grow(v);
  for (const auto& layer : scene.layers)
    for (const auto& p : layer.points) grow(p.position());
  for (const auto& s : scene.overlays.segments) {
    grow(s.start);
    grow(s.end);
  }
  const Point2d extent = (hi - lo).cwiseMax(Point2d::Constant(1e-9));
  PixelTransform t;
  t.scale = std::min((width - 2.0 * margin) / extent.x(), (height - 2.0 * margin) / extent.y());
  t.image_center = (lo + hi) / 2;
  t.pixel_center = {width / 2.0, height / 2.0};
  return t;
}

std::string render_svg(const Scene& scene, int width, int height, int margin) {
  if (width <= 2 * margin || height <= 2 * margin) throw DataError("canvas must exceed twice the margin");
  for (const auto& layer : scene.layers)
    for (const auto& p : layer.points) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DataError("scene contains non-finite point");
      if (p.class_label < 0) throw DataError("scene point has negative class");
    }
  const PixelTransform px = fit_transform(scene, width, height, margin);
  const auto outline = scene.outline();

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) + " " +
         std::to_string(height) + "\">\n";
  svg += "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" + std::to_string(width) + "\" height=\"" +
         std::to_string(height) + "\" fill=\"white\"/>\n";
  if (!scene.title.empty())
    svg += "<text class=\"title\" x=\"" + num(width / 2.0) + "\" y=\"" + num(margin * 0.75) +
           "\" font-size=\"12\" text-anchor=\"middle\">" + xml_escape(scene.title) + "</text>\n";

  if (scene.overlays.hull) {
    std::vector<Point2d> hull;
    if (scene.map) {
      hull = binary_hull(*scene.map);
    } else {
      hull = outline;
    }
    std::string d;
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const Point2d p = px(hull[i]);
      d += (i ? "L" : "M") + num(p.x()) + "," + num(p.y());
    }
    svg += "<path class=\"hull\" d=\"" + d + "z\" fill=\"none\" stroke=\"#999999\" stroke-dasharray=\"4,3\"/>\n";
  }
  if (scene.overlays.polygon_edges)
    for (std::size_t i = 0; i < outline.size(); ++i)
      svg += line_element(px(outline[i]), px(outline[(i + 1) % outline.size()]), "edge", "black") + "\n";
  for (const auto& s : scene.overlays.segments)
    svg += line_element(px(s.start), px(s.end), "segment", "#777777") + "\n";

  std::vector<const Layer*> order;
  for (const auto& layer : scene.layers)
    if (layer.kind == PointKind::perturbed) order.push_back(&layer);
  for (const auto& layer : scene.layers)
    if (layer.kind != PointKind::perturbed) order.push_back(&layer);

  for (const Layer* layer : order) {
    svg += "<g class=\"layer-" + std::string(to_string(layer->kind)) + "\" stroke-width=\"1\">\n";
    for (const auto& p : layer->points) {
      MarkerStyle style = marker_for_class(p.class_label);
      if (layer->kind == PointKind::perturbed) style.size *= kPerturbedScale;
      const char* color =
          scene.monochrome ? "black" : kPalette[static_cast<std::size_t>(p.class_label) % kPalette.size()];
      svg += marker_element(style, px(p.position()), color) + "\n";
    }
    svg += "</g>\n";
  }

  if (scene.overlays.vertex_labels) {
    for (std::size_t j = 0; j < outline.size(); ++j) {
      // Square view labels only the two class corners.
      if (!scene.map && j != 1 && j != 3) continue;
      const std::size_t cls = scene.map ? j : (j == 1 ? 0 : 1);
      const std::string name = cls < scene.class_names.size() ? scene.class_names[cls] : std::to_string(cls);
      const Point2d p = px(outline[j]);
      svg += "<text class=\"vertex-label\" x=\"" + num(p.x()) + "\" y=\"" + num(p.y() + 14) +
             "\" font-size=\"11\" text-anchor=\"middle\">" + xml_escape(name) + "</text>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace bbc
