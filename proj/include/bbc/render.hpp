#pragma once

// Deterministic SVG scatterograms.

#include "bbc/geometry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bbc {

enum class MarkerShape { plus, circle, cross, square, diamond, triangle };

struct MarkerStyle {
  MarkerShape shape = MarkerShape::plus;
  double size = 6;  // pixels, full marker extent
  bool filled = false;
};

inline constexpr double kBaseMarkerSize = 6.0;
inline constexpr double kPerturbedScale = 0.6;

/// plus, circle, cross, square, diamond, triangle; later classes reuse the
/// cycle at a smaller size and alternate filled / open.
MarkerStyle marker_for_class(int index);

struct Layer {
  PointKind kind = PointKind::train;
  std::vector<ImagePoint<double>> points;
};

struct Overlays {
  bool polygon_edges = true;
  bool hull = false;
  std::vector<Segment<double>> segments;
  bool vertex_labels = false;
};

struct Scene {
  int k = 3;
  // Polygon map for k >= 3; nullopt selects the two-class square view.
  std::optional<PolygonMap<double>> map;
  std::vector<Layer> layers;
  Overlays overlays;
  bool monochrome = false;
  std::vector<std::string> class_names;
  std::string title;

  static Scene for_classes(int k);
  /// Outline of the view: polygon vertices, or the unit square for k = 2.
  std::vector<Point2d> outline() const;
};

/// Uniform-scale, y-up to y-down map from image space to pixels.
struct PixelTransform {
  double scale = 1;
  Point2d image_center = Point2d::Zero();
  Point2d pixel_center = Point2d::Zero();

  Point2d operator()(const Point2d& p) const {
    return {pixel_center.x() + (p.x() - image_center.x()) * scale,
            pixel_center.y() - (p.y() - image_center.y()) * scale};
  }
};

/// Fits the outline's bounding box, grown to cover every point and segment,
/// into the canvas minus `margin` on each side.
PixelTransform fit_transform(const Scene& scene, int width, int height, int margin);

/// Perturbed-kind layers are drawn first at 60% marker size so the other
/// layers sit on top; remaining layers keep their order. Every marker
/// element's first coordinate pair is its pixel center (circle cx/cy, or the
/// leading absolute M of a path).
std::string render_svg(const Scene& scene, int width = 420, int height = 400, int margin = 20);

}  // namespace bbc
