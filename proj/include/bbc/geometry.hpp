#pragma once

// Polygon projection of K-dimensional classifier outputs.
//
// The K one-hot corners of the output hypercube are sent to the vertices of
// a regular polygon with unit edge, vertex 0 at the origin and the rest
// counterclockwise; the all-ones point is sent to the polygon center. The
// map is affine, x = A o + B, so every (a, ..., a) point lands on the center
// and bounded outputs land inside the image of the unit cube.

#include "bbc/common.hpp"
#include "bbc/hull.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bbc {

enum class PointKind { train, test, perturbed, new_sample };

inline std::string_view to_string(PointKind kind) {
  switch (kind) {
    case PointKind::train: return "train";
    case PointKind::test: return "test";
    case PointKind::perturbed: return "perturbed";
    case PointKind::new_sample: return "new";
  }
  return "train";
}

inline PointKind point_kind_from_string(std::string_view s) {
  if (s == "train") return PointKind::train;
  if (s == "test") return PointKind::test;
  if (s == "perturbed") return PointKind::perturbed;
  if (s == "new") return PointKind::new_sample;
  throw FormatError("unknown point kind '" + std::string(s) + "'");
}

/// Classifier activations, one row per input vector.
class OutputMatrix {
 public:
  OutputMatrix() = default;
  explicit OutputMatrix(MatrixXd values) : values_(std::move(values)) {
    if (!values_.allFinite()) throw DataError("output matrix contains non-finite values");
    bounded_ = (values_.array() >= 0.0).all() && (values_.array() <= 1.0).all();
  }

  const MatrixXd& values() const noexcept { return values_; }
  Index rows() const noexcept { return values_.rows(); }
  Index cols() const noexcept { return values_.cols(); }
  bool bounded() const noexcept { return bounded_; }
  auto row(Index i) const { return values_.row(i); }

 private:
  MatrixXd values_;
  bool bounded_ = true;
};

template <typename Scalar>
struct ImagePoint {
  Scalar x = 0;
  Scalar y = 0;
  int class_label = 0;
  PointKind kind = PointKind::train;
  Index source_index = 0;

  Point2<Scalar> position() const { return {x, y}; }
};

template <typename Scalar>
struct Segment {
  Point2<Scalar> start;
  Point2<Scalar> end;
};

namespace detail {
inline void require_polygon_k(int k) {
  if (k < 3)
    throw InvalidClassCount("polygon projection needs k >= 3 (got " + std::to_string(k) +
                            "); use square_view for two classes");
}
}  // namespace detail

template <typename Scalar = double>
std::vector<Point2<Scalar>> polygon_vertices(int k) {
  detail::require_polygon_k(k);
  using std::cos;
  using std::sin;
  using std::tan;
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar K = Scalar(k);
  const Scalar phi = -pi / 2 - pi / K;
  const Scalar r = Scalar(1) / (2 * cos(pi / 2 - pi / K));
  const Scalar yc = tan(pi / 2 - pi / K) / 2;
  std::vector<Point2<Scalar>> v(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    const Scalar angle = phi + 2 * pi * Scalar(j) / K;
    v[static_cast<std::size_t>(j)] = {Scalar(0.5) + r * cos(angle), yc + r * sin(angle)};
  }
  return v;
}

template <typename Scalar = double>
Point2<Scalar> polygon_center(int k) {
  detail::require_polygon_k(k);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  using std::tan;
  return {Scalar(0.5), tan(pi / 2 - pi / Scalar(k)) / 2};
}

/// Affine map from K-dimensional output space to the polygon plane.
template <typename Scalar>
struct PolygonMap {
  int k = 0;
  std::vector<Point2<Scalar>> vertices;
  Point2<Scalar> center;
  Eigen::Matrix<Scalar, 2, Eigen::Dynamic> matrix_a;
  Point2<Scalar> offset_b;

  /// Image of one output vector.
  template <typename Derived>
  Point2<Scalar> apply(const Eigen::MatrixBase<Derived>& o) const {
    if (o.size() != k)
      throw ShapeError("output vector has " + std::to_string(o.size()) + " entries, map expects " +
                       std::to_string(k));
    return matrix_a * o.derived().template cast<Scalar>() + offset_b;
  }
};

/// Solves the 2K+2 linear equations (vertex images of the K unit vectors plus
/// the center image of the all-ones vector) for A and B, then checks the
/// solution against the closed form B = S, A[:, j] = v_j - S.
template <typename Scalar = double>
PolygonMap<Scalar> build_projection(int k) {
  detail::require_polygon_k(k);
  PolygonMap<Scalar> map;
  map.k = k;
  map.vertices = polygon_vertices<Scalar>(k);
  map.center = polygon_center<Scalar>(k);

  // Unknown layout: [A(0,0..K-1), B(0), A(1,0..K-1), B(1)]; the two output
  // coordinates decouple but the full system is assembled as stated.
  const Index n = 2 * k + 2;
  Matrix<Scalar> lhs = Matrix<Scalar>::Zero(n, n);
  Vector<Scalar> rhs(n);
  Index row = 0;
  for (int c = 0; c < 2; ++c) {
    const Index base = c * (k + 1);
    for (int j = 0; j < k; ++j, ++row) {
      lhs(row, base + j) = 1;
      lhs(row, base + k) = 1;
      rhs(row) = map.vertices[static_cast<std::size_t>(j)](c);
    }
    for (int j = 0; j < k; ++j) lhs(row, base + j) = 1;
    lhs(row, base + k) = 1;
    rhs(row) = map.center(c);
    ++row;
  }

  Eigen::FullPivLU<Matrix<Scalar>> lu(lhs);
  if (lu.rank() != n) throw ConstructionError("projection system is singular for k=" + std::to_string(k));
  const Vector<Scalar> sol = lu.solve(rhs);
  const Scalar residual = (lhs * sol - rhs).template lpNorm<Eigen::Infinity>();

  map.matrix_a.resize(2, k);
  for (int c = 0; c < 2; ++c) {
    const Index base = c * (k + 1);
    for (int j = 0; j < k; ++j) map.matrix_a(c, j) = sol(base + j);
    map.offset_b(c) = sol(base + k);
  }

  const Scalar tol = Scalar(1e-10);
  Scalar deviation = (map.offset_b - map.center).template lpNorm<Eigen::Infinity>();
  for (int j = 0; j < k; ++j)
    deviation = std::max<Scalar>(
        deviation, (map.matrix_a.col(j) - (map.vertices[static_cast<std::size_t>(j)] - map.center))
                       .template lpNorm<Eigen::Infinity>());
  if (!(residual < tol) || !(deviation < tol))
    throw ConstructionError("projection system is ill-conditioned for k=" + std::to_string(k));
  return map;
}

namespace detail {
template <typename Derived>
void check_projection_inputs(const Eigen::MatrixBase<Derived>& outputs, std::span<const int> labels,
                             Index k) {
  if (outputs.cols() != k)
    throw ShapeError("outputs have " + std::to_string(outputs.cols()) + " columns, expected " +
                     std::to_string(k));
  if (static_cast<Index>(labels.size()) != outputs.rows())
    throw ShapeError("label count " + std::to_string(labels.size()) + " does not match " +
                     std::to_string(outputs.rows()) + " output rows");
  if (!outputs.allFinite()) throw DataError("outputs contain non-finite values");
  for (int label : labels)
    if (label < 0 || label >= k) throw DataError("class label " + std::to_string(label) + " out of range");
}
}  // namespace detail

/// Projects each output row with `map`. `source_indices`, when non-empty,
/// overrides the default source index (the row number).
template <typename Scalar, typename Derived>
std::vector<ImagePoint<Scalar>> project(const PolygonMap<Scalar>& map, const Eigen::MatrixBase<Derived>& outputs,
                                        std::span<const int> labels, PointKind kind,
                                        std::span<const Index> source_indices = {}) {
  detail::check_projection_inputs(outputs, labels, map.k);
  if (!source_indices.empty() && static_cast<Index>(source_indices.size()) != outputs.rows())
    throw ShapeError("source index count does not match output rows");
  const Eigen::Matrix<Scalar, 2, Eigen::Dynamic> xy =
      (map.matrix_a * outputs.derived().template cast<Scalar>().transpose()).colwise() + map.offset_b;
  std::vector<ImagePoint<Scalar>> points(static_cast<std::size_t>(outputs.rows()));
  for (Index i = 0; i < outputs.rows(); ++i) {
    auto& p = points[static_cast<std::size_t>(i)];
    p.x = xy(0, i);
    p.y = xy(1, i);
    p.class_label = labels[static_cast<std::size_t>(i)];
    p.kind = kind;
    p.source_index = source_indices.empty() ? i : source_indices[static_cast<std::size_t>(i)];
  }
  return points;
}

template <typename Scalar>
std::vector<ImagePoint<Scalar>> project(const PolygonMap<Scalar>& map, const OutputMatrix& outputs,
                                        std::span<const int> labels, PointKind kind,
                                        std::span<const Index> source_indices = {}) {
  return project(map, outputs.values(), labels, kind, source_indices);
}

/// Two-class view: the point is (o_1, o_2) itself. Targets sit at (1,0) and
/// (0,1), unrecognized inputs near (0,0), overlapping classes near (1,1).
template <typename Scalar = double, typename Derived>
std::vector<ImagePoint<Scalar>> square_view(const Eigen::MatrixBase<Derived>& outputs, std::span<const int> labels,
                                            PointKind kind, std::span<const Index> source_indices = {}) {
  detail::check_projection_inputs(outputs, labels, 2);
  if (!source_indices.empty() && static_cast<Index>(source_indices.size()) != outputs.rows())
    throw ShapeError("source index count does not match output rows");
  std::vector<ImagePoint<Scalar>> points(static_cast<std::size_t>(outputs.rows()));
  for (Index i = 0; i < outputs.rows(); ++i) {
    auto& p = points[static_cast<std::size_t>(i)];
    p.x = Scalar(outputs(i, 0));
    p.y = Scalar(outputs(i, 1));
    p.class_label = labels[static_cast<std::size_t>(i)];
    p.kind = kind;
    p.source_index = source_indices.empty() ? i : source_indices[static_cast<std::size_t>(i)];
  }
  return points;
}

template <typename Scalar = double>
std::vector<ImagePoint<Scalar>> square_view(const OutputMatrix& outputs, std::span<const int> labels, PointKind kind,
                                            std::span<const Index> source_indices = {}) {
  return square_view<Scalar>(outputs.values(), labels, kind, source_indices);
}

inline constexpr int kMaxHullClasses = 20;

/// Convex hull of the images of all 2^K binary output vectors: the region
/// every bounded output projects into. A hexagon for K = 3.
template <typename Scalar>
std::vector<Point2<Scalar>> binary_hull(const PolygonMap<Scalar>& map) {
  if (map.k > kMaxHullClasses)
    throw ResourceError("binary hull needs 2^" + std::to_string(map.k) + " corner images; limit is 2^" +
                        std::to_string(kMaxHullClasses));
  const std::uint64_t corners = std::uint64_t{1} << map.k;
  std::vector<Point2<Scalar>> images;
  images.reserve(corners);
  Vector<Scalar> o(map.k);
  for (std::uint64_t bits = 0; bits < corners; ++bits) {
    for (int j = 0; j < map.k; ++j) o(j) = Scalar((bits >> j) & 1U);
    images.push_back(map.apply(o));
  }
  return convex_hull(std::move(images), Scalar(1e-12));
}

/// Image of the output-space segment o_start -> o_end (exact, the map is affine).
template <typename Scalar, typename DerivedA, typename DerivedB>
Segment<Scalar> characteristic_segment(const PolygonMap<Scalar>& map, const Eigen::MatrixBase<DerivedA>& o_start,
                                       const Eigen::MatrixBase<DerivedB>& o_end) {
  return {map.apply(o_start), map.apply(o_end)};
}

}  // namespace bbc
