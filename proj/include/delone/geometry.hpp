#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "delone/error.hpp"
#include "delone/hull.hpp"
#include "delone/rational.hpp"

namespace delone {

/// Cartesian point with exact rational coordinates.
using Point = Vector;

struct Sphere {
  Point center;
  Rational radius_squared;
  double radius_float = 0.0;  // sqrt(radius_squared), for reporting only
};

/// A downward-facing facet of a lifted point set.
struct HullCell {
  std::vector<int> vertex_indices;
  Vector normal;  // outward; last coordinate negative
  Rational offset;  // normal . x == offset on the facet, < offset elsewhere
};

namespace detail {

inline std::size_t common_dimension(const std::vector<Point>& pts) {
  if (pts.empty()) throw Error("geometry.dimension_mismatch", "no points");
  const std::size_t d = pts[0].size();
  for (const auto& p : pts)
    if (p.size() != d) throw Error("geometry.dimension_mismatch", "points have different dimensions");
  return d;
}

inline void require_simplex(const std::vector<Point>& simplex) {
  const std::size_t d = common_dimension(simplex);
  if (simplex.size() != d + 1)
    throw Error("geometry.dimension_mismatch",
                "a simplex in dimension " + std::to_string(d) + " needs " + std::to_string(d + 1) + " points");
}

}  // namespace detail

inline Sphere make_sphere(Point center, Rational radius_squared) {
  double r = std::sqrt(to_double(radius_squared));
  return Sphere{std::move(center), std::move(radius_squared), r};
}

/// Sign of det[p1 - p0, ..., pd - p0]; zero iff the points are affinely dependent.
inline int orientation(const std::vector<Point>& simplex) {
  detail::require_simplex(simplex);
  Matrix rows;
  for (std::size_t i = 1; i < simplex.size(); ++i) rows.push_back(sub(simplex[i], simplex[0]));
  return determinant_sign(rows);
}

/// +1 strictly inside the circumsphere, 0 on it, -1 outside. Evaluates the
/// lifted (d+1)x(d+1) determinant of rows (s_i - q, |s_i - q|^2).
inline int in_sphere(const std::vector<Point>& simplex, const Point& query) {
  detail::require_simplex(simplex);
  const std::size_t d = simplex[0].size();
  if (query.size() != d) throw Error("geometry.dimension_mismatch", "query dimension differs from simplex");
  int orient = orientation(simplex);
  if (orient == 0) throw Error("geometry.degenerate", "in_sphere on an affinely degenerate simplex");
  Matrix rows;
  for (const auto& s : simplex) {
    Vector r = sub(s, query);
    r.push_back(norm2(r));
    rows.push_back(std::move(r));
  }
  int sign = determinant_sign(rows) * orient;
  return (d % 2 == 0) ? sign : -sign;
}

/// Sphere through the given points, which must contain an affinely spanning subset.
inline Sphere circumsphere_of(const std::vector<Point>& pts, const std::vector<int>& indices) {
  const std::size_t d = pts.at(indices.at(0)).size();
  const Point& p0 = pts[indices[0]];
  Matrix rows;
  Vector rhs;
  Rational p0n = norm2(p0);
  for (std::size_t k = 1; k < indices.size() && rows.size() < d; ++k) {
    Vector diff = sub(pts[indices[k]], p0);
    Matrix trial = rows;
    trial.push_back(diff);
    if (rank(trial) != static_cast<int>(trial.size())) continue;
    rows.push_back(scale(diff, 2));
    rhs.push_back(norm2(pts[indices[k]]) - p0n);
  }
  if (rows.size() != d) throw Error("geometry.degenerate", "points do not span their space");
  auto center = solve(rows, rhs);
  if (!center) throw Error("geometry.degenerate", "circumcenter system is singular");
  Rational r2 = distance2(*center, p0);
  return make_sphere(std::move(*center), std::move(r2));
}

/// Circumsphere of d+1 affinely independent points.
inline Sphere circumsphere(const std::vector<Point>& simplex) {
  detail::require_simplex(simplex);
  if (orientation(simplex) == 0) throw Error("geometry.degenerate", "circumsphere of a degenerate simplex");
  std::vector<int> idx(simplex.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  return circumsphere_of(simplex, idx);
}

/// (p, |p|^2)
inline Point lift_to_paraboloid(const Point& p) {
  Point lifted = p;
  lifted.push_back(norm2(p));
  return lifted;
}

/// Downward-facing facets of conv(lifted). Points lying on a common facet
/// hyperplane form a single cell (no arbitrary triangulation).
inline std::vector<HullCell> lower_hull_cells(const std::vector<Point>& lifted) {
  const std::size_t dim = detail::common_dimension(lifted);
  if (dim < 2) throw Error("geometry.dimension_mismatch", "lifted points need dimension >= 2");
  if (lifted.size() < dim) throw Error("geometry.too_few_points", "need at least d+1 points");
  auto lower = hull::lower_hull_facets(lifted);
  std::vector<HullCell> cells;
  cells.reserve(lower.facets.size());
  for (auto& f : lower.facets) {
    Matrix diffs;
    for (std::size_t k = 1; k < f.size(); ++k) diffs.push_back(sub(lifted[f[k]], lifted[f[0]]));
    auto normals = nullspace(diffs, dim);
    Vector normal = normals.at(0);
    if (sgn(normal.back()) > 0) normal = scale(normal, -1);
    Rational offset = dot(normal, lifted[f[0]]);
    cells.push_back(HullCell{f, std::move(normal), std::move(offset)});
  }
  return cells;
}

}  // namespace delone
