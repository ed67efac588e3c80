#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "delone/error.hpp"
#include "delone/geometry.hpp"
#include "delone/hull.hpp"
#include "delone/rational.hpp"

namespace delone {

using PointSet = std::vector<Point>;
using IndexList = hull::IndexList;

/// Closed axis-aligned box [lo, hi].
struct Box {
  Point lo, hi;

  bool contains(const Point& p) const {
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p[i] < lo[i] || p[i] > hi[i]) return false;
    return true;
  }

  /// The box shrunk by `m` on every side; nullopt if it would become empty.
  std::optional<Box> eroded(const Rational& m) const {
    Box b{lo, hi};
    for (std::size_t i = 0; i < lo.size(); ++i) {
      b.lo[i] += m;
      b.hi[i] -= m;
      if (b.lo[i] > b.hi[i]) return std::nullopt;
    }
    return b;
  }
};

/// Certificate data of an (r, R)-set. The covering radius is kept squared so
/// that values like R = sqrt(1/2) stay exact.
struct DeloneParams {
  Rational r;
  Rational R_squared;
  Box window;
  Rational margin;

  /// Validates the invariants. Without a margin, the smallest integer >= R is used.
  static DeloneParams make(Rational r, Rational R_squared, Box window, std::optional<Rational> margin = std::nullopt) {
    if (sgn(r) <= 0 || sgn(R_squared) <= 0) throw Error("tiling.bad_params", "r and R must be positive");
    if (r * r > R_squared) throw Error("tiling.bad_params", "r must not exceed R");
    if (window.lo.size() != window.hi.size() || window.lo.empty())
      throw Error("tiling.bad_params", "window corners must share a positive dimension");
    for (std::size_t i = 0; i < window.lo.size(); ++i)
      if (window.lo[i] > window.hi[i]) throw Error("tiling.bad_params", "window lower corner exceeds upper corner");
    Rational m;
    if (margin) {
      m = *margin;
      if (sgn(m) < 0 || m * m < R_squared) throw Error("tiling.bad_params", "margin must be at least R");
    } else {
      Integer k = 0;
      while (Rational(k * k) < R_squared) ++k;
      m = Rational(k);
    }
    return DeloneParams{std::move(r), std::move(R_squared), std::move(window), std::move(m)};
  }
};

struct LSolid {
  IndexList vertex_indices;
  Sphere circumsphere;
};

struct LTiling {
  PointSet points;  // canonical (lexicographic) order
  std::vector<LSolid> cells;
  std::map<IndexList, std::vector<int>> adjacency;  // facet vertex list -> incident cells
};

struct CoverageWitness {
  Point center;
  Rational distance_squared;  // to the nearest input point
};

struct ValidationReport {
  bool packing_ok = true;
  std::vector<std::pair<int, int>> packing_violations;
  bool covering_ok = true;
  std::vector<CoverageWitness> covering_witnesses;
  Box checked_region;
  std::optional<CoverageWitness> deepest_hole;
};

struct TilingViolation {
  std::string kind;  // degenerate_cell, off_sphere, nonempty_sphere, incomplete_cell, overlap, gap, face_mismatch, adjacency_mismatch
  int cell = -1;
  std::string detail;
};

struct TilingVerification {
  bool ok = true;
  std::vector<TilingViolation> violations;
};

namespace detail {

inline std::size_t point_dimension(const PointSet& pts) {
  if (pts.empty()) throw Error("tiling.empty", "point set is empty");
  return common_dimension(pts);
}

inline int affine_rank(const PointSet& pts, const IndexList& idx) {
  if (idx.empty()) return -1;
  Matrix rows;
  for (std::size_t k = 1; k < idx.size(); ++k) rows.push_back(sub(pts[idx[k]], pts[idx[0]]));
  return rows.empty() ? 0 : rank(rows);
}

inline IndexList all_indices(std::size_t n) {
  IndexList v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

inline PointSet gather(const PointSet& pts, const IndexList& idx) {
  PointSet out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(pts[i]);
  return out;
}

/// Hyperplane through a facet, oriented so `inside` is on the negative side.
inline std::pair<Vector, Rational> facet_plane(const PointSet& pts, const IndexList& facet, const Point& inside) {
  Matrix diffs;
  for (std::size_t k = 1; k < facet.size(); ++k) diffs.push_back(sub(pts[facet[k]], pts[facet[0]]));
  Vector n = nullspace(diffs, pts[facet[0]].size()).at(0);
  Rational off = dot(n, pts[facet[0]]);
  if (dot(n, inside) > off) {
    n = scale(n, -1);
    off = -off;
  }
  return {n, off};
}

/// Facets of conv(pts[cell]) as global index lists.
inline std::vector<IndexList> cell_facets(const PointSet& pts, const IndexList& cell) {
  std::vector<IndexList> out;
  for (const auto& f : hull::convex_hull_facets(gather(pts, cell))) {
    IndexList g;
    for (int i : f) g.push_back(cell[i]);
    std::sort(g.begin(), g.end());
    out.push_back(std::move(g));
  }
  return out;
}

/// Cells of the Delaunay tiling of pts, indices into pts as given.
inline std::vector<IndexList> delaunay_cells(const PointSet& pts) {
  PointSet lifted;
  lifted.reserve(pts.size());
  for (const auto& p : pts) lifted.push_back(lift_to_paraboloid(p));
  std::vector<IndexList> cells;
  for (auto& c : lower_hull_cells(lifted)) cells.push_back(std::move(c.vertex_indices));
  std::sort(cells.begin(), cells.end());
  return cells;
}

inline Rational nearest_distance2(const PointSet& pts, const Point& z) {
  Rational best = distance2(pts[0], z);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    Rational d = distance2(pts[i], z);
    if (d < best) best = d;
  }
  return best;
}

/// Points of `face`'s bisector flat that lie on a j-face of `box` (j = dim face).
inline void bisector_box_points(const PointSet& pts, const IndexList& face, const Box& box, std::set<Point>& out) {
  const std::size_t d = box.lo.size();
  // affine basis of the face
  IndexList basis{face[0]};
  for (std::size_t k = 1; k < face.size(); ++k) {
    IndexList trial = basis;
    trial.push_back(face[k]);
    if (affine_rank(pts, trial) == static_cast<int>(trial.size()) - 1) basis = std::move(trial);
  }
  const std::size_t j = basis.size() - 1;
  const Point& g0 = pts[basis[0]];
  std::vector<std::size_t> free_axes;
  auto choose = [&](auto&& self, std::size_t start) -> void {
    if (free_axes.size() == j) {
      std::vector<std::size_t> fixed;
      for (std::size_t a = 0; a < d; ++a)
        if (std::find(free_axes.begin(), free_axes.end(), a) == free_axes.end()) fixed.push_back(a);
      for (unsigned long mask = 0; mask < (1UL << fixed.size()); ++mask) {
        Point z(d);
        for (std::size_t t = 0; t < fixed.size(); ++t) z[fixed[t]] = (mask >> t) & 1 ? box.hi[fixed[t]] : box.lo[fixed[t]];
        // 2 z.(g_i - g_0) = |g_i|^2 - |g_0|^2 with the fixed coordinates substituted
        Matrix a;
        Vector b;
        for (std::size_t i = 1; i <= j; ++i) {
          Vector diff = sub(pts[basis[i]], g0);
          Rational rhs = norm2(pts[basis[i]]) - norm2(g0);
          Vector row;
          for (std::size_t f : free_axes) row.push_back(2 * diff[f]);
          for (std::size_t f : fixed) rhs -= 2 * diff[f] * z[f];
          a.push_back(std::move(row));
          b.push_back(std::move(rhs));
        }
        if (j > 0) {
          auto sol = solve(a, b);
          if (!sol) continue;
          for (std::size_t t = 0; t < j; ++t) z[free_axes[t]] = (*sol)[t];
        }
        if (box.contains(z)) out.insert(std::move(z));
      }
      return;
    }
    for (std::size_t a = start; a < d; ++a) {
      free_axes.push_back(a);
      self(self, a + 1);
      free_axes.pop_back();
    }
  };
  choose(choose, 0);
}

}  // namespace detail

/// Exact (r, R) check on a finite window. Packing: no two points closer than
/// 2r. Covering: every point of the eroded window lies within R of the set;
/// only circumcenters, bisector/box-face intersections and corners can be
/// farthest, so those are enumerated.
inline ValidationReport validate_delone_set(const PointSet& points, const DeloneParams& params) {
  const std::size_t d = detail::point_dimension(points);
  if (params.window.lo.size() != d) throw Error("geometry.dimension_mismatch", "window and points differ in dimension");
  for (const auto& p : points)
    if (!params.window.contains(p)) throw Error("tiling.outside_window", "a point lies outside the window");
  auto eroded = params.window.eroded(params.margin);
  if (!eroded) throw Error("tiling.window_too_small", "window is too small for the margin");

  ValidationReport report;
  report.checked_region = *eroded;

  const Rational min2 = 4 * params.r * params.r;
  const int n = static_cast<int>(points.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (distance2(points[i], points[j]) < min2) report.packing_violations.emplace_back(i, j);
  report.packing_ok = report.packing_violations.empty();

  std::set<IndexList> faces;
  for (int i = 0; i < n; ++i) faces.insert(IndexList{i});
  if (detail::affine_rank(points, detail::all_indices(points.size())) == static_cast<int>(d) &&
      points.size() > d) {
    for (const auto& cell : detail::delaunay_cells(points)) {
      auto cp = detail::gather(points, cell);
      for (std::size_t k = 1; k <= d; ++k) {
        for (const auto& f : hull::polytope_faces(cp, k)) {
          IndexList g;
          for (int v : f) g.push_back(cell[v]);
          std::sort(g.begin(), g.end());
          faces.insert(std::move(g));
        }
      }
    }
  } else {
    // no tiling: every affinely independent subset stands in for a face
    IndexList pick;
    auto visit = [&](auto&& self, int start) -> void {
      if (!pick.empty()) faces.insert(pick);
      if (pick.size() == d + 1) return;
      for (int i = start; i < n; ++i) {
        pick.push_back(i);
        if (detail::affine_rank(points, pick) == static_cast<int>(pick.size()) - 1) self(self, i + 1);
        pick.pop_back();
      }
    };
    visit(visit, 0);
  }

  std::set<Point> candidates;
  for (const auto& f : faces) detail::bisector_box_points(points, f, *eroded, candidates);
  for (const auto& z : candidates) {
    Rational dist = detail::nearest_distance2(points, z);
    if (!report.deepest_hole || dist > report.deepest_hole->distance_squared) report.deepest_hole = CoverageWitness{z, dist};
    if (dist > params.R_squared) report.covering_witnesses.push_back(CoverageWitness{z, dist});
  }
  report.covering_ok = report.covering_witnesses.empty();
  return report;
}

/// Grows an empty ball from `seed` until its boundary points span and
/// surround the seed. The center moves along the part of (seed - x0) normal to
/// the flat of the current boundary points, so every boundary point stays on
/// the sphere; the first points met are acquired together. When the boundary
/// spans but misses the seed, the boundary shrinks to the facet facing the seed.
inline LSolid grow_empty_sphere(const PointSet& points, const Point& seed) {
  const std::size_t d = detail::point_dimension(points);
  if (seed.size() != d) throw Error("geometry.dimension_mismatch", "seed dimension differs from points");
  const int n = static_cast<int>(points.size());
  for (const auto& p : points)
    if (p == seed) throw Error("tiling.seed_on_point", "seed coincides with an input point");
  if (detail::affine_rank(points, detail::all_indices(points.size())) != static_cast<int>(d))
    throw Error("geometry.degenerate", "points do not affinely span the space");

  Point z = seed;
  Rational r2 = detail::nearest_distance2(points, z);
  IndexList touching;
  for (int i = 0; i < n; ++i)
    if (distance2(points[i], z) == r2) touching.push_back(i);

  const long max_steps = 100L * n + 100;
  for (long step = 0; step < max_steps; ++step) {
    const Point& x0 = points[touching[0]];
    if (detail::affine_rank(points, touching) == static_cast<int>(d)) {
      std::optional<IndexList> violated;
      for (const auto& f : detail::cell_facets(points, touching)) {
        const Point* inside = nullptr;
        for (int v : touching)
          if (!std::binary_search(f.begin(), f.end(), v)) {
            inside = &points[v];
            break;
          }
        auto [normal, offset] = detail::facet_plane(points, f, *inside);
        if (dot(normal, seed) > offset) {
          violated = f;
          break;
        }
      }
      if (!violated) return LSolid{touching, make_sphere(z, r2)};
      touching = *violated;
      continue;
    }

    // direction: component of (seed - x0) orthogonal to the flat of `touching`
    Matrix span;
    for (std::size_t k = 1; k < touching.size(); ++k) span.push_back(sub(points[touching[k]], x0));
    Vector target = sub(seed, x0);
    Vector u = target;
    if (!span.empty()) {
      // orthogonal projection onto span via the normal equations of an independent subset
      Matrix indep;
      for (const auto& row : span) {
        Matrix trial = indep;
        trial.push_back(row);
        if (rank(trial) == static_cast<int>(trial.size())) indep = std::move(trial);
      }
      Matrix g(indep.size(), Vector(indep.size()));
      Vector b(indep.size());
      for (std::size_t i = 0; i < indep.size(); ++i) {
        for (std::size_t j = 0; j < indep.size(); ++j) g[i][j] = dot(indep[i], indep[j]);
        b[i] = dot(indep[i], target);
      }
      Vector alpha = *solve(g, b);
      for (std::size_t i = 0; i < indep.size(); ++i) u = sub(u, scale(indep[i], alpha[i]));
    }

    std::vector<Vector> directions;
    if (!is_zero(u)) {
      directions.push_back(u);
    } else {
      Vector w = nullspace(span, d).at(0);
      directions.push_back(w);
      directions.push_back(scale(w, -1));
    }

    bool moved = false;
    for (const auto& dir : directions) {
      std::optional<Rational> best;
      IndexList hits;
      for (int y = 0; y < n; ++y) {
        if (std::binary_search(touching.begin(), touching.end(), y)) continue;
        Rational rate = dot(dir, sub(points[y], x0));
        if (sgn(rate) <= 0) continue;
        Rational t = (distance2(z, points[y]) - distance2(z, x0)) / (2 * rate);
        if (!best || t < *best) {
          best = t;
          hits.assign(1, y);
        } else if (t == *best) {
          hits.push_back(y);
        }
      }
      if (!best) continue;
      z = add(z, scale(dir, *best));
      r2 = distance2(z, x0);
      touching.insert(touching.end(), hits.begin(), hits.end());
      std::sort(touching.begin(), touching.end());
      moved = true;
      break;
    }
    if (!moved) throw Error("tiling.seed_outside_hull", "the ball grows without bound: seed lies outside the convex hull");
  }
  throw Error("tiling.no_convergence", "empty-sphere growth did not terminate");
}

namespace detail {

inline PointSet canonical_points(const PointSet& points) {
  point_dimension(points);
  PointSet sorted = points;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error("geometry.degenerate", "duplicate points");
  return sorted;
}

}  // namespace detail

/// Delaunay (L-) tiling via the paraboloid lift. Points are sorted first, so
/// the result does not depend on input order.
inline LTiling build_l_tiling(const PointSet& points) {
  LTiling t;
  t.points = detail::canonical_points(points);
  const std::size_t d = t.points[0].size();
  if (t.points.size() < d + 1 ||
      detail::affine_rank(t.points, detail::all_indices(t.points.size())) != static_cast<int>(d))
    throw Error("geometry.degenerate", "points do not affinely span the space");
  for (auto& cell : detail::delaunay_cells(t.points)) {
    Sphere s = circumsphere_of(t.points, cell);
    t.cells.push_back(LSolid{std::move(cell), std::move(s)});
  }
  for (int c = 0; c < static_cast<int>(t.cells.size()); ++c)
    for (auto& f : detail::cell_facets(t.points, t.cells[c].vertex_indices)) t.adjacency[f].push_back(c);
  return t;
}

/// Re-derives every tiling property from the stored points and cells alone.
inline TilingVerification verify_l_tiling(const LTiling& tiling) {
  TilingVerification out;
  auto flag = [&](std::string kind, int cell, std::string detail) {
    out.violations.push_back(TilingViolation{std::move(kind), cell, std::move(detail)});
  };
  const auto& pts = tiling.points;
  if (pts.empty()) {
    if (!tiling.cells.empty()) flag("degenerate_cell", 0, "cells without points");
    out.ok = out.violations.empty();
    return out;
  }
  const std::size_t d = pts[0].size();
  const int n = static_cast<int>(pts.size());

  std::vector<bool> usable(tiling.cells.size(), false);
  Rational cell_volume = 0;
  std::map<IndexList, std::vector<std::pair<int, int>>> facet_sides;  // facet -> (cell, side of the cell)
  for (int c = 0; c < static_cast<int>(tiling.cells.size()); ++c) {
    const auto& cell = tiling.cells[c];
    const auto& v = cell.vertex_indices;
    bool bad_index = v.empty() || std::any_of(v.begin(), v.end(), [n](int i) { return i < 0 || i >= n; });
    IndexList sorted = v;
    std::sort(sorted.begin(), sorted.end());
    if (bad_index || std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() ||
        detail::affine_rank(pts, sorted) != static_cast<int>(d)) {
      flag("degenerate_cell", c, "vertices do not span a full-dimensional cell");
      continue;
    }
    usable[c] = true;
    const auto& s = cell.circumsphere;
    if (s.center.size() != d) {
      flag("off_sphere", c, "sphere center has the wrong dimension");
      continue;
    }
    for (int i : sorted)
      if (distance2(pts[i], s.center) != s.radius_squared)
        flag("off_sphere", c, "vertex " + std::to_string(i) + " is not on the circumsphere");
    for (int i = 0; i < n; ++i) {
      int cmp = sgn(distance2(pts[i], s.center) - s.radius_squared);
      if (cmp < 0) flag("nonempty_sphere", c, "point " + std::to_string(i) + " lies inside the circumsphere");
      if (cmp == 0 && !std::binary_search(sorted.begin(), sorted.end(), i))
        flag("incomplete_cell", c, "point " + std::to_string(i) + " is on the circumsphere but not a vertex");
    }
    cell_volume += hull::polytope_volume(detail::gather(pts, sorted));
    for (const auto& f : detail::cell_facets(pts, sorted)) {
      const Point* inside = nullptr;
      for (int x : sorted)
        if (!std::binary_search(f.begin(), f.end(), x)) {
          inside = &pts[x];
          break;
        }
      // side +1: the cell lies on the positive side of the canonical facet normal
      Matrix diffs;
      for (std::size_t k = 1; k < f.size(); ++k) diffs.push_back(sub(pts[f[k]], pts[f[0]]));
      Vector normal = nullspace(diffs, d).at(0);
      int side = sgn(dot(normal, sub(*inside, pts[f[0]])));
      facet_sides[f].emplace_back(c, side);
    }
  }

  if (detail::affine_rank(pts, detail::all_indices(pts.size())) == static_cast<int>(d)) {
    Rational hull_volume = hull::polytope_volume(pts);
    if (cell_volume > hull_volume)
      flag("overlap", -1, "cell volumes sum to " + to_string(cell_volume) + " > hull volume " + to_string(hull_volume));
    if (cell_volume < hull_volume)
      flag("gap", -1, "cell volumes sum to " + to_string(cell_volume) + " < hull volume " + to_string(hull_volume));
  } else if (!tiling.cells.empty()) {
    flag("degenerate_cell", -1, "points do not span the space");
  }

  for (const auto& [f, sides] : facet_sides) {
    if (sides.size() == 1) {
      // must be a facet of the hull of all points
      Matrix diffs;
      for (std::size_t k = 1; k < f.size(); ++k) diffs.push_back(sub(pts[f[k]], pts[f[0]]));
      Vector normal = nullspace(diffs, d).at(0);
      bool pos = false, neg = false;
      for (const auto& p : pts) {
        int s = sgn(dot(normal, sub(p, pts[f[0]])));
        pos |= s > 0;
        neg |= s < 0;
      }
      if (pos && neg) flag("face_mismatch", sides[0].first, "interior facet has no matching neighbour");
    } else if (sides.size() != 2 || sides[0].second == sides[1].second) {
      flag("face_mismatch", sides[0].first, "facet shared by cells that are not on opposite sides");
    }
  }

  if (!tiling.adjacency.empty()) {
    std::map<IndexList, std::vector<int>> expected;
    for (const auto& [f, sides] : facet_sides)
      for (auto [c, side] : sides) expected[f].push_back(c);
    if (expected != tiling.adjacency) flag("adjacency_mismatch", -1, "stored adjacency differs from the cell facets");
  }

  out.ok = out.violations.empty();
  return out;
}

/// Splits every cell into simplices. Apexes are chosen by global point index,
/// so neighbouring cells triangulate their shared faces identically.
inline std::vector<IndexList> simplicial_refinement(const LTiling& tiling) {
  std::vector<IndexList> out;
  for (const auto& cell : tiling.cells) {
    for (const auto& s : hull::triangulate(detail::gather(tiling.points, cell.vertex_indices), cell.vertex_indices)) {
      IndexList g;
      for (int i : s) g.push_back(cell.vertex_indices[i]);
      std::sort(g.begin(), g.end());
      out.push_back(std::move(g));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace delone
