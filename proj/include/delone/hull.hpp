#pragma once

// Exact convex hulls by gift wrapping in low dimension (m <= 5).
//
// Facets are reported as the full set of input points on the supporting
// hyperplane, so cospherical / coplanar configurations produce a single
// non-simplicial facet. All predicates are fraction-free over an integer type
// (CheckedInt128 first, mpz_class on overflow); the public entry points take
// rational coordinates and clear denominators column by column.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "delone/error.hpp"
#include "delone/integer.hpp"
#include "delone/rational.hpp"

namespace delone::hull {

using IndexList = std::vector<int>;

namespace detail {

template <class Int>
using IPoint = std::vector<Int>;

template <class Int>
struct Hyperplane {
  std::vector<Int> normal;
  Int offset{0};

  Int eval(const IPoint<Int>& p) const {
    Int s = Int(0) - offset;
    for (std::size_t i = 0; i < normal.size(); ++i) s += normal[i] * p[i];
    return s;
  }
  void flip() {
    for (auto& x : normal) x = Int(0) - x;
    offset = Int(0) - offset;
  }
};

template <class Int>
struct Facet {
  IndexList vertices;
  Hyperplane<Int> plane;
};

enum class Mode { full, lower };

template <class Int>
struct Result {
  std::vector<Facet<Int>> facets;
  std::vector<IndexList> boundary_ridges;  // lower mode: ridges whose neighbour is not lower
};

[[noreturn]] inline void degenerate(const char* what) { throw Error("geometry.degenerate", what); }

template <class Int>
std::vector<Int> difference(const IPoint<Int>& a, const IPoint<Int>& b) {
  std::vector<Int> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

/// Greedily picks up to `want` affinely independent points from `candidates`.
template <class Int>
IndexList affine_basis(const std::vector<IPoint<Int>>& pts, const IndexList& candidates, std::size_t want) {
  IndexList basis;
  if (candidates.empty() || want == 0) return basis;
  basis.push_back(candidates[0]);
  std::vector<std::vector<Int>> rows;
  for (std::size_t k = 1; k < candidates.size() && basis.size() < want; ++k) {
    rows.push_back(difference(pts[candidates[k]], pts[candidates[0]]));
    if (integer_rank(rows) == static_cast<int>(rows.size())) {
      basis.push_back(candidates[k]);
    } else {
      rows.pop_back();
    }
  }
  return basis;
}

/// Hyperplane through m affinely independent points of Z^m (generalized cross product).
template <class Int>
Hyperplane<Int> hyperplane_through(const std::vector<IPoint<Int>>& pts, const IndexList& basis) {
  const std::size_t m = pts[basis[0]].size();
  std::vector<std::vector<Int>> rows;
  rows.reserve(m - 1);
  for (std::size_t i = 1; i < basis.size(); ++i) rows.push_back(difference(pts[basis[i]], pts[basis[0]]));
  Hyperplane<Int> h;
  h.normal.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<std::vector<Int>> minor(m - 1, std::vector<Int>(m - 1));
    for (std::size_t r = 0; r + 1 < m; ++r) {
      std::size_t c2 = 0;
      for (std::size_t c = 0; c < m; ++c) {
        if (c == j) continue;
        minor[r][c2++] = rows[r][c];
      }
    }
    Int det = bareiss_determinant(std::move(minor));
    h.normal[j] = (j % 2 == 0) ? det : Int(0) - det;
  }
  h.offset = Int(0);
  for (std::size_t i = 0; i < m; ++i) h.offset += h.normal[i] * pts[basis[0]][i];
  return h;
}

template <class Int>
std::vector<IPoint<Int>> project_out(const std::vector<IPoint<Int>>& pts, const IndexList& subset, std::size_t axis) {
  std::vector<IPoint<Int>> out;
  out.reserve(subset.size());
  for (int idx : subset) {
    IPoint<Int> p;
    p.reserve(pts[idx].size() - 1);
    for (std::size_t c = 0; c < pts[idx].size(); ++c)
      if (c != axis) p.push_back(pts[idx][c]);
    out.push_back(std::move(p));
  }
  return out;
}

template <class Int>
std::size_t nonzero_axis(const Hyperplane<Int>& h) {
  for (std::size_t j = h.normal.size(); j-- > 0;)
    if (sign_of(h.normal[j]) != 0) return j;
  degenerate("zero hyperplane normal");
}

/// A facet of the hull that is lower with respect to `axis`, found by tilting a
/// horizontal supporting hyperplane through the lowest points until its contact
/// set spans a hyperplane. Works in exact rationals; returns every tight point.
template <class Int>
IndexList seed_facet(const std::vector<IPoint<Int>>& pts, std::size_t axis) {
  const std::size_t n = pts.size(), m = pts[0].size();
  std::vector<Vector> base(n, Vector(m - 1));
  Vector height(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c2 = 0;
    for (std::size_t c = 0; c < m; ++c) {
      Rational v(to_mpz(pts[i][c]));
      if (c == axis) {
        height[i] = v;
      } else {
        base[i][c2++] = v;
      }
    }
  }
  Rational lowest = *std::min_element(height.begin(), height.end());
  Vector slope(m - 1, Rational(0));
  Rational intercept = lowest;
  auto slack = [&](std::size_t i) -> Rational { return height[i] - dot(slope, base[i]) - intercept; };

  IndexList contact;
  for (std::size_t i = 0; i < n; ++i)
    if (height[i] == lowest) contact.push_back(static_cast<int>(i));

  while (true) {
    const Vector& p0 = base[contact[0]];
    Matrix diffs;
    for (std::size_t k = 1; k < contact.size(); ++k) diffs.push_back(sub(base[contact[k]], p0));
    auto free_dirs = nullspace(diffs, m - 1);
    if (free_dirs.empty()) break;
    const Vector& dir = free_dirs[0];

    std::optional<Rational> best_t;
    int best_sign = 0;
    for (int s : {1, -1}) {
      for (std::size_t q = 0; q < n; ++q) {
        Rational rate = s * dot(dir, sub(base[q], p0));
        if (sgn(rate) <= 0) continue;
        Rational t = slack(q) / rate;
        if (!best_t || t < *best_t) best_t = t;
      }
      if (best_t) {
        best_sign = s;
        break;
      }
    }
    if (!best_t) degenerate("point set does not span its base space");
    Vector step = scale(dir, *best_t * best_sign);
    slope = add(slope, step);
    intercept -= dot(step, p0);
    contact.clear();
    for (std::size_t i = 0; i < n; ++i)
      if (sgn(slack(i)) == 0) contact.push_back(static_cast<int>(i));
  }
  return contact;
}

template <class Int>
bool base_spans(const std::vector<IPoint<Int>>& pts, std::size_t axis) {
  const std::size_t m = pts[0].size();
  std::vector<std::vector<Int>> rows;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    std::vector<Int> r;
    for (std::size_t c = 0; c < m; ++c)
      if (c != axis) r.push_back(pts[i][c] - pts[0][c]);
    rows.push_back(std::move(r));
  }
  return integer_rank(rows) == static_cast<int>(m) - 1;
}

template <class Int>
Result<Int> hull(const std::vector<IPoint<Int>>& pts, Mode mode, int anchor);

template <class Int>
std::vector<IndexList> ridges_of(const std::vector<IPoint<Int>>& pts, const Facet<Int>& f) {
  const std::size_t m = pts[0].size();
  std::vector<IndexList> ridges;
  if (f.vertices.size() == m) {
    for (std::size_t skip = 0; skip < m; ++skip) {
      IndexList r;
      for (std::size_t k = 0; k < m; ++k)
        if (k != skip) r.push_back(f.vertices[k]);
      ridges.push_back(std::move(r));
    }
    return ridges;
  }
  auto sub = project_out(pts, f.vertices, nonzero_axis(f.plane));
  auto inner = hull(sub, Mode::full, -1);
  for (const auto& g : inner.facets) {
    IndexList r;
    for (int k : g.vertices) r.push_back(f.vertices[k]);
    std::sort(r.begin(), r.end());
    ridges.push_back(std::move(r));
  }
  return ridges;
}

/// Rotates the facet's hyperplane about `ridge` until it meets the next points.
/// Returns nullopt when every point lies on the facet's hyperplane (flat input).
template <class Int>
std::optional<Facet<Int>> wrap(const std::vector<IPoint<Int>>& pts, const Facet<Int>& f, const IndexList& ridge) {
  const std::size_t m = pts[0].size();
  IndexList basis = ridge.size() == m - 1 ? ridge : affine_basis(pts, ridge, m - 1);
  if (basis.size() != m - 1) degenerate("ridge is not full-dimensional");
  int inside = -1;
  for (int v : f.vertices) {
    if (!std::binary_search(ridge.begin(), ridge.end(), v)) {
      inside = v;
      break;
    }
  }
  std::vector<char> on_facet(pts.size(), 0);
  for (int v : f.vertices) on_facet[v] = 1;

  Hyperplane<Int> plane;
  int candidate = -1;
  IndexList through = basis;
  through.push_back(-1);
  for (std::size_t q = 0; q < pts.size(); ++q) {
    if (on_facet[q]) continue;
    if (candidate < 0 || sign_of(plane.eval(pts[q])) > 0) {
      candidate = static_cast<int>(q);
      through.back() = candidate;
      plane = hyperplane_through(pts, through);
      if (sign_of(plane.eval(pts[inside])) > 0) plane.flip();
    }
  }
  if (candidate < 0) return std::nullopt;
  Facet<Int> g;
  g.plane = std::move(plane);
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (sign_of(g.plane.eval(pts[i])) == 0) g.vertices.push_back(static_cast<int>(i));
  return g;
}

template <class Int>
Result<Int> hull(const std::vector<IPoint<Int>>& pts, Mode mode, int anchor) {
  Result<Int> out;
  if (pts.empty()) degenerate("empty point set");
  const std::size_t m = pts[0].size();
  if (pts.size() < (mode == Mode::lower ? m : m + 1)) degenerate("too few points for a full-dimensional hull");

  if (m == 1) {
    IndexList lo, hi;
    auto [mn, mx] = std::minmax_element(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a[0] < b[0]; });
    Int lo_v = (*mn)[0], hi_v = (*mx)[0];
    if (lo_v == hi_v) degenerate("coincident points");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (pts[i][0] == lo_v) lo.push_back(static_cast<int>(i));
      if (pts[i][0] == hi_v) hi.push_back(static_cast<int>(i));
    }
    Facet<Int> a{lo, {{Int(-1)}, Int(0) - lo_v}};
    Facet<Int> b{hi, {{Int(1)}, hi_v}};
    if (mode == Mode::lower) {
      out.facets.push_back(std::move(a));
    } else {
      out.facets.push_back(std::move(a));
      out.facets.push_back(std::move(b));
    }
    return out;
  }

  std::size_t axis = m - 1;
  if (mode == Mode::full) {
    while (!base_spans(pts, axis)) {
      if (axis == 0) degenerate("points are not full-dimensional");
      --axis;
    }
  } else if (!base_spans(pts, axis)) {
    degenerate("base points do not span their space");
  }

  IndexList start = seed_facet(pts, axis);
  if (anchor >= 0 && !std::binary_search(start.begin(), start.end(), anchor))
    throw Error("geometry.anchor", "anchor is not a lowest point");
  IndexList basis = affine_basis(pts, start, m);
  if (basis.size() != m) degenerate("seed facet is not full-dimensional");
  Facet<Int> first{start, hyperplane_through(pts, basis)};
  if (sign_of(first.plane.normal[axis]) > 0) first.plane.flip();

  std::map<IndexList, int> seen;
  std::set<IndexList> done_ridges;
  seen.emplace(first.vertices, 0);
  out.facets.push_back(std::move(first));
  for (std::size_t cursor = 0; cursor < out.facets.size(); ++cursor) {
    auto ridges = ridges_of(pts, out.facets[cursor]);
    for (auto& r : ridges) {
      if (anchor >= 0 && !std::binary_search(r.begin(), r.end(), anchor)) continue;
      if (!done_ridges.insert(r).second) continue;
      auto g = wrap(pts, out.facets[cursor], r);
      if (!g) {
        if (mode == Mode::full) degenerate("points are not full-dimensional");
        out.boundary_ridges.push_back(r);
        continue;
      }
      if (mode == Mode::lower && sign_of(g->plane.normal[axis]) >= 0) {
        out.boundary_ridges.push_back(r);
        continue;
      }
      if (seen.emplace(g->vertices, static_cast<int>(out.facets.size())).second) out.facets.push_back(std::move(*g));
    }
  }
  return out;
}

template <class Int>
std::vector<IndexList> faces(const std::vector<IPoint<Int>>& pts, std::size_t k) {
  const std::size_t m = pts[0].size();
  std::vector<IndexList> result;
  if (k >= m) {
    IndexList all(pts.size());
    std::iota(all.begin(), all.end(), 0);
    result.push_back(all);
    return result;
  }
  auto facets = hull(pts, Mode::full, -1).facets;
  if (k == m - 1) {
    for (auto& f : facets) result.push_back(f.vertices);
    return result;
  }
  std::set<IndexList> unique;
  for (const auto& f : facets) {
    auto sub = project_out(pts, f.vertices, nonzero_axis(f.plane));
    if (k + 1 == m - 1 && f.vertices.size() == m) {
      for (std::size_t skip = 0; skip < m; ++skip) {
        IndexList r;
        for (std::size_t i = 0; i < m; ++i)
          if (i != skip) r.push_back(f.vertices[i]);
        unique.insert(r);
      }
      continue;
    }
    for (const auto& g : faces(sub, k)) {
      IndexList r;
      for (int i : g) r.push_back(f.vertices[i]);
      std::sort(r.begin(), r.end());
      unique.insert(r);
    }
  }
  result.assign(unique.begin(), unique.end());
  return result;
}

/// Fan triangulation from the lowest-ranked point, recursing into facets. A
/// global rank keeps the triangulations of shared faces identical across cells.
template <class Int>
std::vector<IndexList> triangulate(const std::vector<IPoint<Int>>& pts, const std::vector<int>& ranks) {
  const std::size_t m = pts[0].size();
  std::vector<IndexList> simplices;
  if (m == 1) {
    auto [mn, mx] = std::minmax_element(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a[0] < b[0]; });
    if ((*mn)[0] == (*mx)[0]) degenerate("coincident points");
    IndexList s{static_cast<int>(mn - pts.begin()), static_cast<int>(mx - pts.begin())};
    std::sort(s.begin(), s.end());
    simplices.push_back(s);
    return simplices;
  }
  if (pts.size() == m + 1) {
    IndexList all(m + 1);
    std::iota(all.begin(), all.end(), 0);
    simplices.push_back(all);
    return simplices;
  }
  int apex = static_cast<int>(std::min_element(ranks.begin(), ranks.end()) - ranks.begin());
  for (const auto& f : hull(pts, Mode::full, -1).facets) {
    if (std::binary_search(f.vertices.begin(), f.vertices.end(), apex)) continue;
    auto sub = project_out(pts, f.vertices, nonzero_axis(f.plane));
    std::vector<int> sub_ranks;
    for (int v : f.vertices) sub_ranks.push_back(ranks[v]);
    for (const auto& s : triangulate(sub, sub_ranks)) {
      IndexList simplex;
      for (int i : s) simplex.push_back(f.vertices[i]);
      simplex.push_back(apex);
      std::sort(simplex.begin(), simplex.end());
      simplices.push_back(std::move(simplex));
    }
  }
  std::sort(simplices.begin(), simplices.end());
  return simplices;
}

template <class Int>
std::vector<IPoint<Int>> convert(const std::vector<std::vector<Integer>>& pts) {
  std::vector<IPoint<Int>> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out[i].reserve(pts[i].size());
    for (const auto& x : pts[i]) out[i].push_back(from_mpz<Int>(x));
  }
  return out;
}

/// Runs fn on 128-bit integers, or on mpz_class when anything overflows.
template <class Fn>
auto with_integers(const std::vector<std::vector<Integer>>& pts, Fn&& fn) {
  try {
    return fn(convert<CheckedInt128>(pts));
  } catch (const IntegerOverflow&) {
    return fn(convert<Integer>(pts));
  }
}

/// Clears denominators per column; positive column scaling preserves every face.
inline std::vector<std::vector<Integer>> to_integer_points(const std::vector<Vector>& pts) {
  if (pts.empty()) return {};
  const std::size_t m = pts[0].size();
  std::vector<Integer> col_lcm(m, Integer(1));
  for (const auto& p : pts) {
    if (p.size() != m) throw Error("geometry.dimension_mismatch", "points have different dimensions");
    for (std::size_t c = 0; c < m; ++c) mpz_lcm(col_lcm[c].get_mpz_t(), col_lcm[c].get_mpz_t(), p[c].get_den_mpz_t());
  }
  std::vector<std::vector<Integer>> out(pts.size(), std::vector<Integer>(m));
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t c = 0; c < m; ++c) out[i][c] = pts[i][c].get_num() * (col_lcm[c] / pts[i][c].get_den());
  return out;
}

inline void require_distinct(const std::vector<Vector>& pts) {
  std::vector<const Vector*> sorted;
  for (const auto& p : pts) sorted.push_back(&p);
  std::sort(sorted.begin(), sorted.end(), [](const Vector* a, const Vector* b) { return *a < *b; });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (*sorted[i] == *sorted[i - 1]) throw Error("geometry.degenerate", "duplicate points");
}

}  // namespace detail

/// Vertex lists of the facets of conv(pts); pts must be full-dimensional and distinct.
inline std::vector<IndexList> convex_hull_facets(const std::vector<Vector>& pts) {
  detail::require_distinct(pts);
  return detail::with_integers(detail::to_integer_points(pts), [](const auto& ip) {
    std::vector<IndexList> out;
    for (auto& f : detail::hull(ip, detail::Mode::full, -1).facets) out.push_back(f.vertices);
    std::sort(out.begin(), out.end());
    return out;
  });
}

struct LowerHull {
  std::vector<IndexList> facets;
  std::vector<IndexList> boundary_ridges;
};

/// Facets of conv(pts) whose outward normal has a negative last coordinate.
/// With anchor >= 0 (a lowest point), only the facets around the anchor are
/// walked: the star of that vertex.
inline LowerHull lower_hull_facets_integer(const std::vector<std::vector<Integer>>& pts, int anchor = -1) {
  return detail::with_integers(pts, [anchor](const auto& ip) {
    auto r = detail::hull(ip, detail::Mode::lower, anchor);
    LowerHull out;
    for (auto& f : r.facets) out.facets.push_back(f.vertices);
    std::sort(out.facets.begin(), out.facets.end());
    out.boundary_ridges = std::move(r.boundary_ridges);
    return out;
  });
}

inline LowerHull lower_hull_facets(const std::vector<Vector>& pts) {
  detail::require_distinct(pts);
  return lower_hull_facets_integer(detail::to_integer_points(pts));
}

/// All k-dimensional faces of conv(pts), as vertex index lists.
inline std::vector<IndexList> polytope_faces(const std::vector<Vector>& pts, std::size_t k) {
  detail::require_distinct(pts);
  return detail::with_integers(detail::to_integer_points(pts), [k](const auto& ip) { return detail::faces(ip, k); });
}

/// Fan triangulation whose apex, at every level of recursion, is the point of
/// lowest rank among the current face.
inline std::vector<IndexList> triangulate(const std::vector<Vector>& pts, const std::vector<int>& ranks) {
  detail::require_distinct(pts);
  return detail::with_integers(detail::to_integer_points(pts),
                               [&ranks](const auto& ip) { return detail::triangulate(ip, ranks); });
}

/// Ranks points lexicographically (smallest vertex first).
inline std::vector<IndexList> triangulate(const std::vector<Vector>& pts) {
  std::vector<int> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return pts[a] < pts[b]; });
  std::vector<int> ranks(pts.size());
  for (std::size_t i = 0; i < order.size(); ++i) ranks[order[i]] = static_cast<int>(i);
  return triangulate(pts, ranks);
}

/// Exact d-volume of conv(pts).
inline Rational polytope_volume(const std::vector<Vector>& pts) {
  const std::size_t m = pts.at(0).size();
  Rational total = 0;
  Integer fact = 1;
  for (std::size_t i = 2; i <= m; ++i) fact *= static_cast<unsigned long>(i);
  for (const auto& s : triangulate(pts)) {
    Matrix rows;
    for (std::size_t i = 1; i < s.size(); ++i) rows.push_back(sub(pts[s[i]], pts[s[0]]));
    Rational det = determinant(rows);
    total += abs(det);
  }
  return total / Rational(fact);
}

}  // namespace delone::hull
