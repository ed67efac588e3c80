#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "delone/error.hpp"
#include "delone/geometry.hpp"
#include "delone/hull.hpp"
#include "delone/rational.hpp"

namespace delone {

/// Integer coordinates with respect to a lattice basis.
using LatticeVector = std::vector<Integer>;

/// x A x^T with A symmetric positive definite.
struct QuadraticForm {
  Matrix gram;

  std::size_t dim() const { return gram.size(); }

  /// The d(d+1)/2 entries a_ij, i <= j, row by row.
  Vector cone_point() const {
    Vector v;
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = i; j < dim(); ++j) v.push_back(gram[i][j]);
    return v;
  }

  static QuadraticForm from_cone_point(std::size_t d, const Vector& v) {
    if (v.size() != d * (d + 1) / 2) throw Error("lattice.dimension_mismatch", "cone point has the wrong length");
    QuadraticForm f{Matrix(d, Vector(d))};
    std::size_t k = 0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) f.gram[i][j] = f.gram[j][i] = v[k++];
    return f;
  }

  Rational evaluate(const Vector& x) const {
    Rational s = 0;
    for (std::size_t i = 0; i < dim(); ++i) {
      if (sgn(x[i]) == 0) continue;
      for (std::size_t j = 0; j < dim(); ++j) s += x[i] * gram[i][j] * x[j];
    }
    return s;
  }

  Rational evaluate(const LatticeVector& x) const {
    Vector v;
    for (const auto& c : x) v.push_back(Rational(c));
    return evaluate(v);
  }
};

/// True iff every leading principal minor is positive.
inline bool is_positive_definite(const QuadraticForm& f) {
  for (std::size_t k = 1; k <= f.dim(); ++k) {
    Matrix lead(k, Vector(k));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) lead[i][j] = f.gram[i][j];
    if (sgn(determinant(lead)) <= 0) return false;
  }
  return true;
}

/// Throws unless the form is square, symmetric and positive definite.
inline void require_positive_definite(const QuadraticForm& f) {
  const std::size_t d = f.dim();
  if (d == 0) throw Error("lattice.dimension_mismatch", "empty Gram matrix");
  for (const auto& row : f.gram)
    if (row.size() != d) throw Error("lattice.dimension_mismatch", "Gram matrix is not square");
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (f.gram[i][j] != f.gram[j][i]) throw Error("lattice.not_symmetric", "Gram matrix is not symmetric");
  if (!is_positive_definite(f)) throw Error("lattice.not_positive_definite", "form is not positive definite");
}

/// A = B B^T.
inline QuadraticForm gram_from_basis(const Matrix& basis) {
  const std::size_t d = basis.size();
  if (d == 0) throw Error("lattice.dimension_mismatch", "empty basis");
  for (const auto& row : basis)
    if (row.size() != d) throw Error("lattice.dimension_mismatch", "basis must be square");
  if (sgn(determinant(basis)) == 0) throw Error("lattice.singular_basis", "basis vectors are linearly dependent");
  return QuadraticForm{multiply(basis, transpose(basis))};
}

/// A lattice given by its form, and optionally a basis consistent with it.
struct Lattice {
  Matrix basis;  // empty when only the Gram matrix is known
  QuadraticForm form;

  static Lattice from_basis(Matrix b) {
    auto f = gram_from_basis(b);
    return Lattice{std::move(b), std::move(f)};
  }

  static Lattice from_gram(Matrix g) {
    QuadraticForm f{std::move(g)};
    require_positive_definite(f);
    return Lattice{{}, std::move(f)};
  }

  /// Both given: the Gram matrix must equal B B^T exactly.
  static Lattice from_basis_and_gram(Matrix b, Matrix g) {
    auto l = from_basis(std::move(b));
    if (l.form.gram != g) throw Error("lattice.inconsistent", "Gram matrix does not match the basis");
    return l;
  }
};

struct Reduction {
  Matrix gram;  // U A U^T
  Matrix U;     // unimodular, integer entries
};

/// LLL reduction of a Gram matrix (delta = 99/100), exact.
inline Reduction lll_reduce(const QuadraticForm& f) {
  const std::size_t d = f.dim();
  Matrix U(d, Vector(d, Rational(0)));
  for (std::size_t i = 0; i < d; ++i) U[i][i] = 1;
  Matrix G = f.gram;
  if (d < 2) return Reduction{G, U};
  const Rational delta(99, 100);
  auto regram = [&] { G = multiply(multiply(U, f.gram), transpose(U)); };
  Matrix mu(d, Vector(d));
  Vector bs(d);
  auto gso = [&] {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        Rational s = G[i][j];
        for (std::size_t k = 0; k < j; ++k) s -= mu[j][k] * mu[i][k] * bs[k];
        mu[i][j] = s / bs[j];
      }
      Rational s = G[i][i];
      for (std::size_t k = 0; k < i; ++k) s -= mu[i][k] * mu[i][k] * bs[k];
      bs[i] = s;
    }
  };
  std::size_t k = 1;
  while (k < d) {
    for (std::size_t jj = k; jj-- > 0;) {
      gso();
      Integer q = round_of(mu[k][jj]);
      if (q == 0) continue;
      for (std::size_t c = 0; c < d; ++c) U[k][c] -= Rational(q) * U[jj][c];
      regram();
    }
    gso();
    if (bs[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * bs[k - 1]) {
      ++k;
    } else {
      std::swap(U[k], U[k - 1]);
      regram();
      k = std::max<std::size_t>(k - 1, 1);
    }
  }
  return Reduction{G, U};
}

/// Lagrange (Gauss) reduction of a binary form: |2 a12| <= a11 <= a22, a12 >= 0.
inline Reduction lagrange_reduce(const QuadraticForm& f) {
  if (f.dim() != 2) throw Error("lattice.dimension_mismatch", "Lagrange reduction needs d = 2");
  require_positive_definite(f);
  Matrix U{{1, 0}, {0, 1}};
  Matrix G = f.gram;
  auto regram = [&] { G = multiply(multiply(U, f.gram), transpose(U)); };
  while (true) {
    Integer q = round_of(G[0][1] / G[0][0]);
    if (q != 0) {
      for (int c = 0; c < 2; ++c) U[1][c] -= Rational(q) * U[0][c];
      regram();
    }
    if (G[1][1] < G[0][0]) {
      std::swap(U[0], U[1]);
      regram();
      continue;
    }
    break;
  }
  if (sgn(G[0][1]) < 0) {
    for (int c = 0; c < 2; ++c) U[1][c] = -U[1][c];
    regram();
  }
  return Reduction{G, U};
}

struct LatticeCell {
  std::vector<LatticeVector> vertices;  // sorted; the class representative has its least vertex at 0
  Vector center;                        // lattice coordinates
  Rational radius_squared;
  double radius_float = 0.0;
};

struct LatticeDelaunayPatch {
  std::vector<LatticeCell> cells;  // one per translation class
  std::vector<LatticeCell> star;   // every cell containing the origin
  Rational covering_radius_squared;
  double covering_radius_float = 0.0;
  std::string l_type_signature;
  std::uint64_t l_type_hash = 0;
  int box_radius = 0;  // enumeration box [-k, k]^d in reduced coordinates
};

namespace detail {

using SmallPoint = std::vector<long>;

inline Rational form_value(const Matrix& G, const Vector& x) { return QuadraticForm{G}.evaluate(x); }

inline Vector to_vector(const SmallPoint& p) {
  Vector v;
  for (long x : p) v.push_back(Rational(x));
  return v;
}

/// Circumcenter under the metric Gi / scale of the given lattice points, via
/// Cramer's rule on the integer system 2 (v_k - v_0) Gi c = Qi(v_k) - Qi(v_0).
inline Vector metric_circumcenter(const std::vector<std::vector<Integer>>& Gi, const std::vector<SmallPoint>& verts) {
  const std::size_t d = Gi.size();
  auto q = [&](const SmallPoint& v) {
    Integer s = 0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) s += Gi[i][j] * v[i] * v[j];
    return s;
  };
  std::vector<std::vector<Integer>> rows, diffs;
  std::vector<Integer> rhs;
  const Integer q0 = q(verts[0]);
  for (std::size_t k = 1; k < verts.size() && rows.size() < d; ++k) {
    std::vector<Integer> diff(d);
    for (std::size_t i = 0; i < d; ++i) diff[i] = verts[k][i] - verts[0][i];
    if (verts.size() > d + 1) {
      auto trial = diffs;
      trial.push_back(diff);
      if (integer_rank(trial) != static_cast<int>(trial.size())) continue;
    }
    diffs.push_back(diff);
    std::vector<Integer> row(d, Integer(0));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) row[j] += 2 * diff[i] * Gi[i][j];
    rows.push_back(std::move(row));
    rhs.push_back(q(verts[k]) - q0);
  }
  if (rows.size() != d) throw Error("lattice.internal", "degenerate Delaunay cell");
  Integer det = bareiss_determinant(rows);
  if (det == 0) throw Error("lattice.internal", "degenerate Delaunay cell");
  Vector c(d);
  for (std::size_t j = 0; j < d; ++j) {
    auto m = rows;
    for (std::size_t i = 0; i < d; ++i) m[i][j] = rhs[i];
    c[j] = Rational(bareiss_determinant(std::move(m)), det);
    c[j].canonicalize();
  }
  return c;
}

inline double form_value_double(const std::vector<std::vector<double>>& G, const std::vector<double>& x) {
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) s += x[i] * G[i][j] * x[j];
  return s;
}

inline std::vector<std::vector<double>> to_double_matrix(const Matrix& m) {
  std::vector<std::vector<double>> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (const auto& x : m[i]) out[i].push_back(to_double(x));
  return out;
}

/// Calls fn(x) for every integer x with Q(x - center) <= r2 (a superset is
/// visited; fn re-tests). Bounds come from the diagonal of G^{-1}.
template <class Fn>
void for_lattice_points_in_ellipsoid(const Matrix& G, const std::vector<double>& ginv_diag, const Vector& center,
                                     const Rational& r2, Fn&& fn) {
  const std::size_t d = G.size();
  std::vector<long> lo(d), hi(d);
  double rr = to_double(r2);
  for (std::size_t i = 0; i < d; ++i) {
    double s = std::sqrt(std::max(0.0, rr * ginv_diag[i])) * (1 + 1e-9) + 1e-9;
    double c = to_double(center[i]);
    lo[i] = static_cast<long>(std::floor(c - s));
    hi[i] = static_cast<long>(std::ceil(c + s));
  }
  SmallPoint x(lo);
  while (true) {
    fn(x);
    std::size_t i = 0;
    while (i < d && x[i] == hi[i]) x[i] = lo[i], ++i;
    if (i == d) break;
    ++x[i];
  }
}

/// True iff no lattice point lies strictly inside the cell's circumsphere and
/// every point on it is a vertex. Doubles only prune points far outside.
inline bool certify_empty(const Matrix& G, const std::vector<std::vector<double>>& Gd,
                          const std::vector<double>& ginv_diag, const std::vector<SmallPoint>& verts,
                          const Vector& center, const Rational& r2) {
  std::vector<double> cd;
  for (const auto& c : center) cd.push_back(to_double(c));
  const double rd = to_double(r2);
  bool ok = true;
  for_lattice_points_in_ellipsoid(G, ginv_diag, center, r2, [&](const SmallPoint& x) {
    if (!ok || std::binary_search(verts.begin(), verts.end(), x)) return;  // cospherical by construction
    std::vector<double> diff(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) diff[i] = static_cast<double>(x[i]) - cd[i];
    if (form_value_double(Gd, diff) > rd * (1 + 1e-6) + 1e-12) return;
    int cmp = sgn(form_value(G, sub(to_vector(x), center)) - r2);
    if (cmp <= 0) ok = false;
  });
  return ok;
}

struct ReducedStar {
  std::vector<std::vector<SmallPoint>> cells;
  std::vector<Vector> centers;
  std::vector<Rational> radii;
  int k = 0;
};

/// Delaunay cells at the origin of a reduced form, certified against the
/// whole lattice. The box grows until the star closes and every cell is empty.
inline ReducedStar delaunay_star(const Matrix& G) {
  const std::size_t d = G.size();
  Integer scale = common_denominator(G);
  std::vector<std::vector<Integer>> Gi(d, std::vector<Integer>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) Gi[i][j] = Rational(G[i][j] * Rational(scale)).get_num();
  auto inv = inverse(G);
  std::vector<double> ginv_diag;
  for (std::size_t i = 0; i < d; ++i) ginv_diag.push_back(to_double((*inv)[i][i]));
  const auto Gd = to_double_matrix(G);

  for (int k = 1; k <= 8; ++k) {
    std::vector<SmallPoint> box;
    SmallPoint x(d, -k);
    while (true) {
      box.push_back(x);
      std::size_t i = 0;
      while (i < d && x[i] == k) x[i] = -k, ++i;
      if (i == d) break;
      ++x[i];
    }
    int anchor = -1;
    std::vector<std::vector<Integer>> lifted;
    lifted.reserve(box.size());
    for (std::size_t p = 0; p < box.size(); ++p) {
      std::vector<Integer> row;
      Integer q = 0;
      bool zero = true;
      for (std::size_t i = 0; i < d; ++i) {
        row.push_back(Integer(box[p][i]));
        zero &= box[p][i] == 0;
        for (std::size_t j = 0; j < d; ++j) q += Gi[i][j] * box[p][i] * box[p][j];
      }
      row.push_back(q);
      lifted.push_back(std::move(row));
      if (zero) anchor = static_cast<int>(p);
    }
    auto lower = hull::lower_hull_facets_integer(lifted, anchor);
    if (!lower.boundary_ridges.empty()) continue;

    ReducedStar star;
    star.k = k;
    bool certified = true;
    Rational volume = 0;
    for (const auto& f : lower.facets) {
      if (!std::binary_search(f.begin(), f.end(), anchor)) continue;
      std::vector<SmallPoint> verts;
      std::vector<Vector> vv;
      for (int i : f) verts.push_back(box[i]);
      std::sort(verts.begin(), verts.end());
      for (const auto& v : verts) vv.push_back(to_vector(v));
      Vector c = metric_circumcenter(Gi, verts);
      Rational r2 = form_value(G, sub(vv[0], c));
      if (!certify_empty(G, Gd, ginv_diag, verts, c, r2)) {
        certified = false;
        break;
      }
      volume += hull::polytope_volume(vv) / Rational(static_cast<long>(verts.size()));
      star.cells.push_back(std::move(verts));
      star.centers.push_back(std::move(c));
      star.radii.push_back(std::move(r2));
    }
    if (!certified) continue;
    if (volume != 1) throw Error("lattice.internal", "Delaunay classes do not fill a fundamental domain");
    return star;
  }
  throw Error("lattice.patch_failed", "Delaunay star did not stabilise within the enumeration limit");
}

inline LatticeVector to_original(const SmallPoint& y, const Matrix& U) {
  const std::size_t d = U.size();
  LatticeVector x(d, Integer(0));
  for (std::size_t i = 0; i < d; ++i) {
    if (y[i] == 0) continue;
    for (std::size_t j = 0; j < d; ++j) x[j] += Integer(y[i]) * U[i][j].get_num();
  }
  return x;
}

inline Vector to_original(const Vector& y, const Matrix& U) {
  const std::size_t d = U.size();
  Vector x(d, Rational(0));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) x[j] += y[i] * U[i][j];
  return x;
}

inline std::string vector_string(const LatticeVector& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].get_str();
  return s + ")";
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace detail

/// Delaunay tiling of the lattice: the star of the origin (certified empty
/// against the infinite lattice) and one cell per translation class, in the
/// coordinates of the given form.
inline LatticeDelaunayPatch lattice_delaunay(const QuadraticForm& form) {
  require_positive_definite(form);
  const std::size_t d = form.dim();
  auto red = lll_reduce(form);
  auto star = detail::delaunay_star(red.gram);

  LatticeDelaunayPatch patch;
  patch.box_radius = star.k;
  std::map<std::vector<LatticeVector>, LatticeCell> classes;
  for (std::size_t c = 0; c < star.cells.size(); ++c) {
    LatticeCell cell;
    for (const auto& y : star.cells[c]) cell.vertices.push_back(detail::to_original(y, red.U));
    std::sort(cell.vertices.begin(), cell.vertices.end());
    cell.center = detail::to_original(star.centers[c], red.U);
    cell.radius_squared = star.radii[c];
    cell.radius_float = std::sqrt(to_double(cell.radius_squared));
    if (cell.radius_squared > patch.covering_radius_squared) patch.covering_radius_squared = cell.radius_squared;

    LatticeCell rep = cell;
    const LatticeVector base = rep.vertices.front();
    for (auto& v : rep.vertices)
      for (std::size_t i = 0; i < d; ++i) v[i] -= base[i];
    for (std::size_t i = 0; i < d; ++i) rep.center[i] -= Rational(base[i]);
    classes.emplace(rep.vertices, rep);
    patch.star.push_back(std::move(cell));
  }
  std::sort(patch.star.begin(), patch.star.end(), [](const auto& a, const auto& b) { return a.vertices < b.vertices; });
  std::string sig = "d=" + std::to_string(d);
  for (auto& [key, cell] : classes) {
    sig += ";";
    for (const auto& v : key) sig += detail::vector_string(v);
    patch.cells.push_back(cell);
  }
  patch.l_type_signature = sig;
  patch.l_type_hash = detail::fnv1a(sig);
  patch.covering_radius_float = std::sqrt(to_double(patch.covering_radius_squared));
  return patch;
}

inline LatticeDelaunayPatch lattice_delaunay(const Lattice& l) { return lattice_delaunay(l.form); }

struct CoveringRadius {
  Rational radius_squared;
  double radius_float = 0.0;
};

/// Largest Delaunay circumradius.
inline CoveringRadius covering_radius(const QuadraticForm& form) {
  auto p = lattice_delaunay(form);
  return CoveringRadius{p.covering_radius_squared, p.covering_radius_float};
}

inline CoveringRadius covering_radius(const Lattice& l) { return covering_radius(l.form); }

/// Volume of the unit d-ball.
inline double unit_ball_volume(std::size_t d) {
  double h = static_cast<double>(d) / 2.0;
  return std::pow(std::numbers::pi, h) / std::tgamma(h + 1.0);
}

/// theta = V_d rho^d / sqrt(det A), from an exact squared covering radius.
inline double density_from_radius(const QuadraticForm& form, const Rational& radius_squared) {
  const double d = static_cast<double>(form.dim());
  return unit_ball_volume(form.dim()) * std::pow(to_double(radius_squared), d / 2.0) /
         std::sqrt(to_double(determinant(form.gram)));
}

inline double covering_density(const QuadraticForm& form) {
  return density_from_radius(form, covering_radius(form).radius_squared);
}

inline double covering_density(const Lattice& l) { return covering_density(l.form); }

/// Voronoi-relevant vectors: v is relevant iff +-v are the only shortest
/// vectors of the coset v + 2L. Every relevant v has Q(v) <= 4 rho^2.
inline std::vector<LatticeVector> relevant_vectors(const QuadraticForm& form) {
  require_positive_definite(form);
  const std::size_t d = form.dim();
  auto red = lll_reduce(form);
  auto star = detail::delaunay_star(red.gram);
  Rational mu2 = *std::max_element(star.radii.begin(), star.radii.end());
  Rational bound = 4 * mu2;
  auto inv = inverse(red.gram);
  std::vector<double> ginv_diag;
  for (std::size_t i = 0; i < d; ++i) ginv_diag.push_back(to_double((*inv)[i][i]));

  struct Best {
    Rational norm;
    std::vector<detail::SmallPoint> minimizers;
  };
  std::map<unsigned, Best> cosets;
  detail::for_lattice_points_in_ellipsoid(red.gram, ginv_diag, Vector(d, Rational(0)), bound,
                                          [&](const detail::SmallPoint& x) {
                                            unsigned parity = 0;
                                            for (std::size_t i = 0; i < d; ++i) parity |= (x[i] & 1 ? 1u : 0u) << i;
                                            if (parity == 0) return;
                                            Rational q = detail::form_value(red.gram, detail::to_vector(x));
                                            if (q > bound) return;
                                            auto it = cosets.find(parity);
                                            if (it == cosets.end() || q < it->second.norm) {
                                              cosets[parity] = Best{q, {x}};
                                            } else if (q == it->second.norm) {
                                              it->second.minimizers.push_back(x);
                                            }
                                          });
  std::vector<LatticeVector> out;
  for (const auto& [parity, best] : cosets)
    if (best.minimizers.size() == 2)
      for (const auto& x : best.minimizers) out.push_back(detail::to_original(x, red.U));
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<LatticeVector> relevant_vectors(const Lattice& l) { return relevant_vectors(l.form); }

/// Other endpoints of the Delaunay edges at the origin.
inline std::vector<LatticeVector> delaunay_edge_vectors(const QuadraticForm& form) {
  auto patch = lattice_delaunay(form);
  std::set<LatticeVector> out;
  const LatticeVector zero(form.dim(), Integer(0));
  for (const auto& cell : patch.star) {
    std::vector<Vector> pts;
    for (const auto& v : cell.vertices) {
      Vector p;
      for (const auto& x : v) p.push_back(Rational(x));
      pts.push_back(std::move(p));
    }
    for (const auto& e : hull::polytope_faces(pts, 1)) {
      if (cell.vertices[e[0]] == zero) out.insert(cell.vertices[e[1]]);
      if (cell.vertices[e[1]] == zero) out.insert(cell.vertices[e[0]]);
    }
  }
  return {out.begin(), out.end()};
}

struct VoronoiCell {
  std::vector<LatticeVector> relevant_vectors;  // one facet each
  std::vector<Vector> vertices;                 // lattice coordinates
  std::vector<std::vector<double>> euclidean_vertices;
  std::vector<hull::IndexList> facets;  // vertex indices per relevant vector
  std::size_t facet_count = 0;
  Rational coordinate_volume;  // 1 for every lattice
  double volume = 0.0;         // coordinate_volume * sqrt(det A)
};

/// Euclidean embedding: the basis when known, otherwise a Cholesky factor.
inline std::vector<std::vector<double>> embedding(const Lattice& l) {
  const std::size_t d = l.form.dim();
  if (!l.basis.empty()) return detail::to_double_matrix(l.basis);
  auto A = detail::to_double_matrix(l.form.gram);
  std::vector<std::vector<double>> L(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double s = A[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= L[i][k] * L[j][k];
      L[i][j] = i == j ? std::sqrt(s) : s / L[j][j];
    }
  return L;
}

/// Minkowski bound for lattices (h = 1): at most 2(2^d - 1) facets.
inline long minkowski_bound(std::size_t d) { return 2 * ((1L << d) - 1); }

/// Voronoi cell of the origin: its vertices are the circumcenters of the
/// Delaunay cells at the origin, its facets the bisectors of relevant vectors.
inline VoronoiCell voronoi_cell(const Lattice& lattice) {
  const auto& form = lattice.form;
  const std::size_t d = form.dim();
  auto patch = lattice_delaunay(form);
  VoronoiCell cell;
  cell.relevant_vectors = relevant_vectors(form);
  std::set<Vector> verts;
  for (const auto& c : patch.star) verts.insert(c.center);
  cell.vertices.assign(verts.begin(), verts.end());
  for (const auto& v : cell.relevant_vectors) {
    Vector vq;
    for (const auto& x : v) vq.push_back(Rational(x));
    Rational rhs = form.evaluate(vq);
    hull::IndexList facet;
    for (std::size_t i = 0; i < cell.vertices.size(); ++i) {
      Rational lhs = 0;
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) lhs += 2 * cell.vertices[i][a] * form.gram[a][b] * vq[b];
      if (lhs == rhs) facet.push_back(static_cast<int>(i));
    }
    cell.facets.push_back(std::move(facet));
  }
  cell.facet_count = cell.relevant_vectors.size();
  if (static_cast<long>(cell.facet_count) > minkowski_bound(d))
    throw Error("lattice.internal", "Voronoi cell exceeds the Minkowski facet bound");
  cell.coordinate_volume = hull::polytope_volume(cell.vertices);
  cell.volume = to_double(cell.coordinate_volume) * std::sqrt(to_double(determinant(form.gram)));
  auto E = embedding(lattice);
  for (const auto& v : cell.vertices) {
    std::vector<double> y(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) y[j] += to_double(v[i]) * E[i][j];
    cell.euclidean_vertices.push_back(std::move(y));
  }
  return cell;
}

inline VoronoiCell voronoi_cell(const QuadraticForm& form) { return voronoi_cell(Lattice{{}, form}); }

struct FacetBound {
  long bound = 0;
  bool satisfied = false;
};

/// f_{d-1} <= 2(2^d - 1) + (h - 1) 2^d; h = 1 is Minkowski's bound.
inline FacetBound facet_bound_check(long f_count, long d, long h) {
  if (d < 1) throw Error("bounds.bad_dimension", "d must be positive");
  if (h < 1) throw Error("bounds.bad_h", "h must be positive");
  if (d > 60) throw Error("bounds.bad_dimension", "d too large for a 64-bit bound");
  Integer p = Integer(1) << static_cast<mp_bitcnt_t>(d);
  Integer bound = 2 * (p - 1) + (h - 1) * p;
  if (!bound.fits_slong_p()) throw Error("bounds.overflow", "bound exceeds 64 bits");
  FacetBound out{bound.get_si(), false};
  out.satisfied = f_count <= out.bound;
  return out;
}

// ---------------------------------------------------------------------------
// Covering optimisation

struct OptimizerConfig {
  std::uint64_t seed = 20240611;
  double initial_step = 0.0625;
  double step_tolerance = 1e-8;
  double density_tolerance = 1e-10;
  long budget = 100000;
  int random_directions = 0;  // per poll; 0 means d(d+1)/2
};

struct TraceEntry {
  long evaluation = 0;
  std::string signature;
  std::uint64_t hash = 0;
  double density = 0.0;
};

struct OptimizerResult {
  QuadraticForm form;  // det normalised to 1 and quantised
  double density = 0.0;
  Rational radius_squared;
  std::string signature;
  std::vector<TraceEntry> trace;
  long evaluations = 0;
  bool converged = false;
  bool budget_exhausted = false;
};

namespace detail {

/// Scales a cone point to det 1 and snaps it to the 1e-12 grid.
inline std::optional<QuadraticForm> normalise_form(std::size_t d, const std::vector<double>& x) {
  Vector q;
  for (double v : x) {
    if (!std::isfinite(v)) return std::nullopt;
    q.push_back(quantize(v));
  }
  auto f = QuadraticForm::from_cone_point(d, q);
  if (!is_positive_definite(f)) return std::nullopt;
  double det = to_double(determinant(f.gram));
  double s = std::pow(det, -1.0 / static_cast<double>(d));
  Vector scaled;
  for (double v : x) scaled.push_back(quantize(v * s));
  f = QuadraticForm::from_cone_point(d, scaled);
  if (!is_positive_definite(f)) return std::nullopt;
  return f;
}

inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

using Simplex = std::vector<std::vector<double>>;

/// Simplices whose circumradii make up the objective near the current form:
/// each simplicial class, and every spanning (d+1)-subset of a larger class.
inline std::vector<Simplex> objective_pieces(const std::vector<LatticeCell>& classes, std::size_t d) {
  std::vector<Simplex> out;
  for (const auto& cell : classes) {
    const auto& v = cell.vertices;
    std::vector<int> pick;
    auto visit = [&](auto&& self, std::size_t start) -> void {
      if (pick.size() == d + 1) {
        std::vector<std::vector<Integer>> diffs;
        for (std::size_t k = 1; k <= d; ++k) {
          std::vector<Integer> row(d);
          for (std::size_t i = 0; i < d; ++i) row[i] = v[pick[k]][i] - v[pick[0]][i];
          diffs.push_back(std::move(row));
        }
        if (bareiss_determinant(std::move(diffs)) == 0) return;
        Simplex s;
        for (int k : pick) {
          std::vector<double> p;
          for (const auto& c : v[k]) p.push_back(c.get_d());
          s.push_back(std::move(p));
        }
        out.push_back(std::move(s));
        return;
      }
      for (std::size_t i = start; i < v.size(); ++i) {
        pick.push_back(static_cast<int>(i));
        self(self, i + 1);
        pick.pop_back();
      }
    };
    visit(visit, 0);
  }
  return out;
}

/// Solves a small dense system in doubles; nullopt when (nearly) singular.
inline std::optional<std::vector<double>> solve_double(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = a.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    if (std::abs(a[p][c]) < 1e-300) return std::nullopt;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
  return b;
}

/// Circumradius^2 / det^(1/d) of a simplex under the form with cone point x.
inline double piece_value(std::size_t d, const std::vector<double>& x, const Simplex& s) {
  std::vector<std::vector<double>> A(d, std::vector<double>(d));
  std::size_t k = 0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) A[i][j] = A[j][i] = x[k++];
  auto q = [&](const std::vector<double>& v) {
    double r = 0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) r += v[i] * A[i][j] * v[j];
    return r;
  };
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  for (std::size_t m = 1; m <= d; ++m) {
    std::vector<double> row(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) row[j] += 2 * (s[m][i] - s[0][i]) * A[i][j];
    rows.push_back(std::move(row));
    rhs.push_back(q(s[m]) - q(s[0]));
  }
  auto c = solve_double(rows, rhs);
  // det via elimination on a copy
  double det = 1;
  auto M = A;
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t p = col;
    for (std::size_t r = col + 1; r < d; ++r)
      if (std::abs(M[r][col]) > std::abs(M[p][col])) p = r;
    if (p != col) std::swap(M[p], M[col]), det = -det;
    det *= M[col][col];
    if (M[col][col] == 0) break;
    for (std::size_t r = col + 1; r < d; ++r) {
      double f = M[r][col] / M[col][col];
      for (std::size_t kk = col; kk < d; ++kk) M[r][kk] -= f * M[col][kk];
    }
  }
  if (!c || !(det > 0)) return std::numeric_limits<double>::infinity();
  std::vector<double> diff(d);
  for (std::size_t i = 0; i < d; ++i) diff[i] = s[0][i] - (*c)[i];
  return q(diff) / std::pow(det, 1.0 / static_cast<double>(d));
}

/// Minimum-norm point of the convex hull of the given vectors (exhaustive
/// over supporting subsets; callers keep the list short).
inline std::vector<double> min_norm_point(const std::vector<std::vector<double>>& g) {
  const std::size_t k = g.size(), n = g[0].size();
  std::vector<double> best;
  double best_norm = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < k; ++i)
      if (mask >> i & 1) idx.push_back(i);
    const std::size_t m = idx.size();
    // [G 1; 1^T 0] [w; lambda] = [0; 1]
    std::vector<std::vector<double>> a(m + 1, std::vector<double>(m + 1, 0.0));
    std::vector<double> b(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t t = 0; t < n; ++t) a[i][j] += g[idx[i]][t] * g[idx[j]][t];
      a[i][m] = a[m][i] = 1.0;
    }
    b[m] = 1.0;
    auto w = solve_double(a, b);
    if (!w) continue;
    bool feasible = true;
    for (std::size_t i = 0; i < m; ++i) feasible &= (*w)[i] >= -1e-12;
    if (!feasible) continue;
    std::vector<double> p(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t t = 0; t < n; ++t) p[t] += (*w)[i] * g[idx[i]][t];
    double nn = 0;
    for (double v : p) nn += v * v;
    if (nn < best_norm) best_norm = nn, best = p;
  }
  return best;
}

}  // namespace detail

/// Pattern search over the cone coordinates. Each poll tries +-step along
/// every coordinate and along fresh random unit directions, moves to the best
/// improvement and doubles the step, or halves it when nothing improves.
inline OptimizerResult optimize_covering(const QuadraticForm& start, const OptimizerConfig& cfg = {}) {
  require_positive_definite(start);
  const std::size_t d = start.dim();
  const std::size_t N = d * (d + 1) / 2;
  std::mt19937_64 rng(cfg.seed);

  struct Eval {
    QuadraticForm form;
    double density;
    Rational r2;
    std::string signature;
    std::uint64_t hash;
    std::vector<detail::Simplex> pieces;
  };
  OptimizerResult result;
  auto evaluate = [&](const std::vector<double>& x) -> std::optional<Eval> {
    ++result.evaluations;
    auto f = detail::normalise_form(d, x);
    if (!f) return std::nullopt;
    auto patch = lattice_delaunay(*f);
    double theta = density_from_radius(*f, patch.covering_radius_squared);
    return Eval{*f, theta, patch.covering_radius_squared, patch.l_type_signature, patch.l_type_hash,
                detail::objective_pieces(patch.cells, d)};
  };

  std::vector<double> x;
  for (const auto& v : start.cone_point()) x.push_back(to_double(v));
  auto current = evaluate(x);
  if (!current) throw Error("lattice.not_positive_definite", "start form is not positive definite after quantisation");
  for (std::size_t i = 0; i < N; ++i) x[i] = to_double(current->form.cone_point()[i]);
  result.trace.push_back(TraceEntry{result.evaluations, current->signature, current->hash, current->density});

  const int extra = cfg.random_directions > 0 ? cfg.random_directions : static_cast<int>(N);
  double step = cfg.initial_step;
  while (true) {
    if (step < cfg.step_tolerance) {
      result.converged = true;
      break;
    }
    if (result.evaluations >= cfg.budget) {
      result.budget_exhausted = true;
      break;
    }
    auto accept = [&](Eval e) {
      bool changed = e.signature != current->signature;
      current = std::move(e);
      for (std::size_t i = 0; i < N; ++i) x[i] = to_double(current->form.cone_point()[i]);
      if (changed)
        result.trace.push_back(TraceEntry{result.evaluations, current->signature, current->hash, current->density});
    };
    auto improves = [&](const std::optional<Eval>& e, const std::optional<Eval>& best) {
      return e && e->density < current->density - cfg.density_tolerance && (!best || e->density < best->density);
    };

    // Search: descend along the min-norm convex combination of the gradients
    // of the nearly active circumradius pieces (finite differences).
    {
      const auto& pieces = current->pieces;
      std::vector<double> phi;
      for (const auto& p : pieces) phi.push_back(detail::piece_value(d, x, p));
      std::vector<std::size_t> order(pieces.size());
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](auto a, auto b) { return phi[a] > phi[b]; });
      std::map<std::size_t, std::vector<double>> grads;
      auto gradient = [&](std::size_t i) -> const std::vector<double>& {
        auto it = grads.find(i);
        if (it != grads.end()) return it->second;
        std::vector<double> g(N);
        for (std::size_t j = 0; j < N; ++j) {
          const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
          auto xp = x, xm = x;
          xp[j] += h;
          xm[j] -= h;
          g[j] = (detail::piece_value(d, xp, pieces[i]) - detail::piece_value(d, xm, pieces[i])) / (2 * h);
        }
        return grads[i] = std::move(g);
      };
      std::optional<Eval> best;
      for (double tau : {1e-2, 1e-4, 1e-6, 0.0}) {
        std::vector<std::vector<double>> active;
        for (std::size_t r = 0; r < order.size() && active.size() < 8; ++r)
          if (phi[order[r]] >= phi[order[0]] * (1 - tau)) active.push_back(gradient(order[r]));
        if (active.empty() || result.evaluations >= cfg.budget) continue;
        auto w = detail::min_norm_point(active);
        double norm = 0;
        for (double v : w) norm += v * v;
        norm = std::sqrt(norm);
        if (w.empty() || !(norm > 1e-14)) continue;
        for (double len = step; len < 1.0 && result.evaluations < cfg.budget; len *= 2) {
          std::vector<double> y(N);
          for (std::size_t i = 0; i < N; ++i) y[i] = x[i] - len * w[i] / norm;
          auto e = evaluate(y);
          if (!improves(e, best)) break;
          best = std::move(e);
        }
      }
      if (best) {
        accept(std::move(*best));
        continue;
      }
    }

    // Poll: +-coordinate directions and fresh random unit directions.
    std::vector<std::vector<double>> dirs;
    for (std::size_t i = 0; i < N; ++i) {
      std::vector<double> e(N, 0.0);
      e[i] = 1.0;
      dirs.push_back(e);
      e[i] = -1.0;
      dirs.push_back(e);
    }
    for (int k = 0; k < extra; ++k) {
      std::vector<double> u(N);
      double n2 = 0;
      for (auto& c : u) {
        c = 2 * detail::uniform01(rng) - 1;
        n2 += c * c;
      }
      if (n2 == 0) continue;
      for (auto& c : u) c /= std::sqrt(n2);
      dirs.push_back(u);
      for (auto& c : u) c = -c;
      dirs.push_back(u);
    }
    std::optional<Eval> best;
    for (const auto& dir : dirs) {
      if (result.evaluations >= cfg.budget) break;
      std::vector<double> y(N);
      for (std::size_t i = 0; i < N; ++i) y[i] = x[i] + step * dir[i];
      auto e = evaluate(y);
      if (improves(e, best)) best = std::move(e);
    }
    if (best) {
      accept(std::move(*best));
      step = std::min(step * 2, 0.5);
    } else {
      step /= 2;
    }
  }
  result.form = current->form;
  result.density = current->density;
  result.radius_squared = current->r2;
  result.signature = current->signature;
  return result;
}

}  // namespace delone
