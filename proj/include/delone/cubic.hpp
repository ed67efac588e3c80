#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "delone/error.hpp"
#include "delone/integer.hpp"
#include "delone/rational.hpp"

namespace delone::cubic {

/// a + b*rho + c*rho^2 with rho^3 = q.
struct PureCubicInteger {
  Integer q;
  Integer a, b, c;

  friend bool operator==(const PureCubicInteger&, const PureCubicInteger&) = default;
};

struct UnitCertificate {
  PureCubicInteger element;
  int norm = 1;
  double real_value = 0;
  bool is_binomial = false;
  long search_box = 0;
  /// Units in (0,1) seen during the search, and whether each is a power of `element`.
  std::size_t units_found = 0;
  bool powers_certified = false;
};

/// f(x,y) = x^3 + a x^2 y + b x y^2 + c y^3.
struct ThueEquation {
  Integer a, b, c;

  Integer evaluate(const Integer& x, const Integer& y) const {
    return x * x * x + a * x * x * y + b * x * y * y + c * y * y * y;
  }
};

enum class Method { unit_based, bounded_search };

inline const char* method_name(Method m) { return m == Method::unit_based ? "unit-based" : "bounded-search"; }

struct SolutionReport {
  std::vector<std::pair<Integer, Integer>> solutions;  // lexicographic
  long search_bound = 0;
  Method method = Method::bounded_search;
  bool cap_audit = true;  // at most 5 solutions
  std::optional<UnitCertificate> unit;
};

inline Integer integer_cube_root_floor(const Integer& n) {
  Integer r;
  mpz_root(r.get_mpz_t(), n.get_mpz_t(), 3);  // truncates toward zero
  if (n < 0 && r * r * r != n) r -= 1;
  return r;
}

inline bool is_perfect_cube(const Integer& n) {
  Integer r = integer_cube_root_floor(n);
  return r * r * r == n;
}

inline void require_radicand(const Integer& q) {
  if (q < 2) throw Error("cubic.bad_radicand", "radicand must be at least 2");
  if (is_perfect_cube(q)) throw Error("cubic.perfect_cube", "radicand " + q.get_str() + " is a perfect cube");
}

inline PureCubicInteger make_element(const Integer& q, const Integer& a, const Integer& b, const Integer& c) {
  require_radicand(q);
  return {q, a, b, c};
}

inline PureCubicInteger cubic_multiply(const PureCubicInteger& u, const PureCubicInteger& v) {
  if (u.q != v.q) throw Error("cubic.radicand_mismatch", "elements belong to different rings");
  const Integer& q = u.q;
  return {q, u.a * v.a + q * (u.b * v.c + u.c * v.b), u.a * v.b + u.b * v.a + q * u.c * v.c,
          u.a * v.c + u.c * v.a + u.b * v.b};
}

namespace detail {

template <class Int>
Int norm_form(const Int& q, const Int& a, const Int& b, const Int& c) {
  return a * a * a + q * b * b * b + q * q * c * c * c - Int(3) * q * a * b * c;
}

}  // namespace detail

inline Integer cubic_norm(const PureCubicInteger& u) { return detail::norm_form<Integer>(u.q, u.a, u.b, u.c); }

/// Inverse of a unit; the adjugate divided by the norm.
inline PureCubicInteger cubic_inverse(const PureCubicInteger& u) {
  Integer n = cubic_norm(u);
  if (n != 1 && n != -1) throw Error("cubic.not_unit", "element has norm " + n.get_str());
  const Integer& q = u.q;
  return {q, n * (u.a * u.a - q * u.b * u.c), n * (q * u.c * u.c - u.a * u.b), n * (u.b * u.b - u.a * u.c)};
}

/// Image under rho -> real cube root of q.
inline double real_value(const PureCubicInteger& u) {
  long double rho = std::cbrt(static_cast<long double>(u.q.get_d()));
  long double a = u.a.get_d(), b = u.b.get_d(), c = u.c.get_d();
  long double direct = a + b * rho + c * rho * rho;
  Integer n = cubic_norm(u);
  if (std::fabs(direct) >= 1 || n == 0) return static_cast<double>(direct);
  // small values cancel badly; divide the norm by the squared modulus of the complex embedding
  long double x = a - b * rho, y = a - c * rho * rho, z = b * rho - c * rho * rho;
  long double conj_sq = (x * x + y * y + z * z) / 2;
  return static_cast<double>(static_cast<long double>(n.get_d()) / conj_sq);
}

/// Exact sign of the real embedding: N(u) = u * |u'|^2.
inline int real_sign(const PureCubicInteger& u) { return sgn(cubic_norm(u)); }

/// Exact comparison of real embeddings.
inline int compare_real(const PureCubicInteger& u, const PureCubicInteger& v) {
  return real_sign({u.q, u.a - v.a, u.b - v.b, u.c - v.c});
}

namespace detail {

template <class Int>
std::vector<std::array<long, 3>> norm_one_candidates(const Integer& q, long box) {
  // units in (0,1) have norm +1 (the norm has the sign of the real value), and for fixed
  // (b,c) the value lies in (0,1) for at most one a, next to -(b rho + c rho^2)
  const long double rho = std::cbrt(static_cast<long double>(q.get_d()));
  const Int qi = from_mpz<Int>(q);
  std::vector<std::array<long, 3>> out;
  for (long b = -box; b <= box; ++b) {
    for (long c = -box; c <= box; ++c) {
      long base = static_cast<long>(std::floor(-(b * rho + c * rho * rho)));
      for (long a = std::max(base - 1, -box); a <= std::min(base + 2, box); ++a)
        if (norm_form<Int>(qi, Int(a), Int(b), Int(c)) == Int(1)) out.push_back({a, b, c});
    }
  }
  return out;
}

}  // namespace detail

/// Largest unit in (0,1) with coefficients inside [-search_box, search_box]^3.
inline UnitCertificate fundamental_unit(const Integer& q, long search_box) {
  require_radicand(q);
  if (search_box < 1) throw Error("cubic.bad_box", "search box must be at least 1");
  std::vector<std::array<long, 3>> candidates;
  try {
    candidates = detail::norm_one_candidates<CheckedInt128>(q, search_box);
  } catch (const IntegerOverflow&) {
    candidates = detail::norm_one_candidates<Integer>(q, search_box);
  }

  std::vector<PureCubicInteger> units;
  for (const auto& [a, b, c] : candidates) {
    PureCubicInteger u{q, a, b, c};
    if (real_sign(u) > 0 && real_sign({q, Integer(1) - u.a, -u.b, -u.c}) > 0) units.push_back(u);
  }
  if (units.empty())
    throw Error("cubic.no_unit_in_box", "no unit in (0,1) with coefficients within " + std::to_string(search_box) +
                                            " for q = " + q.get_str() + "; the box is too small");

  PureCubicInteger best = units.front();
  for (const auto& u : units)
    if (compare_real(u, best) > 0) best = u;

  bool all_powers = true;
  for (const auto& u : units) {
    PureCubicInteger p = best;
    while (compare_real(p, u) > 0) p = cubic_multiply(p, best);
    if (!(p == u)) all_powers = false;
  }

  UnitCertificate cert;
  cert.element = best;
  cert.norm = static_cast<int>(cubic_norm(best).get_si());
  cert.real_value = real_value(best);
  cert.is_binomial = best.c == 0;
  cert.search_box = search_box;
  cert.units_found = units.size();
  cert.powers_certified = all_powers;
  return cert;
}

namespace detail {

inline void finish(SolutionReport& r) {
  std::sort(r.solutions.begin(), r.solutions.end());
  r.solutions.erase(std::unique(r.solutions.begin(), r.solutions.end()), r.solutions.end());
  r.cap_audit = r.solutions.size() <= 5;
}

}  // namespace detail

/// q x^3 + y^3 = 1.
inline SolutionReport solve_cubic_pell(const Integer& q, long search_box) {
  UnitCertificate unit = fundamental_unit(q, search_box);
  SolutionReport r;
  r.method = Method::unit_based;
  r.search_bound = search_box;
  r.solutions.emplace_back(Integer(0), Integer(1));
  if (unit.is_binomial) r.solutions.emplace_back(unit.element.b, unit.element.a);
  for (const auto& [x, y] : r.solutions)
    if (q * x * x * x + y * y * y != 1) throw Error("cubic.internal", "unit does not solve the equation");
  r.unit = unit;
  detail::finish(r);
  return r;
}

inline Integer cubic_discriminant(const Integer& a, const Integer& b, const Integer& c) {
  return 18 * a * b * c - 4 * a * a * a * c + a * a * b * b - 4 * b * b * b - 27 * c * c;
}

inline Integer cubic_discriminant(const ThueEquation& eq) { return cubic_discriminant(eq.a, eq.b, eq.c); }

namespace detail {

template <class Int>
Int floor_div(const Int& n, long d) {
  Int qt = n / Int(d);
  if (sign_of(Int(n - qt * Int(d))) != 0 && (sign_of(n) < 0) != (d < 0)) qt = qt - Int(1);
  return qt;
}

inline mpz_class isqrt(const mpz_class& n) { return sqrt(n); }

inline CheckedInt128 isqrt(const CheckedInt128& n) {
  long double approx = std::sqrt(static_cast<long double>(n.value()));
  CheckedInt128 r = CheckedInt128::raw(static_cast<__int128>(approx));
  while (r > CheckedInt128(0) && r * r > n) r = r - CheckedInt128(1);
  while ((r + CheckedInt128(1)) * (r + CheckedInt128(1)) <= n) r = r + CheckedInt128(1);
  return r;
}

/// Integer roots of x^3 + A x^2 + B x + C inside [lo, hi], ascending.
template <class Int>
std::vector<Int> cubic_integer_roots(const Int& A, const Int& B, const Int& C, const Int& lo, const Int& hi) {
  auto p = [&](const Int& x) -> Int { return ((x + A) * x + B) * x + C; };
  std::vector<Int> roots;
  auto check = [&](const Int& x) {
    if (x >= lo && x <= hi && sign_of(p(x)) == 0) roots.push_back(x);
  };
  // p is monotone with direction `dir` on [l, h]
  auto search = [&](Int l, Int h, int dir) {
    l = std::max(l, lo);
    h = std::min(h, hi);
    if (l > h) return;
    if (sign_of(p(l)) * dir > 0 || sign_of(p(h)) * dir < 0) return;
    while (l < h) {
      Int mid = floor_div<Int>(Int(l + h), 2);
      if (sign_of(p(mid)) * dir >= 0)
        h = mid;
      else
        l = mid + Int(1);
    }
    check(l);
  };

  // p'(x) = 3x^2 + 2Ax + B vanishes at (-A +- sqrt(A^2 - 3B)) / 3
  Int disc = A * A - Int(3) * B;
  if (sign_of(disc) <= 0) {
    search(lo, hi, 1);
  } else {
    Int r = isqrt(disc);
    Int lo1 = floor_div<Int>(Int(Int(0) - A - r - Int(1)), 3);  // below the first critical point
    Int hi1 = floor_div<Int>(Int(Int(0) - A - r), 3) + Int(1);  // above it
    Int lo2 = floor_div<Int>(Int(Int(0) - A + r), 3);
    Int hi2 = floor_div<Int>(Int(Int(0) - A + r + Int(1)), 3) + Int(1);
    search(lo, lo1, 1);
    for (Int x = lo1 + Int(1); x < hi1; x = x + Int(1)) check(x);
    search(hi1, lo2, -1);
    for (Int x = std::max<Int>(lo2 + Int(1), hi1); x < hi2; x = x + Int(1)) check(x);
    search(hi2, hi, 1);
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

template <class Int>
std::vector<std::pair<Integer, Integer>> thue_search(const ThueEquation& eq, long bound) {
  const Int a = from_mpz<Int>(eq.a), b = from_mpz<Int>(eq.b), c = from_mpz<Int>(eq.c);
  std::vector<std::pair<Integer, Integer>> out;
  for (long yl = -bound; yl <= bound; ++yl) {
    Int y(yl);
    for (const Int& x : cubic_integer_roots<Int>(Int(a * y), Int(b * y * y), Int(c * y * y * y - Int(1)), Int(-bound), Int(bound)))
      out.emplace_back(to_mpz(x), Integer(yl));
  }
  return out;
}

inline bool has_rational_root(const ThueEquation& eq) {
  // monic, so rational roots of f(x,1) are integers bounded by 1 + max |coefficient|
  Integer m = 1 + std::max<Integer>({abs(eq.a), abs(eq.b), abs(eq.c)});
  return !cubic_integer_roots<Integer>(eq.a, eq.b, eq.c, Integer(-m), m).empty();
}

}  // namespace detail

/// Whether f factors over the rationals.
inline bool is_reducible(const ThueEquation& eq) { return detail::has_rational_root(eq); }

/// f(x,y) = 1 over |x|,|y| <= search_bound. A pure form x^3 + c y^3 with c not a cube goes
/// through the unit pathway instead.
inline SolutionReport solve_thue(const ThueEquation& eq, long search_bound, long unit_box = 100) {
  if (search_bound < 1) throw Error("cubic.bad_bound", "search bound must be at least 1");
  Integer d = cubic_discriminant(eq);
  if (d >= 0) throw Error("cubic.nonnegative_discriminant", "discriminant " + d.get_str() + " is not negative");
  if (is_reducible(eq)) throw Error("cubic.reducible", "the form has a rational linear factor");

  SolutionReport r;
  r.search_bound = search_bound;
  if (eq.a == 0 && eq.b == 0) {
    // x^3 + c y^3 = 1 is q Y^3 + X^3 = 1 with q = |c|, X = x, Y = sign(c) y
    Integer q = abs(eq.c);
    try {
      SolutionReport pell = solve_cubic_pell(q, unit_box);
      for (const auto& [px, py] : pell.solutions) r.solutions.emplace_back(py, eq.c > 0 ? px : Integer(-px));
      r.method = Method::unit_based;
      r.unit = pell.unit;
      detail::finish(r);
      return r;
    } catch (const Error& e) {
      if (e.code() != "cubic.no_unit_in_box") throw;
    }
  }

  r.method = Method::bounded_search;
  try {
    r.solutions = detail::thue_search<CheckedInt128>(eq, search_bound);
  } catch (const IntegerOverflow&) {
    r.solutions = detail::thue_search<Integer>(eq, search_bound);
  }
  for (const auto& [x, y] : r.solutions)
    if (eq.evaluate(x, y) != 1) throw Error("cubic.internal", "search returned a non-solution");
  detail::finish(r);
  return r;
}

}  // namespace delone::cubic
