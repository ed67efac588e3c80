#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "delone/error.hpp"
#include "delone/integer.hpp"

namespace delone {

using Rational = mpq_class;
using Integer = mpz_class;
using Vector = std::vector<Rational>;
using Matrix = std::vector<Vector>;

/// Parses "3/2", "-7", "0.25", "1.5e-3" exactly.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> Error {
    return Error("parse.bad_rational", "not an exact rational: '" + std::string(text) + "'");
  };
  std::string s;
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  }
  if (s.empty()) throw fail();

  auto is_int = [](std::string_view t) {
    std::size_t i = (!t.empty() && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
    if (i == t.size()) return false;
    return std::all_of(t.begin() + static_cast<long>(i), t.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  };
  auto to_mpz = [&](std::string t) {
    if (!t.empty() && t[0] == '+') t.erase(0, 1);
    return Integer(t, 10);
  };

  if (auto slash = s.find('/'); slash != std::string::npos) {
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!is_int(num) || !is_int(den)) throw fail();
    Integer d = to_mpz(den);
    if (d == 0) throw Error("parse.bad_rational", "zero denominator in '" + s + "'");
    Rational r(to_mpz(num), d);
    r.canonicalize();
    return r;
  }

  std::size_t pos = 0;
  bool negative = false;
  if (s[pos] == '-' || s[pos] == '+') negative = s[pos++] == '-';
  std::string mantissa;
  long frac_digits = 0;
  bool seen_point = false, seen_digit = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mantissa.push_back(c);
      seen_digit = true;
      if (seen_point) ++frac_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw fail();
  long exponent = 0;
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') throw fail();
    std::string exp_text = s.substr(pos + 1);
    if (!is_int(exp_text) || exp_text.size() > 6) throw fail();
    exponent = std::stol(exp_text);
  }
  Integer num(mantissa, 10);
  long shift = exponent - frac_digits;
  Integer pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
  Rational r = shift >= 0 ? Rational(num * pow10) : Rational(num, pow10);
  r.canonicalize();
  return negative ? Rational(-r) : r;
}

/// "p/q", or "p" when the denominator is 1.
inline std::string to_string(const Rational& r) { return r.get_str(); }

inline double to_double(const Rational& r) { return r.get_d(); }

/// Rational with denominator `denominator` nearest to x (round half away from zero).
inline Rational quantize(double x, long long denominator = 1000000000000LL) {
  long double scaled = std::round(static_cast<long double>(x) * static_cast<long double>(denominator));
  Rational r(Integer(std::to_string(static_cast<long long>(scaled))), Integer(std::to_string(denominator)));
  r.canonicalize();
  return r;
}

inline Integer floor_of(const Rational& r) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

inline Integer ceil_of(const Rational& r) {
  Integer q;
  mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

inline Integer round_of(const Rational& r) { return floor_of(r + Rational(1, 2)); }

// ---------------------------------------------------------------------------
// Vector helpers

inline Rational dot(const Vector& a, const Vector& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Vector sub(const Vector& a, const Vector& b) {
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vector add(const Vector& a, const Vector& b) {
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vector scale(const Vector& a, const Rational& s) {
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
  return r;
}

inline Rational norm2(const Vector& a) { return dot(a, a); }

inline Rational distance2(const Vector& a, const Vector& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    Rational t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

inline bool is_zero(const Vector& a) {
  return std::all_of(a.begin(), a.end(), [](const Rational& x) { return sgn(x) == 0; });
}

// ---------------------------------------------------------------------------
// Exact linear algebra over Q

/// Row-reduces in place to reduced echelon form; returns pivot columns.
inline std::vector<std::size_t> row_reduce(Matrix& m) {
  std::vector<std::size_t> pivots;
  if (m.empty()) return pivots;
  const std::size_t rows = m.size(), cols = m[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && sgn(m[p][c]) == 0) ++p;
    if (p == rows) continue;
    std::swap(m[r], m[p]);
    Rational inv = 1 / m[r][c];
    for (std::size_t j = c; j < cols; ++j) m[r][j] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || sgn(m[i][c]) == 0) continue;
      Rational f = m[i][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline int rank(Matrix m) { return static_cast<int>(row_reduce(m).size()); }

/// Unique solution of the square system a x = b, or nullopt when singular.
inline std::optional<Vector> solve(const Matrix& a, const Vector& b) {
  const std::size_t n = a.size();
  Matrix aug(n, Vector(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug[i][j] = a[i][j];
    aug[i][n] = b[i];
  }
  auto pivots = row_reduce(aug);
  if (pivots.size() != n || (n > 0 && pivots.back() != n - 1)) return std::nullopt;
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = aug[i][n];
  return x;
}

/// Basis of { x : m x = 0 } for an m with `cols` columns.
inline std::vector<Vector> nullspace(Matrix m, std::size_t cols) {
  std::vector<Vector> basis;
  if (m.empty()) {
    for (std::size_t j = 0; j < cols; ++j) {
      Vector e(cols, Rational(0));
      e[j] = 1;
      basis.push_back(e);
    }
    return basis;
  }
  auto pivots = row_reduce(m);
  std::vector<bool> is_pivot(cols, false);
  for (auto p : pivots) is_pivot[p] = true;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    Vector v(cols, Rational(0));
    v[free] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -m[i][free];
    basis.push_back(v);
  }
  return basis;
}

inline Rational determinant(Matrix m) {
  const std::size_t n = m.size();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && sgn(m[p][c]) == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(m[p], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t i = c + 1; i < n; ++i) {
      if (sgn(m[i][c]) == 0) continue;
      Rational f = m[i][c] / m[c][c];
      for (std::size_t j = c; j < n; ++j) m[i][j] -= f * m[c][j];
    }
  }
  return det;
}

/// Sign of det(m), computed fraction-free after clearing each row's denominators.
inline int determinant_sign(const Matrix& m) {
  std::vector<std::vector<Integer>> im(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    Integer l = 1;
    for (const auto& x : m[i]) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
    im[i].reserve(m[i].size());
    for (const auto& x : m[i]) im[i].push_back(x.get_num() * (l / x.get_den()));
  }
  return sign_of(bareiss_determinant(std::move(im)));
}

inline Matrix transpose(const Matrix& m) {
  if (m.empty()) return {};
  Matrix t(m[0].size(), Vector(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
  return t;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  Matrix c(n, Vector(m, Rational(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      if (sgn(a[i][l]) == 0) continue;
      for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][l] * b[l][j];
    }
  return c;
}

inline std::optional<Matrix> inverse(const Matrix& a) {
  const std::size_t n = a.size();
  Matrix aug(n, Vector(2 * n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug[i][j] = a[i][j];
    aug[i][n + i] = 1;
  }
  auto pivots = row_reduce(aug);
  if (pivots.size() < n || pivots[n - 1] != n - 1) return std::nullopt;
  Matrix inv(n, Vector(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv[i][j] = aug[i][n + j];
  return inv;
}

/// Common denominator of every entry in the list.
inline Integer common_denominator(const std::vector<Vector>& rows) {
  Integer l = 1;
  for (const auto& r : rows)
    for (const auto& x : r) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  return l;
}

}  // namespace delone
