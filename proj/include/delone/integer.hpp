#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace delone {

/// Thrown by CheckedInt128 when a result leaves the representable range.
/// Callers catch it and redo the computation with mpz_class.
struct IntegerOverflow : std::overflow_error {
  IntegerOverflow() : std::overflow_error("128-bit integer overflow") {}
};

/// 128-bit integer whose arithmetic throws IntegerOverflow instead of wrapping.
class CheckedInt128 {
 public:
  constexpr CheckedInt128() = default;
  constexpr CheckedInt128(long long v) : v_(v) {}  // NOLINT(implicit)

  static CheckedInt128 raw(__int128 v) {
    CheckedInt128 r;
    r.v_ = v;
    return r;
  }

  __int128 value() const { return v_; }

  friend CheckedInt128 operator+(CheckedInt128 a, CheckedInt128 b) {
    __int128 r;
    if (__builtin_add_overflow(a.v_, b.v_, &r)) throw IntegerOverflow();
    return raw(r);
  }
  friend CheckedInt128 operator-(CheckedInt128 a, CheckedInt128 b) {
    __int128 r;
    if (__builtin_sub_overflow(a.v_, b.v_, &r)) throw IntegerOverflow();
    return raw(r);
  }
  friend CheckedInt128 operator*(CheckedInt128 a, CheckedInt128 b) {
    __int128 r;
    if (__builtin_mul_overflow(a.v_, b.v_, &r)) throw IntegerOverflow();
    return raw(r);
  }
  // Exact division only (fraction-free elimination).
  friend CheckedInt128 operator/(CheckedInt128 a, CheckedInt128 b) {
    if (b.v_ == -1) return -a;
    return raw(a.v_ / b.v_);
  }
  CheckedInt128 operator-() const {
    if (v_ == std::numeric_limits<__int128>::min()) throw IntegerOverflow();
    return raw(-v_);
  }
  CheckedInt128& operator+=(CheckedInt128 o) { return *this = *this + o; }
  CheckedInt128& operator-=(CheckedInt128 o) { return *this = *this - o; }
  CheckedInt128& operator*=(CheckedInt128 o) { return *this = *this * o; }

  friend bool operator==(CheckedInt128 a, CheckedInt128 b) { return a.v_ == b.v_; }
  friend bool operator!=(CheckedInt128 a, CheckedInt128 b) { return a.v_ != b.v_; }
  friend bool operator<(CheckedInt128 a, CheckedInt128 b) { return a.v_ < b.v_; }
  friend bool operator>(CheckedInt128 a, CheckedInt128 b) { return a.v_ > b.v_; }
  friend bool operator<=(CheckedInt128 a, CheckedInt128 b) { return a.v_ <= b.v_; }
  friend bool operator>=(CheckedInt128 a, CheckedInt128 b) { return a.v_ >= b.v_; }

 private:
  __int128 v_ = 0;
};

inline int sign_of(const mpz_class& x) { return sgn(x); }
inline int sign_of(const mpq_class& x) { return sgn(x); }
inline int sign_of(CheckedInt128 x) { return x.value() > 0 ? 1 : (x.value() < 0 ? -1 : 0); }

inline mpz_class to_mpz(const mpz_class& x) { return x; }
inline mpz_class to_mpz(CheckedInt128 x) {
  __int128 v = x.value();
  bool neg = v < 0;
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  std::string digits;
  do {
    digits.insert(digits.begin(), static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  } while (u != 0);
  if (neg) digits.insert(digits.begin(), '-');
  return mpz_class(digits, 10);
}

template <class Int>
Int from_mpz(const mpz_class& x);

template <>
inline mpz_class from_mpz<mpz_class>(const mpz_class& x) {
  return x;
}

template <>
inline CheckedInt128 from_mpz<CheckedInt128>(const mpz_class& x) {
  if (!x.fits_slong_p()) throw IntegerOverflow();
  return CheckedInt128(static_cast<long long>(x.get_si()));
}

/// Determinant of a square integer matrix by Bareiss fraction-free elimination.
template <class Int>
Int bareiss_determinant(std::vector<std::vector<Int>> m) {
  const std::size_t n = m.size();
  if (n == 0) return Int(1);
  Int prev(1);
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (sign_of(m[k][k]) == 0) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && sign_of(m[swap_row][k]) == 0) ++swap_row;
      if (swap_row == n) return Int(0);
      std::swap(m[k], m[swap_row]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
      }
    }
    prev = m[k][k];
  }
  return sign > 0 ? m[n - 1][n - 1] : Int(0) - m[n - 1][n - 1];
}

/// Rank of an integer matrix (rows x cols) by fraction-free elimination.
template <class Int>
int integer_rank(std::vector<std::vector<Int>> m) {
  if (m.empty()) return 0;
  const std::size_t rows = m.size();
  const std::size_t cols = m[0].size();
  std::size_t rank = 0;
  Int prev(1);
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t pivot = rank;
    while (pivot < rows && sign_of(m[pivot][col]) == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[rank], m[pivot]);
    for (std::size_t i = rank + 1; i < rows; ++i) {
      for (std::size_t j = col + 1; j < cols; ++j) {
        m[i][j] = (m[i][j] * m[rank][col] - m[i][col] * m[rank][j]) / prev;
      }
      m[i][col] = Int(0);
    }
    prev = m[rank][col];
    ++rank;
  }
  return static_cast<int>(rank);
}

}  // namespace delone
