#pragma once

// Test-only reference computations. Nothing here calls into the hull engine.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "delone/geometry.hpp"
#include "delone/rational.hpp"

namespace delone::testing {

/// n distinct random points with coordinates k/den, k in [0, den].
inline std::vector<Point> random_points(std::mt19937_64& rng, std::size_t n, std::size_t d, long den) {
  std::uniform_int_distribution<long> coord(0, den);
  std::set<Point> unique;
  while (unique.size() < n) {
    Point p(d);
    for (auto& x : p) {
      x = Rational(coord(rng), den);
      x.canonicalize();
    }
    unique.insert(p);
  }
  std::vector<Point> pts(unique.begin(), unique.end());
  std::shuffle(pts.begin(), pts.end(), rng);
  return pts;
}

/// Every (d+1)-subset is tested for an empty circumsphere; each empty one
/// contributes the cell of all points on that sphere. O(n^(d+2)).
inline std::set<std::vector<int>> brute_force_delaunay(const std::vector<Point>& pts) {
  const std::size_t d = pts.at(0).size();
  const int n = static_cast<int>(pts.size());
  std::set<std::vector<int>> cells;
  std::vector<int> pick(d + 1);
  auto visit = [&](auto&& self, std::size_t depth, int start) -> void {
    if (depth == d + 1) {
      std::vector<Point> simplex;
      for (int i : pick) simplex.push_back(pts[i]);
      if (orientation(simplex) == 0) return;
      std::vector<int> on;
      for (int q = 0; q < n; ++q) {
        int s = in_sphere(simplex, pts[q]);
        if (s > 0) return;
        if (s == 0) on.push_back(q);
      }
      cells.insert(on);
      return;
    }
    for (int i = start; i < n; ++i) {
      pick[depth] = i;
      self(self, depth + 1, i + 1);
    }
  };
  visit(visit, 0, 0);
  return cells;
}

/// Relevant vectors by brute force: every vector of [-k, k]^d, grouped by
/// parity class; a class contributes its minimizers when there are exactly two.
/// Needs k large enough that each class minimum lies in the box.
inline std::set<std::vector<long>> brute_force_relevant(const Matrix& gram, long k) {
  const std::size_t d = gram.size();
  std::map<unsigned, std::pair<Rational, std::vector<std::vector<long>>>> best;
  std::vector<long> x(d, -k);
  while (true) {
    unsigned parity = 0;
    for (std::size_t i = 0; i < d; ++i) parity |= static_cast<unsigned>(x[i] & 1) << i;
    if (parity != 0) {
      Rational q = 0;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) q += gram[i][j] * x[i] * x[j];
      auto it = best.find(parity);
      if (it == best.end() || q < it->second.first) {
        best[parity] = {q, {x}};
      } else if (q == it->second.first) {
        it->second.second.push_back(x);
      }
    }
    std::size_t i = 0;
    while (i < d && x[i] == k) x[i] = -k, ++i;
    if (i == d) break;
    ++x[i];
  }
  std::set<std::vector<long>> out;
  for (auto& [parity, entry] : best)
    if (entry.second.size() == 2) out.insert(entry.second.begin(), entry.second.end());
  return out;
}

/// All (x, y) with |x|,|y| <= bound and q x^3 + y^3 = 1, by scanning x and taking the
/// integer cube root of 1 - q x^3.
inline std::set<std::pair<long, long>> brute_force_pell(long q, long bound) {
  std::set<std::pair<long, long>> out;
  for (long x = -bound; x <= bound; ++x) {
    __int128 rhs = 1 - static_cast<__int128>(q) * x * x * x;
    long y = std::lround(std::cbrt(static_cast<long double>(rhs)));
    for (long t = y - 1; t <= y + 1; ++t)
      if (std::labs(t) <= bound && static_cast<__int128>(t) * t * t == rhs) out.insert({x, t});
  }
  return out;
}

/// Full double loop over |x|,|y| <= bound for x^3 + a x^2 y + b x y^2 + c y^3 = 1.
inline std::set<std::pair<long, long>> brute_force_thue(long a, long b, long c, long bound) {
  std::set<std::pair<long, long>> out;
  for (long x = -bound; x <= bound; ++x)
    for (long y = -bound; y <= bound; ++y)
      if (x * x * x + a * x * x * y + b * x * y * y + c * y * y * y == 1) out.insert({x, y});
  return out;
}

/// Units a + b r + c r^2 (r^3 = q) in (0,1) with every coefficient in [-box, box],
/// by a triple loop; the interval test is done in long double away from the ends.
inline std::vector<std::array<long, 3>> brute_force_units(long q, long box) {
  std::vector<std::array<long, 3>> out;
  const long double r = std::cbrt(static_cast<long double>(q));
  for (long a = -box; a <= box; ++a)
    for (long b = -box; b <= box; ++b)
      for (long c = -box; c <= box; ++c) {
        __int128 n = static_cast<__int128>(a) * a * a + static_cast<__int128>(q) * b * b * b +
                     static_cast<__int128>(q) * q * c * c * c - static_cast<__int128>(3) * q * a * b * c;
        if (n != 1 && n != -1) continue;
        long double v = a + b * r + c * r * r;
        if (v > 0 && v < 1) out.push_back({a, b, c});
      }
  return out;
}

}  // namespace delone::testing
