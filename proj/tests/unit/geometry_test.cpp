#include <gtest/gtest.h>

#include <random>
#include <set>

#include "../support/oracles.hpp"
#include "delone/geometry.hpp"
#include "delone/hull.hpp"

namespace delone {
namespace {

Point P(std::initializer_list<Rational> xs) { return Point(xs); }

TEST(Orientation, StandardSimplexSigns) {
  EXPECT_EQ(orientation({P({0, 0}), P({1, 0}), P({0, 1})}), 1);
  EXPECT_EQ(orientation({P({0, 0}), P({1, 1}), P({2, 2})}), 0);
  EXPECT_EQ(orientation({P({0, 0}), P({0, 1}), P({1, 0})}), -1);
}

TEST(Orientation, RejectsMixedDimensions) {
  EXPECT_THROW(orientation({P({0, 0}), P({1, 0, 0}), P({0, 1})}), Error);
  EXPECT_THROW(orientation({P({0, 0}), P({1, 0})}), Error);
}

TEST(InSphere, UnitSquareCorners) {
  std::vector<Point> tri{P({0, 0}), P({1, 0}), P({0, 1})};
  EXPECT_EQ(in_sphere(tri, P({1, 1})), 0);
  EXPECT_EQ(in_sphere(tri, P({Rational(1, 2), Rational(1, 2)})), 1);
  EXPECT_EQ(in_sphere(tri, P({2, 2})), -1);
}

TEST(InSphere, IndependentOfVertexOrder) {
  std::vector<Point> tri{P({0, 1}), P({1, 0}), P({0, 0})};
  EXPECT_EQ(in_sphere(tri, P({Rational(1, 2), Rational(1, 2)})), 1);
  std::vector<Point> tet{P({0, 0, 0}), P({0, 1, 0}), P({1, 0, 0}), P({0, 0, 1})};
  EXPECT_EQ(in_sphere(tet, P({Rational(1, 2), Rational(1, 2), Rational(1, 2)})), 1);
  EXPECT_EQ(in_sphere(tet, P({1, 1, 1})), 0);
  EXPECT_EQ(in_sphere(tet, P({2, 1, 1})), -1);
}

TEST(InSphere, DegenerateSimplexThrows) {
  EXPECT_THROW(in_sphere({P({0, 0}), P({1, 1}), P({2, 2})}, P({0, 1})), Error);
}

TEST(Circumsphere, Examples) {
  auto s = circumsphere({P({0, 0}), P({1, 0}), P({0, 1})});
  EXPECT_EQ(s.center, P({Rational(1, 2), Rational(1, 2)}));
  EXPECT_EQ(s.radius_squared, Rational(1, 2));

  auto t = circumsphere({P({0, 0, 0}), P({1, 0, 0}), P({0, 1, 0}), P({0, 0, 1})});
  EXPECT_EQ(t.center, P({Rational(1, 2), Rational(1, 2), Rational(1, 2)}));
  EXPECT_EQ(t.radius_squared, Rational(3, 4));

  // Bisector system 2x = 4, 2x + 2y = 2  ->  (1, 0), radius^2 1.
  auto u = circumsphere({P({0, 0}), P({2, 0}), P({1, 1})});
  EXPECT_EQ(u.center, P({1, 0}));
  EXPECT_EQ(u.radius_squared, Rational(1));
  EXPECT_NEAR(u.radius_float * u.radius_float, 1.0, 1e-12);
}

TEST(Circumsphere, CollinearInputThrows) {
  EXPECT_THROW(circumsphere({P({0, 0}), P({1, 1}), P({2, 2})}), Error);
  EXPECT_THROW(circumsphere({P({0, 0, 0}), P({1, 0, 0}), P({0, 1, 0}), P({1, 1, 0})}), Error);
}

TEST(Lift, AppendsSquaredNorm) {
  EXPECT_EQ(lift_to_paraboloid(P({0, 0})), P({0, 0, 0}));
  EXPECT_EQ(lift_to_paraboloid(P({1, 0})), P({1, 0, 1}));
  EXPECT_EQ(lift_to_paraboloid(P({1, 2})), P({1, 2, 5}));
}

std::vector<Point> lift_all(const std::vector<Point>& pts) {
  std::vector<Point> out;
  for (const auto& p : pts) out.push_back(lift_to_paraboloid(p));
  return out;
}

TEST(LowerHull, CocircularSquareIsOneCell) {
  auto cells = lower_hull_cells(lift_all({P({0, 0}), P({1, 0}), P({0, 1}), P({1, 1})}));
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_EQ(cells[0].vertex_indices, (std::vector<int>{0, 1, 2, 3}));
  EXPECT_LT(sgn(cells[0].normal.back()), 0);
}

TEST(LowerHull, SingleTriangle) {
  auto lifted = lift_all({P({0, 0}), P({1, 0}), P({0, 1})});
  auto cells = lower_hull_cells(lifted);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_EQ(cells[0].vertex_indices.size(), 3u);
  for (int v : cells[0].vertex_indices) EXPECT_EQ(dot(cells[0].normal, lifted[v]), cells[0].offset);
}

TEST(LowerHull, ErrorsOnTooFewOrDegenerate) {
  EXPECT_THROW(lower_hull_cells(lift_all({P({0, 0}), P({1, 0})})), Error);
  EXPECT_THROW(lower_hull_cells(lift_all({P({0, 0}), P({1, 1}), P({2, 2}), P({3, 3})})), Error);
}

TEST(LowerHull, MatchesEmptyCircleOracleOnRandomPoints) {
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 10; ++trial) {
    auto pts = testing::random_points(rng, 20, 2, trial % 2 == 0 ? 1000 : 4);
    auto expected = testing::brute_force_delaunay(pts);
    std::set<std::vector<int>> got;
    for (auto& c : lower_hull_cells(lift_all(pts))) got.insert(c.vertex_indices);
    EXPECT_EQ(got, expected) << "trial " << trial;
  }
}

TEST(LowerHull, MatchesOracleInThreeDimensions) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 4; ++trial) {
    auto pts = testing::random_points(rng, 12, 3, trial % 2 == 0 ? 500 : 2);
    auto expected = testing::brute_force_delaunay(pts);
    std::set<std::vector<int>> got;
    for (auto& c : lower_hull_cells(lift_all(pts))) got.insert(c.vertex_indices);
    EXPECT_EQ(got, expected) << "trial " << trial;
  }
}

TEST(LowerHull, FourDimensionalGridCell) {
  std::vector<Point> pts;
  for (int mask = 0; mask < 16; ++mask) pts.push_back(P({mask & 1, (mask >> 1) & 1, (mask >> 2) & 1, (mask >> 3) & 1}));
  auto cells = lower_hull_cells(lift_all(pts));
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_EQ(cells[0].vertex_indices.size(), 16u);
}

// Property: the lifted determinant agrees with the distance to the circumcenter.
TEST(Properties, InSphereAgreesWithCircumsphereDistance) {
  std::mt19937_64 rng(99);
  for (std::size_t d : {2u, 3u}) {
    for (int trial = 0; trial < 200; ++trial) {
      auto pts = testing::random_points(rng, d + 2, d, 6);
      std::vector<Point> simplex(pts.begin(), pts.begin() + static_cast<long>(d) + 1);
      if (orientation(simplex) == 0) continue;
      auto s = circumsphere(simplex);
      int expected = -sgn(distance2(pts.back(), s.center) - s.radius_squared);
      EXPECT_EQ(in_sphere(simplex, pts.back()), expected);
    }
  }
}

TEST(Properties, OrientationAntisymmetricUnderSwap) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    auto simplex = testing::random_points(rng, 4, 3, 9);
    auto swapped = simplex;
    std::swap(swapped[1], swapped[3]);
    EXPECT_EQ(orientation(simplex), -orientation(swapped));
  }
}

TEST(Properties, CellsPartitionHullVolume) {
  std::mt19937_64 rng(11);
  for (std::size_t d : {2u, 3u}) {
    for (int trial = 0; trial < 6; ++trial) {
      auto pts = testing::random_points(rng, 14, d, trial % 2 ? 3 : 100);
      Rational total = 0;
      for (auto& c : lower_hull_cells(lift_all(pts))) {
        std::vector<Point> verts;
        for (int v : c.vertex_indices) verts.push_back(pts[v]);
        total += hull::polytope_volume(verts);
      }
      EXPECT_EQ(total, hull::polytope_volume(pts));
    }
  }
}

TEST(Properties, CellVerticesAreExactlyTheCosphericalPoints) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 8; ++trial) {
    auto pts = testing::random_points(rng, 16, 2, 3);
    for (auto& c : lower_hull_cells(lift_all(pts))) {
      auto s = circumsphere_of(pts, c.vertex_indices);
      std::vector<int> on;
      for (int i = 0; i < static_cast<int>(pts.size()); ++i)
        if (distance2(pts[i], s.center) == s.radius_squared) on.push_back(i);
      EXPECT_EQ(on, c.vertex_indices);
    }
  }
}

TEST(Hull, FacesOfCube) {
  std::vector<Point> cube;
  for (int mask = 0; mask < 8; ++mask) cube.push_back(P({mask & 1, (mask >> 1) & 1, (mask >> 2) & 1}));
  EXPECT_EQ(hull::convex_hull_facets(cube).size(), 6u);
  EXPECT_EQ(hull::polytope_faces(cube, 1).size(), 12u);
  EXPECT_EQ(hull::polytope_faces(cube, 0).size(), 8u);
  EXPECT_EQ(hull::triangulate(cube).size(), 6u);
  EXPECT_EQ(hull::polytope_volume(cube), Rational(1));
}

}  // namespace
}  // namespace delone
