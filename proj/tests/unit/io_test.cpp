#include <gtest/gtest.h>

#include <random>
#include <set>

#include "../support/oracles.hpp"
#include "delone/io.hpp"

namespace delone {
namespace {

/// Decoding an emitted artifact and emitting it again gives the same bytes.
template <class T>
void expect_round_trip(const T& value) {
  Json first = value;
  T back = io::decode<T>(io::parse_json(first.dump()));
  Json second = back;
  EXPECT_EQ(first.dump(), second.dump());
}

std::string code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

TEST(Exact, StringsAndIntegers) {
  EXPECT_EQ(io::decode<Rational>(Json("3/2")), Rational(3, 2));
  EXPECT_EQ(io::decode<Rational>(Json("0.25")), Rational(1, 4));
  // leading zeros are decimal, never octal
  EXPECT_EQ(io::decode<Rational>(Json("0.051")), Rational(51, 1000));
  EXPECT_EQ(io::decode<Rational>(Json("010/07")), Rational(10, 7));
  EXPECT_EQ(io::decode<Integer>(Json("0010")), Integer(10));
  EXPECT_EQ(io::decode<Rational>(Json(-7)), Rational(-7));
  EXPECT_EQ(Json(Rational(-5, 3)).get<std::string>(), "-5/3");
  Integer big("123456789012345678901234567890");
  EXPECT_EQ(io::decode<Integer>(Json(big)), big);
  EXPECT_EQ(code_of([] { io::decode<Rational>(Json(0.5)); }), "io.inexact_number");
  EXPECT_EQ(code_of([] { io::decode<Integer>(Json("1/2")); }), "io.bad_integer");
  EXPECT_EQ(code_of([] { io::parse_json("[1,"); }), "io.malformed_json");
  EXPECT_EQ(code_of([] { io::load_json("/nonexistent/file.json"); }), "io.unreadable");
}

TEST(RoundTrip, TilingArtifacts) {
  std::mt19937_64 rng(51);
  auto pts = testing::random_points(rng, 15, 2, 7);
  auto t = build_l_tiling(pts);
  expect_round_trip(t);
  auto back = io::decode<LTiling>(io::parse_json(Json(t).dump()));
  EXPECT_EQ(back.points, t.points);
  ASSERT_EQ(back.cells.size(), t.cells.size());
  for (std::size_t i = 0; i < t.cells.size(); ++i) {
    EXPECT_EQ(back.cells[i].vertex_indices, t.cells[i].vertex_indices);
    EXPECT_EQ(back.cells[i].circumsphere.radius_squared, t.cells[i].circumsphere.radius_squared);
  }
  EXPECT_EQ(back.adjacency, t.adjacency);
  EXPECT_TRUE(verify_l_tiling(back).ok);

  // adjacency is rebuilt when omitted
  Json stripped = t;
  stripped.erase("adjacency");
  EXPECT_EQ(io::decode<LTiling>(stripped).adjacency, t.adjacency);

  PointSet grid;
  for (int x = 0; x <= 6; ++x)
    for (int y = 0; y <= 6; ++y) grid.push_back({x, y});
  grid.erase(grid.begin() + 24);
  expect_round_trip(validate_delone_set(grid, DeloneParams::make(Rational(1, 2), Rational(1, 2), {{0, 0}, {6, 6}})));

  LTiling broken = t;
  broken.cells.pop_back();
  expect_round_trip(verify_l_tiling(broken));
}

TEST(RoundTrip, LatticeArtifacts) {
  QuadraticForm bcc{{{3, -1, -1}, {-1, 3, -1}, {-1, -1, 3}}};
  expect_round_trip(lattice_delaunay(bcc));
  expect_round_trip(voronoi_cell(bcc));
  expect_round_trip(covering_radius(bcc));
  expect_round_trip(facet_bound_check(14, 3, 1));
  OptimizerConfig cfg;
  cfg.budget = 50;
  cfg.seed = 7;
  expect_round_trip(cfg);
  expect_round_trip(optimize_covering(QuadraticForm{{{1, 0}, {0, 1}}}, cfg));

  auto hex = Lattice::from_basis({{1, 0}, {Rational(1, 2), Rational(Integer("866025403784438647"), Integer("1000000000000000000"))}});
  expect_round_trip(hex);
  EXPECT_EQ(io::decode<Lattice>(Json(hex)).basis, hex.basis);
}

TEST(Lattice, InputShapes) {
  EXPECT_EQ(io::decode<Lattice>(io::parse_json(R"([[1,0],[0,1]])")).form.gram, (Matrix{{1, 0}, {0, 1}}));
  EXPECT_EQ(io::decode<Lattice>(io::parse_json(R"({"basis":[["1","0"],["1/2","1"]]})")).form.gram,
            (Matrix{{1, Rational(1, 2)}, {Rational(1, 2), Rational(5, 4)}}));
  EXPECT_EQ(code_of([] { io::decode<Lattice>(io::parse_json(R"({"basis":[[1,0],[0,1]],"gram":[[2,0],[0,1]]})")); }),
            "lattice.inconsistent");
  EXPECT_EQ(code_of([] { io::decode<Lattice>(io::parse_json(R"({"rows":[]})")); }), "io.bad_field");
}

TEST(RoundTrip, CubicArtifacts) {
  expect_round_trip(cubic::fundamental_unit(2, 100));
  expect_round_trip(cubic::solve_cubic_pell(7, 100));
  expect_round_trip(cubic::solve_thue({0, -1, 1}, 100));
  expect_round_trip(cubic::ThueEquation{1, 2, Integer("99999999999999999999")});
  EXPECT_EQ(code_of([] { io::decode<cubic::PureCubicInteger>(io::parse_json(R"({"q":8,"a":1,"b":0,"c":0})")); }),
            "cubic.perfect_cube");
}

TEST(Off, TilingSquareWithCenter) {
  auto t = build_l_tiling({{0, 0}, {1, 0}, {0, 1}, {1, 1}, {Rational(1, 2), Rational(1, 2)}});
  auto [verts, faces] = io::read_off(io::tiling_off(t));
  EXPECT_EQ(verts.size(), 5u);
  EXPECT_EQ(faces.size(), 4u);
  for (const auto& f : faces) EXPECT_EQ(f.size(), 3u);
}

TEST(Off, SquareIsOnePolygonInCyclicOrder) {
  auto t = build_l_tiling({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  auto [verts, faces] = io::read_off(io::tiling_off(t));
  ASSERT_EQ(faces.size(), 1u);
  ASSERT_EQ(faces[0].size(), 4u);
  // consecutive vertices differ in exactly one coordinate around a unit square
  for (std::size_t i = 0; i < 4; ++i) {
    auto a = verts[faces[0][i]], b = verts[faces[0][(i + 1) % 4]];
    EXPECT_DOUBLE_EQ(std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]), 1.0);
  }
}

TEST(Off, VoronoiPolyhedraSatisfyEuler) {
  for (const Matrix& g : {Matrix{{2, 1, 1}, {1, 2, 1}, {1, 1, 2}}, Matrix{{3, -1, -1}, {-1, 3, -1}, {-1, -1, 3}}}) {
    auto cell = voronoi_cell(QuadraticForm{g});
    auto [verts, faces] = io::read_off(io::voronoi_off(cell));
    std::set<std::pair<int, int>> edges;
    for (const auto& f : faces)
      for (std::size_t i = 0; i < f.size(); ++i) {
        int a = f[i], b = f[(i + 1) % f.size()];
        edges.insert({std::min(a, b), std::max(a, b)});
      }
    EXPECT_EQ(static_cast<long>(verts.size()) - static_cast<long>(edges.size()) + static_cast<long>(faces.size()), 2);
  }
}

TEST(Off, ThreeDimensionalTilingAndDimensionGuard) {
  PointSet cube;
  for (int x = 0; x <= 1; ++x)
    for (int y = 0; y <= 1; ++y)
      for (int z = 0; z <= 1; ++z) cube.push_back({x, y, z});
  auto [verts, faces] = io::read_off(io::tiling_off(build_l_tiling(cube)));
  EXPECT_EQ(verts.size(), 8u);
  EXPECT_EQ(faces.size(), 6u);
  EXPECT_EQ(code_of([] { io::voronoi_off(voronoi_cell(QuadraticForm{{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}})); }),
            "io.off_dimension");
  EXPECT_EQ(code_of([] { io::read_off("PLY\n"); }), "io.bad_off");
}

}  // namespace
}  // namespace delone
