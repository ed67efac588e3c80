// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "../support/oracles.hpp"
#include "delone/cli.hpp"

using namespace delone;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

Rational Q(long n, long d = 1) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

Matrix identity(std::size_t d) {
  Matrix m(d, Vector(d, Rational(0)));
  for (std::size_t i = 0; i < d; ++i) m[i][i] = 1;
  return m;
}

const QuadraticForm kFcc{{{2, 1, 1}, {1, 2, 1}, {1, 1, 2}}};
const QuadraticForm kBcc{{{3, -1, -1}, {-1, 3, -1}, {-1, -1, 3}}};
const QuadraticForm kHexExact{{{1, Q(1, 2)}, {Q(1, 2), 1}}};

Lattice hexagonal_basis() {
  return Lattice::from_basis(
      {{1, 0}, {Q(1, 2), Rational(Integer("866025403784438647"), Integer("1000000000000000000"))}});
}

std::set<std::pair<long, long>> as_set(const cubic::SolutionReport& r) {
  std::set<std::pair<long, long>> out;
  for (const auto& [x, y] : r.solutions) out.insert({x.get_si(), y.get_si()});
  return out;
}

/// Lattice Delaunay cells of `f` are empty: no lattice point lies strictly inside.
/// The scan box is sized for reduced coordinates, so pass a reduced form.
bool lattice_cells_empty(const QuadraticForm& f) {
  const auto patch = lattice_delaunay(f);
  const long k = patch.box_radius + 1;
  const std::size_t d = f.dim();
  for (const auto& c : patch.cells) {
    Vector x(d);
    std::function<bool(std::size_t)> scan = [&](std::size_t i) -> bool {
      if (i == d) return f.evaluate(sub(x, c.center)) >= c.radius_squared;
      for (long t = -k; t <= k; ++t) {
        x[i] = t;
        if (!scan(i + 1)) return false;
      }
      return true;
    };
    if (!scan(0)) return false;
  }
  return true;
}

Outcome thue_showcase() {
  std::ostringstream out, err;
  int status = cli::run_cli({"cubic", "thue", "--a", "0", "--b", "-1", "--c", "1", "--bound", "1000"}, out, err);
  if (status != 0) return {false, "exit " + std::to_string(status) + ": " + err.str()};
  const Json report = Json::parse(out.str());
  std::set<std::pair<long, long>> got;
  for (const auto& pair : report.at("solutions"))
    got.insert({std::stol(pair[0].get<std::string>()), std::stol(pair[1].get<std::string>())});
  const std::set<std::pair<long, long>> want{{1, 1}, {1, 0}, {0, 1}, {-1, 1}, {4, -3}};
  return {got == want, std::to_string(got.size()) + " solutions"};
}

Outcome pell_unit_agreement() {
  std::vector<long> missing, mismatched;
  int checked = 0;
  for (long q = 2; q <= 50; ++q) {
    if (cubic::is_perfect_cube(q)) continue;
    ++checked;
    auto brute = testing::brute_force_pell(q, 1000);
    try {
      auto report = cubic::solve_cubic_pell(q, 100);
      auto unit = cubic::fundamental_unit(q, 100);
      if (as_set(report) != brute || (brute.size() > 1) != unit.is_binomial) mismatched.push_back(q);
    } catch (const Error& e) {
      if (e.code() != "cubic.no_unit_in_box") throw;
      missing.push_back(q);
    }
  }
  std::ostringstream detail;
  detail << checked << " radicands, " << mismatched.size() << " mismatches";
  if (!missing.empty()) {
    detail << "; no unit in box 100 for q =";
    for (long q : missing) detail << ' ' << q;
  }
  return {missing.empty() && mismatched.empty(), detail.str()};
}

Outcome delone_cap_audit() {
  int forms = 0, skipped = 0, violations = 0, most = 0;
  std::map<std::size_t, int> histogram;
  for (long a = -5; a <= 5; ++a)
    for (long b = -5; b <= 5; ++b)
      for (long c = -5; c <= 5; ++c) {
        cubic::SolutionReport r;
        try {
          r = cubic::solve_thue({a, b, c}, 1000);
        } catch (const Error& e) {
          if (e.code() != "cubic.reducible" && e.code() != "cubic.nonnegative_discriminant") throw;
          ++skipped;
          continue;
        }
        ++forms;
        ++histogram[r.solutions.size()];
        most = std::max(most, static_cast<int>(r.solutions.size()));
        for (const auto& [x, y] : r.solutions)
          if (cubic::ThueEquation{a, b, c}.evaluate(x, y) != 1) ++violations;
        if (r.solutions.size() > 5 || !r.cap_audit) ++violations;
      }
  std::ostringstream detail;
  detail << forms << " forms (" << skipped << " reducible or D >= 0 skipped), max " << most << " solutions, "
         << violations << " violations; counts";
  for (auto [n, k] : histogram) detail << ' ' << n << ':' << k;
  return {violations == 0 && forms > 0, detail.str()};
}

Outcome tiling_oracle() {
  std::mt19937_64 rng(4242);
  int mismatches = 0, cells = 0;
  auto run = [&](std::size_t d, int sets, long max_n, std::vector<long> dens) {
    std::uniform_int_distribution<long> count(static_cast<long>(d) + 2, max_n);
    for (int s = 0; s < sets; ++s) {
      long den = dens[static_cast<std::size_t>(s) % dens.size()];
      long n = count(rng);
      long room = 1;
      for (std::size_t i = 0; i < d; ++i) room *= den + 1;
      auto pts = testing::random_points(rng, static_cast<std::size_t>(std::min(n, room)), d, den);
      auto t = build_l_tiling(pts);
      std::set<IndexList> got;
      for (const auto& c : t.cells) got.insert(c.vertex_indices);
      cells += static_cast<int>(got.size());
      if (got != testing::brute_force_delaunay(t.points) || !verify_l_tiling(t).ok) ++mismatches;
    }
  };
  run(2, 200, 25, {3, 4, 5, 7, 1000});
  run(3, 50, 15, {2, 3, 1000});
  return {mismatches == 0, "250 sets, " + std::to_string(cells) + " cells, " + std::to_string(mismatches) + " mismatches"};
}

Outcome cocircular_square() {
  auto t = build_l_tiling({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  bool ok = t.cells.size() == 1 && t.cells[0].vertex_indices.size() == 4 && verify_l_tiling(t).ok;
  return {ok, std::to_string(t.cells.size()) + " cell(s)"};
}

Outcome lattice_constants() {
  std::ostringstream detail;
  bool ok = covering_radius(QuadraticForm{identity(2)}).radius_squared == Q(1, 2) &&
            covering_radius(QuadraticForm{identity(3)}).radius_squared == Q(3, 4);
  double hex_err = std::abs(to_double(covering_radius(hexagonal_basis()).radius_squared) - 1.0 / 3.0);
  ok = ok && hex_err <= 1e-10;
  detail << "hex mu^2 error " << hex_err << "; facets";
  struct Case {
    const char* name;
    QuadraticForm form;
    std::size_t facets;
    bool tight;
  };
  for (const auto& c : {Case{"Z2", QuadraticForm{identity(2)}, 4, false}, Case{"Z3", QuadraticForm{identity(3)}, 6, false},
                        Case{"hex", hexagonal_basis().form, 6, true}, Case{"FCC", kFcc, 12, false},
                        Case{"BCC", kBcc, 14, true}}) {
    auto n = voronoi_cell(c.form).facet_count;
    auto bound = facet_bound_check(static_cast<long>(n), static_cast<long>(c.form.dim()), 1);
    ok = ok && n == c.facets && bound.satisfied && (static_cast<long>(n) == bound.bound) == c.tight;
    detail << ' ' << c.name << '=' << n << '/' << bound.bound;
  }
  return {ok, detail.str()};
}

Outcome covering_optimization() {
  auto two = optimize_covering(QuadraticForm{identity(2)});
  const double hex = 2 * std::numbers::pi / std::sqrt(27.0);
  auto red = lagrange_reduce(two.form).gram;
  double ratio_err = std::max(std::abs(to_double(red[0][1] / red[0][0]) - 0.5), std::abs(to_double(red[1][1] / red[0][0]) - 1.0));
  bool equivalent = ratio_err <= 1e-4 && two.signature == lattice_delaunay(kHexExact).l_type_signature;
  OptimizerConfig cfg;
  cfg.budget = 100000;
  auto three = optimize_covering(QuadraticForm{identity(3)}, cfg);
  std::ostringstream detail;
  detail.precision(8);
  detail << "d=2 density " << two.density << " (hex " << hex << "), reduced-form error " << ratio_err << "; d=3 density "
         << three.density << " after " << three.evaluations << " evaluations";
  return {std::abs(two.density - hex) <= 1e-6 && equivalent && three.density <= 1.4636 && three.evaluations <= 100000,
          detail.str()};
}

Outcome bound_formulas() {
  long h1 = facet_bound_check(0, 3, 1).bound, h2 = facet_bound_check(0, 3, 2).bound;
  return {h1 == 14 && h1 == 2 * (8 - 1) && h2 == 22, "d=3: h=1 -> " + std::to_string(h1) + ", h=2 -> " + std::to_string(h2)};
}

Matrix random_unimodular(std::mt19937_64& rng, std::size_t d) {
  Matrix u = identity(d);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(d) - 1), coin(0, 1);
  for (int step = 0; step < 8; ++step) {
    int i = pick(rng), j = pick(rng);
    if (i == j) continue;
    Rational s = coin(rng) ? 1 : -1;
    for (std::size_t c = 0; c < d; ++c) u[i][c] += s * u[j][c];
  }
  return u;
}

QuadraticForm random_form(std::mt19937_64& rng, std::size_t d) {
  std::uniform_int_distribution<long> entry(-3, 3);
  while (true) {
    Matrix b(d, Vector(d));
    for (auto& row : b)
      for (auto& x : row) x = entry(rng);
    if (sgn(determinant(b)) != 0) return gram_from_basis(b);
  }
}

Outcome invariant_suites() {
  std::mt19937_64 rng(909);
  std::ostringstream detail;
  bool ok = true;

  // exact norm multiplicativity
  int norm_failures = 0;
  std::uniform_int_distribution<long> radicand(2, 60), coef(-1000000, 1000000);
  for (int i = 0; i < 10000; ++i) {
    long q = radicand(rng);
    if (cubic::is_perfect_cube(q)) q += 1;
    auto u = cubic::make_element(q, coef(rng), coef(rng), coef(rng));
    auto v = cubic::make_element(q, coef(rng), coef(rng), coef(rng));
    if (cubic::cubic_norm(cubic::cubic_multiply(u, v)) != cubic::cubic_norm(u) * cubic::cubic_norm(v)) ++norm_failures;
  }
  ok = ok && norm_failures == 0;
  detail << "norm " << norm_failures << "/10000";

  // unimodular and scaling invariance
  int invariance_failures = 0;
  const Rational c2 = Q(9, 4);
  for (int i = 0; i < 100; ++i) {
    std::size_t d = 1 + static_cast<std::size_t>(i % 3);
    auto f = random_form(rng, d);
    auto u = random_unimodular(rng, d);
    QuadraticForm g{multiply(multiply(u, f.gram), transpose(u))};
    QuadraticForm s{f.gram};
    for (auto& row : s.gram)
      for (auto& x : row) x *= c2;
    auto mu = covering_radius(f).radius_squared;
    bool good = covering_radius(g).radius_squared == mu && covering_radius(s).radius_squared == c2 * mu &&
                std::abs(covering_density(f) - covering_density(g)) <= 1e-12 &&
                std::abs(covering_density(f) - covering_density(s)) <= 1e-12 &&
                voronoi_cell(f).facet_count == voronoi_cell(g).facet_count;
    if (!good) ++invariance_failures;
  }
  ok = ok && invariance_failures == 0;
  detail << "; unimodular/scaling " << invariance_failures << "/100";

  // empty spheres on constructed cells
  int nonempty = 0, cells = 0;
  for (int i = 0; i < 40; ++i) {
    std::size_t d = 2 + static_cast<std::size_t>(i % 2);
    auto t = build_l_tiling(testing::random_points(rng, d == 2 ? 25 : 15, d, i % 4 == 0 ? 5 : 100));
    for (const auto& c : t.cells) {
      ++cells;
      for (std::size_t p = 0; p < t.points.size(); ++p) {
        int s = sgn(distance2(t.points[p], c.circumsphere.center) - c.circumsphere.radius_squared);
        bool vertex = std::binary_search(c.vertex_indices.begin(), c.vertex_indices.end(), static_cast<int>(p));
        if (s < 0 || (s == 0) != vertex) ++nonempty;
      }
    }
  }
  std::vector<QuadraticForm> lattices{kFcc, kBcc, kHexExact, QuadraticForm{identity(2)}, QuadraticForm{identity(3)}};
  for (int i = 0; i < 10; ++i) lattices.push_back(random_form(rng, 2 + static_cast<std::size_t>(i % 2)));
  for (const auto& f : lattices) {
    cells += static_cast<int>(lattice_delaunay(f).cells.size());
    if (!lattice_cells_empty(QuadraticForm{lll_reduce(f).gram})) ++nonempty;
  }
  ok = ok && nonempty == 0;
  detail << "; empty-sphere breaches " << nonempty << " over " << cells << " cells";

  // (r, R) thresholds on a Z^2 patch
  PointSet grid;
  for (int x = 0; x <= 10; ++x)
    for (int y = 0; y <= 10; ++y) grid.push_back({x, y});
  Box window{{0, 0}, {10, 10}};
  auto at = validate_delone_set(grid, DeloneParams::make(Q(1, 2), Q(1, 2), window));
  auto wide_r = validate_delone_set(grid, DeloneParams::make(Q(51, 100), Q(1, 2), window));
  auto small_R = validate_delone_set(grid, DeloneParams::make(Q(1, 2), Q(49, 100), window));
  bool thresholds = at.packing_ok && at.covering_ok && !wide_r.packing_ok && !small_R.covering_ok;
  ok = ok && thresholds;
  detail << "; Z2 thresholds " << (thresholds ? "ok" : "wrong");
  return {ok, detail.str()};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "thue showcase", 5, thue_showcase},
      {2, "pell-unit agreement", 120, pell_unit_agreement},
      {3, "delone cap audit", 600, delone_cap_audit},
      {4, "l-tiling oracle equivalence", 300, tiling_oracle},
      {5, "cocircular faithfulness", 60, cocircular_square},
      {6, "lattice constants", 60, lattice_constants},
      {7, "covering optimization", 600, covering_optimization},
      {8, "bound formulas", 60, bound_formulas},
      {9, "invariant suites", 600, invariant_suites},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const Error& e) {
      o = {false, "error " + e.code() + ": " + e.what()};
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.limit_seconds) {
      o.pass = false;
      o.detail += "; over the " + std::to_string(static_cast<int>(c.limit_seconds)) + " s limit";
    }
    if (!o.pass) ++failed;
    std::printf("criterion %d: %s  %s (%.2f s) %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of 9 criteria passed\n", 9 - failed);
  return failed == 0 ? 0 : 1;
}
