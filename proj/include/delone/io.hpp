#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "delone/cubic.hpp"
#include "delone/error.hpp"
#include "delone/lattice.hpp"
#include "delone/rational.hpp"
#include "delone/tiling.hpp"
#include "json.hpp"

// Exact numbers travel as strings ("3/2"); readers also take JSON integers.
namespace nlohmann {

template <>
struct adl_serializer<mpq_class> {
  static void to_json(json& j, const mpq_class& r) { j = r.get_str(); }
  static void from_json(const json& j, mpq_class& r) {
    if (j.is_string()) {
      r = delone::parse_rational(j.get<std::string>());
    } else if (j.is_number_integer()) {
      r = mpq_class(j.dump());
    } else {
      throw delone::Error("io.inexact_number", "exact values must be strings or integers, got " + j.dump());
    }
  }
};

template <>
struct adl_serializer<mpz_class> {
  static void to_json(json& j, const mpz_class& z) { j = z.get_str(); }
  static void from_json(const json& j, mpz_class& z) {
    std::string text = j.is_string() ? j.get<std::string>() : (j.is_number_integer() ? j.dump() : "");
    if (text.empty() || z.set_str(text, 10) != 0)
      throw delone::Error("io.bad_integer", "expected an integer, got " + j.dump());
  }
};

}  // namespace nlohmann

namespace delone {

using Json = nlohmann::json;

namespace io {

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error("io.malformed_json", e.what());
  }
}

/// Inline JSON when the text starts with '[' or '{', otherwise a file path.
inline Json load_json(const std::string& source) {
  auto first = std::find_if_not(source.begin(), source.end(), [](unsigned char ch) { return std::isspace(ch); });
  if (first != source.end() && (*first == '[' || *first == '{')) return parse_json(source);
  std::ifstream in(source);
  if (!in) throw Error("io.unreadable", "cannot open " + source);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

/// Decodes with json errors turned into domain errors.
template <class T>
T decode(const Json& j) {
  try {
    return j.get<T>();
  } catch (const Json::exception& e) {
    throw Error("io.bad_field", e.what());
  }
}

inline std::string hash_string(std::uint64_t h) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::uint64_t parse_hash(const std::string& s) {
  if (s.size() != 18 || s.rfind("0x", 0) != 0) throw Error("io.bad_field", "bad hash " + s);
  return std::stoull(s.substr(2), nullptr, 16);
}

}  // namespace io

// ---------------------------------------------------------------------------
// geometry and tiling

inline void to_json(Json& j, const Sphere& s) {
  j = Json{{"center", s.center}, {"radius_squared", s.radius_squared}, {"radius_float", s.radius_float}};
}
inline void from_json(const Json& j, Sphere& s) {
  s = make_sphere(j.at("center").get<Point>(), j.at("radius_squared").get<Rational>());
}

inline void to_json(Json& j, const Box& b) { j = Json{{"lo", b.lo}, {"hi", b.hi}}; }
inline void from_json(const Json& j, Box& b) {
  b.lo = j.at("lo").get<Point>();
  b.hi = j.at("hi").get<Point>();
}

inline void to_json(Json& j, const LSolid& c) {
  j = Json{{"vertices", c.vertex_indices}, {"circumsphere", c.circumsphere}};
}
inline void from_json(const Json& j, LSolid& c) {
  c.vertex_indices = j.at("vertices").get<hull::IndexList>();
  c.circumsphere = j.at("circumsphere").get<Sphere>();
}

inline void to_json(Json& j, const LTiling& t) {
  Json adj = Json::array();
  for (const auto& [facet, cells] : t.adjacency) adj.push_back(Json{{"facet", facet}, {"cells", cells}});
  j = Json{{"points", t.points}, {"cells", t.cells}, {"adjacency", adj}};
}
inline void from_json(const Json& j, LTiling& t) {
  t.points = j.at("points").get<PointSet>();
  t.cells = j.at("cells").get<std::vector<LSolid>>();
  t.adjacency.clear();
  if (j.contains("adjacency")) {
    for (const auto& e : j.at("adjacency"))
      t.adjacency[e.at("facet").get<hull::IndexList>()] = e.at("cells").get<std::vector<int>>();
  } else {
    for (int c = 0; c < static_cast<int>(t.cells.size()); ++c)
      for (auto& f : detail::cell_facets(t.points, t.cells[c].vertex_indices)) t.adjacency[f].push_back(c);
  }
}

inline void to_json(Json& j, const CoverageWitness& w) {
  j = Json{{"center", w.center}, {"distance_squared", w.distance_squared}};
}
inline void from_json(const Json& j, CoverageWitness& w) {
  w.center = j.at("center").get<Point>();
  w.distance_squared = j.at("distance_squared").get<Rational>();
}

inline void to_json(Json& j, const ValidationReport& r) {
  Json pairs = Json::array();
  for (const auto& [a, b] : r.packing_violations) pairs.push_back({a, b});
  j = Json{{"packing_ok", r.packing_ok},
           {"packing_violations", pairs},
           {"covering_ok", r.covering_ok},
           {"covering_witnesses", r.covering_witnesses},
           {"checked_region", r.checked_region},
           {"deepest_hole", r.deepest_hole ? Json(*r.deepest_hole) : Json(nullptr)}};
}
inline void from_json(const Json& j, ValidationReport& r) {
  r.packing_ok = j.at("packing_ok").get<bool>();
  r.packing_violations.clear();
  for (const auto& p : j.at("packing_violations")) r.packing_violations.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
  r.covering_ok = j.at("covering_ok").get<bool>();
  r.covering_witnesses = j.at("covering_witnesses").get<std::vector<CoverageWitness>>();
  r.checked_region = j.at("checked_region").get<Box>();
  r.deepest_hole.reset();
  if (!j.at("deepest_hole").is_null()) r.deepest_hole = j.at("deepest_hole").get<CoverageWitness>();
}

inline void to_json(Json& j, const TilingViolation& v) {
  j = Json{{"kind", v.kind}, {"cell", v.cell}, {"detail", v.detail}};
}
inline void from_json(const Json& j, TilingViolation& v) {
  v.kind = j.at("kind").get<std::string>();
  v.cell = j.at("cell").get<int>();
  v.detail = j.at("detail").get<std::string>();
}

inline void to_json(Json& j, const TilingVerification& v) { j = Json{{"ok", v.ok}, {"violations", v.violations}}; }
inline void from_json(const Json& j, TilingVerification& v) {
  v.ok = j.at("ok").get<bool>();
  v.violations = j.at("violations").get<std::vector<TilingViolation>>();
}

// ---------------------------------------------------------------------------
// lattices

inline void to_json(Json& j, const QuadraticForm& f) { j = Json{{"gram", f.gram}}; }
inline void from_json(const Json& j, QuadraticForm& f) { f.gram = j.at("gram").get<Matrix>(); }

/// {"basis": rows} and/or {"gram": matrix}; a bare matrix is read as a Gram matrix.
inline void from_json(const Json& j, Lattice& l) {
  if (j.is_array()) {
    l = Lattice::from_gram(j.get<Matrix>());
  } else if (j.contains("basis") && j.contains("gram")) {
    l = Lattice::from_basis_and_gram(j.at("basis").get<Matrix>(), j.at("gram").get<Matrix>());
  } else if (j.contains("basis")) {
    l = Lattice::from_basis(j.at("basis").get<Matrix>());
  } else if (j.contains("gram")) {
    l = Lattice::from_gram(j.at("gram").get<Matrix>());
  } else {
    throw Error("io.bad_field", "lattice needs \"basis\" or \"gram\"");
  }
}
inline void to_json(Json& j, const Lattice& l) {
  j = Json{{"gram", l.form.gram}};
  if (!l.basis.empty()) j["basis"] = l.basis;
}

inline void to_json(Json& j, const LatticeCell& c) {
  j = Json{{"vertices", c.vertices},
           {"center", c.center},
           {"radius_squared", c.radius_squared},
           {"radius_float", c.radius_float}};
}
inline void from_json(const Json& j, LatticeCell& c) {
  c.vertices = j.at("vertices").get<std::vector<LatticeVector>>();
  c.center = j.at("center").get<Vector>();
  c.radius_squared = j.at("radius_squared").get<Rational>();
  c.radius_float = std::sqrt(to_double(c.radius_squared));
}

inline void to_json(Json& j, const LatticeDelaunayPatch& p) {
  j = Json{{"cells", p.cells},
           {"star", p.star},
           {"covering_radius_squared", p.covering_radius_squared},
           {"covering_radius_float", p.covering_radius_float},
           {"l_type_signature", p.l_type_signature},
           {"l_type_hash", io::hash_string(p.l_type_hash)},
           {"box_radius", p.box_radius}};
}
inline void from_json(const Json& j, LatticeDelaunayPatch& p) {
  p.cells = j.at("cells").get<std::vector<LatticeCell>>();
  p.star = j.at("star").get<std::vector<LatticeCell>>();
  p.covering_radius_squared = j.at("covering_radius_squared").get<Rational>();
  p.covering_radius_float = std::sqrt(to_double(p.covering_radius_squared));
  p.l_type_signature = j.at("l_type_signature").get<std::string>();
  p.l_type_hash = io::parse_hash(j.at("l_type_hash").get<std::string>());
  p.box_radius = j.at("box_radius").get<int>();
}

inline void to_json(Json& j, const VoronoiCell& v) {
  j = Json{{"relevant_vectors", v.relevant_vectors},
           {"vertices", v.vertices},
           {"vertices_float", v.euclidean_vertices},
           {"facets", v.facets},
           {"facet_count", v.facet_count},
           {"coordinate_volume", v.coordinate_volume},
           {"volume_float", v.volume}};
}
inline void from_json(const Json& j, VoronoiCell& v) {
  v.relevant_vectors = j.at("relevant_vectors").get<std::vector<LatticeVector>>();
  v.vertices = j.at("vertices").get<std::vector<Vector>>();
  v.euclidean_vertices = j.at("vertices_float").get<std::vector<std::vector<double>>>();
  v.facets = j.at("facets").get<std::vector<hull::IndexList>>();
  v.facet_count = j.at("facet_count").get<std::size_t>();
  v.coordinate_volume = j.at("coordinate_volume").get<Rational>();
  v.volume = j.at("volume_float").get<double>();
}

inline void to_json(Json& j, const CoveringRadius& c) {
  j = Json{{"radius_squared", c.radius_squared}, {"radius_float", c.radius_float}};
}
inline void from_json(const Json& j, CoveringRadius& c) {
  c.radius_squared = j.at("radius_squared").get<Rational>();
  c.radius_float = std::sqrt(to_double(c.radius_squared));
}

inline void to_json(Json& j, const FacetBound& b) { j = Json{{"bound", b.bound}, {"satisfied", b.satisfied}}; }
inline void from_json(const Json& j, FacetBound& b) {
  b.bound = j.at("bound").get<long>();
  b.satisfied = j.at("satisfied").get<bool>();
}

inline void to_json(Json& j, const OptimizerConfig& c) {
  j = Json{{"seed", c.seed},
           {"initial_step", c.initial_step},
           {"step_tolerance", c.step_tolerance},
           {"density_tolerance", c.density_tolerance},
           {"budget", c.budget},
           {"random_directions", c.random_directions}};
}
/// Missing keys keep their defaults.
inline void from_json(const Json& j, OptimizerConfig& c) {
  c = OptimizerConfig{};
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("initial_step")) c.initial_step = j.at("initial_step").get<double>();
  if (j.contains("step_tolerance")) c.step_tolerance = j.at("step_tolerance").get<double>();
  if (j.contains("density_tolerance")) c.density_tolerance = j.at("density_tolerance").get<double>();
  if (j.contains("budget")) c.budget = j.at("budget").get<long>();
  if (j.contains("random_directions")) c.random_directions = j.at("random_directions").get<int>();
}

inline void to_json(Json& j, const TraceEntry& t) {
  j = Json{{"evaluation", t.evaluation},
           {"signature", t.signature},
           {"hash", io::hash_string(t.hash)},
           {"density_float", t.density}};
}
inline void from_json(const Json& j, TraceEntry& t) {
  t.evaluation = j.at("evaluation").get<long>();
  t.signature = j.at("signature").get<std::string>();
  t.hash = io::parse_hash(j.at("hash").get<std::string>());
  t.density = j.at("density_float").get<double>();
}

inline void to_json(Json& j, const OptimizerResult& r) {
  j = Json{{"gram", r.form.gram},
           {"density_float", r.density},
           {"radius_squared", r.radius_squared},
           {"signature", r.signature},
           {"trace", r.trace},
           {"evaluations", r.evaluations},
           {"converged", r.converged},
           {"budget_exhausted", r.budget_exhausted}};
}
inline void from_json(const Json& j, OptimizerResult& r) {
  r.form.gram = j.at("gram").get<Matrix>();
  r.density = j.at("density_float").get<double>();
  r.radius_squared = j.at("radius_squared").get<Rational>();
  r.signature = j.at("signature").get<std::string>();
  r.trace = j.at("trace").get<std::vector<TraceEntry>>();
  r.evaluations = j.at("evaluations").get<long>();
  r.converged = j.at("converged").get<bool>();
  r.budget_exhausted = j.at("budget_exhausted").get<bool>();
}

// ---------------------------------------------------------------------------
// cubic

namespace cubic {

inline void to_json(Json& j, const PureCubicInteger& u) {
  j = Json{{"q", u.q}, {"a", u.a}, {"b", u.b}, {"c", u.c}};
}
inline void from_json(const Json& j, PureCubicInteger& u) {
  u = make_element(j.at("q").get<Integer>(), j.at("a").get<Integer>(), j.at("b").get<Integer>(),
                   j.at("c").get<Integer>());
}

inline void to_json(Json& j, const UnitCertificate& c) {
  j = Json{{"element", c.element},
           {"norm", c.norm},
           {"real_value_float", c.real_value},
           {"is_binomial", c.is_binomial},
           {"search_box", c.search_box},
           {"units_found", c.units_found},
           {"powers_certified", c.powers_certified}};
}
inline void from_json(const Json& j, UnitCertificate& c) {
  c.element = j.at("element").get<PureCubicInteger>();
  c.norm = j.at("norm").get<int>();
  c.real_value = j.at("real_value_float").get<double>();
  c.is_binomial = j.at("is_binomial").get<bool>();
  c.search_box = j.at("search_box").get<long>();
  c.units_found = j.at("units_found").get<std::size_t>();
  c.powers_certified = j.at("powers_certified").get<bool>();
}

inline void to_json(Json& j, const ThueEquation& e) { j = Json{{"a", e.a}, {"b", e.b}, {"c", e.c}}; }
inline void from_json(const Json& j, ThueEquation& e) {
  e.a = j.at("a").get<Integer>();
  e.b = j.at("b").get<Integer>();
  e.c = j.at("c").get<Integer>();
}

inline void to_json(Json& j, const SolutionReport& r) {
  Json sols = Json::array();
  for (const auto& [x, y] : r.solutions) sols.push_back({x, y});
  j = Json{{"solutions", sols},
           {"count", r.solutions.size()},
           {"search_bound", r.search_bound},
           {"method", method_name(r.method)},
           {"cap_audit", r.cap_audit},
           {"complete_beyond_bound", false},
           {"unit", r.unit ? Json(*r.unit) : Json(nullptr)}};
}
inline void from_json(const Json& j, SolutionReport& r) {
  r.solutions.clear();
  for (const auto& p : j.at("solutions")) r.solutions.emplace_back(p.at(0).get<Integer>(), p.at(1).get<Integer>());
  r.search_bound = j.at("search_bound").get<long>();
  std::string m = j.at("method").get<std::string>();
  if (m == "unit-based")
    r.method = Method::unit_based;
  else if (m == "bounded-search")
    r.method = Method::bounded_search;
  else
    throw Error("io.bad_field", "unknown method " + m);
  r.cap_audit = j.at("cap_audit").get<bool>();
  r.unit.reset();
  if (!j.at("unit").is_null()) r.unit = j.at("unit").get<UnitCertificate>();
}

}  // namespace cubic

// ---------------------------------------------------------------------------
// OFF export

namespace io {

using Coord3 = std::array<double, 3>;

namespace detail {

inline Coord3 lift3(const std::vector<double>& p) {
  Coord3 c{0, 0, 0};
  for (std::size_t i = 0; i < p.size() && i < 3; ++i) c[i] = p[i];
  return c;
}

/// Cyclic order of a convex planar polygon's vertices.
inline hull::IndexList order_polygon(const std::vector<Coord3>& v, hull::IndexList face) {
  if (face.size() <= 3) return face;
  Coord3 c{0, 0, 0};
  for (int i : face)
    for (int k = 0; k < 3; ++k) c[k] += v[i][k] / static_cast<double>(face.size());
  auto diff = [&](int i) { return Coord3{v[i][0] - c[0], v[i][1] - c[1], v[i][2] - c[2]}; };
  auto cross = [](const Coord3& a, const Coord3& b) {
    return Coord3{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
  };
  auto dotp = [](const Coord3& a, const Coord3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; };
  Coord3 u = diff(face[0]);
  Coord3 n{0, 0, 0};
  for (std::size_t i = 1; i < face.size(); ++i) {
    Coord3 t = cross(u, diff(face[i]));
    if (dotp(t, t) > dotp(n, n)) n = t;
  }
  Coord3 w = cross(n, u);
  std::vector<std::pair<double, int>> keyed;
  for (int i : face) {
    Coord3 d = diff(i);
    keyed.emplace_back(std::atan2(dotp(d, w), dotp(d, u)), i);
  }
  std::sort(keyed.begin(), keyed.end());
  hull::IndexList out;
  for (const auto& [angle, i] : keyed) out.push_back(i);
  return out;
}

inline std::string format_off(const std::vector<Coord3>& verts, const std::vector<hull::IndexList>& faces) {
  std::string s = "OFF\n" + std::to_string(verts.size()) + " " + std::to_string(faces.size()) + " 0\n";
  char buf[96];
  for (const auto& p : verts) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p[0], p[1], p[2]);
    s += buf;
  }
  for (const auto& f : faces) {
    s += std::to_string(f.size());
    for (int i : f) s += " " + std::to_string(i);
    s += "\n";
  }
  return s;
}

inline void require_off_dimension(std::size_t d) {
  if (d != 2 && d != 3) throw Error("io.off_dimension", "OFF export needs dimension 2 or 3, got " + std::to_string(d));
}

inline std::vector<Coord3> to_coords(const PointSet& pts) {
  std::vector<Coord3> out;
  for (const auto& p : pts) {
    std::vector<double> q;
    for (const auto& x : p) q.push_back(to_double(x));
    out.push_back(lift3(q));
  }
  return out;
}

/// 2D: one polygon per cell. 3D: every distinct cell facet once.
inline std::vector<hull::IndexList> cell_faces(const PointSet& pts, const std::vector<hull::IndexList>& cells) {
  const auto coords = to_coords(pts);
  std::vector<hull::IndexList> faces;
  if (pts.at(0).size() == 2) {
    for (const auto& c : cells) faces.push_back(order_polygon(coords, c));
    return faces;
  }
  std::set<hull::IndexList> seen;
  for (const auto& c : cells)
    for (const auto& f : delone::detail::cell_facets(pts, c))
      if (seen.insert(f).second) faces.push_back(order_polygon(coords, f));
  return faces;
}

}  // namespace detail

inline std::string tiling_off(const LTiling& t) {
  detail::require_off_dimension(delone::detail::point_dimension(t.points));
  std::vector<hull::IndexList> cells;
  for (const auto& c : t.cells) cells.push_back(c.vertex_indices);
  return detail::format_off(detail::to_coords(t.points), detail::cell_faces(t.points, cells));
}

/// A single L-solid with its own vertex numbering.
inline std::string cell_off(const PointSet& points, const LSolid& cell) {
  detail::require_off_dimension(delone::detail::point_dimension(points));
  PointSet own = delone::detail::gather(points, cell.vertex_indices);
  return detail::format_off(detail::to_coords(own), detail::cell_faces(own, {delone::detail::all_indices(own.size())}));
}

inline std::string voronoi_off(const VoronoiCell& v) {
  const std::size_t d = v.euclidean_vertices.empty() ? 0 : v.euclidean_vertices[0].size();
  detail::require_off_dimension(d);
  std::vector<Coord3> coords;
  for (const auto& p : v.euclidean_vertices) coords.push_back(detail::lift3(p));
  std::vector<hull::IndexList> faces;
  if (d == 2) {
    faces.push_back(detail::order_polygon(coords, delone::detail::all_indices(coords.size())));
  } else {
    for (const auto& f : v.facets) faces.push_back(detail::order_polygon(coords, f));
  }
  return detail::format_off(coords, faces);
}

/// Parses OFF text into vertex coordinates and faces.
inline std::pair<std::vector<Coord3>, std::vector<hull::IndexList>> read_off(const std::string& text) {
  std::istringstream in(text);
  std::string magic;
  std::size_t nv = 0, nf = 0, ne = 0;
  if (!(in >> magic >> nv >> nf >> ne) || magic != "OFF") throw Error("io.bad_off", "missing OFF header");
  std::vector<Coord3> verts(nv);
  for (auto& p : verts)
    if (!(in >> p[0] >> p[1] >> p[2])) throw Error("io.bad_off", "truncated vertex list");
  std::vector<hull::IndexList> faces(nf);
  for (auto& f : faces) {
    std::size_t k = 0;
    if (!(in >> k)) throw Error("io.bad_off", "truncated face list");
    f.resize(k);
    for (auto& i : f)
      if (!(in >> i) || i < 0 || static_cast<std::size_t>(i) >= nv) throw Error("io.bad_off", "bad face index");
  }
  return {verts, faces};
}

}  // namespace io
}  // namespace delone
