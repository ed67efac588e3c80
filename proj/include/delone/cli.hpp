#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "delone/cubic.hpp"
#include "delone/io.hpp"
#include "delone/lattice.hpp"
#include "delone/tiling.hpp"

namespace delone::cli {

/// Environment variable naming the directory for artifacts without an explicit path.
inline constexpr const char* kOutputDirEnv = "DELONE_OUTPUT_DIR";

struct Artifact {
  std::string text;
  std::string extension;  // "json" or "off"
};

namespace detail {

inline std::string render(const Json& j) { return j.dump(2) + "\n"; }

inline Rational exact(const std::string& flag, const std::string& text) {
  try {
    return parse_rational(text);
  } catch (const Error&) {
    throw Error("cli.bad_value", "--" + flag + ": not an exact number: " + text);
  }
}

inline Integer integer(const std::string& flag, const std::string& text) {
  Integer z;
  if (text.empty() || z.set_str(text, 10) != 0) throw Error("cli.bad_value", "--" + flag + ": not an integer: " + text);
  return z;
}

/// Point sets come as a bare array or as {"points": [...]}.
inline PointSet read_points(const std::string& source) {
  Json j = io::load_json(source);
  return io::decode<PointSet>(j.is_object() ? j.at("points") : j);
}

inline Box bounding_box(const PointSet& pts) {
  Box b{pts.at(0), pts.at(0)};
  for (const auto& p : pts)
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] < b.lo[i]) b.lo[i] = p[i];
      if (p[i] > b.hi[i]) b.hi[i] = p[i];
    }
  return b;
}

inline void require_format(const std::string& format, bool off_allowed) {
  if (format == "off" && !off_allowed) throw Error("cli.unsupported_format", "this command only writes JSON");
}

}  // namespace detail

/// Runs one command line (without the program name). Results go to `out` unless an
/// output path or the output-directory variable redirects them to a file; errors go to
/// `err` as JSON. Returns 0 on success, 1 on a domain error, 2 on a usage error.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Delone sets, lattice coverings and cubic equations", "delone"};
  app.require_subcommand(1, 1);
  app.set_help_flag("--help", "print help");  // -h is taken by the orbit count
  app.set_help_all_flag("--help-all");

  std::string input, output, format = "json";
  std::string point, r_text, R_text, R2_text, margin_text, window_text;
  std::string gram_text, basis_text, config_text;
  std::string q_text, a_text = "0", b_text = "0", c_text = "0";
  long bound = 1000, box = 100, d = 0, h = 1, dim = 0, budget = -1;
  std::optional<long> f_count;
  std::optional<std::uint64_t> seed;

  auto add_io = [&](CLI::App* sub, bool needs_input) {
    auto* opt = sub->add_option("--input,-i", input, "point set: file path or inline JSON");
    if (needs_input) opt->required();
    sub->add_option("--output,-o", output, "artifact path");
    sub->add_option("--format", format, "json or off")->check(CLI::IsMember({"json", "off"}));
  };
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--output,-o", output, "artifact path");
    sub->add_option("--format", format, "json or off")->check(CLI::IsMember({"json", "off"}));
  };
  auto add_lattice = [&](CLI::App* sub) {
    sub->add_option("--gram", gram_text, "Gram matrix as JSON");
    sub->add_option("--basis", basis_text, "basis rows as JSON");
    sub->add_option("--input,-i", input, "lattice JSON: {\"basis\": ...} and/or {\"gram\": ...}");
    add_output(sub);
  };

  std::function<Artifact()> action;

  auto* triangulate = app.add_subcommand("triangulate", "L-tiling of a finite point set");
  add_io(triangulate, true);
  triangulate->callback([&] {
    action = [&] {
      detail::require_format(format, true);
      auto t = build_l_tiling(detail::read_points(input));
      if (format == "off") return Artifact{io::tiling_off(t), "off"};
      return Artifact{detail::render(Json(t)), "json"};
    };
  });

  auto* grow = app.add_subcommand("grow", "grow an empty sphere from a seed point");
  add_io(grow, true);
  grow->add_option("--point", point, "seed point as JSON array")->required();
  grow->callback([&] {
    action = [&] {
      detail::require_format(format, true);
      auto pts = detail::read_points(input);
      auto cell = grow_empty_sphere(pts, io::decode<Point>(io::parse_json(point)));
      if (format == "off") return Artifact{io::cell_off(pts, cell), "off"};
      Json j = cell;
      j["points"] = delone::detail::gather(pts, cell.vertex_indices);
      return Artifact{detail::render(j), "json"};
    };
  });

  auto* validate = app.add_subcommand("validate-rset", "check the (r,R) conditions on a window");
  add_io(validate, true);
  validate->add_option("--r", r_text, "packing radius")->required();
  auto* R_opt = validate->add_option("--R", R_text, "covering radius");
  auto* R2_opt = validate->add_option("--R2", R2_text, "covering radius squared");
  R_opt->excludes(R2_opt);
  validate->add_option("--margin", margin_text, "window erosion");
  validate->add_option("--window", window_text, "[[lo...],[hi...]]; defaults to the bounding box");
  validate->callback([&] {
    action = [&] {
      detail::require_format(format, false);
      if (R_text.empty() && R2_text.empty()) throw Error("cli.missing_option", "one of --R or --R2 is required");
      auto pts = detail::read_points(input);
      Rational R2 = R2_text.empty() ? Rational(detail::exact("R", R_text) * detail::exact("R", R_text))
                                    : detail::exact("R2", R2_text);
      Box window = detail::bounding_box(pts);
      if (!window_text.empty()) {
        auto corners = io::decode<Matrix>(io::parse_json(window_text));
        if (corners.size() != 2) throw Error("cli.bad_value", "--window needs two corners");
        window = Box{corners[0], corners[1]};
      }
      std::optional<Rational> margin;
      if (!margin_text.empty()) margin = detail::exact("margin", margin_text);
      auto params = DeloneParams::make(detail::exact("r", r_text), R2, window, margin);
      Json j = validate_delone_set(pts, params);
      j["margin"] = params.margin;
      return Artifact{detail::render(j), "json"};
    };
  });

  auto* lattice = app.add_subcommand("lattice", "lattice Delaunay, Voronoi and covering tools");
  lattice->require_subcommand(1, 1);
  auto read_lattice = [&]() -> Lattice {
    int given = !gram_text.empty() + !basis_text.empty() + !input.empty();
    if (given == 0) throw Error("cli.missing_option", "one of --gram, --basis or --input is required");
    if (!input.empty()) {
      if (given > 1) throw Error("cli.bad_value", "--input excludes --gram and --basis");
      return io::decode<Lattice>(io::load_json(input));
    }
    Json j = Json::object();
    if (!gram_text.empty()) j["gram"] = io::parse_json(gram_text);
    if (!basis_text.empty()) j["basis"] = io::parse_json(basis_text);
    return io::decode<Lattice>(j);
  };

  auto* l_delaunay = lattice->add_subcommand("delaunay", "Delaunay classes of a lattice");
  add_lattice(l_delaunay);
  l_delaunay->callback([&] {
    action = [&] {
      detail::require_format(format, false);
      return Artifact{detail::render(Json(lattice_delaunay(read_lattice()))), "json"};
    };
  });

  auto* l_voronoi = lattice->add_subcommand("voronoi", "Voronoi cell of a lattice");
  add_lattice(l_voronoi);
  l_voronoi->callback([&] {
    action = [&] {
      detail::require_format(format, true);
      auto lat = read_lattice();
      auto cell = voronoi_cell(lat);
      if (format == "off") return Artifact{io::voronoi_off(cell), "off"};
      Json j = cell;
      j["minkowski_bound"] = minkowski_bound(lat.form.dim());
      return Artifact{detail::render(j), "json"};
    };
  });

  auto* l_radius = lattice->add_subcommand("covering-radius", "covering radius of a lattice");
  add_lattice(l_radius);
  l_radius->callback([&] {
    action = [&] {
      detail::require_format(format, false);
      return Artifact{detail::render(Json(covering_radius(read_lattice()))), "json"};
    };
  });

  auto* l_density = lattice->add_subcommand("covering-density", "covering density of a lattice");
  add_lattice(l_density);
  l_density->callback([&] {
    action = [&] {
      detail::require_format(format, false);
      auto lat = read_lattice();
      auto cr = covering_radius(lat);
      Json j{{"radius_squared", cr.radius_squared},
             {"radius_float", cr.radius_float},
             {"determinant", determinant(lat.form.gram)},
             {"density_float", density_from_radius(lat.form, cr.radius_squared)}};
      return Artifact{detail::render(j), "json"};
    };
  });

  auto* l_opt = lattice->add_subcommand("optimize", "local covering-density descent");
  add_lattice(l_opt);
  l_opt->add_option("--dim", dim, "start from the identity form of this dimension");
  l_opt->add_option("--seed", seed, "random seed");
  l_opt->add_option("--budget", budget, "evaluation budget");
  l_opt->add_option("--config", config_text, "optimizer config: file path or inline JSON");
  l_opt->callback([&] {
    action = [&] {
      detail::require_format(format, false);
      QuadraticForm start;
      if (dim > 0) {
        if (!gram_text.empty() || !basis_text.empty() || !input.empty())
          throw Error("cli.bad_value", "--dim excludes a lattice argument");
        start.gram.assign(dim, Vector(dim, Rational(0)));
        for (long i = 0; i < dim; ++i) start.gram[i][i] = 1;
      } else {
        start = read_lattice().form;
      }
      OptimizerConfig cfg;
      if (!config_text.empty()) cfg = io::decode<OptimizerConfig>(io::load_json(config_text));
      if (seed) cfg.seed = *seed;
      if (budget >= 0) cfg.budget = budget;
      Json j = optimize_covering(start, cfg);
      j["config"] = cfg;
      return Artifact{detail::render(j), "json"};
    };
  });

  auto* bounds = app.add_subcommand("bounds", "facet-count bound for dimension d and h stabiliser orbits");
  add_output(bounds);
  bounds->add_option("--d", d, "dimension")->required();
  bounds->add_option("--h", h, "number of orbits; 1 for parallelohedra");
  bounds->add_option("--f", f_count, "facet count to test against the bound");
  bounds->callback([&] {
    action = [&] {
      detail::require_format(format, false);
      auto fb = facet_bound_check(f_count.value_or(0), d, h);
      Json j{{"d", d}, {"h", h}, {"bound", fb.bound}};
      if (f_count) {
        j["facets"] = *f_count;
        j["satisfied"] = fb.satisfied;
      }
      return Artifact{detail::render(j), "json"};
    };
  });

  auto* cubic_cmd = app.add_subcommand("cubic", "pure cubic units and cubic equations");
  cubic_cmd->require_subcommand(1, 1);
  auto add_equation = [&](CLI::App* sub) {
    sub->add_option("--a", a_text, "x^2 y coefficient");
    sub->add_option("--b", b_text, "x y^2 coefficient");
    sub->add_option("--c", c_text, "y^3 coefficient");
    sub->add_option("--input,-i", input, "equation JSON {\"a\",\"b\",\"c\"}");
    add_output(sub);
  };
  auto read_equation = [&]() {
    if (!input.empty()) return io::decode<cubic::ThueEquation>(io::load_json(input));
    return cubic::ThueEquation{detail::integer("a", a_text), detail::integer("b", b_text),
                               detail::integer("c", c_text)};
  };
  auto add_radicand = [&](CLI::App* sub) {
    sub->add_option("--q", q_text, "radicand");
    sub->add_option("--input,-i", input, "JSON {\"q\": ...}");
    sub->add_option("--box", box, "coefficient box for the unit search");
    add_output(sub);
  };
  auto read_q = [&]() -> Integer {
    if (!input.empty()) return io::decode<Integer>(io::load_json(input).at("q"));
    if (q_text.empty()) throw Error("cli.missing_option", "--q is required");
    return detail::integer("q", q_text);
  };

  auto* pell = cubic_cmd->add_subcommand("pell", "q x^3 + y^3 = 1");
  add_radicand(pell);
  pell->callback([&] {
    action = [&] {
      detail::require_format(format, false);
      Integer q = read_q();
      Json j = cubic::solve_cubic_pell(q, box);
      j["q"] = q;
      return Artifact{detail::render(j), "json"};
    };
  });

  auto* unit = cubic_cmd->add_subcommand("unit", "largest unit below 1 in a coefficient box");
  add_radicand(unit);
  unit->callback([&] {
    action = [&] {
      detail::require_format(format, false);
      return Artifact{detail::render(Json(cubic::fundamental_unit(read_q(), box))), "json"};
    };
  });

  auto* thue = cubic_cmd->add_subcommand("thue", "x^3 + a x^2 y + b x y^2 + c y^3 = 1");
  add_equation(thue);
  thue->add_option("--bound", bound, "search bound on |x| and |y|");
  thue->add_option("--box", box, "unit box for pure forms");
  thue->callback([&] {
    action = [&] {
      detail::require_format(format, false);
      auto eq = read_equation();
      Json j = cubic::solve_thue(eq, bound, box);
      j["equation"] = eq;
      j["discriminant"] = cubic::cubic_discriminant(eq);
      return Artifact{detail::render(j), "json"};
    };
  });

  auto* disc = cubic_cmd->add_subcommand("discriminant", "discriminant of x^3 + a x^2 y + b x y^2 + c y^3");
  add_equation(disc);
  disc->callback([&] {
    action = [&] {
      detail::require_format(format, false);
      auto eq = read_equation();
      Json j{{"equation", eq}, {"discriminant", cubic::cubic_discriminant(eq)}};
      return Artifact{detail::render(j), "json"};
    };
  });

  auto fail = [&](const std::string& code, const std::string& message, int status) {
    err << Json{{"error", {{"code", code}, {"message", message}}}}.dump() << "\n";
    return status;
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    return fail("cli.usage", e.what(), 2);
  }

  std::string command;
  for (const CLI::App* sub = &app; !sub->get_subcommands().empty();) {
    sub = sub->get_subcommands().front();
    command += (command.empty() ? "" : "-") + sub->get_name();
  }

  try {
    Artifact art = action();
    std::filesystem::path target;
    const char* dir = std::getenv(kOutputDirEnv);
    if (!output.empty()) {
      target = output;
      if (dir && *dir && target.is_relative()) target = std::filesystem::path(dir) / target;
    } else if (dir && *dir) {
      target = std::filesystem::path(dir) / (command + "." + art.extension);
    }
    if (target.empty()) {
      out << art.text;
    } else {
      if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
      std::ofstream file(target, std::ios::binary);
      if (!file || !(file << art.text)) throw Error("io.unwritable", "cannot write " + target.string());
      out << Json{{"written", target.string()}}.dump() << "\n";
    }
    return 0;
  } catch (const Error& e) {
    return fail(e.code(), e.what(), 1);
  } catch (const Json::exception& e) {
    return fail("io.bad_field", e.what(), 1);
  } catch (const std::filesystem::filesystem_error& e) {
    return fail("io.unwritable", e.what(), 1);
  }
}

}  // namespace delone::cli
