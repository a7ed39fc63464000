#include "cli.hpp"

#include "thermo/core.hpp"
#include "thermo/gksl.hpp"
#include "thermo/io.hpp"
#include "thermo/qubit.hpp"
#include "thermo/qutrit.hpp"
#include "thermo/svg.hpp"
#include "thermo/thermomaj.hpp"
#include "thermo/toy.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>

namespace thermo::cli {

namespace {

using io::Json;
using Point2 = Eigen::Vector2d;

struct Context {
  std::ostream& out;
  std::ostream& err;
};

// Raised for outcomes that are well-formed but negative (exit 1) after the
// report has been printed.
struct DomainExit {};

void emit(Context& ctx, const Json& j) { ctx.out << j.dump(2) << "\n"; }

void emit_text(Context& ctx, const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    ctx.out << text;
  else
    io::write_text_file(path, text);
}

toy::ToyGenerator make_toy(double a, const std::string& problem, int n) {
  if (!problem.empty()) {
    const io::ProblemFile pf = io::read_problem_file(problem);
    if (!pf.toy) throw InvalidInput(problem + ": missing 'toy' section");
    if (pf.toy->b) return toy::ToyGenerator(*pf.toy->b);
    return toy::toy_generator_ladder(*pf.toy->a, pf.toy->n);
  }
  if (!(a > 0)) throw InvalidInput("--a must be positive (or give --problem)");
  return toy::toy_generator_ladder(a, n);
}

RealVector named_point(const std::string& spec, const toy::ToyGenerator& g, const std::string& what) {
  if (spec == "d") return g.fixed_point().entries();
  if (spec == "uniform") return ProbVector::uniform(g.dim()).entries();
  RealVector x = io::parse_vector(spec, what);
  if (x.size() != g.dim()) throw InvalidInput(what + " has the wrong dimension");
  if (x.minCoeff() < -1e-9 || std::abs(x.sum() - 1) > 1e-6) throw InvalidInput(what + " is not a probability vector");
  return ProbVector(x / x.sum()).entries();
}

// --------------------------------------------------------------------------
// thermomaj commands

void cmd_curve(Context& ctx, const std::string& d_s, const std::string& y_s, int samples, const std::string& csv) {
  const RealVector d = io::parse_vector(d_s, "--d"), y = io::parse_vector(y_s, "--y");
  thermomaj::validate_triple(d, y);
  const thermomaj::ThermoCurve curve(d, y);
  std::vector<std::pair<double, double>> rows = curve.sample(samples);
  for (Eigen::Index k = 0; k < curve.abscissas().size(); ++k)
    rows.emplace_back(curve.abscissas()[k], curve.ordinates()[k]);
  std::stable_sort(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.first < b.first; });
  io::CsvTable t{{"c", "th"}, {}};
  for (const auto& [c, v] : rows) t.rows.push_back({c, v});
  emit_text(ctx, csv, io::write_csv(t));
}

void cmd_polytope(Context& ctx, const std::string& d_s, const std::string& y_s) {
  const RealVector d = io::parse_vector(d_s, "--d"), y = io::parse_vector(y_s, "--y");
  thermomaj::validate_triple(d, y);
  emit(ctx, io::polytope_json(d, y));
}

void cmd_extremes(Context& ctx, const std::string& d_s, const std::string& y_s) {
  const RealVector d = io::parse_vector(d_s, "--d"), y = io::parse_vector(y_s, "--y");
  thermomaj::validate_triple(d, y);
  if (d.size() > 8) throw InvalidInput("extreme point enumeration supports n <= 8");
  Json pts = Json::array();
  for (const auto& sigma : all_permutations(static_cast<int>(d.size())))
    pts.push_back(Json{{"sigma", sigma}, {"point", io::to_json(thermomaj::extreme_point(d, y, sigma))}});
  emit(ctx, Json{{"extremes", pts}, {"max_corner", io::to_json(thermomaj::max_corner(d, y))}});
}

void cmd_transition(Context& ctx, const std::string& d_s, const std::string& y_s, const std::string& x_s) {
  const RealVector d = io::parse_vector(d_s, "--d"), y = io::parse_vector(y_s, "--y"),
                   x = io::parse_vector(x_s, "--x");
  thermomaj::validate_triple(d, y, &x);
  const thermomaj::TransitionResult r = thermomaj::find_transition_matrix(d, y, x);
  Json j{{"feasible", r.feasible}};
  if (r.feasible) {
    j["matrix"] = io::to_json(r.matrix);
    j["residual"] = io::number(r.residual);
    if (r.conditioning_warning) j["conditioning_warning"] = true;
  } else if (r.violated) {
    j["violated"] = *r.violated;
  }
  emit(ctx, j);
  if (!r.feasible) throw DomainExit{};
}

// --------------------------------------------------------------------------
// gksl

void cmd_generator_check(Context& ctx, const std::string& problem, int ladder_n, double spacing, double temp) {
  ComplexMatrix h_tot, h_bath, h;
  std::optional<gksl::ThermalSetup> setup;
  if (!problem.empty()) {
    const io::ProblemFile pf = io::read_problem_file(problem);
    if (!pf.thermal || !pf.generator) throw InvalidInput(problem + ": needs H0_diag, T, H_tot, H_B and H");
    setup.emplace(pf.thermal->h0_diag, pf.thermal->temperature);
    h_tot = pf.generator->h_tot;
    h_bath = pf.generator->h_bath;
    h = pf.generator->h;
  } else if (ladder_n >= 2) {
    const gksl::LadderCoupling lc = gksl::ladder_coupling(ladder_n, spacing, temp);
    setup.emplace(lc.setup);
    h_tot = lc.h_tot;
    h_bath = lc.h_bath;
    h = ComplexMatrix::Zero(ladder_n, ladder_n);
  } else {
    throw InvalidInput("give --problem or --ladder");
  }
  const gksl::MarkovGenerator mg = gksl::markov_to_generator(h_tot, h_bath, h, *setup);
  const gksl::EntoReport rep = gksl::is_ento_generator(mg.generator.superop(), *setup);
  Json ops = Json::array();
  for (const auto& t : mg.terms) ops.push_back(Json{{"row", t.row}, {"col", t.col}, {"op", io::to_json(t.op)}});
  emit(ctx, Json{{"ok", rep.ok()},
                 {"hermiticity_preserving", rep.hermiticity_preserving},
                 {"trace_annihilating", rep.trace_annihilating},
                 {"conditionally_cp", rep.conditionally_cp},
                 {"gibbs_fixed", rep.gibbs_fixed},
                 {"covariant", rep.covariant},
                 {"gibbs_residual", io::number(rep.gibbs_residual)},
                 {"commutator_norm", io::number(rep.commutator_norm)},
                 {"ccp_min_eigenvalue", io::number(rep.ccp_min_eigenvalue)},
                 {"lindblad_ops", ops}});
}

// --------------------------------------------------------------------------
// qubit

qubit::QubitThermalParams parse_qubit(const std::string& s, const std::string& what) {
  const RealVector v = io::parse_vector(s, what);
  if (v.size() != 3 && v.size() != 4) throw InvalidInput(what + " expects mu,eps,re_c[,im_c]");
  return {v[0], v[1], Complex(v[2], v.size() == 4 ? v[3] : 0.0)};
}

Json qubit_json(const qubit::QubitThermalParams& p) {
  return Json{{"mu", io::number(p.mu)}, {"eps", io::number(p.eps)},
              {"c", Json{{"re", io::number(p.c.real())}, {"im", io::number(p.c.imag())}}}};
}

void cmd_qubit_classify(Context& ctx, const std::string& p_s) {
  const auto p = parse_qubit(p_s, "--params");
  const auto c = qubit::classify(p);
  emit(ctx, Json{{"region", qubit::to_string(c.region)},
                 {"boundary", c.boundary},
                 {"thermal_residual", io::number(c.thermal_residual)},
                 {"markov_residual", io::number(c.markov_residual)}});
}

void cmd_qubit_compose(Context& ctx, const std::string& p1_s, const std::string& p2_s) {
  const auto p1 = parse_qubit(p1_s, "--p1"), p2 = parse_qubit(p2_s, "--p2");
  const auto c = qubit::compose(p1, p2);
  Json j = qubit_json(c.params);
  j["degenerate"] = c.degenerate;
  j["region"] = qubit::to_string(qubit::classify(c.params).region);
  emit(ctx, j);
}

void cmd_qubit_region(Context& ctx, double eps, int resolution, const std::string& svg_path) {
  if (!(eps > 0 && eps < 1)) throw InvalidInput("--eps must lie in (0, 1)");
  const double gap = qubit::markov_gap(eps);
  emit(ctx, Json{{"eps", io::number(eps)},
                 {"mu_star", io::number(1 / (1 + eps))},
                 {"thermal_radius_at_mu_star", io::number(qubit::thermal_radius(1 / (1 + eps), eps))},
                 {"gap", io::number(gap)}});
  if (svg_path.empty()) return;
  // Two panels: (mu, Re c, Im c) seen from two fixed directions.
  svg::Canvas canvas(-0.2, 3.4, -1.3, 1.5);
  const double views[2][2] = {{0.55, 0.35}, {0.0, 0.0}};
  for (int panel = 0; panel < 2; ++panel) {
    const double az = views[panel][0], el = views[panel][1];
    const double shift = panel * 1.8;
    auto proj = [&](double mu, Complex c) {
      const double x = mu * std::cos(az) + c.real() * std::sin(az);
      const double depth = -mu * std::sin(az) + c.real() * std::cos(az);
      const double y = c.imag() * std::cos(el) + depth * std::sin(el);
      return Point2(shift + x, y);
    };
    auto ring = [&](double mu, double r, const svg::Style& st) {
      std::vector<Point2> pts;
      for (int k = 0; k <= 96; ++k) pts.push_back(proj(mu, std::polar(r, 2 * std::numbers::pi * k / 96)));
      canvas.polyline(pts, st);
    };
    const svg::Style blue{"#1f77b4", "none", 1.0, 0.9, ""}, orange{"#ff7f0e", "none", 1.2, 0.9, ""};
    const int rings = std::max(4, resolution / 10);
    for (int i = 0; i <= rings; ++i) {
      const double mu = static_cast<double>(i) / rings;
      ring(mu, qubit::thermal_radius(mu, eps), blue);
      const double mm = mu / (1 + eps);
      ring(mm, qubit::markov_radius(mm, eps), orange);
    }
    for (int k = 0; k < 8; ++k) {
      const Complex ph = std::polar(1.0, 2 * std::numbers::pi * k / 8);
      std::vector<Point2> tb, mb;
      for (int i = 0; i <= 60; ++i) {
        const double mu = i / 60.0;
        tb.push_back(proj(mu, qubit::thermal_radius(mu, eps) * ph));
        const double mm = mu / (1 + eps);
        mb.push_back(proj(mm, qubit::markov_radius(mm, eps) * ph));
      }
      canvas.polyline(tb, blue);
      canvas.polyline(mb, orange);
    }
    canvas.arrow(proj(0, 0), proj(1.15, 0), svg::Style{"black", "none", 1, 1, ""});
    canvas.text(proj(1.17, 0), "mu");
  }
  canvas.text(Point2(-0.15, 1.4), "eps = " + io::format_number(eps));
  io::write_text_file(svg_path, canvas.str());
}

// --------------------------------------------------------------------------
// toy model

void cmd_toy_simulate(Context& ctx, double a, const std::string& problem, int n, const std::string& x0_s,
                      const std::string& schedule_path, bool random, std::uint64_t seed, double step, double tail,
                      const std::string& csv, const std::string& schedule_out) {
  const toy::ToyGenerator g = make_toy(a, problem, n);
  const RealVector x0 = named_point(x0_s, g, "--x0");
  toy::Schedule s;
  if (random) {
    std::mt19937_64 rng(toy::stream_seed(seed, 0));
    s = toy::ScheduleSampler{}.draw(g.dim(), rng);
    ctx.err << "seed " << seed << "\n";
  } else if (!schedule_path.empty()) {
    Json j;
    try {
      j = Json::parse(io::read_text_file(schedule_path));
    } catch (const Json::parse_error& e) {
      throw InvalidInput(schedule_path + ": " + e.what());
    }
    if (j.is_object()) {
      const io::ProblemFile pf = io::parse_problem(j);
      if (!pf.schedule) throw InvalidInput(schedule_path + ": missing 'schedule'");
      s = *pf.schedule;
    } else {
      s = io::schedule_from_json(j, "");
    }
  } else if (!problem.empty()) {
    const io::ProblemFile pf = io::read_problem_file(problem);
    if (pf.schedule) s = *pf.schedule;
  }
  if (!schedule_out.empty()) {
    Json j{{"schedule", io::to_json(s)}};
    if (random) j = Json{{"seed", seed}, {"schedule", io::to_json(s)}};
    io::write_text_file(schedule_out, j.dump(2) + "\n");
  }
  const toy::Trajectory tr = toy::simulate(ProbVector(x0), g, s, {step, tail});
  emit_text(ctx, csv, io::trajectory_csv(tr));
}

void cmd_toy_bound(Context& ctx, double a, const std::string& problem, int n, const std::string& x0_s,
                   std::size_t trajectories, std::uint64_t seed, const std::string& svg_path) {
  const toy::ToyGenerator g = make_toy(a, problem, n);
  const ProbVector x0(named_point(x0_s, g, "--x0"));
  const toy::ReachBound b = toy::reach_bound(x0, g);
  Json j = io::bound_json(b);
  toy::CloudOptions opt;
  opt.trajectories = trajectories;
  opt.seed = seed;
  if (trajectories > 0) {
    const auto st = toy::containment_sweep(x0, g, b, opt);
    j["containment"] = Json{{"seed", seed},
                            {"trajectories", st.trajectories},
                            {"samples", st.samples},
                            {"min_slack", io::number(st.min_slack)}};
  }
  emit(ctx, j);
  if (svg_path.empty()) return;
  if (g.dim() != 3) throw InvalidInput("--svg needs a 3-level toy model");
  svg::Canvas canvas = svg::Canvas::simplex();
  svg::draw_simplex(canvas);
  std::vector<Point2> hull;
  for (const auto& v : b.vertices()) hull.push_back(qutrit::SimplexEmbedding::embed(v));
  std::sort(hull.begin(), hull.end(), [](const Point2& p, const Point2& q) {
    return std::atan2(p.y(), p.x()) < std::atan2(q.y(), q.x());
  });
  if (trajectories > 0) {
    toy::CloudOptions small = opt;
    small.trajectories = std::min<std::size_t>(trajectories, 2000);
    for (const auto& x : toy::reach_cloud(x0, g, small))
      canvas.circle(qutrit::SimplexEmbedding::embed(x), 1.2, svg::Style{"none", "#2ca02c", 0, 0.6, ""});
  }
  canvas.polygon(hull, svg::Style{"#d62728", "none", 1.5, 1, ""});
  canvas.circle(qutrit::SimplexEmbedding::embed(x0.entries()), 4, svg::Style{"black", "black", 1, 1, ""});
  canvas.circle(qutrit::SimplexEmbedding::embed(g.fixed_point().entries()), 4,
                svg::Style{"#1f77b4", "#1f77b4", 1, 1, ""});
  io::write_text_file(svg_path, canvas.str());
}

// --------------------------------------------------------------------------
// qutrit

toy::ToyGenerator qutrit_generator(double a, const std::string& problem) {
  toy::ToyGenerator g = make_toy(a, problem, 3);
  if (g.dim() != 3) throw InvalidInput("qutrit commands need a 3-level generator");
  return g;
}

void draw_field(svg::Canvas& canvas, const toy::ToyGenerator& g) {
  const svg::Style st{"#9467bd", "none", 0.8, 0.8, ""};
  for (int i = 1; i < 24; ++i)
    for (int j = 1; i + j < 24; ++j) {
      RealVector x(3);
      x << i / 24.0, j / 24.0, 1 - (i + j) / 24.0;
      const auto cone = qutrit::derv_cone(x, g);
      if (cone.left < 0) continue;
      const Point2 p = qutrit::SimplexEmbedding::embed(x);
      const Point2 v = cone.embedded[cone.left];
      if (v.norm() < 1e-12) continue;
      canvas.arrow(p, p + 0.025 * v / v.norm(), st);
    }
}

void cmd_qutrit_stab(Context& ctx, double a, const std::string& problem, int grid, bool field,
                     const std::string& svg_path, const std::string& csv) {
  const toy::ToyGenerator g = qutrit_generator(a, problem);
  Json j{{"fixed_point", io::to_json(g.fixed_point().entries())}};
  io::CsvTable table{{"arc", "lambda", "px", "py", "x1", "x2", "x3"}, {}};
  std::vector<qutrit::BoundaryConic> arcs;
  if (g.source() == toy::ToyGenerator::Source::Ladder) {
    arcs = qutrit::stab_boundary(g.a());
    Json ja = Json::array();
    for (size_t k = 0; k < arcs.size(); ++k) {
      const auto& c = arcs[k];
      ja.push_back(Json{{"kind", qutrit::to_string(c.kind)},
                        {"family", io::number(c.family)},
                        {"lambda_max", io::number(c.lambda_max)},
                        {"perm", c.perm},
                        {"start", {io::number(c.start.x()), io::number(c.start.y())}},
                        {"end", {io::number(c.end.x()), io::number(c.end.y())}}});
      if (c.kind == qutrit::ConicCase::DegenerateUnital) continue;
      for (int i = 0; i < 201; ++i) {
        const double lam = c.lambda_max * (-1 + 2.0 * i / 200);
        const Point2 p = c.point(lam);
        const RealVector x = qutrit::SimplexEmbedding::lift(p);
        table.rows.push_back({static_cast<double>(k), lam, p.x(), p.y(), x[0], x[1], x[2]});
      }
    }
    j["arcs"] = ja;
  }
  std::vector<Point2> inside;
  if (grid > 0) {
    std::size_t count = 0, total = 0;
    for (int i = 0; i <= grid; ++i)
      for (int k = 0; i + k <= grid; ++k) {
        RealVector x(3);
        x << static_cast<double>(i) / grid, static_cast<double>(k) / grid, 0;
        x[2] = std::max(0.0, 1 - x[0] - x[1]);
        ++total;
        if (qutrit::is_stabilisable(x, g).stabilisable) {
          ++count;
          inside.push_back(qutrit::SimplexEmbedding::embed(x));
        }
      }
    j["grid"] = Json{{"points", total}, {"stabilisable", count}};
  }
  emit(ctx, j);
  if (!csv.empty()) io::write_text_file(csv, io::write_csv(table));
  if (svg_path.empty()) return;
  svg::Canvas canvas = svg::Canvas::simplex();
  for (const auto& p : inside) canvas.circle(p, 0.6, svg::Style{"none", "#aec7e8", 0, 1, ""});
  svg::draw_simplex(canvas);
  if (field) draw_field(canvas, g);
  const std::string colors[2] = {"#d62728", "#1f77b4"};
  for (size_t k = 0; k < arcs.size(); ++k) {
    if (arcs[k].kind == qutrit::ConicCase::DegenerateUnital) {
      canvas.circle(Point2::Zero(), 4, svg::Style{"#d62728", "#d62728", 1, 1, ""});
      continue;
    }
    canvas.polyline(arcs[k].sample(400), svg::Style{colors[k / 3 % 2], "none", 2, 1, ""});
  }
  for (const auto& p : all_permutations(3))
    canvas.circle(qutrit::SimplexEmbedding::embed(permute(p, g.fixed_point().entries())), 3,
                  svg::Style{"black", "black", 1, 1, ""});
  io::write_text_file(svg_path, canvas.str());
}

void curve_rows(io::CsvTable& t, const qutrit::EmbeddedCurve& c, double id) {
  for (size_t i = 0; i < c.t.size(); ++i)
    t.rows.push_back({id, c.t[i], c.p[i].x(), c.p[i].y(), c.x[i][0], c.x[i][1], c.x[i][2]});
}

Json curve_summary(const qutrit::EmbeddedCurve& c) {
  return Json{{"termination", qutrit::to_string(c.reason)},
              {"wall", c.wall},
              {"switches", c.switches},
              {"duration", io::number(c.t.back())},
              {"end", io::to_json(c.x.back())}};
}

void cmd_qutrit_reach(Context& ctx, double a, const std::string& problem, const std::string& x0_s, bool field,
                      const std::string& svg_path, const std::string& csv) {
  const toy::ToyGenerator g = qutrit_generator(a, problem);
  const RealVector x0 = named_point(x0_s, g, "--x0");
  const qutrit::ReachRegion r = qutrit::reachable_set(x0, g);
  emit(ctx, Json{{"x0", io::to_json(x0)},
                 {"class_of_fixed_point", r.is_class_of_d()},
                 {"left", curve_summary(r.left())},
                 {"right", curve_summary(r.right())},
                 {"chamber_area", io::number(r.chamber_part().area())}});
  if (!csv.empty()) {
    io::CsvTable t{{"curve", "t", "px", "py", "x1", "x2", "x3"}, {}};
    curve_rows(t, r.left(), 0);
    curve_rows(t, r.right(), 1);
    io::write_text_file(csv, io::write_csv(t));
  }
  if (svg_path.empty()) return;
  svg::Canvas canvas = svg::Canvas::simplex();
  for (const auto& poly : r.reflected()) canvas.polygon(poly, svg::Style{"none", "#c6dbef", 0, 1, ""});
  svg::draw_simplex(canvas);
  if (field) draw_field(canvas, g);
  canvas.polygon(r.class_boundary(), svg::Style{"#1f77b4", "none", 1.5, 1, ""});
  if (g.source() == toy::ToyGenerator::Source::Ladder && std::abs(g.a() - 1) > 1e-12)
    canvas.polygon(qutrit::stab_boundary_polygon(g.a(), 300), svg::Style{"#d62728", "none", 1.2, 1, ""});
  canvas.polyline(r.left().p, svg::Style{"#2ca02c", "none", 2, 1, ""});
  canvas.polyline(r.right().p, svg::Style{"#ff7f0e", "none", 2, 1, ""});
  canvas.circle(qutrit::SimplexEmbedding::embed(x0), 4, svg::Style{"black", "black", 1, 1, ""});
  io::write_text_file(svg_path, canvas.str());
}

void cmd_qutrit_order(Context& ctx, double a, const std::string& problem, const std::string& x_s,
                      const std::string& y_s) {
  const toy::ToyGenerator g = qutrit_generator(a, problem);
  const RealVector x = named_point(x_s, g, "--x"), y = named_point(y_s, g, "--y");
  const auto o = qutrit::reach_order(x, y, g, geometric_tolerance());
  emit(ctx, Json{{"order", qutrit::to_string(o)}});
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{out, err};
  CLI::App app{"Thermal-operation toolkit: majorisation geometry, GKSL generators, toy-model reachability"};
  app.require_subcommand(1);
  double tol = 0;
  app.add_option("--tol", tol, "geometric tolerance (also THERMO_TOL)");

  std::function<void()> action;
  std::string d_s, y_s, x_s, problem, csv, svg_path, x0_s = "uniform", schedule_path, schedule_out, p1, p2, params;
  int samples = 100, ladder_n = 0, n = 3, grid = 0, resolution = 40;
  double spacing = 1, temp = 1, eps = 0.6, a = 0, step = 0.01, tail = 0;
  std::uint64_t seed = 1;
  std::size_t trajectories = 0;
  bool random = false, field = false;

  auto* curve = app.add_subcommand("curve", "thermomajorisation curve samples as CSV");
  curve->add_option("--d", d_s)->required();
  curve->add_option("--y", y_s)->required();
  curve->add_option("--samples", samples);
  curve->add_option("--csv", csv);
  curve->callback([&] { action = [&] { cmd_curve(ctx, d_s, y_s, samples, csv); }; });

  auto* poly = app.add_subcommand("polytope", "halfspaces and vertices of the d-majorisation polytope");
  poly->add_option("--d", d_s)->required();
  poly->add_option("--y", y_s)->required();
  poly->callback([&] { action = [&] { cmd_polytope(ctx, d_s, y_s); }; });

  auto* ext = app.add_subcommand("extremes", "extreme point for every ordering and the max corner");
  ext->add_option("--d", d_s)->required();
  ext->add_option("--y", y_s)->required();
  ext->callback([&] { action = [&] { cmd_extremes(ctx, d_s, y_s); }; });

  auto* tr = app.add_subcommand("transition", "d-stochastic matrix mapping y to x");
  tr->add_option("--d", d_s)->required();
  tr->add_option("--y", y_s)->required();
  tr->add_option("--x", x_s)->required();
  tr->callback([&] { action = [&] { cmd_transition(ctx, d_s, y_s, x_s); }; });

  auto* gen = app.add_subcommand("generator-check", "build the dilation generator and check wedge conditions");
  gen->add_option("--problem", problem);
  gen->add_option("--ladder", ladder_n, "ladder example with n levels");
  gen->add_option("--spacing", spacing);
  gen->add_option("--temperature", temp);
  gen->callback([&] { action = [&] { cmd_generator_check(ctx, problem, ladder_n, spacing, temp); }; });

  auto* qb = app.add_subcommand("qubit", "qubit thermal channels");
  qb->require_subcommand(1);
  auto* qc = qb->add_subcommand("classify");
  qc->add_option("--params", params, "mu,eps,re_c[,im_c]")->required();
  qc->callback([&] { action = [&] { cmd_qubit_classify(ctx, params); }; });
  auto* qm = qb->add_subcommand("compose");
  qm->add_option("--p1", p1)->required();
  qm->add_option("--p2", p2)->required();
  qm->callback([&] { action = [&] { cmd_qubit_compose(ctx, p1, p2); }; });
  auto* qr = qb->add_subcommand("region");
  qr->add_option("--eps", eps);
  qr->add_option("--resolution", resolution);
  qr->add_option("--svg", svg_path);
  qr->callback([&] { action = [&] { cmd_qubit_region(ctx, eps, resolution, svg_path); }; });

  auto* ty = app.add_subcommand("toy", "permutation-plus-relaxation control model");
  ty->require_subcommand(1);
  auto* ts = ty->add_subcommand("simulate");
  ts->add_option("--a", a);
  ts->add_option("--n", n);
  ts->add_option("--problem", problem);
  ts->add_option("--x0", x0_s);
  ts->add_option("--schedule", schedule_path);
  ts->add_flag("--random", random);
  ts->add_option("--seed", seed);
  ts->add_option("--step", step);
  ts->add_option("--tail", tail);
  ts->add_option("--csv", csv);
  ts->add_option("--schedule-out", schedule_out);
  ts->callback([&] {
    action = [&] {
      cmd_toy_simulate(ctx, a, problem, n, x0_s, schedule_path, random, seed, step, tail, csv, schedule_out);
    };
  });
  auto* tb = ty->add_subcommand("bound");
  tb->add_option("--a", a);
  tb->add_option("--n", n);
  tb->add_option("--problem", problem);
  tb->add_option("--x0", x0_s);
  tb->add_option("--trajectories", trajectories);
  tb->add_option("--seed", seed);
  tb->add_option("--svg", svg_path);
  tb->callback([&] { action = [&] { cmd_toy_bound(ctx, a, problem, n, x0_s, trajectories, seed, svg_path); }; });

  auto* qt = app.add_subcommand("qutrit", "exact qutrit stabilisable and reachable sets");
  qt->require_subcommand(1);
  auto* qs = qt->add_subcommand("stab");
  qs->add_option("--a", a);
  qs->add_option("--problem", problem);
  qs->add_option("--grid", grid);
  qs->add_flag("--field", field);
  qs->add_option("--svg", svg_path);
  qs->add_option("--csv", csv);
  qs->callback([&] { action = [&] { cmd_qutrit_stab(ctx, a, problem, grid, field, svg_path, csv); }; });
  auto* qre = qt->add_subcommand("reach");
  qre->add_option("--a", a);
  qre->add_option("--problem", problem);
  qre->add_option("--x0", x0_s);
  qre->add_flag("--field", field);
  qre->add_option("--svg", svg_path);
  qre->add_option("--csv", csv);
  qre->callback([&] { action = [&] { cmd_qutrit_reach(ctx, a, problem, x0_s, field, svg_path, csv); }; });
  auto* qo = qt->add_subcommand("order");
  qo->add_option("--a", a);
  qo->add_option("--problem", problem);
  qo->add_option("--x", x_s)->required();
  qo->add_option("--y", y_s)->required();
  qo->callback([&] { action = [&] { cmd_qutrit_order(ctx, a, problem, x_s, y_s); }; });

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (const char* env = std::getenv("THERMO_TOL")) {
      char* end = nullptr;
      const double v = std::strtod(env, &end);
      if (end == env || !(v > 0)) throw InvalidInput("THERMO_TOL must be a positive number");
      set_geometric_tolerance(v);
    }
    if (tol != 0) {
      if (!(tol > 0)) throw InvalidInput("--tol must be positive");
      set_geometric_tolerance(tol);
    }
    if (action) action();
    return 0;
  } catch (const DomainExit&) {
    return 1;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace thermo::cli
