// pqlap: command line driver for the (p,q)-Laplacian solvers, the alpha sweep
// harness and the optimal control studies.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "config.hpp"
#include "pqlap/pqlap.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace pqlap;
using namespace pqlap::cli;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_check_failed = 1;
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

struct Context {
  RunConfig cfg;
  std::string command;
  fs::path out;

  void add_meta(CsvTable& t) const {
    t.add_meta("command", command);
    t.add_meta("config_hash", cfg.hash());
    t.add_meta("seed", std::to_string(cfg.seed));
    t.add_meta("threads", std::to_string(cfg.threads));
    t.add_meta("mesh_n", std::to_string(cfg.mesh_n));
    t.add_meta("pqlap_version", PQLAP_VERSION_STRING);
    t.add_meta("eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                    std::to_string(EIGEN_MINOR_VERSION));
    t.add_meta("compiler", __VERSION__);
  }

  void write_csv(CsvTable t, const std::string& name) const {
    add_meta(t);
    std::ofstream os(out / name, std::ios::binary);
    t.write(os);
  }

  void write_json(const json& j, const std::string& name) const {
    std::ofstream os(out / name, std::ios::binary);
    os << j.dump(2) << '\n';
  }

  std::ofstream open(const std::string& name) const { return std::ofstream(out / name, std::ios::binary); }
};

Mesh build_mesh(const RunConfig& cfg) {
  if (!cfg.mesh_file.empty()) {
    std::ifstream in(cfg.mesh_file);
    if (!in) throw ConfigError("mesh.file: cannot open '" + cfg.mesh_file + "'");
    return read_mesh(in);
  }
  return build_rectangle_mesh(cfg.mesh_n, cfg.domain, cfg.layout);
}

SourceData build_data(const RunConfig& cfg, const Mesh& mesh) {
  SourceData d = SourceData::zero(mesh);
  d.g = cfg.g.evaluate(mesh);
  d.r = cfg.r.evaluate(mesh);
  return d;
}

BoundaryLaw build_law(const RunConfig& cfg, const Mesh& mesh) {
  const Vector omega = cfg.omega.evaluate(mesh);
  try {
    if (cfg.law_type == "tabulated") return BoundaryLaw::tabulated(omega, cfg.law_table, cfg.params.p, cfg.params.b);
    return BoundaryLaw::power(omega, cfg.params.p, cfg.params.b);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("law: ") + e.what());
  }
}

json check_json(const CheckResult& c) {
  return {{"name", c.name}, {"status", to_string(c.status)}, {"violation", c.violation}, {"where", c.where}};
}

// ---------------------------------------------------------------------------

int cmd_solve(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const Mesh mesh = build_mesh(cfg);
  const SourceData data = build_data(cfg, mesh);
  std::optional<BoundaryLaw> law;
  if (cfg.kind == ProblemKind::dnn) law = build_law(cfg, mesh);
  const DiscreteProblem problem(mesh, cfg.params, data, law, cfg.kind);

  SolveReport report;
  Vector u;
  bool ok = true;
  std::string error;
  try {
    auto sol = solve(problem, cfg.solver);
    u = std::move(sol.field.values);
    report = std::move(sol.report);
  } catch (const SolveError& e) {
    report = e.report();
    ok = false;
    error = e.what();
  }
  {
    auto os = ctx.open("solve.log");
    report.write_log(os);
  }
  {
    CsvTable t({"iteration", "residual", "energy"});
    for (std::size_t k = 0; k < report.residual_history.size(); ++k)
      t.add_row({std::to_string(k), format_double(report.residual_history[k]), format_double(report.energy_history[k])});
    ctx.write_csv(std::move(t), "solve_records.csv");
  }
  if (!ok) {
    std::cerr << "pqlap: " << error << '\n';
    return exit_numerical;
  }
  {
    auto os = ctx.open("solution.txt");
    write_nodal(os, mesh, u, std::string("kind ") + to_string(cfg.kind) + ", config " + cfg.hash());
  }
  const double vnorm = norm_V(u, cfg.params.p, mesh);
  json j{{"kind", to_string(cfg.kind)},
         {"converged", report.converged},
         {"termination", to_string(report.termination)},
         {"iterations", report.iterations},
         {"residual", report.final_residual},
         {"energy", report.energy},
         {"v_norm", vnorm},
         {"max", u.maxCoeff()},
         {"min", u.minCoeff()},
         {"config_hash", cfg.hash()}};
  ctx.write_json(j, "summary.json");
  std::cout << "solve " << to_string(cfg.kind) << ": converged, iterations " << report.iterations << ", residual "
            << format_double(report.final_residual) << ", energy " << format_double(report.energy) << ", V-norm "
            << format_double(vnorm) << '\n';
  return exit_ok;
}

// ---------------------------------------------------------------------------

bool enabled(const std::set<std::string>& on, const std::string& check) {
  if (on.empty()) return true;
  static const std::map<std::string, std::string> group{
      {"bound_dnd", "bound"},         {"bound_dnn", "bound"},
      {"bound_dnn_gamma3", "bound"},  {"order", "order"},
      {"alpha_monotone", "monotone"}, {"gap_nonincreasing", "convergence"},
      {"gap_reduction", "convergence"}, {"convergence", "convergence"}};
  const auto it = group.find(check);
  return it != group.end() && on.count(it->second);
}

std::uint64_t case_seed(std::uint64_t seed, std::size_t k) {
  // splitmix64 step, so neighbouring seeds give unrelated cases
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (k + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Shared by verify (judged) and sweep (table only).
int run_sweeps(const Context& ctx, bool judge) {
  const auto& cfg = ctx.cfg;
  const Mesh mesh = build_mesh(cfg);
  std::vector<std::pair<std::string, ProblemCase>> cases;
  if (cfg.sweep_mode == "manufactured") {
    cases.emplace_back("manufactured", manufactured_case(mesh));
  } else if (cfg.sweep_mode == "config") {
    cases.emplace_back("config", ProblemCase{cfg.params, build_data(cfg, mesh), build_law(cfg, mesh)});
  } else {
    for (std::size_t k = 0; k < cfg.sweep_count; ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "random_%03zu", k);
      cases.emplace_back(name, random_h0_case(case_seed(cfg.seed, k), mesh));
    }
  }

  json summary = json::array();
  bool all_ok = true, numerical = false;
  for (const auto& [name, c] : cases) {
    const TheoremReport rep = run_alpha_sweep(c.params, c.data, c.law, mesh, cfg.sweep);
    ctx.write_csv(sweep_table(rep), cases.size() == 1 ? "sweep.csv" : "sweep_" + name.substr(7) + ".csv");
    json checks = json::array();
    bool case_ok = rep.failures.empty();
    for (const auto& chk : rep.checks) {
      if (!enabled(cfg.sweep_checks, chk.name)) continue;
      checks.push_back(check_json(chk));
      const bool bad = chk.status == CheckStatus::fail || chk.status == CheckStatus::discrete_artifact;
      case_ok = case_ok && !bad;
      if (judge)
        std::cout << name << ' ' << chk.name << ": " << to_string(chk.status) << " (violation "
                  << format_double(chk.violation) << (chk.where.empty() ? "" : ", " + chk.where) << ")\n";
    }
    for (const auto& f : rep.failures) std::cerr << "pqlap: " << name << ": " << f << '\n';
    std::vector<double> retried;
    for (const auto& r : rep.rows)
      if (r.retried) retried.push_back(r.alpha);
    numerical = numerical || !rep.failures.empty();
    all_ok = all_ok && case_ok;
    summary.push_back({{"case", name},
                       {"p", c.params.p},
                       {"q", c.params.q},
                       {"theta", c.params.theta},
                       {"mu", c.params.mu},
                       {"beta", c.params.beta},
                       {"b", c.params.b},
                       {"h0", rep.h0},
                       {"passed", case_ok},
                       {"checks", checks},
                       {"failures", rep.failures},
                       {"retried_alphas", retried},
                       {"empirical_rates", rep.empirical_rates()},
                       {"min_angle_deg", rep.min_angle},
                       {"max_angle_deg", rep.max_angle}});
  }
  ctx.write_json({{"command", ctx.command}, {"config_hash", cfg.hash()}, {"seed", cfg.seed}, {"cases", summary}},
                 judge ? "verify.json" : "sweep.json");
  if (numerical) return exit_numerical;
  if (judge) {
    std::cout << "verify: " << (all_ok ? "all checks passed" : "some checks failed") << " (" << cases.size()
              << (cases.size() == 1 ? " case)\n" : " cases)\n");
    return all_ok ? exit_ok : exit_check_failed;
  }
  std::cout << "sweep: wrote " << cases.size() << (cases.size() == 1 ? " table\n" : " tables\n");
  return exit_ok;
}

// ---------------------------------------------------------------------------

Vector cell_vector(const std::vector<double>& v, std::size_t cells) {
  if (v.empty()) return Vector::Zero(static_cast<Eigen::Index>(cells));
  if (v.size() == 1) return Vector::Constant(static_cast<Eigen::Index>(cells), v[0]);
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

ControlSetup build_control_setup(const RunConfig& cfg, const Mesh& mesh) {
  ControlSetup s;
  s.target = cfg.target;
  s.lambda = cfg.lambda;
  s.rho = cfg.rho;
  s.mx = cfg.grid_x;
  s.my = cfg.grid_y;
  s.sign_constraint = cfg.sign_constraint;
  s.params = cfg.params;
  s.data = build_data(cfg, mesh);
  s.law = build_law(cfg, mesh);
  s.solve = cfg.solver;
  // finite difference quotients need states well below the default residual tolerance
  s.solve.tolerance = std::min(s.solve.tolerance, 1e-12);
  s.z_d = Vector::Zero(static_cast<Eigen::Index>(mesh.num_nodes()));
  s.y_d = Eigen::MatrixX2d::Zero(static_cast<Eigen::Index>(mesh.num_triangles()), 2);

  const std::size_t cells = cfg.grid_x * cfg.grid_y;
  auto reachable = [&](const std::vector<double>& g) {
    ControlProblem tmp(mesh, s);
    return tmp.fresh_state(cell_vector(g, cells), Governing::dnd());
  };
  if (cfg.z_d.source == "reachable") s.z_d = reachable(cfg.z_d.g_tilde);
  if (cfg.z_d.source == "field") s.z_d = cfg.z_d.field.evaluate(mesh);
  if (cfg.y_d.source == "reachable") {
    const Vector u = reachable(cfg.y_d.g_tilde);
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
      const auto gr = pqlap::detail::gradient(mesh, t, u);
      s.y_d(static_cast<Eigen::Index>(t), 0) = gr[0];
      s.y_d(static_cast<Eigen::Index>(t), 1) = gr[1];
    }
  }
  if (cfg.y_d.source == "field") {
    s.y_d.col(0).setConstant(cfg.y_d.gx);
    s.y_d.col(1).setConstant(cfg.y_d.gy);
  }
  return s;
}

CsvTable control_table(const ControlProblem& cp, const Vector& g) {
  CsvTable t({"cell", "ix", "iy", "value"});
  const auto mx = static_cast<Eigen::Index>(cp.setup().mx);
  for (Eigen::Index c = 0; c < g.size(); ++c)
    t.add_row({std::to_string(c), std::to_string(c % mx), std::to_string(c / mx), format_double(g[c])});
  return t;
}

int cmd_control(const Context& ctx, bool force_asymptotics) {
  const auto& cfg = ctx.cfg;
  const Mesh mesh = build_mesh(cfg);
  ControlSetup setup;
  try {
    setup = build_control_setup(cfg, mesh);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("control: ") + e.what());
  }
  std::optional<ControlProblem> cp_storage;
  try {
    cp_storage.emplace(mesh, setup);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("control: ") + e.what());
  }
  const ControlProblem& cp = *cp_storage;
  const Vector start = cell_vector(cfg.control_start, setup.cells());
  if (start.size() != cp.size()) throw ConfigError("control.start: wrong number of cell values");

  if (force_asymptotics || cfg.control_mode == "asymptotics") {
    const AsymptoticsReport rep = control_alpha_asymptotics(cp, cfg.asymptotics, start);
    ctx.write_csv(asymptotics_table(rep), "asymptotics.csv");
    ctx.write_csv(control_table(cp, rep.reference.control), "control_reference.csv");
    json checks = json::array();
    for (const auto& c : rep.checks) checks.push_back(check_json(c));
    json stages = json::array();
    for (std::size_t k = 0; k < rep.stages.size(); ++k)
      stages.push_back({{"alpha", rep.rows[k].alpha},
                        {"control", std::vector<double>(rep.stages[k].control.begin(), rep.stages[k].control.end())},
                        {"start_values", rep.stages[k].start_values}});
    ctx.write_json({{"command", ctx.command},
                    {"config_hash", cfg.hash()},
                    {"reference_value", rep.reference.value},
                    {"reference_stationary", rep.reference.stationary},
                    {"reference_control",
                     std::vector<double>(rep.reference.control.begin(), rep.reference.control.end())},
                    {"stages", stages},
                    {"checks", checks},
                    {"verdict", to_string(rep.verdict)}},
                   "asymptotics.json");
    std::cout << "asymptotics: reference value " << format_double(rep.reference.value) << '\n';
    for (const auto& r : rep.rows)
      std::cout << "  alpha " << format_double(r.alpha) << ": value " << format_double(r.value) << ", gap "
                << format_double(r.value_gap) << ", control distance " << format_double(r.control_distance)
                << (r.stationary ? "" : " (not stationary)") << '\n';
    for (const auto& c : rep.checks) std::cout << "  " << c.name << ": " << to_string(c.status) << '\n';
    std::cout << "asymptotics: " << to_string(rep.verdict) << '\n';
    return rep.verdict == Verdict::not_convergent ? exit_check_failed : exit_ok;
  }

  const Governing gov =
      cfg.control_governing == ProblemKind::dnd ? Governing::dnd() : Governing::dnn(cfg.params.alpha);
  const double j0 = cp.cost(Vector::Zero(cp.size()), gov).total();
  const ControlResult r = optimize(cp, gov, start, cfg.optimizer);
  ctx.write_csv(optimizer_table(r), "optimizer_log.csv");
  ctx.write_csv(control_table(cp, r.control), "control.csv");
  {
    auto os = ctx.open("state.txt");
    write_nodal(os, mesh, r.state, "optimal state, config " + cfg.hash());
  }
  ctx.write_json({{"command", ctx.command},
                  {"config_hash", cfg.hash()},
                  {"governing", to_string(gov.kind)},
                  {"alpha", gov.alpha},
                  {"value", r.value},
                  {"tracking", r.parts.tracking},
                  {"regularization", r.parts.regularization},
                  {"value_at_zero", j0},
                  {"gradient_norm", r.gradient_norm},
                  {"stationary", r.stationary},
                  {"iterations", r.iterations},
                  {"best_start", r.best_start},
                  {"start_values", r.start_values},
                  {"control", std::vector<double>(r.control.begin(), r.control.end())}},
                 "control.json");
  std::cout << "control " << to_string(gov.kind) << ": value " << format_double(r.value) << " (J(0) "
            << format_double(j0) << "), gradient norm " << format_double(r.gradient_norm) << ", "
            << (r.stationary ? "stationary" : "not stationary") << '\n';
  return exit_ok;
}

// ---------------------------------------------------------------------------

int cmd_mesh_info(const Context& ctx) {
  const Mesh mesh = build_mesh(ctx.cfg);
  const auto [lo, hi] = mesh.angle_range();
  double h = 0.0;
  for (const auto& t : mesh.triangles())
    for (int k = 0; k < 3; ++k) {
      const auto& a = mesh.nodes()[t[k]];
      const auto& b = mesh.nodes()[t[(k + 1) % 3]];
      h = std::max(h, std::hypot(a.x - b.x, a.y - b.y));
    }
  std::cout << "nodes " << mesh.num_nodes() << "\ntriangles " << mesh.num_triangles() << "\nboundary_edges "
            << mesh.boundary_edges().size() << '\n';
  for (auto part : {BoundaryPart::gamma1, BoundaryPart::gamma2, BoundaryPart::gamma3})
    std::cout << to_string(part) << " edges " << mesh.count_edges(part) << " length "
              << format_double(mesh.boundary_length(part)) << '\n';
  std::cout << "area " << format_double(mesh.total_area()) << "\nh_max " << format_double(h) << "\nangle_min_deg "
            << format_double(lo * 180.0 / M_PI) << "\nangle_max_deg " << format_double(hi * 180.0 / M_PI) << '\n';
  auto os = ctx.open("mesh.txt");
  write_mesh(os, mesh);
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pqlap: (p,q)-Laplacian mixed boundary value problems, alpha sweeps and optimal control"};
  app.require_subcommand(1, 1);
  std::string config_path;
  Overrides ov;
  std::string out;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::size_t mesh_n = 0;
  auto* o_config = app.add_option("--config", config_path, "YAML configuration file");
  auto* o_out = app.add_option("--out", out, "output directory (overrides output.dir)");
  auto* o_seed = app.add_option("--seed", seed, "random seed (overrides seed)");
  auto* o_threads = app.add_option("--threads", threads, "maximum worker threads (overrides threads)");
  auto* o_mesh = app.add_option("--mesh-n", mesh_n, "mesh subdivisions per side (overrides mesh.n)");
  (void)o_config;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"solve", "solve the configured boundary value problem"},
      {"verify", "run the alpha sweep harness and judge the comparison and convergence checks"},
      {"sweep", "run the alpha sweep and write the tables without judging"},
      {"control", "solve the configured optimal control problem"},
      {"asymptotics", "optimal control along the alpha schedule against the Dirichlet limit"},
      {"mesh-info", "print mesh statistics and write the mesh file"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_config;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  if (o_out->count()) ov.out = out;
  if (o_seed->count()) ov.seed = seed;
  if (o_threads->count()) ov.threads = threads;
  if (o_mesh->count()) ov.mesh_n = mesh_n;

  try {
    Context ctx;
    ctx.command = command;
    if (config_path.empty()) {
      if (command == "control" || command == "asymptotics")
        throw ConfigError("--config: required for '" + command + "'");
      ctx.cfg = load_config_text("{}", "<defaults>", ov);
    } else {
      ctx.cfg = load_config(config_path, ov);
    }
    ctx.out = ctx.cfg.out_dir;
    fs::create_directories(ctx.out);

    if (command == "solve") return cmd_solve(ctx);
    if (command == "verify") return run_sweeps(ctx, true);
    if (command == "sweep") return run_sweeps(ctx, false);
    if (command == "control") return cmd_control(ctx, false);
    if (command == "asymptotics") return cmd_control(ctx, true);
    return cmd_mesh_info(ctx);
  } catch (const ConfigError& e) {
    std::cerr << "pqlap: config error: " << e.what() << '\n';
    return exit_config;
  } catch (const SolveError& e) {
    std::cerr << "pqlap: numerical failure: " << e.what() << '\n';
    return exit_numerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "pqlap: config error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "pqlap: numerical failure: " << e.what() << '\n';
    return exit_numerical;
  }
}
