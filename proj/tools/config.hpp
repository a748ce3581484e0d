#pragma once

// Run configuration: YAML file -> validated RunConfig. Every error carries the file
// position and the dotted field name.

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "pqlap/control.hpp"
#include "pqlap/io.hpp"

namespace pqlap::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scalar field over the domain: constant, affine, separable sine, or a nodal file.
struct FieldSpec {
  std::string type = "constant";
  double value = 0.0;                   // constant; offset for affine and sine
  double ax = 0.0, ay = 0.0;            // affine slopes
  double amplitude = 0.0, kx = 1.0, ky = 0.0, phase = 0.0;  // a + A sin(kx x + phase) cos(ky y)
  std::string path;                     // file

  Vector evaluate(const Mesh& mesh) const {
    if (type == "file") {
      std::ifstream in(path);
      if (!in) throw ConfigError("cannot open nodal file '" + path + "'");
      return read_nodal(in, mesh);
    }
    Vector out(static_cast<Eigen::Index>(mesh.num_nodes()));
    for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
      const auto& x = mesh.nodes()[i];
      double v = value;
      if (type == "affine") v += ax * x.x + ay * x.y;
      if (type == "sine") v += amplitude * std::sin(kx * x.x + phase) * std::cos(ky * x.y);
      out[static_cast<Eigen::Index>(i)] = v;
    }
    return out;
  }
};

struct TargetSpec {
  std::string source;           // "" (absent) | reachable | field
  std::vector<double> g_tilde;  // reachable: one value, or one per control cell
  FieldSpec field;              // field: explicit z_d
  double gx = 0.0, gy = 0.0;    // field for y_d: a constant gradient
};

inline FieldSpec constant_field(double v) {
  FieldSpec f;
  f.value = v;
  return f;
}

struct RunConfig {
  std::string path;
  std::string text;  // raw file contents, hashed into output metadata

  ProblemKind kind = ProblemKind::dnn;
  PdeParams params;

  std::size_t mesh_n = 16;
  Rectangle domain{};
  SideLayout layout{};
  std::string mesh_file;

  FieldSpec g, r, omega = constant_field(1.0);
  std::string law_type = "power";
  std::vector<std::pair<double, double>> law_table;

  SolveOptions solver;

  std::string sweep_mode = "manufactured";  // manufactured | config | random
  SweepConfig sweep;
  std::size_t sweep_count = 20;
  std::set<std::string> sweep_checks;  // empty: all

  std::string control_mode = "optimize";  // optimize | asymptotics
  ProblemKind control_governing = ProblemKind::dnd;
  TargetKind target = TargetKind::state;
  TargetSpec z_d, y_d;
  double lambda = 1.0, rho = 1.0;
  std::size_t grid_x = 4, grid_y = 4;
  bool sign_constraint = false;
  std::vector<double> control_start;
  OptimizerOptions optimizer;
  AsymptoticsConfig asymptotics;

  std::string out_dir = "out";
  std::uint64_t seed = 0;
  unsigned threads = 1;

  std::string hash() const { return hex64(fnv1a(text)); }
};

namespace detail {

inline std::string where(const std::string& path, const YAML::Node& n) {
  const auto m = n.Mark();
  if (m.line < 0) return path;
  return path + ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1);
}

class Reader {
 public:
  Reader(std::string path, YAML::Node root) : path_(std::move(path)), root_(std::move(root)) {}

  [[noreturn]] void fail(const YAML::Node& n, const std::string& field, const std::string& msg) const {
    throw ConfigError(where(path_, n) + ": " + field + ": " + msg);
  }

  template <class T>
  T get(const YAML::Node& parent, const std::string& key, const std::string& prefix, T fallback) const {
    const YAML::Node n = parent[key];
    if (!n) return fallback;
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, prefix + key, "has the wrong type");
    }
  }

  /// Rejects keys that are not in `known`.
  void only(const YAML::Node& n, const std::string& prefix, std::initializer_list<const char*> known) const {
    if (!n) return;
    if (!n.IsMap()) fail(n, prefix.empty() ? "<root>" : prefix.substr(0, prefix.size() - 1), "expected a mapping");
    for (const auto& kv : n) {
      const auto k = kv.first.as<std::string>();
      bool ok = false;
      for (const char* s : known) ok = ok || k == s;
      if (!ok) fail(kv.first, prefix + k, "unknown field");
    }
  }

  const std::string& path() const { return path_; }
  const YAML::Node& root() const { return root_; }

 private:
  std::string path_;
  YAML::Node root_;
};

inline BoundaryPart parse_part(const Reader& rd, const YAML::Node& n, const std::string& field) {
  const auto s = n.as<std::string>();
  if (s == "gamma1" || s == "1") return BoundaryPart::gamma1;
  if (s == "gamma2" || s == "2") return BoundaryPart::gamma2;
  if (s == "gamma3" || s == "3") return BoundaryPart::gamma3;
  rd.fail(n, field, "expected gamma1, gamma2 or gamma3");
}

inline FieldSpec parse_field(const Reader& rd, const YAML::Node& n, const std::string& field, FieldSpec fallback) {
  if (!n) return fallback;
  FieldSpec f;
  if (n.IsScalar()) {
    try {
      f.value = n.as<double>();
    } catch (const YAML::Exception&) {
      rd.fail(n, field, "expected a number or a field mapping");
    }
    return f;
  }
  const std::string p = field + ".";
  rd.only(n, p, {"type", "value", "ax", "ay", "amplitude", "kx", "ky", "phase", "path"});
  f.type = rd.get<std::string>(n, "type", p, "constant");
  if (f.type != "constant" && f.type != "affine" && f.type != "sine" && f.type != "file")
    rd.fail(n["type"], p + "type", "expected constant, affine, sine or file");
  f.value = rd.get<double>(n, "value", p, 0.0);
  f.ax = rd.get<double>(n, "ax", p, 0.0);
  f.ay = rd.get<double>(n, "ay", p, 0.0);
  f.amplitude = rd.get<double>(n, "amplitude", p, 0.0);
  f.kx = rd.get<double>(n, "kx", p, 1.0);
  f.ky = rd.get<double>(n, "ky", p, 0.0);
  f.phase = rd.get<double>(n, "phase", p, 0.0);
  f.path = rd.get<std::string>(n, "path", p, "");
  if (f.type == "file" && f.path.empty()) rd.fail(n, p + "path", "required for type file");
  return f;
}

inline std::vector<double> parse_list(const Reader& rd, const YAML::Node& n, const std::string& field) {
  if (n.IsScalar()) {
    try {
      return {n.as<double>()};
    } catch (const YAML::Exception&) {
      rd.fail(n, field, "expected a number");
    }
  }
  if (!n.IsSequence()) rd.fail(n, field, "expected a number or a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < n.size(); ++i) {
    try {
      out.push_back(n[i].as<double>());
    } catch (const YAML::Exception&) {
      rd.fail(n[i], field + "[" + std::to_string(i) + "]", "expected a number");
    }
  }
  return out;
}

inline TargetSpec parse_target(const Reader& rd, const YAML::Node& n, const std::string& field, bool gradient) {
  TargetSpec t;
  if (!n) return t;
  const std::string p = field + ".";
  rd.only(n, p, {"source", "g_tilde", "field", "gx", "gy"});
  t.source = rd.get<std::string>(n, "source", p, "");
  if (t.source == "reachable") {
    if (!n["g_tilde"]) rd.fail(n, p + "g_tilde", "required for source reachable");
    const auto& gn = n["g_tilde"];
    if (gn.IsScalar()) {
      t.g_tilde = {rd.get<double>(n, "g_tilde", p, 0.0)};
    } else {
      t.g_tilde = parse_list(rd, gn, p + "g_tilde");
    }
  } else if (t.source == "field") {
    if (gradient) {
      t.gx = rd.get<double>(n, "gx", p, 0.0);
      t.gy = rd.get<double>(n, "gy", p, 0.0);
    } else {
      if (!n["field"]) rd.fail(n, p + "field", "required for source field");
      t.field = parse_field(rd, n["field"], p + "field", {});
    }
  } else {
    rd.fail(n["source"] ? n["source"] : n, p + "source", "expected reachable or field");
  }
  return t;
}

// Re-raises a module validation error at the position of `n`.
template <class F>
void validated(const Reader& rd, const YAML::Node& n, const std::string& field, F&& f) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    rd.fail(n, field, e.what());
  }
}

}  // namespace detail

struct Overrides {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::size_t> mesh_n;
};

/// Parses and validates a configuration file. Throws ConfigError with position and field.
/// `path` only labels error messages.
inline RunConfig load_config_text(const std::string& text, const std::string& path, const Overrides& ov = {}) {
  RunConfig cfg;
  cfg.path = path;
  cfg.text = text;
  YAML::Node root;
  try {
    root = YAML::Load(cfg.text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(path + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                      ": syntax error: " + e.msg);
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  using detail::Reader;
  Reader rd(path, root);
  rd.only(root, "", {"problem", "mesh", "source", "law", "solver", "sweep", "control", "output", "seed", "threads"});

  // problem
  const YAML::Node pn = root["problem"];
  rd.only(pn, "problem.", {"kind", "p", "q", "theta", "mu", "beta", "alpha", "b", "epsilon"});
  if (pn) {
    const auto kind = rd.get<std::string>(pn, "kind", "problem.", "dnn");
    if (kind == "dnd") cfg.kind = ProblemKind::dnd;
    else if (kind == "dnn") cfg.kind = ProblemKind::dnn;
    else rd.fail(pn["kind"], "problem.kind", "expected dnd or dnn");
    auto& prm = cfg.params;
    prm.p = rd.get<double>(pn, "p", "problem.", prm.p);
    prm.q = rd.get<double>(pn, "q", "problem.", prm.q);
    prm.theta = rd.get<double>(pn, "theta", "problem.", prm.theta);
    prm.mu = rd.get<double>(pn, "mu", "problem.", prm.mu);
    prm.beta = rd.get<double>(pn, "beta", "problem.", prm.beta);
    prm.alpha = rd.get<double>(pn, "alpha", "problem.", prm.alpha);
    prm.b = rd.get<double>(pn, "b", "problem.", prm.b);
    prm.epsilon = rd.get<double>(pn, "epsilon", "problem.", prm.epsilon);
  }
  {
    // Point at the field the first violated requirement is about.
    const auto& prm = cfg.params;
    auto at = [&](const char* key) { return pn && pn[key] ? pn[key] : (pn ? pn : root); };
    std::string field = "problem";
    YAML::Node node = pn ? pn : root;
    if (!(prm.q > 1.0 && prm.q < prm.p)) field = "problem.q", node = at("q");
    else if (!(prm.theta < critical_exponent(prm.p, 2)) || !(prm.theta > 1.0)) field = "problem.theta", node = at("theta");
    detail::validated(rd, node, field, [&] { prm.validate(cfg.kind); });
  }

  // mesh
  const YAML::Node mn = root["mesh"];
  rd.only(mn, "mesh.", {"n", "domain", "layout", "file"});
  if (mn) {
    const long n = rd.get<long>(mn, "n", "mesh.", 16);
    if (n < 1) rd.fail(mn["n"], "mesh.n", "must be >= 1");
    cfg.mesh_n = static_cast<std::size_t>(n);
    if (const auto dn = mn["domain"]) {
      const auto v = detail::parse_list(rd, dn, "mesh.domain");
      if (v.size() != 4 || !(v[1] > v[0]) || !(v[3] > v[2]))
        rd.fail(dn, "mesh.domain", "expected [x0, x1, y0, y1] with x0 < x1 and y0 < y1");
      cfg.domain = Rectangle{v[0], v[1], v[2], v[3]};
    }
    if (const auto ln = mn["layout"]) {
      rd.only(ln, "mesh.layout.", {"left", "right", "bottom", "top"});
      if (ln["left"]) cfg.layout.left = detail::parse_part(rd, ln["left"], "mesh.layout.left");
      if (ln["right"]) cfg.layout.right = detail::parse_part(rd, ln["right"], "mesh.layout.right");
      if (ln["bottom"]) cfg.layout.bottom = detail::parse_part(rd, ln["bottom"], "mesh.layout.bottom");
      if (ln["top"]) cfg.layout.top = detail::parse_part(rd, ln["top"], "mesh.layout.top");
      const auto& L = cfg.layout;
      if (L.left != BoundaryPart::gamma1 && L.right != BoundaryPart::gamma1 && L.bottom != BoundaryPart::gamma1 &&
          L.top != BoundaryPart::gamma1)
        rd.fail(ln, "mesh.layout", "at least one side must be gamma1");
    }
    cfg.mesh_file = rd.get<std::string>(mn, "file", "mesh.", "");
  }
  if (ov.mesh_n) {
    if (*ov.mesh_n < 1) throw ConfigError("--mesh-n: must be >= 1");
    cfg.mesh_n = *ov.mesh_n;
  }

  // source and law
  const YAML::Node sn = root["source"];
  rd.only(sn, "source.", {"g", "r"});
  if (sn) {
    cfg.g = detail::parse_field(rd, sn["g"], "source.g", cfg.g);
    cfg.r = detail::parse_field(rd, sn["r"], "source.r", cfg.r);
  }
  const YAML::Node ln = root["law"];
  rd.only(ln, "law.", {"type", "omega", "table"});
  if (ln) {
    cfg.law_type = rd.get<std::string>(ln, "type", "law.", "power");
    if (cfg.law_type != "power" && cfg.law_type != "tabulated") rd.fail(ln["type"], "law.type", "expected power or tabulated");
    cfg.omega = detail::parse_field(rd, ln["omega"], "law.omega", cfg.omega);
    if (cfg.law_type == "tabulated") {
      const auto tn = ln["table"];
      if (!tn || !tn.IsSequence()) rd.fail(tn ? tn : ln, "law.table", "required list of [s, k] pairs");
      for (std::size_t i = 0; i < tn.size(); ++i) {
        const auto v = detail::parse_list(rd, tn[i], "law.table[" + std::to_string(i) + "]");
        if (v.size() != 2) rd.fail(tn[i], "law.table[" + std::to_string(i) + "]", "expected [s, k]");
        cfg.law_table.emplace_back(v[0], v[1]);
      }
      detail::validated(rd, tn, "law.table", [&] {
        BoundaryLaw::tabulated(Vector::Ones(1), cfg.law_table, cfg.params.p, cfg.params.b);
      });
    }
  }

  // solver
  const YAML::Node vn = root["solver"];
  rd.only(vn, "solver.", {"max_iterations", "tolerance", "max_halvings", "armijo", "picard_fallback", "step_tolerance"});
  if (vn) {
    auto& s = cfg.solver;
    s.max_iterations = rd.get<int>(vn, "max_iterations", "solver.", s.max_iterations);
    s.tolerance = rd.get<double>(vn, "tolerance", "solver.", s.tolerance);
    s.max_halvings = rd.get<int>(vn, "max_halvings", "solver.", s.max_halvings);
    s.armijo = rd.get<double>(vn, "armijo", "solver.", s.armijo);
    s.picard_fallback = rd.get<bool>(vn, "picard_fallback", "solver.", s.picard_fallback);
    s.step_tolerance = rd.get<double>(vn, "step_tolerance", "solver.", s.step_tolerance);
    detail::validated(rd, vn, "solver", [&] { s.validate(); });
  }

  // sweep
  const YAML::Node wn = root["sweep"];
  rd.only(wn, "sweep.", {"mode", "alphas", "tau", "convergence_tol", "reduction", "warm_start", "count", "checks"});
  if (wn) {
    cfg.sweep_mode = rd.get<std::string>(wn, "mode", "sweep.", cfg.sweep_mode);
    if (cfg.sweep_mode != "manufactured" && cfg.sweep_mode != "config" && cfg.sweep_mode != "random")
      rd.fail(wn["mode"], "sweep.mode", "expected manufactured, config or random");
    if (wn["alphas"]) cfg.sweep.alphas = detail::parse_list(rd, wn["alphas"], "sweep.alphas");
    cfg.sweep.tau = rd.get<double>(wn, "tau", "sweep.", cfg.sweep_mode == "random" ? 1e-6 : cfg.sweep.tau);
    cfg.sweep.convergence_tol = rd.get<double>(wn, "convergence_tol", "sweep.", cfg.sweep.convergence_tol);
    cfg.sweep.reduction = rd.get<double>(wn, "reduction", "sweep.", cfg.sweep.reduction);
    cfg.sweep.warm_start = rd.get<bool>(wn, "warm_start", "sweep.", cfg.sweep.warm_start);
    const long count = rd.get<long>(wn, "count", "sweep.", 20);
    if (count < 1) rd.fail(wn["count"], "sweep.count", "must be >= 1");
    cfg.sweep_count = static_cast<std::size_t>(count);
    if (const auto cn = wn["checks"]) {
      static const std::set<std::string> known{"bound", "order", "monotone", "convergence"};
      if (!cn.IsSequence()) rd.fail(cn, "sweep.checks", "expected a list");
      for (std::size_t i = 0; i < cn.size(); ++i) {
        const auto c = cn[i].as<std::string>();
        if (!known.count(c)) rd.fail(cn[i], "sweep.checks", "expected bound, order, monotone or convergence");
        cfg.sweep_checks.insert(c);
      }
    }
    detail::validated(rd, wn["alphas"] ? wn["alphas"] : wn, "sweep.alphas", [&] { cfg.sweep.validate(); });
  }
  cfg.sweep.solve = cfg.solver;

  // control
  const YAML::Node cn = root["control"];
  rd.only(cn, "control.", {"mode", "governing", "target", "z_d", "y_d", "lambda", "rho", "grid", "sign_constraint",
                           "start", "optimizer", "alphas", "value_tol"});
  if (cn) {
    cfg.control_mode = rd.get<std::string>(cn, "mode", "control.", cfg.control_mode);
    if (cfg.control_mode != "optimize" && cfg.control_mode != "asymptotics")
      rd.fail(cn["mode"], "control.mode", "expected optimize or asymptotics");
    const auto gov = rd.get<std::string>(cn, "governing", "control.", "dnd");
    if (gov == "dnd") cfg.control_governing = ProblemKind::dnd;
    else if (gov == "dnn") cfg.control_governing = ProblemKind::dnn;
    else rd.fail(cn["governing"], "control.governing", "expected dnd or dnn");
    const auto tgt = rd.get<std::string>(cn, "target", "control.", "state");
    if (tgt == "state") cfg.target = TargetKind::state;
    else if (tgt == "gradient") cfg.target = TargetKind::gradient;
    else rd.fail(cn["target"], "control.target", "expected state or gradient");
    cfg.z_d = detail::parse_target(rd, cn["z_d"], "control.z_d", false);
    cfg.y_d = detail::parse_target(rd, cn["y_d"], "control.y_d", true);
    cfg.lambda = rd.get<double>(cn, "lambda", "control.", cfg.lambda);
    cfg.rho = rd.get<double>(cn, "rho", "control.", cfg.rho);
    if (!(cfg.lambda >= 0.0)) rd.fail(cn["lambda"], "control.lambda", "must be >= 0");
    if (!(cfg.rho > 0.0)) rd.fail(cn["rho"], "control.rho", "must be > 0");
    if (const auto gn = cn["grid"]) {
      const auto v = detail::parse_list(rd, gn, "control.grid");
      if (v.size() != 2 || v[0] < 1 || v[1] < 1 || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1]))
        rd.fail(gn, "control.grid", "expected [mx, my] with positive integers");
      cfg.grid_x = static_cast<std::size_t>(v[0]);
      cfg.grid_y = static_cast<std::size_t>(v[1]);
    }
    cfg.sign_constraint = rd.get<bool>(cn, "sign_constraint", "control.", false);
    if (cn["start"]) cfg.control_start = detail::parse_list(rd, cn["start"], "control.start");
    if (const auto on = cn["optimizer"]) {
      rd.only(on, "control.optimizer.", {"method", "max_iterations", "tolerance", "fd_step", "max_backtracks",
                                         "armijo", "memory", "starts"});
      auto& o = cfg.optimizer;
      const auto m = rd.get<std::string>(on, "method", "control.optimizer.", "gradient_descent");
      if (m == "gradient_descent" || m == "gd") o.method = Optimizer::gradient_descent;
      else if (m == "lbfgs") o.method = Optimizer::lbfgs;
      else rd.fail(on["method"], "control.optimizer.method", "expected gradient_descent or lbfgs");
      o.max_iterations = rd.get<int>(on, "max_iterations", "control.optimizer.", o.max_iterations);
      o.tolerance = rd.get<double>(on, "tolerance", "control.optimizer.", o.tolerance);
      o.fd_step = rd.get<double>(on, "fd_step", "control.optimizer.", o.fd_step);
      o.max_backtracks = rd.get<int>(on, "max_backtracks", "control.optimizer.", o.max_backtracks);
      o.armijo = rd.get<double>(on, "armijo", "control.optimizer.", o.armijo);
      o.memory = rd.get<int>(on, "memory", "control.optimizer.", o.memory);
      o.starts = rd.get<int>(on, "starts", "control.optimizer.", o.starts);
      detail::validated(rd, on, "control.optimizer", [&] { o.validate(); });
    }
    if (cn["alphas"]) cfg.asymptotics.alphas = detail::parse_list(rd, cn["alphas"], "control.alphas");
    cfg.asymptotics.value_tol = rd.get<double>(cn, "value_tol", "control.", cfg.asymptotics.value_tol);
    detail::validated(rd, cn["alphas"] ? cn["alphas"] : cn, "control.alphas", [&] {
      SweepConfig s;
      s.alphas = cfg.asymptotics.alphas;
      s.validate();
      if (!(cfg.asymptotics.value_tol > 0.0)) throw std::invalid_argument("value_tol must be > 0");
    });
    if (cfg.lambda > 0.0) {
      if (cfg.target == TargetKind::state && cfg.z_d.source.empty())
        rd.fail(cn, "control.z_d", "missing: state tracking with lambda > 0 needs a z_d source");
      if (cfg.target == TargetKind::gradient && cfg.y_d.source.empty())
        rd.fail(cn, "control.y_d", "missing: gradient tracking with lambda > 0 needs a y_d source");
    }
    const std::size_t cells = cfg.grid_x * cfg.grid_y;
    for (const auto* t : {&cfg.z_d, &cfg.y_d})
      if (t->source == "reachable" && t->g_tilde.size() != 1 && t->g_tilde.size() != cells)
        rd.fail(cn, t == &cfg.z_d ? "control.z_d.g_tilde" : "control.y_d.g_tilde",
                "expected one value or " + std::to_string(cells) + " cell values");
    if (!cfg.control_start.empty() && cfg.control_start.size() != 1 && cfg.control_start.size() != cells)
      rd.fail(cn["start"], "control.start", "expected one value or " + std::to_string(cells) + " cell values");
  }

  // output, seed, threads
  const YAML::Node on = root["output"];
  rd.only(on, "output.", {"dir"});
  if (on) cfg.out_dir = rd.get<std::string>(on, "dir", "output.", cfg.out_dir);
  if (root["seed"]) {
    try {
      cfg.seed = root["seed"].as<std::uint64_t>();
    } catch (const YAML::Exception&) {
      rd.fail(root["seed"], "seed", "expected a non-negative integer");
    }
  }
  if (root["threads"]) {
    const long t = rd.get<long>(root, "threads", "", 1);
    if (t < 1) rd.fail(root["threads"], "threads", "must be >= 1");
    cfg.threads = static_cast<unsigned>(t);
  }
  if (ov.out) cfg.out_dir = *ov.out;
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.threads) {
    if (*ov.threads < 1) throw ConfigError("--threads: must be >= 1");
    cfg.threads = *ov.threads;
  }
  cfg.sweep.threads = cfg.threads;
  cfg.optimizer.threads = cfg.threads;
  cfg.optimizer.seed = cfg.seed;
  cfg.asymptotics.optimizer = cfg.optimizer;
  return cfg;
}

inline RunConfig load_config(const std::string& path, const Overrides& ov = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open configuration file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_config_text(ss.str(), path, ov);
}

}  // namespace pqlap::cli
