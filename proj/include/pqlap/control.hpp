#pragma once

// Distributed optimal control of the source term: reduced cost, finite difference
// gradients, line-searched descent and the alpha -> infinity study.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <deque>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "pqlap/theorems.hpp"

namespace pqlap {

enum class TargetKind { state, gradient };

inline const char* to_string(TargetKind k) { return k == TargetKind::state ? "state" : "gradient"; }

/// Governing state equation: the Dirichlet problem or the Robin problem at a given alpha.
struct Governing {
  ProblemKind kind = ProblemKind::dnd;
  double alpha = 0.0;

  static Governing dnd() { return {ProblemKind::dnd, 0.0}; }
  static Governing dnn(double a) { return {ProblemKind::dnn, a}; }
};

struct ControlSetup {
  TargetKind target = TargetKind::state;
  Vector z_d;                 // nodal target, state tracking
  Eigen::MatrixX2d y_d;       // per-triangle target gradient, gradient tracking
  double lambda = 1.0;        // tracking weight; 0 switches tracking off
  double rho = 1.0;           // regularization weight
  std::size_t mx = 4, my = 4; // control cells; the mesh bounding box is split mx by my
  bool sign_constraint = false;  // restrict controls to g <= 0

  PdeParams params;  // alpha is taken from Governing
  SourceData data;   // fixed part of the data (r, and any fixed g); the control adds to g
  BoundaryLaw law;
  SolveOptions solve;

  std::size_t cells() const { return mx * my; }
  double p() const { return params.p; }
  double p_conj() const { return conjugate_exponent(params.p); }

  void validate(const Mesh& mesh) const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("control: lambda must be >= 0");
    if (!(rho > 0.0) || !std::isfinite(rho)) throw std::invalid_argument("control: rho must be > 0");
    if (mx == 0 || my == 0) throw std::invalid_argument("control: the control grid needs at least one cell");
    if (cells() > mesh.num_triangles()) throw std::invalid_argument("control: more control cells than triangles");
    params.validate(ProblemKind::dnd);
    data.check(mesh);
    if (target == TargetKind::state && z_d.size() != static_cast<Eigen::Index>(mesh.num_nodes()))
      throw std::invalid_argument("control: z_d must have one value per mesh node");
    if (target == TargetKind::gradient && y_d.rows() != static_cast<Eigen::Index>(mesh.num_triangles()))
      throw std::invalid_argument("control: y_d must have one row per triangle");
  }
};

struct CostValue {
  double tracking = 0.0;
  double regularization = 0.0;
  double total() const { return tracking + regularization; }
};

/// Reduced cost g -> J(g, u_g) with a state cache keyed by (g, governing problem).
/// Holds a reference to the mesh, which must outlive it.
class ControlProblem {
 public:
  ControlProblem(const Mesh& mesh, ControlSetup setup) : mesh_(&mesh), setup_(std::move(setup)) {
    setup_.validate(mesh);
    setup_.solve.validate();
    const Eigen::Index m = static_cast<Eigen::Index>(setup_.cells());
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& n : mesh.nodes()) {
      x0 = std::min(x0, n.x), x1 = std::max(x1, n.x);
      y0 = std::min(y0, n.y), y1 = std::max(y1, n.y);
    }
    cell_of_.resize(mesh.num_triangles());
    cell_area_ = Vector::Zero(m);
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
      const auto& tri = mesh.triangles()[t];
      double cx = 0.0, cy = 0.0;
      for (auto i : tri) cx += mesh.nodes()[i].x / 3.0, cy += mesh.nodes()[i].y / 3.0;
      const auto ix = std::min(setup_.mx - 1, static_cast<std::size_t>((cx - x0) / (x1 - x0) * setup_.mx));
      const auto iy = std::min(setup_.my - 1, static_cast<std::size_t>((cy - y0) / (y1 - y0) * setup_.my));
      cell_of_[t] = iy * setup_.mx + ix;
      cell_area_[static_cast<Eigen::Index>(cell_of_[t])] += mesh.area(t);
    }
    for (Eigen::Index c = 0; c < m; ++c)
      if (!(cell_area_[c] > 0.0)) throw std::invalid_argument("control: a control cell contains no triangle");
  }

  const Mesh& mesh() const { return *mesh_; }
  const ControlSetup& setup() const { return setup_; }
  const Vector& cell_area() const { return cell_area_; }
  std::size_t cell_of(std::size_t t) const { return cell_of_[t]; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(setup_.cells()); }

  /// Cell-constant injection of the control onto the triangles.
  Vector prolong(const Vector& g) const {
    check(g);
    Vector out(static_cast<Eigen::Index>(mesh_->num_triangles()));
    for (std::size_t t = 0; t < cell_of_.size(); ++t)
      out[static_cast<Eigen::Index>(t)] = g[static_cast<Eigen::Index>(cell_of_[t])];
    return out;
  }

  /// ||g||_{L^s} of the prolonged control.
  double control_norm(const Vector& g, double s) const {
    check(g);
    return std::pow((g.array().abs().pow(s) * cell_area_.array()).sum(), 1.0 / s);
  }

  SourceData source(const Vector& g) const {
    SourceData d = setup_.data;
    Vector ge = prolong(g);
    if (d.g_element.size() > 0) ge += d.g_element;
    d.g_element = std::move(ge);
    return d;
  }

  PdeParams params(const Governing& gov) const {
    PdeParams prm = setup_.params;
    if (gov.kind == ProblemKind::dnn) prm.alpha = gov.alpha;
    return prm;
  }

  /// State u_g of the governing problem. `start` warm-starts the Newton solve.
  /// Throws SolveError when the solve fails.
  Vector state(const Vector& g, const Governing& gov, const Vector* start = nullptr) const {
    const std::string k = key(g, gov);
    {
      std::shared_lock lock(mutex_);
      if (auto it = cache_.find(k); it != cache_.end()) {
        ++hits_;
        return it->second;
      }
    }
    Vector u = fresh_state(g, gov, start);
    std::unique_lock lock(mutex_);
    if (cache_.size() >= max_cache_) {
      cache_.erase(order_.front());
      order_.pop_front();
    }
    if (cache_.emplace(k, u).second) order_.push_back(k);
    return u;
  }

  /// Solve without consulting the cache.
  Vector fresh_state(const Vector& g, const Governing& gov, const Vector* start = nullptr) const {
    SolveOptions opts = setup_.solve;
    if (start) {
      opts.initial_guess = InitialGuess::prescribed;
      opts.start = *start;
    }
    const PdeParams prm = params(gov);
    return solve(DiscreteProblem(*mesh_, prm, source(g), setup_.law, gov.kind), opts).field.values;
  }

  CostValue cost_of(const Vector& g, const Vector& u) const {
    check(g);
    const double p = setup_.p(), pc = setup_.p_conj();
    CostValue c;
    if (setup_.lambda != 0.0) {
      if (setup_.target == TargetKind::state) {
        c.tracking = setup_.lambda / p * std::pow(norm_Lp(Vector(u - setup_.z_d), p, *mesh_), p);
      } else {
        double acc = 0.0;
        for (std::size_t t = 0; t < mesh_->num_triangles(); ++t) {
          const auto grad = detail::gradient(*mesh_, t, u);
          const double dx = grad[0] - setup_.y_d(static_cast<Eigen::Index>(t), 0);
          const double dy = grad[1] - setup_.y_d(static_cast<Eigen::Index>(t), 1);
          acc += mesh_->area(t) * std::pow(std::hypot(dx, dy), p);
        }
        c.tracking = setup_.lambda / p * acc;
      }
    }
    c.regularization = setup_.rho / pc * (g.array().abs().pow(pc) * cell_area_.array()).sum();
    return c;
  }

  CostValue cost(const Vector& g, const Governing& gov, const Vector* start = nullptr) const {
    if (setup_.lambda == 0.0) return cost_of(g, Vector::Zero(static_cast<Eigen::Index>(mesh_->num_nodes())));
    return cost_of(g, state(g, gov, start));
  }

  /// Central differences of the reduced cost, one pair of solves per control cell,
  /// warm-started from the state at g. With threads > 1 the cells are split across
  /// worker threads; each component is computed identically either way.
  Vector reduced_gradient_fd(const Vector& g, const Governing& gov, double h, unsigned threads = 1) const {
    check(g);
    if (!(h > 0.0)) throw std::invalid_argument("control: finite difference step must be > 0");
    const Eigen::Index m = size();
    Vector base;
    if (setup_.lambda != 0.0) base = state(g, gov);
    Vector grad(m);
    std::vector<std::string> errors(static_cast<std::size_t>(m));
    auto component = [&](Eigen::Index i) {
      try {
        Vector gp = g, gm = g;
        gp[i] += h;
        gm[i] -= h;
        const Vector* s = base.size() ? &base : nullptr;
        grad[i] = (cost(gp, gov, s).total() - cost(gm, gov, s).total()) / (2.0 * h);
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(i)] = e.what();
      }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(m)));
    if (threads == 1) {
      for (Eigen::Index i = 0; i < m; ++i) component(i);
    } else {
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
          for (Eigen::Index i = t; i < m; i += threads) component(i);
        });
      for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
      if (!e.empty()) throw std::runtime_error("control: perturbed solve failed: " + e);
    return grad;
  }

  std::size_t cache_size() const {
    std::shared_lock lock(mutex_);
    return cache_.size();
  }
  std::size_t cache_hits() const { return hits_; }

 private:
  void check(const Vector& g) const {
    if (g.size() != size()) throw std::invalid_argument("control: vector does not match the control grid");
  }

  static std::string key(const Vector& g, const Governing& gov) {
    std::string k(sizeof(double) * (static_cast<std::size_t>(g.size()) + 1) + 1, '\0');
    k[0] = gov.kind == ProblemKind::dnd ? 'D' : 'N';
    const double a = gov.kind == ProblemKind::dnd ? 0.0 : gov.alpha;
    std::memcpy(&k[1], &a, sizeof a);
    std::memcpy(&k[1 + sizeof a], g.data(), sizeof(double) * static_cast<std::size_t>(g.size()));
    return k;
  }

  const Mesh* mesh_;
  ControlSetup setup_;
  std::vector<std::size_t> cell_of_;
  Vector cell_area_;

  mutable std::shared_mutex mutex_;
  mutable std::map<std::string, Vector> cache_;
  mutable std::deque<std::string> order_;
  mutable std::atomic<std::size_t> hits_{0};
  std::size_t max_cache_ = 20000;
};

// ---------------------------------------------------------------------------
// Optimization

enum class Optimizer { gradient_descent, lbfgs };

inline const char* to_string(Optimizer o) { return o == Optimizer::lbfgs ? "lbfgs" : "gradient_descent"; }

struct OptimizerOptions {
  Optimizer method = Optimizer::gradient_descent;
  int max_iterations = 200;
  double tolerance = 1e-6;  // on the Euclidean norm of the (projected) gradient
  double fd_step = 1e-4;
  int max_backtracks = 30;
  double armijo = 1e-4;
  int memory = 6;           // L-BFGS pairs
  int starts = 3;           // given start, zero, seeded random
  std::uint64_t seed = 0;
  unsigned threads = 1;

  void validate() const {
    if (max_iterations < 0) throw std::invalid_argument("optimizer: max_iterations must be >= 0");
    if (!(tolerance > 0.0)) throw std::invalid_argument("optimizer: tolerance must be > 0");
    if (!(fd_step > 0.0)) throw std::invalid_argument("optimizer: fd_step must be > 0");
    if (max_backtracks < 1) throw std::invalid_argument("optimizer: max_backtracks must be >= 1");
    if (starts < 1) throw std::invalid_argument("optimizer: starts must be >= 1");
  }
};

struct OptimizerRecord {
  int start = 0;
  int iteration = 0;
  double value = 0.0;
  double gradient_norm = 0.0;
  double step = 0.0;
};

struct ControlResult {
  Vector control;  // cell values
  Vector state;
  double value = 0.0;
  CostValue parts;
  double gradient_norm = 0.0;
  bool stationary = false;
  int iterations = 0;
  int best_start = 0;
  std::vector<double> start_values;  // final value of each start, for dispersion
  std::vector<OptimizerRecord> log;
};

namespace detail {

// Zeroes gradient entries that push against the bound g <= 0 at active cells.
inline Vector project_gradient(const Vector& g, Vector grad, bool sign_constraint) {
  if (!sign_constraint) return grad;
  for (Eigen::Index i = 0; i < g.size(); ++i)
    if (g[i] >= 0.0 && grad[i] < 0.0) grad[i] = 0.0;
  return grad;
}

inline Vector project(Vector g, bool sign_constraint) {
  if (sign_constraint) g = g.cwiseMin(0.0);
  return g;
}

// One line-searched descent run from `g0`; returns the final iterate.
inline ControlResult descend(const ControlProblem& cp, const Governing& gov, Vector g, const OptimizerOptions& o,
                             int start_index) {
  const bool box = cp.setup().sign_constraint;
  // Riesz scaling: descent directions are measured in the L^2 metric of the control cells.
  const Vector inv_area = cp.cell_area().cwiseInverse();
  ControlResult res;
  g = project(std::move(g), box);
  double value = cp.cost(g, gov).total();
  Vector grad = cp.reduced_gradient_fd(g, gov, o.fd_step, o.threads);
  Vector pg = project_gradient(g, grad, box);
  std::deque<std::pair<Vector, Vector>> pairs;  // (s, y) for L-BFGS
  double step = 1.0;
  int it = 0;
  res.log.push_back({start_index, 0, value, pg.norm(), 0.0});

  while (true) {
    if (pg.norm() <= o.tolerance) {
      res.stationary = true;
      break;
    }
    if (it >= o.max_iterations) break;

    Vector d = -inv_area.cwiseProduct(pg);
    if (o.method == Optimizer::lbfgs && !pairs.empty()) {
      Vector q = pg;
      std::vector<double> a(pairs.size());
      for (std::size_t k = pairs.size(); k-- > 0;) {
        const auto& [s, y] = pairs[k];
        a[k] = s.dot(q) / y.dot(s);
        q -= a[k] * y;
      }
      const auto& [sl, yl] = pairs.back();
      Vector r = (sl.dot(yl) / yl.dot(inv_area.cwiseProduct(yl))) * inv_area.cwiseProduct(q);
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto& [s, y] = pairs[k];
        r += s * (a[k] - y.dot(r) / y.dot(s));
      }
      d = -r;
      if (box)
        for (Eigen::Index i = 0; i < d.size(); ++i)
          if (g[i] >= 0.0 && d[i] > 0.0) d[i] = 0.0;
      if (!(pg.dot(d) < 0.0)) {
        d = -inv_area.cwiseProduct(pg);
        pairs.clear();
      }
    }

    // Armijo backtracking on the projected path; quasi-Newton steps start at 1.
    double t = o.method == Optimizer::lbfgs && !pairs.empty() ? 1.0 : std::min(1e12, 2.0 * step);
    bool accepted = false;
    Vector g_new;
    double v_new = value;
    const Vector u_cur = cp.setup().lambda != 0.0 ? cp.state(g, gov) : Vector();
    for (int k = 0; k < o.max_backtracks; ++k, t *= 0.5) {
      g_new = project(g + t * d, box);
      try {
        v_new = cp.cost(g_new, gov, u_cur.size() ? &u_cur : nullptr).total();
      } catch (const std::exception&) {
        continue;
      }
      if (std::isfinite(v_new) && v_new <= value + o.armijo * pg.dot(g_new - g)) {
        accepted = true;
        break;
      }
    }
    if (!accepted || !(v_new < value)) break;  // no decrease: best iterate, not stationary

    const Vector grad_new = cp.reduced_gradient_fd(g_new, gov, o.fd_step, o.threads);
    const Vector pg_new = project_gradient(g_new, grad_new, box);
    const Vector s = g_new - g, y = grad_new - grad;
    if (s.dot(y) > 1e-14 * s.norm() * y.norm()) {
      pairs.emplace_back(s, y);
      if (static_cast<int>(pairs.size()) > o.memory) pairs.pop_front();
    }
    step = t;
    g = g_new;
    value = v_new;
    grad = grad_new;
    pg = pg_new;
    ++it;
    res.log.push_back({start_index, it, value, pg.norm(), t});
  }

  res.control = std::move(g);
  res.state = cp.setup().lambda == 0.0 ? Vector::Zero(static_cast<Eigen::Index>(cp.mesh().num_nodes()))
                                       : cp.state(res.control, gov);
  res.parts = cp.cost_of(res.control, res.state);
  res.value = res.parts.total();
  res.gradient_norm = pg.norm();
  res.iterations = it;
  return res;
}

}  // namespace detail

/// Multi-start line-searched descent. Starts: `start`, zero, and a seeded random
/// control (in that order, truncated to o.starts). The best final value wins; ties go
/// to the earlier start. Returns a stationary point, not necessarily a global minimizer.
inline ControlResult optimize(const ControlProblem& cp, const Governing& gov, const Vector& start,
                              const OptimizerOptions& o = {}) {
  o.validate();
  if (start.size() != cp.size()) throw std::invalid_argument("control: start does not match the control grid");
  std::vector<Vector> starts{start};
  if (o.starts >= 2) starts.push_back(Vector::Zero(cp.size()));
  if (o.starts >= 3) {
    std::mt19937_64 rng(o.seed);
    const double s = std::max(1.0, start.lpNorm<Eigen::Infinity>());
    std::uniform_real_distribution<double> U(-s, cp.setup().sign_constraint ? 0.0 : s);
    for (int k = 2; k < o.starts; ++k) {
      Vector r(cp.size());
      for (auto& v : r) v = U(rng);
      starts.push_back(std::move(r));
    }
  }

  ControlResult best;
  std::vector<double> values;
  std::vector<OptimizerRecord> log;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    ControlResult r = detail::descend(cp, gov, starts[k], o, static_cast<int>(k));
    values.push_back(r.value);
    log.insert(log.end(), r.log.begin(), r.log.end());
    if (k == 0 || r.value < best.value) {
      best = std::move(r);
      best.best_start = static_cast<int>(k);
    }
  }
  best.start_values = std::move(values);
  best.log = std::move(log);
  return best;
}

inline CsvTable optimizer_table(const ControlResult& r) {
  CsvTable t({"start", "iteration", "value", "gradient_norm", "step"});
  for (const auto& e : r.log)
    t.add_row({std::to_string(e.start), std::to_string(e.iteration), format_double(e.value),
               format_double(e.gradient_norm), format_double(e.step)});
  return t;
}

// ---------------------------------------------------------------------------
// alpha -> infinity

struct AsymptoticsConfig {
  std::vector<double> alphas{1e0, 1e1, 1e2, 1e3, 1e4};
  double value_tol = 1e-3;  // |J_alpha(g_alpha) - J(g_inf)| at the largest alpha
  double monotone_slack = 1e-10;
  OptimizerOptions optimizer;

  void validate() const {
    SweepConfig s;
    s.alphas = alphas;
    s.validate();
    if (!(value_tol > 0.0)) throw std::invalid_argument("asymptotics: value_tol must be > 0");
    optimizer.validate();
  }
};

struct AsymptoticsRow {
  double alpha = 0.0;
  double value = 0.0;             // J_alpha(g_alpha)
  double value_gap = 0.0;         // |J_alpha(g_alpha) - J(g_inf)|
  double control_distance = 0.0;  // ||g_alpha - g_inf||_{L^p'}
  double state_distance = 0.0;    // ||u_alpha - u_inf||_V
  double gradient_norm = 0.0;
  int iterations = 0;
  bool stationary = false;
};

enum class Verdict { convergent, not_convergent, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::convergent: return "convergent";
    case Verdict::not_convergent: return "not_convergent";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct AsymptoticsReport {
  ControlResult reference;  // Dirichlet-governed optimum
  std::vector<AsymptoticsRow> rows;
  std::vector<ControlResult> stages;
  std::vector<CheckResult> checks;
  Verdict verdict = Verdict::inconclusive;
};

/// Optimizes the Dirichlet-governed problem once, then each Robin problem along the
/// schedule, warm-starting from the previous optimal control. Also cross-checks that
/// the states at the fixed control g_inf increase with alpha.
inline AsymptoticsReport control_alpha_asymptotics(const ControlProblem& cp, const AsymptoticsConfig& cfg,
                                                   const Vector& start) {
  cfg.validate();
  AsymptoticsReport rep;
  const double pc = cp.setup().p_conj();
  rep.reference = optimize(cp, Governing::dnd(), start, cfg.optimizer);
  const Vector& g_inf = rep.reference.control;
  bool all_stationary = rep.reference.stationary;

  Vector warm = g_inf;
  for (double a : cfg.alphas) {
    ControlResult r = optimize(cp, Governing::dnn(a), warm, cfg.optimizer);
    AsymptoticsRow row;
    row.alpha = a;
    row.value = r.value;
    row.value_gap = std::abs(r.value - rep.reference.value);
    row.control_distance = cp.control_norm(Vector(r.control - g_inf), pc);
    row.state_distance = norm_V(Vector(r.state - rep.reference.state), cp.setup().p(), cp.mesh());
    row.gradient_norm = r.gradient_norm;
    row.iterations = r.iterations;
    row.stationary = r.stationary;
    all_stationary = all_stationary && r.stationary;
    warm = r.control;
    rep.rows.push_back(row);
    rep.stages.push_back(std::move(r));
  }

  CheckResult mono, final, state_mono;
  mono.name = "value_gap_nonincreasing";
  mono.violation = 0.0;
  for (std::size_t k = 1; k < rep.rows.size(); ++k) {
    const double inc = rep.rows[k].value_gap - rep.rows[k - 1].value_gap;
    if (inc > mono.violation) {
      mono.violation = inc;
      std::ostringstream w;
      w << "alpha=" << rep.rows[k].alpha;
      mono.where = w.str();
    }
  }
  mono.status = mono.violation <= cfg.monotone_slack ? CheckStatus::pass : CheckStatus::fail;
  final.name = "value_gap_final";
  final.violation = rep.rows.back().value_gap - cfg.value_tol;
  final.status = final.violation <= 0.0 ? CheckStatus::pass : CheckStatus::fail;

  state_mono.name = "state_alpha_monotone";
  state_mono.violation = 0.0;
  {
    const SourceData src = cp.source(g_inf);
    const bool h0 = satisfies_h0(src, cp.mesh(), cp.setup().params.b);
    Vector prev;
    double prev_alpha = 0.0;
    try {
      for (double a : cfg.alphas) {
        const Vector u = cp.state(g_inf, Governing::dnn(a), prev.size() ? &prev : nullptr);
        if (prev.size()) {
          const auto c = check_alpha_monotone(prev, u, prev_alpha, a, 1e-8);
          if (c.violation > state_mono.violation) {
            state_mono.violation = c.violation;
            std::ostringstream w;
            w << "alpha=" << prev_alpha << " vs " << a;
            state_mono.where = w.str();
          }
        }
        prev = u;
        prev_alpha = a;
      }
      state_mono.status = state_mono.violation <= 1e-8 ? CheckStatus::pass : CheckStatus::fail;
    } catch (const std::exception& e) {
      state_mono.status = CheckStatus::fail;
      state_mono.where = e.what();
    }
    if (!h0 && state_mono.status == CheckStatus::fail) state_mono.status = CheckStatus::hypothesis_violated;
  }
  rep.checks = {mono, final, state_mono};

  if (!all_stationary)
    rep.verdict = Verdict::inconclusive;
  else
    rep.verdict = mono.passed() && final.passed() ? Verdict::convergent : Verdict::not_convergent;
  return rep;
}

inline CsvTable asymptotics_table(const AsymptoticsReport& rep) {
  CsvTable t({"alpha", "value", "value_gap", "control_distance", "state_distance", "gradient_norm", "iterations",
              "stationary"});
  for (const auto& r : rep.rows)
    t.add_row({format_double(r.alpha), format_double(r.value), format_double(r.value_gap),
               format_double(r.control_distance), format_double(r.state_distance), format_double(r.gradient_norm),
               std::to_string(r.iterations), r.stationary ? "1" : "0"});
  return t;
}

}  // namespace pqlap
