#pragma once

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "pqlap/forms.hpp"

namespace pqlap {

enum class InitialGuess {
  automatic,   // harmonic lifting of the DND Dirichlet data, for both kinds
  zero,        // zero on free nodes (Dirichlet values imposed)
  prescribed,  // SolveOptions::start, e.g. the previous solve of a continuation
};

struct SolveOptions {
  int max_iterations = 50;
  double tolerance = 1e-10;  // on the Euclidean norm of the constrained residual
  int max_halvings = 30;
  double armijo = 1e-4;
  bool picard_fallback = true;
  /// Stop when the Newton increment is below this fraction of max(1, |u|_inf):
  /// the residual then sits at its floating point floor.
  double step_tolerance = 1e-14;
  InitialGuess initial_guess = InitialGuess::automatic;
  Vector start;

  void validate() const {
    if (!(tolerance > 0.0)) throw std::invalid_argument("solver: tolerance must be > 0");
    if (max_iterations < 1 || max_halvings < 1) throw std::invalid_argument("solver: iteration caps must be >= 1");
  }
};

enum class StepKind { newton, picard, energy };

inline const char* to_string(StepKind k) {
  switch (k) {
    case StepKind::newton: return "newton";
    case StepKind::picard: return "picard";
    case StepKind::energy: return "energy";
  }
  return "?";
}

enum class Termination { residual, stagnation, iteration_limit, line_search };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::residual: return "residual";
    case Termination::stagnation: return "stagnation";
    case Termination::iteration_limit: return "iteration_limit";
    case Termination::line_search: return "line_search";
  }
  return "?";
}

/// Convergence record of one nonlinear solve. Entry k of the histories belongs to
/// iterate k (entry 0 is the initial guess); steps[k] produced iterate k+1.
struct SolveReport {
  bool converged = false;
  int iterations = 0;
  std::vector<double> residual_history;
  std::vector<double> energy_history;
  std::vector<StepKind> steps;
  std::vector<double> step_lengths;
  Termination termination = Termination::iteration_limit;
  double final_residual = 0.0;
  double energy = 0.0;
  double wall_time = 0.0;

  void write_log(std::ostream& os) const {
    const auto old = os.precision(17);
    for (std::size_t k = 0; k < residual_history.size(); ++k) {
      os << "iter " << k << " residual " << residual_history[k] << " energy " << energy_history[k];
      if (k > 0) os << " step " << to_string(steps[k - 1]) << " t " << step_lengths[k - 1];
      os << '\n';
    }
    os << "converged " << (converged ? "yes" : "no") << " termination " << to_string(termination) << " iterations "
       << iterations << " residual " << final_residual << " energy " << energy << " wall_time " << wall_time << '\n';
    os.precision(old);
  }

  /// Machine-readable per-iteration record.
  void write_records(std::ostream& os) const {
    const auto old = os.precision(17);
    os << "iteration,residual,energy\n";
    for (std::size_t k = 0; k < residual_history.size(); ++k)
      os << k << ',' << residual_history[k] << ',' << energy_history[k] << '\n';
    os.precision(old);
  }
};

class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, SolveReport report) : std::runtime_error(what), report_(std::move(report)) {}
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

struct Solution {
  Field field;
  SolveReport report;
};

namespace detail {

/// Solves J x = rhs with a sparse LDL^T factorization, falling back to LU.
inline Vector solve_linear(const SparseMatrix& J, const Vector& rhs) {
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(J);
  if (ldlt.info() == Eigen::Success) {
    Vector x = ldlt.solve(rhs);
    if (ldlt.info() == Eigen::Success && x.allFinite()) return x;
  }
  Eigen::SparseLU<SparseMatrix> lu;
  lu.analyzePattern(J);
  lu.factorize(J);
  if (lu.info() != Eigen::Success) throw std::runtime_error("singular Jacobian; consider a larger epsilon");
  Vector x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite())
    throw std::runtime_error("singular Jacobian; consider a larger epsilon");
  return x;
}

}  // namespace detail

/// Harmonic lifting: the P1 Laplace solution with the Dirichlet values of the DND
/// problem (0 on Gamma1, b on Gamma3) and natural conditions elsewhere. For DNN this is
/// the alpha -> infinity limit of the linear model; either way gradients stay away from
/// zero, where the p- and q-terms degenerate.
inline Vector linear_lifting(const DiscreteProblem& problem) {
  const auto& mesh = problem.mesh();
  const DirichletSpec spec = make_dirichlet_spec(mesh, ProblemKind::dnd, problem.params().b);
  Vector u0 = Vector::Zero(problem.size());
  for (Eigen::Index i = 0; i < u0.size(); ++i)
    if (spec.is_constrained(static_cast<std::size_t>(i))) u0[i] = spec.values[static_cast<std::size_t>(i)];
  const SparseMatrix K = stiffness_matrix(mesh);
  Vector rhs = -(K * u0);
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < K.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(K, k); it; ++it)
      if (!spec.is_constrained(static_cast<std::size_t>(it.row())) &&
          !spec.is_constrained(static_cast<std::size_t>(it.col())))
        trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (Eigen::Index i = 0; i < u0.size(); ++i) {
    if (spec.is_constrained(static_cast<std::size_t>(i))) {
      trip.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
      rhs[i] = 0.0;
    }
  }
  SparseMatrix A(K.rows(), K.cols());
  A.setFromTriplets(trip.begin(), trip.end());
  return problem.project_feasible(u0 + detail::solve_linear(A, rhs));
}

struct NewtonStep {
  Vector direction;
  /// Decrease of the residual norm predicted by the linear model at a full step.
  double predicted_decrease = 0.0;
};

/// Newton direction J(u) d = -R(u); zero on constrained entries.
inline NewtonStep newton_step(const DiscreteProblem& problem, const Vector& u, const Vector& residual) {
  NewtonStep step;
  step.direction = -detail::solve_linear(problem.jacobian(u), residual);
  step.predicted_decrease = residual.norm();
  return step;
}

inline NewtonStep newton_step(const DiscreteProblem& problem, const Vector& u) {
  return newton_step(problem, u, problem.residual(u));
}

/// Damped Newton with Armijo backtracking on the residual norm. When backtracking fails,
/// a frozen-coefficient (Picard) direction is tried, and as a last resort an Armijo step
/// on the convex discrete energy along the Newton direction.
/// Throws SolveError on non-convergence or a singular linear system.
inline Solution solve(const DiscreteProblem& problem, const SolveOptions& opts = {}) {
  opts.validate();
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport rep;

  Vector u;
  switch (opts.initial_guess) {
    case InitialGuess::automatic: u = linear_lifting(problem); break;
    case InitialGuess::zero: u = problem.project_feasible(Vector::Zero(problem.size())); break;
    case InitialGuess::prescribed:
      if (opts.start.size() != problem.size()) throw std::invalid_argument("solver: start field has wrong size");
      u = problem.project_feasible(opts.start);
      break;
  }

  auto finish = [&](bool ok, Termination why) {
    rep.converged = ok;
    rep.termination = why;
    rep.final_residual = rep.residual_history.back();
    rep.energy = rep.energy_history.back();
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  Vector r = problem.residual(u);
  double rnorm = r.norm();
  rep.residual_history.push_back(rnorm);
  rep.energy_history.push_back(problem.energy(u));

  try {
    while (true) {
      if (rnorm <= opts.tolerance) {
        finish(true, Termination::residual);
        break;
      }
      if (rep.iterations >= opts.max_iterations) {
        finish(false, Termination::iteration_limit);
        break;
      }

      const SparseMatrix J = problem.jacobian(u);
      // Componentwise floor eps |J| |u|: perturbing u by one ulp moves R this much, which
      // matters for stiff boundary laws at large alpha.
      const double floor = std::numeric_limits<double>::epsilon() * (J.cwiseAbs() * u.cwiseAbs()).norm();
      if (rnorm <= floor) {
        finish(true, Termination::stagnation);
        break;
      }
      NewtonStep step;
      step.direction = -detail::solve_linear(J, r);
      step.predicted_decrease = rnorm;
      const double unorm = std::max(1.0, u.lpNorm<Eigen::Infinity>());
      if (step.direction.lpNorm<Eigen::Infinity>() <= opts.step_tolerance * unorm) {
        finish(true, Termination::stagnation);
        break;
      }

      auto backtrack = [&](const Vector& d, Vector& u_new, Vector& r_new, double& t) {
        t = 1.0;
        for (int h = 0; h <= opts.max_halvings; ++h, t *= 0.5) {
          u_new = u + t * d;
          r_new = problem.residual(u_new);
          const double nn = r_new.norm();
          if (std::isfinite(nn) && nn <= (1.0 - opts.armijo * t) * rnorm) return true;
        }
        return false;
      };

      Vector u_new, r_new;
      double t = 1.0;
      StepKind kind = StepKind::newton;
      bool accepted = backtrack(step.direction, u_new, r_new, t);
      if (!accepted && opts.picard_fallback) {
        const Vector d = -detail::solve_linear(problem.picard_matrix(u), r);
        kind = StepKind::picard;
        accepted = backtrack(d, u_new, r_new, t);
        if (!accepted) {
          // Energy descent: R is the energy gradient, so R . d < 0 for the Newton direction
          // when J is positive definite. Near-degenerate J (vanishing gradients with p, q > 2)
          // gives huge directions, so the first trial step is capped at max(1, |u|_inf); the
          // steepest descent direction -R is the last resort.
          // Accepted steps lower the energy but may raise |R|.
          const double e0 = rep.energy_history.back();
          kind = StepKind::energy;
          for (int which = 0; which < 2 && !accepted; ++which) {
            const Vector d = which == 0 ? step.direction : Vector(-r);
            const double slope = r.dot(d);
            const double dmax = d.lpNorm<Eigen::Infinity>();
            if (!(slope < 0.0) || !(dmax > 0.0)) continue;
            t = std::min(1.0, unorm / dmax);
            for (int h = 0; h <= 2 * opts.max_halvings; ++h, t *= 0.5) {
              u_new = u + t * d;
              const double e = problem.energy(u_new);
              if (std::isfinite(e) && e <= e0 + opts.armijo * t * slope) {
                r_new = problem.residual(u_new);
                accepted = true;
                break;
              }
            }
          }
        }
      }
      if (!accepted) {
        finish(false, Termination::line_search);
        break;
      }
      u = std::move(u_new);
      r = std::move(r_new);
      rnorm = r.norm();
      ++rep.iterations;
      rep.steps.push_back(kind);
      rep.step_lengths.push_back(t);
      rep.residual_history.push_back(rnorm);
      rep.energy_history.push_back(problem.energy(u));
    }
  } catch (const std::runtime_error& err) {
    finish(false, Termination::line_search);
    throw SolveError(std::string("solver: ") + err.what(), rep);
  }

  if (!rep.converged) {
    throw SolveError(std::string("solver: no convergence (") + to_string(rep.termination) + ") after " +
                         std::to_string(rep.iterations) + " iterations, residual " +
                         std::to_string(rep.final_residual),
                     rep);
  }
  return {Field{std::move(u), problem.kind()}, std::move(rep)};
}

inline Solution solve_dnn(const PdeParams& params, const SourceData& data, const BoundaryLaw& law, const Mesh& mesh,
                          const SolveOptions& opts = {}) {
  return solve(DiscreteProblem(mesh, params, data, law, ProblemKind::dnn), opts);
}

inline Solution solve_dnd(const PdeParams& params, const SourceData& data, const Mesh& mesh,
                          const SolveOptions& opts = {}, std::optional<BoundaryLaw> law = std::nullopt) {
  return solve(DiscreteProblem(mesh, params, data, std::move(law), ProblemKind::dnd), opts);
}

}  // namespace pqlap
