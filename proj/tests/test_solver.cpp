#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "pqlap/solver.hpp"

using namespace pqlap;

namespace {

PdeParams manufactured(double p, double q, double mu, double alpha = 1.0, double b = 1.0) {
  PdeParams prm;
  prm.p = p;
  prm.q = q;
  prm.mu = mu;
  prm.beta = 0.0;
  prm.alpha = alpha;
  prm.b = b;
  return prm;
}

double max_nodal_error(const Mesh& m, const Vector& u, double slope) {
  double e = 0.0;
  for (std::size_t i = 0; i < m.num_nodes(); ++i)
    e = std::max(e, std::abs(u[static_cast<Eigen::Index>(i)] - slope * m.nodes()[i].x));
  return e;
}

// Value of the P1 field u (on mesh m) at point (x, y), by barycentric search.
double evaluate(const Mesh& m, const Vector& u, double x, double y) {
  for (const auto& t : m.triangles()) {
    const auto& a = m.nodes()[t[0]];
    const auto& b = m.nodes()[t[1]];
    const auto& c = m.nodes()[t[2]];
    const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    const double l1 = ((x - a.x) * (c.y - a.y) - (c.x - a.x) * (y - a.y)) / det;
    const double l2 = ((b.x - a.x) * (y - a.y) - (x - a.x) * (b.y - a.y)) / det;
    const double l0 = 1.0 - l1 - l2;
    if (l0 >= -1e-12 && l1 >= -1e-12 && l2 >= -1e-12)
      return l0 * u[static_cast<Eigen::Index>(t[0])] + l1 * u[static_cast<Eigen::Index>(t[1])] +
             l2 * u[static_cast<Eigen::Index>(t[2])];
  }
  throw std::out_of_range("point outside mesh");
}

Vector prolong(const Mesh& coarse, const Vector& u, const Mesh& fine) {
  Vector out(static_cast<Eigen::Index>(fine.num_nodes()));
  for (std::size_t i = 0; i < fine.num_nodes(); ++i)
    out[static_cast<Eigen::Index>(i)] = evaluate(coarse, u, fine.nodes()[i].x, fine.nodes()[i].y);
  return out;
}

}  // namespace

TEST(SolveDnd, LinearSolutionIsNodalExact) {
  const Mesh m = build_unit_square_mesh(8);
  for (auto [p, q, mu] : {std::tuple{3.0, 2.0, 1.0}, {2.0, 1.5, 1.0}, {1.8, 1.2, 0.3}, {4.0, 3.5, 2.0}}) {
    const auto sol = solve_dnd(manufactured(p, q, mu), SourceData::zero(m), m);
    EXPECT_TRUE(sol.report.converged);
    EXPECT_LT(max_nodal_error(m, sol.field.values, 1.0), 1e-12) << "p=" << p << " q=" << q;
  }
}

TEST(SolveDnd, ZeroLevelGivesZero) {
  const Mesh m = build_unit_square_mesh(6);
  const auto sol = solve_dnd(manufactured(2.5, 1.5, 1.0, 1.0, 0.0), SourceData::zero(m), m);
  EXPECT_EQ(sol.field.values.lpNorm<Eigen::Infinity>(), 0.0);
}

TEST(SolveDnn, ManufacturedSlopeAlphaOne) {
  const Mesh m = build_unit_square_mesh(8);
  const PdeParams prm = manufactured(2.0, 1.5, 1.0, 1.0);
  const auto law = BoundaryLaw::power(1.0, m.num_nodes(), prm.p, prm.b);
  const auto sol = solve_dnn(prm, SourceData::zero(m), law, m);
  EXPECT_NEAR(oracle::dnn_slope(2.0, 1.5, 1.0, 1.0, 1.0, 1.0), 0.25, 1e-13);
  EXPECT_LT(max_nodal_error(m, sol.field.values, 0.25), 1e-9);
}

TEST(SolveDnn, ManufacturedSlopeAlphaFour) {
  const Mesh m = build_unit_square_mesh(8);
  const PdeParams prm = manufactured(2.0, 1.5, 1.0, 4.0);
  const auto law = BoundaryLaw::power(1.0, m.num_nodes(), prm.p, prm.b);
  const auto sol = solve_dnn(prm, SourceData::zero(m), law, m);
  // flux balance m + sqrt(m) = 4 (1 - m); its root is 0.64 (sqrt(m) = 0.8)
  const double slope = oracle::dnn_slope(2.0, 1.5, 1.0, 4.0, 1.0, 1.0);
  EXPECT_NEAR(slope, 0.64, 1e-13);
  EXPECT_LT(max_nodal_error(m, sol.field.values, slope), 1e-9);
}

TEST(SolveDnn, ManufacturedSlopeGeneralExponents) {
  const Mesh m = build_unit_square_mesh(6);
  for (auto [p, q, mu, alpha] : {std::tuple{3.0, 2.0, 0.5, 2.0}, {1.6, 1.3, 1.0, 10.0}, {2.5, 1.5, 2.0, 0.3}}) {
    const PdeParams prm = manufactured(p, q, mu, alpha);
    const auto law = BoundaryLaw::power(1.0, m.num_nodes(), p, prm.b);
    SolveOptions opts;
    opts.max_iterations = 100;
    const auto sol = solve_dnn(prm, SourceData::zero(m), law, m, opts);
    const double slope = oracle::dnn_slope(p, q, mu, alpha, 1.0, 1.0);
    EXPECT_LT(max_nodal_error(m, sol.field.values, slope), 1e-8) << "p=" << p << " alpha=" << alpha;
  }
}

TEST(SolveDnn, BoundedByLevelUnderSignConditions) {
  const Mesh m = build_unit_square_mesh(10);
  PdeParams prm = manufactured(2.6, 1.7, 0.8, 3.0, 1.3);
  prm.beta = 0.5;
  prm.theta = 2.2;
  SourceData d = SourceData::zero(m);
  for (std::size_t i = 0; i < m.num_nodes(); ++i) {
    const auto& x = m.nodes()[i];
    d.g[static_cast<Eigen::Index>(i)] = -2.0 * (1.0 + std::sin(3.0 * x.x) * std::cos(2.0 * x.y));
    d.r[static_cast<Eigen::Index>(i)] = 0.5 * x.x;
  }
  ASSERT_TRUE(satisfies_h0(d, m, prm.b));
  const auto law = BoundaryLaw::power(1.0, m.num_nodes(), prm.p, prm.b);
  const auto ua = solve_dnn(prm, d, law, m).field.values;
  const auto ui = solve_dnd(prm, d, m).field.values;
  EXPECT_LE(ua.maxCoeff(), prm.b + 1e-9);
  EXPECT_LE(ui.maxCoeff(), prm.b + 1e-9);
  EXPECT_LE((ua - ui).maxCoeff(), 1e-9);
}

TEST(Solver, UniquenessProbe) {
  const Mesh m = build_unit_square_mesh(8);
  PdeParams prm = manufactured(3.0, 1.5, 1.0, 5.0);
  prm.beta = 1.0;
  prm.theta = 2.5;
  SourceData d = SourceData::zero(m);
  d.g.setConstant(-1.0);
  const auto law = BoundaryLaw::power(1.0, m.num_nodes(), prm.p, prm.b);
  for (auto kind : {ProblemKind::dnn, ProblemKind::dnd}) {
    DiscreteProblem pb(m, prm, d, law, kind);
    const Vector ref = solve(pb).field.values;
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    for (int k = 0; k < 5; ++k) {
      SolveOptions opts;
      opts.initial_guess = InitialGuess::prescribed;
      opts.start = Vector(pb.size());
      for (auto& v : opts.start) v = U(rng);
      opts.max_iterations = 200;
      const Vector u = solve(pb, opts).field.values;
      EXPECT_LT(norm_V(Vector(u - ref), prm.p, m), 1e-8);
    }
  }
}

TEST(Solver, QuadraticTail) {
  const Mesh m = build_unit_square_mesh(8);
  PdeParams prm = manufactured(3.0, 2.0, 1.0, 2.0);
  prm.beta = 1.0;
  prm.theta = 2.0;
  prm.epsilon = 1e-3;
  SourceData d = SourceData::zero(m);
  d.g.setConstant(-3.0);
  const auto law = BoundaryLaw::power(1.0, m.num_nodes(), prm.p, prm.b);
  SolveOptions opts;
  opts.tolerance = 1e-13;
  const auto rep = solve_dnn(prm, d, law, m, opts).report;
  const auto& h = rep.residual_history;
  int checked = 0;
  for (std::size_t k = 0; k + 1 < h.size(); ++k) {
    if (h[k] > 1e-3 || h[k + 1] < 1e-13) continue;  // below that is the roundoff floor
    EXPECT_LE(h[k + 1], 10.0 * h[k] * h[k]) << "k=" << k;
    ++checked;
  }
  EXPECT_GE(checked, 1);
}

TEST(Solver, ReportRecordsAcceptedSteps) {
  const Mesh m = build_unit_square_mesh(6);
  PdeParams prm = manufactured(1.5, 1.2, 1.0, 20.0);
  SourceData d = SourceData::zero(m);
  d.g.setConstant(-1.0);
  const auto law = BoundaryLaw::power(1.0, m.num_nodes(), prm.p, prm.b);
  const auto rep = solve_dnn(prm, d, law, m).report;
  ASSERT_EQ(rep.residual_history.size(), static_cast<std::size_t>(rep.iterations) + 1);
  for (std::size_t k = 0; k < rep.steps.size(); ++k)
    if (rep.steps[k] != StepKind::energy) {
      EXPECT_LE(rep.residual_history[k + 1], rep.residual_history[k]);
    }
  std::ostringstream log, rec;
  rep.write_log(log);
  rep.write_records(rec);
  EXPECT_NE(log.str().find("converged yes"), std::string::npos);
  EXPECT_EQ(rec.str().rfind("iteration,residual,energy\n", 0), 0u);
}

TEST(Solver, ExactSolutionGivesNegligibleStep) {
  const Mesh m = build_unit_square_mesh(5);
  DiscreteProblem pb(m, manufactured(3.0, 2.0, 1.0), SourceData::zero(m), std::nullopt, ProblemKind::dnd);
  Vector u(pb.size());
  for (std::size_t i = 0; i < m.num_nodes(); ++i) u[static_cast<Eigen::Index>(i)] = m.nodes()[i].x;
  EXPECT_LE(newton_step(pb, u).direction.norm(), 1e-10);
}

TEST(Solver, NonConvergenceCarriesReport) {
  const Mesh m = build_unit_square_mesh(6);
  SourceData d = SourceData::zero(m);
  d.g.setConstant(-5.0);
  SolveOptions opts;
  opts.max_iterations = 1;
  try {
    solve_dnd(manufactured(3.5, 1.5, 1.0), d, m, opts);
    FAIL() << "expected SolveError";
  } catch (const SolveError& e) {
    EXPECT_FALSE(e.report().converged);
    EXPECT_EQ(e.report().termination, Termination::iteration_limit);
  }
  opts.max_iterations = 0;
  EXPECT_THROW(solve_dnd(manufactured(3.5, 1.5, 1.0), d, m, opts), std::invalid_argument);
}

TEST(Solver, MeshConsistency) {
  PdeParams prm = manufactured(2.5, 1.5, 1.0);
  prm.beta = 1.0;
  auto data = [](const Mesh& m) {
    SourceData d = SourceData::zero(m);
    for (std::size_t i = 0; i < m.num_nodes(); ++i)
      d.g[static_cast<Eigen::Index>(i)] = -4.0 * std::sin(M_PI * m.nodes()[i].y);
    return d;
  };
  std::vector<Mesh> meshes;
  std::vector<Vector> sols;
  for (std::size_t n : {4u, 8u, 16u}) {
    meshes.push_back(build_unit_square_mesh(n));
    sols.push_back(solve_dnd(prm, data(meshes.back()), meshes.back()).field.values);
  }
  const double d1 = norm_V(Vector(prolong(meshes[0], sols[0], meshes[1]) - sols[1]), prm.p, meshes[1]);
  const double d2 = norm_V(Vector(prolong(meshes[1], sols[1], meshes[2]) - sols[2]), prm.p, meshes[2]);
  EXPECT_LT(d2, d1);
}

TEST(Solver, BoundaryFluxMatchesRobinLaw) {
  const Mesh m = build_unit_square_mesh(8);
  PdeParams prm = manufactured(2.4, 1.6, 0.7, 3.0);
  prm.beta = 0.5;
  SourceData d = SourceData::zero(m);
  d.g.setConstant(-1.0);
  const auto law = BoundaryLaw::power(1.0, m.num_nodes(), prm.p, prm.b);
  DiscreteProblem pb(m, prm, d, law, ProblemKind::dnn);
  const Vector u = solve(pb).field.values;
  const Vector flux = conormal_flux(pb, u);
  const Vector robin = -prm.alpha * assemble_L(u, law, m, prm.epsilon);
  for (auto i : m.boundary_nodes(BoundaryPart::gamma3)) {
    if (pb.dirichlet().is_constrained(i)) continue;
    EXPECT_NEAR(flux[static_cast<Eigen::Index>(i)], robin[static_cast<Eigen::Index>(i)], 1e-9);
  }

  // Manufactured case: the exact conormal flux is the constant m^{p-1} + mu m^{q-1}.
  const PdeParams lin = manufactured(2.0, 1.5, 1.0, 1.0);
  const auto law2 = BoundaryLaw::power(1.0, m.num_nodes(), 2.0, 1.0);
  DiscreteProblem pb2(m, lin, SourceData::zero(m), law2, ProblemKind::dnn);
  const Vector u2 = solve(pb2).field.values;
  const Vector f2 = conormal_flux(pb2, u2);
  const double exact = 0.25 + std::sqrt(0.25);
  const double h = 1.0 / 8.0;
  for (auto i : m.boundary_nodes(BoundaryPart::gamma3)) {
    if (pb2.dirichlet().is_constrained(i)) continue;
    const double y = m.nodes()[i].y;
    const double weight = (y == 0.0 || y == 1.0) ? 0.5 * h : h;  // integral of the hat function on the edge
    EXPECT_NEAR(f2[static_cast<Eigen::Index>(i)], exact * weight, 1e-9);
  }
}

TEST(Solver, RegularizationSensitivityIsSmall) {
  const Mesh m = build_unit_square_mesh(8);
  PdeParams prm = manufactured(1.7, 1.3, 1.0, 4.0);
  SourceData d = SourceData::zero(m);
  d.g.setConstant(-1.0);
  const auto law = BoundaryLaw::power(1.0, m.num_nodes(), prm.p, prm.b);
  prm.epsilon = 1e-4;
  const Vector u1 = solve_dnn(prm, d, law, m).field.values;
  prm.epsilon = 1e-5;
  const Vector u2 = solve_dnn(prm, d, law, m).field.values;
  const double diff = norm_V(Vector(u1 - u2), prm.p, m);
  EXPECT_TRUE(std::isfinite(diff));
  EXPECT_LT(diff, 1e-2);
}

TEST(Solver, AutomaticStartIsHarmonicLifting) {
  const Mesh m = build_unit_square_mesh(8);
  PdeParams prm = manufactured(3.0, 2.0, 1.0, 5.0, 1.5);
  for (auto kind : {ProblemKind::dnd, ProblemKind::dnn}) {
    const DiscreteProblem pb(m, prm, SourceData::zero(m), BoundaryLaw::power(1.0, m.num_nodes(), prm.p, prm.b), kind);
    const Vector u0 = linear_lifting(pb);
    for (std::size_t i = 0; i < m.num_nodes(); ++i)
      EXPECT_NEAR(u0[static_cast<Eigen::Index>(i)], 1.5 * m.nodes()[i].x, 1e-12) << to_string(kind);
  }
}

// Both exponents above 2: at a zero start every gradient vanishes and the Jacobian is
// eps-degenerate, so only the capped energy fallback can make the first step.
TEST(Solver, DegenerateExponentsFromZeroStart) {
  const Mesh m = build_unit_square_mesh(16);
  PdeParams prm = manufactured(3.5, 3.3, 1.0);
  prm.beta = 1.6;
  prm.theta = 4.2;
  SourceData d = SourceData::zero(m);
  d.g.setConstant(-1.0);
  d.r.setConstant(0.5);
  SolveOptions o;
  o.initial_guess = InitialGuess::zero;
  const DiscreteProblem pb(m, prm, d, BoundaryLaw::power(1.0, m.num_nodes(), prm.p, prm.b), ProblemKind::dnn);
  const auto sol = solve(pb, o);
  EXPECT_TRUE(sol.report.converged);
  EXPECT_LE(pb.residual(sol.field.values).norm(), o.tolerance);
}

// p < 2 at very large alpha: the law is nearly singular at u = b and the residual cannot
// reach 1e-10 in double precision. The solve stops at the componentwise floor instead.
TEST(Solver, StiffLawStopsAtRoundoffFloor) {
  const Mesh m = build_unit_square_mesh(16);
  PdeParams prm = manufactured(1.4, 1.2, 0.12, 1e6, 1.94);
  prm.beta = 0.64;
  prm.theta = 4.5;
  SourceData d = SourceData::zero(m);
  d.g.setConstant(-1.0);
  d.r.setConstant(0.5);
  const DiscreteProblem pb(m, prm, d, BoundaryLaw::power(1.0, m.num_nodes(), prm.p, prm.b), ProblemKind::dnn);
  const auto sol = solve(pb);
  ASSERT_TRUE(sol.report.converged);
  EXPECT_EQ(sol.report.termination, Termination::stagnation);
  const Vector& u = sol.field.values;
  const double floor = std::numeric_limits<double>::epsilon() * (pb.jacobian(u).cwiseAbs() * u.cwiseAbs()).norm();
  EXPECT_GT(sol.report.final_residual, 1e-10);
  EXPECT_LE(sol.report.final_residual, 10.0 * floor);
  // the field is still the solution to many digits: it sits below b on Gamma3
  for (auto i : m.boundary_nodes(BoundaryPart::gamma3)) EXPECT_LE(u[static_cast<Eigen::Index>(i)], prm.b + 1e-12);
}
