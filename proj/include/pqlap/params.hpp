#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "pqlap/mesh.hpp"

namespace pqlap {

/// Sobolev critical exponent: N p / (N - p) for p < N, +inf otherwise.
inline double critical_exponent(double p, int dim) {
  if (p < static_cast<double>(dim)) return dim * p / (dim - p);
  return std::numeric_limits<double>::infinity();
}

/// Hoelder conjugate p' with 1/p + 1/p' = 1.
inline double conjugate_exponent(double p) { return p / (p - 1.0); }

/// Scalar data of the (p,q)-Laplacian boundary value problems.
struct PdeParams {
  double p = 2.0;
  double q = 1.5;
  double theta = 2.0;  // exponent of the absorption term beta |u|^{theta-2} u
  double mu = 1.0;
  double beta = 0.0;
  double alpha = 1.0;  // Robin transfer coefficient, DNN only
  double b = 1.0;      // Dirichlet level on Gamma3
  double epsilon = 1e-8;
  int dim = 2;

  /// Throws std::invalid_argument naming the violated requirement.
  /// beta = 0 and b = 0 are accepted: both are solver-valid limits used by oracles.
  /// With `zero_alpha_ok`, DNN also accepts alpha = 0 (the operator-level limit).
  void validate(ProblemKind kind, bool zero_alpha_ok = false) const {
    if (!(q > 1.0 && q < p && std::isfinite(p)))
      throw std::invalid_argument(fmt("exponents must satisfy 1 < q < p < inf (got p=", p, ", q=", q, ")"));
    if (!(theta > 1.0)) throw std::invalid_argument(fmt("theta must be > 1 (got theta=", theta, ")"));
    const double crit = critical_exponent(p, dim);
    if (!(theta < crit))
      throw std::invalid_argument(fmt("theta must be subcritical, theta < p* = ", crit, " (got theta=", theta, ")"));
    if (!(mu > 0.0)) throw std::invalid_argument(fmt("mu must be > 0 (got mu=", mu, ")"));
    if (!(beta >= 0.0)) throw std::invalid_argument(fmt("beta must be >= 0 (got beta=", beta, ")"));
    if (!(b >= 0.0)) throw std::invalid_argument(fmt("b must be >= 0 (got b=", b, ")"));
    if (!(epsilon >= 0.0)) throw std::invalid_argument(fmt("epsilon must be >= 0 (got epsilon=", epsilon, ")"));
    if (kind == ProblemKind::dnn && !(alpha > 0.0) && !(zero_alpha_ok && alpha == 0.0))
      throw std::invalid_argument(fmt("alpha must be > 0 for the DNN problem (got alpha=", alpha, ")"));
  }

 private:
  template <class... Args>
  static std::string fmt(const Args&... args) {
    std::ostringstream os;
    (os << ... << args);
    return os.str();
  }
};

/// Volume source g and Gamma2 flux r. `g` and `r` are nodal P1 values; the optional
/// `g_element` adds a triangle-wise constant source (used for piecewise constant controls).
struct SourceData {
  Eigen::VectorXd g;
  Eigen::VectorXd r;
  Eigen::VectorXd g_element;

  static SourceData zero(const Mesh& mesh) {
    return {Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_nodes())),
            Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_nodes())), Eigen::VectorXd()};
  }

  void check(const Mesh& mesh) const {
    const auto nn = static_cast<Eigen::Index>(mesh.num_nodes());
    if (g.size() != nn || r.size() != nn) throw std::invalid_argument("source data: nodal size mismatch with mesh");
    if (g_element.size() != 0 && g_element.size() != static_cast<Eigen::Index>(mesh.num_triangles()))
      throw std::invalid_argument("source data: element source size mismatch with mesh");
  }
};

/// Sign hypotheses g <= 0, r >= 0 on Gamma2, b > 0 under which the comparison results hold.
inline bool satisfies_h0(const SourceData& data, const Mesh& mesh, double b) {
  if (!(b > 0.0)) return false;
  if (data.g.size() > 0 && data.g.maxCoeff() > 0.0) return false;
  if (data.g_element.size() > 0 && data.g_element.maxCoeff() > 0.0) return false;
  for (auto i : mesh.boundary_nodes(BoundaryPart::gamma2))
    if (data.r[static_cast<Eigen::Index>(i)] < 0.0) return false;
  return true;
}

}  // namespace pqlap
