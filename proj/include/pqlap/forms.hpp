#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pqlap/boundary_law.hpp"
#include "pqlap/mesh.hpp"
#include "pqlap/params.hpp"

namespace pqlap {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Nodal P1 coefficients of a discrete solution or test function.
struct Field {
  Vector values;
  ProblemKind kind = ProblemKind::dnn;
};

namespace quad {

// 3-point interior rule, exact for quadratics; weights are 1/3 of the area each.
inline constexpr std::array<std::array<double, 3>, 3> triangle_points = {{
    {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
    {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
    {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0},
}};
inline constexpr double triangle_weight = 1.0 / 3.0;

// 2-point Gauss on [0,1], weights 1/2 each.
inline const std::array<double, 2> edge_points = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
inline constexpr double edge_weight = 0.5;

}  // namespace quad

namespace detail {

inline void check_size(const Mesh& mesh, Eigen::Index n, const char* what) {
  if (n != static_cast<Eigen::Index>(mesh.num_nodes()))
    throw std::invalid_argument(std::string(what) + ": field size does not match mesh node count");
}

inline std::array<double, 2> gradient(const Mesh& mesh, std::size_t t, const Vector& u) {
  const auto& tri = mesh.triangles()[t];
  std::array<double, 2> g{0.0, 0.0};
  for (int k = 0; k < 3; ++k) {
    const auto& dphi = mesh.basis_gradient(t, k);
    const double uk = u[static_cast<Eigen::Index>(tri[k])];
    g[0] += uk * dphi[0];
    g[1] += uk * dphi[1];
  }
  return g;
}

inline double at_point(const Triangle& tri, const std::array<double, 3>& lam, const Vector& u) {
  return lam[0] * u[static_cast<Eigen::Index>(tri[0])] + lam[1] * u[static_cast<Eigen::Index>(tri[1])] +
         lam[2] * u[static_cast<Eigen::Index>(tri[2])];
}

/// Diffusion weight w(s2) = (s2 + eps^2)^{(r-2)/2} so that the flux is w * grad u.
/// With eps = 0 and a vanishing gradient the flux is zero, so the weight is reported as 0.
inline double diffusion_weight(double s2, double r, double eps) {
  const double z = s2 + eps * eps;
  if (z == 0.0) return r == 2.0 ? 1.0 : 0.0;
  return std::pow(z, 0.5 * (r - 2.0));
}

/// d w / d s2.
inline double diffusion_weight_slope(double s2, double r, double eps) {
  const double z = s2 + eps * eps;
  if (r == 2.0) return 0.0;
  return 0.5 * (r - 2.0) * std::pow(z, 0.5 * (r - 4.0));
}

/// Energy density ((s2 + eps^2)^{r/2} - eps^r) / r.
inline double diffusion_energy(double s2, double r, double eps) {
  return (std::pow(s2 + eps * eps, 0.5 * r) - std::pow(eps, r)) / r;
}

/// Absorption kernel |u|^{theta-2} u, regularized by eps for theta < 2.
struct Absorption {
  double theta;
  double eps;

  bool regularized() const { return theta < 2.0 && eps > 0.0; }

  double value(double u) const {
    if (regularized()) return std::pow(u * u + eps * eps, 0.5 * (theta - 2.0)) * u;
    if (u == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(u), theta - 1.0), u);
  }
  double derivative(double u) const {
    if (regularized()) {
      const double z = u * u + eps * eps;
      return std::pow(z, 0.5 * (theta - 4.0)) * ((theta - 1.0) * u * u + eps * eps);
    }
    if (u == 0.0) return theta == 2.0 ? 1.0 : (theta > 2.0 ? 0.0 : HUGE_VAL);
    return (theta - 1.0) * std::pow(std::abs(u), theta - 2.0);
  }
  double primitive(double u) const {
    if (regularized()) return (std::pow(u * u + eps * eps, 0.5 * theta) - std::pow(eps, theta)) / theta;
    return std::pow(std::abs(u), theta) / theta;
  }
};

template <class F>
void for_each_edge_point(const Mesh& mesh, BoundaryPart part, F&& f) {
  const auto& edges = mesh.boundary_edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].part != part) continue;
    const double len = mesh.edge_length(e);
    for (double s : quad::edge_points) f(edges[e].nodes[0], edges[e].nodes[1], 1.0 - s, s, quad::edge_weight * len);
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Operator actions as dual vectors (entry i = <Op u, phi_i>).

/// <A u, phi_i> split into the p-part and the mu-weighted q-part.
struct OperatorParts {
  Vector p_part;
  Vector q_part;
};

inline OperatorParts assemble_A_parts(const Vector& u, const PdeParams& params, const Mesh& mesh) {
  detail::check_size(mesh, u.size(), "apply_A");
  OperatorParts out{Vector::Zero(u.size()), Vector::Zero(u.size())};
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto g = detail::gradient(mesh, t, u);
    const double s2 = g[0] * g[0] + g[1] * g[1];
    const double wp = detail::diffusion_weight(s2, params.p, params.epsilon) * mesh.area(t);
    const double wq = params.mu * detail::diffusion_weight(s2, params.q, params.epsilon) * mesh.area(t);
    const auto& tri = mesh.triangles()[t];
    for (int k = 0; k < 3; ++k) {
      const auto& dphi = mesh.basis_gradient(t, k);
      const double dot = g[0] * dphi[0] + g[1] * dphi[1];
      out.p_part[static_cast<Eigen::Index>(tri[k])] += wp * dot;
      out.q_part[static_cast<Eigen::Index>(tri[k])] += wq * dot;
    }
  }
  return out;
}

inline Vector assemble_A(const Vector& u, const PdeParams& params, const Mesh& mesh) {
  auto parts = assemble_A_parts(u, params, mesh);
  return parts.p_part + parts.q_part;
}

inline Vector assemble_B(const Vector& u, const PdeParams& params, const Mesh& mesh) {
  detail::check_size(mesh, u.size(), "apply_B");
  Vector out = Vector::Zero(u.size());
  if (params.beta == 0.0) return out;
  const detail::Absorption kern{params.theta, params.epsilon};
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const double w = quad::triangle_weight * mesh.area(t) * params.beta;
    for (const auto& lam : quad::triangle_points) {
      const double val = w * kern.value(detail::at_point(tri, lam, u));
      for (int k = 0; k < 3; ++k) out[static_cast<Eigen::Index>(tri[k])] += val * lam[k];
    }
  }
  return out;
}

inline Vector assemble_L(const Vector& u, const BoundaryLaw& law, const Mesh& mesh, double eps = 0.0) {
  detail::check_size(mesh, u.size(), "apply_L");
  if (mesh.count_edges(BoundaryPart::gamma3) == 0) throw std::invalid_argument("apply_L: mesh has no Gamma3 edges");
  if (law.omega().size() != u.size()) throw std::invalid_argument("apply_L: law weight size does not match mesh");
  Vector out = Vector::Zero(u.size());
  const auto& omega = law.omega();
  detail::for_each_edge_point(mesh, BoundaryPart::gamma3, [&](std::size_t a, std::size_t b, double la, double lb,
                                                              double w) {
    const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
    const double s = la * u[ia] + lb * u[ib];
    const double val = w * law.value(la * omega[ia] + lb * omega[ib], s, eps);
    out[ia] += val * la;
    out[ib] += val * lb;
  });
  return out;
}

inline double apply_A(const Vector& u, const Vector& v, const PdeParams& params, const Mesh& mesh) {
  detail::check_size(mesh, v.size(), "apply_A");
  return assemble_A(u, params, mesh).dot(v);
}

inline double apply_B(const Vector& u, const Vector& v, const PdeParams& params, const Mesh& mesh) {
  detail::check_size(mesh, v.size(), "apply_B");
  return assemble_B(u, params, mesh).dot(v);
}

inline double apply_L(const Vector& u, const Vector& v, const BoundaryLaw& law, const Mesh& mesh, double eps = 0.0) {
  detail::check_size(mesh, v.size(), "apply_L");
  return assemble_L(u, law, mesh, eps).dot(v);
}

/// F with F . v = int g v dx - int_{Gamma2} r v dGamma for nodal v.
inline Vector assemble_load(const SourceData& data, const Mesh& mesh) {
  data.check(mesh);
  Vector out = Vector::Zero(static_cast<Eigen::Index>(mesh.num_nodes()));
  const bool has_element = data.g_element.size() > 0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const double w = quad::triangle_weight * mesh.area(t);
    for (const auto& lam : quad::triangle_points) {
      double gval = detail::at_point(tri, lam, data.g);
      if (has_element) gval += data.g_element[static_cast<Eigen::Index>(t)];
      for (int k = 0; k < 3; ++k) out[static_cast<Eigen::Index>(tri[k])] += w * gval * lam[k];
    }
  }
  detail::for_each_edge_point(mesh, BoundaryPart::gamma2, [&](std::size_t a, std::size_t b, double la, double lb,
                                                              double w) {
    const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
    const double r = la * data.r[ia] + lb * data.r[ib];
    out[ia] -= w * r * la;
    out[ib] -= w * r * lb;
  });
  return out;
}

/// P1 Laplace stiffness matrix, no constraints applied.
inline SparseMatrix stiffness_matrix(const Mesh& mesh) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    for (int i = 0; i < 3; ++i) {
      const auto& gi = mesh.basis_gradient(t, i);
      for (int j = 0; j < 3; ++j) {
        const auto& gj = mesh.basis_gradient(t, j);
        trip.emplace_back(static_cast<int>(tri[i]), static_cast<int>(tri[j]),
                          mesh.area(t) * (gi[0] * gj[0] + gi[1] * gj[1]));
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(mesh.num_nodes());
  SparseMatrix K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

// ---------------------------------------------------------------------------
// Norms.

/// (int |grad u|^r dx)^{1/r}; P1 gradients make this exact. With r = p this is the V-norm.
inline double gradient_norm(const Vector& u, double r, const Mesh& mesh) {
  detail::check_size(mesh, u.size(), "gradient_norm");
  double acc = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto g = detail::gradient(mesh, t, u);
    acc += mesh.area(t) * std::pow(std::hypot(g[0], g[1]), r);
  }
  return std::pow(acc, 1.0 / r);
}

inline double norm_V(const Vector& u, double p, const Mesh& mesh) { return gradient_norm(u, p, mesh); }

/// L^p norm on Omega by the 3-point rule applied to |u_h|^p.
inline double norm_Lp(const Vector& u, double p, const Mesh& mesh) {
  detail::check_size(mesh, u.size(), "norm_Lp");
  double acc = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    for (const auto& lam : quad::triangle_points)
      acc += quad::triangle_weight * mesh.area(t) * std::pow(std::abs(detail::at_point(tri, lam, u)), p);
  }
  return std::pow(acc, 1.0 / p);
}

/// L^p norm over one boundary part by 2-point Gauss per edge.
inline double boundary_norm_Lp(const Vector& u, double p, const Mesh& mesh, BoundaryPart part) {
  detail::check_size(mesh, u.size(), "boundary_norm_Lp");
  double acc = 0.0;
  detail::for_each_edge_point(mesh, part, [&](std::size_t a, std::size_t b, double la, double lb, double w) {
    acc += w * std::pow(std::abs(la * u[static_cast<Eigen::Index>(a)] + lb * u[static_cast<Eigen::Index>(b)]), p);
  });
  return std::pow(acc, 1.0 / p);
}

// ---------------------------------------------------------------------------
// Discrete operator equation  A u + B u (+ alpha L u) = f  with Dirichlet elimination.

/// Discrete DND or DNN problem on a fixed mesh. Holds a reference to the mesh,
/// which must outlive it.
class DiscreteProblem {
 public:
  /// Tag: build a DNN problem with alpha = 0, whose residual drops the boundary term.
  struct AllowZeroAlpha {};
  static constexpr AllowZeroAlpha allow_zero_alpha{};

  DiscreteProblem(const Mesh& mesh, PdeParams params, SourceData data, std::optional<BoundaryLaw> law,
                  ProblemKind kind)
      : DiscreteProblem(mesh, params, std::move(data), std::move(law), kind, false) {}
  DiscreteProblem(const Mesh& mesh, PdeParams params, SourceData data, std::optional<BoundaryLaw> law,
                  ProblemKind kind, AllowZeroAlpha)
      : DiscreteProblem(mesh, params, std::move(data), std::move(law), kind, true) {}

 private:
  DiscreteProblem(const Mesh& mesh, PdeParams params, SourceData data, std::optional<BoundaryLaw> law,
                  ProblemKind kind, bool zero_alpha_ok)
      : mesh_(&mesh), params_(params), data_(std::move(data)), law_(std::move(law)), kind_(kind) {
    params_.validate(kind_, zero_alpha_ok);
    data_.check(mesh);
    if (kind_ == ProblemKind::dnn && !law_) throw std::invalid_argument("DNN problem requires a boundary law");
    if (law_ && law_->omega().size() != static_cast<Eigen::Index>(mesh.num_nodes()))
      throw std::invalid_argument("boundary law weight size does not match mesh");
    dirichlet_ = make_dirichlet_spec(mesh, kind_, params_.b);
    load_ = assemble_load(data_, mesh);
  }

 public:
  const Mesh& mesh() const { return *mesh_; }
  const PdeParams& params() const { return params_; }
  const SourceData& data() const { return data_; }
  const std::optional<BoundaryLaw>& law() const { return law_; }
  ProblemKind kind() const { return kind_; }
  const DirichletSpec& dirichlet() const { return dirichlet_; }
  const Vector& load() const { return load_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(mesh_->num_nodes()); }

  bool uses_boundary_law() const { return kind_ == ProblemKind::dnn && params_.alpha != 0.0; }

  /// Throws std::invalid_argument when u violates the Dirichlet values.
  void check_feasible(const Vector& u) const {
    detail::check_size(*mesh_, u.size(), "residual");
    const double tol = 1e-12 * std::max(1.0, std::abs(params_.b));
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      const auto k = static_cast<std::size_t>(i);
      if (dirichlet_.is_constrained(k) && std::abs(u[i] - dirichlet_.values[k]) > tol)
        throw std::invalid_argument("infeasible field: Dirichlet value violated at node " + std::to_string(i));
    }
  }

  /// Copy of u with the Dirichlet values imposed.
  Vector project_feasible(Vector u) const {
    for (Eigen::Index i = 0; i < u.size(); ++i)
      if (dirichlet_.is_constrained(static_cast<std::size_t>(i))) u[i] = dirichlet_.values[static_cast<std::size_t>(i)];
    return u;
  }

  /// Residual dual vector; constrained entries are zero.
  Vector residual(const Vector& u) const {
    check_feasible(u);
    Vector r = assemble_A(u, params_, *mesh_) + assemble_B(u, params_, *mesh_) - load_;
    if (uses_boundary_law()) r += params_.alpha * assemble_L(u, *law_, *mesh_, params_.epsilon);
    zero_constrained(r);
    return r;
  }

  /// Discrete energy whose gradient (over free nodes) is the residual.
  double energy(const Vector& u) const {
    detail::check_size(*mesh_, u.size(), "energy");
    const auto& m = *mesh_;
    double e = 0.0;
    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
      const auto g = detail::gradient(m, t, u);
      const double s2 = g[0] * g[0] + g[1] * g[1];
      e += m.area(t) * (detail::diffusion_energy(s2, params_.p, params_.epsilon) +
                        params_.mu * detail::diffusion_energy(s2, params_.q, params_.epsilon));
    }
    if (params_.beta != 0.0) {
      const detail::Absorption kern{params_.theta, params_.epsilon};
      for (std::size_t t = 0; t < m.num_triangles(); ++t) {
        const auto& tri = m.triangles()[t];
        for (const auto& lam : quad::triangle_points)
          e += params_.beta * quad::triangle_weight * m.area(t) * kern.primitive(detail::at_point(tri, lam, u));
      }
    }
    if (uses_boundary_law()) {
      const auto& omega = law_->omega();
      detail::for_each_edge_point(m, BoundaryPart::gamma3, [&](std::size_t a, std::size_t b, double la, double lb,
                                                               double w) {
        const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
        e += params_.alpha * w *
             law_->primitive(la * omega[ia] + lb * omega[ib], la * u[ia] + lb * u[ib], params_.epsilon);
      });
    }
    return e - load_.dot(u);
  }

  /// Gateaux derivative of the residual. Constrained rows and columns are replaced by identity.
  SparseMatrix jacobian(const Vector& u) const { return assemble_matrix(u, false); }

  /// Frozen-coefficient (Picard) matrix: the diffusion weights, absorption and boundary
  /// law secants are evaluated at u and the remaining nonlinearity is dropped.
  SparseMatrix picard_matrix(const Vector& u) const { return assemble_matrix(u, true); }

 private:
  void zero_constrained(Vector& r) const {
    for (Eigen::Index i = 0; i < r.size(); ++i)
      if (dirichlet_.is_constrained(static_cast<std::size_t>(i))) r[i] = 0.0;
  }

  SparseMatrix assemble_matrix(const Vector& u, bool frozen) const {
    detail::check_size(*mesh_, u.size(), "jacobian");
    const auto& m = *mesh_;
    const double eps = params_.epsilon;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(9 * m.num_triangles() * (params_.beta != 0.0 ? 2 : 1) + 8 * m.boundary_edges().size() +
                 m.num_nodes());
    auto add = [&](std::size_t i, std::size_t j, double v) {
      if (dirichlet_.is_constrained(i) || dirichlet_.is_constrained(j)) return;
      trip.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
    };

    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
      const auto g = detail::gradient(m, t, u);
      const double s2 = g[0] * g[0] + g[1] * g[1];
      if (eps == 0.0 && s2 == 0.0 && (params_.p < 2.0 || params_.q < 2.0))
        throw std::domain_error("jacobian: singular kernel on a zero-gradient triangle with epsilon = 0 (p or q < 2); "
                                "use epsilon > 0");
      const double w = detail::diffusion_weight(s2, params_.p, eps) +
                       params_.mu * detail::diffusion_weight(s2, params_.q, eps);
      const double dw = (frozen || s2 == 0.0) ? 0.0
                                              : detail::diffusion_weight_slope(s2, params_.p, eps) +
                                     params_.mu * detail::diffusion_weight_slope(s2, params_.q, eps);
      // D(flux) = w I + 2 dw g g^T
      const double d00 = w + 2.0 * dw * g[0] * g[0];
      const double d01 = 2.0 * dw * g[0] * g[1];
      const double d11 = w + 2.0 * dw * g[1] * g[1];
      const auto& tri = m.triangles()[t];
      for (int i = 0; i < 3; ++i) {
        const auto& gi = m.basis_gradient(t, i);
        for (int j = 0; j < 3; ++j) {
          const auto& gj = m.basis_gradient(t, j);
          const double val = gi[0] * (d00 * gj[0] + d01 * gj[1]) + gi[1] * (d01 * gj[0] + d11 * gj[1]);
          add(tri[i], tri[j], m.area(t) * val);
        }
      }
    }

    if (params_.beta != 0.0) {
      const detail::Absorption kern{params_.theta, eps};
      for (std::size_t t = 0; t < m.num_triangles(); ++t) {
        const auto& tri = m.triangles()[t];
        for (const auto& lam : quad::triangle_points) {
          const double uq = detail::at_point(tri, lam, u);
          double d;
          if (frozen) {
            d = uq == 0.0 ? kern.derivative(uq) : kern.value(uq) / uq;
          } else {
            d = kern.derivative(uq);
          }
          if (!std::isfinite(d))
            throw std::domain_error("jacobian: singular absorption kernel (theta < 2, u = 0, epsilon = 0); use epsilon > 0");
          const double w = params_.beta * quad::triangle_weight * m.area(t) * d;
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) add(tri[i], tri[j], w * lam[i] * lam[j]);
        }
      }
    }

    if (uses_boundary_law()) {
      const auto& omega = law_->omega();
      const double b = law_->level();
      detail::for_each_edge_point(m, BoundaryPart::gamma3, [&](std::size_t a, std::size_t c, double la, double lc,
                                                               double w) {
        const auto ia = static_cast<Eigen::Index>(a), ic = static_cast<Eigen::Index>(c);
        const double om = la * omega[ia] + lc * omega[ic];
        const double s = la * u[ia] + lc * u[ic];
        double d;
        if (frozen && s != b) {
          d = law_->value(om, s, eps) / (s - b);
        } else {
          d = law_->derivative(om, s, eps);
        }
        if (!std::isfinite(d))
          throw std::domain_error("jacobian: singular boundary law at u = b with p < 2 and epsilon = 0; use epsilon > 0");
        const double val = params_.alpha * w * d;
        const double phi[2] = {la, lc};
        const std::size_t idx[2] = {a, c};
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) add(idx[i], idx[j], val * phi[i] * phi[j]);
      });
    }

    for (std::size_t i = 0; i < m.num_nodes(); ++i)
      if (dirichlet_.is_constrained(i)) trip.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);

    SparseMatrix J(size(), size());
    J.setFromTriplets(trip.begin(), trip.end());
    return J;
  }

  const Mesh* mesh_;
  PdeParams params_;
  SourceData data_;
  std::optional<BoundaryLaw> law_;
  ProblemKind kind_;
  DirichletSpec dirichlet_;
  Vector load_;
};

inline Vector residual(const Vector& u, const PdeParams& params, const SourceData& data,
                       const std::optional<BoundaryLaw>& law, const Mesh& mesh, ProblemKind kind) {
  return DiscreteProblem(mesh, params, data, law, kind).residual(u);
}

/// Discrete conormal flux: the unconstrained nodal residual A u + B u - f. At a Gamma3
/// node of a DNN solution it balances -alpha L u; on Gamma1 it is the reaction.
inline Vector conormal_flux(const DiscreteProblem& problem, const Vector& u) {
  const auto& prm = problem.params();
  return assemble_A(u, prm, problem.mesh()) + assemble_B(u, prm, problem.mesh()) - problem.load();
}

inline SparseMatrix jacobian(const Vector& u, const PdeParams& params, const SourceData& data,
                             const std::optional<BoundaryLaw>& law, const Mesh& mesh, ProblemKind kind) {
  return DiscreteProblem(mesh, params, data, law, kind).jacobian(u);
}

// ---------------------------------------------------------------------------
// Diagnostics for the a priori estimates.

/// Right-hand side of ||A u||_{V*} <= ||u||_V^{p-1} + mu ||grad u||_{L^{(q-1)p'}}^{q-1}.
inline double dual_bound_A(const Vector& u, const PdeParams& params, const Mesh& mesh) {
  const double pc = conjugate_exponent(params.p);
  const double r = (params.q - 1.0) * pc;
  return std::pow(norm_V(u, params.p, mesh), params.p - 1.0) +
         params.mu * std::pow(gradient_norm(u, r, mesh), params.q - 1.0);
}

struct CoercivityCheck {
  double pairing = 0.0;  // <A u + B u + alpha L u, u>
  double bound = 0.0;    // assembled lower bound
  bool holds() const { return pairing >= bound; }
};

/// Coercivity estimate for A + B + alpha L, evaluated without gradient regularization:
///   <Au + Bu + alpha Lu, u> >= ||u||_V^p + mu ||grad u||_q^q + beta ||u||_theta^theta
///       - alpha b a_l |G3| - alpha b_l b |G3| - delta alpha ||u||_{L^p(G3)}^p - alpha c(delta) |G3|
/// where c(delta) = sup_t (b b_l t^{p-1} - delta t^p) comes from Young's inequality.
inline CoercivityCheck coercivity_check(const Vector& u, PdeParams params, const BoundaryLaw& law,
                                        const Mesh& mesh, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("coercivity_check: Young parameter must be > 0");
  params.epsilon = 0.0;
  const double p = params.p;
  const double b = law.level();
  CoercivityCheck out;
  out.pairing = (assemble_A(u, params, mesh) + assemble_B(u, params, mesh) +
                 params.alpha * assemble_L(u, law, mesh, 0.0))
                    .dot(u);

  const auto growth = law.growth();
  const double g3 = mesh.boundary_length(BoundaryPart::gamma3);
  const double k = b * growth.b_l;
  const double young = k > 0.0 ? std::pow(k * (p - 1.0) / (delta * p), p - 1.0) * k / p : 0.0;
  const double lb = std::pow(norm_V(u, p, mesh), p) + params.mu * std::pow(gradient_norm(u, params.q, mesh), params.q) +
                    (params.beta > 0.0 ? params.beta * std::pow(norm_Lp(u, params.theta, mesh), params.theta) : 0.0);
  out.bound = lb - params.alpha * b * growth.a_l * g3 - params.alpha * growth.b_l * b * g3 -
              delta * params.alpha * std::pow(boundary_norm_Lp(u, p, mesh, BoundaryPart::gamma3), p) -
              params.alpha * young * g3;
  return out;
}

}  // namespace pqlap
