#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pqlap/mesh.hpp"

namespace pqlap {

/// Growth data for |l(x,s)| <= a_l(x) + b_l (1 + |s|^{p-1}), with a_l taken constant.
struct GrowthConstants {
  double a_l = 0.0;
  double b_l = 0.0;
};

/// Monotone boundary law l(x,s) = omega(x) * k(s) on Gamma3 with k(b) = 0.
///
/// Two kernels are supported:
///  - power: k(s) = sgn(s-b) |s-b|^{p-1}. For p < 2 and epsilon > 0 the kernel is
///    regularized to (|s-b|^2 + eps^2)^{(p-2)/2} (s-b), which keeps the zero set and
///    monotonicity while making k' finite at s = b.
///  - tabulated: piecewise linear through (s_i, k_i), constant beyond the table ends.
///    The table must pass through (b, 0), be nondecreasing and change sign only at b.
class BoundaryLaw {
 public:
  enum class Kind { power, tabulated };

  static BoundaryLaw power(Eigen::VectorXd omega, double p, double b) {
    BoundaryLaw law;
    law.kind_ = Kind::power;
    law.omega_ = std::move(omega);
    law.p_ = p;
    law.b_ = b;
    law.check();
    return law;
  }

  static BoundaryLaw power(double omega, std::size_t num_nodes, double p, double b) {
    return power(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(num_nodes), omega), p, b);
  }

  static BoundaryLaw tabulated(Eigen::VectorXd omega, std::vector<std::pair<double, double>> table, double p,
                               double b) {
    BoundaryLaw law;
    law.kind_ = Kind::tabulated;
    law.omega_ = std::move(omega);
    law.table_ = std::move(table);
    law.p_ = p;
    law.b_ = b;
    law.check();
    return law;
  }

  Kind kind() const { return kind_; }
  const Eigen::VectorXd& omega() const { return omega_; }
  double exponent() const { return p_; }
  double level() const { return b_; }
  const std::vector<std::pair<double, double>>& table() const { return table_; }

  /// Law with a different reference level (power kernel only keeps its shape).
  BoundaryLaw with_level(double b) const {
    BoundaryLaw out = *this;
    if (kind_ == Kind::tabulated) {
      for (auto& [s, k] : out.table_) s += b - b_;
    }
    out.b_ = b;
    return out;
  }

  double value(double w, double s, double eps) const { return w * kernel(s, eps); }
  double derivative(double w, double s, double eps) const { return w * kernel_derivative(s, eps); }
  /// Integral of l(x, .) from b to s.
  double primitive(double w, double s, double eps) const { return w * kernel_primitive(s, eps); }

  bool singular_at(double s, double eps) const {
    return kind_ == Kind::power && p_ < 2.0 && eps == 0.0 && s == b_;
  }

  GrowthConstants growth() const {
    const double wmax = omega_.size() ? omega_.maxCoeff() : 0.0;
    if (kind_ == Kind::power) {
      // |s-b|^{p-1} <= c_p (|s|^{p-1} + b^{p-1}) <= c_p max(1, b^{p-1}) (1 + |s|^{p-1})
      const double cp = std::max(1.0, std::pow(2.0, p_ - 2.0));
      return {0.0, wmax * cp * std::max(1.0, std::pow(b_, p_ - 1.0))};
    }
    double kmax = 0.0;
    for (const auto& [s, k] : table_) kmax = std::max(kmax, std::abs(k));
    return {wmax * kmax, 0.0};
  }

  /// Samples the nondecreasing and zero-only-at-b properties on [lo, hi].
  bool sample_hypotheses(double lo, double hi, int samples = 2001) const {
    double prev = -HUGE_VAL;
    for (int i = 0; i < samples; ++i) {
      const double s = lo + (hi - lo) * i / (samples - 1);
      const double k = kernel(s, 0.0);
      if (k < prev) return false;
      if ((k == 0.0) != (s == b_)) return false;
      prev = k;
    }
    return kernel(b_, 0.0) == 0.0;
  }

 private:
  void check() const {
    if (!(p_ > 1.0)) throw std::invalid_argument("boundary law: exponent must be > 1");
    if (omega_.size() > 0 && !(omega_.minCoeff() > 0.0))
      throw std::invalid_argument("boundary law: weight omega must be > 0");
    if (kind_ == Kind::tabulated) {
      if (table_.size() < 2) throw std::invalid_argument("boundary law: table needs at least two points");
      bool has_level = false;
      for (std::size_t i = 0; i < table_.size(); ++i) {
        const auto [s, k] = table_[i];
        if (i > 0 && !(s > table_[i - 1].first))
          throw std::invalid_argument("boundary law: table abscissae must be strictly increasing");
        if (i > 0 && k < table_[i - 1].second) throw std::invalid_argument("boundary law: table must be nondecreasing");
        if (s == b_) {
          if (k != 0.0) throw std::invalid_argument("boundary law: table must vanish at the level b");
          has_level = true;
        } else if ((s < b_ && !(k < 0.0)) || (s > b_ && !(k > 0.0))) {
          throw std::invalid_argument("boundary law: table must vanish only at the level b");
        }
      }
      if (!has_level) throw std::invalid_argument("boundary law: table must contain the point (b, 0)");
      if (table_.front().first >= b_ || table_.back().first <= b_)
        throw std::invalid_argument("boundary law: table must extend on both sides of b");
    }
  }

  bool regularized(double eps) const { return p_ < 2.0 && eps > 0.0; }

  double kernel(double s, double eps) const {
    if (kind_ == Kind::tabulated) return table_value(s);
    const double t = s - b_;
    if (regularized(eps)) return std::pow(t * t + eps * eps, 0.5 * (p_ - 2.0)) * t;
    if (t == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(t), p_ - 1.0), t);
  }

  double kernel_derivative(double s, double eps) const {
    if (kind_ == Kind::tabulated) return table_slope(s);
    const double t = s - b_;
    if (regularized(eps)) {
      const double r = t * t + eps * eps;
      return std::pow(r, 0.5 * (p_ - 4.0)) * ((p_ - 1.0) * t * t + eps * eps);
    }
    if (t == 0.0) return p_ == 2.0 ? 1.0 : (p_ > 2.0 ? 0.0 : HUGE_VAL);
    return (p_ - 1.0) * std::pow(std::abs(t), p_ - 2.0);
  }

  double kernel_primitive(double s, double eps) const {
    if (kind_ == Kind::tabulated) return table_primitive(s);
    const double t = s - b_;
    if (regularized(eps)) return (std::pow(t * t + eps * eps, 0.5 * p_) - std::pow(eps, p_)) / p_;
    return std::pow(std::abs(t), p_) / p_;
  }

  std::size_t segment(double s) const {
    auto it = std::upper_bound(table_.begin(), table_.end(), s,
                               [](double v, const std::pair<double, double>& e) { return v < e.first; });
    return static_cast<std::size_t>(std::distance(table_.begin(), it));
  }

  double table_value(double s) const {
    const std::size_t j = segment(s);
    if (j == 0) return table_.front().second;
    if (j == table_.size()) return table_.back().second;
    const auto [s0, k0] = table_[j - 1];
    const auto [s1, k1] = table_[j];
    return k0 + (k1 - k0) * (s - s0) / (s1 - s0);
  }

  double table_slope(double s) const {
    const std::size_t j = segment(s);
    if (j == 0 || j == table_.size()) return 0.0;
    const auto [s0, k0] = table_[j - 1];
    const auto [s1, k1] = table_[j];
    return (k1 - k0) / (s1 - s0);
  }

  // Exact integral of the piecewise linear kernel between b and s.
  double table_primitive(double s) const {
    auto integral_from_start = [this](double x) {
      double acc = 0.0;
      double prev_s = table_.front().first;
      if (x <= prev_s) return (x - prev_s) * table_.front().second;
      for (std::size_t j = 1; j < table_.size(); ++j) {
        const double hi = std::min(x, table_[j].first);
        acc += 0.5 * (table_value(prev_s) + table_value(hi)) * (hi - prev_s);
        if (x <= table_[j].first) return acc;
        prev_s = table_[j].first;
      }
      return acc + (x - table_.back().first) * table_.back().second;
    };
    return integral_from_start(s) - integral_from_start(b_);
  }

  Kind kind_ = Kind::power;
  Eigen::VectorXd omega_;
  std::vector<std::pair<double, double>> table_;
  double p_ = 2.0;
  double b_ = 1.0;
};

}  // namespace pqlap
