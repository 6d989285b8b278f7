#pragma once

// Prepotentials, correlators c_abc = d^3 F, associativity (WDVV),
// quasihomogeneity and the unit / nilpotent extension by two coordinates.

#include "singspec/numeric.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace singspec::frobenius {

using numeric::Vec;

/// Dense N x N x N tensor.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int n) : n_(n), data_(static_cast<std::size_t>(n * n * n), 0.0) {}

  int size() const { return n_; }
  double& operator()(int a, int b, int c) { return data_[index(a, b, c)]; }
  double operator()(int a, int b, int c) const { return data_[index(a, b, c)]; }
  double max_abs() const;
  /// Largest |c_abc - c_perm| over all index permutations.
  double symmetry_defect() const;
  void symmetrize();

 private:
  std::size_t index(int a, int b, int c) const { return static_cast<std::size_t>((a * n_ + b) * n_ + c); }
  int n_ = 0;
  std::vector<double> data_;
};

/// Euler data: F(lambda^d x) scales like lambda^d_F up to quadratic terms,
/// so c_abc(lambda^d x) = lambda^(d_F - d_a - d_b - d_c) c_abc(x).
struct EulerData {
  std::vector<double> degrees;
  double d_f = 2.0;
};

struct PrepotentialSpec {
  std::string name;
  int n = 0;
  Eigen::MatrixXd eta;
  std::function<double(const Vec&)> f;
  /// Optional exact third derivatives.
  std::function<Tensor3(const Vec&)> closed_form;
  std::optional<EulerData> euler;
  /// Optional domain predicate; points outside raise DomainViolation.
  std::function<bool(const Vec&)> in_domain;
  /// FD base step for third derivatives; 0 selects the numeric default.
  double fd_step = 0.0;
};

struct CorrelatorTensor {
  Vec x;
  Tensor3 c;
  /// Symmetry defect before symmetrization.
  double symmetry_defect = 0.0;
  bool closed_form = false;
};

/// Closed forms when available, else FD third derivatives; symmetrized.
CorrelatorTensor correlators(const PrepotentialSpec& spec, const Vec& x);
/// Always FD third derivatives of F.
CorrelatorTensor fd_correlators(const PrepotentialSpec& spec, const Vec& x);

/// Symmetric inverse of eta; throws InvalidArgument when singular.
Eigen::MatrixXd inverse_metric(const Eigen::MatrixXd& eta);

/// max over (a,b,c,d) |c_abl eta^lm c_cdm - c_cbl eta^lm c_adm| / (1 + max|c|^2 ||eta^-1||_inf).
double wdvv_residual(const Tensor3& c, const Eigen::MatrixXd& eta_inverse);
double wdvv_residual(const PrepotentialSpec& spec, const Vec& x);

/// max over lambdas and indices of |lambda^-(d_F - d_a - d_b - d_c) c(lambda^d x) - c(x)| / (1 + |c(x)|).
/// Without Euler data every d_a = 1 and d_F = 2, i.e. c(lambda x) = c(x) / lambda.
double quasihom_residual(const PrepotentialSpec& spec, const Vec& x, const std::vector<double>& lambdas);

struct ExtendOptions {
  /// Drop the (t^0)^2 t^(N+1) / 2 term (ablation of the unit).
  bool drop_unit_term = false;
};

struct ExtendedPrepotential {
  PrepotentialSpec base;
  /// Coordinates (t^0, t^1..t^N, t^(N+1)).
  PrepotentialSpec extended;
  /// Set when d_a + d_b is not constant over the support of eta.
  bool euler_extension_unavailable = false;
};

/// F~ = (eta_ab t^a t^b t^0 + (t^0)^2 t^(N+1)) / 2 + F with the bordered metric.
ExtendedPrepotential extend(const PrepotentialSpec& spec, const ExtendOptions& opt = {});

struct AlgebraReport {
  /// max |c^k_0j - delta^k_j|
  double unit_defect = 0.0;
  /// max |c^k_(N+1)(N+1)|
  double nilpotent_defect = 0.0;
  double wdvv = 0.0;
  bool unit_ok = false;
  bool nilpotent_ok = false;

  bool ok() const { return unit_ok && nilpotent_ok; }
};

/// `t` has N + 2 entries.
AlgebraReport verify_algebra(const ExtendedPrepotential& ext, const Vec& t, double tol = 1e-9);

/// Real part of the principal branch of the two-line prepotential with
/// parameters (a, c); closed-form correlators are attached for a = 1,
/// c = 2/sqrt(7). Domain: x1 > 0 and a positive square-root radicand.
PrepotentialSpec example11_prepotential(double a = 1.0, double c = 0.7559289460184544);

/// F_q = q |x|^2 atan2(x1, x2) - |x|^2 log|x|^2 / 8 with closed-form correlators.
/// The atan2 branch cut (x1 = 0, x2 < 0) only shifts F by a quadratic.
PrepotentialSpec example12_prepotential(double q = 0.0);

struct Monomial {
  double coeff = 0.0;
  std::vector<int> powers;
};

/// F = sum coeff prod x_i^p_i with exact correlators.
PrepotentialSpec polynomial_prepotential(int n, Eigen::MatrixXd eta, std::vector<Monomial> monomials,
                                         std::optional<EulerData> euler = {}, std::string name = "polynomial");

}  // namespace singspec::frobenius
