#pragma once

// Baker-Akhiezer functions on unions of rational components. On component i
//   psi_i(z) = exp(sum_v u^v k_v(z)) * (f0 + sum_poles sum_{p=1..m} f_{pole,p} (z - alpha)^-p)
// where the sum runs over the essential points on that component.

#include "singspec/curve.hpp"
#include "singspec/numeric.hpp"

#include <Eigen/Dense>

namespace singspec::bafn {

using curve::cplx;

/// Solves beyond this condition estimate are rejected.
inline constexpr double kConditionFailure = 1e13;

struct BASolution {
  Eigen::VectorXd u;
  Eigen::VectorXcd coefficients;
  double condition_estimate = 1.0;
  bool ill_conditioned = false;
};

/// Position of f0 for each component in the unknown vector; the pole
/// coefficients of that component follow it in pole order.
std::vector<int> unknown_offsets(const curve::SpectralData& data);

/// One row per constraint, then one per normalization.
numeric::LinearProblem assemble_system(const curve::SpectralData& data, const Eigen::VectorXd& u);

BASolution solve_ba(const curve::SpectralData& data, const Eigen::VectorXd& u);

/// psi^(derivative_order)(at). At infinity only the value on a component
/// without an essential point there is defined.
cplx evaluate_ba(const curve::SpectralData& data, const BASolution& sol, const curve::CurvePoint& at,
                 int derivative_order = 0);

/// x^j = psi(Q_j), complex.
Eigen::VectorXcd coordinates(const curve::SpectralData& data, const BASolution& sol);

/// H_i = lim psi * exp(-u^i k_i) at the essential point carrying u^i.
/// Throws NonRealLame when |Im| > 1e-9 |H_i|.
double lame_coefficient(const curve::SpectralData& data, const BASolution& sol, int i);

}  // namespace singspec::bafn
