#pragma once

// Metric geometry of coordinate charts u -> x: Gram matrices, Lame and
// rotation coefficients, Lame equations, Egorov checks and coordinate-line
// shape tests. All u-derivatives are finite differences.

#include "singspec/curve.hpp"
#include "singspec/numeric.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace singspec::geometry {

using numeric::Vec;

enum class Provenance { Engine, ClosedForm };

struct Chart {
  std::string name;
  int dimension = 0;
  numeric::VectorFunction map;
  Eigen::MatrixXd eta;
  std::vector<int> signature;
  numeric::Box domain;
  Provenance provenance = Provenance::ClosedForm;
  /// Engine-backed Lame coefficients H_i(u); empty for closed-form charts.
  numeric::VectorFunction lame;
  /// Set when the chart is expected to be Egorov (symmetric rotation coefficients).
  bool egorov_expected = false;
};

/// Chart x^j(u) = Re psi(u, Q_j) with H_i from the solved leading coefficients.
Chart engine_chart(const curve::SpectralData& data, numeric::Box domain, std::string name = "engine");

struct GeometryOptions {
  /// Step for the Jacobian of the map; 0 selects numeric::default_step.
  double step = 0.0;
  /// Step for derivatives of H (which already contains one FD level).
  double outer_step = 1e-2;
};

/// G_ij = sum_kl eta_kl dx^k/du^i dx^l/du^j.
Eigen::MatrixXd gram(const Chart& chart, const Vec& u, const GeometryOptions& opt = {});

/// H_i = sqrt|G_ii| (closed-form charts) or the engine value.
Vec lame_coefficients(const Chart& chart, const Vec& u, const GeometryOptions& opt = {});

struct OrthogonalityReport {
  double max_offdiag_ratio = 0.0;
  /// max |G_ii - eps_i^2 H_i^2| / G_ii; only for engine charts.
  double max_lame_mismatch = 0.0;
  bool lame_checked = false;
  Vec worst_point;
};

OrthogonalityReport orthogonality_report(const Chart& chart, const std::vector<Vec>& grid,
                                         const GeometryOptions& opt = {});

/// beta_ij = (1/H_j) dH_i/du^j for i != j; diagonal is zero.
Eigen::MatrixXd rotation_coefficients(const Chart& chart, const Vec& u, const GeometryOptions& opt = {});

struct RotationDerivatives {
  Eigen::MatrixXd beta;
  /// dbeta[k](i, j) = d beta_ij / du^k.
  std::vector<Eigen::MatrixXd> dbeta;
};

RotationDerivatives rotation_derivatives(const Chart& chart, const Vec& u, const GeometryOptions& opt = {});

struct LameResidual {
  /// d_k beta_ij - beta_ik beta_kj over distinct i, j, k (empty family for N = 2).
  double offdiag = 0.0;
  /// d_j beta_ij + d_i beta_ji + sum_{k != i,j} beta_ik beta_jk over i != j (the
  /// curvature equation R_ijij = 0 written in this beta convention).
  double flat = 0.0;
};

LameResidual lame_residual(const Chart& chart, const Vec& u, const GeometryOptions& opt = {});

struct EgorovResidual {
  double symmetry = 0.0;  // max |beta_ij - eps_i eps_j beta_ji|
  double flatness = 0.0;  // max |sum_k d_k beta_ij|
};

EgorovResidual egorov_residuals(const Chart& chart, const Vec& u, const GeometryOptions& opt = {});

enum class LineKind { Circle, Line, Neither };

struct LineShape {
  LineKind kind = LineKind::Neither;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 0.0;
  double max_deviation = 0.0;
  /// Circle fit attempted but the first three samples were collinear.
  bool collinear_samples = false;
};

/// Samples the coordinate line u^fixed_axis = fixed_value at the given values
/// of the other coordinate (N = 2, at least 5 samples) and classifies it.
LineShape circle_line_test(const Chart& chart, int fixed_axis, double fixed_value,
                           const std::vector<double>& free_values, double rel_tol = 1e-6);

/// Tensor grid from per-axis (min, max, count).
struct AxisRange {
  double min = 0.0;
  double max = 0.0;
  int count = 2;
};
std::vector<Vec> tensor_grid(const std::vector<AxisRange>& axes);

}  // namespace singspec::geometry
