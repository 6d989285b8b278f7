#pragma once

// Finite-difference differentiation and small dense complex solves.

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

namespace singspec::numeric {

using Vec = Eigen::VectorXd;
using ScalarFunction = std::function<double(const Vec&)>;
using VectorFunction = std::function<Vec(const Vec&)>;

/// Axis-aligned box; used to keep stencils inside a caller's domain.
struct Box {
  Vec lower;
  Vec upper;

  bool contains(const Vec& p) const;
};

struct DerivativeRequest {
  ScalarFunction target;
  Vec point;
  /// Per-variable derivative orders; total order in [1, 3].
  std::vector<int> multi_index;
  /// Base step. Non-positive selects default_step().
  double step = 0.0;
  std::optional<Box> domain;
};

struct DerivativeResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Default base step for a derivative of the given total order at `point`.
/// Grows with the order so that cancellation error stays below the
/// truncation error of the extrapolated stencil.
double default_step(int total_order, const Vec& point);

/// Central differences (4-point stencil for third order), composed per axis,
/// with one level of Richardson extrapolation (step ratio 2).
DerivativeResult fd_derivative(const DerivativeRequest& req);

/// Same stencil applied to a vector-valued map, component-wise. The map is
/// evaluated once per stencil node.
Vec fd_derivative(const VectorFunction& target, const Vec& point, const std::vector<int>& multi_index,
                  double step = 0.0, Vec* error_estimate = nullptr, const std::optional<Box>& domain = {});

/// Jacobian J(k, i) = d map_k / d u^i.
Eigen::MatrixXd fd_jacobian(const VectorFunction& map, const Vec& point, double step = 0.0,
                            const std::optional<Box>& domain = {});

/// Half-width of the stencil used for `total_order` at base step `step`.
double stencil_reach(int total_order, double step);

struct LinearProblem {
  Eigen::MatrixXcd matrix;
  Eigen::VectorXcd rhs;
};

struct LinearSolution {
  Eigen::VectorXcd solution;
  /// 1-norm condition number estimate (>= 1).
  double condition_estimate = 1.0;
  /// Set when condition_estimate exceeds kIllConditionedWarning.
  bool ill_conditioned = false;
};

inline constexpr double kSingularPivotRatio = 1e-13;
inline constexpr double kIllConditionedWarning = 1e10;

/// LU with partial pivoting. Throws Errc::SingularSystem when a pivot falls
/// below kSingularPivotRatio times the largest matrix entry.
LinearSolution solve_dense(const LinearProblem& p);

}  // namespace singspec::numeric
