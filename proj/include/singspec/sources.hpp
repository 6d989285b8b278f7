#pragma once

// One-soliton solution of KdV with a self-consistent source, built on CP^1
// with the double point +-kappa weighted by tau(t) = alpha + beta t.

#include <optional>
#include <string>
#include <vector>

namespace singspec::sources {

struct SourceSolitonParams {
  double kappa = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
};

double tau(const SourceSolitonParams& p, double t);

/// u = -16 tau kappa^3 / (tau e^-theta + 2 kappa e^theta)^2, theta = kappa x + kappa^3 t.
/// Throws SingularSoliton on the pole line of the tau < 0 branch.
double soliton_u(const SourceSolitonParams& p, double x, double t);

/// psi(-kappa, x, t) = (1 - tau / (tau + 2 kappa e^(2 theta))) e^-theta.
double soliton_psi(const SourceSolitonParams& p, double x, double t);

/// |u_t - u_xxx/4 + 3/2 u u_x - 2 beta d_x(psi^2)|, derivatives by finite differences.
double source_kdv_residual(const SourceSolitonParams& p, double x, double t);
/// Same with the source term dropped (plain KdV).
double plain_kdv_residual(const SourceSolitonParams& p, double x, double t);

struct ResidualSweep {
  double max_residual = 0.0;
  double worst_x = 0.0;
  double worst_t = 0.0;
  std::size_t evaluated = 0;
  /// Grid points skipped because a stencil reaches tau <= 0.
  std::size_t skipped = 0;
};

/// Max residual over an nx x nt grid on [x0, x1] x [t0, t1].
ResidualSweep residual_sweep(const SourceSolitonParams& p, double x0, double x1, int nx, double t0, double t1, int nt,
                             bool with_source = true);

enum class DoublePointEvent { Annihilation, Creation };

struct EventReport {
  double t_star = 0.0;
  DoublePointEvent kind = DoublePointEvent::Annihilation;
  /// A regular soliton (tau > 0) exists just before / just after t*.
  bool soliton_before = false;
  bool soliton_after = false;
  /// The double point disappears exactly at t* (tau = 0) and exists otherwise.
  bool double_point_at_event = false;
};

/// t* = -alpha/beta when beta != 0. A soliton exists for tau > 0: beta < 0
/// annihilates it at t*, beta > 0 creates it.
std::optional<EventReport> annihilation_time(const SourceSolitonParams& p);
std::string to_string(DoublePointEvent e);

struct Peak {
  double x = 0.0;
  double amplitude = 0.0;
};

/// Peak of the soliton at time t. Throws NoSoliton when tau(t) <= 0.
Peak peak_track(const SourceSolitonParams& p, double t);

/// Suggested finite-difference steps for the residual.
double default_x_step(double kappa);
double default_t_step(double kappa);

}  // namespace singspec::sources
