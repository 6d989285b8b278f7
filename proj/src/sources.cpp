#include "singspec/sources.hpp"

#include "singspec/error.hpp"
#include "singspec/numeric.hpp"
#include "singspec/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace singspec::sources {

namespace {

void check(const SourceSolitonParams& p) {
  if (!(p.kappa > 0.0) || !std::isfinite(p.kappa)) throw Error(Errc::InvalidArgument, "kappa must be positive");
  if (!std::isfinite(p.alpha) || !std::isfinite(p.beta)) throw Error(Errc::InvalidArgument, "alpha, beta must be finite");
}

double theta(const SourceSolitonParams& p, double x, double t) { return p.kappa * x + p.kappa * p.kappa * p.kappa * t; }

using numeric::Vec;

double d1(const std::function<double(double)>& f, double at, int order, double h) {
  numeric::DerivativeRequest req;
  req.target = [&f](const Vec& v) { return f(v[0]); };
  req.point = Vec::Constant(1, at);
  req.multi_index = {order};
  req.step = h;
  return numeric::fd_derivative(req).value;
}

double residual(const SourceSolitonParams& p, double x, double t, bool with_source) {
  check(p);
  const double hx = default_x_step(p.kappa);
  const double ht = default_t_step(p.kappa);
  auto ux = [&](double xx) { return soliton_u(p, xx, t); };
  auto ut = [&](double tt) { return soliton_u(p, x, tt); };
  const double u = soliton_u(p, x, t);
  const double u_t = d1(ut, t, 1, ht);
  const double u_x = d1(ux, x, 1, hx);
  const double u_xxx = d1(ux, x, 3, 2.5 * hx);
  double r = u_t - 0.25 * u_xxx + 1.5 * u * u_x;
  if (with_source) {
    auto psi2 = [&](double xx) {
      const double v = soliton_psi(p, xx, t);
      return v * v;
    };
    r -= 2.0 * p.beta * d1(psi2, x, 1, hx);
  }
  return std::abs(r);
}

}  // namespace

double default_x_step(double kappa) { return 2e-3 / kappa; }
double default_t_step(double kappa) { return 1e-3 / std::max(1.0, kappa * kappa * kappa); }

double tau(const SourceSolitonParams& p, double t) { return p.alpha + p.beta * t; }

double soliton_u(const SourceSolitonParams& p, double x, double t) {
  check(p);
  const double th = theta(p, x, t);
  const double tv = tau(p, t);
  const double em = std::exp(-th), ep = std::exp(th);
  const double den = tv * em + 2.0 * p.kappa * ep;
  if (std::abs(den) < 1e-12 * (std::abs(tv) * em + 2.0 * p.kappa * ep)) {
    std::ostringstream os;
    os << "pole line of the singular soliton at x=" << x << ", t=" << t;
    throw Error(Errc::SingularSoliton, os.str());
  }
  return -16.0 * tv * p.kappa * p.kappa * p.kappa / (den * den);
}

double soliton_psi(const SourceSolitonParams& p, double x, double t) {
  check(p);
  const double th = theta(p, x, t);
  const double tv = tau(p, t);
  const double e2 = 2.0 * p.kappa * std::exp(2.0 * th);
  const double den = tv + e2;
  if (std::abs(den) < 1e-12 * (std::abs(tv) + e2)) {
    std::ostringstream os;
    os << "eigenfunction pole at x=" << x << ", t=" << t;
    throw Error(Errc::SingularSoliton, os.str());
  }
  return (1.0 - tv / den) * std::exp(-th);
}

double source_kdv_residual(const SourceSolitonParams& p, double x, double t) { return residual(p, x, t, true); }

double plain_kdv_residual(const SourceSolitonParams& p, double x, double t) { return residual(p, x, t, false); }

ResidualSweep residual_sweep(const SourceSolitonParams& p, double x0, double x1, int nx, double t0, double t1, int nt,
                             bool with_source) {
  check(p);
  if (nx < 2 || nt < 2) throw Error(Errc::InvalidArgument, "residual grid needs at least 2 points per axis");
  const double ht = default_t_step(p.kappa);
  const std::size_t total = static_cast<std::size_t>(nx) * static_cast<std::size_t>(nt);
  std::vector<double> res(total, -1.0);
  parallel_for(total, [&](std::size_t k) {
    const int i = static_cast<int>(k % static_cast<std::size_t>(nx));
    const int j = static_cast<int>(k / static_cast<std::size_t>(nx));
    const double x = x0 + (x1 - x0) * i / (nx - 1);
    const double t = t0 + (t1 - t0) * j / (nt - 1);
    if (tau(p, t - ht) < 0.0 || tau(p, t + ht) < 0.0) return;  // tau < 0 branch has pole lines
    res[k] = residual(p, x, t, with_source);
  });
  ResidualSweep out;
  for (std::size_t k = 0; k < total; ++k) {
    if (res[k] < 0.0) {
      ++out.skipped;
      continue;
    }
    ++out.evaluated;
    if (res[k] >= out.max_residual) {
      out.max_residual = res[k];
      out.worst_x = x0 + (x1 - x0) * static_cast<double>(k % static_cast<std::size_t>(nx)) / (nx - 1);
      out.worst_t = t0 + (t1 - t0) * static_cast<double>(k / static_cast<std::size_t>(nx)) / (nt - 1);
    }
  }
  return out;
}

std::optional<EventReport> annihilation_time(const SourceSolitonParams& p) {
  check(p);
  if (p.beta == 0.0) return std::nullopt;
  EventReport e;
  e.t_star = -p.alpha / p.beta;
  e.kind = p.beta < 0.0 ? DoublePointEvent::Annihilation : DoublePointEvent::Creation;
  e.soliton_before = p.beta < 0.0;
  e.soliton_after = p.beta > 0.0;
  e.double_point_at_event = false;
  return e;
}

std::string to_string(DoublePointEvent e) { return e == DoublePointEvent::Annihilation ? "annihilation" : "creation"; }

Peak peak_track(const SourceSolitonParams& p, double t) {
  check(p);
  const double tv = tau(p, t);
  if (!(tv > 0.0)) {
    std::ostringstream os;
    os << "tau(" << t << ") = " << tv << " <= 0";
    throw Error(Errc::NoSoliton, os.str());
  }
  Peak pk;
  pk.x = std::log(tv / (2.0 * p.kappa)) / (2.0 * p.kappa) - p.kappa * p.kappa * t;
  pk.amplitude = soliton_u(p, pk.x, t);
  return pk;
}

}  // namespace singspec::sources
