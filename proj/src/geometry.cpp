#include "singspec/geometry.hpp"

#include "singspec/bafn.hpp"
#include "singspec/error.hpp"
#include "singspec/parallel.hpp"

#include <cmath>
#include <memory>
#include <sstream>

namespace singspec::geometry {

Chart engine_chart(const curve::SpectralData& data, numeric::Box domain, std::string name) {
  auto shared = std::make_shared<const curve::SpectralData>(data);
  Chart ch;
  ch.name = std::move(name);
  ch.dimension = data.dimension();
  ch.eta = data.eta;
  ch.signature = data.signature;
  ch.domain = std::move(domain);
  ch.provenance = Provenance::Engine;
  ch.map = [shared](const Vec& u) -> Vec {
    const auto sol = bafn::solve_ba(*shared, u);
    return bafn::coordinates(*shared, sol).real();
  };
  ch.lame = [shared](const Vec& u) -> Vec {
    const auto sol = bafn::solve_ba(*shared, u);
    Vec h(shared->dimension());
    for (int i = 0; i < h.size(); ++i) h[i] = bafn::lame_coefficient(*shared, sol, i);
    return h;
  };
  std::string why;
  ch.egorov_expected = curve::egorov_hypotheses(data, &why);
  return ch;
}

Eigen::MatrixXd gram(const Chart& chart, const Vec& u, const GeometryOptions& opt) {
  const Eigen::MatrixXd j = numeric::fd_jacobian(chart.map, u, opt.step, chart.domain);
  return j.transpose() * chart.eta * j;
}

namespace {

Vec metric_lame(const Chart& chart, const Vec& u, const GeometryOptions& opt) {
  const Eigen::MatrixXd g = gram(chart, u, opt);
  Vec h(g.rows());
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    if (std::abs(g(i, i)) < 1e-12) {
      std::ostringstream os;
      os << "G_" << i << i << " = " << g(i, i) << " at u = " << u.transpose();
      throw Error(Errc::DegenerateLame, os.str());
    }
    h[i] = std::sqrt(std::abs(g(i, i)));
  }
  return h;
}

numeric::VectorFunction lame_function(const Chart& chart, const GeometryOptions& opt) {
  if (chart.lame) return chart.lame;
  return [&chart, opt](const Vec& u) { return metric_lame(chart, u, opt); };
}

// Interior box for the outer derivative: the inner Jacobian stencil must
// still fit inside the chart domain.
std::optional<numeric::Box> outer_domain(const Chart& chart, const Vec& u, const GeometryOptions& opt) {
  if (chart.domain.lower.size() == 0) return std::nullopt;
  const double inner = chart.lame ? 0.0 : numeric::stencil_reach(1, opt.step > 0 ? opt.step : numeric::default_step(1, u));
  numeric::Box b = chart.domain;
  b.lower.array() += inner;
  b.upper.array() -= inner;
  return b;
}

double sign(const Chart& chart, int i) {
  return static_cast<std::size_t>(i) < chart.signature.size() ? chart.signature[static_cast<std::size_t>(i)] : 1.0;
}

}  // namespace

Vec lame_coefficients(const Chart& chart, const Vec& u, const GeometryOptions& opt) {
  return lame_function(chart, opt)(u);
}

OrthogonalityReport orthogonality_report(const Chart& chart, const std::vector<Vec>& grid,
                                         const GeometryOptions& opt) {
  struct Sample {
    double ratio = 0.0;
    double mismatch = 0.0;
  };
  std::vector<Sample> samples(grid.size());
  parallel_for(grid.size(), [&](std::size_t s) {
    const Eigen::MatrixXd g = gram(chart, grid[s], opt);
    for (Eigen::Index i = 0; i < g.rows(); ++i)
      for (Eigen::Index j = 0; j < g.cols(); ++j)
        if (i != j) samples[s].ratio = std::max(samples[s].ratio, std::abs(g(i, j)) / std::sqrt(std::abs(g(i, i) * g(j, j))));
    if (chart.lame) {
      const Vec h = chart.lame(grid[s]);
      for (Eigen::Index i = 0; i < g.rows(); ++i) {
        const double e = sign(chart, static_cast<int>(i));
        samples[s].mismatch = std::max(samples[s].mismatch, std::abs(g(i, i) - e * e * h[i] * h[i]) / std::abs(g(i, i)));
      }
    }
  });
  OrthogonalityReport rep;
  rep.lame_checked = static_cast<bool>(chart.lame);
  for (std::size_t s = 0; s < grid.size(); ++s) {
    if (samples[s].ratio >= rep.max_offdiag_ratio) {
      rep.max_offdiag_ratio = samples[s].ratio;
      rep.worst_point = grid[s];
    }
    rep.max_lame_mismatch = std::max(rep.max_lame_mismatch, samples[s].mismatch);
  }
  return rep;
}

Eigen::MatrixXd rotation_coefficients(const Chart& chart, const Vec& u, const GeometryOptions& opt) {
  const auto hfun = lame_function(chart, opt);
  const Vec h = hfun(u);
  const auto n = u.size();
  const auto dom = outer_domain(chart, u, opt);
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    std::vector<int> mi(static_cast<std::size_t>(n), 0);
    mi[static_cast<std::size_t>(j)] = 1;
    const Vec dh = numeric::fd_derivative(hfun, u, mi, opt.outer_step, nullptr, dom);  // dH_i/du^j
    for (Eigen::Index i = 0; i < n; ++i)
      if (i != j) beta(i, j) = dh[i] / h[j];
  }
  return beta;
}

RotationDerivatives rotation_derivatives(const Chart& chart, const Vec& u, const GeometryOptions& opt) {
  const auto hfun = lame_function(chart, opt);
  const auto n = u.size();
  const auto nn = static_cast<std::size_t>(n);
  const auto dom = outer_domain(chart, u, opt);
  const Vec h = hfun(u);

  // dh(i, j) = d_j H_i; d2h[i](j, k) = d_j d_k H_i.
  Eigen::MatrixXd dh(n, n);
  std::vector<Eigen::MatrixXd> d2h(nn, Eigen::MatrixXd::Zero(n, n));
  for (Eigen::Index j = 0; j < n; ++j) {
    std::vector<int> mi(nn, 0);
    mi[static_cast<std::size_t>(j)] = 1;
    dh.col(j) = numeric::fd_derivative(hfun, u, mi, opt.outer_step, nullptr, dom);
    for (Eigen::Index k = j; k < n; ++k) {
      std::vector<int> m2(nn, 0);
      ++m2[static_cast<std::size_t>(j)];
      ++m2[static_cast<std::size_t>(k)];
      const Vec col = numeric::fd_derivative(hfun, u, m2, opt.outer_step, nullptr, dom);
      for (std::size_t i = 0; i < nn; ++i) {
        d2h[i](j, k) = col[static_cast<Eigen::Index>(i)];
        d2h[i](k, j) = col[static_cast<Eigen::Index>(i)];
      }
    }
  }

  RotationDerivatives out;
  out.beta = Eigen::MatrixXd::Zero(n, n);
  out.dbeta.assign(nn, Eigen::MatrixXd::Zero(n, n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      out.beta(i, j) = dh(i, j) / h[j];
      for (Eigen::Index k = 0; k < n; ++k) {
        out.dbeta[static_cast<std::size_t>(k)](i, j) =
            d2h[static_cast<std::size_t>(i)](j, k) / h[j] - dh(i, j) * dh(j, k) / (h[j] * h[j]);
      }
    }
  }
  return out;
}

LameResidual lame_residual(const Chart& chart, const Vec& u, const GeometryOptions& opt) {
  const auto n = u.size();
  if (n < 2) throw Error(Errc::InvalidArgument, "Lame equations need at least two coordinates");
  const auto rd = rotation_derivatives(chart, u, opt);
  const auto& b = rd.beta;
  LameResidual res;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      for (Eigen::Index k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        const double r = rd.dbeta[static_cast<std::size_t>(k)](i, j) - b(i, k) * b(k, j);
        res.offdiag = std::max(res.offdiag, std::abs(r));
      }
      // With beta_ij = d_j H_i / H_j the R_ijij = 0 equation reads
      // d_j beta_ij + d_i beta_ji + sum_k beta_ik beta_jk = 0.
      double f = rd.dbeta[static_cast<std::size_t>(j)](i, j) + rd.dbeta[static_cast<std::size_t>(i)](j, i);
      for (Eigen::Index k = 0; k < n; ++k)
        if (k != i && k != j) f += b(i, k) * b(j, k);
      res.flat = std::max(res.flat, std::abs(f));
    }
  }
  return res;
}

EgorovResidual egorov_residuals(const Chart& chart, const Vec& u, const GeometryOptions& opt) {
  const auto n = u.size();
  if (n < 2) throw Error(Errc::InvalidArgument, "Egorov checks need at least two coordinates");
  const auto rd = rotation_derivatives(chart, u, opt);
  EgorovResidual res;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double eps = sign(chart, static_cast<int>(i)) * sign(chart, static_cast<int>(j));
      res.symmetry = std::max(res.symmetry, std::abs(rd.beta(i, j) - eps * rd.beta(j, i)));
      double s = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) s += rd.dbeta[static_cast<std::size_t>(k)](i, j);
      res.flatness = std::max(res.flatness, std::abs(s));
    }
  }
  return res;
}

LineShape circle_line_test(const Chart& chart, int fixed_axis, double fixed_value,
                           const std::vector<double>& free_values, double rel_tol) {
  if (chart.dimension != 2) throw Error(Errc::InvalidArgument, "coordinate-line test needs a 2-dimensional chart");
  if (fixed_axis < 0 || fixed_axis > 1) throw Error(Errc::InvalidArgument, "fixed axis must be 0 or 1");
  if (free_values.size() < 5) throw Error(Errc::InvalidArgument, "need at least 5 samples along the line");

  std::vector<Eigen::Vector2d> pts;
  for (double t : free_values) {
    Vec u(2);
    u[fixed_axis] = fixed_value;
    u[1 - fixed_axis] = t;
    const Vec x = chart.map(u);
    if (!x.allFinite()) throw Error(Errc::NonFiniteSample, "chart returned a non-finite point");
    pts.emplace_back(x[0], x[1]);
  }

  LineShape out;
  const Eigen::Vector2d a = pts[0], b = pts[1], c = pts[2];
  const Eigen::Vector2d ab = b - a, ac = c - a;
  const double cross = ab.x() * ac.y() - ab.y() * ac.x();
  const double chord = ac.norm();

  if (std::abs(cross) >= 1e-12 * chord * chord) {
    // Circumcentre of a, b, c.
    const double d = 2.0 * cross;
    const double ab2 = ab.squaredNorm(), ac2 = ac.squaredNorm();
    const Eigen::Vector2d rel((ac.y() * ab2 - ab.y() * ac2) / d, (ab.x() * ac2 - ac.x() * ab2) / d);
    out.center = a + rel;
    out.radius = rel.norm();
    double dev = 0.0;
    for (std::size_t k = 3; k < pts.size(); ++k) dev = std::max(dev, std::abs((pts[k] - out.center).norm() - out.radius));
    out.max_deviation = dev;
    out.kind = dev < rel_tol * out.radius ? LineKind::Circle : LineKind::Neither;
    return out;
  }

  out.collinear_samples = true;
  const Eigen::Vector2d dir = ac / chord;
  double dev = 0.0;
  for (const auto& p : pts) {
    const Eigen::Vector2d r = p - a;
    dev = std::max(dev, std::abs(r.x() * dir.y() - r.y() * dir.x()));
  }
  out.max_deviation = dev;
  out.kind = dev < rel_tol * chord ? LineKind::Line : LineKind::Neither;
  return out;
}

std::vector<Vec> tensor_grid(const std::vector<AxisRange>& axes) {
  std::vector<Vec> out;
  if (axes.empty()) return out;
  for (const auto& a : axes)
    if (a.count < 1) throw Error(Errc::InvalidArgument, "grid axis needs at least one point");
  std::vector<int> idx(axes.size(), 0);
  while (true) {
    Vec u(static_cast<Eigen::Index>(axes.size()));
    for (std::size_t d = 0; d < axes.size(); ++d) {
      const auto& a = axes[d];
      u[static_cast<Eigen::Index>(d)] = a.count == 1 ? a.min : a.min + (a.max - a.min) * idx[d] / (a.count - 1);
    }
    out.push_back(u);
    std::size_t d = axes.size();
    while (d-- > 0) {
      if (++idx[d] < axes[d].count) break;
      idx[d] = 0;
      if (d == 0) return out;
    }
  }
}

}  // namespace singspec::geometry
