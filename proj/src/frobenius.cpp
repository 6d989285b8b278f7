#include "singspec/frobenius.hpp"

#include "singspec/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace singspec::frobenius {

double Tensor3::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Tensor3::symmetry_defect() const {
  double d = 0.0;
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b)
      for (int c = 0; c < n_; ++c) {
        const double v = (*this)(a, b, c);
        d = std::max({d, std::abs(v - (*this)(b, a, c)), std::abs(v - (*this)(a, c, b)), std::abs(v - (*this)(c, b, a))});
      }
  return d;
}

void Tensor3::symmetrize() {
  Tensor3 s(n_);
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b)
      for (int c = 0; c < n_; ++c) {
        const Tensor3& t = *this;
        s(a, b, c) = (t(a, b, c) + t(a, c, b) + t(b, a, c) + t(b, c, a) + t(c, a, b) + t(c, b, a)) / 6.0;
      }
  *this = std::move(s);
}

namespace {

void require_domain(const PrepotentialSpec& spec, const Vec& x) {
  if (x.size() != spec.n) throw Error(Errc::InvalidArgument, "point dimension does not match the prepotential");
  if (!x.allFinite() || (spec.in_domain && !spec.in_domain(x))) {
    std::ostringstream os;
    os << "x = " << x.transpose() << " is outside the domain of " << spec.name;
    throw Error(Errc::DomainViolation, os.str());
  }
}

EulerData default_euler(int n) { return {std::vector<double>(static_cast<std::size_t>(n), 1.0), 2.0}; }

}  // namespace

CorrelatorTensor fd_correlators(const PrepotentialSpec& spec, const Vec& x) {
  require_domain(spec, x);
  if (!spec.f) throw Error(Errc::InvalidArgument, "prepotential has no F");
  CorrelatorTensor out{x, Tensor3(spec.n), 0.0, false};
  const auto n = static_cast<std::size_t>(spec.n);
  for (int a = 0; a < spec.n; ++a)
    for (int b = a; b < spec.n; ++b)
      for (int c = b; c < spec.n; ++c) {
        std::vector<int> mi(n, 0);
        ++mi[static_cast<std::size_t>(a)];
        ++mi[static_cast<std::size_t>(b)];
        ++mi[static_cast<std::size_t>(c)];
        numeric::DerivativeRequest req{spec.f, x, mi, spec.fd_step, std::nullopt};
        const double v = numeric::fd_derivative(req).value;
        const std::array<int, 3> idx{a, b, c};
        std::array<int, 3> p = idx;
        std::sort(p.begin(), p.end());
        do {
          out.c(p[0], p[1], p[2]) = v;
        } while (std::next_permutation(p.begin(), p.end()));
      }
  return out;
}

CorrelatorTensor correlators(const PrepotentialSpec& spec, const Vec& x) {
  if (!spec.closed_form) return fd_correlators(spec, x);
  require_domain(spec, x);
  CorrelatorTensor out{x, spec.closed_form(x), 0.0, true};
  if (out.c.size() != spec.n) throw Error(Errc::InvalidArgument, "closed-form correlators have the wrong size");
  out.symmetry_defect = out.c.symmetry_defect();
  out.c.symmetrize();
  return out;
}

Eigen::MatrixXd inverse_metric(const Eigen::MatrixXd& eta) {
  if (eta.rows() != eta.cols() || eta.rows() == 0) throw Error(Errc::InvalidArgument, "eta must be square");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(eta);
  if (!lu.isInvertible()) throw Error(Errc::InvalidArgument, "eta is singular");
  const Eigen::MatrixXd inv = lu.inverse();
  return 0.5 * (inv + inv.transpose());
}

double wdvv_residual(const Tensor3& c, const Eigen::MatrixXd& eta_inverse) {
  const int n = c.size();
  // m(a, b, m) = c_abl eta^lm
  Tensor3 m(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int mu = 0; mu < n; ++mu) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += c(a, b, l) * eta_inverse(l, mu);
        m(a, b, mu) = s;
      }
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int g = 0; g < n; ++g)
        for (int d = 0; d < n; ++d) {
          double lhs = 0.0, rhs = 0.0;
          for (int mu = 0; mu < n; ++mu) {
            lhs += m(a, b, mu) * c(g, d, mu);
            rhs += m(g, b, mu) * c(a, d, mu);
          }
          worst = std::max(worst, std::abs(lhs - rhs));
        }
  const double cmax = c.max_abs();
  const double inv_norm = eta_inverse.cwiseAbs().rowwise().sum().maxCoeff();
  return worst / (1.0 + cmax * cmax * inv_norm);
}

double wdvv_residual(const PrepotentialSpec& spec, const Vec& x) {
  return wdvv_residual(correlators(spec, x).c, inverse_metric(spec.eta));
}

double quasihom_residual(const PrepotentialSpec& spec, const Vec& x, const std::vector<double>& lambdas) {
  const EulerData e = spec.euler.value_or(default_euler(spec.n));
  if (static_cast<int>(e.degrees.size()) != spec.n) throw Error(Errc::InvalidArgument, "Euler degrees have wrong size");
  const auto base = correlators(spec, x);
  double worst = 0.0;
  for (double lam : lambdas) {
    if (!(lam > 0.0)) throw Error(Errc::InvalidArgument, "scaling factors must be positive");
    Vec xl = x;
    for (int i = 0; i < spec.n; ++i) xl[i] *= std::pow(lam, e.degrees[static_cast<std::size_t>(i)]);
    const auto scaled = correlators(spec, xl);
    for (int a = 0; a < spec.n; ++a)
      for (int b = 0; b < spec.n; ++b)
        for (int c = 0; c < spec.n; ++c) {
          const double weight = e.d_f - e.degrees[static_cast<std::size_t>(a)] - e.degrees[static_cast<std::size_t>(b)] -
                                e.degrees[static_cast<std::size_t>(c)];
          const double ref = base.c(a, b, c);
          const double r = std::abs(std::pow(lam, -weight) * scaled.c(a, b, c) - ref) / (1.0 + std::abs(ref));
          worst = std::max(worst, r);
        }
  }
  return worst;
}

ExtendedPrepotential extend(const PrepotentialSpec& spec, const ExtendOptions& opt) {
  const int n = spec.n;
  const int m = n + 2;
  ExtendedPrepotential ext;
  ext.base = spec;

  Eigen::MatrixXd eta = Eigen::MatrixXd::Zero(m, m);
  eta(0, m - 1) = eta(m - 1, 0) = 1.0;
  eta.block(1, 1, n, n) = spec.eta;

  const double unit = opt.drop_unit_term ? 0.0 : 1.0;
  auto base = std::make_shared<const PrepotentialSpec>(spec);

  PrepotentialSpec& e = ext.extended;
  e.name = spec.name + "+extension";
  e.n = m;
  e.eta = eta;
  e.fd_step = spec.fd_step;
  e.in_domain = [base, n](const Vec& t) {
    const Vec inner = t.segment(1, n);
    return !base->in_domain || base->in_domain(inner);
  };
  e.f = [base, n, unit](const Vec& t) {
    const Vec inner = t.segment(1, n);
    const double quad = inner.dot(base->eta * inner);
    return 0.5 * (quad * t[0] + unit * t[0] * t[0] * t[n + 1]) + base->f(inner);
  };
  e.closed_form = [base, n, m, unit](const Vec& t) {
    const Vec inner = t.segment(1, n);
    const Tensor3 c = correlators(*base, inner).c;
    Tensor3 out(m);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const double v = base->eta(a, b);
        out(0, a + 1, b + 1) = out(a + 1, 0, b + 1) = out(a + 1, b + 1, 0) = v;
        for (int g = 0; g < n; ++g) out(a + 1, b + 1, g + 1) = c(a, b, g);
      }
    out(0, 0, m - 1) = out(0, m - 1, 0) = out(m - 1, 0, 0) = unit;
    return out;
  };

  const EulerData be = spec.euler.value_or(default_euler(n));
  std::optional<double> pair_sum;
  bool consistent = true;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (spec.eta(a, b) == 0.0) continue;
      const double s = be.degrees[static_cast<std::size_t>(a)] + be.degrees[static_cast<std::size_t>(b)];
      if (!pair_sum)
        pair_sum = s;
      else if (std::abs(*pair_sum - s) > 1e-12)
        consistent = false;
    }
  if (consistent && pair_sum) {
    EulerData ee;
    ee.d_f = be.d_f;
    ee.degrees.push_back(be.d_f - *pair_sum);
    ee.degrees.insert(ee.degrees.end(), be.degrees.begin(), be.degrees.end());
    ee.degrees.push_back(2.0 * *pair_sum - be.d_f);
    e.euler = ee;
  } else {
    ext.euler_extension_unavailable = true;
  }
  return ext;
}

AlgebraReport verify_algebra(const ExtendedPrepotential& ext, const Vec& t, double tol) {
  const auto& e = ext.extended;
  if (t.size() != e.n) throw Error(Errc::InvalidArgument, "extended point needs N + 2 coordinates");
  const Tensor3 c = correlators(e, t).c;
  const Eigen::MatrixXd inv = inverse_metric(e.eta);
  const int m = e.n;
  auto up = [&](int k, int i, int j) {
    double s = 0.0;
    for (int l = 0; l < m; ++l) s += inv(k, l) * c(l, i, j);
    return s;
  };
  AlgebraReport rep;
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < m; ++j) rep.unit_defect = std::max(rep.unit_defect, std::abs(up(k, 0, j) - (k == j ? 1.0 : 0.0)));
    rep.nilpotent_defect = std::max(rep.nilpotent_defect, std::abs(up(k, m - 1, m - 1)));
  }
  rep.wdvv = wdvv_residual(c, inv);
  rep.unit_ok = rep.unit_defect < tol;
  rep.nilpotent_ok = rep.nilpotent_defect < tol;
  return rep;
}

// --- built-in prepotentials -------------------------------------------------

PrepotentialSpec example11_prepotential(double a, double c) {
  if (!(a > 0.0) || !(c > 0.0)) throw Error(Errc::DegenerateParameters, "a and c must be positive");
  const double k2 = 2.0 * c * c - a * a;
  if (!(k2 > 0.0)) throw Error(Errc::DegenerateParameters, "need 2c^2 > a^2");
  const double k = std::sqrt(k2);

  PrepotentialSpec s;
  s.name = "example11";
  s.n = 2;
  s.eta = Eigen::MatrixXd::Identity(2, 2);
  s.euler = default_euler(2);

  auto radicand = [a, c](double x1, double x2) { return (a * a - c * c) * x1 * x1 + c * c * x2 * x2; };
  auto log_arg = [a, c, k](double x1, double x2, double root) {
    return c * c * (x1 * x1 - 3.0 * x2 * x2) + a * a * (x2 * x2 - x1 * x1) - 2.0 * x2 * k * root;
  };
  s.in_domain = [=](const Vec& x) {
    if (!(x[0] > 0.0)) return false;
    const double rad = radicand(x[0], x[1]);
    if (!(rad > 0.0)) return false;
    const double root = std::sqrt(rad);
    return log_arg(x[0], x[1], root) != 0.0 && c * x[1] + root != 0.0;
  };
  // Real part of the principal branch; the imaginary part is quadratic in x.
  s.f = [=](const Vec& x) {
    const double x1 = x[0], x2 = x[1];
    const double rad = radicand(x1, x2);
    if (!(rad > 0.0) || !(x1 > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double root = std::sqrt(rad);
    const double t1 = 2.0 * x2 * root;
    const double t2 = 2.0 * c * x1 * x1 * std::log(std::abs((c * x2 + root) / x1));
    const double t3 = -k * (x1 * x1 + x2 * x2) * std::log(std::abs(log_arg(x1, x2, root)));
    return (t1 + t2 + t3) / (4.0 * a * c);
  };

  if (std::abs(a - 1.0) < 1e-12 && std::abs(c - 2.0 / std::sqrt(7.0)) < 1e-12) {
    s.closed_form = [](const Vec& x) {
      const double x1 = x[0], x2 = x[1];
      const double x1s = x1 * x1, x2s = x2 * x2;
      const double q = 3.0 * x1s + 4.0 * x2s;
      const double s3 = std::sqrt(q * q * q);
      const double p = 3.0 * x1s * x1s + 7.0 * x1s * x2s + 4.0 * x2s * x2s;
      const double den = 2.0 * p * p;
      const double x1_4 = x1s * x1s, x1_6 = x1_4 * x1s, x1_8 = x1_4 * x1_4;
      const double x2_3 = x2s * x2, x2_4 = x2s * x2s, x2_5 = x2_4 * x2, x2_6 = x2_4 * x2s, x2_7 = x2_6 * x2;
      Tensor3 t(2);
      const double c111 = -(9 * x1_8 + 51 * x1_6 * x2s + 88 * x1_4 * x2_4 + (2 * x1s * x2_3 + 4 * x2_5) * s3 +
                            48 * x1s * x2_6) /
                          (x1 * den);
      const double c112 = (9 * x1_6 * x2 + 15 * x1_4 * x2_3 - 8 * x1s * x2_5 + (2 * x1s * x2s + 4 * x2_4) * s3 -
                           16 * x2_7) /
                          den;
      const double c122 = -(9 * x1_6 * x1 + 15 * x1_4 * x1 * x2s - 8 * x1s * x1 * x2_4 +
                            (2 * x1s * x1 * x2 + 4 * x1 * x2_3) * s3 - 16 * x1 * x2_6) /
                          den;
      const double c222 = (-27 * x1_6 * x2 - 16 * x2_7 - 72 * x1s * x2_5 + (4 * x1s * x2s + 2 * x1_4) * s3 -
                           81 * x1_4 * x2_3) /
                          den;
      t(0, 0, 0) = c111;
      t(0, 0, 1) = t(0, 1, 0) = t(1, 0, 0) = c112;
      t(0, 1, 1) = t(1, 0, 1) = t(1, 1, 0) = c122;
      t(1, 1, 1) = c222;
      return t;
    };
  }
  return s;
}

PrepotentialSpec example12_prepotential(double q) {
  PrepotentialSpec s;
  s.name = "example12";
  s.n = 2;
  s.eta = Eigen::MatrixXd::Identity(2, 2);
  s.euler = default_euler(2);
  s.in_domain = [q](const Vec& x) {
    const double r = std::hypot(x[0], x[1]);
    if (!(r > 0.0)) return false;
    // Keep FD stencils of the q-term off the atan2 cut.
    return q == 0.0 || !(x[1] < 0.0 && std::abs(x[0]) < 0.05 * r);
  };
  s.f = [q](const Vec& x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    return q * r2 * std::atan2(x[0], x[1]) - 0.125 * r2 * std::log(r2);
  };
  s.closed_form = [q](const Vec& x) {
    const double x1 = x[0], x2 = x[1];
    const double r2 = x1 * x1 + x2 * x2;
    const double r4 = r2 * r2;
    Tensor3 t(2);
    const double c111 = (8 * q * x2 * x2 * x2 - x1 * x1 * x1 - 3 * x1 * x2 * x2) / (2 * r4);
    const double c112 = x2 * (x1 * x1 - x2 * x2) / (2 * r4) - 4 * q * x1 * x2 * x2 / r4;
    const double c122 = x1 * (8 * q * x1 * x2 - x1 * x1 + x2 * x2) / (2 * r4);
    const double c222 = (-8 * q * x1 * x1 * x1 - 3 * x1 * x1 * x2 - x2 * x2 * x2) / (2 * r4);
    t(0, 0, 0) = c111;
    t(0, 0, 1) = t(0, 1, 0) = t(1, 0, 0) = c112;
    t(0, 1, 1) = t(1, 0, 1) = t(1, 1, 0) = c122;
    t(1, 1, 1) = c222;
    return t;
  };
  return s;
}

PrepotentialSpec polynomial_prepotential(int n, Eigen::MatrixXd eta, std::vector<Monomial> monomials,
                                         std::optional<EulerData> euler, std::string name) {
  if (n < 1) throw Error(Errc::InvalidArgument, "N must be positive");
  if (eta.rows() != n || eta.cols() != n) throw Error(Errc::InvalidArgument, "eta must be N x N");
  if ((eta - eta.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw Error(Errc::InvalidArgument, "eta must be symmetric");
  inverse_metric(eta);  // throws when singular
  for (const auto& m : monomials) {
    if (static_cast<int>(m.powers.size()) != n) throw Error(Errc::InvalidArgument, "monomial has wrong arity");
    for (int p : m.powers)
      if (p < 0) throw Error(Errc::InvalidArgument, "negative power in monomial");
  }
  if (euler && static_cast<int>(euler->degrees.size()) != n)
    throw Error(Errc::InvalidArgument, "Euler degrees have wrong size");

  auto mons = std::make_shared<const std::vector<Monomial>>(std::move(monomials));
  PrepotentialSpec s;
  s.name = std::move(name);
  s.n = n;
  s.eta = std::move(eta);
  s.euler = std::move(euler);
  s.f = [mons](const Vec& x) {
    double sum = 0.0;
    for (const auto& m : *mons) {
      double v = m.coeff;
      for (std::size_t i = 0; i < m.powers.size(); ++i) v *= std::pow(x[static_cast<Eigen::Index>(i)], m.powers[i]);
      sum += v;
    }
    return sum;
  };
  s.closed_form = [mons, n](const Vec& x) {
    Tensor3 t(n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          double sum = 0.0;
          for (const auto& m : *mons) {
            std::vector<int> p = m.powers;
            double v = m.coeff;
            for (int idx : {a, b, c}) {
              auto& e = p[static_cast<std::size_t>(idx)];
              v *= e;
              --e;
              if (v == 0.0) break;
            }
            if (v == 0.0) continue;
            for (std::size_t i = 0; i < p.size(); ++i) v *= std::pow(x[static_cast<Eigen::Index>(i)], p[i]);
            sum += v;
          }
          t(a, b, c) = sum;
        }
    return t;
  };
  return s;
}

}  // namespace singspec::frobenius
