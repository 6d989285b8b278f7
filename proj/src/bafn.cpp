#include "singspec/bafn.hpp"

#include "singspec/error.hpp"

#include <cmath>
#include <sstream>

namespace singspec::bafn {

using curve::CurvePoint;
using curve::SpectralData;

namespace {

struct PoleRef {
  cplx alpha;
  int multiplicity;
};

std::vector<PoleRef> poles_on(const SpectralData& data, int component) {
  std::vector<PoleRef> out;
  for (const auto& p : data.poles)
    if (p.point.component == component) out.push_back({p.point.z.value(), p.multiplicity});
  return out;
}

int block_size(const std::vector<PoleRef>& poles) {
  int n = 1;
  for (const auto& p : poles) n += p.multiplicity;
  return n;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Exponent s(z) = sum u^v k_v(z) on `component`, skipping essential `skip`.
cplx exponent(const SpectralData& data, const Eigen::VectorXd& u, int component, cplx z, int skip = -1) {
  cplx s{0.0, 0.0};
  for (std::size_t e = 0; e < data.essentials.size(); ++e) {
    const auto& ess = data.essentials[e];
    if (ess.point.component != component || static_cast<int>(e) == skip) continue;
    const double uv = u[ess.variable];
    s += ess.point.z.is_infinite() ? uv * z : uv / (z - ess.point.z.value());
  }
  return s;
}

// m-th derivative of the exponent, m >= 1.
cplx exponent_derivative(const SpectralData& data, const Eigen::VectorXd& u, int component, cplx z, int m) {
  cplx s{0.0, 0.0};
  for (const auto& ess : data.essentials) {
    if (ess.point.component != component) continue;
    const double uv = u[ess.variable];
    if (ess.point.z.is_infinite()) {
      if (m == 1) s += uv;
    } else {
      double fact = 1.0;
      for (int i = 2; i <= m; ++i) fact *= i;
      const double sign = (m % 2) ? -1.0 : 1.0;
      s += uv * sign * fact / std::pow(z - ess.point.z.value(), m + 1);
    }
  }
  return s;
}

bool has_essential_at_infinity(const SpectralData& data, int component) {
  for (const auto& e : data.essentials)
    if (e.point.component == component && e.point.z.is_infinite()) return true;
  return false;
}

// Coefficients of psi^(order)(at) with respect to the unknowns of the
// component of `at`. `pole_code` selects the error raised on a pole hit.
Eigen::VectorXcd basis_row(const SpectralData& data, const Eigen::VectorXd& u, const CurvePoint& at, int order,
                           Errc pole_code) {
  const auto poles = poles_on(data, at.component);
  Eigen::VectorXcd row = Eigen::VectorXcd::Zero(block_size(poles));

  if (at.z.is_infinite()) {
    if (order != 0) throw Error(Errc::ChartError, "derivatives at infinity are not supported");
    if (has_essential_at_infinity(data, at.component))
      throw Error(Errc::ChartError, "infinity carries an essential singularity on this component");
    row[0] = 1.0;  // finite essential exponents vanish at infinity, pole terms decay
    return row;
  }

  const cplx z = at.z.value();
  for (const auto& p : poles) {
    if (std::abs(z - p.alpha) <= 1e-12 * std::max(1.0, std::abs(p.alpha))) {
      std::ostringstream os;
      os << "point z=" << z << " on component " << at.component << " coincides with a pole";
      throw Error(pole_code, os.str());
    }
  }
  for (const auto& e : data.essentials) {
    if (e.point.component == at.component && e.point.same_as(at))
      throw Error(Errc::ChartError, "point coincides with an essential singularity");
  }

  // E^(n) via E^(n) = sum_m C(n-1, m) s^(m+1) E^(n-1-m).
  std::vector<cplx> ds(static_cast<std::size_t>(order) + 1, 0.0);
  for (int m = 1; m <= order; ++m) ds[static_cast<std::size_t>(m)] = exponent_derivative(data, u, at.component, z, m);
  std::vector<cplx> e(static_cast<std::size_t>(order) + 1, 0.0);
  e[0] = std::exp(exponent(data, u, at.component, z));
  for (int n = 1; n <= order; ++n) {
    cplx acc{0.0, 0.0};
    for (int m = 0; m <= n - 1; ++m)
      acc += binomial(n - 1, m) * ds[static_cast<std::size_t>(m) + 1] * e[static_cast<std::size_t>(n - 1 - m)];
    e[static_cast<std::size_t>(n)] = acc;
  }

  // Product rule against each rational basis function.
  row[0] = e[static_cast<std::size_t>(order)];
  int col = 1;
  for (const auto& p : poles) {
    const cplx w = z - p.alpha;
    for (int k = 1; k <= p.multiplicity; ++k, ++col) {
      cplx acc{0.0, 0.0};
      for (int j = 0; j <= order; ++j) {
        // j-th derivative of w^-k: (-1)^j k(k+1)...(k+j-1) w^(-k-j)
        double rising = 1.0;
        for (int i = 0; i < j; ++i) rising *= k + i;
        const cplx rj = ((j % 2) ? -1.0 : 1.0) * rising * std::pow(w, -(k + j));
        acc += binomial(order, j) * e[static_cast<std::size_t>(order - j)] * rj;
      }
      row[col] = acc;
    }
  }
  return row;
}

void check_u(const SpectralData& data, const Eigen::VectorXd& u) {
  if (u.size() != data.dimension()) {
    throw Error(Errc::InvalidArgument, "parameter vector has " + std::to_string(u.size()) + " entries, expected " +
                                           std::to_string(data.dimension()));
  }
  if (!u.allFinite()) throw Error(Errc::InvalidArgument, "parameter vector is not finite");
}

}  // namespace

std::vector<int> unknown_offsets(const SpectralData& data) {
  std::vector<int> out;
  int off = 0;
  for (int c = 0; c < data.n_components; ++c) {
    out.push_back(off);
    off += block_size(poles_on(data, c));
  }
  return out;
}

numeric::LinearProblem assemble_system(const SpectralData& data, const Eigen::VectorXd& u) {
  check_u(data, u);
  const auto offsets = unknown_offsets(data);
  const int unknowns = data.unknown_count();
  const int rows = data.equation_count();
  numeric::LinearProblem p{Eigen::MatrixXcd::Zero(rows, unknowns), Eigen::VectorXcd::Zero(rows)};

  int r = 0;
  for (const auto& c : data.constraints) {
    if (c.terms.empty()) throw Error(Errc::InvalidArgument, "constraint without terms");
    for (const auto& t : c.terms) {
      const auto row = basis_row(data, u, t.point, t.order, Errc::ChartError);
      p.matrix.block(r, offsets[static_cast<std::size_t>(t.point.component)], 1, row.size()) +=
          t.coefficient * row.transpose();
    }
    p.rhs[r++] = c.rhs;
  }
  for (const auto& n : data.normalizations) {
    const auto row = basis_row(data, u, n.point, 0, Errc::ChartError);
    p.matrix.block(r, offsets[static_cast<std::size_t>(n.point.component)], 1, row.size()) = row.transpose();
    p.rhs[r++] = n.value;
  }
  return p;
}

BASolution solve_ba(const SpectralData& data, const Eigen::VectorXd& u) {
  const auto problem = assemble_system(data, u);
  const auto lin = numeric::solve_dense(problem);
  if (lin.condition_estimate > kConditionFailure) {
    std::ostringstream os;
    os << "condition estimate " << lin.condition_estimate << " exceeds " << kConditionFailure;
    throw Error(Errc::IllConditioned, os.str());
  }
  if (!lin.solution.allFinite()) throw Error(Errc::SingularSystem, "solution is not finite");
  return {u, lin.solution, lin.condition_estimate, lin.ill_conditioned};
}

cplx evaluate_ba(const SpectralData& data, const BASolution& sol, const CurvePoint& at, int derivative_order) {
  if (at.component < 0 || at.component >= data.n_components)
    throw Error(Errc::InvalidArgument, "component index out of range");
  const auto offsets = unknown_offsets(data);
  const auto row = basis_row(data, sol.u, at, derivative_order, Errc::PoleEvaluation);
  return (row.transpose() * sol.coefficients.segment(offsets[static_cast<std::size_t>(at.component)], row.size()))(0);
}

Eigen::VectorXcd coordinates(const SpectralData& data, const BASolution& sol) {
  Eigen::VectorXcd x(data.dimension());
  for (int j = 0; j < data.dimension(); ++j) x[j] = evaluate_ba(data, sol, data.evaluations[static_cast<std::size_t>(j)]);
  return x;
}

double lame_coefficient(const SpectralData& data, const BASolution& sol, int i) {
  int which = -1;
  for (std::size_t e = 0; e < data.essentials.size(); ++e)
    if (data.essentials[e].variable == i) which = static_cast<int>(e);
  if (which < 0) throw Error(Errc::InvalidArgument, "no essential point carries variable " + std::to_string(i));

  const auto& ess = data.essentials[static_cast<std::size_t>(which)];
  const int comp = ess.point.component;
  const auto poles = poles_on(data, comp);
  const auto offsets = unknown_offsets(data);
  const auto f = sol.coefficients.segment(offsets[static_cast<std::size_t>(comp)], block_size(poles));

  // Regular part at the essential point, times the other exponentials there.
  cplx h = f[0];
  cplx others{0.0, 0.0};
  if (!ess.point.z.is_infinite()) {
    const cplx z = ess.point.z.value();
    int col = 1;
    for (const auto& p : poles)
      for (int k = 1; k <= p.multiplicity; ++k, ++col) h += f[col] * std::pow(z - p.alpha, -k);
    others = exponent(data, sol.u, comp, z, which);
  } else {
    for (std::size_t e = 0; e < data.essentials.size(); ++e) {
      const auto& o = data.essentials[e];
      if (o.point.component == comp && static_cast<int>(e) != which && o.point.z.is_infinite())
        throw Error(Errc::InvalidArgument, "two essential points at infinity on one component");
    }
  }
  h *= std::exp(others);

  if (std::abs(h.imag()) > 1e-9 * std::abs(h)) {
    std::ostringstream os;
    os << "H_" << i << " = " << h << " is not real";
    throw Error(Errc::NonRealLame, os.str());
  }
  return h.real();
}

}  // namespace singspec::bafn
