#include "singspec/numeric.hpp"

#include "singspec/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace singspec::numeric {

namespace {

struct Node {
  std::vector<int> offset;
  double weight;
};

// One-dimensional central stencils in units of the step.
const std::vector<std::pair<int, double>>& axis_stencil(int order) {
  static const std::vector<std::pair<int, double>> d1{{-1, -0.5}, {1, 0.5}};
  static const std::vector<std::pair<int, double>> d2{{-1, 1.0}, {0, -2.0}, {1, 1.0}};
  static const std::vector<std::pair<int, double>> d3{{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}};
  switch (order) {
    case 1: return d1;
    case 2: return d2;
    case 3: return d3;
    default: throw Error(Errc::InvalidArgument, "per-axis derivative order must be 1..3");
  }
}

std::vector<Node> build_stencil(const std::vector<int>& multi_index) {
  std::vector<Node> nodes{{std::vector<int>(multi_index.size(), 0), 1.0}};
  for (std::size_t axis = 0; axis < multi_index.size(); ++axis) {
    if (multi_index[axis] == 0) continue;
    std::vector<Node> next;
    for (const auto& n : nodes) {
      for (const auto& [off, w] : axis_stencil(multi_index[axis])) {
        Node m = n;
        m.offset[axis] += off;
        m.weight *= w;
        next.push_back(std::move(m));
      }
    }
    nodes = std::move(next);
  }
  return nodes;
}

int validate_multi_index(const std::vector<int>& multi_index, Eigen::Index dim) {
  if (static_cast<Eigen::Index>(multi_index.size()) != dim)
    throw Error(Errc::InvalidArgument, "multi_index length must match the point dimension");
  int total = 0;
  for (int m : multi_index) {
    if (m < 0) throw Error(Errc::InvalidArgument, "negative derivative order");
    total += m;
  }
  if (total < 1 || total > 3) throw Error(Errc::InvalidArgument, "total derivative order must be in [1, 3]");
  return total;
}

Vec apply_stencil(const VectorFunction& f, const Vec& point, const std::vector<Node>& nodes, double h,
                  int total_order) {
  Vec acc;
  for (const auto& n : nodes) {
    Vec p = point;
    for (std::size_t a = 0; a < n.offset.size(); ++a) p[static_cast<Eigen::Index>(a)] += n.offset[a] * h;
    Vec v = f(p);
    if (!v.allFinite()) {
      std::ostringstream os;
      os << "target returned a non-finite value at stencil node " << p.transpose();
      throw Error(Errc::NonFiniteSample, os.str());
    }
    if (acc.size() == 0) acc = Vec::Zero(v.size());
    acc += n.weight * v;
  }
  return acc / std::pow(h, total_order);
}

void check_domain(const std::optional<Box>& domain, const Vec& point, double reach) {
  if (!domain) return;
  Vec lo = point.array() - reach;
  Vec hi = point.array() + reach;
  if (!domain->contains(lo) || !domain->contains(hi)) {
    std::ostringstream os;
    os << "stencil around " << point.transpose() << " leaves the declared domain";
    throw Error(Errc::DomainViolation, os.str());
  }
}

}  // namespace

bool Box::contains(const Vec& p) const {
  if (p.size() != lower.size() || p.size() != upper.size()) return false;
  return (p.array() >= lower.array()).all() && (p.array() <= upper.array()).all();
}

double default_step(int total_order, const Vec& point) {
  static constexpr double base[] = {0.0, 1e-3, 3e-3, 5e-3};
  const int k = std::clamp(total_order, 1, 3);
  const double scale = point.size() ? std::max(1.0, point.cwiseAbs().maxCoeff()) : 1.0;
  return base[k] * scale;
}

double stencil_reach(int total_order, double step) { return (total_order >= 3 ? 2.0 : 1.0) * step; }

Vec fd_derivative(const VectorFunction& target, const Vec& point, const std::vector<int>& multi_index, double step,
                  Vec* error_estimate, const std::optional<Box>& domain) {
  const int total = validate_multi_index(multi_index, point.size());
  const double h = step > 0.0 ? step : default_step(total, point);
  if (!std::isfinite(h)) throw Error(Errc::InvalidArgument, "step must be finite");
  check_domain(domain, point, stencil_reach(total, h));

  const auto nodes = build_stencil(multi_index);
  const Vec coarse = apply_stencil(target, point, nodes, h, total);
  const Vec fine = apply_stencil(target, point, nodes, 0.5 * h, total);
  // Central stencils have an even error expansion, so one Richardson step
  // with ratio 2 removes the h^2 term.
  Vec extrapolated = (4.0 * fine - coarse) / 3.0;
  if (error_estimate) *error_estimate = (extrapolated - fine).cwiseAbs();
  return extrapolated;
}

DerivativeResult fd_derivative(const DerivativeRequest& req) {
  if (!req.target) throw Error(Errc::InvalidArgument, "derivative request without a target");
  const ScalarFunction& f = req.target;
  VectorFunction wrapped = [&f](const Vec& p) { return Vec::Constant(1, f(p)); };
  Vec err;
  const Vec v = fd_derivative(wrapped, req.point, req.multi_index, req.step, &err, req.domain);
  return {v[0], err[0]};
}

Eigen::MatrixXd fd_jacobian(const VectorFunction& map, const Vec& point, double step,
                            const std::optional<Box>& domain) {
  const auto n = point.size();
  Eigen::MatrixXd jac;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<int> mi(static_cast<std::size_t>(n), 0);
    mi[static_cast<std::size_t>(i)] = 1;
    const Vec col = fd_derivative(map, point, mi, step, nullptr, domain);
    if (jac.size() == 0) jac.resize(col.size(), n);
    jac.col(i) = col;
  }
  return jac;
}

LinearSolution solve_dense(const LinearProblem& p) {
  const auto n = p.matrix.rows();
  if (n < 1 || p.matrix.cols() != n || p.rhs.size() != n)
    throw Error(Errc::InvalidArgument, "solve_dense needs a square system with matching rhs");

  const double scale = p.matrix.cwiseAbs().maxCoeff();
  if (!(scale > 0.0) || !std::isfinite(scale)) throw Error(Errc::SingularSystem, "matrix is zero or non-finite");

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(p.matrix);
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (min_pivot < kSingularPivotRatio * scale) {
    std::ostringstream os;
    os << "pivot " << min_pivot << " below " << kSingularPivotRatio << " * scale " << scale;
    throw Error(Errc::SingularSystem, os.str());
  }

  LinearSolution out;
  out.solution = lu.solve(p.rhs);
  const double rcond = lu.rcond();
  out.condition_estimate = rcond > 0.0 ? std::max(1.0, 1.0 / rcond) : std::numeric_limits<double>::infinity();
  out.ill_conditioned = out.condition_estimate > kIllConditionedWarning;
  return out;
}

}  // namespace singspec::numeric
