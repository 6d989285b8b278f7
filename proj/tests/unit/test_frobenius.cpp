#include "singspec/error.hpp"
#include "singspec/frobenius.hpp"

#include "generators.hpp"

#include <doctest.h>

#include <cmath>

using namespace singspec;
using frobenius::Tensor3;
using frobenius::Vec;

namespace {

Vec v2(double a, double b) {
  Vec u(2);
  u << a, b;
  return u;
}

// Third derivatives of q r^2 atan2(x1, x2) - r^2 log r^2 / 8, derived by hand.
Tensor3 example12_oracle(double q, double x1, double x2) {
  const double r4 = 2.0 * (x1 * x1 + x2 * x2) * (x1 * x1 + x2 * x2);
  const double c111 = (8.0 * q * x2 * x2 * x2 - x1 * x1 * x1 - 3.0 * x1 * x2 * x2) / r4;
  const double c112 = x2 * (x1 * x1 - x2 * x2 - 8.0 * q * x1 * x2) / r4;
  const double c122 = -x1 * (x1 * x1 - x2 * x2 - 8.0 * q * x1 * x2) / r4;
  const double c222 = -(8.0 * q * x1 * x1 * x1 + 3.0 * x1 * x1 * x2 + x2 * x2 * x2) / r4;
  Tensor3 c(2);
  c(0, 0, 0) = c111;
  c(0, 0, 1) = c(0, 1, 0) = c(1, 0, 0) = c112;
  c(0, 1, 1) = c(1, 0, 1) = c(1, 1, 0) = c122;
  c(1, 1, 1) = c222;
  return c;
}

// For N = 2 with eta = I the associativity equations collapse to one.
double wdvv_2d(const Tensor3& c) {
  return c(0, 0, 0) * c(0, 1, 1) + c(0, 0, 1) * c(1, 1, 1) - c(0, 0, 1) * c(0, 0, 1) - c(0, 1, 1) * c(0, 1, 1);
}

double max_diff(const Tensor3& a, const Tensor3& b) {
  double m = 0.0;
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < a.size(); ++j)
      for (int k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a(i, j, k) - b(i, j, k)));
  return m;
}

Vec annulus_point(testgen::Gen& g) {
  const double r = g.uniform(0.5, 2.0), th = g.uniform(-3.0, 3.0);
  return v2(r * std::cos(th), r * std::sin(th));
}

// A3 potential with antidiagonal metric.
frobenius::PrepotentialSpec a3(double quartic = 0.25) {
  Eigen::MatrixXd eta = Eigen::MatrixXd::Zero(3, 3);
  eta(0, 2) = eta(2, 0) = eta(1, 1) = 1.0;
  return frobenius::polynomial_prepotential(
      3, eta, {{0.5, {2, 0, 1}}, {0.5, {1, 2, 0}}, {quartic, {0, 2, 2}}, {1.0 / 60.0, {0, 0, 5}}},
      frobenius::EulerData{{1.0, 0.75, 0.5}, 2.5}, "A3");
}

}  // namespace

TEST_CASE("example12 correlators at (1, 0)") {
  const auto c = frobenius::correlators(frobenius::example12_prepotential(0.0), v2(1.0, 0.0)).c;
  CHECK(std::abs(c(0, 0, 0) + 0.5) < 1e-12);
  CHECK(std::abs(c(0, 0, 1)) < 1e-12);
  CHECK(std::abs(c(0, 1, 1) + 0.5) < 1e-12);
  CHECK(std::abs(c(1, 1, 1)) < 1e-12);
}

TEST_CASE("property: example12 closed form matches the oracle and finite differences") {
  testgen::Gen gen(7001);
  for (double q : {0.0, 0.3, 1.0}) {
    const auto spec = frobenius::example12_prepotential(q);
    for (int i = 0; i < 20; ++i) {
      Vec x = annulus_point(gen);
      if (!spec.in_domain(x)) continue;
      const auto exact = frobenius::correlators(spec, x);
      CHECK(exact.closed_form);
      CHECK(max_diff(exact.c, example12_oracle(q, x[0], x[1])) < 1e-12);
      CHECK(max_diff(frobenius::fd_correlators(spec, x).c, exact.c) < 1e-6);
    }
  }
}

TEST_CASE("property: associativity on example12 and example11") {
  testgen::Gen gen(7002);
  for (double q : {0.0, 0.3}) {
    const auto spec = frobenius::example12_prepotential(q);
    for (int i = 0; i < 20; ++i) {
      const Vec x = annulus_point(gen);
      if (!spec.in_domain(x)) continue;
      CHECK(std::abs(wdvv_2d(example12_oracle(q, x[0], x[1]))) < 1e-12);
      CHECK(frobenius::wdvv_residual(spec, x) < 1e-6);
    }
  }
  const auto e11 = frobenius::example11_prepotential();
  for (int i = 0; i < 20; ++i) {
    const Vec x = v2(gen.uniform(0.3, 1.0), gen.uniform(0.3, 1.0));
    if (!e11.in_domain(x)) continue;
    const auto cf = frobenius::correlators(e11, x);
    CHECK(max_diff(cf.c, frobenius::fd_correlators(e11, x).c) < 1e-6);
    CHECK(std::abs(wdvv_2d(cf.c)) < 1e-9);
    CHECK(frobenius::wdvv_residual(e11, x) < 1e-6);
  }
}

TEST_CASE("quasihomogeneity") {
  testgen::Gen gen(7003);
  for (double q : {0.0, 0.3, 1.0}) {
    const auto spec = frobenius::example12_prepotential(q);
    const Vec x = v2(0.8, 0.9);
    CHECK(frobenius::quasihom_residual(spec, x, {0.5, 2.0, 3.0}) < 1e-6);
  }
  CHECK(frobenius::quasihom_residual(frobenius::example11_prepotential(), v2(0.6, 0.5), {0.5, 2.0}) < 1e-6);
  // c_111 = 1 is constant and cannot scale like 1 / lambda.
  const auto cubic = frobenius::polynomial_prepotential(1, Eigen::MatrixXd::Identity(1, 1), {{1.0 / 6.0, {3}}});
  CHECK(frobenius::quasihom_residual(cubic, Vec::Constant(1, 0.7), {2.0}) > 0.1);
  CHECK(frobenius::quasihom_residual(a3(), Vec::Constant(3, 0.4), {0.5, 2.0, 3.0}) < 1e-9);
}

TEST_CASE("polynomial prepotentials") {
  const auto decoupled =
      frobenius::polynomial_prepotential(2, Eigen::MatrixXd::Identity(2, 2), {{1.0 / 6.0, {3, 0}}, {1.0 / 6.0, {0, 3}}});
  testgen::Gen gen(7004);
  for (int i = 0; i < 10; ++i) {
    const Vec x = gen.vector(2, -1.0, 1.0);
    CHECK(frobenius::wdvv_residual(decoupled, x) < 1e-12);
    const Vec y = gen.vector(3, -1.0, 1.0);
    CHECK(frobenius::wdvv_residual(a3(), y) < 1e-12);
    CHECK(frobenius::wdvv_residual(a3(1.0 / 3.0), y) > 1e-6);
  }
  const auto c = frobenius::correlators(decoupled, v2(0.3, -0.2)).c;
  CHECK(c(0, 0, 0) == doctest::Approx(1.0));
  CHECK(c(0, 0, 1) == doctest::Approx(0.0));
}

TEST_CASE("unit and nilpotent extension") {
  testgen::Gen gen(7005);
  const auto base = frobenius::example12_prepotential(0.3);
  const auto ext = frobenius::extend(base);
  CHECK_FALSE(ext.euler_extension_unavailable);
  for (int i = 0; i < 10; ++i) {
    const Vec x = annulus_point(gen);
    if (!base.in_domain(x)) continue;
    Vec t(4);
    t << gen.uniform(-1, 1), x[0], x[1], gen.uniform(-1, 1);
    const auto rep = frobenius::verify_algebra(ext, t);
    CHECK(rep.ok());
    CHECK(rep.wdvv < 1e-9);
  }
  Vec t(4);
  t << 0.2, 0.8, 0.9, -0.4;
  const auto ablated = frobenius::verify_algebra(frobenius::extend(base, {true}), t);
  CHECK_FALSE(ablated.unit_ok);

  // F = 0 still gives a valid extension: only the cubic border survives.
  const auto zero = frobenius::polynomial_prepotential(2, Eigen::MatrixXd::Identity(2, 2), {});
  CHECK(frobenius::verify_algebra(frobenius::extend(zero), t).ok());

  // Metric pairs with different degree sums cannot share one Euler field.
  Eigen::MatrixXd eta = Eigen::MatrixXd::Identity(2, 2);
  const auto mixed = frobenius::polynomial_prepotential(2, eta, {{1.0, {3, 0}}}, frobenius::EulerData{{1.0, 2.0}, 3.0});
  CHECK(frobenius::extend(mixed).euler_extension_unavailable);
  const auto ext_a3 = frobenius::extend(a3());
  REQUIRE(ext_a3.extended.euler.has_value());
  CHECK(frobenius::quasihom_residual(ext_a3.extended, Vec::Constant(5, 0.3), {2.0}) < 1e-9);
}

TEST_CASE("domain and tensor helpers") {
  CHECK_THROWS_AS(frobenius::correlators(frobenius::example12_prepotential(0.0), v2(0.0, 0.0)), Error);
  try {
    frobenius::correlators(frobenius::example12_prepotential(0.0), v2(0.0, 0.0));
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DomainViolation);
  }
  Tensor3 t(2);
  t(0, 0, 1) = 1.0;
  CHECK(t.symmetry_defect() == doctest::Approx(1.0));
  t.symmetrize();
  CHECK(t.symmetry_defect() == doctest::Approx(0.0));
  CHECK(t(1, 0, 0) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(frobenius::inverse_metric(Eigen::MatrixXd::Zero(2, 2)), Error);
}
