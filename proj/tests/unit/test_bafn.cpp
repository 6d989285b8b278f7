#include "singspec/bafn.hpp"
#include "singspec/catalog.hpp"
#include "singspec/error.hpp"

#include "generators.hpp"

#include <doctest.h>

#include <cmath>

using namespace singspec;
using curve::CurvePoint;
using curve::ExtendedComplex;
using cplx = std::complex<double>;

namespace {

struct TwoLine {
  double b = 1.0, c = 2.0, a = 0.0, r = 0.0;
  curve::SpectralData data;
};

TwoLine two_line() {
  TwoLine t;
  const auto pr = catalog::example5_parameters(t.b, t.c);
  t.a = pr.a;
  t.r = pr.r;
  t.data = catalog::example5_data(t.b, t.c, t.a, t.r);
  return t;
}

// Oracle: the two gluing rows and the normalization row written out by hand,
// unknowns (f0, g0, g1), solved with full pivoting.
Eigen::Vector3cd two_line_by_hand(const TwoLine& t, double u1, double u2, Eigen::Matrix3cd* matrix = nullptr) {
  Eigen::Matrix3cd m;
  m << std::exp(u1 * t.a), -std::exp(u2 * t.b), -std::exp(u2 * t.b) / (t.b - t.c),  //
      std::exp(-u1 * t.a), -std::exp(-u2 * t.b), -std::exp(-u2 * t.b) / (-t.b - t.c),  //
      0.0, std::exp(u2 * t.r), std::exp(u2 * t.r) / (t.r - t.c);
  Eigen::Vector3cd rhs(0.0, 0.0, 1.0);
  if (matrix) *matrix = m;
  return m.fullPivLu().solve(rhs);
}

Eigen::VectorXd uvec(double a, double b) {
  Eigen::VectorXd u(2);
  u << a, b;
  return u;
}

}  // namespace

TEST_CASE("euclidean systems are diagonal") {
  const auto d = catalog::euclidean_data(2);
  const auto sol = bafn::solve_ba(d, uvec(0.3, -0.2));
  CHECK(std::abs(sol.coefficients[0] - std::exp(0.3)) < 1e-14);
  CHECK(std::abs(sol.coefficients[1] - std::exp(-0.2)) < 1e-14);
  const auto x = bafn::coordinates(d, sol);
  CHECK(std::abs(x[0] - 1.3498588075760032) < 1e-12);
  CHECK(bafn::lame_coefficient(d, sol, 0) == doctest::Approx(std::exp(0.3)).epsilon(1e-14));
  CHECK(bafn::lame_coefficient(d, sol, 1) == doctest::Approx(std::exp(-0.2)).epsilon(1e-14));

  const auto p = bafn::assemble_system(d, uvec(0.3, -0.2));
  CHECK(std::abs(p.matrix(0, 0) - std::exp(-0.3)) < 1e-15);
}

TEST_CASE("two-line system at the origin") {
  const auto t = two_line();
  const auto sol = bafn::solve_ba(t.data, uvec(0.0, 0.0));
  REQUIRE(sol.coefficients.size() == 3);
  CHECK(std::abs(sol.coefficients[0] - 1.0) < 1e-14);
  CHECK(std::abs(sol.coefficients[1] - 1.0) < 1e-14);
  CHECK(std::abs(sol.coefficients[2]) < 1e-14);
  CHECK(std::abs(bafn::evaluate_ba(t.data, sol, {0, 0.0}) - 1.0) < 1e-14);
  CHECK(std::abs(bafn::evaluate_ba(t.data, sol, {1, 0.0}) - 1.0) < 1e-14);
  CHECK(bafn::lame_coefficient(t.data, sol, 0) == doctest::Approx(1.0));

  Eigen::Matrix3cd hand;
  two_line_by_hand(t, 0.0, 0.0, &hand);
  const auto p = bafn::assemble_system(t.data, uvec(0.0, 0.0));
  CHECK((p.matrix - hand).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("property: two-line solutions match the hand-written system") {
  const auto t = two_line();
  testgen::Gen gen(4001);
  for (int trial = 0; trial < 25; ++trial) {
    const double u1 = gen.uniform(-1.5, 1.5), u2 = gen.uniform(-1.5, 1.5);
    const auto sol = bafn::solve_ba(t.data, uvec(u1, u2));
    const auto hand = two_line_by_hand(t, u1, u2);
    CHECK((sol.coefficients - hand).norm() <= 1e-12 * hand.norm());
  }
}

TEST_CASE("property: solutions satisfy every constraint and normalization") {
  testgen::Gen gen(4002);
  const auto t = two_line();
  const auto e = catalog::euclidean_data(3);
  for (int trial = 0; trial < 25; ++trial) {
    for (const auto* d : {&t.data, &e}) {
      const Eigen::VectorXd u = gen.vector(d->dimension(), -1.0, 1.0);
      const auto sol = bafn::solve_ba(*d, u);
      for (const auto& c : d->constraints) {
        cplx lhs{0.0, 0.0};
        double scale = 0.0;
        for (const auto& term : c.terms) {
          const cplx v = term.coefficient * bafn::evaluate_ba(*d, sol, term.point, term.order);
          lhs += v;
          scale = std::max(scale, std::abs(v));
        }
        CHECK(std::abs(lhs - c.rhs) <= 1e-10 * std::max(1.0, scale));
      }
      for (const auto& n : d->normalizations)
        CHECK(std::abs(bafn::evaluate_ba(*d, sol, n.point) - n.value) <= 1e-12);
    }
  }
}

TEST_CASE("property: coefficients depend smoothly on u") {
  // Oracle: implicit differentiation A dc/du = -(dA/du) c, with dA/du read off
  // the exponents k(point) of each entry.
  const auto t = two_line();
  testgen::Gen gen(4003);
  for (int trial = 0; trial < 10; ++trial) {
    const double u1 = gen.uniform(-1.0, 1.0), u2 = gen.uniform(-1.0, 1.0);
    Eigen::Matrix3cd m;
    const Eigen::Vector3cd c = two_line_by_hand(t, u1, u2, &m);
    Eigen::Matrix3cd d1 = Eigen::Matrix3cd::Zero(), d2 = Eigen::Matrix3cd::Zero();
    d1(0, 0) = t.a * m(0, 0);
    d1(1, 0) = -t.a * m(1, 0);
    for (int k = 1; k < 3; ++k) {
      d2(0, k) = t.b * m(0, k);
      d2(1, k) = -t.b * m(1, k);
      d2(2, k) = t.r * m(2, k);
    }
    const Eigen::Vector3cd dc1 = -m.fullPivLu().solve(d1 * c);
    const Eigen::Vector3cd dc2 = -m.fullPivLu().solve(d2 * c);

    const double h = 1e-5;
    const Eigen::VectorXcd fd1 = (bafn::solve_ba(t.data, uvec(u1 + h, u2)).coefficients -
                      bafn::solve_ba(t.data, uvec(u1 - h, u2)).coefficients) / (2.0 * h);
    const Eigen::VectorXcd fd2 = (bafn::solve_ba(t.data, uvec(u1, u2 + h)).coefficients -
                      bafn::solve_ba(t.data, uvec(u1, u2 - h)).coefficients) / (2.0 * h);
    CHECK((fd1 - dc1).norm() < 1e-7 * (1.0 + dc1.norm()));
    CHECK((fd2 - dc2).norm() < 1e-7 * (1.0 + dc2.norm()));
  }
}

TEST_CASE("degenerate placements fail loudly") {
  const auto d = catalog::example5_data(1.0, 1.0, 0.5, 0.7);
  try {
    bafn::solve_ba(d, uvec(0.0, 0.0));
    FAIL("expected a failure");
  } catch (const Error& e) {
    CHECK((e.code() == Errc::ChartError || e.code() == Errc::SingularSystem || e.code() == Errc::IllConditioned));
  }
}

TEST_CASE("complex normalizations break reality of H") {
  auto d = catalog::euclidean_data(2);
  d.normalizations[0].value = cplx{0.0, 1.0};
  const auto sol = bafn::solve_ba(d, uvec(0.1, 0.1));
  try {
    bafn::lame_coefficient(d, sol, 0);
    FAIL("expected NonRealLame");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonRealLame);
  }
  CHECK(bafn::lame_coefficient(d, sol, 1) == doctest::Approx(std::exp(0.1)));
}

TEST_CASE("evaluation errors") {
  const auto t = two_line();
  const auto sol = bafn::solve_ba(t.data, uvec(0.2, 0.1));
  try {
    bafn::evaluate_ba(t.data, sol, {1, t.c});
    FAIL("expected PoleEvaluation");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::PoleEvaluation);
  }
  try {
    bafn::evaluate_ba(t.data, sol, {0, ExtendedComplex::infinity()});
    FAIL("expected ChartError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ChartError);
  }
  CHECK_THROWS_AS(bafn::solve_ba(t.data, Eigen::VectorXd::Zero(3)), Error);
}

TEST_CASE("cusp rows use exact derivatives") {
  // One line, essential point at infinity, a double pole at 0, a cusp
  // psi'(1) = 0, a general condition psi''(-1) + 2 psi(2) = 0, psi(3) = 1.
  curve::SpectralData d;
  d.n_components = 1;
  d.essentials = {{{0, ExtendedComplex::infinity()}, 0}};
  d.poles = {{{0, 0.0}, 2}};
  d.constraints.push_back(curve::cusp({0, 1.0}, 1));
  curve::LinearConstraint general;
  general.terms = {{{0, -1.0}, 2, 1.0}, {{0, 2.0}, 0, 2.0}};
  d.constraints.push_back(general);
  d.normalizations = {{{0, 3.0}, 1.0}};
  d.evaluations = {{0, 0.5}};
  d.signature = {1};
  d.eta = Eigen::MatrixXd::Identity(1, 1);
  REQUIRE(curve::validate(d).ok());

  const auto sol = bafn::solve_ba(d, Eigen::VectorXd::Constant(1, 0.4));
  // Oracle: psi(z) = e^(0.4 z) (f0 + f1/z + f2/z^2), differentiated by central differences in z.
  auto psi = [&](double z) { return bafn::evaluate_ba(d, sol, {0, z}); };
  const double h = 1e-4;
  for (double z : {1.0, -1.0, 2.5}) {
    const cplx d1 = (psi(z + h) - psi(z - h)) / (2.0 * h);
    const cplx d2 = (psi(z + h) - 2.0 * psi(z) + psi(z - h)) / (h * h);
    const cplx d3 = (psi(z + 2 * h) - 2.0 * psi(z + h) + 2.0 * psi(z - h) - psi(z - 2 * h)) / (2.0 * h * h * h);
    CHECK(std::abs(bafn::evaluate_ba(d, sol, {0, z}, 1) - d1) < 1e-6 * (1.0 + std::abs(d1)));
    CHECK(std::abs(bafn::evaluate_ba(d, sol, {0, z}, 2) - d2) < 1e-4 * (1.0 + std::abs(d2)));
    CHECK(std::abs(bafn::evaluate_ba(d, sol, {0, z}, 3) - d3) < 1e-2 * (1.0 + std::abs(d3)));
  }
  CHECK(std::abs(bafn::evaluate_ba(d, sol, {0, 1.0}, 1)) < 1e-12);
  const cplx g = bafn::evaluate_ba(d, sol, {0, -1.0}, 2) + 2.0 * bafn::evaluate_ba(d, sol, {0, 2.0});
  CHECK(std::abs(g) < 1e-12);
}

TEST_CASE("finite essential points use k = 1/(z - z0)") {
  // psi = e^(u/(z - 1)) (f0 + f1/(z + 1)), psi(0) = psi(2), psi(3) = 1.
  curve::SpectralData d;
  d.n_components = 1;
  d.essentials = {{{0, 1.0}, 0}};
  d.poles = {{{0, -1.0}, 1}};
  d.constraints = {curve::gluing({0, 0.0}, {0, 2.0})};
  d.normalizations = {{{0, 3.0}, 1.0}};
  d.evaluations = {{0, 0.5}};
  d.signature = {1};
  d.eta = Eigen::MatrixXd::Identity(1, 1);
  REQUIRE(curve::validate(d).ok());
  const double u = 0.3;
  const auto sol = bafn::solve_ba(d, Eigen::VectorXd::Constant(1, u));

  // Oracle by hand: rows [e^(-u), e^(-u)] - [e^u, e^u/3] and [e^(u/2), e^(u/2)/4].
  Eigen::Matrix2d m;
  m << std::exp(-u) - std::exp(u), std::exp(-u) - std::exp(u) / 3.0, std::exp(u / 2), std::exp(u / 2) / 4.0;
  const Eigen::Vector2d f = m.fullPivLu().solve(Eigen::Vector2d(0.0, 1.0));
  CHECK(std::abs(sol.coefficients[0] - f[0]) < 1e-12);
  CHECK(std::abs(sol.coefficients[1] - f[1]) < 1e-12);
  // H = regular part at z0 = 1.
  CHECK(bafn::lame_coefficient(d, sol, 0) == doctest::Approx(f[0] + f[1] / 2.0).epsilon(1e-12));
  // Infinity is an ordinary point here: psi(inf) = f0.
  CHECK(std::abs(bafn::evaluate_ba(d, sol, {0, ExtendedComplex::infinity()}) - f[0]) < 1e-12);
}
