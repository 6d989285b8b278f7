#include "singspec/error.hpp"
#include "singspec/sources.hpp"

#include "generators.hpp"

#include <doctest.h>

#include <cmath>

using namespace singspec;
using sources::SourceSolitonParams;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::InvalidArgument;
}

}  // namespace

TEST_CASE("tau is linear in t") {
  CHECK(sources::tau({1.0, 1.0, -1.0}, 0.0) == 1.0);
  CHECK(sources::tau({1.0, 1.0, -1.0}, 1.0) == 0.0);
  CHECK(sources::tau({1.0, 0.0, 2.0}, 0.5) == 1.0);
}

TEST_CASE("soliton and eigenfunction values") {
  CHECK(sources::soliton_u({1.0, 2.0, 0.0}, 0.0, 0.0) == doctest::Approx(-2.0).epsilon(1e-15));
  for (double x : {-3.0, 0.0, 1.7})
    for (double t : {0.0, 0.4}) CHECK(sources::soliton_u({1.3, 0.0, 0.0}, x, t) == 0.0);
  CHECK(code_of([] { sources::soliton_u({1.0, -2.0, 0.0}, 0.0, 0.0); }) == Errc::SingularSoliton);

  CHECK(sources::soliton_psi({1.0, 0.0, 0.0}, 0.5, 0.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(sources::soliton_psi({1.0, 2.0, 0.0}, 0.0, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(code_of([] { sources::soliton_psi({1.0, -2.0, 0.0}, 0.0, 0.0); }) == Errc::SingularSoliton);
  CHECK(code_of([] { sources::soliton_u({0.0, 1.0, 0.0}, 0.0, 0.0); }) == Errc::InvalidArgument);
}

TEST_CASE("source KdV residual on the standard grid") {
  const auto sweep = sources::residual_sweep({1.0, 1.0, 0.5}, -5.0, 5.0, 41, 0.0, 1.0, 11);
  CHECK(sweep.skipped == 0);
  CHECK(sweep.max_residual < 1e-5);
  CHECK(sources::residual_sweep({1.0, 0.0, 0.0}, -5.0, 5.0, 11, 0.0, 1.0, 5).max_residual == 0.0);
  // tau crosses zero at t = 1: stencils reaching it are skipped.
  const auto crossing = sources::residual_sweep({1.0, 1.0, -1.0}, -5.0, 5.0, 11, 0.0, 1.0, 11);
  CHECK(crossing.skipped == 11);
  CHECK(crossing.max_residual < 1e-5);
}

TEST_CASE("property: residual for random parameters") {
  testgen::Gen gen(8001);
  for (int i = 0; i < 10; ++i) {
    const SourceSolitonParams p{gen.uniform(0.5, 1.5), gen.uniform(0.2, 3.0), gen.uniform(-0.1, 1.0)};
    const auto s = sources::residual_sweep(p, -5.0, 5.0, 21, 0.0, 1.0, 6);
    CHECK(s.max_residual < 1e-5);
  }
}

TEST_CASE("without a source the solution solves plain KdV") {
  const SourceSolitonParams p{1.2, 0.7, 0.0};
  for (double x : {-2.0, -0.5, 0.0, 0.8, 3.0}) {
    CHECK(sources::plain_kdv_residual(p, x, 0.3) < 1e-5);
    CHECK(sources::source_kdv_residual(p, x, 0.3) == doctest::Approx(sources::plain_kdv_residual(p, x, 0.3)));
  }
  // With a source the plain equation is violated.
  CHECK(sources::plain_kdv_residual({1.0, 1.0, 0.5}, 0.0, 0.2) > 1e-2);
}

TEST_CASE("double-point events") {
  const auto a = sources::annihilation_time({1.0, 1.0, -1.0});
  REQUIRE(a.has_value());
  CHECK(a->t_star == 1.0);
  CHECK(a->kind == sources::DoublePointEvent::Annihilation);
  CHECK(a->soliton_before);
  CHECK_FALSE(a->soliton_after);
  const auto c = sources::annihilation_time({1.0, 0.0, 1.0});
  REQUIRE(c.has_value());
  CHECK(c->t_star == 0.0);
  CHECK(c->kind == sources::DoublePointEvent::Creation);
  CHECK(sources::to_string(c->kind) == "creation");
  CHECK_FALSE(sources::annihilation_time({1.0, 1.0, 0.0}).has_value());
}

TEST_CASE("peak position and amplitude") {
  auto p = sources::peak_track({1.0, 2.0, 0.0}, 0.0);
  CHECK(std::abs(p.x) < 1e-15);
  CHECK(p.amplitude == doctest::Approx(-2.0).epsilon(1e-12));
  p = sources::peak_track({1.0, 2.0 * std::exp(2.0), 0.0}, 0.0);
  CHECK(p.x == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(code_of([] { sources::peak_track({1.0, 0.0, 0.0}, 0.0); }) == Errc::NoSoliton);
  CHECK(code_of([] { sources::peak_track({1.0, 1.0, -1.0}, 2.0); }) == Errc::NoSoliton);

  testgen::Gen gen(8002);
  for (int i = 0; i < 20; ++i) {
    const SourceSolitonParams q{gen.uniform(0.3, 2.0), gen.uniform(1e-3, 10.0), gen.uniform(-0.5, 0.5)};
    const double t = gen.uniform(0.0, 1.0);
    if (sources::tau(q, t) <= 0.0) continue;
    const auto pk = sources::peak_track(q, t);
    CHECK(std::abs(pk.amplitude + 2.0 * q.kappa * q.kappa) < 1e-9);
    // Independent check that the peak is a minimum of u.
    CHECK(sources::soliton_u(q, pk.x + 1e-3, t) > pk.amplitude);
    CHECK(sources::soliton_u(q, pk.x - 1e-3, t) > pk.amplitude);
  }
}

TEST_CASE("the soliton fades pointwise as tau goes to zero") {
  for (double x : {-1.0, 0.0, 2.0}) {
    double prev = std::abs(sources::soliton_u({1.0, 1e-2, 0.0}, x, 0.0));
    for (double tau : {1e-4, 1e-6}) {
      const double cur = std::abs(sources::soliton_u({1.0, tau, 0.0}, x, 0.0));
      CHECK(cur < prev);
      prev = cur;
    }
    CHECK(prev < 1e-4);
  }
}
