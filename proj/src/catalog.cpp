#include "singspec/catalog.hpp"

#include "singspec/error.hpp"

#include <cmath>
#include <sstream>

namespace singspec::catalog {

using curve::CurvePoint;
using curve::ExtendedComplex;
using curve::SpectralData;
using geometry::Chart;
using numeric::Vec;

namespace {

const ExtendedComplex kInf = ExtendedComplex::infinity();

numeric::Box cube(int n, double lo, double hi) {
  return {Vec::Constant(n, lo), Vec::Constant(n, hi)};
}

Chart closed_chart(std::string name, int n, numeric::VectorFunction map, numeric::Box domain) {
  Chart ch;
  ch.name = std::move(name);
  ch.dimension = n;
  ch.map = std::move(map);
  ch.eta = Eigen::MatrixXd::Identity(n, n);
  ch.signature.assign(static_cast<std::size_t>(n), 1);
  ch.domain = std::move(domain);
  ch.provenance = geometry::Provenance::ClosedForm;
  return ch;
}

double param(const Params& p, const std::string& key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

int int_param(const Params& p, const std::string& key, int fallback) {
  const double v = param(p, key, fallback);
  if (v != std::floor(v) || v < 1 || v > 64) throw Error(Errc::InvalidArgument, key + " must be a positive integer");
  return static_cast<int>(v);
}

void reject_unknown(const Params& p, std::initializer_list<const char*> allowed, std::string_view entry) {
  for (const auto& [k, v] : p) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw Error(Errc::InvalidArgument, "parameter '" + k + "' is not used by " + std::string(entry));
  }
}

curve::RationalForm form(std::vector<cplx> num, std::vector<cplx> den) { return {{std::move(num)}, {std::move(den)}}; }

}  // namespace

TwoLineParameters example5_parameters(double b, double c) {
  if (!std::isfinite(b) || !std::isfinite(c) || b == 0.0 || c == 0.0)
    throw Error(Errc::DegenerateParameters, "b and c must be finite and non-zero");
  if (std::abs(b - c) < 1e-9) throw Error(Errc::DegenerateParameters, "b = c puts the pole on a gluing point");
  const double s = 2.0 - b * b / (c * c);
  if (s <= 0.0) throw Error(Errc::DegenerateParameters, "need |b| < sqrt(2) |c| for a real normalization point");
  TwoLineParameters out;
  out.r = b / std::sqrt(s);
  out.a = b * out.r / c;
  return out;
}

SpectralData example5_data(double b, double c, double a, double r) {
  SpectralData d;
  d.n_components = 2;
  d.essentials = {{{0, kInf}, 0}, {{1, kInf}, 1}};
  d.poles = {{{1, c}, 1}};
  d.constraints = {curve::gluing({0, a}, {1, b}), curve::gluing({0, -a}, {1, -b})};
  d.normalizations = {{{1, r}, 1.0}};
  d.evaluations = {{0, 0.0}, {1, 0.0}};
  d.signature = {1, 1};
  d.eta = Eigen::MatrixXd::Identity(2, 2) / (a * a);
  return d;
}

curve::RationalDifferential example5_differential(double b, double c, double a, double r) {
  // -dz/(z(z^2 - a^2)) and -(z^2 - c^2) dz/(z(z^2 - b^2)(z^2 - r^2)).
  curve::RationalDifferential w;
  w.components.push_back(form({-1.0}, {0.0, -a * a, 0.0, 1.0}));
  w.components.push_back(form({c * c, 0.0, -1.0}, {0.0, b * b * r * r, 0.0, -(b * b + r * r), 0.0, 1.0}));
  return w;
}

SpectralData euclidean_data(int n) {
  if (n < 1) throw Error(Errc::InvalidArgument, "dimension must be positive");
  SpectralData d;
  d.n_components = n;
  for (int j = 0; j < n; ++j) {
    d.essentials.push_back({{j, kInf}, j});
    d.normalizations.push_back({{j, -1.0}, 1.0});
    d.evaluations.push_back({j, 0.0});
  }
  d.signature.assign(static_cast<std::size_t>(n), 1);
  d.eta = Eigen::MatrixXd::Identity(n, n);
  return d;
}

curve::RationalDifferential euclidean_differential(int n) {
  curve::RationalDifferential w;
  for (int j = 0; j < n; ++j) w.components.push_back(form({1.0}, {0.0, -1.0, 0.0, 1.0}));
  return w;
}

namespace {

// One four-line block hanging off `hub`: hub~h1, hub~h2 at +-1, then h1 and
// h2 both glued to h3.
void add_block(SpectralData& d, int hub) {
  d.constraints.push_back(curve::gluing({hub, 1.0}, {hub + 1, 2.0}));
  d.constraints.push_back(curve::gluing({hub, -1.0}, {hub + 2, 2.0}));
  d.constraints.push_back(curve::gluing({hub + 1, 3.0}, {hub + 3, 1.0}));
  d.constraints.push_back(curve::gluing({hub + 2, 3.0}, {hub + 3, -1.0}));
}

}  // namespace

SpectralData spherical_curve(int n) {
  if (n < 2) throw Error(Errc::InvalidArgument, "spherical curve needs N >= 2");
  SpectralData d;
  d.n_components = 4 * n - 3;
  d.constraints.push_back(curve::gluing({0, 0.0}, {1, 0.0}));
  for (int b = 0; b < n - 1; ++b) {
    const int hub = 1 + 4 * b;
    if (b > 0) d.constraints.push_back(curve::gluing({hub - 1, 0.0}, {hub, 0.0}));
    add_block(d, hub);
  }
  return d;
}

SpectralData polar_curve() { return spherical_curve(2); }

SpectralData cylindrical_curve() {
  SpectralData d = polar_curve();
  d.n_components += 1;
  return d;
}

SpectralData example11_curve(double a) {
  SpectralData d;
  d.n_components = 2;
  d.essentials = {{{0, kInf}, 0}, {{1, kInf}, 1}};
  d.constraints = {curve::gluing({0, a}, {1, a}), curve::gluing({0, -a}, {1, -a})};
  d.evaluations = {{0, 0.0}, {1, 0.0}};
  d.signature = {1, 1};
  d.eta = Eigen::MatrixXd::Identity(2, 2);
  return d;
}

Chart euclidean_chart(int n) {
  return closed_chart("euclidean", n, [](const Vec& u) -> Vec { return u.array().exp(); }, cube(n, -3.0, 3.0));
}

Chart polar_chart() {
  numeric::Box dom{Vec(2), Vec(2)};
  dom.lower << -3.0, -10.0;
  dom.upper << 3.0, 10.0;
  return closed_chart(
      "polar", 2,
      [](const Vec& u) -> Vec {
        Vec x(2);
        x << std::exp(u[0]) * std::cos(u[1]), std::exp(u[0]) * std::sin(u[1]);
        return x;
      },
      dom);
}

Chart cylindrical_chart() {
  numeric::Box dom{Vec(3), Vec(3)};
  dom.lower << -3.0, -10.0, -10.0;
  dom.upper << 3.0, 10.0, 10.0;
  return closed_chart(
      "cylindrical", 3,
      [](const Vec& u) -> Vec {
        Vec x(3);
        x << std::exp(u[0]) * std::cos(u[1]), std::exp(u[0]) * std::sin(u[1]), u[2];
        return x;
      },
      dom);
}

Chart spherical_chart(int n) {
  if (n < 2) throw Error(Errc::InvalidArgument, "spherical chart needs N >= 2");
  numeric::Box dom = cube(n, -1.4, 1.4);
  dom.lower[0] = -3.0;
  dom.upper[0] = 3.0;
  return closed_chart(
      "spherical", n,
      [n](const Vec& u) -> Vec {
        Vec x(n);
        double prefix = std::exp(u[0]);  // r times the cosines so far
        for (int k = 1; k < n; ++k) {
          x[k - 1] = prefix * std::sin(u[k]);
          prefix *= std::cos(u[k]);
        }
        x[n - 1] = prefix;
        return x;
      },
      dom);
}

Chart example11_chart() {
  const double s7 = std::sqrt(7.0);
  Chart ch = closed_chart(
      "example11", 2,
      [s7](const Vec& u) -> Vec {
        const double e1 = std::exp(2.0 * u[0]), e2 = std::exp(2.0 * u[1]);
        Vec x(2);
        x[0] = 4.0 * (7.0 - s7) * std::exp(u[0] - u[1]) / ((21.0 - 6.0 * s7) * e1 + (7.0 + 2.0 * s7) * e2);
        x[1] = std::exp(-2.0 * u[1]) * (3.0 * (s7 - 3.0) * e1 + (5.0 + s7) * e2) /
               (3.0 * (s7 - 2.0) * e1 + (2.0 + s7) * e2);
        return x;
      },
      cube(2, -2.0, 2.0));
  ch.egorov_expected = true;
  return ch;
}

Chart skewed_chart() {
  return closed_chart(
      "skewed", 2,
      [](const Vec& u) -> Vec {
        Vec x(2);
        x << u[0], u[0] + u[1];
        return x;
      },
      cube(2, -3.0, 3.0));
}

Chart perturbed_chart() {
  numeric::Box dom{Vec(2), Vec(2)};
  dom.lower << -3.0, -10.0;
  dom.upper << 3.0, 10.0;
  return closed_chart(
      "perturbed", 2,
      [](const Vec& u) -> Vec {
        Vec x(2);
        x << std::exp(u[0]) * std::cos(u[1]), (1.0 + 0.1 * u[0]) * std::exp(u[0]) * std::sin(u[1]);
        return x;
      },
      dom);
}

std::vector<std::string> builtin_names() {
  return {"euclidean", "example5", "polar", "cylindrical", "spherical", "example11", "skewed", "perturbed"};
}

CatalogEntry builtin(std::string_view name, const Params& params) {
  CatalogEntry e;
  e.name = std::string(name);
  e.parameters = params;

  if (name == "euclidean") {
    reject_unknown(params, {"N"}, name);
    const int n = int_param(params, "N", 2);
    e.parameters["N"] = n;
    e.completeness = Completeness::Complete;
    e.spectral_data = euclidean_data(n);
    e.omega = euclidean_differential(n);
    e.topology = e.spectral_data;
    e.chart = geometry::engine_chart(*e.spectral_data, cube(n, -3.0, 3.0), "euclidean");
    return e;
  }
  if (name == "example5") {
    reject_unknown(params, {"b", "c", "a", "r"}, name);
    const double b = param(params, "b", 1.0);
    const double c = param(params, "c", 2.0);
    double a = 0.0, r = 0.0;
    if (params.count("a") || params.count("r")) {
      // Explicit placement, e.g. to study parameters off the regularity relations.
      if (!params.count("a") || !params.count("r"))
        throw Error(Errc::InvalidArgument, "example5 overrides need both a and r");
      a = params.at("a");
      r = params.at("r");
      if (std::abs(b - c) < 1e-9) throw Error(Errc::DegenerateParameters, "b = c puts the pole on a gluing point");
    } else {
      const auto pr = example5_parameters(b, c);
      a = pr.a;
      r = pr.r;
    }
    e.parameters["b"] = b;
    e.parameters["c"] = c;
    e.parameters["a"] = a;
    e.parameters["r"] = r;
    e.completeness = Completeness::Complete;
    e.spectral_data = example5_data(b, c, a, r);
    e.omega = example5_differential(b, c, a, r);
    e.topology = e.spectral_data;
    e.chart = geometry::engine_chart(*e.spectral_data, cube(2, -2.0, 2.0), "example5");
    return e;
  }
  if (name == "polar") {
    reject_unknown(params, {}, name);
    e.chart = polar_chart();
    e.topology = polar_curve();
    return e;
  }
  if (name == "cylindrical") {
    reject_unknown(params, {}, name);
    e.chart = cylindrical_chart();
    e.topology = cylindrical_curve();
    return e;
  }
  if (name == "spherical") {
    reject_unknown(params, {"N"}, name);
    const int n = int_param(params, "N", 3);
    if (n < 2) throw Error(Errc::InvalidArgument, "spherical needs N >= 2");
    e.parameters["N"] = n;
    e.chart = spherical_chart(n);
    e.topology = spherical_curve(n);
    return e;
  }
  if (name == "example11") {
    reject_unknown(params, {"a", "c"}, name);
    const double a = param(params, "a", 1.0);
    const double c = param(params, "c", 2.0 / std::sqrt(7.0));
    if (std::abs(a - 1.0) > 1e-12 || std::abs(c - 2.0 / std::sqrt(7.0)) > 1e-12)
      throw Error(Errc::InvalidArgument, "example11 coordinates are only available for a = 1, c = 2/sqrt(7)");
    e.parameters["a"] = a;
    e.parameters["c"] = c;
    e.chart = example11_chart();
    e.topology = example11_curve(a);
    return e;
  }
  if (name == "skewed") {
    reject_unknown(params, {}, name);
    e.chart = skewed_chart();
    return e;
  }
  if (name == "perturbed") {
    reject_unknown(params, {}, name);
    e.chart = perturbed_chart();
    return e;
  }
  throw Error(Errc::UnknownEntry, "no catalog entry named '" + std::string(name) + "'");
}

// --- Schrodinger operators -------------------------------------------------

SchrodingerExample double_point_example(double lambda, bool k_in_cotangent) {
  if (!(lambda > 0.0)) throw Error(Errc::InvalidArgument, "lambda must be positive");
  return {SchrodingerKind::DoublePoint, 1, lambda, k_in_cotangent};
}

SchrodingerExample cusp_example() { return {SchrodingerKind::Cusp, 1, 0.0, false}; }

SchrodingerExample rational_soliton_example(int l) {
  if (l < 1) throw Error(Errc::InvalidArgument, "l must be >= 1");
  return {SchrodingerKind::RationalSoliton, l, 0.0, false};
}

namespace {

void check_x(const SchrodingerExample& ex, double x) {
  if (!std::isfinite(x) || std::abs(x) < 1e-12) throw Error(Errc::SingularPoint, "x = 0 is a pole of the potential");
  if (ex.kind == SchrodingerKind::DoublePoint && std::abs(std::sin(ex.lambda * x)) < 1e-12)
    throw Error(Errc::SingularPoint, "sin(lambda x) = 0 is a pole of the potential");
}

void check_k(cplx k) {
  if (std::abs(k) < 1e-300) throw Error(Errc::SingularPoint, "k = 0 is the pole divisor");
}

using Poly = std::vector<cplx>;  // polynomial in y = 1/x, ascending

Poly derivative(const Poly& p) {
  Poly d(p.size() > 1 ? p.size() - 1 : 1, 0.0);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = static_cast<double>(i) * p[i];
  return d;
}

// Coefficient of e^{ikx} after differentiating P(1/x) e^{ikx} in x.
Poly dx(const Poly& p, cplx k) {
  Poly out(p.size() + 1, 0.0);
  const Poly dp = derivative(p);
  for (std::size_t i = 0; i + 1 < p.size(); ++i) out[i + 2] -= dp[i];  // d/dx y^n = -n y^(n+1)
  for (std::size_t i = 0; i < p.size(); ++i) out[i] += cplx{0.0, 1.0} * k * p[i];
  return out;
}

cplx eval(const Poly& p, double y) {
  cplx acc{0.0, 0.0};
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * y + *it;
  return acc;
}

// (-d/dx + l/x) ... (-d/dx + 1/x) e^{ikx} / (-ik)^l as a polynomial in 1/x.
Poly rational_amplitude(int l, cplx k) {
  Poly p{1.0};
  const cplx minus_ik = -cplx{0.0, 1.0} * k;
  for (int j = 1; j <= l; ++j) {
    Poly d = dx(p, k);
    Poly next(d.size() + 1, 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) next[i] -= d[i];
    for (std::size_t i = 0; i < p.size(); ++i) next[i + 1] += static_cast<double>(j) * p[i];
    for (auto& c : next) c /= minus_ik;
    p = std::move(next);
  }
  return p;
}

// Double-point amplitude A = 1 + (i lambda / k) cot(mu x) and its x-derivatives.
void double_point_amplitude(const SchrodingerExample& ex, cplx k, double x, cplx& a, cplx& a1, cplx& a2) {
  const cplx mu = ex.k_in_cotangent ? k : cplx{ex.lambda, 0.0};
  const cplx s = std::sin(mu * x);
  if (std::abs(s) < 1e-12) throw Error(Errc::SingularPoint, "cotangent pole");
  const cplx cot = std::cos(mu * x) / s;
  const cplx csc2 = 1.0 / (s * s);
  const cplx pref = cplx{0.0, ex.lambda} / k;
  a = 1.0 + pref * cot;
  a1 = -pref * mu * csc2;
  a2 = 2.0 * pref * mu * mu * csc2 * cot;
}

}  // namespace

double schrodinger_potential(const SchrodingerExample& ex, double x) {
  check_x(ex, x);
  switch (ex.kind) {
    case SchrodingerKind::DoublePoint: {
      const double s = std::sin(ex.lambda * x);
      return 2.0 * ex.lambda * ex.lambda / (s * s);
    }
    case SchrodingerKind::Cusp: return 2.0 / (x * x);
    case SchrodingerKind::RationalSoliton: return ex.l * (ex.l + 1.0) / (x * x);
  }
  return 0.0;
}

cplx schrodinger_psi(const SchrodingerExample& ex, cplx k, double x) {
  check_x(ex, x);
  check_k(k);
  const cplx phase = std::exp(cplx{0.0, 1.0} * k * x);
  if (ex.kind == SchrodingerKind::DoublePoint) {
    cplx a, a1, a2;
    double_point_amplitude(ex, k, x, a, a1, a2);
    return a * phase;
  }
  const int l = ex.kind == SchrodingerKind::Cusp ? 1 : ex.l;
  return eval(rational_amplitude(l, k), 1.0 / x) * phase;
}

double schrodinger_residual(const SchrodingerExample& ex, cplx k, double x) {
  check_x(ex, x);
  check_k(k);
  const double u = schrodinger_potential(ex, x);
  const double phase = std::abs(std::exp(cplx{0.0, 1.0} * k * x));
  const cplx ik = cplx{0.0, 1.0} * k;
  if (ex.kind == SchrodingerKind::DoublePoint) {
    // psi = A e^{ikx}: -psi'' + u psi - k^2 psi = (-A'' - 2ik A' + u A) e^{ikx}.
    cplx a, a1, a2;
    double_point_amplitude(ex, k, x, a, a1, a2);
    return std::abs(-a2 - 2.0 * ik * a1 + u * a) * phase;
  }
  const int l = ex.kind == SchrodingerKind::Cusp ? 1 : ex.l;
  const Poly p = rational_amplitude(l, k);
  const Poly p2 = dx(dx(p, k), k);
  const double y = 1.0 / x;
  return std::abs(-eval(p2, y) + (u - k * k) * eval(p, y)) * phase;
}

SpectralData schrodinger_curve(const SchrodingerExample& ex) {
  SpectralData d;
  d.n_components = 1;
  d.essentials = {{{0, kInf}, 0}};
  d.poles = {{{0, 0.0}, ex.kind == SchrodingerKind::RationalSoliton ? ex.l : 1}};
  switch (ex.kind) {
    case SchrodingerKind::DoublePoint:
      d.constraints = {curve::gluing({0, ex.lambda}, {0, -ex.lambda})};
      break;
    case SchrodingerKind::Cusp:
      d.constraints = {curve::cusp({0, 0.0}, 1)};
      break;
    case SchrodingerKind::RationalSoliton:
      for (int j = 1; j <= ex.l; ++j) d.constraints.push_back(curve::cusp({0, 0.0}, j));
      break;
  }
  return d;
}

}  // namespace singspec::catalog
