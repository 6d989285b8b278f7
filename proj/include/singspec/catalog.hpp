#pragma once

// Built-in examples: complete spectral data, closed-form charts, curve
// topologies for genus bookkeeping, and Schrodinger operators on singular
// rational curves.

#include "singspec/curve.hpp"
#include "singspec/geometry.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace singspec::catalog {

using Params = std::map<std::string, double>;
using curve::cplx;

struct TwoLineParameters {
  double a = 0.0;  // gluing coordinate on the first line
  double r = 0.0;  // normalization point on the second line
};

/// Regularity relations for two lines glued at a~b, -a~-b with the pole at
/// c and the normalization at r: a = b r / c, r = b / sqrt(2 - b^2/c^2).
/// Throws DegenerateParameters for b = c or |b| >= sqrt(2)|c|.
TwoLineParameters example5_parameters(double b, double c);

enum class Completeness { Complete, ChartOnly };

struct CatalogEntry {
  std::string name;
  Params parameters;
  Completeness completeness = Completeness::ChartOnly;
  std::optional<curve::SpectralData> spectral_data;
  std::optional<curve::RationalDifferential> omega;
  std::optional<geometry::Chart> chart;
  /// Components and constraints only; enough for genus and component counts.
  std::optional<curve::SpectralData> topology;
};

/// Names: euclidean, example5, polar, cylindrical, spherical, example11,
/// skewed, perturbed. Throws UnknownEntry.
CatalogEntry builtin(std::string_view name, const Params& params = {});
std::vector<std::string> builtin_names();

/// Two lines glued at a~b, -a~-b; P_i = infinity, Q_i = 0, pole c and
/// normalization psi_2(r) = 1 on the second line. eta = (1/a^2) I.
curve::SpectralData example5_data(double b, double c, double a, double r);
curve::RationalDifferential example5_differential(double b, double c, double a, double r);

/// N disjoint lines, psi_j(-1) = 1, Q_j = 0.
curve::SpectralData euclidean_data(int n);
curve::RationalDifferential euclidean_differential(int n);

/// Topologies of the polar (5 lines), cylindrical (polar plus a disjoint
/// line) and N-dimensional spherical (4N - 3 lines) curves.
curve::SpectralData polar_curve();
curve::SpectralData cylindrical_curve();
curve::SpectralData spherical_curve(int n);
/// Two lines glued at +-a with equal coordinates; P_i = infinity, Q_i = 0.
curve::SpectralData example11_curve(double a = 1.0);

geometry::Chart euclidean_chart(int n);
geometry::Chart polar_chart();
geometry::Chart cylindrical_chart();
/// x^1 = r sin u^2, x^k = r cos u^2 ... cos u^k sin u^(k+1), x^N = r prod cos, r = e^(u^1).
geometry::Chart spherical_chart(int n);
geometry::Chart example11_chart();
/// x = (u^1, u^1 + u^2).
geometry::Chart skewed_chart();
/// x = (e^(u^1) cos u^2, (1 + 0.1 u^1) e^(u^1) sin u^2).
geometry::Chart perturbed_chart();

enum class SchrodingerKind { DoublePoint, Cusp, RationalSoliton };

struct SchrodingerExample {
  SchrodingerKind kind = SchrodingerKind::Cusp;
  int l = 1;
  double lambda = 1.0;
  /// Double-point example only: use cot(kx) instead of cot(lambda x).
  bool k_in_cotangent = false;
};

/// -d^2/dx^2 + 2 lambda^2 / sin^2(lambda x), double point at k = +-lambda.
SchrodingerExample double_point_example(double lambda, bool k_in_cotangent = false);
/// u = 2/x^2, cusp psi'(0) = 0.
SchrodingerExample cusp_example();
/// u = l(l+1)/x^2, psi' = ... = psi^(l) = 0 at k = 0.
SchrodingerExample rational_soliton_example(int l);

double schrodinger_potential(const SchrodingerExample& ex, double x);
cplx schrodinger_psi(const SchrodingerExample& ex, cplx k, double x);
/// |-psi'' + u psi - k^2 psi| with psi'' by exact differentiation.
double schrodinger_residual(const SchrodingerExample& ex, cplx k, double x);
/// The singular curve as one component with its gluing or cusp rows.
curve::SpectralData schrodinger_curve(const SchrodingerExample& ex);

}  // namespace singspec::catalog
