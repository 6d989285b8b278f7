#pragma once

// Spectral data on unions of rational components: marked points, linear
// constraints (double points, cusps, general conditions), pole divisors,
// normalizations, and rational differentials with their residues.

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <string_view>
#include <vector>

namespace singspec::curve {

using cplx = std::complex<double>;

/// A point of the extended complex plane: finite value or infinity.
class ExtendedComplex {
 public:
  ExtendedComplex() = default;
  ExtendedComplex(cplx z) : value_(z) {}  // NOLINT(google-explicit-constructor)
  ExtendedComplex(double x) : value_(x, 0.0) {}  // NOLINT(google-explicit-constructor)

  static ExtendedComplex infinity() {
    ExtendedComplex z;
    z.infinite_ = true;
    return z;
  }

  bool is_infinite() const { return infinite_; }
  /// Finite value; throws InvalidArgument at infinity.
  cplx value() const;

  bool same_as(const ExtendedComplex& other, double tol = 1e-12) const;

 private:
  cplx value_{0.0, 0.0};
  bool infinite_ = false;
};

struct CurvePoint {
  int component = 0;
  ExtendedComplex z;

  bool same_as(const CurvePoint& other, double tol = 1e-12) const {
    return component == other.component && z.same_as(other.z, tol);
  }
};

struct ConstraintTerm {
  CurvePoint point;
  int order = 0;
  cplx coefficient{1.0, 0.0};
};

/// sum_t coefficient_t * psi^(order_t)(point_t) = rhs
struct LinearConstraint {
  std::vector<ConstraintTerm> terms;
  cplx rhs{0.0, 0.0};
};

/// psi(p) - psi(q) = 0.
LinearConstraint gluing(const CurvePoint& p, const CurvePoint& q);
/// psi^(order)(p) = 0.
LinearConstraint cusp(const CurvePoint& p, int order);

enum class ConstraintKind { Gluing, Cusp, General };
ConstraintKind classify(const LinearConstraint& c);

/// Essential singularity carrying the variable u^variable. At infinity the
/// local parameter is k = z; at a finite point z0 it is k = 1/(z - z0).
struct EssentialPoint {
  CurvePoint point;
  int variable = 0;
};

struct Pole {
  CurvePoint point;
  int multiplicity = 1;
};

struct Normalization {
  CurvePoint point;
  cplx value{1.0, 0.0};
};

struct SpectralData {
  int n_components = 0;
  std::vector<EssentialPoint> essentials;
  std::vector<Pole> poles;
  std::vector<LinearConstraint> constraints;
  std::vector<Normalization> normalizations;
  /// Q_1..Q_N; x^j = psi(Q_j).
  std::vector<CurvePoint> evaluations;
  std::vector<int> signature;
  Eigen::MatrixXd eta;

  int dimension() const { return static_cast<int>(evaluations.size()); }
  int unknown_count() const;
  int equation_count() const;
};

struct Violation {
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(std::string_view code) const;
};

ValidationReport validate(const SpectralData& data);

/// Components grouped by the union-find closure of multi-component
/// constraints. Classes are sorted by their smallest member.
std::vector<std::vector<int>> connected_components(const SpectralData& data);

struct GenusResult {
  /// One entry per connected component, in connected_components() order.
  std::vector<int> per_component;
  int total = 0;
  /// Constraints that are neither gluings nor cusps; each was counted as one.
  std::vector<std::size_t> unsupported_constraints;

  bool exact() const { return unsupported_constraints.empty(); }
};

/// p_a per connected component: (#gluings + #cusp rows) - #components + 1.
GenusResult arithmetic_genus(const SpectralData& data);

/// Dense complex polynomial, coefficients in ascending powers.
struct Polynomial {
  std::vector<cplx> coeffs;

  cplx operator()(cplx z) const;
  int degree() const;  // -1 for the zero polynomial
  /// Taylor coefficients about z0: P(z) = sum t_k (z - z0)^k.
  std::vector<cplx> taylor(cplx z0) const;

  static Polynomial from_roots(const std::vector<cplx>& roots, cplx lead = 1.0);
};

Polynomial operator*(const Polynomial& a, const Polynomial& b);

/// numerator(z) / denominator(z) dz on one component.
struct RationalForm {
  Polynomial numerator;
  Polynomial denominator;
};

struct RationalDifferential {
  std::vector<RationalForm> components;
};

/// Residue of a simple pole. Infinity is handled in the chart w = 1/z.
cplx residue(const RationalForm& form, const ExtendedComplex& at);
cplx residue(const RationalDifferential& omega, const CurvePoint& at);

/// Order of the pole (positive) or zero (negative) of the form at `at`.
int pole_order(const RationalForm& form, const ExtendedComplex& at);

struct GluingResidueCheck {
  std::size_t constraint = 0;
  cplx first{};
  cplx second{};
  bool pass = false;
};

struct RegularityReport {
  std::vector<GluingResidueCheck> gluings;
  std::vector<cplx> q_residues;
  /// Constraints skipped by the gluing check (cusps and general conditions).
  std::vector<std::size_t> skipped_constraints;
  bool gluing_pass = true;
  bool q_equal = false;
  /// Common Q-residue; sign fixed by the overall scale of the differential.
  double eta0_squared = 0.0;

  bool ok() const { return gluing_pass && q_equal; }
};

/// Residues cancel across every double point, and the residues at all Q_i
/// agree (real, non-zero).
RegularityReport regularity_check(const SpectralData& data, const RationalDifferential& omega,
                                  double rel_tol = 1e-9);

/// The hypotheses under which the construction yields an Egorov metric:
/// double points only, glued at equal coordinates, gluing sets symmetric
/// under z -> -z, P_i = infinity and Q_i = 0 on the component carrying u^i.
bool egorov_hypotheses(const SpectralData& data, std::string* reason = nullptr);

}  // namespace singspec::curve
