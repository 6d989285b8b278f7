#include "singspec/curve.hpp"

#include "singspec/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace singspec::curve {

cplx ExtendedComplex::value() const {
  if (infinite_) throw Error(Errc::InvalidArgument, "finite value requested at infinity");
  return value_;
}

bool ExtendedComplex::same_as(const ExtendedComplex& other, double tol) const {
  if (infinite_ || other.infinite_) return infinite_ == other.infinite_;
  return std::abs(value_ - other.value_) <= tol * std::max(1.0, std::abs(value_));
}

LinearConstraint gluing(const CurvePoint& p, const CurvePoint& q) {
  return {{{p, 0, 1.0}, {q, 0, -1.0}}, 0.0};
}

LinearConstraint cusp(const CurvePoint& p, int order) { return {{{p, order, 1.0}}, 0.0}; }

ConstraintKind classify(const LinearConstraint& c) {
  if (c.rhs != cplx{0.0, 0.0}) return ConstraintKind::General;
  if (c.terms.size() == 1 && c.terms[0].order >= 1 && c.terms[0].coefficient != cplx{0.0, 0.0})
    return ConstraintKind::Cusp;
  if (c.terms.size() == 2) {
    const auto& s = c.terms[0];
    const auto& t = c.terms[1];
    const bool values = s.order == 0 && t.order == 0;
    const bool opposite = s.coefficient != cplx{0.0, 0.0} && std::abs(s.coefficient + t.coefficient) <=
                                                                   1e-14 * std::abs(s.coefficient);
    if (values && opposite && !s.point.same_as(t.point)) return ConstraintKind::Gluing;
  }
  return ConstraintKind::General;
}

int SpectralData::unknown_count() const {
  int n = n_components;
  for (const auto& p : poles) n += p.multiplicity;
  return n;
}

int SpectralData::equation_count() const {
  return static_cast<int>(constraints.size() + normalizations.size());
}

bool ValidationReport::has(std::string_view code) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.code == code; });
}

namespace {

std::string describe(const CurvePoint& p) {
  std::ostringstream os;
  os << "(component " << p.component << ", z=";
  if (p.z.is_infinite())
    os << "inf";
  else
    os << p.z.value();
  os << ')';
  return os.str();
}

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(std::max(n, 0))) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int i) {
    while (parent_[static_cast<std::size_t>(i)] != i) {
      auto& p = parent_[static_cast<std::size_t>(i)];
      p = parent_[static_cast<std::size_t>(p)];
      i = p;
    }
    return i;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

bool in_range(const SpectralData& d, const CurvePoint& p) { return p.component >= 0 && p.component < d.n_components; }

// Class index per component, following connected_components() order.
std::vector<int> class_of(const SpectralData& data, const std::vector<std::vector<int>>& classes) {
  std::vector<int> out(static_cast<std::size_t>(std::max(data.n_components, 0)), -1);
  for (std::size_t k = 0; k < classes.size(); ++k)
    for (int c : classes[k]) out[static_cast<std::size_t>(c)] = static_cast<int>(k);
  return out;
}

bool is_essential_point(const SpectralData& d, const CurvePoint& p) {
  return std::any_of(d.essentials.begin(), d.essentials.end(),
                     [&](const EssentialPoint& e) { return e.point.same_as(p); });
}

bool finite_coordinates(const CurvePoint& p) {
  if (p.z.is_infinite()) return true;
  const cplx z = p.z.value();
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

}  // namespace

std::vector<std::vector<int>> connected_components(const SpectralData& data) {
  UnionFind uf(data.n_components);
  for (const auto& c : data.constraints) {
    int first = -1;
    for (const auto& t : c.terms) {
      if (!in_range(data, t.point)) continue;
      if (first < 0)
        first = t.point.component;
      else
        uf.unite(first, t.point.component);
    }
  }
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < data.n_components; ++i) groups[uf.find(i)].push_back(i);
  std::vector<std::vector<int>> out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  return out;
}

GenusResult arithmetic_genus(const SpectralData& data) {
  const auto classes = connected_components(data);
  const auto owner = class_of(data, classes);
  std::vector<int> rows(classes.size(), 0);
  GenusResult out;
  for (std::size_t i = 0; i < data.constraints.size(); ++i) {
    const auto& c = data.constraints[i];
    if (c.terms.empty() || !in_range(data, c.terms[0].point)) continue;
    if (classify(c) == ConstraintKind::General) out.unsupported_constraints.push_back(i);
    ++rows[static_cast<std::size_t>(owner[static_cast<std::size_t>(c.terms[0].point.component)])];
  }
  for (std::size_t k = 0; k < classes.size(); ++k) {
    const int pa = rows[k] - static_cast<int>(classes[k].size()) + 1;
    out.per_component.push_back(pa);
    out.total += pa;
  }
  return out;
}

ValidationReport validate(const SpectralData& data) {
  ValidationReport rep;
  auto add = [&](std::string code, std::string msg) { rep.violations.push_back({std::move(code), std::move(msg)}); };

  if (data.n_components < 1) {
    add("no_components", "at least one component is required");
    return rep;
  }

  auto check_point = [&](const CurvePoint& p, const std::string& what) {
    if (!in_range(data, p)) {
      add("bad_component", what + " refers to component " + std::to_string(p.component));
      return false;
    }
    if (!finite_coordinates(p)) {
      add("non_finite", what + " has a non-finite coordinate");
      return false;
    }
    return true;
  };

  bool points_ok = true;
  for (const auto& e : data.essentials) points_ok &= check_point(e.point, "essential point");
  for (const auto& p : data.poles) points_ok &= check_point(p.point, "pole");
  for (const auto& n : data.normalizations) points_ok &= check_point(n.point, "normalization");
  for (const auto& q : data.evaluations) points_ok &= check_point(q, "evaluation point");
  for (const auto& c : data.constraints) {
    if (c.terms.empty()) add("empty_constraint", "constraint without terms");
    for (const auto& t : c.terms) {
      points_ok &= check_point(t.point, "constraint term");
      if (t.order < 0) add("negative_order", "negative derivative order in constraint");
      if (t.order > 0 && t.point.z.is_infinite())
        add("derivative_at_infinity", "derivative constraint at infinity is not supported");
    }
    if (c.terms.size() == 2 && c.terms[0].point.same_as(c.terms[1].point) && c.terms[0].order == c.terms[1].order)
      add("degenerate_constraint", "constraint relates a point to itself");
  }
  if (!points_ok) return rep;

  // Essential variables: each of 0..N-1 exactly once.
  const int n = data.dimension();
  std::vector<int> seen(static_cast<std::size_t>(n), 0);
  for (const auto& e : data.essentials) {
    if (e.variable < 0 || e.variable >= n) {
      add("essential_variable", "essential point carries variable " + std::to_string(e.variable) +
                                    " outside 0.." + std::to_string(n - 1));
      continue;
    }
    ++seen[static_cast<std::size_t>(e.variable)];
  }
  for (int j = 0; j < n; ++j)
    if (seen[static_cast<std::size_t>(j)] != 1)
      add("essential_variable", "variable " + std::to_string(j) + " must be carried by exactly one essential point");
  for (std::size_t i = 0; i < data.essentials.size(); ++i)
    for (std::size_t j = i + 1; j < data.essentials.size(); ++j)
      if (data.essentials[i].point.same_as(data.essentials[j].point))
        add("coincident_points", "two essential points at " + describe(data.essentials[i].point));

  // Poles.
  for (std::size_t i = 0; i < data.poles.size(); ++i) {
    const auto& p = data.poles[i];
    if (p.multiplicity < 1) add("invalid_multiplicity", "pole multiplicity must be >= 1");
    if (p.point.z.is_infinite()) add("pole_at_infinity", "poles must be finite points");
    for (std::size_t j = i + 1; j < data.poles.size(); ++j)
      if (p.point.same_as(data.poles[j].point))
        add("coincident_points", "two poles at " + describe(p.point) + "; merge them into one multiplicity");
    if (is_essential_point(data, p.point)) add("pole_at_essential_point", "pole at essential point " + describe(p.point));
    for (const auto& c : data.constraints)
      for (const auto& t : c.terms)
        if (t.point.same_as(p.point)) add("pole_at_constrained_point", "pole at constrained point " + describe(p.point));
    for (const auto& nm : data.normalizations)
      if (nm.point.same_as(p.point))
        add("pole_at_normalization_point", "pole at normalization point " + describe(p.point));
    for (const auto& q : data.evaluations)
      if (q.same_as(p.point)) add("pole_at_evaluation_point", "pole at evaluation point " + describe(p.point));
  }

  // Marked points must avoid the essential singularities.
  for (const auto& c : data.constraints)
    for (const auto& t : c.terms)
      if (is_essential_point(data, t.point))
        add("constraint_at_essential_point", "constraint at essential point " + describe(t.point));
  for (std::size_t i = 0; i < data.normalizations.size(); ++i) {
    const auto& nm = data.normalizations[i];
    if (is_essential_point(data, nm.point))
      add("normalization_at_essential_point", "normalization at essential point " + describe(nm.point));
    for (std::size_t j = i + 1; j < data.normalizations.size(); ++j)
      if (nm.point.same_as(data.normalizations[j].point))
        add("coincident_points", "two normalizations at " + describe(nm.point));
  }
  for (const auto& q : data.evaluations)
    if (is_essential_point(data, q)) add("evaluation_at_essential_point", "evaluation at essential point " + describe(q));

  // Square system, globally and per connected component.
  if (data.unknown_count() != data.equation_count()) {
    add("non_square", "non-square system: " + std::to_string(data.unknown_count()) + " unknowns, " +
                          std::to_string(data.equation_count()) + " equations");
  }
  const auto classes = connected_components(data);
  const auto owner = class_of(data, classes);
  const auto genus = arithmetic_genus(data);
  std::vector<int> degree(classes.size(), 0), norms(classes.size(), 0), nonzero(classes.size(), 0);
  for (const auto& p : data.poles) degree[static_cast<std::size_t>(owner[static_cast<std::size_t>(p.point.component)])] += p.multiplicity;
  for (const auto& nm : data.normalizations) {
    const auto k = static_cast<std::size_t>(owner[static_cast<std::size_t>(nm.point.component)]);
    ++norms[k];
    if (nm.value != cplx{0.0, 0.0}) ++nonzero[k];
  }
  for (std::size_t k = 0; k < classes.size(); ++k) {
    const int expected = genus.per_component[k] + norms[k] - 1;
    if (degree[k] != expected) {
      add("pole_count", "connected component " + std::to_string(k) + ": pole degree " + std::to_string(degree[k]) +
                            " but p_a + l - 1 = " + std::to_string(expected));
    }
    if (norms[k] > 0 && nonzero[k] == 0)
      add("zero_normalizations", "connected component " + std::to_string(k) + " has only zero normalization values");
  }

  // Metric data.
  if (static_cast<int>(data.signature.size()) != n)
    add("signature_size", "signature must have one entry per coordinate");
  for (int s : data.signature)
    if (s != 1 && s != -1) add("signature_value", "signature entries must be +1 or -1");
  if (data.eta.rows() != n || data.eta.cols() != n) {
    add("eta_shape", "eta must be " + std::to_string(n) + "x" + std::to_string(n));
  } else if (n > 0) {
    if (!data.eta.allFinite() || (data.eta - data.eta.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      add("eta_not_symmetric", "eta must be finite and symmetric");
  }
  return rep;
}

cplx Polynomial::operator()(cplx z) const {
  cplx acc{0.0, 0.0};
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

int Polynomial::degree() const {
  for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k)
    if (coeffs[static_cast<std::size_t>(k)] != cplx{0.0, 0.0}) return k;
  return -1;
}

std::vector<cplx> Polynomial::taylor(cplx z0) const {
  // Repeated synthetic division by (z - z0).
  std::vector<cplx> work = coeffs;
  std::vector<cplx> out;
  out.reserve(work.size());
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    cplx acc{0.0, 0.0};
    const std::size_t len = work.size() - k;
    for (std::size_t j = len; j-- > 0;) {
      acc = acc * z0 + work[j];
      if (j > 0) work[j] = acc;  // quotient coefficient for z^(j-1), shifted below
    }
    out.push_back(acc);
    // Shift quotient down one power.
    for (std::size_t j = 0; j + 1 < len; ++j) work[j] = work[j + 1];
  }
  return out;
}

Polynomial Polynomial::from_roots(const std::vector<cplx>& roots, cplx lead) {
  Polynomial p{{lead}};
  for (const auto& r : roots) p = p * Polynomial{{-r, 1.0}};
  return p;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.coeffs.empty() || b.coeffs.empty()) return {};
  std::vector<cplx> out(a.coeffs.size() + b.coeffs.size() - 1, cplx{0.0, 0.0});
  for (std::size_t i = 0; i < a.coeffs.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs.size(); ++j) out[i + j] += a.coeffs[i] * b.coeffs[j];
  return {out};
}

namespace {

struct LocalForm {
  Polynomial numerator;
  Polynomial denominator;
  cplx at{0.0, 0.0};
};

// Rewrite the form in the chart w = 1/z around w = 0 when needed:
// N(z)/D(z) dz = -w^(d-n-2) Nrev(w)/Drev(w) dw.
LocalForm localize(const RationalForm& f, const ExtendedComplex& at) {
  if (f.denominator.degree() < 0) throw Error(Errc::InvalidArgument, "denominator is identically zero");
  if (!at.is_infinite()) return {f.numerator, f.denominator, at.value()};

  const int n = f.numerator.degree();
  const int d = f.denominator.degree();
  if (n < 0) return {f.numerator, f.denominator, 0.0};
  Polynomial num, den;
  for (int k = n; k >= 0; --k) num.coeffs.push_back(-f.numerator.coeffs[static_cast<std::size_t>(k)]);
  for (int k = d; k >= 0; --k) den.coeffs.push_back(f.denominator.coeffs[static_cast<std::size_t>(k)]);
  const int e = d - n - 2;
  Polynomial shift{std::vector<cplx>(static_cast<std::size_t>(std::abs(e)) + 1, cplx{0.0, 0.0})};
  shift.coeffs.back() = 1.0;
  if (e >= 0)
    num = num * shift;
  else
    den = den * shift;
  return {num, den, 0.0};
}

// Index of the leading non-negligible Taylor coefficient, -1 if none.
int vanishing_order(const Polynomial& p, cplx z0, std::vector<cplx>& taylor) {
  taylor = p.taylor(z0);
  double scale = 0.0;
  const double r = std::max(1.0, std::abs(z0));
  double rk = 1.0;
  for (const auto& c : p.coeffs) {
    scale += std::abs(c) * rk;
    rk *= r;
  }
  const double tol = 1e-12 * scale;
  for (std::size_t k = 0; k < taylor.size(); ++k)
    if (std::abs(taylor[k]) > tol) return static_cast<int>(k);
  return -1;
}

}  // namespace

int pole_order(const RationalForm& form, const ExtendedComplex& at) {
  const LocalForm lf = localize(form, at);
  std::vector<cplx> tn, td;
  const int mn = vanishing_order(lf.numerator, lf.at, tn);
  const int md = vanishing_order(lf.denominator, lf.at, td);
  if (md < 0) throw Error(Errc::InvalidArgument, "denominator is identically zero");
  if (mn < 0) return std::numeric_limits<int>::min();  // zero differential
  return md - mn;
}

cplx residue(const RationalForm& form, const ExtendedComplex& at) {
  const LocalForm lf = localize(form, at);
  std::vector<cplx> tn, td;
  const int mn = vanishing_order(lf.numerator, lf.at, tn);
  const int md = vanishing_order(lf.denominator, lf.at, td);
  if (md < 0) throw Error(Errc::InvalidArgument, "denominator is identically zero");
  if (mn < 0 || md - mn <= 0) throw Error(Errc::NotAPole, "differential is regular at the requested point");
  if (md - mn > 1) {
    throw Error(Errc::HigherOrderPole,
                "pole of order " + std::to_string(md - mn) + "; only simple poles have a residue formula here");
  }
  return tn[static_cast<std::size_t>(mn)] / td[static_cast<std::size_t>(md)];
}

cplx residue(const RationalDifferential& omega, const CurvePoint& at) {
  if (at.component < 0 || static_cast<std::size_t>(at.component) >= omega.components.size())
    throw Error(Errc::InvalidArgument, "differential has no form on component " + std::to_string(at.component));
  return residue(omega.components[static_cast<std::size_t>(at.component)], at.z);
}

namespace {

cplx residue_or_zero(const RationalDifferential& omega, const CurvePoint& at) {
  try {
    return residue(omega, at);
  } catch (const Error& e) {
    if (e.code() == Errc::NotAPole) return {0.0, 0.0};
    throw;
  }
}

}  // namespace

RegularityReport regularity_check(const SpectralData& data, const RationalDifferential& omega, double rel_tol) {
  RegularityReport rep;
  for (std::size_t i = 0; i < data.constraints.size(); ++i) {
    const auto& c = data.constraints[i];
    if (classify(c) != ConstraintKind::Gluing) {
      rep.skipped_constraints.push_back(i);
      continue;
    }
    GluingResidueCheck g;
    g.constraint = i;
    g.first = residue_or_zero(omega, c.terms[0].point);
    g.second = residue_or_zero(omega, c.terms[1].point);
    const double scale = std::max(std::abs(g.first), std::abs(g.second));
    g.pass = std::abs(g.first + g.second) <= rel_tol * scale;
    if (scale == 0.0) g.pass = true;
    rep.gluing_pass = rep.gluing_pass && g.pass;
    rep.gluings.push_back(g);
  }

  for (const auto& q : data.evaluations) rep.q_residues.push_back(residue_or_zero(omega, q));
  if (!rep.q_residues.empty()) {
    const cplx ref = rep.q_residues.front();
    const double mag = std::abs(ref);
    bool ok = mag > 0.0 && std::abs(ref.imag()) <= rel_tol * mag;
    for (const auto& r : rep.q_residues) ok = ok && std::abs(r - ref) <= rel_tol * mag;
    rep.q_equal = ok;
    if (ok) rep.eta0_squared = ref.real();
  }
  return rep;
}

bool egorov_hypotheses(const SpectralData& data, std::string* reason) {
  auto fail = [&](const std::string& why) {
    if (reason) *reason = why;
    return false;
  };
  std::vector<std::vector<cplx>> glued(static_cast<std::size_t>(std::max(data.n_components, 0)));
  for (const auto& c : data.constraints) {
    if (classify(c) != ConstraintKind::Gluing) return fail("constraint other than a double point");
    const auto& p = c.terms[0].point;
    const auto& q = c.terms[1].point;
    if (p.z.is_infinite() || q.z.is_infinite()) return fail("double point at infinity");
    if (std::abs(p.z.value() - q.z.value()) > 1e-12 * std::max(1.0, std::abs(p.z.value())))
      return fail("double point glues different coordinates");
    glued[static_cast<std::size_t>(p.component)].push_back(p.z.value());
    glued[static_cast<std::size_t>(q.component)].push_back(q.z.value());
  }
  for (const auto& pts : glued) {
    for (const auto& z : pts) {
      const bool mirrored = std::any_of(pts.begin(), pts.end(), [&](const cplx& w) {
        return std::abs(w + z) <= 1e-12 * std::max(1.0, std::abs(z));
      });
      if (!mirrored) return fail("gluing set is not symmetric under z -> -z");
    }
  }
  if (static_cast<int>(data.essentials.size()) != data.dimension()) return fail("essential/evaluation count mismatch");
  for (const auto& e : data.essentials) {
    if (!e.point.z.is_infinite()) return fail("essential point is not at infinity");
    if (e.variable < 0 || e.variable >= data.dimension()) return fail("essential variable out of range");
    const auto& q = data.evaluations[static_cast<std::size_t>(e.variable)];
    if (q.component != e.point.component || q.z.is_infinite() || std::abs(q.z.value()) != 0.0)
      return fail("Q_i is not z = 0 on the component carrying u^i");
  }
  if (reason) reason->clear();
  return true;
}

}  // namespace singspec::curve
