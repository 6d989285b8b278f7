#include "singspec/io.hpp"

#include "singspec/error.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace singspec::io {

using curve::cplx;

namespace {

[[noreturn]] void schema(const std::string& where, const std::string& what) {
  throw Error(Errc::SchemaError, where + ": " + what);
}

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) schema(where, std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) schema(where, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) schema(where, "expected an integer");
  return j.get<int>();
}

cplx complex_value(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  schema(where, "expected a number or [re, im]");
}

json complex_json(cplx z) {
  if (z.imag() == 0.0) return z.real();
  return json::array({z.real(), z.imag()});
}

curve::CurvePoint point(const json& j, const std::string& where) {
  curve::CurvePoint p;
  p.component = integer(field(j, "component", where), where + ".component");
  const json& z = field(j, "z", where);
  if (z.is_string()) {
    if (z.get<std::string>() != "inf") schema(where + ".z", "the only string value allowed is \"inf\"");
    p.z = curve::ExtendedComplex::infinity();
  } else {
    p.z = complex_value(z, where + ".z");
  }
  return p;
}

json point_json(const curve::CurvePoint& p) {
  json z = p.z.is_infinite() ? json("inf") : complex_json(p.z.value());
  return {{"component", p.component}, {"z", z}};
}

const json& array_field(const json& j, const char* key, const std::string& where, bool required = true) {
  static const json empty = json::array();
  if (!j.contains(key)) {
    if (required) schema(where, std::string("missing field '") + key + "'");
    return empty;
  }
  const json& a = j.at(key);
  if (!a.is_array()) schema(where + "." + key, "expected an array");
  return a;
}

std::string at(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

curve::Polynomial polynomial(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) schema(where, "expected a non-empty coefficient array (ascending powers)");
  curve::Polynomial p;
  for (std::size_t i = 0; i < j.size(); ++i) p.coeffs.push_back(complex_value(j[i], at(where, i)));
  return p;
}

}  // namespace

SpectralDocument spectral_from_json(const json& j) {
  if (!j.is_object()) schema("$", "expected an object");
  SpectralDocument doc;
  auto& d = doc.data;
  d.n_components = integer(field(j, "n_components", "$"), "$.n_components");

  const auto& ess = array_field(j, "essentials", "$");
  for (std::size_t i = 0; i < ess.size(); ++i) {
    const auto w = at("$.essentials", i);
    d.essentials.push_back({point(field(ess[i], "point", w), w + ".point"), integer(field(ess[i], "variable", w), w)});
  }
  const auto& poles = array_field(j, "poles", "$", false);
  for (std::size_t i = 0; i < poles.size(); ++i) {
    const auto w = at("$.poles", i);
    const int mult = poles[i].contains("multiplicity") ? integer(poles[i]["multiplicity"], w + ".multiplicity") : 1;
    d.poles.push_back({point(field(poles[i], "point", w), w + ".point"), mult});
  }
  const auto& cons = array_field(j, "constraints", "$", false);
  for (std::size_t i = 0; i < cons.size(); ++i) {
    const auto w = at("$.constraints", i);
    curve::LinearConstraint c;
    const auto& terms = array_field(cons[i], "terms", w);
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const auto tw = at(w + ".terms", k);
      curve::ConstraintTerm t;
      t.point = point(field(terms[k], "point", tw), tw + ".point");
      t.order = terms[k].contains("order") ? integer(terms[k]["order"], tw + ".order") : 0;
      t.coefficient = terms[k].contains("coeff") ? complex_value(terms[k]["coeff"], tw + ".coeff") : cplx{1.0, 0.0};
      c.terms.push_back(t);
    }
    c.rhs = cons[i].contains("rhs") ? complex_value(cons[i]["rhs"], w + ".rhs") : cplx{0.0, 0.0};
    d.constraints.push_back(std::move(c));
  }
  const auto& norms = array_field(j, "normalizations", "$");
  for (std::size_t i = 0; i < norms.size(); ++i) {
    const auto w = at("$.normalizations", i);
    const cplx v = norms[i].contains("value") ? complex_value(norms[i]["value"], w + ".value") : cplx{1.0, 0.0};
    d.normalizations.push_back({point(field(norms[i], "point", w), w + ".point"), v});
  }
  const auto& evals = array_field(j, "evaluations", "$");
  for (std::size_t i = 0; i < evals.size(); ++i) d.evaluations.push_back(point(evals[i], at("$.evaluations", i)));

  const int n = d.dimension();
  if (j.contains("signature")) {
    const auto& s = array_field(j, "signature", "$");
    for (std::size_t i = 0; i < s.size(); ++i) d.signature.push_back(integer(s[i], at("$.signature", i)));
  } else {
    d.signature.assign(static_cast<std::size_t>(n), 1);
  }
  if (j.contains("eta")) {
    const auto& e = array_field(j, "eta", "$");
    d.eta.resize(static_cast<Eigen::Index>(e.size()), static_cast<Eigen::Index>(e.size()));
    for (std::size_t r = 0; r < e.size(); ++r) {
      if (!e[r].is_array() || e[r].size() != e.size()) schema(at("$.eta", r), "eta must be a square matrix");
      for (std::size_t c = 0; c < e.size(); ++c)
        d.eta(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = number(e[r][c], at(at("$.eta", r), c));
    }
  } else {
    d.eta = Eigen::MatrixXd::Identity(n, n);
  }

  if (j.contains("omega")) {
    const auto& om = array_field(j, "omega", "$");
    curve::RationalDifferential w;
    for (std::size_t i = 0; i < om.size(); ++i) {
      const auto ow = at("$.omega", i);
      w.components.push_back({polynomial(field(om[i], "numerator", ow), ow + ".numerator"),
                              polynomial(field(om[i], "denominator", ow), ow + ".denominator")});
    }
    if (static_cast<int>(w.components.size()) != d.n_components)
      schema("$.omega", "one form per component is required");
    doc.omega = std::move(w);
  }
  return doc;
}

json spectral_to_json(const curve::SpectralData& d, const std::optional<curve::RationalDifferential>& omega) {
  json j;
  j["n_components"] = d.n_components;
  j["essentials"] = json::array();
  for (const auto& e : d.essentials) j["essentials"].push_back({{"point", point_json(e.point)}, {"variable", e.variable}});
  j["poles"] = json::array();
  for (const auto& p : d.poles) j["poles"].push_back({{"point", point_json(p.point)}, {"multiplicity", p.multiplicity}});
  j["constraints"] = json::array();
  for (const auto& c : d.constraints) {
    json terms = json::array();
    for (const auto& t : c.terms)
      terms.push_back({{"point", point_json(t.point)}, {"order", t.order}, {"coeff", complex_json(t.coefficient)}});
    j["constraints"].push_back({{"terms", terms}, {"rhs", complex_json(c.rhs)}});
  }
  j["normalizations"] = json::array();
  for (const auto& n : d.normalizations)
    j["normalizations"].push_back({{"point", point_json(n.point)}, {"value", complex_json(n.value)}});
  j["evaluations"] = json::array();
  for (const auto& q : d.evaluations) j["evaluations"].push_back(point_json(q));
  j["signature"] = d.signature;
  json eta = json::array();
  for (Eigen::Index r = 0; r < d.eta.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < d.eta.cols(); ++c) row.push_back(d.eta(r, c));
    eta.push_back(row);
  }
  j["eta"] = eta;
  if (omega) {
    json om = json::array();
    for (const auto& f : omega->components) {
      json num = json::array(), den = json::array();
      for (const auto& c : f.numerator.coeffs) num.push_back(complex_json(c));
      for (const auto& c : f.denominator.coeffs) den.push_back(complex_json(c));
      om.push_back({{"numerator", num}, {"denominator", den}});
    }
    j["omega"] = om;
  }
  return j;
}

frobenius::PrepotentialSpec prepotential_from_json(const json& j) {
  if (!j.is_object()) schema("$", "expected an object");
  const int n = integer(field(j, "N", "$"), "$.N");
  if (n < 1) schema("$.N", "must be positive");
  Eigen::MatrixXd eta = Eigen::MatrixXd::Identity(n, n);
  if (j.contains("eta")) {
    const auto& e = array_field(j, "eta", "$");
    if (static_cast<int>(e.size()) != n) schema("$.eta", "must be N x N");
    for (int r = 0; r < n; ++r) {
      const auto& row = e[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<int>(row.size()) != n) schema(at("$.eta", static_cast<std::size_t>(r)), "must have N entries");
      for (int c = 0; c < n; ++c) eta(r, c) = number(row[static_cast<std::size_t>(c)], "$.eta");
    }
  }
  std::vector<frobenius::Monomial> mons;
  const auto& ms = array_field(j, "monomials", "$");
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const auto w = at("$.monomials", i);
    frobenius::Monomial m;
    m.coeff = number(field(ms[i], "coeff", w), w + ".coeff");
    const auto& pw = field(ms[i], "powers", w);
    if (!pw.is_array() || static_cast<int>(pw.size()) != n) schema(w + ".powers", "must have N entries");
    for (const auto& p : pw) m.powers.push_back(integer(p, w + ".powers"));
    mons.push_back(std::move(m));
  }
  std::optional<frobenius::EulerData> euler;
  if (j.contains("euler")) {
    frobenius::EulerData e;
    const auto& eu = j.at("euler");
    const auto& deg = array_field(eu, "degrees", "$.euler");
    for (const auto& d : deg) e.degrees.push_back(number(d, "$.euler.degrees"));
    e.d_f = number(field(eu, "d_F", "$.euler"), "$.euler.d_F");
    euler = e;
  }
  try {
    return frobenius::polynomial_prepotential(n, eta, std::move(mons), euler, j.value("name", std::string("input")));
  } catch (const Error& e) {
    schema("$", e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::SchemaError, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::SchemaError, path + ": " + e.what());
  }
}

}  // namespace singspec::io
