#include "singspec/cli.hpp"

#include "singspec/bafn.hpp"
#include "singspec/catalog.hpp"
#include "singspec/error.hpp"
#include "singspec/frobenius.hpp"
#include "singspec/geometry.hpp"
#include "singspec/io.hpp"
#include "singspec/parallel.hpp"
#include "singspec/sources.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>

namespace singspec::cli {

namespace {

using nlohmann::json;
using numeric::Vec;

struct Tolerances {
  double orthogonality = 1e-6;
  double lame = 1e-5;
  double egorov = 1e-5;
  double regularity = 1e-9;
  double wdvv = 1e-6;
  double quasihom = 1e-6;
  double correlator = 1e-6;
  double algebra = 1e-9;
  double residual = 1e-5;
};

struct RunConfig {
  std::string command;
  std::string example;
  std::string input;
  std::vector<std::string> params;
  std::vector<std::string> grids;
  Tolerances tol;
  std::string out;
  std::string format;
  std::uint64_t seed = 20240601;
  int dims = 0;
  double kappa = 1.0;
  double alpha = 1.0;
  double beta = 0.0;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(Errc c) {
  switch (c) {
    case Errc::SchemaError:
    case Errc::UnknownEntry:
    case Errc::InvalidArgument:
    case Errc::DomainViolation:
    case Errc::DegenerateParameters:
      return kExitUsage;
    default:
      return kExitCheckFailure;
  }
}

catalog::Params parse_params(const std::vector<std::string>& raw) {
  catalog::Params p;
  for (const auto& kv : raw) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--param expects k=v, got '" + kv + "'");
    const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(val, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != val.size() || val.empty()) throw UsageError("--param " + key + ": not a number: '" + val + "'");
    p[key] = v;
  }
  return p;
}

struct GridAxis {
  std::string axis;
  geometry::AxisRange range;
};

std::vector<GridAxis> parse_grids(const std::vector<std::string>& raw) {
  std::vector<GridAxis> out;
  for (const auto& g : raw) {
    std::vector<std::string> parts;
    std::stringstream ss(g);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 4) throw UsageError("--grid expects axis:min:max:count, got '" + g + "'");
    GridAxis a;
    a.axis = parts[0];
    try {
      std::size_t u1 = 0, u2 = 0, u3 = 0;
      a.range.min = std::stod(parts[1], &u1);
      a.range.max = std::stod(parts[2], &u2);
      a.range.count = std::stoi(parts[3], &u3);
      if (u1 != parts[1].size() || u2 != parts[2].size() || u3 != parts[3].size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw UsageError("--grid: cannot parse '" + g + "'");
    }
    if (a.range.count < 2) throw UsageError("--grid " + a.axis + ": count must be at least 2");
    if (!(a.range.min <= a.range.max)) throw UsageError("--grid " + a.axis + ": min must not exceed max");
    out.push_back(a);
  }
  return out;
}

/// Per-axis ranges for an N-dimensional chart; axes are named 1..N.
std::vector<geometry::AxisRange> chart_axes(const std::vector<std::string>& raw, int n) {
  std::vector<geometry::AxisRange> axes(static_cast<std::size_t>(n), geometry::AxisRange{-1.0, 1.0, 5});
  for (const auto& g : parse_grids(raw)) {
    int k = 0;
    try {
      k = std::stoi(g.axis);
    } catch (const std::exception&) {
      throw UsageError("--grid axis must be 1.." + std::to_string(n) + ", got '" + g.axis + "'");
    }
    if (k < 1 || k > n) throw UsageError("--grid axis must be 1.." + std::to_string(n) + ", got '" + g.axis + "'");
    axes[static_cast<std::size_t>(k - 1)] = g.range;
  }
  return axes;
}

void check_tolerances(const Tolerances& t) {
  for (double v : {t.orthogonality, t.lame, t.egorov, t.regularity, t.wdvv, t.quasihom, t.correlator, t.algebra,
                   t.residual})
    if (!(v > 0.0)) throw UsageError("tolerances must be positive");
}

std::string format_of(const RunConfig& cfg, const std::string& fallback, bool csv_allowed) {
  const std::string f = cfg.format.empty() ? fallback : cfg.format;
  if (f != "csv" && f != "json") throw UsageError("--format must be csv or json");
  if (f == "csv" && !csv_allowed) throw UsageError(cfg.command + " writes JSON only");
  return f;
}

void write_csv_value(std::ostream& os, double v) {
  if (std::isnan(v))
    os << "nan";
  else
    os << v;
}

void write_csv(std::ostream& os, const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows) {
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << '\n';
  os << std::setprecision(17);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) os << ',';
      write_csv_value(os, r[i]);
    }
    os << '\n';
  }
}

json table_json(const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows) {
  return {{"columns", columns}, {"rows", rows}};
}

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json cplx_json(curve::cplx z) { return json::array({z.real(), z.imag()}); }

// --- sources of charts and curves ---------------------------------------------

struct Source {
  json description;
  std::optional<curve::SpectralData> data;
  std::optional<curve::RationalDifferential> omega;
  std::optional<geometry::Chart> chart;
  std::optional<curve::SpectralData> topology;
};

Source resolve_source(const RunConfig& cfg) {
  if (cfg.example.empty() == cfg.input.empty()) throw UsageError("exactly one of --example or --input is required");
  Source s;
  if (!cfg.example.empty()) {
    catalog::Params p = parse_params(cfg.params);
    if (cfg.dims > 0) p["N"] = cfg.dims;
    auto entry = catalog::builtin(cfg.example, p);
    s.description = {{"example", entry.name}, {"parameters", entry.parameters}};
    s.data = entry.spectral_data;
    s.omega = entry.omega;
    s.chart = entry.chart;
    s.topology = entry.topology;
    return s;
  }
  if (!cfg.params.empty()) throw UsageError("--param applies to --example only");
  auto doc = io::spectral_from_json(io::read_json_file(cfg.input));
  s.description = {{"input", cfg.input}};
  s.data = doc.data;
  s.omega = doc.omega;
  s.topology = doc.data;
  const int n = doc.data.dimension();
  if (n >= 1 && curve::validate(doc.data).ok()) {
    numeric::Box box{Vec::Constant(n, -3.0), Vec::Constant(n, 3.0)};
    s.chart = geometry::engine_chart(doc.data, box, "input");
  }
  return s;
}

std::vector<Vec> chart_grid(const RunConfig& cfg, const geometry::Chart& chart) {
  auto grid = geometry::tensor_grid(chart_axes(cfg.grids, chart.dimension));
  for (const auto& u : grid) {
    if (!chart.domain.contains(u)) {
      std::ostringstream os;
      os << "grid point (" << u.transpose() << ") lies outside the domain of " << chart.name;
      throw Error(Errc::DomainViolation, os.str());
    }
  }
  return grid;
}

json genus_json(const curve::SpectralData& d) {
  const auto g = curve::arithmetic_genus(d);
  return {{"components", curve::connected_components(d)},
          {"per_component", g.per_component},
          {"total", g.total},
          {"exact", g.exact()},
          {"unsupported_constraints", g.unsupported_constraints}};
}

// --- verify -------------------------------------------------------------------

struct CheckLog {
  json checks = json::array();
  std::vector<std::string> failed;

  void add(json check, bool pass, const std::string& summary, std::ostream& err) {
    check["pass"] = pass;
    if (!pass) {
      failed.push_back(check["name"].get<std::string>());
      err << "FAIL " << check["name"].get<std::string>() << ": " << summary << '\n';
    }
    checks.push_back(std::move(check));
  }
};

std::string sci(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << v;
  return os.str();
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  format_of(cfg, "json", false);
  Source src = resolve_source(cfg);
  json report;
  report["command"] = "verify";
  report["source"] = src.description;
  CheckLog log;

  if (src.data) {
    const auto v = curve::validate(*src.data);
    json viol = json::array();
    for (const auto& x : v.violations) viol.push_back({{"code", x.code}, {"message", x.message}});
    std::string summary;
    if (!v.ok()) summary = v.violations.front().code + ": " + v.violations.front().message;
    log.add({{"name", "validate"}, {"violations", viol}}, v.ok(), summary, err);
  }
  if (src.topology) report["genus"] = genus_json(*src.topology);
  if (src.data && src.omega) {
    const auto r = curve::regularity_check(*src.data, *src.omega, cfg.tol.regularity);
    json gl = json::array();
    for (const auto& g : r.gluings)
      gl.push_back({{"constraint", g.constraint}, {"first", cplx_json(g.first)}, {"second", cplx_json(g.second)},
                    {"pass", g.pass}});
    json qr = json::array();
    for (const auto& q : r.q_residues) qr.push_back(cplx_json(q));
    log.add({{"name", "regularity"},
             {"gluing_residues", gl},
             {"q_residues", qr},
             {"gluing_pass", r.gluing_pass},
             {"q_equal", r.q_equal},
             {"eta0_squared", r.eta0_squared},
             {"tolerance", cfg.tol.regularity}},
            r.ok(), r.gluing_pass ? "residues at the Q points differ" : "residues do not cancel at a double point",
            err);
  }
  if (!src.chart) {
    if (!src.data) throw UsageError("entry has neither a chart nor spectral data");
    report["checks"] = log.checks;
    report["failed"] = log.failed;
    report["pass"] = log.failed.empty();
    out << report.dump(2) << '\n';
    return log.failed.empty() ? kExitPass : kExitCheckFailure;
  }

  const auto& chart = *src.chart;
  const auto grid = chart_grid(cfg, chart);
  report["dimension"] = chart.dimension;
  report["grid_points"] = grid.size();

  const auto orth = geometry::orthogonality_report(chart, grid);
  {
    json c = {{"name", "orthogonality"},
              {"max_offdiag_ratio", orth.max_offdiag_ratio},
              {"worst_point", vec_json(orth.worst_point)},
              {"tolerance", cfg.tol.orthogonality}};
    bool pass = orth.max_offdiag_ratio < cfg.tol.orthogonality;
    std::string summary = "max off-diagonal Gram ratio " + sci(orth.max_offdiag_ratio) + " >= " + sci(cfg.tol.orthogonality);
    if (orth.lame_checked) {
      c["max_lame_mismatch"] = orth.max_lame_mismatch;
      if (orth.max_lame_mismatch >= cfg.tol.orthogonality) {
        if (pass) summary = "Gram diagonal differs from the engine Lame coefficients by " + sci(orth.max_lame_mismatch);
        pass = false;
      }
    }
    log.add(c, pass, summary, err);
  }

  if (chart.dimension >= 2) {
    std::vector<geometry::LameResidual> lame(grid.size());
    std::vector<geometry::EgorovResidual> eg(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
      lame[i] = geometry::lame_residual(chart, grid[i]);
      eg[i] = geometry::egorov_residuals(chart, grid[i]);
    });
    double offdiag = 0.0, flat = 0.0, sym = 0.0, eflat = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      offdiag = std::max(offdiag, lame[i].offdiag);
      flat = std::max(flat, lame[i].flat);
      sym = std::max(sym, eg[i].symmetry);
      eflat = std::max(eflat, eg[i].flatness);
    }
    const double worst = std::max(offdiag, flat);
    log.add({{"name", "lame"}, {"offdiag", offdiag}, {"flat", flat}, {"tolerance", cfg.tol.lame}},
            worst < cfg.tol.lame, "Lame equation residual " + sci(worst) + " >= " + sci(cfg.tol.lame), err);
    json e = {{"name", "egorov"},
              {"expected", chart.egorov_expected},
              {"symmetry", sym},
              {"flatness", eflat},
              {"tolerance", cfg.tol.egorov}};
    if (chart.egorov_expected) {
      const double w = std::max(sym, eflat);
      log.add(e, w < cfg.tol.egorov, "Egorov residual " + sci(w) + " >= " + sci(cfg.tol.egorov), err);
    } else {
      e["pass"] = nullptr;  // informational: the chart is not claimed to be Egorov
      log.checks.push_back(e);
    }
  }

  report["checks"] = log.checks;
  report["failed"] = log.failed;
  report["pass"] = log.failed.empty();
  out << report.dump(2) << '\n';
  return log.failed.empty() ? kExitPass : kExitCheckFailure;
}

// --- grid ---------------------------------------------------------------------

int cmd_grid(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const std::string fmt = format_of(cfg, "csv", true);
  Source src = resolve_source(cfg);
  if (!src.chart) throw UsageError("entry has no chart");
  const auto& chart = *src.chart;
  const auto grid = chart_grid(cfg, chart);
  const int n = chart.dimension;
  const bool with_h = static_cast<bool>(chart.lame);

  std::vector<std::string> columns;
  for (int i = 1; i <= n; ++i) columns.push_back("u" + std::to_string(i));
  for (int i = 1; i <= n; ++i) columns.push_back("x" + std::to_string(i));
  if (with_h)
    for (int i = 1; i <= n; ++i) columns.push_back("H" + std::to_string(i));

  std::vector<std::vector<double>> rows(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) {
    const Vec& u = grid[k];
    const Vec x = chart.map(u);
    auto& r = rows[k];
    r.assign(u.data(), u.data() + n);
    r.insert(r.end(), x.data(), x.data() + n);
    if (with_h) {
      const Vec h = chart.lame(u);
      r.insert(r.end(), h.data(), h.data() + n);
    }
  });
  if (fmt == "csv") {
    write_csv(out, columns, rows);
  } else {
    json j = table_json(columns, rows);
    j["source"] = src.description;
    out << j.dump(2) << '\n';
  }
  return kExitPass;
}

// --- frobenius ----------------------------------------------------------------

struct PrepotentialSource {
  json description;
  frobenius::PrepotentialSpec spec;
  std::function<Vec(std::mt19937_64&)> sample;
};

PrepotentialSource resolve_prepotential(const RunConfig& cfg) {
  if (cfg.example.empty() == cfg.input.empty()) throw UsageError("exactly one of --example or --input is required");
  PrepotentialSource s;
  if (!cfg.input.empty()) {
    if (!cfg.params.empty()) throw UsageError("--param applies to --example only");
    s.spec = io::prepotential_from_json(io::read_json_file(cfg.input));
    s.description = {{"input", cfg.input}};
    const int n = s.spec.n;
    s.sample = [n](std::mt19937_64& rng) {
      std::uniform_real_distribution<double> d(-1.0, 1.0);
      Vec x(n);
      for (int i = 0; i < n; ++i) x[i] = d(rng);
      return x;
    };
    return s;
  }
  const auto p = parse_params(cfg.params);
  auto get = [&](const std::string& k, double fallback) {
    auto it = p.find(k);
    return it == p.end() ? fallback : it->second;
  };
  auto allow = [&](std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : p) {
      bool ok = false;
      for (const char* a : keys) ok = ok || k == a;
      if (!ok) throw UsageError("parameter '" + k + "' is not used by " + cfg.example);
    }
  };
  if (cfg.example == "example12") {
    allow({"q"});
    const double q = get("q", 0.0);
    s.spec = frobenius::example12_prepotential(q);
    s.description = {{"example", "example12"}, {"parameters", {{"q", q}}}};
    s.sample = [](std::mt19937_64& rng) {
      std::uniform_real_distribution<double> rad(0.5, 2.0), ang(-M_PI, M_PI);
      const double r = rad(rng), a = ang(rng);
      Vec x(2);
      x << r * std::cos(a), r * std::sin(a);
      return x;
    };
  } else if (cfg.example == "example11") {
    allow({"a", "c"});
    const double a = get("a", 1.0), c = get("c", 2.0 / std::sqrt(7.0));
    s.spec = frobenius::example11_prepotential(a, c);
    s.description = {{"example", "example11"}, {"parameters", {{"a", a}, {"c", c}}}};
    s.sample = [](std::mt19937_64& rng) {
      std::uniform_real_distribution<double> d(0.3, 1.0);
      Vec x(2);
      x[0] = d(rng);
      x[1] = d(rng);
      return x;
    };
  } else {
    throw Error(Errc::UnknownEntry, "no prepotential named '" + cfg.example + "' (example11, example12)");
  }
  return s;
}

double tensor_max_diff(const frobenius::Tensor3& a, const frobenius::Tensor3& b) {
  double m = 0.0;
  const int n = a.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) m = std::max(m, std::abs(a(i, j, k) - b(i, j, k)));
  return m;
}

json tensor_json(const frobenius::Tensor3& c) {
  json j = json::array();
  const int n = c.size();
  for (int i = 0; i < n; ++i)
    for (int k = i; k < n; ++k)
      for (int l = k; l < n; ++l)
        j.push_back({{"indices", {i + 1, k + 1, l + 1}}, {"value", c(i, k, l)}});
  return j;
}

int cmd_frobenius(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  format_of(cfg, "json", false);
  auto src = resolve_prepotential(cfg);
  const auto& spec = src.spec;
  std::mt19937_64 rng(cfg.seed);
  constexpr int kPoints = 20;
  constexpr int kMaxDraws = 10000;

  std::vector<Vec> points;
  for (int draws = 0; static_cast<int>(points.size()) < kPoints && draws < kMaxDraws; ++draws) {
    Vec x = src.sample(rng);
    if (!spec.in_domain || spec.in_domain(x)) points.push_back(std::move(x));
  }
  if (static_cast<int>(points.size()) < kPoints) throw Error(Errc::DomainViolation, "could not sample the domain");

  const std::vector<double> lambdas{0.5, 2.0, 3.0};
  double wdvv = 0.0, quasi = 0.0, closed = 0.0;
  bool has_closed = static_cast<bool>(spec.closed_form);
  json samples = json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec& x = points[i];
    const auto c = frobenius::correlators(spec, x);
    wdvv = std::max(wdvv, frobenius::wdvv_residual(c.c, frobenius::inverse_metric(spec.eta)));
    std::vector<double> ok_lambdas;
    for (double l : lambdas) {
      Vec lx = x;
      if (spec.euler) {
        for (int a = 0; a < spec.n; ++a) lx[a] *= std::pow(l, spec.euler->degrees[static_cast<std::size_t>(a)]);
      } else {
        lx *= l;
      }
      if (!spec.in_domain || spec.in_domain(lx)) ok_lambdas.push_back(l);
    }
    if (!ok_lambdas.empty()) quasi = std::max(quasi, frobenius::quasihom_residual(spec, x, ok_lambdas));
    if (has_closed) {
      const auto fd = frobenius::fd_correlators(spec, x);
      closed = std::max(closed, tensor_max_diff(c.c, fd.c) / std::max(1e-300, c.c.max_abs()));
    }
    if (i < 3) samples.push_back({{"x", vec_json(x)}, {"correlators", tensor_json(c.c)}});
  }

  json report;
  report["command"] = "frobenius";
  report["source"] = src.description;
  report["seed"] = cfg.seed;
  report["points"] = points.size();
  report["samples"] = samples;
  CheckLog log;
  log.add({{"name", "wdvv"}, {"max_residual", wdvv}, {"tolerance", cfg.tol.wdvv}}, wdvv < cfg.tol.wdvv,
          "associativity residual " + sci(wdvv) + " >= " + sci(cfg.tol.wdvv), err);
  log.add({{"name", "quasihomogeneity"},
           {"max_residual", quasi},
           {"lambdas", lambdas},
           {"euler", static_cast<bool>(spec.euler)},
           {"tolerance", cfg.tol.quasihom}},
          quasi < cfg.tol.quasihom, "homogeneity residual " + sci(quasi) + " >= " + sci(cfg.tol.quasihom), err);
  if (has_closed)
    log.add({{"name", "closed_form"}, {"max_relative_difference", closed}, {"tolerance", cfg.tol.correlator}},
            closed < cfg.tol.correlator,
            "finite-difference correlators differ from the closed forms by " + sci(closed), err);

  const auto ext = frobenius::extend(spec);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Vec t(spec.n + 2);
  t[0] = d(rng);
  t.segment(1, spec.n) = points.front();
  t[spec.n + 1] = d(rng);
  const auto alg = frobenius::verify_algebra(ext, t, cfg.tol.algebra);
  log.add({{"name", "unit"}, {"defect", alg.unit_defect}, {"tolerance", cfg.tol.algebra}}, alg.unit_ok,
          "e0 is not a unit: defect " + sci(alg.unit_defect), err);
  log.add({{"name", "nilpotent"}, {"defect", alg.nilpotent_defect}, {"tolerance", cfg.tol.algebra}}, alg.nilpotent_ok,
          "e_(N+1)^2 != 0: defect " + sci(alg.nilpotent_defect), err);
  log.add({{"name", "extended_wdvv"}, {"max_residual", alg.wdvv}, {"tolerance", cfg.tol.wdvv}}, alg.wdvv < cfg.tol.wdvv,
          "associativity residual of the extension " + sci(alg.wdvv), err);
  report["extension"] = {{"t", vec_json(t)}, {"euler_extension_unavailable", ext.euler_extension_unavailable}};
  report["checks"] = log.checks;
  report["failed"] = log.failed;
  report["pass"] = log.failed.empty();
  out << report.dump(2) << '\n';
  return log.failed.empty() ? kExitPass : kExitCheckFailure;
}

// --- soliton ------------------------------------------------------------------

int cmd_soliton(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::string fmt = format_of(cfg, "csv", true);
  if (!cfg.example.empty() || !cfg.input.empty() || !cfg.params.empty())
    throw UsageError("soliton takes --kappa, --alpha, --beta");
  sources::SourceSolitonParams p{cfg.kappa, cfg.alpha, cfg.beta};
  if (!(p.kappa > 0.0)) throw UsageError("--kappa must be positive");
  geometry::AxisRange xr{-5.0, 5.0, 41}, tr{0.0, 1.0, 11};
  for (const auto& g : parse_grids(cfg.grids)) {
    if (g.axis == "x")
      xr = g.range;
    else if (g.axis == "t")
      tr = g.range;
    else
      throw UsageError("soliton grid axes are x and t, got '" + g.axis + "'");
  }

  const auto sweep = sources::residual_sweep(p, xr.min, xr.max, xr.count, tr.min, tr.max, tr.count);
  const auto event = sources::annihilation_time(p);

  const std::vector<std::string> columns{"t", "x", "u", "psi", "tau"};
  std::vector<std::vector<double>> rows;
  for (int j = 0; j < tr.count; ++j) {
    const double t = tr.min + (tr.max - tr.min) * j / (tr.count - 1);
    for (int i = 0; i < xr.count; ++i) {
      const double x = xr.min + (xr.max - xr.min) * i / (xr.count - 1);
      double u = std::numeric_limits<double>::quiet_NaN(), psi = u;
      try {
        u = sources::soliton_u(p, x, t);
        psi = sources::soliton_psi(p, x, t);
      } catch (const Error& e) {
        if (e.code() != Errc::SingularSoliton) throw;
      }
      rows.push_back({t, x, u, psi, sources::tau(p, t)});
    }
  }

  std::ostringstream event_line;
  if (event)
    event_line << "event: " << sources::to_string(event->kind) << " at t*=" << event->t_star + 0.0;
  else
    event_line << "event: none";
  const bool pass = sweep.max_residual < cfg.tol.residual;
  err << "residual: max " << std::setprecision(6) << sweep.max_residual << " at x=" << sweep.worst_x
      << " t=" << sweep.worst_t << " (" << sweep.evaluated << " evaluated, " << sweep.skipped << " skipped)\n";
  err << event_line.str() << '\n';
  if (!pass) err << "FAIL residual: " << sci(sweep.max_residual) << " >= " << sci(cfg.tol.residual) << '\n';

  if (fmt == "csv") {
    write_csv(out, columns, rows);
  } else {
    json j;
    j["command"] = "soliton";
    j["parameters"] = {{"kappa", p.kappa}, {"alpha", p.alpha}, {"beta", p.beta}};
    j["residual"] = {{"max", sweep.max_residual},
                     {"worst_x", sweep.worst_x},
                     {"worst_t", sweep.worst_t},
                     {"evaluated", sweep.evaluated},
                     {"skipped", sweep.skipped},
                     {"tolerance", cfg.tol.residual},
                     {"pass", pass}};
    if (event)
      j["event"] = {{"kind", sources::to_string(event->kind)}, {"t_star", event->t_star + 0.0}};
    else
      j["event"] = nullptr;
    j["waterfall"] = table_json(columns, rows);
    j["pass"] = pass;
    out << j.dump(2) << '\n';
  }
  return pass ? kExitPass : kExitCheckFailure;
}

// --- genus --------------------------------------------------------------------

int cmd_genus(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  format_of(cfg, "json", false);
  Source src = resolve_source(cfg);
  if (!src.topology) throw UsageError("entry has no curve");
  json j = genus_json(*src.topology);
  j["command"] = "genus";
  j["source"] = src.description;
  out << j.dump(2) << '\n';
  return kExitPass;
}

void add_common(CLI::App* sub, RunConfig& cfg, bool with_source) {
  if (with_source) {
    sub->add_option("--example", cfg.example, "Built-in example name");
    sub->add_option("--input", cfg.input, "JSON input file");
    sub->add_option("--param", cfg.params, "Parameter override k=v (repeatable)");
    sub->add_option("--dims", cfg.dims, "Dimension N for euclidean and spherical");
  }
  sub->add_option("--grid", cfg.grids, "Grid axis:min:max:count (repeatable)");
  sub->add_option("--out", cfg.out, "Write the report to this file");
  sub->add_option("--format", cfg.format, "csv or json");
  sub->add_option("--seed", cfg.seed, "Seed for sampled points");
  sub->add_option("--tol-orthogonality", cfg.tol.orthogonality, "Tolerance")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--tol-lame", cfg.tol.lame, "Tolerance")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--tol-egorov", cfg.tol.egorov, "Tolerance")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--tol-regularity", cfg.tol.regularity, "Tolerance")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--tol-wdvv", cfg.tol.wdvv, "Tolerance")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--tol-quasihom", cfg.tol.quasihom, "Tolerance")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--tol-correlator", cfg.tol.correlator, "Tolerance")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--tol-algebra", cfg.tol.algebra, "Tolerance")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--tol-residual", cfg.tol.residual, "Tolerance")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.command == "verify") return cmd_verify(cfg, out, err);
  if (cfg.command == "grid") return cmd_grid(cfg, out, err);
  if (cfg.command == "frobenius") return cmd_frobenius(cfg, out, err);
  if (cfg.command == "soliton") return cmd_soliton(cfg, out, err);
  return cmd_genus(cfg, out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Baker-Akhiezer functions on singular rational curves: checks, grids and reports", "singspec"};
  app.require_subcommand(1);
  struct Sub {
    const char* name;
    const char* help;
    bool with_source;
  };
  const Sub subs[] = {
      {"verify", "Run validation, genus, regularity, orthogonality, Lame and Egorov checks", true},
      {"grid", "Write the coordinate map (and engine Lame coefficients) on a grid", true},
      {"frobenius", "Correlators, WDVV, quasihomogeneity and extension checks", true},
      {"soliton", "KdV-with-source soliton waterfall and residual check", false},
      {"genus", "Arithmetic genus per connected component", true},
  };
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_common(sub, cfg, s.with_source);
    if (std::string(s.name) == "soliton") {
      sub->add_option("--kappa", cfg.kappa, "Double point at +-kappa");
      sub->add_option("--alpha", cfg.alpha, "tau(0)");
      sub->add_option("--beta", cfg.beta, "d tau / dt");
    }
    sub->callback([&cfg, name = std::string(s.name)] { cfg.command = name; });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    check_tolerances(cfg.tol);
    if (cfg.out.empty()) return dispatch(cfg, out, err);
    std::ostringstream buffer;
    const int code = dispatch(cfg, buffer, err);
    std::ofstream file(cfg.out);
    if (!file || !(file << buffer.str())) {
      err << "error: cannot write " << cfg.out << '\n';
      return kExitUsage;
    }
    return code;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailure;
  }
}

}  // namespace singspec::cli
