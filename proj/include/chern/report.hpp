#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "chern/fields.hpp"
#include "chern/identities.hpp"
#include "chern/manifold.hpp"

namespace chern {

using json = nlohmann::ordered_json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct FieldSpec {
  FieldKind kind = FieldKind::OneForm;
  std::string builtin;                  // builtin field name, or
  std::vector<std::string> components;  // explicit component expressions, or
  bool random = false;                  // seeded random trig field
  int degree = 1;
  std::uint64_t seed = 0;  // 0: derive from the run seed and the field index
};

struct RunConfig {
  ManifoldConfig manifold;
  int resolution = 8;
  std::string derivative_mode = "symbolic";
  FdOptions fd;
  Tolerances tol;
  std::vector<FieldSpec> fields;
  std::vector<std::string> cases;  // empty or {"all"}: every case
  std::uint64_t seed = 12345;
  int threads = 0;
  int scan_resolution = 0;  // 0: min(resolution, 8)
  std::string out_dir;
  bool csv = false;
  bool timestamp = true;
  std::uint64_t point_cap = (1ull << 27);
  std::vector<std::vector<double>> points;  // 2n reals each (tensor dumps)

  DerivMode mode() const {
    if (derivative_mode == "symbolic") return DerivMode::Symbolic;
    if (derivative_mode == "fd") return DerivMode::FiniteDifference;
    throw ConfigError("derivative_mode must be \"symbolic\" or \"fd\"");
  }
  int effective_scan_resolution() const {
    return scan_resolution > 0 ? scan_resolution : std::min(resolution, 8);
  }
};

namespace cfg_detail {

inline void expect_object(const json& j, const std::string& what) {
  if (!j.is_object()) throw ConfigError(what + " must be a JSON object");
}

inline ManifoldConfig parse_manifold(const json& j) {
  expect_object(j, "manifold");
  ManifoldConfig m;
  if (j.contains("builtin")) {
    m.builtin = j.at("builtin").get<std::string>();
    if (j.contains("params"))
      for (auto& [k, v] : j.at("params").items())
        m.params[k] = v.get<double>();
  } else if (j.contains("custom")) {
    const json& c = j.at("custom");
    expect_object(c, "manifold.custom");
    m.n = c.at("n").get<int>();
    for (const auto& row : c.at("entries")) {
      std::vector<std::string> r;
      for (const auto& e : row) r.push_back(e.get<std::string>());
      m.entries.push_back(std::move(r));
    }
    if (c.contains("box"))
      for (const auto& iv : c.at("box"))
        m.box.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
    if (c.contains("params"))
      for (auto& [k, v] : c.at("params").items())
        m.custom_params[k] = v.get<double>();
  } else {
    throw ConfigError("manifold needs either \"builtin\" or \"custom\"");
  }
  return m;
}

inline FieldSpec parse_field(const json& j) {
  expect_object(j, "field");
  FieldSpec f;
  std::string key;
  if (j.contains("form")) { f.kind = FieldKind::OneForm; key = "form"; }
  else if (j.contains("vector")) { f.kind = FieldKind::VectorField; key = "vector"; }
  else throw ConfigError("field entry needs a \"form\" or \"vector\" key");
  const json& b = j.at(key);
  if (b.is_string()) {
    f.builtin = b.get<std::string>();
  } else if (b.is_object()) {
    if (b.contains("builtin")) f.builtin = b.at("builtin").get<std::string>();
    else if (b.contains("components"))
      for (const auto& c : b.at("components")) f.components.push_back(c.get<std::string>());
    else if (b.contains("random_trig")) {
      f.random = true;
      const json& r = b.at("random_trig");
      if (r.contains("degree")) f.degree = r.at("degree").get<int>();
      if (r.contains("seed")) f.seed = r.at("seed").get<std::uint64_t>();
    } else {
      throw ConfigError("field needs \"builtin\", \"components\" or \"random_trig\"");
    }
  } else {
    throw ConfigError("field body must be a string or object");
  }
  return f;
}

}  // namespace cfg_detail

inline RunConfig parse_config(const json& j) {
  cfg_detail::expect_object(j, "config");
  RunConfig c;
  if (!j.contains("manifold")) throw ConfigError("config needs a \"manifold\"");
  c.manifold = cfg_detail::parse_manifold(j.at("manifold"));
  if (j.contains("resolution")) c.resolution = j.at("resolution").get<int>();
  if (c.resolution < 2) throw ConfigError("resolution must be >= 2");
  if (j.contains("derivative_mode"))
    c.derivative_mode = j.at("derivative_mode").get<std::string>();
  (void)c.mode();  // validate
  if (j.contains("fd")) {
    const json& f = j.at("fd");
    if (f.contains("step")) c.fd.step1 = f.at("step").get<double>();
    if (f.contains("step2")) c.fd.step2 = f.at("step2").get<double>();
    if (f.contains("richardson")) c.fd.richardson = f.at("richardson").get<bool>();
  }
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    auto rd = [&](const char* k, double& v) {
      if (t.contains(k)) v = t.at(k).get<double>();
    };
    rd("pointwise", c.tol.pointwise_rel);
    rd("pointwise_fd", c.tol.pointwise_rel_fd);
    rd("integral", c.tol.integral_abs);
    rd("balanced", c.tol.balanced);
    rd("zero", c.tol.zero);
    rd("gate_analytic", c.tol.gate_analytic);
    rd("gate_harmonic", c.tol.gate_harmonic);
    rd("gate_killing", c.tol.gate_killing13);
  }
  if (j.contains("fields"))
    for (const auto& f : j.at("fields")) c.fields.push_back(cfg_detail::parse_field(f));
  if (j.contains("cases"))
    for (const auto& s : j.at("cases")) c.cases.push_back(s.get<std::string>());
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("threads")) c.threads = j.at("threads").get<int>();
  if (j.contains("scan_resolution")) c.scan_resolution = j.at("scan_resolution").get<int>();
  if (j.contains("point_cap")) c.point_cap = j.at("point_cap").get<std::uint64_t>();
  if (j.contains("output")) {
    const json& o = j.at("output");
    if (o.contains("dir")) c.out_dir = o.at("dir").get<std::string>();
    if (o.contains("csv")) c.csv = o.at("csv").get<bool>();
    if (o.contains("timestamp")) c.timestamp = o.at("timestamp").get<bool>();
  }
  if (j.contains("points"))
    for (const auto& p : j.at("points")) {
      std::vector<double> row;
      for (const auto& x : p) row.push_back(x.get<double>());
      c.points.push_back(std::move(row));
    }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

inline json config_to_json(const RunConfig& c) {
  json j;
  json m;
  if (!c.manifold.builtin.empty()) {
    m["builtin"] = c.manifold.builtin;
    if (!c.manifold.params.empty()) {
      json p;
      for (auto& [k, v] : c.manifold.params) p[k] = v;
      m["params"] = p;
    }
  } else {
    json cu;
    cu["n"] = c.manifold.n;
    cu["entries"] = c.manifold.entries;
    if (!c.manifold.box.empty()) {
      json b = json::array();
      for (auto& iv : c.manifold.box) b.push_back({iv[0], iv[1]});
      cu["box"] = b;
    }
    if (!c.manifold.custom_params.empty()) {
      json p;
      for (auto& [k, v] : c.manifold.custom_params) p[k] = v;
      cu["params"] = p;
    }
    m["custom"] = cu;
  }
  j["manifold"] = m;
  j["resolution"] = c.resolution;
  j["derivative_mode"] = c.derivative_mode;
  j["fd"] = {{"step", c.fd.step1}, {"step2", c.fd.step2}, {"richardson", c.fd.richardson}};
  j["tolerances"] = {{"pointwise", c.tol.pointwise_rel},
                     {"pointwise_fd", c.tol.pointwise_rel_fd},
                     {"integral", c.tol.integral_abs},
                     {"balanced", c.tol.balanced},
                     {"zero", c.tol.zero},
                     {"gate_analytic", c.tol.gate_analytic},
                     {"gate_harmonic", c.tol.gate_harmonic},
                     {"gate_killing", c.tol.gate_killing13}};
  json fl = json::array();
  for (const auto& f : c.fields) {
    json body;
    if (!f.builtin.empty()) body["builtin"] = f.builtin;
    else if (!f.components.empty()) body["components"] = f.components;
    else body["random_trig"] = {{"degree", f.degree}, {"seed", f.seed}};
    fl.push_back(json{{f.kind == FieldKind::OneForm ? "form" : "vector", body}});
  }
  j["fields"] = fl;
  j["cases"] = c.cases.empty() ? json::array({"all"}) : json(c.cases);
  j["seed"] = c.seed;
  // the worker thread count is an execution detail with no effect on the
  // results, so it is not part of the echoed configuration
  j["scan_resolution"] = c.effective_scan_resolution();
  j["point_cap"] = c.point_cap;
  j["output"] = {{"dir", c.out_dir}, {"csv", c.csv}, {"timestamp", c.timestamp}};
  if (!c.points.empty()) j["points"] = c.points;
  return j;
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

struct Report {
  json doc;
  int exit_code = 0;
};

inline std::vector<Field> materialize_fields(const ManifoldModel& m,
                                             const RunConfig& cfg) {
  std::vector<Field> out;
  int i = 0;
  for (const auto& fs : cfg.fields) {
    if (!fs.builtin.empty()) {
      Field f = fieldlib::builtin_field(m, fs.builtin);
      if (f.kind != fs.kind)
        throw ConfigError("builtin field '" + fs.builtin + "' is a " +
                          (f.kind == FieldKind::OneForm ? "form" : "vector field"));
      out.push_back(std::move(f));
    } else if (!fs.components.empty()) {
      if (static_cast<int>(fs.components.size()) != m.chart.n)
        throw ConfigError("field needs n component expressions");
      std::vector<Expr> comps;
      for (const auto& s : fs.components) comps.push_back(parse_expr(s, m.chart.n));
      Field f;
      f.kind = fs.kind;
      f.name = (fs.kind == FieldKind::OneForm ? "form_" : "vector_") + std::to_string(i);
      f.comps = FieldComponents::symbolic(m.chart.n, std::move(comps));
      out.push_back(std::move(f));
    } else {
      std::uint64_t seed = fs.seed ? fs.seed
                                   : cfg.seed + 1000003ull * static_cast<std::uint64_t>(i + 1);
      out.push_back(fieldlib::random_trig_field(m, fs.kind, fs.degree, seed));
    }
    ++i;
  }
  // derivative mode + fd options apply to fields too
  for (auto& f : out) {
    f.comps.set_fd_options(cfg.fd);
    if (cfg.mode() == DerivMode::FiniteDifference)
      f.comps.set_mode(DerivMode::FiniteDifference);
  }
  return out;
}

/// Default field set used by `verify`/`classify` when the config lists none.
inline std::vector<FieldSpec> default_field_specs(const std::string& builtin) {
  std::vector<FieldSpec> out;
  auto form = [&](const std::string& name) {
    FieldSpec f; f.kind = FieldKind::OneForm; f.builtin = name; out.push_back(f);
  };
  auto vec = [&](const std::string& name) {
    FieldSpec f; f.kind = FieldKind::VectorField; f.builtin = name; out.push_back(f);
  };
  auto rnd = [&](FieldKind k) {
    FieldSpec f; f.kind = k; f.random = true; f.degree = 1; out.push_back(f);
  };
  if (builtin == "iwasawa") {
    form("phi1"); form("phi2"); form("phi3");
    vec("E1"); vec("E2"); vec("E3");
  } else {
    form("dx1");
    vec("ddz1");
  }
  rnd(FieldKind::OneForm);
  rnd(FieldKind::VectorField);
  return out;
}

inline json balanced_to_json(const BalancedReport& b) {
  return json{{"balanced", b.balanced},
              {"max_theta_component", b.max_theta_component},
              {"max_theta_norm", b.max_theta_norm},
              {"max_dOmega_trace", b.max_dOmega_trace},
              {"max_delta_Omega", b.max_delta_Omega},
              {"max_laplacian_deviation", b.max_laplacian_dev},
              {"tolerance", b.tolerance}};
}

inline Report run_pipeline(const RunConfig& cfg_in) {
  RunConfig cfg = cfg_in;
  if (cfg.fields.empty()) cfg.fields = default_field_specs(cfg.manifold.builtin);
  for (std::size_t i = 0; i < cfg.fields.size(); ++i)
    if (cfg.fields[i].random && cfg.fields[i].seed == 0)
      cfg.fields[i].seed = cfg.seed + 1000003ull * static_cast<std::uint64_t>(i + 1);

  ManifoldModel m = build_manifold(cfg.manifold);
  m.metric.set_fd_options(cfg.fd);
  if (cfg.mode() == DerivMode::FiniteDifference)
    m.metric.set_mode(DerivMode::FiniteDifference);

  SuiteRequest req;
  req.fields = materialize_fields(m, cfg);
  req.resolution = cfg.resolution;
  req.tol = cfg.tol;
  req.threads = cfg.threads;
  req.point_cap = cfg.point_cap;
  if (!cfg.cases.empty() &&
      !(cfg.cases.size() == 1 && (cfg.cases[0] == "all" || cfg.cases[0] == "ALL"))) {
    for (const auto& s : cfg.cases) {
      auto id = case_from_string(s);
      if (!id) throw ConfigError("unknown case id '" + s + "'");
      req.cases.push_back(*id);
    }
  }

  auto t0 = std::chrono::steady_clock::now();
  SuiteResult suite = run_suite(m, req);
  double sweep_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  TheoremReport theorems =
      theorem_report(m, suite, cfg.effective_scan_resolution(), cfg.tol);

  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["tool"] = {{"name", "chern"}, {"version", kToolVersion}};
  if (cfg.timestamp) {
    std::time_t now = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    doc["timestamp"] = buf;
  }
  doc["config"] = config_to_json(cfg);
  doc["manifold"] = {{"name", m.name},
                     {"n", m.chart.n},
                     {"volume", suite.volume},
                     {"resolution", suite.resolution},
                     {"grid_points", suite.grid_points},
                     {"swept_points", suite.swept_points},
                     {"derivative_mode", cfg.derivative_mode}};
  doc["balanced"] = balanced_to_json(suite.balanced);

  json envs = json::array();
  for (const auto& t : suite.tensors)
    envs.push_back({{"tensor", t.name}, {"eig_min", t.eig_min}, {"eig_max", t.eig_max}});
  doc["tensor_envelopes"] = envs;

  json forms = json::array();
  for (const auto& f : suite.forms) {
    json e = {{"name", f.name},
              {"analytic_residual", f.analytic_sup},
              {"analytic_residual_l2", f.analytic_l2},
              {"closed20_residual", f.closed20_sup},
              {"closed11_residual", f.closed11_sup},
              {"delta", f.delta_sup},
              {"delta_J", f.deltaJ_sup},
              {"int_H", f.int_H},
              {"analytic", f.analytic(cfg.tol.gate_analytic)},
              {"harmonic", f.harmonic(cfg.tol.gate_harmonic)}};
    if (f.seed) e["seed"] = f.seed;
    forms.push_back(std::move(e));
  }
  json vecs = json::array();
  for (const auto& v : suite.vectors) {
    json e = {{"name", v.name},
              {"analytic_residual", v.analytic_sup},
              {"analytic_residual_l2", v.analytic_l2},
              {"killing_residual", v.killing_full_sup},
              {"killing_block_residual", v.killing20_sup},
              {"lie_connection_mixed", v.lie_mixed_sup},
              {"lie_connection_conj", v.lie_conj_sup},
              {"affine_residual", v.affine_sup},
              {"delta", v.delta_sup},
              {"delta_J", v.deltaJ_sup},
              {"k_quadratic_sup", v.kquad_sup},
              {"analytic", v.analytic(cfg.tol.gate_analytic)},
              {"killing", v.killing(cfg.tol.gate_killing13)}};
    if (v.seed) e["seed"] = v.seed;
    vecs.push_back(std::move(e));
  }
  doc["fields"] = {{"forms", forms}, {"vectors", vecs}};

  int fails = 0, passes = 0, inapp = 0, hyp = 0;
  json cases = json::array();
  for (const auto& c : suite.cases) {
    switch (c.verdict) {
      case Verdict::PASS: ++passes; break;
      case Verdict::FAIL: ++fails; break;
      case Verdict::INAPPLICABLE: ++inapp; break;
      case Verdict::HYPOTHESIS_NOT_MET: ++hyp; break;
    }
    json e = {{"id", c.case_name},
              {"field", c.field_name},
              {"verdict", to_string(c.verdict)},
              {"residual", c.residual},
              {"tolerance", c.tolerance},
              {"pointwise_sup", c.pointwise_sup},
              {"runtime_sec", sweep_sec}};
    if (!c.note.empty()) e["note"] = c.note;
    cases.push_back(std::move(e));
  }
  doc["cases"] = cases;
  doc["case_runtime_note"] =
      "cases are evaluated in one shared sweep; runtime_sec is the sweep wall time";

  json ths = json::array();
  for (const auto& r : theorems.records) {
    ths.push_back({{"id", r.id},
                   {"hypothesis", r.hypothesis},
                   {"applicable", r.applicable},
                   {"consistent", r.consistent},
                   {"notes", r.notes}});
  }
  doc["theorems"] = ths;

  doc["summary"] = {{"pass", passes},
                    {"fail", fails},
                    {"inapplicable", inapp},
                    {"hypothesis_not_met", hyp},
                    {"exit_code", fails > 0 ? 1 : 0}};

  Report rep;
  rep.doc = std::move(doc);
  rep.exit_code = fails > 0 ? 1 : 0;
  return rep;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

/// Tensor eigenvalue table rows at the scan grid (or explicit points).
inline std::string tensor_csv(const ManifoldModel& m, const std::vector<CPoint>& pts) {
  std::ostringstream os;
  os.precision(17);
  const int n = m.chart.n;
  os << "point_index";
  for (int k = 0; k < n; ++k) os << ",re_z" << (k + 1) << ",im_z" << (k + 1);
  auto head = [&](const std::string& t) {
    for (int i = 0; i < n; ++i) os << "," << t << "_eig" << (i + 1);
  };
  head("k"); head("kstar"); head("s"); head("t"); head("H");
  os << ",theta_max\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    PointGeometry g = compute_geometry(m, pts[i], true);
    os << i;
    for (int k = 0; k < n; ++k)
      os << "," << pts[i][static_cast<std::size_t>(k)].real() << ","
         << pts[i][static_cast<std::size_t>(k)].imag();
    auto dump = [&](const Mat& q) {
      RVec ev = g.invariant_eigenvalues(q);
      for (int e = 0; e < n; ++e) os << "," << ev(e);
    };
    dump(g.k); dump(g.kstar); dump(g.s); dump(g.t); dump(g.H);
    os << "," << g.theta.cwiseAbs().maxCoeff() << "\n";
  }
  return os.str();
}

/// Deterministic sample of grid points for CSV tables.
inline std::vector<CPoint> csv_sample_points(const ManifoldModel& m, int resolution,
                                             std::uint64_t max_rows = 4096) {
  QuadratureGrid grid(m.chart, resolution);
  std::uint64_t stride = std::max<std::uint64_t>(1, grid.size() / max_rows);
  std::vector<CPoint> pts;
  for (std::uint64_t i = 0; i < grid.size(); i += stride) pts.push_back(grid.point(i));
  return pts;
}

struct EmittedFiles {
  std::string report_json;
  std::string tensors_csv;
};

inline EmittedFiles emit_report(const Report& rep, const RunConfig& cfg,
                                const ManifoldModel& m) {
  EmittedFiles out;
  if (cfg.out_dir.empty()) return out;
  std::filesystem::path dir(cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + cfg.out_dir + "'");

  out.report_json = (dir / "report.json").string();
  {
    std::ofstream f(out.report_json);
    if (!f) throw ConfigError("cannot write '" + out.report_json + "'");
    f << rep.doc.dump(2) << "\n";
  }
  if (cfg.csv) {
    out.tensors_csv = (dir / "tensors.csv").string();
    std::ofstream f(out.tensors_csv);
    if (!f) throw ConfigError("cannot write '" + out.tensors_csv + "'");
    std::vector<CPoint> pts;
    if (!cfg.points.empty()) {
      for (const auto& row : cfg.points) {
        if (static_cast<int>(row.size()) != 2 * m.chart.n)
          throw ConfigError("each point needs 2n real coordinates");
        CPoint p(static_cast<std::size_t>(m.chart.n));
        for (int k = 0; k < m.chart.n; ++k)
          p[static_cast<std::size_t>(k)] = cplx(row[static_cast<std::size_t>(2 * k)],
                                                row[static_cast<std::size_t>(2 * k + 1)]);
        pts.push_back(std::move(p));
      }
    } else {
      pts = csv_sample_points(m, cfg.effective_scan_resolution());
    }
    f << tensor_csv(m, pts);
  }
  return out;
}

}  // namespace chern
