// Command-line front end: builds a manifold, computes Chern-connection
// tensors, classifies fields and verifies the curvature/torsion identities.
//
// Subcommands: tensors | balanced | classify | verify | scan.
// Exit codes: 0 ok, 1 at least one FAIL verdict, 2 configuration error.

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"

#include "chern/chern.hpp"

namespace {

using namespace chern;

struct CommonOpts {
  std::string manifold;
  std::string config_path;
  int resolution = 0;
  std::string mode;
  std::vector<std::string> tols;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool have_seed = false;
  int threads = -1;
  bool no_timestamp = false;
  bool csv = false;
  std::vector<std::string> fields;
  std::string points;
  double eps = 0.1;
  int flat_n = 2;
};

void add_common(CLI::App* app, CommonOpts& o) {
  app->add_option("--manifold", o.manifold,
                  "builtin manifold: flat_torus | iwasawa | conformal_torus");
  app->add_option("--config", o.config_path, "JSON config file");
  app->add_option("--resolution", o.resolution, "grid points per real dimension");
  app->add_option("--mode", o.mode, "derivative mode: symbolic | fd");
  app->add_option("--tol", o.tols, "tolerance override name=value (repeatable)");
  app->add_option("--out", o.out_dir, "output directory for report.json / tensors.csv");
  auto* s = app->add_option("--seed", o.seed, "random seed for generated fields");
  s->each([&o](const std::string&) { o.have_seed = true; });
  app->add_option("--threads", o.threads, "worker threads (0 = hardware)");
  app->add_flag("--no-timestamp", o.no_timestamp, "omit the timestamp field");
  app->add_flag("--csv", o.csv, "also write tensors.csv");
  app->add_option("--field", o.fields,
                  "field to analyse: builtin name (phi1..phi3, E1..E3, dx1, dz1, ddz1, ...) "
                  "or random:form / random:vector (repeatable)");
  app->add_option("--points", o.points,
                  "comma-separated point 2n reals (tensors subcommand)");
  app->add_option("--eps", o.eps, "conformal_torus amplitude (default 0.1)");
  app->add_option("--n", o.flat_n, "flat_torus complex dimension (default 2)");
}

RunConfig build_config(const CommonOpts& o) {
  RunConfig cfg;
  if (!o.config_path.empty()) cfg = load_config(o.config_path);
  if (!o.manifold.empty()) {
    cfg.manifold = ManifoldConfig{};
    cfg.manifold.builtin = o.manifold;
    if (o.manifold == "conformal_torus") cfg.manifold.params["eps"] = o.eps;
    if (o.manifold == "flat_torus") cfg.manifold.params["n"] = o.flat_n;
  }
  if (cfg.manifold.builtin.empty() && cfg.manifold.entries.empty())
    throw ConfigError("no manifold given: use --manifold or --config");
  if (o.resolution > 0) cfg.resolution = o.resolution;
  if (!o.mode.empty()) cfg.derivative_mode = o.mode;
  if (o.have_seed) cfg.seed = o.seed;
  if (o.threads >= 0) cfg.threads = o.threads;
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (o.no_timestamp) cfg.timestamp = false;
  if (o.csv) cfg.csv = true;
  for (const auto& t : o.tols) {
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("--tol expects name=value, got '" + t + "'");
    std::string name = t.substr(0, eq);
    double v = std::stod(t.substr(eq + 1));
    if (name == "pointwise") cfg.tol.pointwise_rel = v;
    else if (name == "pointwise_fd") cfg.tol.pointwise_rel_fd = v;
    else if (name == "integral") cfg.tol.integral_abs = v;
    else if (name == "balanced") cfg.tol.balanced = v;
    else if (name == "zero") cfg.tol.zero = v;
    else if (name == "gate_analytic") cfg.tol.gate_analytic = v;
    else if (name == "gate_harmonic") cfg.tol.gate_harmonic = v;
    else if (name == "gate_killing") cfg.tol.gate_killing13 = v;
    else throw ConfigError("unknown tolerance '" + name + "'");
  }
  for (const auto& fspec : o.fields) {
    FieldSpec f;
    if (fspec == "random:form") { f.kind = FieldKind::OneForm; f.random = true; }
    else if (fspec == "random:vector") { f.kind = FieldKind::VectorField; f.random = true; }
    else {
      f.builtin = fspec;
      f.kind = (fspec.rfind("E", 0) == 0 || fspec.rfind("ddz", 0) == 0)
                   ? FieldKind::VectorField
                   : FieldKind::OneForm;
    }
    cfg.fields.push_back(f);
  }
  return cfg;
}

CPoint parse_point(const std::string& s, int n) {
  std::vector<double> xs;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) xs.push_back(std::stod(tok));
  if (static_cast<int>(xs.size()) != 2 * n)
    throw ConfigError("--points needs 2n = " + std::to_string(2 * n) + " reals");
  CPoint p(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    p[static_cast<std::size_t>(k)] = cplx(xs[static_cast<std::size_t>(2 * k)],
                                          xs[static_cast<std::size_t>(2 * k + 1)]);
  return p;
}

void print_matrix(const std::string& name, const Mat& m) {
  std::cout << name << " =\n";
  for (int a = 0; a < m.rows(); ++a) {
    std::cout << "  ";
    for (int b = 0; b < m.cols(); ++b) {
      cplx v = m(a, b);
      std::printf("(%+.6e%+.6ei) ", v.real(), v.imag());
    }
    std::cout << "\n";
  }
}

int cmd_tensors(const CommonOpts& o) {
  RunConfig cfg = build_config(o);
  ManifoldModel m = build_manifold(cfg.manifold);
  m.metric.set_fd_options(cfg.fd);
  if (cfg.mode() == DerivMode::FiniteDifference)
    m.metric.set_mode(DerivMode::FiniteDifference);

  std::vector<CPoint> pts;
  if (!o.points.empty()) pts.push_back(parse_point(o.points, m.chart.n));
  else if (!cfg.points.empty()) {
    for (const auto& row : cfg.points) {
      CPoint p(static_cast<std::size_t>(m.chart.n));
      for (int k = 0; k < m.chart.n; ++k)
        p[static_cast<std::size_t>(k)] =
            cplx(row[static_cast<std::size_t>(2 * k)], row[static_cast<std::size_t>(2 * k + 1)]);
      pts.push_back(std::move(p));
    }
  } else {
    pts = probe_points(m.chart, 3);
  }
  for (const auto& p : pts) {
    std::cout << "point:";
    for (auto z : p) std::printf(" (%.4f%+.4fi)", z.real(), z.imag());
    std::cout << "\n";
    PointGeometry g = compute_geometry(m, p, true);
    std::printf("det g = %.12g, |theta|_max = %.3e, ||T||^2 = %.12g\n", g.det,
                g.theta.cwiseAbs().maxCoeff(), g.torsion_norm2());
    print_matrix("g", g.G);
    print_matrix("k", g.k);
    print_matrix("kstar", g.kstar);
    print_matrix("s", g.s);
    print_matrix("t", g.t);
    print_matrix("H", g.H);
    auto ev = [&](const char* nm, const Mat& q) {
      RVec e = g.invariant_eigenvalues(q);
      std::cout << nm << " eigenvalues:";
      for (int i = 0; i < e.size(); ++i) std::printf(" %.6e", e(i));
      std::cout << "\n";
    };
    ev("k", g.k); ev("kstar", g.kstar); ev("s", g.s); ev("t", g.t); ev("H", g.H);
    std::cout << "\n";
  }
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream f(std::filesystem::path(cfg.out_dir) / "tensors.csv");
    f << tensor_csv(m, pts);
    std::cout << "wrote " << (std::filesystem::path(cfg.out_dir) / "tensors.csv").string()
              << "\n";
  }
  return 0;
}

int run_and_report(const CommonOpts& o, const std::vector<std::string>& only_cases,
                   bool print_fields) {
  RunConfig cfg = build_config(o);
  if (!only_cases.empty()) cfg.cases = only_cases;
  Report rep = run_pipeline(cfg);
  ManifoldModel m = build_manifold(cfg.manifold);
  emit_report(rep, cfg, m);

  const auto& doc = rep.doc;
  std::cout << "manifold: " << doc["manifold"]["name"].get<std::string>()
            << " (n=" << doc["manifold"]["n"].get<int>()
            << ", resolution " << doc["manifold"]["resolution"].get<int>() << ")\n";
  const auto& bal = doc["balanced"];
  std::cout << "balanced: " << (bal["balanced"].get<bool>() ? "yes" : "NO")
            << "  max|theta| = " << bal["max_theta_component"].get<double>()
            << "  laplacian dev = " << bal["max_laplacian_deviation"].get<double>()
            << "\n";
  if (print_fields) {
    for (const auto& f : doc["fields"]["forms"])
      std::cout << "  form   " << f["name"].get<std::string>()
                << ": analytic=" << f["analytic_residual"].get<double>()
                << " closed(2,0)=" << f["closed20_residual"].get<double>()
                << " closed(1,1)=" << f["closed11_residual"].get<double>()
                << " delta=" << f["delta"].get<double>()
                << " intH=" << f["int_H"].get<double>()
                << (f["harmonic"].get<bool>() ? " [harmonic]" : "")
                << (f["analytic"].get<bool>() ? " [analytic]" : "") << "\n";
    for (const auto& v : doc["fields"]["vectors"])
      std::cout << "  vector " << v["name"].get<std::string>()
                << ": analytic=" << v["analytic_residual"].get<double>()
                << " killing=" << v["killing_residual"].get<double>()
                << " killing(2,0)=" << v["killing_block_residual"].get<double>()
                << " lie=" << std::max(v["lie_connection_mixed"].get<double>(),
                                       v["lie_connection_conj"].get<double>())
                << " affine=" << v["affine_residual"].get<double>()
                << (v["killing"].get<bool>() ? " [killing]" : "")
                << (v["analytic"].get<bool>() ? " [analytic]" : "") << "\n";
  }
  std::printf("%-12s %-26s %-18s %-12s %s\n", "case", "field", "verdict", "residual",
              "tolerance");
  for (const auto& c : doc["cases"]) {
    std::printf("%-12s %-26s %-18s %-12.3e %.1e\n",
                c["id"].get<std::string>().c_str(),
                c["field"].get<std::string>().c_str(),
                c["verdict"].get<std::string>().c_str(),
                c["residual"].get<double>(), c["tolerance"].get<double>());
  }
  const auto& s = doc["summary"];
  std::cout << "summary: " << s["pass"].get<int>() << " pass, "
            << s["fail"].get<int>() << " fail, " << s["inapplicable"].get<int>()
            << " inapplicable, " << s["hypothesis_not_met"].get<int>()
            << " hypothesis-not-met\n";
  return rep.exit_code;
}

int cmd_scan(const CommonOpts& o, std::vector<std::string> tensors) {
  RunConfig cfg = build_config(o);
  ManifoldModel m = build_manifold(cfg.manifold);
  m.metric.set_fd_options(cfg.fd);
  if (cfg.mode() == DerivMode::FiniteDifference)
    m.metric.set_mode(DerivMode::FiniteDifference);
  if (tensors.empty() || (tensors.size() == 1 && tensors[0] == "all"))
    tensors = {"H", "k", "kappa", "kstar", "s", "t", "k_minus_half_t"};
  json out = json::array();
  for (const auto& t : tensors) {
    DefinitenessVerdict v = definiteness_scan(
        m, t, cfg.resolution, cfg.tol.zero, cfg.point_cap);
    std::printf("%-16s %-11s eig range [%+.6e, %+.6e] over %llu points\n",
                v.tensor.c_str(), to_string(v.classification), v.eig_min, v.eig_max,
                static_cast<unsigned long long>(v.points));
    out.push_back({{"tensor", v.tensor},
                   {"classification", to_string(v.classification)},
                   {"eig_min", v.eig_min},
                   {"eig_max", v.eig_max},
                   {"max_point_min_eig", v.max_point_min_eig},
                   {"points", v.points},
                   {"disclaimer", v.disclaimer}});
  }
  std::cout << "note: classifications are grid-sampled, not a proof over all of M\n";
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream f(std::filesystem::path(cfg.out_dir) / "scan.json");
    f << out.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chern-connection geometry of Hermitian manifolds: tensors, balanced "
               "checks, field classification and identity verification"};
  app.require_subcommand(1);

  CommonOpts o_tensors, o_balanced, o_classify, o_verify, o_scan;
  std::vector<std::string> verify_cases, scan_tensors;
  bool verify_all = false;

  auto* c_tensors = app.add_subcommand("tensors", "pointwise tensor dump");
  add_common(c_tensors, o_tensors);
  auto* c_balanced = app.add_subcommand("balanced", "balanced-manifold report");
  add_common(c_balanced, o_balanced);
  auto* c_classify = app.add_subcommand("classify", "field residuals and verdicts");
  add_common(c_classify, o_classify);
  auto* c_verify = app.add_subcommand("verify", "identity verification suite");
  add_common(c_verify, o_verify);
  c_verify->add_option("--case", verify_cases, "case id (repeatable) or 'all'");
  c_verify->add_flag("--all", verify_all, "run every applicable case");
  auto* c_scan = app.add_subcommand("scan", "definiteness scan of curvature tensors");
  add_common(c_scan, o_scan);
  c_scan->add_option("--tensor", scan_tensors,
                     "tensor id: H k kappa kstar s t k_minus_half_t | all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (c_tensors->parsed()) return cmd_tensors(o_tensors);
    if (c_balanced->parsed()) {
      // balanced report only: restrict to the LAP_IV case for speed
      return run_and_report(o_balanced, {"LAP_IV"}, false);
    }
    if (c_classify->parsed()) return run_and_report(o_classify, {"TH33"}, true);
    if (c_verify->parsed()) {
      if (verify_all) verify_cases.clear();
      return run_and_report(o_verify, verify_cases, true);
    }
    if (c_scan->parsed()) return cmd_scan(o_scan, scan_tensors);
  } catch (const chern::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const chern::BuildError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const chern::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
