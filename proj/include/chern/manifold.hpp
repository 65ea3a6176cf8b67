#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "chern/expr.hpp"
#include "chern/linalg.hpp"

namespace chern {

struct BuildError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using CPoint = std::vector<cplx>;

/// Single coordinate chart over a fundamental-domain box.
/// Real coordinates are ordered x1,y1,x2,y2,... (Re/Im of z1..zn).
struct ChartSpec {
  int n = 0;
  std::vector<std::array<double, 2>> box;  // 2n intervals
  std::string periodicity_note;

  int real_dims() const { return 2 * n; }
  double length(int d) const { return box[d][1] - box[d][0]; }
  double lebesgue_volume() const {
    double v = 1.0;
    for (int d = 0; d < real_dims(); ++d) v *= length(d);
    return v;
  }
  void validate() const {
    if (n < 1) throw BuildError("chart dimension must be >= 1");
    if (static_cast<int>(box.size()) != 2 * n)
      throw BuildError("box must have 2n intervals");
    for (const auto& iv : box)
      if (!(iv[1] > iv[0])) throw BuildError("box has non-positive volume");
  }
};

enum class DerivMode { Symbolic, FiniteDifference };

/// First and second derivatives of the metric matrix at a point.
/// dG[c](a,b)      = d_c g_{a b̄}
/// ddG_holo[c][d]  = d_c d_d g_{a b̄}
/// ddG_mix[c][d]   = d_c d_d̄ g_{a b̄}
struct MetricJet {
  Mat G;
  std::vector<Mat> dG;
  std::vector<std::vector<Mat>> ddG_holo;
  std::vector<std::vector<Mat>> ddG_mix;
};

/// The Hermitian metric g_{αβ̄}(z): entries are expressions or opaque
/// numeric evaluators; derivatives come from Wirtinger differentiation of
/// the ASTs or from central finite differences.
class MetricField {
 public:
  MetricField() = default;

  static MetricField symbolic(int n, std::vector<std::vector<Expr>> entries,
                              const std::map<std::string, double>& params) {
    MetricField m;
    m.n_ = n;
    m.mode_ = DerivMode::Symbolic;
    m.entries_ = std::move(entries);
    m.compile(params);
    return m;
  }

  /// Opaque numeric entries; derivative mode is necessarily FD.
  static MetricField opaque(int n, std::vector<std::vector<ScalarFn>> entries,
                            FdOptions fd = {}) {
    MetricField m;
    m.n_ = n;
    m.mode_ = DerivMode::FiniteDifference;
    m.fns_ = std::move(entries);
    m.fd_ = fd;
    m.mask_ = (n >= 32) ? ~0u : ((1u << n) - 1u);
    return m;
  }

  int n() const { return n_; }
  DerivMode mode() const { return mode_; }
  void set_mode(DerivMode m) {
    if (m == DerivMode::Symbolic && entries_.empty())
      throw BuildError("opaque metric cannot use symbolic derivatives");
    mode_ = m;
  }
  void set_fd_options(FdOptions fd) { fd_ = fd; }
  const FdOptions& fd_options() const { return fd_; }

  /// Complex coordinates the entries actually reference (symbolic mode);
  /// all coordinates for opaque entries.
  std::uint32_t coord_mask() const { return mask_; }

  bool has_expressions() const { return !entries_.empty(); }
  const std::vector<std::vector<Expr>>& expressions() const { return entries_; }

  Mat value(const CPoint& p) const {
    Mat g(n_, n_);
    std::vector<cplx> stack;
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b) g(a, b) = entry(a, b, p, stack);
    return g;
  }

  MetricJet jet(const CPoint& p) const {
    return mode_ == DerivMode::Symbolic ? jet_symbolic(p) : jet_fd(p);
  }

 private:
  int n_ = 0;
  DerivMode mode_ = DerivMode::Symbolic;
  FdOptions fd_;
  std::uint32_t mask_ = 0;

  std::vector<std::vector<Expr>> entries_;
  std::vector<std::vector<ScalarFn>> fns_;

  // compiled tapes, row-major [a][b]
  std::vector<CompiledExpr> c_g_;
  std::vector<std::vector<CompiledExpr>> c_d_;                  // [c][ab]
  std::vector<std::vector<std::vector<CompiledExpr>>> c_dd_h_;  // [c][d][ab], c<=d
  std::vector<std::vector<std::vector<CompiledExpr>>> c_dd_m_;  // [c][d][ab]
  std::vector<std::string> param_names_;

  cplx entry(int a, int b, const CPoint& p, std::vector<cplx>& stack) const {
    if (!c_g_.empty()) {
      std::size_t i = static_cast<std::size_t>(a * n_ + b);
      return c_g_[i].eval(p, bound_g_[i], stack);
    }
    return fns_[a][b](p);
  }

  void compile(const std::map<std::string, double>& params) {
    // one shared parameter slot table across all tapes
    std::vector<std::string> names;
    for (auto& row : entries_)
      for (auto& e : row) e.collect_params(names);
    param_names_ = names;
    std::map<std::string, double> full = params;
    full.emplace("pi", std::numbers::pi);
    for (const auto& nm : names)
      if (!full.count(nm)) throw BuildError("metric parameter '" + nm + "' unbound");

    auto comp = [&](const Expr& e) {
      CompiledExpr c(e);
      mask_ |= c.coord_mask();
      return c;
    };
    // each tape keeps its own parameter slots; bind_all resolves them
    c_g_.reserve(static_cast<std::size_t>(n_ * n_));
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b) c_g_.push_back(comp(entries_[a][b]));

    c_d_.resize(static_cast<std::size_t>(n_));
    c_dd_h_.resize(static_cast<std::size_t>(n_));
    c_dd_m_.resize(static_cast<std::size_t>(n_));
    std::vector<std::vector<Expr>> dexpr(static_cast<std::size_t>(n_));
    for (int c = 0; c < n_; ++c) {
      dexpr[c].reserve(static_cast<std::size_t>(n_ * n_));
      c_d_[c].reserve(static_cast<std::size_t>(n_ * n_));
      for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b) {
          Expr de = entries_[a][b].diff(c, false);
          dexpr[c].push_back(de);
          c_d_[c].push_back(comp(de));
        }
    }
    for (int c = 0; c < n_; ++c) {
      c_dd_h_[c].resize(static_cast<std::size_t>(n_));
      c_dd_m_[c].resize(static_cast<std::size_t>(n_));
      for (int d = 0; d < n_; ++d) {
        c_dd_m_[c][d].reserve(static_cast<std::size_t>(n_ * n_));
        for (int ab = 0; ab < n_ * n_; ++ab)
          c_dd_m_[c][d].push_back(comp(dexpr[c][static_cast<std::size_t>(ab)].diff(d, true)));
        if (d >= c) {
          c_dd_h_[c][d].reserve(static_cast<std::size_t>(n_ * n_));
          for (int ab = 0; ab < n_ * n_; ++ab)
            c_dd_h_[c][d].push_back(comp(dexpr[c][static_cast<std::size_t>(ab)].diff(d, false)));
        }
      }
    }
    bind_all(full);
  }

  // per-tape bound parameter vectors, in tape emission order
  std::vector<std::vector<double>> bound_g_, bound_d_flat_, bound_ddh_flat_,
      bound_ddm_flat_;

  void bind_all(const std::map<std::string, double>& values) {
    // The tapes reference few parameters; just bind each one.
    auto bindv = [&](const CompiledExpr& c) { return c.bind(values); };
    bound_g_.clear();
    for (auto& c : c_g_) bound_g_.push_back(bindv(c));
    bound_d_flat_.clear();
    for (auto& row : c_d_)
      for (auto& c : row) bound_d_flat_.push_back(bindv(c));
    bound_ddm_flat_.clear();
    for (auto& r1 : c_dd_m_)
      for (auto& r2 : r1)
        for (auto& c : r2) bound_ddm_flat_.push_back(bindv(c));
    bound_ddh_flat_.clear();
    for (auto& r1 : c_dd_h_)
      for (auto& r2 : r1)
        for (auto& c : r2) bound_ddh_flat_.push_back(bindv(c));
  }

  MetricJet jet_symbolic(const CPoint& p) const {
    MetricJet j;
    std::vector<cplx> stack;
    j.G.resize(n_, n_);
    std::size_t gi = 0;
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b, ++gi)
        j.G(a, b) = c_g_[gi].eval(p, bound_g_[gi], stack);

    j.dG.assign(static_cast<std::size_t>(n_), Mat(n_, n_));
    std::size_t di = 0;
    for (int c = 0; c < n_; ++c)
      for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b, ++di)
          j.dG[c](a, b) = c_d_[c][static_cast<std::size_t>(a * n_ + b)].eval(
              p, bound_d_flat_[di], stack);

    j.ddG_mix.assign(static_cast<std::size_t>(n_),
                     std::vector<Mat>(static_cast<std::size_t>(n_), Mat(n_, n_)));
    std::size_t mi = 0;
    for (int c = 0; c < n_; ++c)
      for (int d = 0; d < n_; ++d)
        for (int a = 0; a < n_; ++a)
          for (int b = 0; b < n_; ++b, ++mi)
            j.ddG_mix[c][d](a, b) =
                c_dd_m_[c][d][static_cast<std::size_t>(a * n_ + b)].eval(
                    p, bound_ddm_flat_[mi], stack);

    j.ddG_holo.assign(static_cast<std::size_t>(n_),
                      std::vector<Mat>(static_cast<std::size_t>(n_), Mat(n_, n_)));
    std::size_t hi = 0;
    for (int c = 0; c < n_; ++c)
      for (int d = c; d < n_; ++d)
        for (int a = 0; a < n_; ++a)
          for (int b = 0; b < n_; ++b, ++hi) {
            cplx v = c_dd_h_[c][d][static_cast<std::size_t>(a * n_ + b)].eval(
                p, bound_ddh_flat_[hi], stack);
            j.ddG_holo[c][d](a, b) = v;
            j.ddG_holo[d][c](a, b) = v;  // partials commute
          }
    return j;
  }

  MetricJet jet_fd(const CPoint& p) const {
    MetricJet j;
    j.G.resize(n_, n_);
    std::vector<cplx> stack;
    std::vector<ScalarFn> fn(static_cast<std::size_t>(n_ * n_));
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b) {
        if (!fns_.empty()) {
          fn[static_cast<std::size_t>(a * n_ + b)] = fns_[a][b];
        } else {
          const CompiledExpr& c = c_g_[static_cast<std::size_t>(a * n_ + b)];
          const std::vector<double>& bound = bound_g_[static_cast<std::size_t>(a * n_ + b)];
          fn[static_cast<std::size_t>(a * n_ + b)] = [&c, &bound](std::span<const cplx> q) {
            return c.eval(q, bound);
          };
        }
        j.G(a, b) = fn[static_cast<std::size_t>(a * n_ + b)](p);
      }

    j.dG.assign(static_cast<std::size_t>(n_), Mat(n_, n_));
    j.ddG_mix.assign(static_cast<std::size_t>(n_),
                     std::vector<Mat>(static_cast<std::size_t>(n_), Mat(n_, n_)));
    j.ddG_holo.assign(static_cast<std::size_t>(n_),
                      std::vector<Mat>(static_cast<std::size_t>(n_), Mat(n_, n_)));
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b) {
        const ScalarFn& f = fn[static_cast<std::size_t>(a * n_ + b)];
        for (int c = 0; c < n_; ++c)
          j.dG[c](a, b) = fd_wirtinger(f, p, c, false, fd_);
        for (int c = 0; c < n_; ++c)
          for (int d = 0; d < n_; ++d) {
            j.ddG_mix[c][d](a, b) = fd_wirtinger2(f, p, c, false, d, true, fd_);
            if (d >= c) {
              cplx v = fd_wirtinger2(f, p, c, false, d, false, fd_);
              j.ddG_holo[c][d](a, b) = v;
              j.ddG_holo[d][c](a, b) = v;
            }
          }
      }
    return j;
  }
};

// ---------------------------------------------------------------------------

/// Uniform tensor-product midpoint grid over the chart box. Points are
/// addressed by index (dimension 0 fastest); weights carry the Riemannian
/// volume density det g.
class QuadratureGrid {
 public:
  QuadratureGrid() = default;
  QuadratureGrid(const ChartSpec& chart, int resolution,
                 std::uint64_t point_cap = (1ull << 27))
      : chart_(chart), res_(resolution) {
    if (resolution < 2) throw BuildError("resolution must be >= 2");
    total_ = 1;
    for (int d = 0; d < chart.real_dims(); ++d) {
      total_ *= static_cast<std::uint64_t>(resolution);
      if (total_ > point_cap)
        throw BuildError("grid exceeds point cap (" + std::to_string(point_cap) +
                         " points); lower the resolution or raise the cap");
    }
    cell_ = chart.lebesgue_volume() /
            std::pow(static_cast<double>(resolution), chart.real_dims());
  }

  std::uint64_t size() const { return total_; }
  int resolution() const { return res_; }
  double cell_volume() const { return cell_; }
  const ChartSpec& chart() const { return chart_; }

  CPoint point(std::uint64_t idx) const {
    CPoint p(static_cast<std::size_t>(chart_.n));
    std::uint64_t rest = idx;
    for (int k = 0; k < chart_.n; ++k) {
      double xs[2];
      for (int h = 0; h < 2; ++h) {
        int d = 2 * k + h;
        auto digit = rest % static_cast<std::uint64_t>(res_);
        rest /= static_cast<std::uint64_t>(res_);
        xs[h] = chart_.box[d][0] +
                (static_cast<double>(digit) + 0.5) * chart_.length(d) / res_;
      }
      p[static_cast<std::size_t>(k)] = cplx(xs[0], xs[1]);
    }
    return p;
  }

  /// Key of the point within the sub-grid spanned by the complex
  /// coordinates in `mask` (for memoizing mask-limited evaluations).
  std::uint64_t masked_key(std::uint64_t idx, std::uint32_t mask) const {
    std::uint64_t key = 0, scale = 1, rest = idx;
    for (int k = 0; k < chart_.n; ++k) {
      std::uint64_t d0 = rest % static_cast<std::uint64_t>(res_);
      rest /= static_cast<std::uint64_t>(res_);
      std::uint64_t d1 = rest % static_cast<std::uint64_t>(res_);
      rest /= static_cast<std::uint64_t>(res_);
      if (mask & (1u << k)) {
        key += (d0 + d1 * static_cast<std::uint64_t>(res_)) * scale;
        scale *= static_cast<std::uint64_t>(res_) * static_cast<std::uint64_t>(res_);
      }
    }
    return key;
  }

  std::uint64_t masked_size(std::uint32_t mask) const {
    std::uint64_t s = 1;
    for (int k = 0; k < chart_.n; ++k)
      if (mask & (1u << k))
        s *= static_cast<std::uint64_t>(res_) * static_cast<std::uint64_t>(res_);
    return s;
  }

 private:
  ChartSpec chart_;
  int res_ = 0;
  std::uint64_t total_ = 0;
  double cell_ = 0.0;
};

// ---------------------------------------------------------------------------

struct ManifoldModel {
  std::string name;
  ChartSpec chart;
  MetricField metric;
  bool invariant_metric = false;

  QuadratureGrid grid(int resolution, std::uint64_t cap = (1ull << 27)) const {
    return QuadratureGrid(chart, resolution, cap);
  }
};

namespace builtins {

inline std::vector<std::array<double, 2>> unit_box(int dims) {
  return std::vector<std::array<double, 2>>(static_cast<std::size_t>(dims),
                                            {0.0, 1.0});
}

inline ManifoldModel flat_torus(int n) {
  if (n < 1) throw BuildError("flat_torus needs n >= 1");
  std::vector<std::vector<Expr>> g(static_cast<std::size_t>(n),
                                   std::vector<Expr>(static_cast<std::size_t>(n)));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      g[a][b] = Expr::constant(a == b ? 1.0 : 0.0);
  ManifoldModel m;
  m.name = "flat_torus";
  m.chart = {n, unit_box(2 * n), "opposite faces identified"};
  m.metric = MetricField::symbolic(n, std::move(g), {});
  m.invariant_metric = true;
  return m;
}

/// Compact quotient of the complex Heisenberg group with its invariant
/// metric: g11=1, g22=1+|z1|^2, g33=1, g23=-z1, g32=-conj(z1).
inline ManifoldModel iwasawa() {
  const int n = 3;
  auto z1 = Expr::coord(0);
  std::vector<std::vector<Expr>> g(3, std::vector<Expr>(3, Expr::constant(0.0)));
  g[0][0] = Expr::constant(1.0);
  g[1][1] = Expr::constant(1.0) + Expr::abs2(z1);
  g[2][2] = Expr::constant(1.0);
  g[1][2] = -z1;
  g[2][1] = -Expr::conj(z1);
  ManifoldModel m;
  m.name = "iwasawa";
  m.chart = {n, unit_box(6),
             "Heisenberg lattice: z3 identification is twisted by z2"};
  m.metric = MetricField::symbolic(n, std::move(g), {});
  m.invariant_metric = true;
  return m;
}

/// Conformally flat torus, g = e^{2u} I with u = eps*cos(2*pi*Re z1).
/// Non-balanced for eps != 0; the non-Kaehler control example.
inline ManifoldModel conformal_torus(double eps) {
  const int n = 2;
  auto z1 = Expr::coord(0);
  Expr re_z1 = (z1 + Expr::conj(z1)) * Expr::constant(0.5);
  Expr u = Expr::param("eps") * Expr::cos(Expr::constant(2.0 * std::numbers::pi) * re_z1);
  Expr conf = Expr::exp(Expr::constant(2.0) * u);
  std::vector<std::vector<Expr>> g(2, std::vector<Expr>(2, Expr::constant(0.0)));
  g[0][0] = conf;
  g[1][1] = conf;
  ManifoldModel m;
  m.name = "conformal_torus";
  m.chart = {n, unit_box(4), "opposite faces identified"};
  m.metric = MetricField::symbolic(n, std::move(g), {{"eps", eps}});
  m.invariant_metric = false;
  return m;
}

}  // namespace builtins

/// Probe points used for build-time validation (deterministic, interior).
inline std::vector<CPoint> probe_points(const ChartSpec& chart, int count = 7) {
  std::vector<CPoint> out;
  // golden-ratio lattice: deterministic, irrational spacing
  const double phi = 0.6180339887498949;
  double t = 0.345678;
  for (int i = 0; i < count; ++i) {
    CPoint p(static_cast<std::size_t>(chart.n));
    for (int k = 0; k < chart.n; ++k) {
      double fx = std::fmod(t + phi * (2 * k + 1), 1.0);
      double fy = std::fmod(t * 1.7 + phi * (2 * k + 2), 1.0);
      int dx = 2 * k, dy = 2 * k + 1;
      p[static_cast<std::size_t>(k)] =
          cplx(chart.box[dx][0] + fx * chart.length(dx),
               chart.box[dy][0] + fy * chart.length(dy));
    }
    out.push_back(std::move(p));
    t = std::fmod(t + phi, 1.0);
  }
  return out;
}

/// Validate Hermitian symmetry and positive definiteness at probe points.
inline void validate_metric(const ManifoldModel& m, double herm_tol = 1e-12) {
  for (const auto& p : probe_points(m.chart)) {
    Mat g = m.metric.value(p);
    double h = hermiticity_residual(g);
    if (h > herm_tol)
      throw BuildError("metric is not Hermitian (residual " + std::to_string(h) +
                       " at a probe point)");
    try {
      invert_hermitian(g);
    } catch (const NumericError& e) {
      throw BuildError(std::string("metric rejected at a probe point: ") + e.what());
    }
  }
}

struct ManifoldConfig {
  std::string builtin;                       // flat_torus | iwasawa | conformal_torus
  std::map<std::string, double> params;      // n, eps, ...
  // custom:
  int n = 0;
  std::vector<std::vector<std::string>> entries;
  std::vector<std::array<double, 2>> box;
  std::map<std::string, double> custom_params;
};

inline ManifoldModel build_manifold(const ManifoldConfig& cfg) {
  ManifoldModel m;
  if (!cfg.builtin.empty()) {
    if (cfg.builtin == "flat_torus") {
      int n = 2;
      if (auto it = cfg.params.find("n"); it != cfg.params.end())
        n = static_cast<int>(it->second);
      m = builtins::flat_torus(n);
    } else if (cfg.builtin == "iwasawa") {
      m = builtins::iwasawa();
    } else if (cfg.builtin == "conformal_torus") {
      double eps = 0.1;
      if (auto it = cfg.params.find("eps"); it != cfg.params.end()) eps = it->second;
      m = builtins::conformal_torus(eps);
    } else {
      throw BuildError("unknown builtin manifold '" + cfg.builtin + "'");
    }
  } else {
    if (cfg.n < 1) throw BuildError("custom manifold needs n >= 1");
    if (static_cast<int>(cfg.entries.size()) != cfg.n)
      throw BuildError("custom metric must have n rows");
    std::vector<std::vector<Expr>> g;
    for (const auto& row : cfg.entries) {
      if (static_cast<int>(row.size()) != cfg.n)
        throw BuildError("custom metric must have n columns per row");
      std::vector<Expr> r;
      for (const auto& s : row) r.push_back(parse_expr(s, cfg.n));
      g.push_back(std::move(r));
    }
    m.name = "custom";
    m.chart.n = cfg.n;
    m.chart.box = cfg.box.empty() ? builtins::unit_box(2 * cfg.n) : cfg.box;
    m.chart.periodicity_note = "user-asserted quotient";
    m.chart.validate();
    m.metric = MetricField::symbolic(cfg.n, std::move(g), cfg.custom_params);
    m.invariant_metric = false;
  }
  m.chart.validate();
  validate_metric(m);
  return m;
}

/// Inverse, determinant and condition report for the metric at p.
struct MetricAt {
  Mat G;
  Mat Ginv;
  double det;
  double condition;
};

inline MetricAt metric_at(const ManifoldModel& m, const CPoint& p) {
  Mat g = m.metric.value(p);
  MetricInverse mi = invert_hermitian(g);
  return {std::move(g), std::move(mi.inv), mi.det, mi.condition};
}

// ---------------------------------------------------------------------------
// Integration with a fixed, documented summation order: points are summed
// within fixed-size chunks in index order, and chunk sums are combined in
// chunk order. The result is bitwise independent of the thread count.
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kChunkSize = 8192;

struct NonFiniteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Integrate f over M using grid weights cell * det g. Throws on a
/// non-finite sample, reporting the point.
inline double integrate(const ManifoldModel& m,
                        const std::function<double(const CPoint&)>& f,
                        const QuadratureGrid& grid, int threads = 0) {
  const std::uint64_t total = grid.size();
  const std::uint64_t nchunks = (total + kChunkSize - 1) / kChunkSize;
  std::vector<double> chunk_sums(static_cast<std::size_t>(nchunks), 0.0);
  std::vector<std::string> errors(static_cast<std::size_t>(nchunks));

  auto run_chunk = [&](std::uint64_t ci) {
    std::uint64_t lo = ci * kChunkSize, hi = std::min(total, lo + kChunkSize);
    double acc = 0.0;
    for (std::uint64_t i = lo; i < hi; ++i) {
      CPoint p = grid.point(i);
      double w = grid.cell_volume() * m.metric.value(p).determinant().real();
      double v = f(p);
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "non-finite field value at point (";
        for (std::size_t k = 0; k < p.size(); ++k)
          os << (k ? ", " : "") << p[k].real() << (p[k].imag() < 0 ? "-" : "+")
             << std::abs(p[k].imag()) << "i";
        os << ")";
        errors[static_cast<std::size_t>(ci)] = os.str();
        return;
      }
      acc += w * v;
    }
    chunk_sums[static_cast<std::size_t>(ci)] = acc;
  };

  int nt = threads > 0 ? threads
                       : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (nt <= 1 || nchunks <= 1) {
    for (std::uint64_t c = 0; c < nchunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::uint64_t> next{0};
    for (int t = 0; t < nt; ++t)
      pool.emplace_back([&] {
        for (;;) {
          std::uint64_t c = next.fetch_add(1);
          if (c >= nchunks) return;
          run_chunk(c);
        }
      });
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (!e.empty()) throw NonFiniteError(e);
  double sum = 0.0;
  for (double s : chunk_sums) sum += s;  // fixed combine order
  return sum;
}

}  // namespace chern
