#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "chern/expr.hpp"
#include "chern/geometry.hpp"
#include "chern/manifold.hpp"

namespace chern {

enum class FieldKind { OneForm, VectorField };

/// The n (1,0)-components of a real field (ω_α for 1-forms, ξ^α for
/// vector fields) with first and second Wirtinger derivatives, symbolic
/// or finite-difference.
class FieldComponents {
 public:
  FieldComponents() = default;

  static FieldComponents symbolic(int n, std::vector<Expr> comps,
                                  const std::map<std::string, double>& params = {}) {
    FieldComponents f;
    f.n_ = n;
    f.exprs_ = std::move(comps);
    f.mode_ = DerivMode::Symbolic;
    f.compile(params);
    return f;
  }

  static FieldComponents opaque(int n, std::vector<ScalarFn> comps, FdOptions fd = {}) {
    FieldComponents f;
    f.n_ = n;
    f.fns_ = std::move(comps);
    f.mode_ = DerivMode::FiniteDifference;
    f.fd_ = fd;
    f.mask_ = (n >= 32) ? ~0u : ((1u << n) - 1u);
    return f;
  }

  int n() const { return n_; }
  DerivMode mode() const { return mode_; }
  void set_mode(DerivMode m) {
    if (m == DerivMode::Symbolic && exprs_.empty())
      throw BuildError("opaque field cannot use symbolic derivatives");
    mode_ = m;
  }
  void set_fd_options(FdOptions fd) { fd_ = fd; }
  std::uint32_t coord_mask() const { return mask_; }
  const std::vector<Expr>& expressions() const { return exprs_; }

  FieldJet jet(const CPoint& p, bool second_order = true) const {
    return mode_ == DerivMode::Symbolic ? jet_symbolic(p, second_order)
                                        : jet_fd(p, second_order);
  }

 private:
  int n_ = 0;
  DerivMode mode_ = DerivMode::Symbolic;
  FdOptions fd_;
  std::uint32_t mask_ = 0;
  std::vector<Expr> exprs_;
  std::vector<ScalarFn> fns_;

  std::vector<CompiledExpr> c_;                        // [a]
  std::vector<std::vector<CompiledExpr>> c_d_, c_db_;  // [a][c]
  // [a][c*n+e], holo/anti for c<=e only
  std::vector<std::vector<CompiledExpr>> c_ddh_, c_ddm_, c_dda_;
  std::vector<std::vector<double>> b_, b_d_, b_db_, b_ddh_, b_ddm_, b_dda_;

  void compile(const std::map<std::string, double>& params) {
    std::map<std::string, double> full = params;
    full.emplace("pi", std::numbers::pi);
    auto comp = [&](const Expr& e, std::vector<CompiledExpr>& tapes,
                    std::vector<std::vector<double>>& bound) {
      CompiledExpr c(e);
      mask_ |= c.coord_mask();
      bound.push_back(c.bind(full));
      tapes.push_back(std::move(c));
    };
    for (int a = 0; a < n_; ++a) comp(exprs_[static_cast<std::size_t>(a)], c_, b_);
    c_d_.resize(static_cast<std::size_t>(n_));
    c_db_.resize(static_cast<std::size_t>(n_));
    c_ddh_.resize(static_cast<std::size_t>(n_));
    c_ddm_.resize(static_cast<std::size_t>(n_));
    c_dda_.resize(static_cast<std::size_t>(n_));
    std::vector<std::vector<double>> dummy;
    for (int a = 0; a < n_; ++a) {
      std::vector<Expr> d1(static_cast<std::size_t>(n_)), db1(static_cast<std::size_t>(n_));
      for (int c = 0; c < n_; ++c) {
        d1[static_cast<std::size_t>(c)] = exprs_[static_cast<std::size_t>(a)].diff(c, false);
        db1[static_cast<std::size_t>(c)] = exprs_[static_cast<std::size_t>(a)].diff(c, true);
        comp(d1[static_cast<std::size_t>(c)], c_d_[static_cast<std::size_t>(a)], b_d_);
        comp(db1[static_cast<std::size_t>(c)], c_db_[static_cast<std::size_t>(a)], b_db_);
      }
      for (int c = 0; c < n_; ++c)
        for (int e = 0; e < n_; ++e) {
          comp(d1[static_cast<std::size_t>(c)].diff(e, true),
               c_ddm_[static_cast<std::size_t>(a)], b_ddm_);
          if (e >= c) {
            comp(d1[static_cast<std::size_t>(c)].diff(e, false),
                 c_ddh_[static_cast<std::size_t>(a)], b_ddh_);
            comp(db1[static_cast<std::size_t>(c)].diff(e, true),
                 c_dda_[static_cast<std::size_t>(a)], b_dda_);
          }
        }
    }
  }

  FieldJet jet_symbolic(const CPoint& p, bool second_order) const {
    FieldJet j;
    const int n = n_;
    std::vector<cplx> stack;
    j.comp.resize(n);
    j.d.resize(n, n);
    j.dbar.resize(n, n);
    std::size_t bd = 0, bdb = 0, bdm = 0, bdh = 0, bda = 0;
    for (int a = 0; a < n; ++a)
      j.comp(a) = c_[static_cast<std::size_t>(a)].eval(p, b_[static_cast<std::size_t>(a)], stack);
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c) {
        j.d(c, a) = c_d_[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)].eval(
            p, b_d_[bd++], stack);
        j.dbar(c, a) = c_db_[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)].eval(
            p, b_db_[bdb++], stack);
      }
    if (!second_order) return j;
    j.second_order = true;
    j.dd_holo.assign(static_cast<std::size_t>(n), Mat(n, n));
    j.dd_mix.assign(static_cast<std::size_t>(n), Mat(n, n));
    j.dd_anti.assign(static_cast<std::size_t>(n), Mat(n, n));
    for (int a = 0; a < n; ++a) {
      std::size_t im = 0, ih = 0;
      for (int c = 0; c < n; ++c)
        for (int e = 0; e < n; ++e) {
          j.dd_mix[static_cast<std::size_t>(a)](c, e) =
              c_ddm_[static_cast<std::size_t>(a)][im++].eval(p, b_ddm_[bdm++], stack);
          if (e >= c) {
            cplx vh = c_ddh_[static_cast<std::size_t>(a)][ih].eval(p, b_ddh_[bdh++], stack);
            cplx va = c_dda_[static_cast<std::size_t>(a)][ih].eval(p, b_dda_[bda++], stack);
            ++ih;
            j.dd_holo[static_cast<std::size_t>(a)](c, e) = vh;
            j.dd_holo[static_cast<std::size_t>(a)](e, c) = vh;
            j.dd_anti[static_cast<std::size_t>(a)](c, e) = va;
            j.dd_anti[static_cast<std::size_t>(a)](e, c) = va;
          }
        }
    }
    return j;
  }

  FieldJet jet_fd(const CPoint& p, bool second_order) const {
    FieldJet j;
    const int n = n_;
    std::vector<ScalarFn> fn(static_cast<std::size_t>(n));
    std::vector<cplx> stack;
    for (int a = 0; a < n; ++a) {
      if (!fns_.empty()) {
        fn[static_cast<std::size_t>(a)] = fns_[static_cast<std::size_t>(a)];
      } else {
        const CompiledExpr& c = c_[static_cast<std::size_t>(a)];
        const std::vector<double>& bound = b_[static_cast<std::size_t>(a)];
        fn[static_cast<std::size_t>(a)] = [&c, &bound](std::span<const cplx> q) {
          return c.eval(q, bound);
        };
      }
    }
    j.comp.resize(n);
    j.d.resize(n, n);
    j.dbar.resize(n, n);
    for (int a = 0; a < n; ++a) {
      j.comp(a) = fn[static_cast<std::size_t>(a)](p);
      for (int c = 0; c < n; ++c) {
        j.d(c, a) = fd_wirtinger(fn[static_cast<std::size_t>(a)], p, c, false, fd_);
        j.dbar(c, a) = fd_wirtinger(fn[static_cast<std::size_t>(a)], p, c, true, fd_);
      }
    }
    if (!second_order) return j;
    j.second_order = true;
    j.dd_holo.assign(static_cast<std::size_t>(n), Mat(n, n));
    j.dd_mix.assign(static_cast<std::size_t>(n), Mat(n, n));
    j.dd_anti.assign(static_cast<std::size_t>(n), Mat(n, n));
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c)
        for (int e = 0; e < n; ++e) {
          j.dd_mix[static_cast<std::size_t>(a)](c, e) =
              fd_wirtinger2(fn[static_cast<std::size_t>(a)], p, c, false, e, true, fd_);
          if (e >= c) {
            cplx vh = fd_wirtinger2(fn[static_cast<std::size_t>(a)], p, c, false, e, false, fd_);
            cplx va = fd_wirtinger2(fn[static_cast<std::size_t>(a)], p, c, true, e, true, fd_);
            j.dd_holo[static_cast<std::size_t>(a)](c, e) = vh;
            j.dd_holo[static_cast<std::size_t>(a)](e, c) = vh;
            j.dd_anti[static_cast<std::size_t>(a)](c, e) = va;
            j.dd_anti[static_cast<std::size_t>(a)](e, c) = va;
          }
        }
    return j;
  }
};

struct Field {
  FieldKind kind = FieldKind::OneForm;
  std::string name;
  FieldComponents comps;
  std::uint64_t seed = 0;  // for seeded random fields; 0 = not random
};

// ---------------------------------------------------------------------------
// Built-in field library.
// ---------------------------------------------------------------------------

namespace fieldlib {

/// Invariant coframe of the Heisenberg group in the chart coordinates:
/// phi1 = dz1, phi2 = dz2, phi3 = dz3 - z1 dz2.
inline std::vector<Expr> iwasawa_coframe_components(int which) {
  std::vector<Expr> w(3, Expr::constant(0.0));
  switch (which) {
    case 1: w[0] = Expr::constant(1.0); break;
    case 2: w[1] = Expr::constant(1.0); break;
    case 3:
      w[1] = -Expr::coord(0);
      w[2] = Expr::constant(1.0);
      break;
    default: throw BuildError("iwasawa coframe index must be 1..3");
  }
  return w;
}

/// Dual invariant frame: E1 = d/dz1, E2 = d/dz2 + z1 d/dz3, E3 = d/dz3.
inline std::vector<Expr> iwasawa_frame_components(int which) {
  std::vector<Expr> x(3, Expr::constant(0.0));
  switch (which) {
    case 1: x[0] = Expr::constant(1.0); break;
    case 2:
      x[1] = Expr::constant(1.0);
      x[2] = Expr::coord(0);
      break;
    case 3: x[2] = Expr::constant(1.0); break;
    default: throw BuildError("iwasawa frame index must be 1..3");
  }
  return x;
}

/// Random trigonometric polynomial in the real coordinates of the complex
/// coordinates listed in `coords`, periodic over the unit box.
inline Expr random_trig_scalar(std::mt19937_64& rng, int degree,
                               const std::vector<int>& coords) {
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  const double twopi = 2.0 * std::numbers::pi;
  Expr sum = Expr::constant(cplx(amp(rng), amp(rng)));
  for (int k : coords) {
    Expr zk = Expr::coord(k);
    Expr re = (zk + Expr::coord_conj(k)) * Expr::constant(0.5);
    Expr im = (zk - Expr::coord_conj(k)) * Expr::constant(cplx(0.0, -0.5));
    for (int h = 1; h <= degree; ++h) {
      Expr wx = Expr::constant(twopi * h) * re;
      Expr wy = Expr::constant(twopi * h) * im;
      sum = sum + Expr::constant(cplx(amp(rng), amp(rng))) * Expr::cos(wx) +
            Expr::constant(cplx(amp(rng), amp(rng))) * Expr::sin(wx) +
            Expr::constant(cplx(amp(rng), amp(rng))) * Expr::cos(wy) +
            Expr::constant(cplx(amp(rng), amp(rng))) * Expr::sin(wy);
    }
  }
  // one product term for genericity
  if (coords.size() >= 2) {
    Expr a = Expr::coord(coords[0]) + Expr::coord_conj(coords[0]);
    Expr b = Expr::coord(coords[1]) - Expr::coord_conj(coords[1]);
    sum = sum + Expr::constant(cplx(amp(rng), amp(rng))) *
                    Expr::cos(Expr::constant(std::numbers::pi) * a) *
                    Expr::sin(Expr::constant(std::numbers::pi) *
                              Expr::constant(cplx(0, -1)) * b);
  }
  return sum;
}

/// Seeded random field on a manifold. On the Heisenberg quotient the
/// components are built in the invariant (co)frame with coefficients
/// independent of the center coordinate z3, so the field descends to the
/// quotient; on tori they are plain trig polynomials in all coordinates.
inline Field random_trig_field(const ManifoldModel& m, FieldKind kind,
                               int degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int n = m.chart.n;
  std::vector<int> coords;
  if (m.name == "iwasawa") {
    coords = {0, 1};
  } else {
    for (int k = 0; k < n; ++k) coords.push_back(k);
  }
  std::vector<Expr> coeff;
  coeff.reserve(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a)
    coeff.push_back(random_trig_scalar(rng, degree, coords));

  std::vector<Expr> comps(static_cast<std::size_t>(n), Expr::constant(0.0));
  if (m.name == "iwasawa") {
    for (int a = 0; a < n; ++a) {
      auto basis = (kind == FieldKind::OneForm) ? iwasawa_coframe_components(a + 1)
                                                : iwasawa_frame_components(a + 1);
      for (int c = 0; c < n; ++c)
        comps[static_cast<std::size_t>(c)] =
            comps[static_cast<std::size_t>(c)] + coeff[static_cast<std::size_t>(a)] * basis[static_cast<std::size_t>(c)];
    }
  } else {
    comps = coeff;
  }
  Field f;
  f.kind = kind;
  f.name = (kind == FieldKind::OneForm ? "random_trig_form_" : "random_trig_vector_") +
           std::to_string(seed);
  f.seed = seed;
  f.comps = FieldComponents::symbolic(n, std::move(comps));
  return f;
}

/// Named builtin fields: dz<k>, dx<k>, dy<k> (forms with constant
/// components), ddz<k> (coordinate vector fields), phi1..phi3 / E1..E3 on
/// the Heisenberg quotient.
inline Field builtin_field(const ManifoldModel& m, const std::string& name) {
  const int n = m.chart.n;
  Field f;
  f.name = name;
  auto constant_form = [&](int k, cplx v) {
    std::vector<Expr> w(static_cast<std::size_t>(n), Expr::constant(0.0));
    w[static_cast<std::size_t>(k)] = Expr::constant(v);
    return w;
  };
  auto idx = [&](std::size_t off) {
    int k = std::stoi(name.substr(off)) - 1;
    if (k < 0 || k >= n) throw BuildError("field coordinate out of range: " + name);
    return k;
  };
  if (name.rfind("dz", 0) == 0 && name.size() > 2 && std::isdigit(static_cast<unsigned char>(name[2]))) {
    f.kind = FieldKind::OneForm;
    f.comps = FieldComponents::symbolic(n, constant_form(idx(2), 1.0));
  } else if (name.rfind("dx", 0) == 0) {
    f.kind = FieldKind::OneForm;
    f.comps = FieldComponents::symbolic(n, constant_form(idx(2), 0.5));
  } else if (name.rfind("dy", 0) == 0) {
    f.kind = FieldKind::OneForm;
    f.comps = FieldComponents::symbolic(n, constant_form(idx(2), cplx(0.0, -0.5)));
  } else if (name.rfind("ddz", 0) == 0) {
    f.kind = FieldKind::VectorField;
    f.comps = FieldComponents::symbolic(n, constant_form(idx(3), 1.0));
  } else if (name == "phi1" || name == "phi2" || name == "phi3") {
    if (m.name != "iwasawa")
      throw BuildError("field '" + name + "' is specific to the iwasawa builtin");
    f.kind = FieldKind::OneForm;
    f.comps = FieldComponents::symbolic(n, iwasawa_coframe_components(name[3] - '0'));
  } else if (name == "E1" || name == "E2" || name == "E3") {
    if (m.name != "iwasawa")
      throw BuildError("field '" + name + "' is specific to the iwasawa builtin");
    f.kind = FieldKind::VectorField;
    f.comps = FieldComponents::symbolic(n, iwasawa_frame_components(name[1] - '0'));
  } else {
    throw BuildError("unknown builtin field '" + name + "'");
  }
  return f;
}

}  // namespace fieldlib

// ---------------------------------------------------------------------------
// Scalar functions with derivative tapes (Laplacian tests).
// ---------------------------------------------------------------------------

struct ScalarJet {
  cplx f;
  Vec d, dbar;  // ∂_c f, ∂_c̄ f
  Mat ddm;      // ddm(c,d) = ∂_c ∂_d̄ f
};

class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(int n, const Expr& e) : n_(n), expr_(e) {
    auto comp = [&](const Expr& x, std::vector<CompiledExpr>& tapes,
                    std::vector<std::vector<double>>& bound) {
      CompiledExpr c(x);
      mask_ |= c.coord_mask();
      bound.push_back(c.bind({{"pi", std::numbers::pi}}));
      tapes.push_back(std::move(c));
    };
    std::vector<CompiledExpr> f0;
    comp(e, f0, b0_);
    c0_ = std::move(f0[0]);
    for (int c = 0; c < n; ++c) {
      Expr dc = e.diff(c, false);
      comp(dc, cd_, bd_);
      comp(e.diff(c, true), cdb_, bdb_);
      for (int d = 0; d < n; ++d) comp(dc.diff(d, true), cddm_, bddm_);
    }
  }

  int n() const { return n_; }
  std::uint32_t coord_mask() const { return mask_; }
  const Expr& expression() const { return expr_; }

  ScalarJet jet(const CPoint& p) const {
    ScalarJet j;
    std::vector<cplx> stack;
    j.f = c0_.eval(p, b0_[0], stack);
    j.d.resize(n_);
    j.dbar.resize(n_);
    j.ddm.resize(n_, n_);
    for (int c = 0; c < n_; ++c) {
      j.d(c) = cd_[static_cast<std::size_t>(c)].eval(p, bd_[static_cast<std::size_t>(c)], stack);
      j.dbar(c) = cdb_[static_cast<std::size_t>(c)].eval(p, bdb_[static_cast<std::size_t>(c)], stack);
      for (int d = 0; d < n_; ++d)
        j.ddm(c, d) = cddm_[static_cast<std::size_t>(c * n_ + d)].eval(
            p, bddm_[static_cast<std::size_t>(c * n_ + d)], stack);
    }
    return j;
  }

 private:
  int n_ = 0;
  Expr expr_;
  std::uint32_t mask_ = 0;
  CompiledExpr c0_;
  std::vector<CompiledExpr> cd_, cdb_, cddm_;
  std::vector<std::vector<double>> b0_, bd_, bdb_, bddm_;
};

/// The three Laplacians of a real scalar at a point.
struct LaplacianSet {
  double lap_d;    // δ(df)
  cplx lap_dbar;   // ∂̄-Laplacian (real on balanced manifolds)
  cplx lap_del;    // ∂-Laplacian
};

inline LaplacianSet laplacians(const PointGeometry& g, const ScalarJet& f) {
  const int n = g.n;
  cplx tr = 0, thbar = 0, thdel = 0, sharp_th = 0;
  for (int c = 0; c < n; ++c)
    for (int d = 0; d < n; ++d) tr += g.Ginv(d, c) * f.ddm(c, d);
  for (int c = 0; c < n; ++c)
    for (int d = 0; d < n; ++d) {
      thbar += g.Ginv(d, c) * g.theta(c) * f.dbar(d);
      thdel += g.Ginv(d, c) * std::conj(g.theta(d)) * f.d(c);
    }
  for (int a = 0; a < n; ++a) {
    cplx sharp_a = 0;
    for (int b = 0; b < n; ++b) sharp_a += g.Ginv(b, a) * f.dbar(b);
    sharp_th += g.theta(a) * sharp_a;
  }
  LaplacianSet out;
  out.lap_d = -2.0 * tr.real() - 2.0 * sharp_th.real();
  out.lap_dbar = -(tr + thbar);
  out.lap_del = -(tr + thdel);
  return out;
}

/// Fixed trig test functions for the balanced Laplacian identity; they use
/// only the first one or two complex coordinates so they descend on the
/// builtin quotients.
inline std::vector<ScalarField> laplacian_test_functions(const ManifoldModel& m) {
  const int n = m.chart.n;
  const double twopi = 2.0 * std::numbers::pi;
  auto re = [&](int k) { return (Expr::coord(k) + Expr::coord_conj(k)) * Expr::constant(0.5); };
  auto im = [&](int k) {
    return (Expr::coord(k) - Expr::coord_conj(k)) * Expr::constant(cplx(0.0, -0.5));
  };
  std::vector<Expr> fs;
  fs.push_back(Expr::cos(Expr::constant(twopi) * re(0)));
  fs.push_back(Expr::sin(Expr::constant(twopi) * im(0)));
  if (n >= 2) {
    fs.push_back(Expr::cos(Expr::constant(twopi) * re(1)));
    fs.push_back(Expr::sin(Expr::constant(twopi) * re(1)) *
                 Expr::cos(Expr::constant(twopi) * im(0)));
    fs.push_back(Expr::cos(Expr::constant(twopi) * im(1)) *
                 Expr::cos(Expr::constant(twopi) * re(0)));
  } else {
    fs.push_back(Expr::cos(Expr::constant(2.0 * twopi) * re(0)));
    fs.push_back(Expr::sin(Expr::constant(twopi) * re(0)) *
                 Expr::cos(Expr::constant(twopi) * im(0)));
    fs.push_back(Expr::cos(Expr::constant(2.0 * twopi) * im(0)));
  }
  std::vector<ScalarField> out;
  for (const auto& e : fs) out.emplace_back(n, e);
  return out;
}

}  // namespace chern
