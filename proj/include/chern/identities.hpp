#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chern/fields.hpp"
#include "chern/geometry.hpp"
#include "chern/manifold.hpp"

namespace chern {

// ---------------------------------------------------------------------------
// Case registry
// ---------------------------------------------------------------------------

enum class CaseId {
  VEC7, RICCI7S, PROP32, INT46, KILL12, KILL14, FORM47, FORM48,
  BIANCHI410, LEM43, LEM44, LEM43P, TH33, KS_EQ, LAP_IV
};

enum class CaseInput { VectorField, OneForm, None };

struct CaseInfo {
  CaseId id;
  const char* name;
  bool balanced_only;
  bool integral;  // integral (vs pointwise/sup) kind
  CaseInput input;
};

inline const std::vector<CaseInfo>& all_cases() {
  static const std::vector<CaseInfo> cases = {
      {CaseId::VEC7, "VEC7", false, true, CaseInput::VectorField},
      {CaseId::RICCI7S, "RICCI7S", false, false, CaseInput::VectorField},
      {CaseId::PROP32, "PROP32", true, false, CaseInput::VectorField},
      {CaseId::INT46, "INT46", true, true, CaseInput::VectorField},
      {CaseId::KILL12, "KILL12", true, true, CaseInput::VectorField},
      {CaseId::KILL14, "KILL14", true, true, CaseInput::VectorField},
      {CaseId::FORM47, "FORM47", true, true, CaseInput::OneForm},
      {CaseId::FORM48, "FORM48", true, true, CaseInput::OneForm},
      {CaseId::BIANCHI410, "BIANCHI410", false, false, CaseInput::OneForm},
      {CaseId::LEM43, "LEM43", true, true, CaseInput::OneForm},
      {CaseId::LEM44, "LEM44", true, true, CaseInput::OneForm},
      {CaseId::LEM43P, "LEM43P", true, true, CaseInput::OneForm},
      {CaseId::TH33, "TH33", true, false, CaseInput::VectorField},
      {CaseId::KS_EQ, "KS_EQ", true, false, CaseInput::None},
      {CaseId::LAP_IV, "LAP_IV", true, false, CaseInput::None},
  };
  return cases;
}

inline const CaseInfo& case_info(CaseId id) {
  for (const auto& c : all_cases())
    if (c.id == id) return c;
  throw BuildError("unknown case id");
}

inline std::optional<CaseId> case_from_string(const std::string& s) {
  for (const auto& c : all_cases())
    if (s == c.name) return c.id;
  return std::nullopt;
}

enum class Verdict { PASS, FAIL, INAPPLICABLE, HYPOTHESIS_NOT_MET };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::PASS: return "PASS";
    case Verdict::FAIL: return "FAIL";
    case Verdict::INAPPLICABLE: return "INAPPLICABLE";
    case Verdict::HYPOTHESIS_NOT_MET: return "HYPOTHESIS_NOT_MET";
  }
  return "?";
}

struct Tolerances {
  double pointwise_rel = 1e-9;      // symbolic derivative mode
  double pointwise_rel_fd = 1e-6;   // finite-difference mode
  double integral_abs = 1e-8;       // after normalizing volume to 1
  double balanced = 1e-8;           // balanced verdict
  double zero = 1e-9;               // definiteness "zero" classification
  double gate_analytic = 1e-8;
  double gate_harmonic = 1e-8;
  double gate_killing13 = 1e-8;

  double pointwise(DerivMode mode) const {
    return mode == DerivMode::Symbolic ? pointwise_rel : pointwise_rel_fd;
  }
};

struct CaseResult {
  CaseId id{};
  std::string case_name;
  std::string field_name;   // empty for field-independent cases
  Verdict verdict = Verdict::PASS;
  double residual = 0.0;
  double tolerance = 0.0;
  double pointwise_sup = 0.0;  // sup |integrand| for integral cases
  std::string note;
  double runtime_sec = 0.0;
};

// ---------------------------------------------------------------------------
// Field assessments (classification residuals)
// ---------------------------------------------------------------------------

struct FormAssessment {
  std::string name;
  std::uint64_t seed = 0;
  double analytic_sup = 0, analytic_l2 = 0;   // ||D_a w_bbar||
  double closed20_sup = 0;                    // ||A'|| (the torsion-corrected d(2,0) block)
  double closed11_sup = 0;                    // ||D_a w_bbar - D_bbar w_a||
  double delta_sup = 0, deltaJ_sup = 0;
  double int_H = 0;                           // ∫ H(ω#, ω#) dV (raw)
  double comp_sup = 0;                        // sup |ω_a|
  bool analytic(double tol) const { return analytic_sup <= tol; }
  bool harmonic(double tol) const {
    return closed20_sup <= tol && closed11_sup <= tol && delta_sup <= tol;
  }
};

struct VectorAssessment {
  std::string name;
  std::uint64_t seed = 0;
  double analytic_sup = 0, analytic_l2 = 0;   // ||D_a xi_b||
  double killing20_sup = 0;                   // the holomorphic-block condition
  double killing_full_sup = 0;                // max of both symmetrized blocks
  double lie_mixed_sup = 0, lie_conj_sup = 0; // (L_ξD) mixed blocks
  double affine_sup = 0;                      // all (L_ξD) blocks
  double delta_sup = 0, deltaJ_sup = 0;
  double kquad_sup = 0;                       // sup |k(ξ,ξ)|
  double comp_sup = 0;                        // sup |ξ^a|
  bool analytic(double tol) const { return analytic_sup <= tol; }
  bool killing(double tol) const { return killing_full_sup <= tol; }
  bool killing13(double tol) const { return killing20_sup <= tol; }
  bool complex_hermitian(double tol) const {
    return std::max(lie_mixed_sup, lie_conj_sup) <= tol;
  }
  bool affine(double tol) const { return affine_sup <= tol; }
};

struct BalancedReport {
  double max_theta_component = 0;  // (iii)
  double max_theta_norm = 0;
  double max_dOmega_trace = 0;     // (i): frame contraction of dΩ
  double max_delta_Omega = 0;      // (ii): |δΩ| via the Γ-trace route
  double max_laplacian_dev = 0;    // (iv): |Δ_∂̄ f − ½ Δ_d f| over test functions
  double tolerance = 0;
  bool balanced = false;
};

struct TensorSummary {
  std::string name;
  double eig_min = 0, eig_max = 0;  // metric-relative eigenvalue envelope
};

struct SuiteResult {
  std::vector<CaseResult> cases;
  BalancedReport balanced;
  std::vector<FormAssessment> forms;
  std::vector<VectorAssessment> vectors;
  std::vector<TensorSummary> tensors;
  double volume = 0;
  std::uint64_t grid_points = 0;
  std::uint64_t swept_points = 0;
  int resolution = 0;
  DerivMode mode = DerivMode::Symbolic;
};

// ---------------------------------------------------------------------------
// Sweep engine
// ---------------------------------------------------------------------------

struct SuiteRequest {
  std::vector<Field> fields;
  std::vector<CaseId> cases;  // empty = all
  int resolution = 8;
  Tolerances tol;
  int threads = 0;
  std::uint64_t point_cap = (1ull << 27);
  std::uint64_t envelope_cap = 200000;  // max points eigen-decomposed
};

namespace detail {

struct SlotKey {
  CaseId id;
  int field_index;  // index into forms/vectors lists; -1 for none
};

struct Accum {
  double sum = 0;        // integral accumulator (subgrid, un-multiplied)
  double sup = 0;        // pointwise sup (relative for pointwise cases)
  double raw_sup = 0;    // sup |integrand| for integral cases
};

struct FormAccum {
  double analytic_sup = 0, analytic_l2sum = 0, closed20_sup = 0,
         closed11_sup = 0, delta_sup = 0, deltaJ_sup = 0, intH_sum = 0,
         comp_sup = 0;
};

struct VecAccum {
  double analytic_sup = 0, analytic_l2sum = 0, k20_sup = 0, kfull_sup = 0,
         lm_sup = 0, lc_sup = 0, aff_sup = 0, delta_sup = 0, deltaJ_sup = 0,
         kq_sup = 0, comp_sup = 0;
};

struct BalAccum {
  double th_comp = 0, th_norm = 0, domega = 0, deltaOmega = 0, lap = 0;
};

struct EnvAccum {
  bool any = false;
  double kmin = 0, kmax = 0, ksmin = 0, ksmax = 0, smin = 0, smax = 0,
         tmin = 0, tmax = 0, hmin = 0, hmax = 0, ktmin = 0, ktmax = 0;
  double theta_sup = 0;
  void fold(const PointGeometry& g) {
    auto upd = [&](const RVec& ev, double& lo, double& hi) {
      lo = any ? std::min(lo, ev.minCoeff()) : ev.minCoeff();
      hi = any ? std::max(hi, ev.maxCoeff()) : ev.maxCoeff();
    };
    Mat F = g.unitary_frame_matrix();
    auto eig = [&](const Mat& q) {
      Mat fr = F.transpose() * q * F.conjugate();
      return hermitian_eigenvalues(fr);
    };
    double tn = 0;
    for (int a = 0; a < g.n; ++a) {
      cplx v = 0;
      for (int b = 0; b < g.n; ++b) v += g.Ginv(b, a) * std::conj(g.theta(b));
      tn += (g.theta(a) * v).real();
    }
    upd(eig(g.k), kmin, kmax);
    upd(eig(g.kstar), ksmin, ksmax);
    upd(eig(g.s), smin, smax);
    upd(eig(g.t), tmin, tmax);
    upd(eig(g.H), hmin, hmax);
    upd(eig(g.k - 0.5 * g.t), ktmin, ktmax);
    theta_sup = std::max(theta_sup, std::sqrt(std::max(0.0, 2.0 * tn)));
    any = true;
  }
  void merge(const EnvAccum& o) {
    if (!o.any) return;
    if (!any) { *this = o; return; }
    kmin = std::min(kmin, o.kmin); kmax = std::max(kmax, o.kmax);
    ksmin = std::min(ksmin, o.ksmin); ksmax = std::max(ksmax, o.ksmax);
    smin = std::min(smin, o.smin); smax = std::max(smax, o.smax);
    tmin = std::min(tmin, o.tmin); tmax = std::max(tmax, o.tmax);
    hmin = std::min(hmin, o.hmin); hmax = std::max(hmax, o.hmax);
    ktmin = std::min(ktmin, o.ktmin); ktmax = std::max(ktmax, o.ktmax);
    theta_sup = std::max(theta_sup, o.theta_sup);
  }
};

struct ChunkState {
  double weight_sum = 0;
  std::vector<Accum> slots;
  std::vector<FormAccum> forms;
  std::vector<VecAccum> vectors;
  BalAccum bal;
  EnvAccum env;
  std::string error;

  void merge(const ChunkState& o) {
    weight_sum += o.weight_sum;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      slots[i].sum += o.slots[i].sum;
      slots[i].sup = std::max(slots[i].sup, o.slots[i].sup);
      slots[i].raw_sup = std::max(slots[i].raw_sup, o.slots[i].raw_sup);
    }
    for (std::size_t i = 0; i < forms.size(); ++i) {
      auto& a = forms[i]; const auto& b = o.forms[i];
      a.analytic_sup = std::max(a.analytic_sup, b.analytic_sup);
      a.analytic_l2sum += b.analytic_l2sum;
      a.closed20_sup = std::max(a.closed20_sup, b.closed20_sup);
      a.closed11_sup = std::max(a.closed11_sup, b.closed11_sup);
      a.delta_sup = std::max(a.delta_sup, b.delta_sup);
      a.deltaJ_sup = std::max(a.deltaJ_sup, b.deltaJ_sup);
      a.intH_sum += b.intH_sum;
      a.comp_sup = std::max(a.comp_sup, b.comp_sup);
    }
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      auto& a = vectors[i]; const auto& b = o.vectors[i];
      a.analytic_sup = std::max(a.analytic_sup, b.analytic_sup);
      a.analytic_l2sum += b.analytic_l2sum;
      a.k20_sup = std::max(a.k20_sup, b.k20_sup);
      a.kfull_sup = std::max(a.kfull_sup, b.kfull_sup);
      a.lm_sup = std::max(a.lm_sup, b.lm_sup);
      a.lc_sup = std::max(a.lc_sup, b.lc_sup);
      a.aff_sup = std::max(a.aff_sup, b.aff_sup);
      a.delta_sup = std::max(a.delta_sup, b.delta_sup);
      a.deltaJ_sup = std::max(a.deltaJ_sup, b.deltaJ_sup);
      a.kq_sup = std::max(a.kq_sup, b.kq_sup);
      a.comp_sup = std::max(a.comp_sup, b.comp_sup);
    }
    bal.th_comp = std::max(bal.th_comp, o.bal.th_comp);
    bal.th_norm = std::max(bal.th_norm, o.bal.th_norm);
    bal.domega = std::max(bal.domega, o.bal.domega);
    bal.deltaOmega = std::max(bal.deltaOmega, o.bal.deltaOmega);
    bal.lap = std::max(bal.lap, o.bal.lap);
    env.merge(o.env);
    if (error.empty()) error = o.error;
  }
};

inline double sup_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

/// Raised antisymmetrized (2,0)-derivative of a form:
/// M(a,b) = D^a ω^b = g^{aγ̄} g^{bδ̄} conj(D_γ ω_δ).
inline Mat raised_conj(const Mat& A, const Mat& Ginv) {
  return Ginv.transpose() * A.conjugate() * Ginv;
}

}  // namespace detail

/// Evaluates the requested identity cases, field classifications, balanced
/// report and tensor eigenvalue envelopes in a single sweep over the grid.
///
/// Points whose coordinates the metric and all fields provably do not
/// reference (free-variable masks of the expressions) are folded exactly:
/// the sweep runs over the spanned sub-grid and multiplies by the count of
/// folded duplicates. Summation order is fixed (chunk-indexed) and does
/// not depend on the thread count.
inline SuiteResult run_suite(const ManifoldModel& M, const SuiteRequest& req) {
  using namespace detail;
  const int n = M.chart.n;
  const DerivMode mode = M.metric.mode();

  std::vector<CaseId> case_ids = req.cases;
  if (case_ids.empty())
    for (const auto& c : all_cases()) case_ids.push_back(c.id);

  std::vector<const Field*> forms, vectors;
  for (const auto& f : req.fields)
    (f.kind == FieldKind::OneForm ? forms : vectors).push_back(&f);

  // Laplacian test functions (LAP_IV and the balanced condition iv).
  std::vector<ScalarField> testfns = laplacian_test_functions(M);

  // case slots
  std::vector<SlotKey> slots;
  for (CaseId id : case_ids) {
    const CaseInfo& info = case_info(id);
    if (info.input == CaseInput::None) {
      slots.push_back({id, -1});
    } else if (info.input == CaseInput::OneForm) {
      for (int i = 0; i < static_cast<int>(forms.size()); ++i) slots.push_back({id, i});
    } else {
      for (int i = 0; i < static_cast<int>(vectors.size()); ++i) slots.push_back({id, i});
    }
  }

  QuadratureGrid grid(M.chart, req.resolution, req.point_cap);

  std::uint32_t mask = M.metric.coord_mask();
  for (const auto& f : req.fields) mask |= f.comps.coord_mask();
  for (const auto& s : testfns) mask |= s.coord_mask();
  const std::uint32_t full_mask = (n >= 32) ? ~0u : ((1u << n) - 1u);
  mask &= full_mask;

  const std::uint64_t sub_total = grid.masked_size(mask);
  const double multiplier =
      static_cast<double>(grid.size() / std::max<std::uint64_t>(1, sub_total));

  // enumerate the masked sub-grid through representative full-grid indices:
  // digits of masked dims vary, unmasked dims pinned to digit 0.
  std::vector<int> masked_dims;  // real dims
  for (int k = 0; k < n; ++k)
    if (mask & (1u << k)) {
      masked_dims.push_back(2 * k);
      masked_dims.push_back(2 * k + 1);
    }
  const int res = req.resolution;
  auto sub_index_to_grid_index = [&](std::uint64_t j) {
    std::uint64_t idx = 0;
    std::uint64_t rest = j;
    for (int d : masked_dims) {
      std::uint64_t digit = rest % static_cast<std::uint64_t>(res);
      rest /= static_cast<std::uint64_t>(res);
      // grid index contribution of digit at real dim d
      std::uint64_t scale = 1;
      for (int dd = 0; dd < d; ++dd) scale *= static_cast<std::uint64_t>(res);
      idx += digit * scale;
    }
    return idx;
  };

  const std::uint64_t env_stride =
      std::max<std::uint64_t>(1, sub_total / std::max<std::uint64_t>(1, req.envelope_cap));

  const std::uint64_t nchunks = (sub_total + kChunkSize - 1) / kChunkSize;
  std::vector<ChunkState> chunks(static_cast<std::size_t>(nchunks));

  auto make_state = [&]() {
    ChunkState st;
    st.slots.resize(slots.size());
    st.forms.resize(forms.size());
    st.vectors.resize(vectors.size());
    return st;
  };

  auto run_chunk = [&](std::uint64_t ci) {
    ChunkState st = make_state();
    std::uint64_t lo = ci * kChunkSize, hi = std::min(sub_total, lo + kChunkSize);
    try {
      for (std::uint64_t j = lo; j < hi; ++j) {
        const CPoint p = grid.point(sub_index_to_grid_index(j));
        PointGeometry g = compute_geometry(M, p, true);
        const double w = grid.cell_volume() * g.det;
        st.weight_sum += w;

        // balanced pieces
        double thc = g.theta.cwiseAbs().maxCoeff();
        st.bal.th_comp = std::max(st.bal.th_comp, thc);
        {
          cplx nn = 0;
          for (int a = 0; a < n; ++a) {
            cplx up = 0;
            for (int b = 0; b < n; ++b) up += g.Ginv(b, a) * std::conj(g.theta(b));
            nn += g.theta(a) * up;
          }
          st.bal.th_norm = std::max(st.bal.th_norm, std::sqrt(std::max(0.0, 2.0 * nn.real())));
        }
        st.bal.domega = std::max(st.bal.domega,
                                 delta_omega_from_frame(g).cwiseAbs().maxCoeff());
        st.bal.deltaOmega = std::max(
            st.bal.deltaOmega, delta_omega_from_dOmega(g).cwiseAbs().maxCoeff());

        double lapdev = 0;
        std::vector<LaplacianSet> laps;
        laps.reserve(testfns.size());
        for (const auto& sf : testfns) {
          LaplacianSet ls = laplacians(g, sf.jet(p));
          laps.push_back(ls);
          lapdev = std::max(lapdev, std::abs(ls.lap_dbar - 0.5 * ls.lap_d));
        }
        st.bal.lap = std::max(st.bal.lap, lapdev);

        if (j % env_stride == 0) st.env.fold(g);

        // field blocks
        std::vector<FormBlocks> fb;
        std::vector<FieldJet> fjf;
        fb.reserve(forms.size());
        for (std::size_t i = 0; i < forms.size(); ++i) {
          FieldJet fj = forms[i]->comps.jet(p);
          FormBlocks b = form_blocks(g, fj);
          auto& acc = st.forms[i];
          double an = std::sqrt(std::max(0.0, norm2_mixed2(b.Bmix, g.Ginv)));
          acc.analytic_sup = std::max(acc.analytic_sup, an);
          acc.analytic_l2sum += w * an * an;
          acc.closed20_sup = std::max(
              acc.closed20_sup, std::sqrt(std::max(0.0, norm2_lower2(b.Aprime, g.Ginv))));
          Mat m43 = b.Bmix - b.Dbar.transpose();
          acc.closed11_sup = std::max(
              acc.closed11_sup, std::sqrt(std::max(0.0, norm2_mixed2(m43, g.Ginv))));
          acc.delta_sup = std::max(acc.delta_sup, std::abs(b.delta));
          acc.deltaJ_sup = std::max(acc.deltaJ_sup, std::abs(b.delta_J));
          acc.intH_sum += w * quad_form(g.H, b.sharp);
          acc.comp_sup = std::max(acc.comp_sup, b.w.cwiseAbs().maxCoeff());
          fb.push_back(std::move(b));
          fjf.push_back(std::move(fj));
        }
        std::vector<VectorBlocks> vb;
        std::vector<FieldJet> fjv;
        vb.reserve(vectors.size());
        for (std::size_t i = 0; i < vectors.size(); ++i) {
          FieldJet fj = vectors[i]->comps.jet(p);
          VectorBlocks b = vector_blocks(g, fj);
          auto& acc = st.vectors[i];
          double an = std::sqrt(std::max(0.0, norm2_lower2(b.A, g.Ginv)));
          acc.analytic_sup = std::max(acc.analytic_sup, an);
          acc.analytic_l2sum += w * an * an;
          Mat k20 = killing_block_20(b);
          Mat k11 = killing_block_11(g, b);
          double s20 = std::sqrt(std::max(0.0, norm2_lower2(k20, g.Ginv)));
          double s11 = std::sqrt(std::max(0.0, norm2_mixed2(k11, g.Ginv)));
          acc.k20_sup = std::max(acc.k20_sup, s20);
          acc.kfull_sup = std::max(acc.kfull_sup, std::max(s20, s11));
          auto lm = lie_connection_mixed(g, fj);
          auto lc = lie_connection_conj(g, fj);
          auto l20 = lie_connection_20(g, fj);
          double lmsup = 0, lcsup = 0, l20sup = 0;
          for (int l = 0; l < n; ++l) {
            lmsup = std::max(lmsup, sup_abs(lm[static_cast<std::size_t>(l)]));
            lcsup = std::max(lcsup, sup_abs(lc[static_cast<std::size_t>(l)]));
            l20sup = std::max(l20sup, sup_abs(l20[static_cast<std::size_t>(l)]));
          }
          acc.lm_sup = std::max(acc.lm_sup, lmsup);
          acc.lc_sup = std::max(acc.lc_sup, lcsup);
          acc.aff_sup = std::max(acc.aff_sup, std::max({lmsup, lcsup, l20sup}));
          acc.delta_sup = std::max(acc.delta_sup, std::abs(b.delta));
          acc.deltaJ_sup = std::max(acc.deltaJ_sup, std::abs(b.delta_J));
          acc.kq_sup = std::max(acc.kq_sup, std::abs(quad_form(g.k, b.x)));
          acc.comp_sup = std::max(acc.comp_sup, b.x.cwiseAbs().maxCoeff());
          vb.push_back(std::move(b));
          fjv.push_back(std::move(fj));
        }

        // case integrands / pointwise residuals
        for (std::size_t si = 0; si < slots.size(); ++si) {
          const SlotKey& sk = slots[si];
          Accum& acc = st.slots[si];
          switch (sk.id) {
            case CaseId::VEC7: {
              const auto& b = vb[static_cast<std::size_t>(sk.field_index)];
              const auto& fj = fjv[static_cast<std::size_t>(sk.field_index)];
              Vec dd = ddbar_trace_A(g, fj);
              cplx t2 = 0, t3 = 0;
              for (int beta = 0; beta < n; ++beta) t2 += b.x(beta) * dd(beta);
              for (int al = 0; al < n; ++al) {
                cplx thup = 0;
                for (int c = 0; c < n; ++c) thup += g.Ginv(c, al) * std::conj(g.theta(c));
                for (int beta = 0; beta < n; ++beta)
                  t3 += b.x(beta) * thup * b.A(al, beta);
              }
              double integrand = norm2_lower2(b.A, g.Ginv) + t2.real() + t3.real();
              acc.sum += w * integrand;
              acc.raw_sup = std::max(acc.raw_sup, std::abs(integrand));
              break;
            }
            case CaseId::RICCI7S: {
              const auto& b = vb[static_cast<std::size_t>(sk.field_index)];
              const auto& fj = fjv[static_cast<std::size_t>(sk.field_index)];
              Vec lhs = ddbar_trace_A(g, fj);
              Vec mid = dbard_trace_A(g, fj, b);
              Vec kx = g.kstar * fj.comp.conjugate();
              double scale = std::max(
                  {1.0, lhs.cwiseAbs().maxCoeff(), mid.cwiseAbs().maxCoeff(),
                   kx.cwiseAbs().maxCoeff()});
              double diff = (lhs - mid - kx).cwiseAbs().maxCoeff();
              acc.sup = std::max(acc.sup, diff / scale);
              break;
            }
            case CaseId::PROP32: {
              const auto& b = vb[static_cast<std::size_t>(sk.field_index)];
              const auto& fj = fjv[static_cast<std::size_t>(sk.field_index)];
              Vec lhs = ddbar_trace_A(g, fj);
              Vec mid = dbard_trace_A(g, fj, b);
              Vec kx = g.kstar * fj.comp.conjugate();
              double scale = std::max(1.0, b.x.cwiseAbs().maxCoeff());
              double r = std::max(lhs.cwiseAbs().maxCoeff(),
                                  (mid + kx).cwiseAbs().maxCoeff());
              acc.sup = std::max(acc.sup, r / scale);
              break;
            }
            case CaseId::INT46: {
              const auto& b = vb[static_cast<std::size_t>(sk.field_index)];
              double integrand = norm2_lower2(b.A, g.Ginv) -
                                 norm2_mixed2(b.Bmix, g.Ginv) +
                                 quad_form(g.kstar, b.x);
              acc.sum += w * integrand;
              acc.raw_sup = std::max(acc.raw_sup, std::abs(integrand));
              break;
            }
            case CaseId::KILL12: {
              const auto& b = vb[static_cast<std::size_t>(sk.field_index)];
              // D^a ξ^b = g^{aγ̄} ∂_γ̄ ξ^b
              Mat dup = g.Ginv.transpose() * b.DbarUp;
              cplx pair = 0;
              for (int a = 0; a < n; ++a)
                for (int bidx = 0; bidx < n; ++bidx)
                  pair += b.A(bidx, a) * dup(a, bidx);
              double integrand = 2.0 * pair.real() + 2.0 * quad_form(g.k, b.x) -
                                 0.5 * b.delta * b.delta -
                                 0.5 * b.delta_J * b.delta_J;
              acc.sum += w * integrand;
              acc.raw_sup = std::max(acc.raw_sup, std::abs(integrand));
              break;
            }
            case CaseId::KILL14: {
              const auto& b = vb[static_cast<std::size_t>(sk.field_index)];
              double integrand = norm2_lower2(b.A, g.Ginv) -
                                 quad_form(g.k, b.x) +
                                 0.25 * b.delta_J * b.delta_J;
              acc.sum += w * integrand;
              acc.raw_sup = std::max(acc.raw_sup, std::abs(integrand));
              break;
            }
            case CaseId::FORM47: {
              const auto& b = fb[static_cast<std::size_t>(sk.field_index)];
              Mat up = raised_conj(b.A, g.Ginv);
              Mat upA = up - up.transpose();  // D^αω^β − D^βω^α
              cplx tterm = 0;
              for (int a = 0; a < n; ++a)
                for (int c = 0; c < n; ++c) tterm += b.C(a, c) * upA(a, c);
              double integrand =
                  0.5 * norm2_lower2(b.Aprime, g.Ginv) -
                  norm2_mixed2(b.Bmix, g.Ginv) -
                  quad_form_c(g.s, b.sharp).real() +
                  quad_form(g.kstar, b.sharp) - 0.5 * quad_form(g.t, b.sharp) +
                  0.25 * b.delta * b.delta + 0.25 * b.delta_J * b.delta_J -
                  tterm.real();
              acc.sum += w * integrand;
              acc.raw_sup = std::max(acc.raw_sup, std::abs(integrand));
              break;
            }
            case CaseId::FORM48: {
              const auto& b = fb[static_cast<std::size_t>(sk.field_index)];
              Mat up = raised_conj(b.A, g.Ginv);
              Mat upA = up - up.transpose();
              cplx tterm = 0, dterm = 0;
              for (int a = 0; a < n; ++a)
                for (int c = 0; c < n; ++c) tterm += b.C(a, c) * upA(a, c);
              // D^α ω_σ = g^{αμ̄} D_μ̄ ω_σ
              Mat dr = g.Ginv.transpose() * b.Dbar;
              for (int a = 0; a < n; ++a)
                for (int c = 0; c < n; ++c) {
                  cplx tsum = 0;
                  for (int s2 = 0; s2 < n; ++s2)
                    tsum += g.Tup[static_cast<std::size_t>(s2)](a, c) * dr(a, s2);
                  dterm += tsum * b.sharp(c);
                }
              double integrand = quad_form_c(g.s, b.sharp).real() -
                                 quad_form(g.kstar, b.sharp) + dterm.real() +
                                 0.5 * tterm.real();
              acc.sum += w * integrand;
              acc.raw_sup = std::max(acc.raw_sup, std::abs(integrand));
              break;
            }
            case CaseId::BIANCHI410: {
              const auto& b = fb[static_cast<std::size_t>(sk.field_index)];
              cplx lhs = 0;
              for (int s2 = 0; s2 < n; ++s2)
                for (int beta = 0; beta < n; ++beta) {
                  cplx dt = 0;
                  for (int al = 0; al < n; ++al)
                    for (int ga = 0; ga < n; ++ga)
                      dt += g.Ginv(ga, al) *
                            (g.dGammaBar[static_cast<std::size_t>(al)][static_cast<std::size_t>(ga)](beta, s2) -
                             g.dGammaBar[static_cast<std::size_t>(beta)][static_cast<std::size_t>(ga)](al, s2));
                  lhs += dt * b.w(s2) * b.sharp(beta);
                }
              cplx rhs = quad_form_c(g.s, b.sharp) - quad_form_c(g.kstar, b.sharp);
              double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
              acc.sup = std::max(acc.sup, std::abs(lhs - rhs) / scale);
              break;
            }
            case CaseId::LEM43: {
              const auto& b = fb[static_cast<std::size_t>(sk.field_index)];
              double integrand =
                  norm2_mixed2(b.Bmix, g.Ginv) + quad_form(g.H, b.sharp);
              acc.sum += w * integrand;
              acc.raw_sup = std::max(acc.raw_sup, std::abs(integrand));
              break;
            }
            case CaseId::LEM44: {
              const auto& b = fb[static_cast<std::size_t>(sk.field_index)];
              double integrand = 0.5 * norm2_lower2(b.Aprime, g.Ginv) +
                                 quad_form(g.H, b.sharp);
              acc.sum += w * integrand;
              acc.raw_sup = std::max(acc.raw_sup, std::abs(integrand));
              break;
            }
            case CaseId::LEM43P: {
              const auto& b = fb[static_cast<std::size_t>(sk.field_index)];
              double integrand = norm2_lower2(b.A, g.Ginv) +
                                 quad_form(g.k, b.sharp) -
                                 0.5 * quad_form(g.t, b.sharp);
              acc.sum += w * integrand;
              acc.raw_sup = std::max(acc.raw_sup, std::abs(integrand));
              break;
            }
            case CaseId::TH33: {
              // handled post-sweep from the assessments
              break;
            }
            case CaseId::KS_EQ: {
              double scale = std::max(1.0, sup_abs(g.k));
              acc.sup = std::max(acc.sup, sup_abs(g.k - g.s) / scale);
              break;
            }
            case CaseId::LAP_IV: {
              double dev = 0;
              for (const auto& ls : laps)
                dev = std::max(dev, std::abs(ls.lap_dbar - 0.5 * ls.lap_d));
              acc.sup = std::max(acc.sup, dev);
              break;
            }
          }
        }
      }
    } catch (const std::exception& e) {
      st.error = e.what();
    }
    chunks[static_cast<std::size_t>(ci)] = std::move(st);
  };

  int nt = req.threads > 0
               ? req.threads
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

  ChunkState total = make_state();
  for (std::uint64_t c = 0; c < nchunks; ++c)
    total.merge(chunks[static_cast<std::size_t>(c)]);
  if (!total.error.empty()) throw NumericError(total.error);

  SuiteResult out;
  out.resolution = req.resolution;
  out.mode = mode;
  out.grid_points = grid.size();
  out.swept_points = sub_total;
  out.volume = multiplier * total.weight_sum;

  // balanced report
  out.balanced.max_theta_component = total.bal.th_comp;
  out.balanced.max_theta_norm = total.bal.th_norm;
  out.balanced.max_dOmega_trace = total.bal.domega;
  out.balanced.max_delta_Omega = total.bal.deltaOmega;
  out.balanced.max_laplacian_dev = total.bal.lap;
  out.balanced.tolerance = req.tol.balanced;
  out.balanced.balanced = total.bal.th_comp <= req.tol.balanced &&
                          total.bal.lap <= std::max(req.tol.balanced, 1e-7);

  // assessments
  for (std::size_t i = 0; i < forms.size(); ++i) {
    FormAssessment a;
    a.name = forms[i]->name;
    a.seed = forms[i]->seed;
    const auto& acc = total.forms[i];
    a.analytic_sup = acc.analytic_sup;
    a.analytic_l2 = std::sqrt(std::max(0.0, multiplier * acc.analytic_l2sum / out.volume));
    a.closed20_sup = acc.closed20_sup;
    a.closed11_sup = acc.closed11_sup;
    a.delta_sup = acc.delta_sup;
    a.deltaJ_sup = acc.deltaJ_sup;
    a.int_H = multiplier * acc.intH_sum;
    a.comp_sup = acc.comp_sup;
    out.forms.push_back(std::move(a));
  }
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    VectorAssessment a;
    a.name = vectors[i]->name;
    a.seed = vectors[i]->seed;
    const auto& acc = total.vectors[i];
    a.analytic_sup = acc.analytic_sup;
    a.analytic_l2 = std::sqrt(std::max(0.0, multiplier * acc.analytic_l2sum / out.volume));
    a.killing20_sup = acc.k20_sup;
    a.killing_full_sup = acc.kfull_sup;
    a.lie_mixed_sup = acc.lm_sup;
    a.lie_conj_sup = acc.lc_sup;
    a.affine_sup = acc.aff_sup;
    a.delta_sup = acc.delta_sup;
    a.deltaJ_sup = acc.deltaJ_sup;
    a.kquad_sup = acc.kq_sup;
    a.comp_sup = acc.comp_sup;
    out.vectors.push_back(std::move(a));
  }

  // tensor envelopes
  if (total.env.any) {
    out.tensors = {
        {"k", total.env.kmin, total.env.kmax},
        {"kstar", total.env.ksmin, total.env.ksmax},
        {"s", total.env.smin, total.env.smax},
        {"t", total.env.tmin, total.env.tmax},
        {"H", total.env.hmin, total.env.hmax},
        {"k_minus_half_t", total.env.ktmin, total.env.ktmax},
    };
  }

  // case verdicts
  const double ptol = req.tol.pointwise(mode);
  const bool balanced = out.balanced.balanced;
  for (std::size_t si = 0; si < slots.size(); ++si) {
    const SlotKey& sk = slots[si];
    const CaseInfo& info = case_info(sk.id);
    const Accum& acc = total.slots[si];
    CaseResult r;
    r.id = sk.id;
    r.case_name = info.name;
    if (info.input == CaseInput::OneForm)
      r.field_name = forms[static_cast<std::size_t>(sk.field_index)]->name;
    else if (info.input == CaseInput::VectorField)
      r.field_name = vectors[static_cast<std::size_t>(sk.field_index)]->name;

    if (info.balanced_only && !balanced) {
      r.verdict = Verdict::INAPPLICABLE;
      r.note = "manifold is not balanced";
      if (sk.id == CaseId::LAP_IV) {
        r.residual = acc.sup;
        r.note += "; max |lap_dbar - lap_d/2| = " + std::to_string(acc.sup);
      }
      out.cases.push_back(std::move(r));
      continue;
    }

    // field gates
    if (sk.id == CaseId::LEM43 || sk.id == CaseId::LEM43P) {
      const auto& fa = out.forms[static_cast<std::size_t>(sk.field_index)];
      if (!fa.harmonic(req.tol.gate_harmonic)) {
        r.verdict = Verdict::HYPOTHESIS_NOT_MET;
        r.note = "form is not harmonic (closed residuals " +
                 std::to_string(fa.closed20_sup) + ", " +
                 std::to_string(fa.closed11_sup) + ", delta " +
                 std::to_string(fa.delta_sup) + ")";
        out.cases.push_back(std::move(r));
        continue;
      }
    }
    if (sk.id == CaseId::LEM44) {
      const auto& fa = out.forms[static_cast<std::size_t>(sk.field_index)];
      if (!fa.analytic(req.tol.gate_analytic)) {
        r.verdict = Verdict::HYPOTHESIS_NOT_MET;
        r.note = "form is not analytic (residual " +
                 std::to_string(fa.analytic_sup) + ")";
        out.cases.push_back(std::move(r));
        continue;
      }
    }
    if (sk.id == CaseId::PROP32) {
      const auto& va = out.vectors[static_cast<std::size_t>(sk.field_index)];
      if (!va.analytic(req.tol.gate_analytic)) {
        r.verdict = Verdict::HYPOTHESIS_NOT_MET;
        r.note = "vector field is not analytic (residual " +
                 std::to_string(va.analytic_sup) + ")";
        out.cases.push_back(std::move(r));
        continue;
      }
    }
    if (sk.id == CaseId::KILL14) {
      // the identity needs both Killing consequences: the vanishing
      // holomorphic block AND co-closedness of the dual form. The block
      // condition alone admits counterexamples (analytic non-Killing
      // fields with delta omega_xi != 0).
      const auto& va = out.vectors[static_cast<std::size_t>(sk.field_index)];
      if (!va.killing13(req.tol.gate_killing13) ||
          va.delta_sup > req.tol.gate_killing13) {
        r.verdict = Verdict::HYPOTHESIS_NOT_MET;
        r.note = "field is not Killing-like: holomorphic-block residual " +
                 std::to_string(va.killing20_sup) + ", delta residual " +
                 std::to_string(va.delta_sup);
        out.cases.push_back(std::move(r));
        continue;
      }
    }

    if (sk.id == CaseId::TH33) {
      const auto& va = out.vectors[static_cast<std::size_t>(sk.field_index)];
      const double tau = req.tol.gate_analytic, tau2 = 1e-6;
      bool an = va.analytic_sup <= tau;
      bool ch = std::max(va.lie_mixed_sup, va.lie_conj_sup) <= tau2;
      bool an_far = va.analytic_sup > 10 * tau;
      bool ch_far = std::max(va.lie_mixed_sup, va.lie_conj_sup) > 10 * tau2;
      bool ok = (an && ch) || (an_far && ch_far);
      r.verdict = ok ? Verdict::PASS : Verdict::FAIL;
      r.residual = an ? std::max(va.lie_mixed_sup, va.lie_conj_sup)
                      : (ch ? va.analytic_sup : 0.0);
      r.tolerance = tau2;
      r.note = std::string("analytic residual ") + std::to_string(va.analytic_sup) +
               ", complex-hermitian residual " +
               std::to_string(std::max(va.lie_mixed_sup, va.lie_conj_sup));
      out.cases.push_back(std::move(r));
      continue;
    }

    if (info.integral) {
      r.residual = std::abs(multiplier * acc.sum) / out.volume;
      r.tolerance = req.tol.integral_abs;
      r.pointwise_sup = acc.raw_sup;
      r.verdict = r.residual <= r.tolerance ? Verdict::PASS : Verdict::FAIL;
    } else {
      r.residual = acc.sup;
      r.tolerance = (sk.id == CaseId::LAP_IV) ? std::max(req.tol.balanced, 1e-7) : ptol;
      r.verdict = r.residual <= r.tolerance ? Verdict::PASS : Verdict::FAIL;
    }
    out.cases.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Definiteness scan
// ---------------------------------------------------------------------------

enum class Definiteness { Zero, PSD, PD, NSD, ND, Indefinite };

inline const char* to_string(Definiteness d) {
  switch (d) {
    case Definiteness::Zero: return "zero";
    case Definiteness::PSD: return "PSD";
    case Definiteness::PD: return "PD";
    case Definiteness::NSD: return "NSD";
    case Definiteness::ND: return "ND";
    case Definiteness::Indefinite: return "indefinite";
  }
  return "?";
}

struct DefinitenessVerdict {
  std::string tensor;
  Definiteness classification = Definiteness::Zero;
  double eig_min = 0, eig_max = 0;     // envelope over the grid
  double max_point_min_eig = 0;        // largest over points of the per-point min eigenvalue
  std::uint64_t points = 0;
  std::string disclaimer = "grid-sampled classification, not a proof over all of M";
};

/// Tensor ids: H | k | kappa (alias of k) | kstar | s | t | k_minus_half_t.
inline DefinitenessVerdict definiteness_scan(const ManifoldModel& M,
                                             const std::string& tensor,
                                             int resolution, double zero_tol = 1e-9,
                                             std::uint64_t point_cap = (1ull << 27)) {
  QuadratureGrid grid(M.chart, resolution, point_cap);
  std::uint32_t mask = M.metric.coord_mask() &
                       ((M.chart.n >= 32) ? ~0u : ((1u << M.chart.n) - 1u));
  const std::uint64_t sub_total = grid.masked_size(mask);

  std::vector<int> masked_dims;
  for (int k = 0; k < M.chart.n; ++k)
    if (mask & (1u << k)) {
      masked_dims.push_back(2 * k);
      masked_dims.push_back(2 * k + 1);
    }
  const int res = resolution;

  DefinitenessVerdict v;
  v.tensor = tensor;
  v.points = sub_total;
  bool any = false;
  for (std::uint64_t j = 0; j < sub_total; ++j) {
    std::uint64_t idx = 0, rest = j;
    for (int d : masked_dims) {
      std::uint64_t digit = rest % static_cast<std::uint64_t>(res);
      rest /= static_cast<std::uint64_t>(res);
      std::uint64_t scale = 1;
      for (int dd = 0; dd < d; ++dd) scale *= static_cast<std::uint64_t>(res);
      idx += digit * scale;
    }
    PointGeometry g = compute_geometry(M, grid.point(idx), true);
    Mat q;
    if (tensor == "H") q = g.H;
    else if (tensor == "k" || tensor == "kappa") q = g.k;
    else if (tensor == "kstar") q = g.kstar;
    else if (tensor == "s") q = g.s;
    else if (tensor == "t") q = g.t;
    else if (tensor == "k_minus_half_t") q = g.k - 0.5 * g.t;
    else throw BuildError("unknown tensor id '" + tensor + "'");
    RVec ev = g.invariant_eigenvalues(q);
    double lo = ev.minCoeff(), hi = ev.maxCoeff();
    if (!any) {
      v.eig_min = lo; v.eig_max = hi; v.max_point_min_eig = lo;
      any = true;
    } else {
      v.eig_min = std::min(v.eig_min, lo);
      v.eig_max = std::max(v.eig_max, hi);
      v.max_point_min_eig = std::max(v.max_point_min_eig, lo);
    }
  }
  const double tol = zero_tol;
  if (std::abs(v.eig_min) <= tol && std::abs(v.eig_max) <= tol)
    v.classification = Definiteness::Zero;
  else if (v.eig_min > tol) v.classification = Definiteness::PD;
  else if (v.eig_min >= -tol) v.classification = Definiteness::PSD;
  else if (v.eig_max < -tol) v.classification = Definiteness::ND;
  else if (v.eig_max <= tol) v.classification = Definiteness::NSD;
  else v.classification = Definiteness::Indefinite;
  return v;
}

// ---------------------------------------------------------------------------
// Theorem applicability report
// ---------------------------------------------------------------------------

struct TheoremRecord {
  std::string id;            // e.g. "killing_analytic_i"
  std::string hypothesis;    // human-readable hypothesis summary
  bool applicable = false;
  bool consistent = true;    // no conclusion check failed
  std::vector<std::string> notes;
};

struct TheoremReport {
  std::vector<TheoremRecord> records;
};

/// Checks the vanishing-theorem hypotheses via definiteness scans and, for
/// each supplied field, the implied conclusions. Unmet hypotheses yield
/// non-applicable records, never failures.
inline TheoremReport theorem_report(const ManifoldModel& M, const SuiteResult& suite,
                                    int scan_resolution, const Tolerances& tol) {
  TheoremReport rep;
  const bool balanced = suite.balanced.balanced;
  auto scan = [&](const std::string& t) {
    return definiteness_scan(M, t, scan_resolution, tol.zero);
  };
  DefinitenessVerdict sk = scan("k");
  DefinitenessVerdict sH = scan("H");
  DefinitenessVerdict skt = scan("k_minus_half_t");
  DefinitenessVerdict sks = scan("kstar");
  const double ptol = 100 * tol.pointwise(suite.mode);
  const double itol = 10 * tol.integral_abs;

  {  // Chern form non-positive => every Killing field is analytic
    TheoremRecord r;
    r.id = "killing_analytic";
    bool nsd = sk.classification == Definiteness::Zero ||
               sk.classification == Definiteness::NSD ||
               sk.classification == Definiteness::ND;
    r.hypothesis = std::string("balanced and Chern form non-positive (scan: ") +
                   to_string(sk.classification) + ")";
    r.applicable = balanced && nsd;
    if (r.applicable) {
      for (const auto& v : suite.vectors) {
        if (v.killing(tol.gate_killing13)) {
          bool ok = v.analytic_sup <= std::max(1e-8, ptol) &&
                    v.kquad_sup <= 1e-9 + 10 * tol.zero &&
                    v.deltaJ_sup <= 1e-8;
          r.consistent = r.consistent && ok;
          r.notes.push_back(v.name + ": killing; analytic residual " +
                            std::to_string(v.analytic_sup) + ", |k(xi,xi)| " +
                            std::to_string(v.kquad_sup) + ", |delta(J xi)| " +
                            std::to_string(v.deltaJ_sup) +
                            (ok ? " -- conclusions hold" : " -- MISMATCH"));
        } else {
          r.notes.push_back(v.name + ": not killing (residual " +
                            std::to_string(v.killing_full_sup) + ")");
        }
      }
    }
    rep.records.push_back(std::move(r));
  }
  {  // Chern form negative definite => no Killing fields
    TheoremRecord r;
    r.id = "killing_nonexistence";
    r.hypothesis = std::string("balanced and Chern form negative definite (scan: ") +
                   to_string(sk.classification) + ")";
    r.applicable = balanced && sk.classification == Definiteness::ND;
    if (r.applicable) {
      for (const auto& v : suite.vectors)
        if (v.killing(tol.gate_killing13) && v.comp_sup > 1e-8) {
          r.consistent = false;
          r.notes.push_back(v.name + ": nonzero Killing field contradicts the scan");
        }
    }
    rep.records.push_back(std::move(r));
  }
  {  // affine => analytic (on balanced)
    TheoremRecord r;
    r.id = "affine_analytic";
    r.hypothesis = "balanced";
    r.applicable = balanced;
    if (r.applicable) {
      for (const auto& v : suite.vectors) {
        if (v.affine(1e-8)) {
          bool ok = v.analytic_sup <= std::max(1e-8, ptol);
          r.consistent = r.consistent && ok;
          r.notes.push_back(v.name + ": affine; analytic residual " +
                            std::to_string(v.analytic_sup) +
                            (ok ? " -- holds" : " -- MISMATCH"));
        }
      }
    }
    rep.records.push_back(std::move(r));
  }
  {  // harmonic <-> analytic via the H-integral
    TheoremRecord r;
    r.id = "harmonic_analytic_iff";
    r.hypothesis = "balanced";
    r.applicable = balanced;
    if (r.applicable) {
      for (const auto& f : suite.forms) {
        bool harm = f.harmonic(tol.gate_harmonic);
        bool an = f.analytic(tol.gate_analytic);
        bool hzero = std::abs(f.int_H) <= itol;
        std::string note = f.name + ": harmonic=" + (harm ? "yes" : "no") +
                           ", analytic=" + (an ? "yes" : "no") +
                           ", int H(omega#,omega#) dV = " + std::to_string(f.int_H);
        bool ok = true;
        if (harm && hzero && !an) ok = false;
        if (harm && an && !hzero) ok = false;
        if (an && hzero && !harm) ok = false;
        if (an && !hzero && harm) ok = false;
        if (!ok) { r.consistent = false; note += " -- MISMATCH"; }
        else if ((harm || an) && !hzero) note += " -- iff condition not met";
        else if (harm && an) note += " -- consistent";
        r.notes.push_back(std::move(note));
      }
    }
    rep.records.push_back(std::move(r));
  }
  {  // H PSD => analytic <-> harmonic, with H(omega#,omega#) = 0
    TheoremRecord r;
    r.id = "H_psd_equivalence";
    bool psd = sH.classification == Definiteness::Zero ||
               sH.classification == Definiteness::PSD ||
               sH.classification == Definiteness::PD;
    r.hypothesis = std::string("balanced and H positive semi-definite (scan: ") +
                   to_string(sH.classification) + ")";
    r.applicable = balanced && psd;
    if (r.applicable) {
      for (const auto& f : suite.forms) {
        bool harm = f.harmonic(tol.gate_harmonic);
        bool an = f.analytic(tol.gate_analytic);
        if (harm != an) {
          r.consistent = false;
          r.notes.push_back(f.name + ": harmonic/analytic disagree under PSD H");
        } else if (harm && an) {
          r.notes.push_back(f.name + ": harmonic and analytic, int H = " +
                            std::to_string(f.int_H));
        }
      }
    }
    rep.records.push_back(std::move(r));
  }
  {  // H PD => no harmonic or analytic 1-forms
    TheoremRecord r;
    r.id = "H_pd_nonexistence";
    r.hypothesis = std::string("balanced and H positive definite (scan: ") +
                   to_string(sH.classification) + ")";
    r.applicable = balanced && sH.classification == Definiteness::PD;
    if (r.applicable) {
      for (const auto& f : suite.forms)
        if ((f.harmonic(tol.gate_harmonic) || f.analytic(tol.gate_analytic)) &&
            f.comp_sup > 1e-8) {
          r.consistent = false;
          r.notes.push_back(f.name + ": nonzero harmonic/analytic form contradicts PD H");
        }
    }
    rep.records.push_back(std::move(r));
  }
  {  // k - t/2 PSD => harmonic forms have holomorphic sharp
    TheoremRecord r;
    r.id = "k_half_t_psd";
    bool psd = skt.classification == Definiteness::Zero ||
               skt.classification == Definiteness::PSD ||
               skt.classification == Definiteness::PD;
    r.hypothesis = std::string("balanced and k - t/2 positive semi-definite (scan: ") +
                   to_string(skt.classification) + ")";
    r.applicable = balanced && psd;
    if (r.applicable) {
      for (const auto& f : suite.forms)
        if (f.harmonic(tol.gate_harmonic)) {
          bool ok = f.analytic_sup <= std::max(1e-8, ptol);
          r.consistent = r.consistent && ok;
          r.notes.push_back(f.name + ": harmonic; analytic residual " +
                            std::to_string(f.analytic_sup) +
                            (ok ? " -- sharp is holomorphic" : " -- MISMATCH"));
        }
    }
    rep.records.push_back(std::move(r));
  }
  {  // strict mean-curvature bound (equivalently H PD) => nonexistence
    TheoremRecord r;
    r.id = "strict_mean_curvature_bound";
    r.hypothesis = std::string("balanced and kstar < k - t/2 pointwise (H PD; scan: ") +
                   to_string(sH.classification) + ")";
    r.applicable = balanced && sH.classification == Definiteness::PD;
    if (r.applicable) {
      for (const auto& f : suite.forms)
        if (f.harmonic(tol.gate_harmonic) && f.comp_sup > 1e-8) {
          r.consistent = false;
          r.notes.push_back(f.name + ": nonzero harmonic form contradicts the bound");
        }
    }
    rep.records.push_back(std::move(r));
  }
  {  // H PSD, kstar PSD and PD at one point => no harmonic 1-forms
    TheoremRecord r;
    r.id = "mean_curvature_pd_point";
    bool hpsd = sH.classification == Definiteness::Zero ||
                sH.classification == Definiteness::PSD ||
                sH.classification == Definiteness::PD;
    bool kspsd = sks.classification == Definiteness::Zero ||
                 sks.classification == Definiteness::PSD ||
                 sks.classification == Definiteness::PD;
    bool pd_point = sks.max_point_min_eig > tol.zero;
    r.hypothesis = std::string("balanced, H PSD (") + to_string(sH.classification) +
                   "), kstar PSD (" + to_string(sks.classification) +
                   ") and PD at some grid point (" +
                   (pd_point ? "yes" : "no") + ")";
    r.applicable = balanced && hpsd && kspsd && pd_point;
    if (r.applicable) {
      for (const auto& f : suite.forms)
        if (f.harmonic(tol.gate_harmonic) && f.comp_sup > 1e-8) {
          r.consistent = false;
          r.notes.push_back(f.name + ": nonzero harmonic form contradicts the hypothesis");
        }
    }
    rep.records.push_back(std::move(r));
  }
  return rep;
}

}  // namespace chern
