#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "chern/fields.hpp"
#include "chern/geometry.hpp"
#include "oracles.hpp"

using namespace chern;

TEST_CASE("musical isomorphisms round-trip", "[fields]") {
  std::mt19937_64 rng(40);
  std::uniform_real_distribution<double> amp(-1, 1);
  for (auto mk : {+[]() { return builtins::iwasawa(); },
                  +[]() { return builtins::conformal_torus(0.1); }}) {
    ManifoldModel m = mk();
    for (int trial = 0; trial < 10; ++trial) {
      CPoint p = oracle::random_point(rng, m.chart);
      PointGeometry g = compute_geometry(m, p, false);
      const int n = g.n;
      Vec w(n);
      for (int a = 0; a < n; ++a) w(a) = cplx(amp(rng), amp(rng));
      // sharp then flat
      Vec up = g.Ginv.transpose() * w.conjugate();
      Vec back = g.G * up.conjugate();
      CHECK((back - w).cwiseAbs().maxCoeff() < 1e-12);
      // flat then sharp for a vector
      Vec low = g.G * w.conjugate();
      Vec up2 = g.Ginv.transpose() * low.conjugate();
      CHECK((up2 - w).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("analytic residuals of named fields", "[fields]") {
  std::mt19937_64 rng(41);
  {  // dz1 + dz1bar on the flat torus is analytic
    auto m = builtins::flat_torus(2);
    auto f = fieldlib::builtin_field(m, "dz1");
    CPoint p = oracle::random_point(rng, m.chart);
    FormBlocks b = form_blocks(compute_geometry(m, p), f.comps.jet(p));
    CHECK(norm2_mixed2(b.Bmix, Mat::Identity(2, 2)) < 1e-28);
  }
  {  // the real part of phi3 on iwasawa is analytic (coframe is parallel)
    auto m = builtins::iwasawa();
    auto f = fieldlib::builtin_field(m, "phi3");
    CPoint p = oracle::random_point(rng, m.chart);
    PointGeometry g = compute_geometry(m, p);
    FormBlocks b = form_blocks(g, f.comps.jet(p));
    CHECK(std::sqrt(norm2_mixed2(b.Bmix, g.Ginv)) < 1e-10);
  }
  {  // w = cos(2 pi x1) dz1bar + conj is not analytic; the defining block
     // is the symbolic derivative of the coefficient
    auto m = builtins::flat_torus(2);
    Expr c = Expr::cos(Expr::constant(2 * std::numbers::pi) *
                       (Expr::coord(0) + Expr::coord_conj(0)) * Expr::constant(0.5));
    // real form with (0,1)-part c dz1bar: its (1,0)-components are conj(c) e1
    std::vector<Expr> comps = {Expr::conj(c), Expr::constant(0.0)};
    Field f;
    f.kind = FieldKind::OneForm;
    f.comps = FieldComponents::symbolic(2, comps);
    CPoint p = oracle::random_point(rng, m.chart);
    PointGeometry g = compute_geometry(m, p);
    FormBlocks b = form_blocks(g, f.comps.jet(p));
    // D_1 w_1bar = d_1 c (c real)
    cplx expect = c.diff(0, false).eval(p, {});
    CHECK(std::abs(b.Bmix(0, 0) - expect) < 1e-13);
    CHECK(std::abs(b.Bmix(0, 0)) > 1e-3);  // generically nonzero
  }
}

TEST_CASE("harmonic residuals of named fields", "[fields]") {
  std::mt19937_64 rng(42);
  {  // dx1 on the flat torus is harmonic
    auto m = builtins::flat_torus(2);
    auto f = fieldlib::builtin_field(m, "dx1");
    CPoint p = oracle::random_point(rng, m.chart);
    PointGeometry g = compute_geometry(m, p);
    FormBlocks b = form_blocks(g, f.comps.jet(p));
    CHECK(b.Aprime.cwiseAbs().maxCoeff() < 1e-14);
    CHECK((b.Bmix - b.Dbar.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(std::abs(b.delta) < 1e-14);
  }
  auto m = builtins::iwasawa();
  CPoint p = oracle::random_point(rng, m.chart);
  PointGeometry g = compute_geometry(m, p);
  {  // Re phi1 is harmonic (dphi1 = 0, coframe parallel)
    auto f = fieldlib::builtin_field(m, "phi1");
    FormBlocks b = form_blocks(g, f.comps.jet(p));
    CHECK(std::sqrt(norm2_lower2(b.Aprime, g.Ginv)) < 1e-10);
    CHECK(std::abs(b.delta) < 1e-10);
  }
  {  // Re phi3: the (2,0) closedness block equals the structure constants,
     // while the (1,1) block and delta vanish
    auto f = fieldlib::builtin_field(m, "phi3");
    FormBlocks b = form_blocks(g, f.comps.jet(p));
    double c20 = std::sqrt(norm2_lower2(b.Aprime, g.Ginv));
    CHECK(std::abs(c20 - std::sqrt(2.0)) < 1e-10);  // entries +-1 in the frame
    Mat m43 = b.Bmix - b.Dbar.transpose();
    CHECK(m43.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(b.delta) < 1e-10);
    CHECK(std::abs(b.delta_J) < 1e-10);
  }
}

TEST_CASE("Killing residuals against the Lie-derivative oracle", "[fields]") {
  std::mt19937_64 rng(43);
  for (auto mk : {+[]() { return builtins::iwasawa(); },
                  +[]() { return builtins::conformal_torus(0.1); }}) {
    ManifoldModel m = mk();
    const int n = m.chart.n;
    Field f = fieldlib::random_trig_field(m, FieldKind::VectorField, 1, 999);
    for (int trial = 0; trial < 3; ++trial) {
      CPoint p = oracle::random_point(rng, m.chart);
      PointGeometry g = compute_geometry(m, p);
      VectorBlocks b = vector_blocks(g, f.comps.jet(p));
      Mat k20 = killing_block_20(b);
      Mat k11 = killing_block_11(g, b);
      // assemble the real-coordinate matrix from the complex blocks:
      // L(X,Y) = 2 Re[K20(a,b) U^a V^b] + 2 Re[K11(a,b) U^a conj(V^b)]
      auto dict = [&](int i) {
        Vec u = Vec::Zero(n);
        u(i / 2) = (i % 2 == 0) ? cplx(1, 0) : cplx(0, 1);
        return u;
      };
      Eigen::MatrixXd L_blocks(2 * n, 2 * n);
      for (int i = 0; i < 2 * n; ++i)
        for (int j = 0; j < 2 * n; ++j) {
          Vec u = dict(i), v = dict(j);
          cplx s20 = 0, s11 = 0;
          for (int a = 0; a < n; ++a)
            for (int c = 0; c < n; ++c) {
              s20 += k20(a, c) * u(a) * v(c);
              s11 += k11(a, c) * u(a) * std::conj(v(c));
            }
          L_blocks(i, j) = 2 * s20.real() + 2 * s11.real();
        }
      Eigen::MatrixXd L_fd = oracle::lie_metric_fd(m, f.comps, p);
      CHECK((L_blocks - L_fd).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("Killing fields: constants on flat, Re E3 on iwasawa", "[fields]") {
  std::mt19937_64 rng(44);
  {
    auto m = builtins::flat_torus(2);
    auto f = fieldlib::builtin_field(m, "ddz1");
    CPoint p = oracle::random_point(rng, m.chart);
    PointGeometry g = compute_geometry(m, p);
    VectorBlocks b = vector_blocks(g, f.comps.jet(p));
    CHECK(killing_block_20(b).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(killing_block_11(g, b).cwiseAbs().maxCoeff() < 1e-14);
  }
  {
    auto m = builtins::iwasawa();
    auto f = fieldlib::builtin_field(m, "E3");
    CPoint p = oracle::random_point(rng, m.chart);
    PointGeometry g = compute_geometry(m, p);
    VectorBlocks b = vector_blocks(g, f.comps.jet(p));
    CHECK(killing_block_20(b).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(killing_block_11(g, b).cwiseAbs().maxCoeff() < 1e-9);
    // the central flow preserves the metric; E3 is also D-parallel
    CHECK(b.A.cwiseAbs().maxCoeff() < 1e-12);
  }
  {  // generic field on the conformal torus is not Killing
    auto m = builtins::conformal_torus(0.1);
    Expr c = Expr::cos(Expr::constant(2 * std::numbers::pi) *
                       (Expr::coord(0) + Expr::coord_conj(0)) * Expr::constant(0.5));
    std::vector<Expr> comps = {c, Expr::constant(0.0)};
    Field f;
    f.kind = FieldKind::VectorField;
    f.comps = FieldComponents::symbolic(2, comps);
    CPoint p = {cplx(0.17, 0.31), cplx(0.55, 0.78)};
    PointGeometry g = compute_geometry(m, p);
    VectorBlocks b = vector_blocks(g, f.comps.jet(p));
    double res = std::max(killing_block_20(b).cwiseAbs().maxCoeff(),
                          killing_block_11(g, b).cwiseAbs().maxCoeff());
    CHECK(res > 1e-2);
  }
}

TEST_CASE("full Killing residual dominates the holomorphic block", "[fields]") {
  std::mt19937_64 rng(45);
  auto m = builtins::iwasawa();
  for (int s = 0; s < 5; ++s) {
    Field f = fieldlib::random_trig_field(m, FieldKind::VectorField, 1, 500 + s);
    CPoint p = oracle::random_point(rng, m.chart);
    PointGeometry g = compute_geometry(m, p);
    VectorBlocks b = vector_blocks(g, f.comps.jet(p));
    double s20 = std::sqrt(norm2_lower2(killing_block_20(b), g.Ginv));
    double full = std::max(
        s20, std::sqrt(norm2_mixed2(killing_block_11(g, b), g.Ginv)));
    CHECK(s20 <= full + 1e-15);
  }
}

TEST_CASE("Lie derivative of the connection", "[fields]") {
  std::mt19937_64 rng(46);
  {  // constants on flat: all blocks vanish
    auto m = builtins::flat_torus(2);
    auto f = fieldlib::builtin_field(m, "ddz1");
    CPoint p = oracle::random_point(rng, m.chart);
    PointGeometry g = compute_geometry(m, p);
    FieldJet j = f.comps.jet(p);
    for (auto& blk : lie_connection_mixed(g, j)) CHECK(blk.cwiseAbs().maxCoeff() < 1e-14);
    for (auto& blk : lie_connection_conj(g, j)) CHECK(blk.cwiseAbs().maxCoeff() < 1e-14);
    for (auto& blk : lie_connection_20(g, j)) CHECK(blk.cwiseAbs().maxCoeff() < 1e-14);
  }
  {  // Re E3 on iwasawa is affine (invariant frame field)
    auto m = builtins::iwasawa();
    auto f = fieldlib::builtin_field(m, "E3");
    CPoint p = oracle::random_point(rng, m.chart);
    PointGeometry g = compute_geometry(m, p);
    FieldJet j = f.comps.jet(p);
    for (auto& blk : lie_connection_mixed(g, j)) CHECK(blk.cwiseAbs().maxCoeff() < 1e-10);
    for (auto& blk : lie_connection_conj(g, j)) CHECK(blk.cwiseAbs().maxCoeff() < 1e-10);
    for (auto& blk : lie_connection_20(g, j)) CHECK(blk.cwiseAbs().maxCoeff() < 1e-10);
  }
  {  // quadratic coefficients on flat: the mixed block equals the symbolic
     // second derivative
    auto m = builtins::flat_torus(2);
    Expr x1 = (Expr::coord(0) + Expr::coord_conj(0)) * Expr::constant(0.5);
    Expr comp = Expr::sin(Expr::constant(2 * std::numbers::pi) * x1) *
                Expr::sin(Expr::constant(2 * std::numbers::pi) * x1);
    std::vector<Expr> comps = {comp, Expr::constant(0.0)};
    Field f;
    f.kind = FieldKind::VectorField;
    f.comps = FieldComponents::symbolic(2, comps);
    CPoint p = oracle::random_point(rng, m.chart);
    PointGeometry g = compute_geometry(m, p);
    FieldJet j = f.comps.jet(p);
    auto lm = lie_connection_mixed(g, j);
    cplx expect = comp.diff(0, false).diff(0, true).eval(p, {});
    CHECK(std::abs(lm[0](0, 0) - expect) < 1e-12);
    CHECK(std::abs(expect) > 1e-3);
  }
}

TEST_CASE("analytic coincides with complex-Hermitian on balanced builtins",
          "[fields]") {
  // 20 random trig fields: both residuals bounded away from zero together;
  // invariant/analytic fields: both near zero
  const double tau = 1e-8, tau2 = 1e-6;
  std::mt19937_64 rng(47);
  for (auto mk : {+[]() { return builtins::iwasawa(); },
                  +[]() { return builtins::flat_torus(2); }}) {
    ManifoldModel m = mk();
    for (int s = 0; s < 10; ++s) {
      Field f = fieldlib::random_trig_field(m, FieldKind::VectorField, 1, 7000 + s);
      double an = 0, ch = 0;
      for (int trial = 0; trial < 3; ++trial) {
        CPoint p = oracle::random_point(rng, m.chart);
        PointGeometry g = compute_geometry(m, p);
        FieldJet j = f.comps.jet(p);
        VectorBlocks b = vector_blocks(g, j);
        an = std::max(an, std::sqrt(norm2_lower2(b.A, g.Ginv)));
        for (auto& blk : lie_connection_mixed(g, j))
          ch = std::max(ch, blk.cwiseAbs().maxCoeff());
        for (auto& blk : lie_connection_conj(g, j))
          ch = std::max(ch, blk.cwiseAbs().maxCoeff());
      }
      bool both_small = an <= tau && ch <= tau2;
      bool both_far = an > 10 * tau && ch > 10 * tau2;
      CHECK((both_small || both_far));
    }
    // analytic side: holomorphic-coefficient fields (constants and frames)
    std::vector<Field> analytic_fields;
    if (m.name == "iwasawa") {
      analytic_fields.push_back(fieldlib::builtin_field(m, "E1"));
      analytic_fields.push_back(fieldlib::builtin_field(m, "E2"));
      analytic_fields.push_back(fieldlib::builtin_field(m, "E3"));
    } else {
      analytic_fields.push_back(fieldlib::builtin_field(m, "ddz1"));
    }
    for (const auto& f : analytic_fields) {
      CPoint p = oracle::random_point(rng, m.chart);
      PointGeometry g = compute_geometry(m, p);
      FieldJet j = f.comps.jet(p);
      VectorBlocks b = vector_blocks(g, j);
      CHECK(std::sqrt(norm2_lower2(b.A, g.Ginv)) <= tau);
      for (auto& blk : lie_connection_mixed(g, j))
        CHECK(blk.cwiseAbs().maxCoeff() <= tau2);
      for (auto& blk : lie_connection_conj(g, j))
        CHECK(blk.cwiseAbs().maxCoeff() <= tau2);
    }
  }
}

TEST_CASE("field jets: symbolic vs finite differences", "[fields]") {
  auto m = builtins::iwasawa();
  Field f = fieldlib::random_trig_field(m, FieldKind::OneForm, 1, 321);
  FieldComponents fd_comps = f.comps;
  fd_comps.set_mode(DerivMode::FiniteDifference);
  std::mt19937_64 rng(48);
  for (int trial = 0; trial < 3; ++trial) {
    CPoint p = oracle::random_point(rng, m.chart);
    FieldJet a = f.comps.jet(p);
    FieldJet b = fd_comps.jet(p);
    CHECK((a.comp - b.comp).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((a.d - b.d).cwiseAbs().maxCoeff() < 1e-7);
    CHECK((a.dbar - b.dbar).cwiseAbs().maxCoeff() < 1e-7);
    for (int c = 0; c < 3; ++c) {
      CHECK((a.dd_mix[static_cast<std::size_t>(c)] - b.dd_mix[static_cast<std::size_t>(c)])
                .cwiseAbs().maxCoeff() < 1e-5);
      CHECK((a.dd_holo[static_cast<std::size_t>(c)] - b.dd_holo[static_cast<std::size_t>(c)])
                .cwiseAbs().maxCoeff() < 1e-5);
    }
  }
}

TEST_CASE("random trig fields are reproducible from the seed", "[fields]") {
  auto m = builtins::iwasawa();
  Field a = fieldlib::random_trig_field(m, FieldKind::OneForm, 2, 42);
  Field b = fieldlib::random_trig_field(m, FieldKind::OneForm, 2, 42);
  Field c = fieldlib::random_trig_field(m, FieldKind::OneForm, 2, 43);
  CPoint p = {cplx(0.3, 0.6), cplx(0.9, 0.2), cplx(0.4, 0.8)};
  FieldJet ja = a.comps.jet(p), jb = b.comps.jet(p), jc = c.comps.jet(p);
  CHECK((ja.comp - jb.comp).cwiseAbs().maxCoeff() == 0.0);
  CHECK((ja.comp - jc.comp).cwiseAbs().maxCoeff() > 1e-3);
  CHECK(a.seed == 42);
  // iwasawa random fields must not depend on the center coordinate
  CPoint q = p;
  q[2] += cplx(0.17, -0.23);
  FieldJet jq = a.comps.jet(q);
  CHECK((ja.comp - jq.comp).cwiseAbs().maxCoeff() == 0.0);
}
