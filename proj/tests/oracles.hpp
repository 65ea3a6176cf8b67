// Test-only oracles, independent of the library's computation paths:
//  - plain central-difference Wirtinger derivatives of opaque scalars,
//  - real-coordinate Levi-Civita machinery (FD) for the codifferential of
//    the Kaehler form and for Lie derivatives of the metric,
//  - literal real-orthonormal-frame trace sums for the Ricci-type tensors,
//  - the torsion Gram sum over an explicit unitary frame,
//  - 1-D midpoint quadrature reference,
//  - a seeded random expression generator.
#pragma once

#include <functional>
#include <random>
#include <vector>

#include "chern/chern.hpp"

namespace oracle {

using chern::cplx;
using chern::CPoint;
using chern::Mat;
using chern::PointGeometry;
using chern::Vec;

using RealFn = std::function<double(const std::vector<double>&)>;
using CFn = std::function<cplx(const std::vector<cplx>&)>;

// -- independent Wirtinger finite differences --------------------------------

inline cplx wirtinger_fd(const CFn& f, const CPoint& p, int k, bool barred,
                         double h = 1e-5) {
  auto shift = [&](cplx dz) {
    CPoint q = p;
    q[static_cast<std::size_t>(k)] += dz;
    return f(q);
  };
  cplx dx = (shift(cplx(h, 0)) - shift(cplx(-h, 0))) / (2 * h);
  cplx dy = (shift(cplx(0, h)) - shift(cplx(0, -h))) / (2 * h);
  return barred ? 0.5 * (dx + cplx(0, 1) * dy) : 0.5 * (dx - cplx(0, 1) * dy);
}

// -- real-coordinate Levi-Civita machinery ------------------------------------

/// Real metric matrix (2n x 2n) from the complex-index matrix G(a,b) = g_{a b̄}.
/// Real dims ordered x1,y1,x2,y2,...
inline Eigen::MatrixXd real_metric(const Mat& G) {
  const int n = static_cast<int>(G.rows());
  Eigen::MatrixXd g(2 * n, 2 * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double re = G(a, b).real(), im = G(a, b).imag();
      g(2 * a, 2 * b) = 2 * re;
      g(2 * a + 1, 2 * b + 1) = 2 * re;
      g(2 * a, 2 * b + 1) = 2 * im;
      g(2 * a + 1, 2 * b) = -2 * im;
    }
  return g;
}

inline Eigen::MatrixXd complex_structure(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int a = 0; a < n; ++a) {
    J(2 * a + 1, 2 * a) = 1;   // J dx_a = dy_a direction
    J(2 * a, 2 * a + 1) = -1;  // J dy_a = -dx_a
  }
  return J;
}

inline CPoint to_complex(const std::vector<double>& x) {
  CPoint p(x.size() / 2);
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = cplx(x[2 * k], x[2 * k + 1]);
  return p;
}

inline std::vector<double> to_real(const CPoint& p) {
  std::vector<double> x(2 * p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    x[2 * k] = p[k].real();
    x[2 * k + 1] = p[k].imag();
  }
  return x;
}

/// theta = -(delta Omega) o J computed entirely through real coordinates,
/// finite differences and Levi-Civita Christoffel symbols. Returns the
/// (1,0) components.
inline Vec lee_form_fd(const chern::ManifoldModel& m, const CPoint& p0,
                       double h = 1e-5) {
  const int n = m.chart.n;
  const int d = 2 * n;
  auto gmat = [&](const std::vector<double>& x) {
    return real_metric(m.metric.value(to_complex(x)));
  };
  std::vector<double> x0 = to_real(p0);

  Eigen::MatrixXd g0 = gmat(x0);
  Eigen::MatrixXd ginv = g0.inverse();
  Eigen::MatrixXd J = complex_structure(n);

  // dg[i](j,k) = d g_{jk} / d x_i
  std::vector<Eigen::MatrixXd> dg(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    std::vector<double> xp = x0, xm = x0;
    xp[static_cast<std::size_t>(i)] += h;
    xm[static_cast<std::size_t>(i)] -= h;
    dg[static_cast<std::size_t>(i)] = (gmat(xp) - gmat(xm)) / (2 * h);
  }
  // Levi-Civita Christoffels
  std::vector<Eigen::MatrixXd> Gam(static_cast<std::size_t>(d),
                                   Eigen::MatrixXd::Zero(d, d));  // Gam[k](i,j)
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double s = 0;
        for (int l = 0; l < d; ++l)
          s += ginv(k, l) * (dg[static_cast<std::size_t>(i)](l, j) +
                             dg[static_cast<std::size_t>(j)](l, i) -
                             dg[static_cast<std::size_t>(l)](i, j));
        Gam[static_cast<std::size_t>(k)](i, j) = 0.5 * s;
      }
  // Omega_{ij} = g(J e_i, e_j) and its FD derivatives
  auto omega = [&](const std::vector<double>& x) {
    Eigen::MatrixXd g = gmat(x);
    return Eigen::MatrixXd(J.transpose() * g);
  };
  Eigen::MatrixXd Om0 = omega(x0);
  std::vector<Eigen::MatrixXd> dOm(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    std::vector<double> xp = x0, xm = x0;
    xp[static_cast<std::size_t>(i)] += h;
    xm[static_cast<std::size_t>(i)] -= h;
    dOm[static_cast<std::size_t>(i)] = (omega(xp) - omega(xm)) / (2 * h);
  }
  // (delta Omega)_k = - g^{ij} (nabla_i Omega)_{jk}
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(d);
  for (int k = 0; k < d; ++k) {
    double s = 0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double nab = dOm[static_cast<std::size_t>(i)](j, k);
        for (int mm = 0; mm < d; ++mm)
          nab -= Gam[static_cast<std::size_t>(mm)](i, j) * Om0(mm, k) +
                 Gam[static_cast<std::size_t>(mm)](i, k) * Om0(j, mm);
        s += ginv(i, j) * nab;
      }
    delta(k) = -s;
  }
  // theta_i = -(delta Omega)(J e_i)
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < d; ++i) {
    double s = 0;
    for (int k = 0; k < d; ++k) s += delta(k) * J(k, i);
    theta(i) = -s;
  }
  // (1,0) components: theta_a = (theta_x - i theta_y)/2
  Vec out(n);
  for (int a = 0; a < n; ++a)
    out(a) = 0.5 * cplx(theta(2 * a), -theta(2 * a + 1));
  return out;
}

/// Lie derivative of the real metric along a real field with (1,0)
/// components given by an evaluator: (L_xi g)_{ij}, all by finite
/// differences. Independent Killing oracle.
inline Eigen::MatrixXd lie_metric_fd(const chern::ManifoldModel& m,
                                     const chern::FieldComponents& comps,
                                     const CPoint& p0, double h = 1e-5) {
  const int n = m.chart.n;
  const int d = 2 * n;
  auto gmat = [&](const std::vector<double>& x) {
    return real_metric(m.metric.value(to_complex(x)));
  };
  auto xi = [&](const std::vector<double>& x) {
    chern::FieldJet j = comps.jet(to_complex(x), false);
    Eigen::VectorXd v(d);
    for (int a = 0; a < n; ++a) {
      v(2 * a) = j.comp(a).real();
      v(2 * a + 1) = j.comp(a).imag();
    }
    return v;
  };
  std::vector<double> x0 = to_real(p0);
  Eigen::MatrixXd g0 = gmat(x0);
  Eigen::VectorXd xi0 = xi(x0);

  std::vector<Eigen::MatrixXd> dg(static_cast<std::size_t>(d));
  std::vector<Eigen::VectorXd> dxi(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    std::vector<double> xp = x0, xm = x0;
    xp[static_cast<std::size_t>(i)] += h;
    xm[static_cast<std::size_t>(i)] -= h;
    dg[static_cast<std::size_t>(i)] = (gmat(xp) - gmat(xm)) / (2 * h);
    dxi[static_cast<std::size_t>(i)] = (xi(xp) - xi(xm)) / (2 * h);
  }
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double s = 0;
      for (int k = 0; k < d; ++k)
        s += xi0(k) * dg[static_cast<std::size_t>(k)](i, j) +
             g0(k, j) * dxi[static_cast<std::size_t>(i)](k) +
             g0(i, k) * dxi[static_cast<std::size_t>(j)](k);
      L(i, j) = s;
    }
  return L;
}

// -- literal frame-sum traces -------------------------------------------------

/// K(X,Y) restricted to T^{1,0} for real X, Y given by their (1,0)
/// components; matrix M(l,gamma) so that K(X,Y) d_gamma = M(l,gamma) d_l.
inline Mat curvature_operator(const PointGeometry& g, const Vec& x, const Vec& y) {
  const int n = g.n;
  Mat M = Mat::Zero(n, n);
  for (int mu = 0; mu < n; ++mu)
    for (int nu = 0; nu < n; ++nu) {
      cplx c = x(mu) * std::conj(y(nu)) - y(mu) * std::conj(x(nu));
      if (c == cplx(0.0)) continue;
      // R_{mu nubar}^l_gamma = sum_d R[mu][nu](gamma,d) Ginv(d,l)
      for (int ga = 0; ga < n; ++ga)
        for (int l = 0; l < n; ++l) {
          cplx r = 0;
          for (int dd = 0; dd < n; ++dd)
            r += g.R[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)](ga, dd) *
                 g.Ginv(dd, l);
          M(l, ga) += c * r;
        }
    }
  return M;
}

/// Real orthonormal basis from the Cholesky unitary frame: 2n vectors given
/// by their (1,0) components.
inline std::vector<Vec> real_basis(const PointGeometry& g) {
  Mat F = g.unitary_frame_matrix();
  std::vector<Vec> e;
  const double s = 1.0 / std::sqrt(2.0);
  for (int a = 0; a < g.n; ++a) {
    e.push_back(s * F.col(a));
    e.push_back(cplx(0, 1) * s * F.col(a));
  }
  return e;
}

/// g(P + conj(P), Q + conj(Q)) for (1,0) parts P, Q.
inline double g_real(const PointGeometry& g, const Vec& P, const Vec& Q) {
  cplx s = 0;
  for (int a = 0; a < g.n; ++a)
    for (int b = 0; b < g.n; ++b) s += g.G(a, b) * P(a) * std::conj(Q(b));
  return 2 * s.real();
}

/// k(X,Y) = -1/2 sum_j g(K(X,JY) e_j, J e_j) as a literal sum.
inline double k_frame_sum(const PointGeometry& g, const Vec& x, const Vec& y) {
  Mat A = curvature_operator(g, x, cplx(0, 1) * y);  // K(X, JY)
  double total = 0;
  for (const Vec& u : real_basis(g))
    total += g_real(g, A * u, cplx(0, 1) * u);
  return -0.5 * total;
}

/// k*(X,Y) = -1/2 sum_j g(K(e_j, J e_j) X, JY).
inline double kstar_frame_sum(const PointGeometry& g, const Vec& x, const Vec& y) {
  const int n = g.n;
  Mat P = Mat::Zero(n, n);
  for (const Vec& u : real_basis(g)) P += curvature_operator(g, u, cplx(0, 1) * u);
  // K(e_j, J e_j) applied to the real vector X then paired with JY
  double total = 0;
  (void)n;
  total = g_real(g, P * x, cplx(0, 1) * y);
  return -0.5 * total;
}

/// s(X,Y) = sum_j g(K(e_j, X) Y, e_j).
inline double s_frame_sum(const PointGeometry& g, const Vec& x, const Vec& y) {
  double total = 0;
  for (const Vec& u : real_basis(g)) {
    Mat A = curvature_operator(g, u, x);
    total += g_real(g, A * y, u);
  }
  return total;
}

/// t(X,Y) = sum_{a,b} g(T(E_a,E_b), X) g(T(Ebar_a,Ebar_b), Y) as a literal
/// unitary-frame sum (any g-unitary frame).
inline double t_frame_sum(const PointGeometry& g, const Vec& x, const Vec& y) {
  const int n = g.n;
  Mat F = g.unitary_frame_matrix();
  cplx total = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      // W^l = F(mu,a) F(nu,b) T^l_{mu nu}
      Vec W = Vec::Zero(n);
      for (int l = 0; l < n; ++l) {
        cplx w = 0;
        for (int mu = 0; mu < n; ++mu)
          for (int nu = 0; nu < n; ++nu)
            w += F(mu, a) * F(nu, b) * g.Tup[static_cast<std::size_t>(l)](mu, nu);
        W(l) = w;
      }
      // g(W, conj-part of X) * conj(g(W, conj-part of Y))
      cplx gx = 0, gy = 0;
      for (int l = 0; l < n; ++l)
        for (int ss = 0; ss < n; ++ss) {
          gx += g.G(l, ss) * W(l) * std::conj(x(ss));
          gy += g.G(l, ss) * W(l) * std::conj(y(ss));
        }
      total += gx * std::conj(gy);
    }
  return total.real();
}

// -- quadrature reference -----------------------------------------------------

inline double midpoint_1d(const std::function<double(double)>& f, int nsteps,
                          double lo = 0.0, double hi = 1.0) {
  double s = 0, dh = (hi - lo) / nsteps;
  for (int i = 0; i < nsteps; ++i) s += f(lo + (i + 0.5) * dh);
  return s * dh;
}

// -- random expressions -------------------------------------------------------

inline chern::Expr random_expr(std::mt19937_64& rng, int n, int depth) {
  using chern::Expr;
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 3 : 11);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  std::uniform_int_distribution<int> coord(0, n - 1);
  switch (pick(rng)) {
    case 0: return Expr::constant(cplx(val(rng), val(rng)));
    case 1: return Expr::coord(coord(rng));
    case 2: return Expr::coord_conj(coord(rng));
    case 3: return Expr::constant(val(rng));
    case 4: return random_expr(rng, n, depth - 1) + random_expr(rng, n, depth - 1);
    case 5: return random_expr(rng, n, depth - 1) - random_expr(rng, n, depth - 1);
    case 6: return random_expr(rng, n, depth - 1) * random_expr(rng, n, depth - 1);
    case 7:  // division kept away from zeros
      return random_expr(rng, n, depth - 1) /
             (Expr::constant(2.0) + Expr::abs2(random_expr(rng, n, depth - 1)));
    case 8: return Expr::conj(random_expr(rng, n, depth - 1));
    case 9: return Expr::sin(random_expr(rng, n, depth - 1));
    case 10: return Expr::cos(random_expr(rng, n, depth - 1));
    default: return Expr::exp(Expr::constant(0.3) * random_expr(rng, n, depth - 1));
  }
}

inline CPoint random_point(std::mt19937_64& rng, const chern::ChartSpec& chart) {
  std::uniform_real_distribution<double> u(0.05, 0.95);
  CPoint p(static_cast<std::size_t>(chart.n));
  for (int k = 0; k < chart.n; ++k) {
    int dx = 2 * k, dy = 2 * k + 1;
    p[static_cast<std::size_t>(k)] =
        cplx(chart.box[dx][0] + u(rng) * chart.length(dx),
             chart.box[dy][0] + u(rng) * chart.length(dy));
  }
  return p;
}

}  // namespace oracle
