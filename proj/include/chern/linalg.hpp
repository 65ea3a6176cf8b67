#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace chern {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Deviation of M from being Hermitian, max |M - M^H| entrywise.
inline double hermiticity_residual(const Mat& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Eigenvalues of the Hermitian part of m, ascending.
inline RVec hermitian_eigenvalues(const Mat& m) {
  Mat h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  if (es.info() != Eigen::Success) {
    throw NumericError("hermitian eigensolver failed");
  }
  return es.eigenvalues();
}

/// Smallest eigenvalue of the Hermitian part.
inline double min_eigenvalue(const Mat& m) {
  return hermitian_eigenvalues(m).minCoeff();
}

struct MetricInverse {
  Mat inv;
  double det = 0.0;       // det of the Hermitian matrix, real
  double condition = 0.0; // eigmax / eigmin
};

/// Inverse + determinant of a Hermitian positive definite matrix.
/// Throws NumericError with a condition-number report when singular
/// or not positive definite.
inline MetricInverse invert_hermitian(const Mat& g, double tol = 1e-13) {
  RVec ev = hermitian_eigenvalues(g);
  double lo = ev.minCoeff(), hi = ev.maxCoeff();
  if (!(lo > tol * std::max(1.0, hi))) {
    throw NumericError("metric not positive definite (eigenvalues in [" +
                       std::to_string(lo) + ", " + std::to_string(hi) +
                       "], condition " +
                       std::to_string(lo > 0 ? hi / lo : 0.0) + ")");
  }
  MetricInverse out;
  out.inv = g.inverse();
  out.det = g.determinant().real();
  out.condition = hi / lo;
  return out;
}

/// Columns form a g-unitary frame of (1,0)-vectors: F^T g conj(F) = I.
/// Built from the Cholesky factor of g^T.
inline Mat unitary_frame(const Mat& g) {
  Eigen::LLT<Mat> llt(g.transpose());
  if (llt.info() != Eigen::Success) {
    throw NumericError("Cholesky failed: metric not positive definite");
  }
  Mat l = llt.matrixL();
  return l.adjoint().inverse();
}

/// sum_{ab} v_a conj(v_b) ginv-pairing: squared metric norm of a lowered
/// (1,0)-index object, equals the unitary-frame component sum.
inline double norm2_lower1(const Vec& v, const Mat& ginv) {
  cplx s = 0;
  const int n = static_cast<int>(v.size());
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d) s += ginv(d, b) * v(b) * std::conj(v(d));
  return s.real();
}

/// Squared metric norm of a 2-lower-index tensor X_{ab} (any symmetry),
/// both indices of unbarred (1,0) type: unitary-frame component sum.
inline double norm2_lower2(const Mat& x, const Mat& ginv) {
  // sum X_{ab} conj(X_{cd}) ginv(c,a) ginv(d,b)
  cplx s = 0;
  const int n = static_cast<int>(x.rows());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          s += x(a, b) * std::conj(x(c, d)) * ginv(c, a) * ginv(d, b);
  return s.real();
}

/// Squared metric norm of a mixed tensor X_{a b̄} (first index (1,0),
/// second (0,1)): unitary-frame component sum.
inline double norm2_mixed2(const Mat& x, const Mat& ginv) {
  // sum X_{ab̄} conj(X_{cd̄}) ginv(c,a) ginv(b,d)
  cplx s = 0;
  const int n = static_cast<int>(x.rows());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          s += x(a, b) * std::conj(x(c, d)) * ginv(c, a) * ginv(b, d);
  return s.real();
}

/// Hermitian quadratic form Q(X,X) = Q_{ab̄} u^a conj(u^b) for (1,0)
/// components u. Real part returned (imaginary part is round-off for
/// Hermitian Q).
inline double quad_form(const Mat& q, const Vec& u) {
  cplx s = 0;
  const int n = static_cast<int>(u.size());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) s += q(a, b) * u(a) * std::conj(u(b));
  return s.real();
}

/// Same contraction kept complex (used for possibly non-Hermitian s).
inline cplx quad_form_c(const Mat& q, const Vec& u) {
  cplx s = 0;
  const int n = static_cast<int>(u.size());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) s += q(a, b) * u(a) * std::conj(u(b));
  return s;
}

}  // namespace chern
