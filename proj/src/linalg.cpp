#include "reskit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "reskit/errors.hpp"

namespace reskit {

void check_square(const Matrix& A, const char* name) {
  if (A.rows() != A.cols()) {
    std::ostringstream os;
    os << name << " must be square, got " << A.rows() << "x" << A.cols();
    throw DimensionError(os.str());
  }
}

double Spectrum::max_real_part() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& l : eigenvalues) m = std::max(m, l.real());
  return m;
}

Matrix column_space(const Matrix& M, double tol) {
  if (M.cols() == 0 || M.rows() == 0) return Matrix(M.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return Matrix(M.rows(), 0);
  int r = 0;
  while (r < s.size() && s(r) > tol * s(0)) ++r;
  return svd.matrixU().leftCols(r);
}

Matrix null_space(const Matrix& M, double tol) {
  const Eigen::Index n = M.cols();
  if (M.rows() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double top = s.size() ? s(0) : 0.0;
  int r = 0;
  while (r < s.size() && top > 0.0 && s(r) > tol * top) ++r;
  return svd.matrixV().rightCols(n - r);
}

int numerical_rank(const Matrix& M, double tol) { return static_cast<int>(column_space(M, tol).cols()); }

Spectrum eigen_spectrum(const Matrix& A, const Tolerances& tol) {
  check_square(A, "A");
  const Eigen::Index n = A.rows();
  Spectrum out;
  if (n == 0) return out;
  if (!A.allFinite()) throw NumericalError("eigen_spectrum: A has non-finite entries", 0);

  Eigen::EigenSolver<Matrix> es(A, false);
  if (es.info() != Eigen::Success)
    throw NumericalError("eigen_spectrum: QR iteration did not converge", es.getMaxIterations() * n);
  for (Eigen::Index i = 0; i < n; ++i) out.eigenvalues.push_back(es.eigenvalues()(i));
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });

  // Cluster the real eigenvalues; a defective eigenvalue comes back split by
  // roughly sqrt(eps) so the grouping threshold is much looser than tol.imag.
  std::vector<double> reals;
  for (const auto& l : out.eigenvalues)
    if (std::abs(l.imag()) <= tol.imag * std::max(1.0, std::abs(l))) reals.push_back(l.real());
  const double scale = std::max(A.norm(), 1e-300);
  std::size_t i = 0;
  while (i < reals.size()) {
    std::size_t j = i + 1;
    while (j < reals.size() && reals[j] - reals[j - 1] <= 1e-6 * std::max(1.0, std::abs(reals[j])) + 1e-7 * scale)
      ++j;
    double mean = 0.0;
    for (std::size_t k = i; k < j; ++k) mean += reals[k];
    mean /= static_cast<double>(j - i);

    const Matrix shifted = A.transpose() - mean * Matrix::Identity(n, n);
    Eigen::JacobiSVD<Matrix> svd(shifted, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Eigen::Index k = 0;  // number of singular values treated as zero
    for (Eigen::Index q = n - 1; q >= 0; --q)
      if (s(q) <= 1e-7 * scale) ++k;
    k = std::clamp<Eigen::Index>(k, 1, static_cast<Eigen::Index>(j - i));
    for (Eigen::Index q = 0; q < k; ++q) {
      Vector v = svd.matrixV().col(n - 1 - q);
      v.normalize();
      out.real_eigenvectors.push_back({mean, v});
    }
    i = j;
  }
  return out;
}

bool is_hurwitz(const Matrix& A, double tol) {
  const auto s = eigen_spectrum(A);
  return s.eigenvalues.empty() || s.max_real_part() < -tol;
}

Matrix matrix_exponential(const Matrix& A, double t) {
  check_square(A, "A");
  if (!A.allFinite() || !std::isfinite(t)) throw NumericalError("matrix_exponential: non-finite input", 0);
  Matrix At = A * t;
  Matrix E = At.exp();
  if (!E.allFinite()) throw NumericalError("matrix_exponential: overflow (norm of A*t too large)", 0);
  return E;
}

Matrix exponential_integral(const Matrix& A, double t) {
  check_square(A, "A");
  const Eigen::Index n = A.rows();
  Matrix aug = Matrix::Zero(2 * n, 2 * n);
  aug.topLeftCorner(n, n) = A;
  aug.topRightCorner(n, n) = Matrix::Identity(n, n);
  return matrix_exponential(aug, t).topRightCorner(n, n);
}

int controllability_rank(const Matrix& A, const Matrix& M, double tol) {
  check_square(A, "A");
  if (M.rows() != A.rows()) throw DimensionError("controllability_rank: M must have as many rows as A");
  if (M.cols() == 0) return 0;
  // Krylov blocks are orthonormalised as they are generated; stacking raw
  // powers of A lets ||A^k|| swamp the relative rank threshold.
  const double anorm = std::max(A.norm(), 1.0);
  Matrix K = column_space(M, tol);
  Matrix W = K;
  for (Eigen::Index k = 1; k < A.rows() && W.cols() > 0 && K.cols() < A.rows(); ++k) {
    Matrix next = A * W;
    for (int pass = 0; pass < 2; ++pass) next -= K * (K.transpose() * next);
    Eigen::JacobiSVD<Matrix> svd(next, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    int r = 0;
    while (r < s.size() && s(r) > tol * anorm) ++r;
    W = svd.matrixU().leftCols(r);
    Matrix grown(K.rows(), K.cols() + r);
    grown << K, W;
    K = grown;
  }
  return static_cast<int>(K.cols());
}

bool is_symmetric_positive_definite(const Matrix& P, double sym_tol) {
  if (P.rows() != P.cols() || P.rows() == 0) return false;
  if (!P.allFinite()) return false;
  if ((P - P.transpose()).norm() > sym_tol * std::max(1.0, P.norm())) return false;
  Eigen::LLT<Matrix> llt(0.5 * (P + P.transpose()));
  if (llt.info() != Eigen::Success) return false;
  return llt.matrixL().toDenseMatrix().diagonal().minCoeff() > 0.0;
}

Matrix solve_lyapunov(const Matrix& A, const Matrix& Q) {
  check_square(A, "A");
  check_square(Q, "Q");
  const Eigen::Index n = A.rows();
  if (Q.rows() != n) throw DimensionError("solve_lyapunov: A and Q sizes differ");
  if (!is_symmetric_positive_definite(Q)) throw PreconditionError("solve_lyapunov: Q is not symmetric positive definite");
  const auto spec = eigen_spectrum(A);
  if (spec.max_real_part() >= -1e-12 * std::max(1.0, A.norm()))
    throw PreconditionError("solve_lyapunov: A is not Hurwitz");

  // Column-major vec: vec(A^T P + P A) = (I kron A^T + A^T kron I) vec(P).
  const Eigen::Index nn = n * n;
  Matrix K = Matrix::Zero(nn, nn);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index row = j * n + i;
      for (Eigen::Index k = 0; k < n; ++k) {
        K(row, j * n + k) += A(k, i);  // (A^T P)_{ij} = sum_k A_{ki} P_{kj}
        K(row, k * n + i) += A(k, j);  // (P A)_{ij}   = sum_k P_{ik} A_{kj}
      }
    }
  Vector rhs(nn);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) rhs(j * n + i) = -Q(i, j);
  Eigen::FullPivLU<Matrix> lu(K);
  Vector p = lu.solve(rhs);
  p += lu.solve(rhs - K * p);  // one step of refinement
  Matrix P = Eigen::Map<Matrix>(p.data(), n, n);
  P = (0.5 * (P + P.transpose())).eval();
  if (!P.allFinite()) throw NumericalError("solve_lyapunov: non-finite solution", 0);
  const double resid = (A.transpose() * P + P * A + Q).norm();
  if (resid > 1e-6 * std::max(1.0, Q.norm()) * std::max(1.0, P.norm()))
    throw NumericalError("solve_lyapunov: residual too large", 0);
  return P;
}

double p_norm(const Matrix& P, const Vector& x) {
  if (P.rows() != x.size() || P.cols() != x.size()) throw DimensionError("p_norm: size mismatch");
  if (!is_symmetric_positive_definite(P)) throw PreconditionError("p_norm: P is not symmetric positive definite");
  const double q = x.dot(P * x);
  return std::sqrt(std::max(q, 0.0));
}

}  // namespace reskit
