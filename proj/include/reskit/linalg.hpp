#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace reskit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Numerical thresholds shared by the analysis routines. Defaults are the ones the
// CLI uses; every field can be overridden from the command line.
struct Tolerances {
  double rank = 1e-9;         // singular values below rank*sigma_max count as zero
  double spectrum = 1e-9;     // |Re(lambda)| below this is treated as zero
  double imag = 1e-9;         // |Im(lambda)| below this makes an eigenvalue real
  double containment = 1e-9;  // slack allowed in membership programs
  double support = 1e-9;      // orthogonality threshold for eigenvector tests
};

struct RealEigenvector {
  double value;
  Vector vector;  // unit norm, eigenvector of A^T
};

struct Spectrum {
  std::vector<std::complex<double>> eigenvalues;
  // For each real eigenvalue of A (clustered), an orthonormal basis of the
  // eigenspace of A^T. Repeated eigenvalues contribute one entry per basis vector.
  std::vector<RealEigenvector> real_eigenvectors;

  double max_real_part() const;
};

Spectrum eigen_spectrum(const Matrix& A, const Tolerances& tol = {});

bool is_hurwitz(const Matrix& A, double tol = 1e-9);

Matrix matrix_exponential(const Matrix& A, double t = 1.0);

// Integral of exp(A s) over [0, t], exact for singular A.
Matrix exponential_integral(const Matrix& A, double t);

// Rank of [M, AM, ..., A^{n-1}M]. An empty M gives 0.
int controllability_rank(const Matrix& A, const Matrix& M, double tol = 1e-9);

// Numerical rank with a relative singular-value threshold.
int numerical_rank(const Matrix& M, double tol = 1e-9);

// Orthonormal basis of the column space (n x r, r may be 0).
Matrix column_space(const Matrix& M, double tol = 1e-9);

// Orthonormal basis of the null space of M (cols(M) x k).
Matrix null_space(const Matrix& M, double tol = 1e-9);

// P with A^T P + P A = -Q, for Hurwitz A and symmetric positive definite Q.
Matrix solve_lyapunov(const Matrix& A, const Matrix& Q);

double p_norm(const Matrix& P, const Vector& x);

bool is_symmetric_positive_definite(const Matrix& P, double sym_tol = 1e-10);

void check_square(const Matrix& A, const char* name);

}  // namespace reskit
