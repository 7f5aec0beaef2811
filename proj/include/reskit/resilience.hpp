#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reskit/linalg.hpp"
#include "reskit/zonotope.hpp"

namespace reskit {

// x' = A x + B_bar u_bar, u_bar in [-1,1]^(m+p).
struct LinearSystem {
  Matrix A;
  Matrix B_bar;
  std::vector<std::string> actuator_labels;
  std::vector<std::string> state_labels;
  std::vector<std::string> state_units;

  Eigen::Index states() const { return A.rows(); }
  Eigen::Index actuators() const { return B_bar.cols(); }
  // Throws DimensionError when the invariants do not hold. Missing labels are
  // filled with defaults (u1.., x1..) before validation.
  void validate();
};

struct ControlSplit {
  std::vector<int> lost;        // 0-based columns of B_bar, ascending
  std::vector<int> controlled;  // complement, ascending
  Matrix B;
  Matrix C;
};

ControlSplit split_system(const LinearSystem& sys, std::vector<int> lost);

struct ZSet {
  MaybeZonotope inner;
  std::optional<int> affine_dim;  // nullopt stands for -infinity (empty set)
  Matrix basis;                   // n x r orthonormal, spans Span(Z)
  bool exact = false;
  bool empty() const { return !inner.has_value(); }
};

ZSet compute_z_set(const ControlSplit& split, const Tolerances& tol = {});

enum class SpectrumClass { strictly_negative, nonpositive, imaginary_axis, violated };
const char* to_string(SpectrumClass c);
SpectrumClass classify_spectrum(const Spectrum& s, double tol);

struct EigenvectorWitness {
  double eigenvalue;
  double alignment;  // smallest singular value of basis_Z^T E_lambda; 0 means some v is orthogonal to Z
  bool orthogonal;
};

struct EigenvectorReport {
  bool holds = true;
  std::vector<EigenvectorWitness> witnesses;
};

// True iff no real eigenvector of A^T is orthogonal to Span(Z). Repeated
// eigenvalues are checked over their whole eigenspace.
EigenvectorReport eigenvector_report(const Spectrum& spec, const Matrix& basis, double tol);
bool eigenvector_condition(const Spectrum& spec, const ZSet& zset, double tol = 1e-9);

struct VerdictDiagnostics {
  std::vector<std::complex<double>> eigenvalues;
  double max_real_part = 0.0;
  int controllability_rank = 0;
  int rank_B = 0;
  std::vector<EigenvectorWitness> eigenvector_witnesses;
  bool possibly_conservative = false;
  bool nominal_stabilizable = false;  // meaningful when dim_equals_rankB
  bool nominal_controllable = false;
  Tolerances tolerances;
  std::vector<std::string> notes;
};

struct ResilienceVerdict {
  bool z_empty = true;
  std::optional<int> z_dim;
  bool z_exact = false;
  bool rank_condition = false;
  SpectrumClass spectrum = SpectrumClass::violated;
  bool eigenvector_condition = false;
  bool resiliently_stabilizable = false;
  bool resilient = false;
  bool dim_equals_rankB = false;
  VerdictDiagnostics diagnostics;
};

// Both checks return the full verdict (both flags are always filled); they
// differ only in which flag they are named after.
ResilienceVerdict analyze_resilience(const LinearSystem& sys, const ControlSplit& split, const Tolerances& tol = {});
ResilienceVerdict check_resilient_stabilizability(const LinearSystem& sys, const ControlSplit& split,
                                                  const Tolerances& tol = {});
ResilienceVerdict check_resilience(const LinearSystem& sys, const ControlSplit& split, const Tolerances& tol = {});

enum class NominalMode { stabilizable, controllable };
bool check_nominal(const LinearSystem& sys, NominalMode mode, const Tolerances& tol = {});

}  // namespace reskit
