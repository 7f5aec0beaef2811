#include "reskit/resilience.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "reskit/errors.hpp"

namespace reskit {

void LinearSystem::validate() {
  check_square(A, "A");
  if (A.rows() == 0) throw DimensionError("system: A is empty");
  if (B_bar.rows() != A.rows()) throw DimensionError("system: B_bar must have as many rows as A");
  if (!A.allFinite() || !B_bar.allFinite()) throw ArgumentError("system: non-finite matrix entries");
  if (actuator_labels.empty())
    for (Eigen::Index j = 0; j < B_bar.cols(); ++j) actuator_labels.push_back("u" + std::to_string(j + 1));
  if (state_labels.empty())
    for (Eigen::Index i = 0; i < A.rows(); ++i) state_labels.push_back("x" + std::to_string(i + 1));
  if (state_units.empty()) state_units.assign(static_cast<std::size_t>(A.rows()), "");
  if (static_cast<Eigen::Index>(actuator_labels.size()) != B_bar.cols())
    throw DimensionError("system: actuator label count differs from B_bar columns");
  if (static_cast<Eigen::Index>(state_labels.size()) != A.rows() ||
      static_cast<Eigen::Index>(state_units.size()) != A.rows())
    throw DimensionError("system: state label/unit count differs from the state dimension");
}

ControlSplit split_system(const LinearSystem& sys, std::vector<int> lost) {
  const int total = static_cast<int>(sys.B_bar.cols());
  std::sort(lost.begin(), lost.end());
  if (std::adjacent_find(lost.begin(), lost.end()) != lost.end())
    throw ArgumentError("split_system: repeated actuator index");
  if (lost.empty()) throw ArgumentError("split_system: the lost actuator set is empty");
  if (static_cast<int>(lost.size()) >= total) throw ArgumentError("split_system: every actuator is lost");
  for (int j : lost)
    if (j < 0 || j >= total) throw ArgumentError("split_system: actuator index " + std::to_string(j + 1) + " out of range");

  ControlSplit s;
  s.lost = lost;
  for (int j = 0; j < total; ++j)
    if (!std::binary_search(lost.begin(), lost.end(), j)) s.controlled.push_back(j);
  s.B.resize(sys.B_bar.rows(), static_cast<Eigen::Index>(s.controlled.size()));
  s.C.resize(sys.B_bar.rows(), static_cast<Eigen::Index>(s.lost.size()));
  for (std::size_t k = 0; k < s.controlled.size(); ++k) s.B.col(static_cast<Eigen::Index>(k)) = sys.B_bar.col(s.controlled[k]);
  for (std::size_t k = 0; k < s.lost.size(); ++k) s.C.col(static_cast<Eigen::Index>(k)) = sys.B_bar.col(s.lost[k]);
  return s;
}

ZSet compute_z_set(const ControlSplit& split, const Tolerances& tol) {
  const Eigen::Index n = split.B.rows();
  const Zonotope BU(Vector::Zero(n), split.B);
  const Zonotope CW(Vector::Zero(n), split.C);
  ZSet z;
  const auto diff = inner_minkowski_difference(BU, CW, tol.containment);
  if (!diff.set) {
    z.basis = Matrix(n, 0);
    return z;
  }
  if (!contains_zonotope(BU, *diff.set, ContainmentMode::automatic, 1e-7))
    throw NumericalError("compute_z_set: inner difference escaped BU", 0);
  z.inner = diff.set;
  z.exact = diff.exact;
  z.basis = column_space(diff.set->generators(), tol.rank);
  z.affine_dim = static_cast<int>(z.basis.cols());
  return z;
}

const char* to_string(SpectrumClass c) {
  switch (c) {
    case SpectrumClass::strictly_negative: return "strictly-negative-ok";
    case SpectrumClass::nonpositive: return "nonpositive-ok";
    case SpectrumClass::imaginary_axis: return "zero-ok";
    case SpectrumClass::violated: return "violated";
  }
  return "violated";
}

SpectrumClass classify_spectrum(const Spectrum& s, double tol) {
  bool any_zero = false, any_negative = false;
  for (const auto& l : s.eigenvalues) {
    if (l.real() > tol) return SpectrumClass::violated;
    if (l.real() < -tol) any_negative = true;
    else any_zero = true;
  }
  if (!any_zero) return SpectrumClass::strictly_negative;
  return any_negative ? SpectrumClass::nonpositive : SpectrumClass::imaginary_axis;
}

EigenvectorReport eigenvector_report(const Spectrum& spec, const Matrix& basis, double tol) {
  EigenvectorReport rep;
  const auto& ev = spec.real_eigenvectors;
  std::size_t i = 0;
  while (i < ev.size()) {
    std::size_t j = i + 1;
    while (j < ev.size() && ev[j].value == ev[i].value) ++j;
    const auto k = static_cast<Eigen::Index>(j - i);
    Matrix E(ev[i].vector.size(), k);
    for (Eigen::Index q = 0; q < k; ++q) E.col(q) = ev[i + static_cast<std::size_t>(q)].vector;
    double align = 0.0;
    if (basis.cols() >= k) {
      Eigen::JacobiSVD<Matrix> svd(basis.transpose() * E);
      align = svd.singularValues()(k - 1);
    }
    const bool orth = align <= tol;
    rep.witnesses.push_back({ev[i].value, align, orth});
    if (orth) rep.holds = false;
    i = j;
  }
  return rep;
}

bool eigenvector_condition(const Spectrum& spec, const ZSet& zset, double tol) {
  if (zset.empty()) throw PreconditionError("eigenvector_condition: Z is empty");
  return eigenvector_report(spec, zset.basis, tol).holds;
}

namespace {

struct Conditions {
  bool rank;
  SpectrumClass spectrum;
  EigenvectorReport eig;
  int ctrb_rank;
};

Conditions brammer(const Matrix& A, const Spectrum& spec, const Matrix& basis, const Tolerances& tol) {
  Conditions c;
  c.ctrb_rank = controllability_rank(A, basis, tol.rank);
  c.rank = c.ctrb_rank == A.rows();
  c.spectrum = classify_spectrum(spec, tol.spectrum);
  c.eig = eigenvector_report(spec, basis, tol.support);
  return c;
}

bool stabilizable(const Conditions& c) { return c.rank && c.spectrum != SpectrumClass::violated && c.eig.holds; }
bool controllable(const Conditions& c) { return c.rank && c.spectrum == SpectrumClass::imaginary_axis && c.eig.holds; }

}  // namespace

ResilienceVerdict analyze_resilience(const LinearSystem& sys, const ControlSplit& split, const Tolerances& tol) {
  if (split.B.rows() != sys.A.rows() || split.C.rows() != sys.A.rows())
    throw DimensionError("analyze_resilience: split does not match the system");
  ResilienceVerdict v;
  const Spectrum spec = eigen_spectrum(sys.A, tol);
  auto& d = v.diagnostics;
  d.eigenvalues = spec.eigenvalues;
  d.max_real_part = spec.max_real_part();
  d.rank_B = numerical_rank(split.B, tol.rank);
  d.tolerances = tol;
  v.spectrum = classify_spectrum(spec, tol.spectrum);

  const ZSet z = compute_z_set(split, tol);
  v.z_empty = z.empty();
  v.z_dim = z.affine_dim;
  v.z_exact = z.exact;
  if (z.empty()) {
    d.notes.push_back("Z is empty: the lost actuators' range CW is not contained in BU");
    return v;
  }
  const Conditions c = brammer(sys.A, spec, z.basis, tol);
  d.controllability_rank = c.ctrb_rank;
  d.eigenvector_witnesses = c.eig.witnesses;
  v.rank_condition = c.rank;
  v.eigenvector_condition = c.eig.holds;
  v.resiliently_stabilizable = stabilizable(c);
  v.resilient = controllable(c);
  v.dim_equals_rankB = *z.affine_dim == d.rank_B;
  if (v.dim_equals_rankB) {
    const Conditions nom = brammer(sys.A, spec, column_space(sys.B_bar, tol.rank), tol);
    d.nominal_stabilizable = stabilizable(nom);
    d.nominal_controllable = controllable(nom);
  }
  d.possibly_conservative = !z.exact && (!c.rank || !c.eig.holds);
  if (d.possibly_conservative)
    d.notes.push_back("rank/eigenvector failure computed on an inner approximation of Z");
  for (const auto& l : spec.eigenvalues)
    if (l.real() != 0.0 && std::abs(l.real()) <= tol.spectrum) {
      std::ostringstream os;
      os << "eigenvalue with |Re| = " << std::abs(l.real()) << " treated as zero (tolerance " << tol.spectrum << ")";
      d.notes.push_back(os.str());
    }
  return v;
}

ResilienceVerdict check_resilient_stabilizability(const LinearSystem& sys, const ControlSplit& split,
                                                  const Tolerances& tol) {
  return analyze_resilience(sys, split, tol);
}

ResilienceVerdict check_resilience(const LinearSystem& sys, const ControlSplit& split, const Tolerances& tol) {
  return analyze_resilience(sys, split, tol);
}

bool check_nominal(const LinearSystem& sys, NominalMode mode, const Tolerances& tol) {
  const Spectrum spec = eigen_spectrum(sys.A, tol);
  const Conditions c = brammer(sys.A, spec, column_space(sys.B_bar, tol.rank), tol);
  return mode == NominalMode::stabilizable ? stabilizable(c) : controllable(c);
}

}  // namespace reskit
