#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lieopt/matrix.hpp"

namespace lieopt {

/// Left-trivialized phase point (R, ξ) plus the step counter and time t = i·h.
struct OptimizerState {
  Matrix r;
  SkewMatrix xi;
  std::int64_t step = 0;
  double t = 0.0;
};

enum class ProblemKind { FullSpectrum, LeadingEV, LeadingGEV };

/// Objective on the group {R : RᵀBR = I}.
///
/// FullSpectrum minimizes tr(RᵀAR N) with N = diag(1..n). LeadingEV and
/// LeadingGEV minimize -tr(EᵀRᵀARE) where E selects the first l columns; the
/// GEV variant differs only in carrying B (and its Cholesky factor), which
/// changes the group and the initial condition but not the force.
class ProblemSpec {
 public:
  static ProblemSpec full_spectrum(SymMatrix a);
  static ProblemSpec leading_ev(SymMatrix a, Index l);
  static ProblemSpec leading_gev(SymMatrix a, SymMatrix b, Index l);

  ProblemKind kind() const { return kind_; }
  Index n() const { return a_.size(); }
  Index l() const { return l_; }
  const SymMatrix& a() const { return a_; }
  bool has_constraint() const { return b_.has_value(); }
  // B, or the identity for unconstrained problems.
  const SymMatrix& b() const;
  const CholeskyFactor* cholesky_factor() const { return chol_ ? &*chol_ : nullptr; }

  // Same problem with a different objective matrix (B is never replaced).
  ProblemSpec with_matrix(SymMatrix a) const;

 private:
  ProblemSpec(ProblemKind kind, SymMatrix a, Index l);

  ProblemKind kind_;
  SymMatrix a_;
  Index l_;
  std::optional<SymMatrix> b_;
  std::optional<CholeskyFactor> chol_;
  SymMatrix identity_;
};

double objective(const ProblemSpec& spec, const Matrix& r);
double objective(const ProblemSpec& spec, const SymMatrix& a, const Matrix& r);

/// Descent force (negative left-trivialized gradient): [RᵀAR, ℰ] for the
/// leading problems, [N, RᵀAR] for the full spectrum.
SkewMatrix force(const ProblemSpec& spec, const Matrix& r);
SkewMatrix force(const ProblemSpec& spec, const SymMatrix& a, const Matrix& r);

OptimizerState initial_state(const ProblemSpec& spec);

struct Solution {
  Matrix v;                        // n×l, first l columns of R
  std::vector<double> estimates;   // eigenvalues of VᵀAV, descending
};

Solution extract_solution(const ProblemSpec& spec, const Matrix& r);
Solution extract_solution(const ProblemSpec& spec, const SymMatrix& a, const Matrix& r);

struct GroundTruth {
  std::vector<double> values;  // top l, descending
  Matrix basis;                // n×l, basisᵀ B basis = I
  // Minimum of the objective implied by the spectrum.
  double optimal_objective = 0.0;
  // ‖L⁻ᵀAL⁻¹‖₂ (‖A‖₂ when B = I); the natural scale for step sizes.
  double reduced_norm = 0.0;
};

GroundTruth ground_truth(const ProblemSpec& spec);
GroundTruth ground_truth(const ProblemSpec& spec, const SymMatrix& a);

struct ErrorMetrics {
  double eig_err = 0.0;
  double subspace_err = 0.0;
};

ErrorMetrics error_metrics(const ProblemSpec& spec, const Matrix& r, const GroundTruth& truth);
ErrorMetrics error_metrics(const ProblemSpec& spec, const SymMatrix& a, const Matrix& r,
                           const GroundTruth& truth);

// ‖RᵀBR - I‖_F
double group_drift(const ProblemSpec& spec, const Matrix& r);

// L⁻ᵀ A L⁻¹ via triangular solves.
SymMatrix reduce_generalized(const SymMatrix& a, const CholeskyFactor& chol);

}  // namespace lieopt
