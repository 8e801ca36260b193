#include "lieopt/problems.hpp"

#include <cmath>
#include <string>

namespace lieopt {

ProblemSpec::ProblemSpec(ProblemKind kind, SymMatrix a, Index l)
    : kind_(kind), a_(std::move(a)), l_(l), identity_(SymMatrix::identity(a_.size())) {
  if (a_.size() < 1) throw DimensionMismatch("ProblemSpec: empty matrix");
  if (l_ < 1 || l_ > a_.size()) {
    throw DimensionMismatch("ProblemSpec: l = " + std::to_string(l_) + " outside [1, " +
                            std::to_string(a_.size()) + "]");
  }
}

ProblemSpec ProblemSpec::full_spectrum(SymMatrix a) {
  const Index n = a.size();
  return ProblemSpec(ProblemKind::FullSpectrum, std::move(a), n);
}

ProblemSpec ProblemSpec::leading_ev(SymMatrix a, Index l) {
  return ProblemSpec(ProblemKind::LeadingEV, std::move(a), l);
}

ProblemSpec ProblemSpec::leading_gev(SymMatrix a, SymMatrix b, Index l) {
  if (a.size() != b.size()) throw DimensionMismatch("leading_gev: A and B differ in size");
  ProblemSpec spec(ProblemKind::LeadingGEV, std::move(a), l);
  spec.chol_ = cholesky(b);
  spec.b_ = std::move(b);
  return spec;
}

const SymMatrix& ProblemSpec::b() const { return b_ ? *b_ : identity_; }

ProblemSpec ProblemSpec::with_matrix(SymMatrix a) const {
  if (a.size() != n()) throw DimensionMismatch("with_matrix: size changed");
  ProblemSpec out = *this;
  out.a_ = std::move(a);
  return out;
}

namespace {

void check_r(const ProblemSpec& spec, const SymMatrix& a, const Matrix& r) {
  if (r.rows() != spec.n() || r.cols() != spec.n() || a.size() != spec.n()) {
    throw DimensionMismatch("R must be " + std::to_string(spec.n()) + "x" +
                            std::to_string(spec.n()));
  }
}

// Columns 0..l-1 of RᵀAR, the only part the leading problems ever need.
Matrix leading_columns(const SymMatrix& a, const Matrix& r, Index l) {
  const Matrix ar = a.mat() * r.leftCols(l);
  return r.transpose() * ar;
}

}  // namespace

double objective(const ProblemSpec& spec, const Matrix& r) { return objective(spec, spec.a(), r); }

double objective(const ProblemSpec& spec, const SymMatrix& a, const Matrix& r) {
  check_r(spec, a, r);
  if (spec.kind() == ProblemKind::FullSpectrum) {
    const Matrix m = r.transpose() * a.mat() * r;
    double s = 0.0;
    for (Index i = 0; i < spec.n(); ++i) s += static_cast<double>(i + 1) * m(i, i);
    return s;
  }
  const Matrix c = leading_columns(a, r, spec.l());
  return -c.topRows(spec.l()).trace();
}

SkewMatrix force(const ProblemSpec& spec, const Matrix& r) { return force(spec, spec.a(), r); }

SkewMatrix force(const ProblemSpec& spec, const SymMatrix& a, const Matrix& r) {
  check_r(spec, a, r);
  const Index n = spec.n();
  if (spec.kind() == ProblemKind::FullSpectrum) {
    const Matrix m = r.transpose() * a.mat() * r;
    Matrix weights = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) weights(i, i) = static_cast<double>(i + 1);
    return commutator(weights, m);
  }
  const Index l = spec.l();
  // [M, ℰ] is nonzero only in the off-diagonal blocks: M(i, j) below, -M(j, i) above.
  const Matrix c = leading_columns(a, r, l);
  return skew_from_lower_block(n, l, c.bottomRows(n - l));
}

OptimizerState initial_state(const ProblemSpec& spec) {
  OptimizerState s;
  const Index n = spec.n();
  if (const auto* chol = spec.cholesky_factor()) {
    s.r = chol->inverse();
  } else {
    s.r = Matrix::Identity(n, n);
  }
  s.xi = SkewMatrix::zero(n);
  return s;
}

Solution extract_solution(const ProblemSpec& spec, const Matrix& r) {
  return extract_solution(spec, spec.a(), r);
}

Solution extract_solution(const ProblemSpec& spec, const SymMatrix& a, const Matrix& r) {
  check_r(spec, a, r);
  Solution sol;
  sol.v = r.leftCols(spec.l());
  const SymMatrix compressed(Matrix(sol.v.transpose() * a.mat() * sol.v));
  sol.estimates = jacobi_eigh(compressed).values;
  return sol;
}

SymMatrix reduce_generalized(const SymMatrix& a, const CholeskyFactor& chol) {
  // X = L⁻ᵀ A, then (X L⁻¹)ᵀ = L⁻ᵀ Xᵀ.
  const Matrix x = chol.solve_upper_transposed(a.mat());
  const Matrix y = chol.solve_upper_transposed(x.transpose());
  return SymMatrix(Matrix(y.transpose()));
}

GroundTruth ground_truth(const ProblemSpec& spec) { return ground_truth(spec, spec.a()); }

GroundTruth ground_truth(const ProblemSpec& spec, const SymMatrix& a) {
  const Index l = spec.l();
  GroundTruth truth;
  EigenDecomposition eig;
  Matrix basis;
  if (const auto* chol = spec.cholesky_factor()) {
    eig = jacobi_eigh(reduce_generalized(a, *chol));
    basis = chol->solve_upper(eig.vectors.leftCols(l));
  } else {
    eig = jacobi_eigh(a);
    basis = eig.vectors.leftCols(l);
  }
  truth.values.assign(eig.values.begin(), eig.values.begin() + l);
  truth.basis = std::move(basis);
  truth.reduced_norm = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
  if (spec.kind() == ProblemKind::FullSpectrum) {
    double s = 0.0;
    for (Index k = 0; k < l; ++k) s += static_cast<double>(k + 1) * truth.values[static_cast<std::size_t>(k)];
    truth.optimal_objective = s;
  } else {
    double s = 0.0;
    for (double v : truth.values) s += v;
    truth.optimal_objective = -s;
  }
  return truth;
}

ErrorMetrics error_metrics(const ProblemSpec& spec, const Matrix& r, const GroundTruth& truth) {
  return error_metrics(spec, spec.a(), r, truth);
}

ErrorMetrics error_metrics(const ProblemSpec& spec, const SymMatrix& a, const Matrix& r,
                           const GroundTruth& truth) {
  const Solution sol = extract_solution(spec, a, r);
  ErrorMetrics m;
  for (std::size_t k = 0; k < truth.values.size(); ++k) {
    m.eig_err += std::abs(sol.estimates[k] - truth.values[k]);
  }
  // V Vᵀ B - W Wᵀ B = V (BV)ᵀ - W (BW)ᵀ
  const Matrix& b = spec.b().mat();
  const Matrix bv = b * sol.v;
  const Matrix bw = b * truth.basis;
  m.subspace_err = (sol.v * bv.transpose() - truth.basis * bw.transpose()).norm();
  return m;
}

double group_drift(const ProblemSpec& spec, const Matrix& r) {
  const Index n = spec.n();
  const Matrix g = r.transpose() * spec.b().mat() * r;
  return (g - Matrix::Identity(n, n)).norm();
}

}  // namespace lieopt
