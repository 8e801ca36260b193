#include "lieopt/baselines.hpp"

namespace lieopt {

Matrix gha_field(const Matrix& v, const SymMatrix& a, const SymMatrix& b) {
  const Index n = a.size();
  if (v.rows() != n || b.size() != n) throw DimensionMismatch("gha: V, A, B sizes disagree");
  const Matrix av = a.mat() * v;
  // (I - B V Vᵀ) A V = AV - B V (Vᵀ A V)
  return av - b.mat() * (v * (v.transpose() * av));
}

GhaState gha_euler_step(const GhaState& state, const SymMatrix& a, const SymMatrix& b, double h) {
  return {state.v + h * gha_field(state.v, a, b), state.step + 1};
}

GhaState gha_rk4_step(const GhaState& state, const SymMatrix& a, const SymMatrix& b, double h) {
  const Matrix& v = state.v;
  const Matrix k1 = gha_field(v, a, b);
  const Matrix k2 = gha_field(v + 0.5 * h * k1, a, b);
  const Matrix k3 = gha_field(v + 0.5 * h * k2, a, b);
  const Matrix k4 = gha_field(v + h * k3, a, b);
  return {v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), state.step + 1};
}

GhaState gha_initialize_identity(Index n, Index l) {
  if (l < 1 || l > n) throw DimensionMismatch("gha_initialize_identity: l out of range");
  return {Matrix::Identity(n, n).leftCols(l), 0};
}

GhaState gha_initialize_on_group(const CholeskyFactor& chol, Index l) {
  const Index n = chol.size();
  if (l < 1 || l > n) throw DimensionMismatch("gha_initialize_on_group: l out of range");
  return {chol.solve_upper(Matrix::Identity(n, n).leftCols(l)), 0};
}

}  // namespace lieopt
