#pragma once

#include <cstdint>

#include "lieopt/matrix.hpp"

namespace lieopt {

// Generalized Hebbian baseline: V' = (I - B V Vᵀ) A V, with V n×l.
// VᵀBV = I is not preserved; drift is something to measure, not enforce.
struct GhaState {
  Matrix v;
  std::int64_t step = 0;
};

Matrix gha_field(const Matrix& v, const SymMatrix& a, const SymMatrix& b);

GhaState gha_euler_step(const GhaState& state, const SymMatrix& a, const SymMatrix& b, double h);
GhaState gha_rk4_step(const GhaState& state, const SymMatrix& a, const SymMatrix& b, double h);

// First l columns of I.
GhaState gha_initialize_identity(Index n, Index l);
// First l columns of L⁻¹, which lies on the constraint set.
GhaState gha_initialize_on_group(const CholeskyFactor& chol, Index l);

}  // namespace lieopt
