#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lieopt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Error hierarchy. Every failure the library reports derives from Error so
// callers can catch one type and still dispatch on the concrete kind.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularSolve : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Dense symmetric matrix. Symmetry is exact: the constructor averages the
/// input with its transpose, which is the identity on already-symmetric data.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m);
  explicit SymMatrix(Index n) : m_(Matrix::Zero(n, n)) {}

  static SymMatrix identity(Index n);
  static SymMatrix diagonal(const std::vector<double>& d);

  Index size() const { return m_.rows(); }
  const Matrix& mat() const { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

  SymMatrix scaled(double s) const;
  SymMatrix shifted(double lambda) const;

 private:
  Matrix m_;
};

/// Dense skew-symmetric matrix (element of so(n)).
///
/// Construction antisymmetrizes; afterwards the only mutations offered are
/// scaling and adding a scaled skew matrix. Both act elementwise, and IEEE
/// rounding is symmetric under negation, so entries stay exact negatives of
/// their transposes without any re-skewing.
class SkewMatrix {
 public:
  SkewMatrix() = default;
  explicit SkewMatrix(const Matrix& m);
  explicit SkewMatrix(Index n) : m_(Matrix::Zero(n, n)) {}

  static SkewMatrix zero(Index n) { return SkewMatrix(n); }

  Index size() const { return m_.rows(); }
  const Matrix& mat() const { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

  void scale(double s) { m_ *= s; }
  void add_scaled(const SkewMatrix& other, double s);

  // Squared Frobenius norm, tr(XᵀX).
  double norm_sq() const { return m_.squaredNorm(); }

 private:
  friend SkewMatrix skew_from_lower_block(Index n, Index l, const Matrix& lower);
  Matrix m_;
};

/// Builds the skew matrix [[0, -Pᵀ], [P, 0]] where P is (n-l)×l.
SkewMatrix skew_from_lower_block(Index n, Index l, const Matrix& lower);

/// Upper-triangular factor with B = LᵀL.
struct CholeskyFactor {
  Matrix upper;

  Index size() const { return upper.rows(); }
  // X = L⁻¹ Y
  Matrix solve_upper(const Matrix& y) const;
  // X = L⁻ᵀ Y
  Matrix solve_upper_transposed(const Matrix& y) const;
  // L⁻¹ itself, via triangular solve against the identity.
  Matrix inverse() const;
};

CholeskyFactor cholesky(const SymMatrix& b);

Matrix cayley(const SkewMatrix& x, double h);
Matrix pade22_exp(const SkewMatrix& x, double h);

// MP - PM, antisymmetrized.
SkewMatrix commutator(const Matrix& m, const Matrix& p);

struct EigenDecomposition {
  std::vector<double> values;  // descending
  Matrix vectors;              // columns match values
};

/// Cyclic Jacobi eigensolver. Used as the ground-truth oracle; it deliberately
/// shares no code with the LU-based solves on the integration path.
EigenDecomposition jacobi_eigh(const SymMatrix& a, double tol = 1e-14, int max_sweeps = 100);

double spectral_norm(const SymMatrix& a);

// Relative Frobenius distance ‖a - b‖ / ‖b‖ (absolute when b is zero).
double relative_error(const Matrix& a, const Matrix& b);

bool all_finite(const Matrix& m);

}  // namespace lieopt
