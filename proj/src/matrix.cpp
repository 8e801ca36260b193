#include "lieopt/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace lieopt {

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("SymMatrix: input is " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
  }
  m_ = (m + m.transpose()) * 0.5;
}

SymMatrix SymMatrix::identity(Index n) { return SymMatrix(Matrix::Identity(n, n)); }

SymMatrix SymMatrix::diagonal(const std::vector<double>& d) {
  Matrix m = Matrix::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<Index>(i), static_cast<Index>(i)) = d[i];
  return SymMatrix(m);
}

SymMatrix SymMatrix::scaled(double s) const {
  SymMatrix out;
  out.m_ = m_ * s;
  return out;
}

SymMatrix SymMatrix::shifted(double lambda) const {
  SymMatrix out;
  out.m_ = m_;
  out.m_.diagonal().array() += lambda;
  return out;
}

SkewMatrix::SkewMatrix(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("SkewMatrix: input is " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
  }
  m_ = (m - m.transpose()) * 0.5;
}

void SkewMatrix::add_scaled(const SkewMatrix& other, double s) {
  if (other.size() != size()) throw DimensionMismatch("SkewMatrix::add_scaled");
  m_ += s * other.m_;
}

SkewMatrix skew_from_lower_block(Index n, Index l, const Matrix& lower) {
  if (lower.rows() != n - l || lower.cols() != l) {
    throw DimensionMismatch("skew_from_lower_block: block shape");
  }
  SkewMatrix out(n);
  out.m_.bottomLeftCorner(n - l, l) = lower;
  out.m_.topRightCorner(l, n - l) = -lower.transpose();
  return out;
}

Matrix CholeskyFactor::solve_upper(const Matrix& y) const {
  return upper.triangularView<Eigen::Upper>().solve(y);
}

Matrix CholeskyFactor::solve_upper_transposed(const Matrix& y) const {
  return upper.transpose().triangularView<Eigen::Lower>().solve(y);
}

Matrix CholeskyFactor::inverse() const { return solve_upper(Matrix::Identity(size(), size())); }

CholeskyFactor cholesky(const SymMatrix& b) {
  const Index n = b.size();
  const Matrix& a = b.mat();
  const double threshold =
      static_cast<double>(n) * std::numeric_limits<double>::epsilon() * a.cwiseAbs().maxCoeff();

  // Row-oriented upper factor: U(k, j) = (A(k, j) - Σ_{i<k} U(i, k) U(i, j)) / U(k, k).
  Matrix u = Matrix::Zero(n, n);
  for (Index k = 0; k < n; ++k) {
    double pivot = a(k, k);
    for (Index i = 0; i < k; ++i) pivot -= u(i, k) * u(i, k);
    if (!(pivot > threshold)) {
      std::ostringstream msg;
      msg << "cholesky: pivot " << pivot << " at index " << k << " is not above threshold "
          << threshold;
      throw NotPositiveDefinite(msg.str());
    }
    const double d = std::sqrt(pivot);
    u(k, k) = d;
    for (Index j = k + 1; j < n; ++j) {
      double s = a(k, j);
      for (Index i = 0; i < k; ++i) s -= u(i, k) * u(i, j);
      u(k, j) = s / d;
    }
  }
  return CholeskyFactor{std::move(u)};
}

namespace {

void check_square_skew(const SkewMatrix& x, const char* who) {
  if (!all_finite(x.mat())) throw SingularSolve(std::string(who) + ": non-finite input");
}

Matrix solve_rational(const Matrix& denominator, const Matrix& numerator, const char* who) {
  Eigen::PartialPivLU<Matrix> lu(denominator);
  // For skew input the denominator's eigenvalues have real part >= 1, so a
  // tiny pivot means the input was not skew.
  const double det_scale = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(det_scale > 1e-12)) throw SingularSolve(std::string(who) + ": singular denominator");
  return lu.solve(numerator);
}

}  // namespace

Matrix cayley(const SkewMatrix& x, double h) {
  check_square_skew(x, "cayley");
  const Index n = x.size();
  const Matrix half = (0.5 * h) * x.mat();
  const Matrix id = Matrix::Identity(n, n);
  return solve_rational(id - half, id + half, "cayley");
}

Matrix pade22_exp(const SkewMatrix& x, double h) {
  check_square_skew(x, "pade22_exp");
  const Index n = x.size();
  const Matrix hx = h * x.mat();
  const Matrix even = Matrix::Identity(n, n) + (hx * hx) / 12.0;
  return solve_rational(even - 0.5 * hx, even + 0.5 * hx, "pade22_exp");
}

SkewMatrix commutator(const Matrix& m, const Matrix& p) {
  if (m.rows() != m.cols() || p.rows() != p.cols() || m.rows() != p.rows()) {
    throw DimensionMismatch("commutator: operands must be square and of equal size");
  }
  return SkewMatrix(Matrix(m * p - p * m));
}

EigenDecomposition jacobi_eigh(const SymMatrix& sym, double tol, int max_sweeps) {
  const Index n = sym.size();
  Matrix a = sym.mat();
  Matrix v = Matrix::Identity(n, n);
  const double scale = std::max(a.norm(), std::numeric_limits<double>::min());

  auto off_norm = [&]() {
    double s = 0.0;
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < j; ++i) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
  };

  bool converged = off_norm() <= tol * scale;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double tiny = 100.0 * std::abs(apq);
        if (sweep > 3 && std::abs(app) + tiny == std::abs(app) && std::abs(aqq) + tiny == std::abs(aqq)) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        // Rotation angle that zeroes a(p, q); t = tan θ chosen with |θ| <= π/4.
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    converged = off_norm() <= tol * scale;
  }
  if (!converged) {
    throw NoConvergence("jacobi_eigh: off-diagonal norm did not fall below tolerance after " +
                        std::to_string(max_sweeps) + " sweeps");
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return a(i, i) > a(j, j); });

  EigenDecomposition out;
  out.values.reserve(static_cast<std::size_t>(n));
  out.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    out.values.push_back(a(src, src));
    out.vectors.col(k) = v.col(src);
  }
  return out;
}

double spectral_norm(const SymMatrix& a) {
  if (a.size() == 0) return 0.0;
  const auto eig = jacobi_eigh(a);
  return std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
}

double relative_error(const Matrix& a, const Matrix& b) {
  const double denom = b.norm();
  const double diff = (a - b).norm();
  return denom > 0.0 ? diff / denom : diff;
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace lieopt
