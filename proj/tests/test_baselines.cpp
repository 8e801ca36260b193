#include <doctest.h>

#include "lieopt/baselines.hpp"
#include "lieopt/problems.hpp"
#include "support.hpp"

using namespace lieopt;

TEST_CASE("gha fixed points") {
  const SymMatrix a = testing::random_sym(6, 1);
  const SymMatrix b = testing::random_spd(6, 2);
  const auto truth = ground_truth(ProblemSpec::leading_gev(a, b, 2));
  const GhaState s{truth.basis, 0};
  CHECK(gha_field(s.v, a, b).norm() <= 1e-10);
  CHECK((gha_euler_step(s, a, b, 0.1).v - s.v).norm() <= 1e-11);
  CHECK((gha_rk4_step(s, a, b, 0.1).v - s.v).norm() <= 1e-11);

  const GhaState e{Matrix::Identity(2, 2).leftCols(1), 0};
  const auto d = SymMatrix::diagonal({3, 1});
  CHECK(gha_euler_step(e, d, SymMatrix::identity(2), 0.1).v == e.v);
}

TEST_CASE("gha_euler_step hand 2x2") {
  Matrix a(2, 2);
  a << 1, 2, 2, 3;
  const GhaState s{Matrix::Identity(2, 2).leftCols(1), 0};
  const auto s1 = gha_euler_step(s, SymMatrix(a), SymMatrix::identity(2), 0.1);
  CHECK(s1.v(0, 0) == doctest::Approx(1.0));
  CHECK(s1.v(1, 0) == doctest::Approx(0.2));
  CHECK(s1.step == 1);
}

TEST_CASE("gha_rk4_step accuracy") {
  const SymMatrix a = testing::random_sym(5, 3);
  const SymMatrix b = SymMatrix::identity(5);
  const GhaState s{testing::gaussian(5, 2, 4) * 0.3, 0};

  SUBCASE("agrees with Euler to second order") {
    const double d1 = (gha_rk4_step(s, a, b, 0.01).v - gha_euler_step(s, a, b, 0.01).v).norm();
    const double d2 = (gha_rk4_step(s, a, b, 0.005).v - gha_euler_step(s, a, b, 0.005).v).norm();
    CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.1));
  }
  SUBCASE("local error is fifth order") {
    auto fine = [&](double h) {
      GhaState x = s;
      for (int k = 0; k < 256; ++k) x = gha_rk4_step(x, a, b, h / 256);
      return x.v;
    };
    const double e1 = (gha_rk4_step(s, a, b, 0.2).v - fine(0.2)).norm();
    const double e2 = (gha_rk4_step(s, a, b, 0.1).v - fine(0.1)).norm();
    CHECK(e1 / e2 == doctest::Approx(32.0).epsilon(0.2));
  }
}

TEST_CASE("gha initialization") {
  CHECK(gha_initialize_identity(3, 2).v == Matrix::Identity(3, 3).leftCols(2));
  const auto g = gha_initialize_on_group(cholesky(SymMatrix::diagonal({4, 1})), 1);
  CHECK(g.v(0, 0) == doctest::Approx(0.5));
  CHECK(g.v(1, 0) == 0.0);
  CHECK_THROWS_AS(gha_initialize_identity(3, 4), DimensionMismatch);
  CHECK_THROWS_AS(gha_field(Matrix::Zero(3, 1), SymMatrix(2), SymMatrix(2)), DimensionMismatch);
}

TEST_CASE("gha converges but drifts off the constraint") {
  Matrix noise = testing::random_sym(6, 5).mat() * 0.05;
  const SymMatrix a(Matrix(SymMatrix::diagonal({6, 5, 4, 3, 2, 1}).mat() + noise));
  const SymMatrix b = SymMatrix::identity(6);
  GhaState s = gha_initialize_identity(6, 2);
  s.v = s.v + testing::gaussian(6, 2, 6) * 0.1;
  for (int k = 0; k < 4000; ++k) s = gha_euler_step(s, a, b, 0.01);
  CHECK((s.v.transpose() * s.v - Matrix::Identity(2, 2)).norm() <= 1e-6);
  const auto truth = ground_truth(ProblemSpec::leading_ev(a, 2));
  const Matrix pv = s.v * s.v.transpose();
  const Matrix pw = truth.basis * truth.basis.transpose();
  CHECK((pv - pw).norm() <= 1e-6);
}
