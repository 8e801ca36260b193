#include <doctest.h>

#include <cmath>
#include <limits>

#include "lieopt/dynamics.hpp"
#include "support.hpp"

using namespace lieopt;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

Matrix hand_2x2(double a01) {
  Matrix m(2, 2);
  m << 0, a01, -a01, 0;
  return m;
}

OptimizerState run_to(const ProblemSpec& p, const DissipationSchedule& s, IntegratorKind kind, double h,
                      int steps, OptimizerState state) {
  for (int k = 0; k < steps; ++k) state = advance(state, p, p.a(), s, h, kind);
  return state;
}

// Global error at T = 1.6 for each h, against a single h/64 reference.
std::vector<double> global_errors(IntegratorKind kind, const std::vector<double>& hs) {
  const ProblemSpec p = ProblemSpec::leading_ev(testing::random_sym(4, 21), 2);
  const auto s = DissipationSchedule::constant(1.0);
  OptimizerState start = initial_state(p);
  start.xi = SkewMatrix(testing::gaussian(4, 4, 22));
  const double t_end = 1.6;
  const double h_ref = hs.back() / 64;
  const Matrix ref = run_to(p, s, kind, h_ref, static_cast<int>(std::lround(t_end / h_ref)), start).r;
  std::vector<double> errs;
  for (double h : hs) {
    const Matrix r = run_to(p, s, kind, h, static_cast<int>(std::lround(t_end / h)), start).r;
    errs.push_back((r - ref).norm());
  }
  return errs;
}

}  // namespace

TEST_CASE("damp_factor") {
  const auto sc = DissipationSchedule::constant(1.0);
  const auto c = DissipationSchedule::nag_c();
  CHECK(damp_factor(sc, 0, 0.05) == doctest::Approx(std::exp(-0.05)).epsilon(1e-15));
  CHECK(damp_factor(sc, 0, 0.05) == doctest::Approx(0.951229).epsilon(1e-6));
  CHECK(damp_factor(c, 0.1, 0.15) == doctest::Approx(8.0 / 27.0).epsilon(1e-14));
  for (const auto& s : {sc, c, DissipationSchedule::corrected(sc, 0.01), DissipationSchedule::corrected(c, 0.01)}) {
    CHECK(damp_factor(s, 0.3, 0.3) == 1.0);
    CHECK(damp_factor(s, 0.0, 0.0) == 1.0);
  }
  CHECK(damp_factor(c, 0.0, 0.05) == 0.0);
  const auto corr = DissipationSchedule::corrected(sc, 0.01);
  CHECK(damp_factor(corr, 1.0, 2.0) ==
        doctest::Approx(std::exp(-1.0) * std::exp(-0.01 * (4.0 - 1.0) / 2)).epsilon(1e-14));
  CHECK(corr.gamma_at(3.0) == doctest::Approx(1.03));
  CHECK(DissipationSchedule::corrected(c, 0.01).gamma_at(3.0) == doctest::Approx(1.0 + 0.03));
  // Backward intervals undo forward ones.
  CHECK(damp_factor(sc, 0.5, 0.2) * damp_factor(sc, 0.2, 0.5) == doctest::Approx(1.0));
}

TEST_CASE("kick_weight integrates r(s)/r(t_b)") {
  const auto check = [](const DissipationSchedule& s, double ta, double tb) {
    // Composite Simpson with many panels as the reference quadrature.
    const int m = 2000;
    const double w = (tb - ta) / m;
    double sum = 0;
    for (int i = 0; i <= m; ++i) {
      const double coef = (i == 0 || i == m) ? 1 : (i % 2 ? 4 : 2);
      sum += coef * s.damp_factor(ta + i * w, tb);
    }
    CHECK(s.kick_weight(ta, tb) == doctest::Approx(sum * w / 3).epsilon(1e-10));
  };
  check(DissipationSchedule::constant(1.0), 0.2, 0.7);
  check(DissipationSchedule::constant(0.0), 0.2, 0.7);
  check(DissipationSchedule::nag_c(), 0.0, 0.3);
  check(DissipationSchedule::nag_c(), 1.0, 1.25);
  check(DissipationSchedule::corrected(DissipationSchedule::constant(1.0), 0.5), 2.0, 2.4);
  check(DissipationSchedule::corrected(DissipationSchedule::nag_c(), 0.5), 0.5, 0.9);
}

TEST_CASE("gd_step") {
  SUBCASE("stationary point") {
    const auto p = ProblemSpec::leading_ev(SymMatrix::diagonal({3, 1}), 1);
    const auto s1 = gd_step(initial_state(p), p, 0.1);
    CHECK(s1.r == Matrix::Identity(2, 2));
    CHECK(s1.step == 1);
  }
  SUBCASE("hand 2x2") {
    Matrix a(2, 2);
    a << 1, 2, 2, 3;
    const auto p = ProblemSpec::leading_ev(SymMatrix(a), 1);
    const SkewMatrix f = force(p, Matrix::Identity(2, 2));
    CHECK(f.mat() == hand_2x2(-2));
    const auto s1 = gd_step(initial_state(p), p, 0.01);
    CHECK((s1.r - cayley(f, 0.01)).norm() <= 1e-15);
  }
  SUBCASE("objective decreases monotonically") {
    const auto p = ProblemSpec::leading_ev(testing::random_sym(5, 3), 2);
    const double h = 0.1 / spectral_norm(p.a());
    OptimizerState s = initial_state(p);
    double f = objective(p, s.r);
    for (int k = 0; k < 50; ++k) {
      s = gd_step(s, p, h);
      const double next = objective(p, s.r);
      CHECK(next <= f + 1e-14);
      f = next;
    }
  }
}

TEST_CASE("nag_strang_step") {
  SUBCASE("equilibrium only advances time") {
    const auto p = ProblemSpec::leading_ev(SymMatrix::diagonal({3, 2, 1}), 2);
    const auto s1 = nag_strang_step(initial_state(p), p, DissipationSchedule::constant(1.0), 0.1);
    CHECK(s1.r == Matrix::Identity(3, 3));
    CHECK(s1.xi.mat().isZero(0.0));
    CHECK(s1.t == doctest::Approx(0.1));
    CHECK(s1.step == 1);
  }
  SUBCASE("zero force composes the substeps by hand") {
    const auto p = ProblemSpec::leading_ev(SymMatrix(2), 1);
    OptimizerState s = initial_state(p);
    s.xi = SkewMatrix(hand_2x2(1));
    const auto s1 = nag_strang_step(s, p, DissipationSchedule::constant(1.0), 0.1);
    CHECK((s1.xi.mat() - std::exp(-0.1) * hand_2x2(1)).norm() <= 1e-15);
    CHECK((s1.r - cayley(SkewMatrix(std::exp(-0.05) * hand_2x2(1)), 0.1)).norm() <= 1e-15);
  }
  SUBCASE("halving h quarters the global error") {
    const auto e = global_errors(IntegratorKind::NagStrang, {0.1, 0.05});
    CHECK(e[0] / e[1] == doctest::Approx(4.0).epsilon(0.2));
  }
}

TEST_CASE("nag_order4_step") {
  const auto p = ProblemSpec::leading_ev(SymMatrix::diagonal({3, 2, 1}), 1);
  for (auto v : {Order4Version::V1, Order4Version::V2}) {
    const auto s1 = nag_order4_step(initial_state(p), p, DissipationSchedule::constant(1.0), 0.1, v);
    CHECK(s1.r == Matrix::Identity(3, 3));
    CHECK(s1.xi.mat().isZero(0.0));
  }
  SUBCASE("coefficients are consistent") {
    for (auto v : {Order4Version::V1, Order4Version::V2}) {
      const auto c = order4_coefficients(v);
      double a = 0, b = 0;
      for (double x : c.damp_kick) a += x;
      for (double x : c.drift) b += x;
      CHECK(a == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(b == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(c.damp_kick.size() == c.drift.size() + 1);
      for (std::size_t i = 0; i < c.damp_kick.size(); ++i)
        CHECK(c.damp_kick[i] == c.damp_kick[c.damp_kick.size() - 1 - i]);
    }
  }
  SUBCASE("halving h divides the global error by 16") {
    for (auto kind : {IntegratorKind::NagOrder4V1, IntegratorKind::NagOrder4V2}) {
      const auto e = global_errors(kind, {0.2, 0.1});
      CHECK(e[0] / e[1] == doctest::Approx(16.0).epsilon(0.3));
    }
  }
}

TEST_CASE("Lie-GD is first order") {
  const auto e = global_errors(IntegratorKind::LieGD, {0.1, 0.05});
  CHECK(e[0] / e[1] == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("energy") {
  const auto p = ProblemSpec::leading_ev(SymMatrix::diagonal({3, 1}), 1);
  CHECK(energy(initial_state(p), p) == doctest::Approx(-3.0));
  const auto z = ProblemSpec::leading_ev(SymMatrix(2), 1);
  OptimizerState s = initial_state(z);
  s.xi = SkewMatrix(hand_2x2(1));
  CHECK(energy(s, z) == doctest::Approx(1.0));
}

TEST_CASE("structured drift matches the dense approximant") {
  const Index n = 12, l = 3;
  const Matrix r = cayley(testing::random_skew(n, 40), 1.0);
  const SkewMatrix xi = skew_from_lower_block(n, l, testing::gaussian(n - l, l, 41));
  for (double tau : {0.01, 0.3, 2.0}) {
    CHECK((drift(r, xi, tau, Approximant::Cayley, l) - r * cayley(xi, tau)).norm() <= 1e-13);
    CHECK((drift(r, xi, tau, Approximant::Pade22, l) - r * pade22_exp(xi, tau)).norm() <= 1e-13);
  }
  const SkewMatrix dense = testing::random_skew(n, 42);
  CHECK((drift(r, dense, 0.2, Approximant::Cayley, l) - r * cayley(dense, 0.2)).norm() <= 1e-13);
  CHECK(drift(r, SkewMatrix::zero(n), 0.5, Approximant::Pade22, l) == r);
}

TEST_CASE("every integrator preserves the group and the algebra") {
  const Index n = 20;
  const SymMatrix a = testing::random_sym(n, 50);
  const SymMatrix b = testing::random_spd(n, 51, 50.0);
  const std::vector<ProblemSpec> problems{ProblemSpec::full_spectrum(a), ProblemSpec::leading_ev(a, 3),
                                          ProblemSpec::leading_gev(a, b, 3)};
  const double h = 0.05;
  const int steps = 200;
  for (const auto& p : problems) {
    for (auto kind : {IntegratorKind::LieGD, IntegratorKind::NagStrang, IntegratorKind::NagOrder4V1,
                      IntegratorKind::NagOrder4V2}) {
      for (const auto& sched : {DissipationSchedule::constant(1.0), DissipationSchedule::nag_c()}) {
        OptimizerState s = initial_state(p);
        double worst = 0;
        for (int k = 1; k <= steps; ++k) {
          s = advance(s, p, p.a(), sched, h, kind);
          REQUIRE(s.xi.mat() == Matrix(-s.xi.mat().transpose()));
          worst = std::max(worst, group_drift(p, s.r) / k);
        }
        // GEV drift is relative to the conditioning of L.
        const double cond = p.has_constraint() ? 50.0 : 1.0;
        CHECK(worst <= 100.0 * n * kEps * cond);
      }
    }
  }
}

TEST_CASE("damping substeps apply the exact factor") {
  const auto p = ProblemSpec::leading_ev(testing::random_sym(6, 60), 2);
  for (const auto& sched : {DissipationSchedule::constant(1.0), DissipationSchedule::nag_c(),
                            DissipationSchedule::corrected(DissipationSchedule::constant(1.0), 0.01)}) {
    OptimizerState s = initial_state(p);
    const double h = 0.1;
    s = advance(s, p, p.a(), sched, h, IntegratorKind::NagStrang);  // leave the t = 0 singularity
    std::vector<double> factors;
    StepHooks hooks;
    hooks.on_damp = [&](double factor, const SkewMatrix& before, const SkewMatrix& after) {
      factors.push_back(factor);
      CHECK(after.mat() == Matrix(factor * before.mat()));
    };
    const double t = s.t;
    advance(s, p, p.a(), sched, h, IntegratorKind::NagStrang, &hooks);
    REQUIRE(factors.size() == 2);
    CHECK(factors[0] == damp_factor(sched, t, t + h / 2));
    CHECK(factors[1] == damp_factor(sched, t + h / 2, t + h));
  }
}

TEST_CASE("NAG-C annihilates the initial momentum") {
  const auto p = ProblemSpec::leading_ev(SymMatrix(3), 1);
  OptimizerState s = initial_state(p);
  s.xi = SkewMatrix(testing::gaussian(3, 3, 70));
  std::vector<double> factors;
  StepHooks hooks;
  hooks.on_damp = [&](double f, const SkewMatrix&, const SkewMatrix& after) {
    factors.push_back(f);
    if (factors.size() == 1) CHECK(after.mat().isZero(0.0));
  };
  const auto s1 = advance(s, p, p.a(), DissipationSchedule::nag_c(), 0.1, IntegratorKind::NagStrang, &hooks);
  CHECK(factors.front() == 0.0);
  CHECK(s1.xi.mat().isZero(0.0));
}

TEST_CASE("energy dissipation identity along NAG-SC") {
  const auto p = ProblemSpec::leading_ev(testing::random_sym(5, 80), 2);
  const double gamma = 1.0;
  const auto sched = DissipationSchedule::constant(gamma);
  const double h = 1e-3;
  OptimizerState s = initial_state(p);
  s.xi = SkewMatrix(testing::gaussian(5, 5, 81));
  double worst_identity = 0, worst_increase = 0;
  for (int k = 0; k < 2000; ++k) {
    const auto next = nag_strang_step(s, p, sched, h);
    const double de = energy(next, p) - energy(s, p);
    SkewMatrix mid = s.xi;
    mid.add_scaled(next.xi, 1.0);
    mid.scale(0.5);
    worst_identity = std::max(worst_identity, std::abs(de / h + gamma * mid.norm_sq()));
    worst_increase = std::max(worst_increase, de);
    s = next;
  }
  CHECK(worst_identity <= 1e-3);
  CHECK(worst_increase <= 1e-6);
}

TEST_CASE("shifting A leaves every trajectory unchanged") {
  const auto p = ProblemSpec::leading_ev(testing::random_sym(6, 90), 2);
  const auto q = p.with_matrix(p.a().shifted(10.0));
  for (auto kind : {IntegratorKind::LieGD, IntegratorKind::NagStrang, IntegratorKind::NagOrder4V1,
                    IntegratorKind::NagOrder4V2}) {
    OptimizerState s = initial_state(p), t = initial_state(q);
    const auto sched = DissipationSchedule::constant(1.0);
    for (int k = 0; k < 50; ++k) {
      s = advance(s, p, p.a(), sched, 0.01, kind);
      t = advance(t, q, q.a(), sched, 0.01, kind);
    }
    CHECK((s.r - t.r).norm() <= 1e-12);
  }
}
