#include "lieopt/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace lieopt {

DissipationSchedule DissipationSchedule::constant(double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("constant schedule needs gamma >= 0");
  return DissipationSchedule(Base::Constant, gamma, 0.0);
}

DissipationSchedule DissipationSchedule::nag_c() { return DissipationSchedule(Base::NagC, 0.0, 0.0); }

DissipationSchedule DissipationSchedule::corrected(const DissipationSchedule& base, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("corrected schedule needs c > 0");
  if (base.is_corrected()) throw std::invalid_argument("corrected schedule base is already corrected");
  return DissipationSchedule(base.base_, base.gamma_, c);
}

double DissipationSchedule::damp_factor(double t_a, double t_b) const {
  if (t_a == t_b) return 1.0;
  double factor = 1.0;
  if (base_ == Base::Constant) {
    factor = std::exp(-gamma_ * (t_b - t_a));
  } else {
    if (t_b == 0.0) throw std::domain_error("damp_factor: r(0) = 0 for the NAG-C schedule");
    const double ratio = t_a / t_b;
    factor = ratio * ratio * ratio;
  }
  if (c_ > 0.0) factor *= std::exp(-0.5 * c_ * (t_b - t_a) * (t_b + t_a));
  return factor;
}

double DissipationSchedule::kick_weight(double t_a, double t_b) const {
  const double span = t_b - t_a;
  if (span == 0.0) return 0.0;
  if (c_ == 0.0) {
    if (base_ == Base::Constant) {
      return gamma_ == 0.0 ? span : -std::expm1(-gamma_ * span) / gamma_;
    }
    if (t_b == 0.0) throw std::domain_error("kick_weight: r(0) = 0 for the NAG-C schedule");
    // (t_b⁴ - t_a⁴) / (4 t_b³), factored to avoid cancellation.
    return span * (t_b + t_a) * (t_b * t_b + t_a * t_a) / (4.0 * t_b * t_b * t_b);
  }
  // No closed form once the Gaussian factor enters; 5-point Gauss-Legendre is
  // exact to degree 9, far below the splitting error for step-sized intervals.
  static constexpr std::array<double, 5> nodes = {0.0, -0.5384693101056831, 0.5384693101056831,
                                                  -0.9061798459386640, 0.9061798459386640};
  static constexpr std::array<double, 5> weights = {0.5688888888888889, 0.4786286704993665,
                                                    0.4786286704993665, 0.2369268850561891,
                                                    0.2369268850561891};
  const double mid = 0.5 * (t_a + t_b);
  const double half = 0.5 * span;
  double sum = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    sum += weights[k] * damp_factor(mid + half * nodes[k], t_b);
  }
  return half * sum;
}

double DissipationSchedule::gamma_at(double t) const {
  const double base = base_ == Base::Constant ? gamma_ : 3.0 / t;
  return base + c_ * t;
}

double damp_factor(const DissipationSchedule& schedule, double t_a, double t_b) {
  return schedule.damp_factor(t_a, t_b);
}

SplittingCoefficients order4_coefficients(Order4Version version) {
  if (version == Order4Version::V1) {
    const double a1 = 0.079203696431196, a2 = 0.353172906049774, a3 = -0.042065080357719,
                 a4 = 0.219376955753500;
    const double b1 = 0.209515106613362, b2 = -0.143851773179818, b3 = 0.434336666566456;
    return {{a1, a2, a3, a4, a3, a2, a1}, {b1, b2, b3, b3, b2, b1}};
  }
  const double g = 1.0 / (2.0 - std::cbrt(2.0));
  const double a1 = g / 2.0, a2 = (1.0 - g) / 2.0;
  const double b1 = g, b2 = 1.0 - 2.0 * g;
  return {{a1, a2, a2, a1}, {b1, b2, b1}};
}

namespace {

bool is_block_offdiagonal(const Matrix& xi, Index l) {
  const Index n = xi.rows();
  return (xi.topLeftCorner(l, l).array() == 0.0).all() &&
         (xi.bottomRightCorner(n - l, n - l).array() == 0.0).all();
}

// R·p(-X)⁻¹p(X) with X = τξ = UVᵀ, U = τ[P̃, -E], V = [E, P̃], where
// P̃ = [0; P] and E = [I_l; 0]. Powers of X stay in the span of U, Vᵀ:
// X^k = U K^{k-1} Vᵀ with K = VᵀU, so p(±X) = I + U c±(K) Vᵀ and Woodbury
// gives Q = I + U G Vᵀ with G = C - D (I + K D)⁻¹ (I + K C).
Matrix structured_drift(const Matrix& r, const Matrix& p, double tau, Approximant approx, Index l) {
  const Index n = r.rows();
  const Index m = 2 * l;
  Matrix k = Matrix::Zero(m, m);
  k.topRightCorner(l, l) = -tau * Matrix::Identity(l, l);
  k.bottomLeftCorner(l, l) = tau * (p.transpose() * p);

  const Matrix id = Matrix::Identity(m, m);
  Matrix c = 0.5 * id;
  Matrix d = -0.5 * id;
  if (approx == Approximant::Pade22) {
    c += k / 12.0;
    d += k / 12.0;
  }
  const Matrix s = id + k * d;
  Eigen::PartialPivLU<Matrix> lu(s);
  const Matrix g = c - d * lu.solve(id + k * c);

  const auto r1 = r.leftCols(l);
  const auto r2 = r.rightCols(n - l);
  Matrix ru(n, m);
  ru.leftCols(l) = tau * (r2 * p);
  ru.rightCols(l) = -tau * r1;
  const Matrix y = ru * g;

  Matrix out(n, n);
  out.leftCols(l) = r1 + y.leftCols(l);
  out.rightCols(n - l) = r2 + y.rightCols(l) * p.transpose();
  return out;
}

}  // namespace

Matrix drift(const Matrix& r, const SkewMatrix& xi, double tau, Approximant approx, Index l) {
  const Index n = r.rows();
  if (xi.size() != n || r.cols() != n) throw DimensionMismatch("drift: shape");
  if (l > 0 && l < n && is_block_offdiagonal(xi.mat(), l)) {
    const Matrix p = xi.mat().bottomLeftCorner(n - l, l);
    if ((p.array() == 0.0).all()) return r;
    if (!p.allFinite()) throw SingularSolve("drift: non-finite velocity");
    return structured_drift(r, p, tau, approx, l);
  }
  const Matrix q = approx == Approximant::Cayley ? cayley(xi, tau) : pade22_exp(xi, tau);
  return r * q;
}

namespace {

struct StepContext {
  const ProblemSpec& problem;
  const SymMatrix& a;
  const DissipationSchedule& schedule;
  const StepHooks* hooks;

  SkewMatrix eval_force(const Matrix& r) const {
    if (hooks && hooks->on_force) hooks->on_force(a);
    return force(problem, a, r);
  }

  void damp(SkewMatrix& xi, double t_a, double t_b) const {
    const double factor = schedule.damp_factor(t_a, t_b);
    if (hooks && hooks->on_damp) {
      const SkewMatrix before = xi;
      xi.scale(factor);
      hooks->on_damp(factor, before, xi);
    } else {
      xi.scale(factor);
    }
  }
};

OptimizerState finish(OptimizerState next, const OptimizerState& prev, double h) {
  next.step = prev.step + 1;
  next.t = static_cast<double>(next.step) * h;
  return next;
}

OptimizerState gd_impl(const OptimizerState& state, const StepContext& ctx, double h) {
  const SkewMatrix f = ctx.eval_force(state.r);
  OptimizerState next;
  next.r = drift(state.r, f, h, Approximant::Cayley, ctx.problem.l());
  next.xi = state.xi;
  return finish(std::move(next), state, h);
}

OptimizerState strang_impl(const OptimizerState& state, const StepContext& ctx, double h) {
  const double t0 = state.t;
  const double t_half = t0 + 0.5 * h;
  const double t1 = t0 + h;

  SkewMatrix xi = state.xi;
  xi.add_scaled(ctx.eval_force(state.r), 0.5 * h);
  ctx.damp(xi, t0, t_half);
  OptimizerState next;
  next.r = drift(state.r, xi, h, Approximant::Cayley, ctx.problem.l());
  ctx.damp(xi, t_half, t1);
  xi.add_scaled(ctx.eval_force(next.r), 0.5 * h);
  next.xi = std::move(xi);
  return finish(std::move(next), state, h);
}

OptimizerState order4_impl(const OptimizerState& state, const StepContext& ctx, double h,
                           Order4Version version) {
  const SplittingCoefficients coeffs = order4_coefficients(version);
  Matrix r = state.r;
  SkewMatrix xi = state.xi;
  double t = state.t;
  for (std::size_t k = 0; k < coeffs.damp_kick.size(); ++k) {
    // φ₂: ξ' = -γ(t)ξ + F(R) with R frozen, solved exactly.
    const double t_next = t + coeffs.damp_kick[k] * h;
    const SkewMatrix f = ctx.eval_force(r);
    ctx.damp(xi, t, t_next);
    xi.add_scaled(f, ctx.schedule.kick_weight(t, t_next));
    t = t_next;
    // φ₁: R' = Rξ with ξ frozen.
    if (k < coeffs.drift.size()) {
      r = drift(r, xi, coeffs.drift[k] * h, Approximant::Pade22, ctx.problem.l());
    }
  }
  OptimizerState next;
  next.r = std::move(r);
  next.xi = std::move(xi);
  return finish(std::move(next), state, h);
}

}  // namespace

OptimizerState advance(const OptimizerState& state, const ProblemSpec& problem, const SymMatrix& a,
                       const DissipationSchedule& schedule, double h, IntegratorKind kind,
                       const StepHooks* hooks) {
  if (!(h > 0.0)) throw std::invalid_argument("step size must be positive");
  const StepContext ctx{problem, a, schedule, hooks};
  switch (kind) {
    case IntegratorKind::LieGD:
      return gd_impl(state, ctx, h);
    case IntegratorKind::NagStrang:
      return strang_impl(state, ctx, h);
    case IntegratorKind::NagOrder4V1:
      return order4_impl(state, ctx, h, Order4Version::V1);
    case IntegratorKind::NagOrder4V2:
      return order4_impl(state, ctx, h, Order4Version::V2);
  }
  throw std::logic_error("unknown integrator");
}

OptimizerState gd_step(const OptimizerState& state, const ProblemSpec& problem, double h) {
  return advance(state, problem, problem.a(), DissipationSchedule::constant(0.0), h,
                 IntegratorKind::LieGD);
}

OptimizerState nag_strang_step(const OptimizerState& state, const ProblemSpec& problem,
                               const DissipationSchedule& schedule, double h) {
  return advance(state, problem, problem.a(), schedule, h, IntegratorKind::NagStrang);
}

OptimizerState nag_order4_step(const OptimizerState& state, const ProblemSpec& problem,
                               const DissipationSchedule& schedule, double h,
                               Order4Version version) {
  return advance(state, problem, problem.a(), schedule, h,
                 version == Order4Version::V1 ? IntegratorKind::NagOrder4V1
                                              : IntegratorKind::NagOrder4V2);
}

double energy(const OptimizerState& state, const ProblemSpec& problem) {
  return energy(state, problem, problem.a());
}

double energy(const OptimizerState& state, const ProblemSpec& problem, const SymMatrix& a) {
  return 0.5 * state.xi.norm_sq() + objective(problem, a, state.r);
}

}  // namespace lieopt
