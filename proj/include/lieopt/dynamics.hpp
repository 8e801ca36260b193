#pragma once

#include <array>
#include <functional>
#include <span>

#include "lieopt/matrix.hpp"
#include "lieopt/problems.hpp"

namespace lieopt {

/// Friction schedule γ(t) = r'(t)/r(t), described through r so that damping
/// over an interval can be applied exactly as r(t_a)/r(t_b).
///
///   Constant   r = exp(γt)
///   NagC       r = t³              (γ = 3/t)
///   Corrected  r = exp(ct²/2)·r_base  (γ = γ_base + ct)
class DissipationSchedule {
 public:
  enum class Base { Constant, NagC };

  static DissipationSchedule constant(double gamma);
  static DissipationSchedule nag_c();
  static DissipationSchedule corrected(const DissipationSchedule& base, double c);

  Base base() const { return base_; }
  double gamma() const { return gamma_; }
  double correction() const { return c_; }
  bool is_corrected() const { return c_ > 0.0; }

  /// r(t_a)/r(t_b). Intervals may run backwards (negative splitting
  /// coefficients), in which case the factor exceeds one.
  double damp_factor(double t_a, double t_b) const;

  /// ∫_{t_a}^{t_b} r(s)/r(t_b) ds: the weight a constant force receives when
  /// ξ' = -γ(t)ξ + F is integrated exactly over [t_a, t_b].
  double kick_weight(double t_a, double t_b) const;

  double gamma_at(double t) const;

 private:
  DissipationSchedule(Base base, double gamma, double c) : base_(base), gamma_(gamma), c_(c) {}

  Base base_;
  double gamma_;
  double c_;
};

double damp_factor(const DissipationSchedule& schedule, double t_a, double t_b);

enum class IntegratorKind { LieGD, NagStrang, NagOrder4V1, NagOrder4V2 };
enum class Order4Version { V1, V2 };
enum class Approximant { Cayley, Pade22 };

/// Optional instrumentation for a single step.
struct StepHooks {
  // Called with the objective matrix each time a force is evaluated.
  std::function<void(const SymMatrix& a)> on_force;
  // Called around every damping substep with the factor and ξ before/after.
  std::function<void(double factor, const SkewMatrix& before, const SkewMatrix& after)> on_damp;
};

/// Palindromic splitting coefficients, listed in application order.
/// `damp_kick` are the φ₂ (friction + force) fractions, `drift` the φ₁
/// (R ← R·exp) fractions; damp_kick has one more entry than drift.
struct SplittingCoefficients {
  std::vector<double> damp_kick;
  std::vector<double> drift;
};

SplittingCoefficients order4_coefficients(Order4Version version);

/// R ← R·Q where Q approximates exp(τξ). When ξ has the block form
/// [[0, -Pᵀ], [P, 0]] for the given l, the update is done in O(n²l) via a
/// rank-2l Woodbury identity; otherwise via a dense LU solve.
Matrix drift(const Matrix& r, const SkewMatrix& xi, double tau, Approximant approx, Index l);

OptimizerState gd_step(const OptimizerState& state, const ProblemSpec& problem, double h);

OptimizerState nag_strang_step(const OptimizerState& state, const ProblemSpec& problem,
                               const DissipationSchedule& schedule, double h);

OptimizerState nag_order4_step(const OptimizerState& state, const ProblemSpec& problem,
                               const DissipationSchedule& schedule, double h,
                               Order4Version version);

/// One step of any integrator, with the force computed from `a` rather than
/// problem.a(). This is the entry point used by the stochastic mode.
OptimizerState advance(const OptimizerState& state, const ProblemSpec& problem, const SymMatrix& a,
                       const DissipationSchedule& schedule, double h, IntegratorKind kind,
                       const StepHooks* hooks = nullptr);

// ½ tr(ξᵀξ) + f(R)
double energy(const OptimizerState& state, const ProblemSpec& problem);
double energy(const OptimizerState& state, const ProblemSpec& problem, const SymMatrix& a);

}  // namespace lieopt
