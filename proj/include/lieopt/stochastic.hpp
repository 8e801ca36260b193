#pragma once

#include <cstdint>
#include <vector>

#include "lieopt/dynamics.hpp"
#include "lieopt/random.hpp"

namespace lieopt {

class EmptyBatch : public Error {
 public:
  using Error::Error;
};

/// K noisy realizations of the objective matrix. The mean is computed once
/// from the realized members and serves only as the ground-truth target.
class MatrixBatch {
 public:
  explicit MatrixBatch(std::vector<SymMatrix> members);

  std::size_t size() const { return members_.size(); }
  Index dim() const { return mean_.size(); }
  const SymMatrix& member(std::size_t k) const { return members_.at(k); }
  const SymMatrix& mean() const { return mean_; }

 private:
  std::vector<SymMatrix> members_;
  SymMatrix mean_;
};

/// Per-trajectory sampler. Indices are zero-based.
class SamplerState {
 public:
  explicit SamplerState(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), rng_(seed, stream) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t position() const { return rng_.position(); }
  std::size_t draw(std::size_t bound) { return static_cast<std::size_t>(rng_.below(bound)); }

 private:
  std::uint64_t seed_;
  CounterRng rng_;
};

struct SampledMember {
  std::size_t index;
  const SymMatrix& matrix;
};

SampledMember sample_member(const MatrixBatch& batch, SamplerState& sampler);

/// One integrator step with A replaced by a single freshly drawn A_κ; every
/// force evaluation inside the step uses that same member. B is taken from
/// `spec` and is never sampled.
OptimizerState stochastic_step(const OptimizerState& state, const ProblemSpec& spec,
                               const MatrixBatch& batch, SamplerState& sampler,
                               const DissipationSchedule& schedule, double h, IntegratorKind kind,
                               const StepHooks* hooks = nullptr);

/// Members A + (Ξ_k + Ξ_kᵀ)·sigma_scale/√n with i.i.d. standard normal Ξ_k.
MatrixBatch make_synthetic_batch(const SymMatrix& a, std::size_t k, double sigma_scale,
                                 std::uint64_t seed);

}  // namespace lieopt
