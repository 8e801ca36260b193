#include "lieopt/stochastic.hpp"

#include <cmath>

namespace lieopt {

MatrixBatch::MatrixBatch(std::vector<SymMatrix> members) : members_(std::move(members)) {
  if (members_.empty()) throw EmptyBatch("MatrixBatch: no members");
  const Index n = members_.front().size();
  Matrix sum = Matrix::Zero(n, n);
  for (const auto& m : members_) {
    if (m.size() != n) throw DimensionMismatch("MatrixBatch: members differ in size");
    sum += m.mat();
  }
  mean_ = SymMatrix(Matrix(sum / static_cast<double>(members_.size())));
}

SampledMember sample_member(const MatrixBatch& batch, SamplerState& sampler) {
  if (batch.size() == 0) throw EmptyBatch("sample_member: empty batch");
  const std::size_t k = sampler.draw(batch.size());
  return {k, batch.member(k)};
}

OptimizerState stochastic_step(const OptimizerState& state, const ProblemSpec& spec,
                               const MatrixBatch& batch, SamplerState& sampler,
                               const DissipationSchedule& schedule, double h, IntegratorKind kind,
                               const StepHooks* hooks) {
  if (batch.dim() != spec.n()) throw DimensionMismatch("stochastic_step: batch dimension");
  const SampledMember sample = sample_member(batch, sampler);
  return advance(state, spec, sample.matrix, schedule, h, kind, hooks);
}

MatrixBatch make_synthetic_batch(const SymMatrix& a, std::size_t k, double sigma_scale,
                                 std::uint64_t seed) {
  if (k == 0) throw EmptyBatch("make_synthetic_batch: K must be >= 1");
  const Index n = a.size();
  const double scale = sigma_scale / std::sqrt(static_cast<double>(n));
  CounterRng rng(seed);
  std::vector<SymMatrix> members;
  members.reserve(k);
  for (std::size_t m = 0; m < k; ++m) {
    Matrix xi(n, n);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) xi(i, j) = rng.normal();
    Matrix member = a.mat() + (xi + xi.transpose()) * scale;
    members.emplace_back(member);
  }
  return MatrixBatch(std::move(members));
}

}  // namespace lieopt
