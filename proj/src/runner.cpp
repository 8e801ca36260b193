#include "lieopt/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "lieopt/baselines.hpp"
#include "lieopt/dataio.hpp"
#include "lieopt/random.hpp"

namespace lieopt {

namespace {

struct MethodName {
  Method method;
  const char* name;
};

constexpr MethodName kMethodNames[] = {
    {Method::Gd, "gd"},
    {Method::NagSc, "nag-sc"},
    {Method::NagC, "nag-c"},
    {Method::NagScCorrected, "nag-sc-corrected"},
    {Method::NagCCorrected, "nag-c-corrected"},
    {Method::GhaEuler, "gha-euler"},
    {Method::GhaRk4, "gha-rk4"},
};

}  // namespace

Method parse_method(const std::string& name) {
  for (const auto& m : kMethodNames)
    if (name == m.name) return m.method;
  throw ConfigError("unknown method '" + name + "'");
}

std::string to_string(Method m) {
  for (const auto& entry : kMethodNames)
    if (entry.method == m) return entry.name;
  return "?";
}

SplitOrder parse_order(const std::string& name) {
  if (name == "2") return SplitOrder::Strang;
  if (name == "4a") return SplitOrder::FourA;
  if (name == "4b") return SplitOrder::FourB;
  throw ConfigError("unknown order '" + name + "' (expected 2, 4a or 4b)");
}

std::string to_string(SplitOrder o) {
  switch (o) {
    case SplitOrder::Strang: return "2";
    case SplitOrder::FourA: return "4a";
    case SplitOrder::FourB: return "4b";
  }
  return "?";
}

bool is_gha(Method m) { return m == Method::GhaEuler || m == Method::GhaRk4; }

void validate(const RunConfig& cfg) {
  const std::string& p = cfg.problem;
  if (p != "ev-full" && p != "ev-leading" && p != "gev" && p != "lda") {
    throw ConfigError("unknown problem '" + p + "'");
  }
  if (cfg.steps < 1) throw ConfigError("--steps must be >= 1");
  if (cfg.h < 0.0 || !std::isfinite(cfg.h)) throw ConfigError("--h must be positive");
  if (cfg.gha_h < 0.0 || !std::isfinite(cfg.gha_h)) throw ConfigError("--gha-h must be positive");
  if (cfg.n < 1) throw ConfigError("--n must be >= 1");
  if (p != "ev-full" && (cfg.l < 1 || cfg.l > cfg.n)) throw ConfigError("--l must lie in [1, n]");
  if (cfg.trace_every < 1) throw ConfigError("--trace-every must be >= 1");
  if (!(cfg.gamma >= 0.0)) throw ConfigError("--gamma must be >= 0");
  const bool corrected = cfg.method == Method::NagScCorrected || cfg.method == Method::NagCCorrected;
  if (corrected && !(cfg.c > 0.0)) throw ConfigError("corrected methods require --c > 0");
  if (p == "ev-full" && is_gha(cfg.method)) throw ConfigError("GHA does not apply to ev-full");
  if (cfg.matrix != "goe" && cfg.matrix != "wishart") throw ConfigError("--matrix must be goe or wishart");
  if (cfg.batch > 0 && p == "ev-full") throw ConfigError("stochastic mode needs a leading problem");
  if (cfg.gha_init != "group" && cfg.gha_init != "identity") throw ConfigError("--gha-init must be group or identity");
  if (cfg.init != "canonical" && cfg.init != "rotated") throw ConfigError("--init must be canonical or rotated");
  if (!(cfg.sigma_scale >= 0.0)) throw ConfigError("--sigma-scale must be >= 0");
}

std::string config_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["problem"] = cfg.problem;
  j["method"] = to_string(cfg.method);
  j["order"] = to_string(cfg.order);
  j["n"] = cfg.n;
  j["l"] = cfg.l;
  j["h"] = cfg.h;
  j["gha_h"] = cfg.gha_h;
  j["gamma"] = cfg.gamma;
  j["c"] = cfg.c;
  j["steps"] = cfg.steps;
  j["seed"] = cfg.seed;
  j["trace_every"] = cfg.trace_every;
  j["matrix"] = cfg.matrix;
  j["batch"] = cfg.batch;
  j["sigma_scale"] = cfg.sigma_scale;
  j["a_path"] = cfg.a_path;
  j["b_path"] = cfg.b_path;
  j["images_path"] = cfg.images_path;
  j["labels_path"] = cfg.labels_path;
  j["cache_path"] = cfg.cache_path;
  j["crop"] = cfg.crop;
  j["nogap"] = cfg.nogap;
  j["gha_init"] = cfg.gha_init;
  j["init"] = cfg.init;
  j["timing"] = cfg.timing;
  j["format"] = cfg.format == TraceFormat::Csv ? "csv" : "jsonl";
  j["out"] = cfg.out;
  return j.dump(2);
}

namespace {

constexpr std::uint64_t kBatchSeedSalt = 0x5EED0F0BA7C4ULL;
constexpr std::uint64_t kConstraintSeedSalt = 0xB0B0C0C0ULL;
constexpr std::uint64_t kStartStream = 7;

SymMatrix synthetic_matrix(const RunConfig& cfg) {
  return cfg.matrix == "wishart" ? gen_negative_wishart(cfg.n, cfg.seed) : gen_goe(cfg.n, cfg.seed);
}

// I + ΞΞᵀ/n: SPD with condition number of order a few.
SymMatrix synthetic_constraint(Index n, std::uint64_t seed) {
  const SymMatrix w = gen_negative_wishart(n, seed ^ kConstraintSeedSalt);
  return SymMatrix(Matrix(Matrix::Identity(n, n) - w.mat() * (2.0 / static_cast<double>(n))));
}

std::filesystem::path data_path(const std::string& explicit_path, const char* default_name) {
  if (!explicit_path.empty()) return explicit_path;
  const char* root = std::getenv("LIEOPT_DATA_DIR");
  return std::filesystem::path(root ? root : ".") / default_name;
}

ScatterPair load_lda_pair(RunConfig& cfg) {
  if (!cfg.cache_path.empty() && std::filesystem::exists(cfg.cache_path)) {
    return read_pair_blob(cfg.cache_path);
  }
  const auto images_path = data_path(cfg.images_path, "train-images-idx3-ubyte");
  const auto labels_path = data_path(cfg.labels_path, "train-labels-idx1-ubyte");
  cfg.images_path = images_path.string();
  cfg.labels_path = labels_path.string();
  const auto images = parse_idx(read_bytes(images_path));
  const auto labels = parse_idx(read_bytes(labels_path));
  if (!std::holds_alternative<IdxImages>(images)) throw DataError(images_path.string() + ": not an image file");
  if (!std::holds_alternative<IdxLabels>(labels)) throw DataError(labels_path.string() + ": not a label file");
  const ScatterPair pair =
      scatter_matrices(mnist_vectors(std::get<IdxImages>(images), std::get<IdxLabels>(labels), cfg.crop));
  if (!cfg.cache_path.empty()) write_pair_blob(cfg.cache_path, pair);
  return pair;
}

}  // namespace

Matrix start_point(const ProblemSpec& spec, const RunConfig& cfg) {
  Matrix r0 = initial_state(spec).r;
  if (cfg.init != "rotated") return r0;
  const Index n = spec.n();
  CounterRng rng(cfg.seed, kStartStream);
  Matrix g(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) g(i, j) = rng.normal();
  return r0 * cayley(SkewMatrix(g), 1.0);
}

PreparedProblem prepare_problem(RunConfig& cfg) {
  validate(cfg);
  SymMatrix a;
  std::optional<SymMatrix> b;

  if (cfg.problem == "lda") {
    ScatterPair pair = normalize_pair(load_lda_pair(cfg));
    if (cfg.nogap) pair = remove_eigengap(pair);
    a = std::move(pair.a);
    b = std::move(pair.b);
  } else {
    a = cfg.a_path.empty() ? synthetic_matrix(cfg) : load_matrix(cfg.a_path, 0);
    if (cfg.problem == "gev") {
      b = cfg.b_path.empty() ? synthetic_constraint(a.size(), cfg.seed) : load_matrix(cfg.b_path, 1);
    }
  }
  cfg.n = a.size();
  if (cfg.problem == "ev-full") cfg.l = cfg.n;
  if (cfg.l > cfg.n) throw ConfigError("--l exceeds the matrix dimension " + std::to_string(cfg.n));

  std::optional<MatrixBatch> batch;
  if (cfg.batch > 0) {
    batch = make_synthetic_batch(a, cfg.batch, cfg.sigma_scale, cfg.seed ^ kBatchSeedSalt);
    a = batch->mean();
  }

  auto spec = [&]() {
    if (cfg.problem == "ev-full") return ProblemSpec::full_spectrum(std::move(a));
    if (b) return ProblemSpec::leading_gev(std::move(a), std::move(*b), cfg.l);
    return ProblemSpec::leading_ev(std::move(a), cfg.l);
  }();
  GroundTruth truth = ground_truth(spec);
  return PreparedProblem{std::move(spec), std::move(batch), std::move(truth)};
}

namespace {

DissipationSchedule schedule_for(const RunConfig& cfg) {
  switch (cfg.method) {
    case Method::NagC: return DissipationSchedule::nag_c();
    case Method::NagScCorrected:
      return DissipationSchedule::corrected(DissipationSchedule::constant(cfg.gamma), cfg.c);
    case Method::NagCCorrected:
      return DissipationSchedule::corrected(DissipationSchedule::nag_c(), cfg.c);
    default: return DissipationSchedule::constant(cfg.gamma);
  }
}

IntegratorKind integrator_for(const RunConfig& cfg) {
  if (cfg.method == Method::Gd) return IntegratorKind::LieGD;
  switch (cfg.order) {
    case SplitOrder::FourA: return IntegratorKind::NagOrder4V1;
    case SplitOrder::FourB: return IntegratorKind::NagOrder4V2;
    default: return IntegratorKind::NagStrang;
  }
}

class Stopwatch {
 public:
  explicit Stopwatch(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
  std::int64_t elapsed_ns() const {
    if (!enabled_) return 0;
    return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

bool should_record(std::int64_t step, const RunConfig& cfg) {
  return step % cfg.trace_every == 0 || step == cfg.steps;
}

TraceRecord lie_record(const PreparedProblem& prep, const OptimizerState& s, std::int64_t elapsed) {
  const auto metrics = error_metrics(prep.spec, s.r, prep.truth);
  TraceRecord r;
  r.step = s.step;
  r.t = s.t;
  r.objective = objective(prep.spec, s.r);
  r.energy = energy(s, prep.spec);
  r.group_drift = group_drift(prep.spec, s.r);
  r.skew_drift = (s.xi.mat() + s.xi.mat().transpose()).norm();
  r.eig_err = metrics.eig_err;
  r.subspace_err = metrics.subspace_err;
  r.elapsed_ns = elapsed;
  return r;
}

TraceRecord gha_record(const PreparedProblem& prep, const GhaState& g, double h, std::int64_t elapsed) {
  const ProblemSpec& spec = prep.spec;
  const Index n = spec.n();
  const Index l = spec.l();
  Matrix padded = Matrix::Zero(n, n);
  padded.leftCols(l) = g.v;
  const auto metrics = error_metrics(spec, padded, prep.truth);
  TraceRecord r;
  r.step = g.step;
  r.t = static_cast<double>(g.step) * h;
  r.objective = -(g.v.transpose() * spec.a().mat() * g.v).trace();
  r.energy = r.objective;
  r.group_drift = (g.v.transpose() * spec.b().mat() * g.v - Matrix::Identity(l, l)).norm();
  r.skew_drift = 0.0;
  r.eig_err = metrics.eig_err;
  r.subspace_err = metrics.subspace_err;
  r.elapsed_ns = elapsed;
  return r;
}

bool finite_record(const TraceRecord& r) {
  return std::isfinite(r.t) && std::isfinite(r.objective) && std::isfinite(r.energy) &&
         std::isfinite(r.group_drift) && std::isfinite(r.skew_drift) && std::isfinite(r.eig_err) &&
         std::isfinite(r.subspace_err);
}

// Steps until cfg.steps or the first non-finite state. A state whose record
// cannot be computed (e.g. the eigen-oracle fails on overflowing entries)
// counts as non-finite too.
template <typename State, typename Step, typename Record>
void drive(State state, Step step, Record record, const RunConfig& cfg, RunOutcome& outcome) {
  auto try_record = [&](const State& x) -> std::optional<TraceRecord> {
    try {
      TraceRecord r = record(x);
      if (finite_record(r)) return r;
    } catch (const NumericalError&) {
    }
    return std::nullopt;
  };
  auto abort = [&](std::int64_t last_good) {
    outcome.numerical_failure = true;
    outcome.last_good_step = last_good;
    outcome.message = "non-finite state after step " + std::to_string(last_good) + "; last good step is " +
                      std::to_string(last_good);
  };

  if (auto r0 = try_record(state)) {
    outcome.records.push_back(*r0);
  } else {
    abort(state.step);
    return;
  }
  for (std::int64_t k = 1; k <= cfg.steps; ++k) {
    std::optional<State> next;
    try {
      next = step(state);
    } catch (const NumericalError&) {
    }
    std::optional<TraceRecord> rec;
    if (next && should_record(next->step, cfg)) {
      rec = try_record(*next);
      if (!rec) next.reset();
    }
    if (!next) {
      if (outcome.records.back().step != state.step) {
        if (auto last = try_record(state)) outcome.records.push_back(*last);
      }
      abort(state.step);
      return;
    }
    state = std::move(*next);
    if (rec) outcome.records.push_back(*rec);
  }
  outcome.last_good_step = state.step;
}

}  // namespace

RunOutcome execute(const PreparedProblem& prep, const RunConfig& cfg_in) {
  RunOutcome outcome;
  outcome.resolved = cfg_in;
  RunConfig& cfg = outcome.resolved;
  validate(cfg);
  const double scale = prep.truth.reduced_norm > 0.0 ? prep.truth.reduced_norm : 1.0;
  if (cfg.h == 0.0) cfg.h = 0.1 / scale;
  if (cfg.gha_h == 0.0) cfg.gha_h = 0.1 / scale;

  const Stopwatch clock(cfg.timing);


  if (is_gha(cfg.method)) {
    const ProblemSpec& spec = prep.spec;
    GhaState g = cfg.gha_init == "group" ? GhaState{start_point(spec, cfg).leftCols(spec.l()), 0}
                                         : gha_initialize_identity(spec.n(), spec.l());
    SamplerState sampler(cfg.seed);
    drive(
        std::move(g),
        [&](const GhaState& x) -> std::optional<GhaState> {
          const SymMatrix& a = prep.batch ? sample_member(*prep.batch, sampler).matrix : spec.a();
          GhaState next = cfg.method == Method::GhaRk4 ? gha_rk4_step(x, a, spec.b(), cfg.gha_h)
                                                       : gha_euler_step(x, a, spec.b(), cfg.gha_h);
          if (!next.v.allFinite()) return std::nullopt;
          return next;
        },
        [&](const GhaState& x) { return gha_record(prep, x, cfg.gha_h, clock.elapsed_ns()); }, cfg, outcome);
    return outcome;
  }

  const DissipationSchedule schedule = schedule_for(cfg);
  const IntegratorKind kind = integrator_for(cfg);
  OptimizerState s = initial_state(prep.spec);
  s.r = start_point(prep.spec, cfg);
  SamplerState sampler(cfg.seed);
  drive(
      std::move(s),
      [&](const OptimizerState& x) -> std::optional<OptimizerState> {
        OptimizerState next = prep.batch ? stochastic_step(x, prep.spec, *prep.batch, sampler, schedule, cfg.h, kind)
                                         : advance(x, prep.spec, prep.spec.a(), schedule, cfg.h, kind);
        if (!next.r.allFinite() || !next.xi.mat().allFinite()) return std::nullopt;
        return next;
      },
      [&](const OptimizerState& x) { return lie_record(prep, x, clock.elapsed_ns()); }, cfg, outcome);
  return outcome;
}

RunOutcome run(const RunConfig& cfg_in) {
  RunConfig cfg = cfg_in;
  const PreparedProblem prep = prepare_problem(cfg);
  return execute(prep, cfg);
}

void write_run_output(const RunOutcome& outcome) {
  const RunConfig& cfg = outcome.resolved;
  if (cfg.out.empty()) {
    emit_trace(outcome.records, cfg.format, std::cout);
    std::cerr << config_json(cfg) << '\n';
    return;
  }
  emit_trace(outcome.records, cfg.format, std::filesystem::path(cfg.out));
  std::ofstream side(cfg.out + ".config.json", std::ios::binary);
  if (!side) throw IoError("cannot write " + cfg.out + ".config.json");
  side << config_json(cfg) << '\n';
}

// --- bench ---------------------------------------------------------------

namespace {

struct SuiteDefaults {
  const char* problem;
  const char* matrix;
  Index n;
  Index l;
  std::int64_t steps;
  std::size_t batch;
  double step_fraction;
  bool nogap;
};

SuiteDefaults suite_defaults(const std::string& suite) {
  // The GOE fraction is small on purpose: at n = 100 every method reaches
  // roundoff within a few thousand steps at larger fractions, which would
  // leave nothing to compare at 10⁴ steps.
  if (suite == "goe") return {"ev-leading", "goe", 100, 2, 10000, 0, 0.01, false};
  if (suite == "wishart") return {"ev-leading", "wishart", 25, 2, 50000, 0, 0.25, false};
  if (suite == "stochastic") return {"ev-leading", "goe", 100, 2, 50000, 100, 0.06, false};
  if (suite == "lda") return {"lda", "goe", 400, 9, 10000, 0, 0.25, false};
  if (suite == "lda-nogap") return {"lda", "goe", 400, 9, 10000, 0, 0.25, true};
  throw ConfigError("unknown bench suite '" + suite + "'");
}

}  // namespace

RunConfig bench_base_config(const BenchOptions& options) {
  const SuiteDefaults d = suite_defaults(options.suite);
  RunConfig cfg;
  cfg.problem = d.problem;
  cfg.matrix = d.matrix;
  cfg.n = d.n;
  cfg.l = d.l;
  cfg.steps = options.steps.value_or(d.steps);
  cfg.batch = d.batch;
  cfg.nogap = d.nogap;
  cfg.seed = options.seed;
  cfg.trace_every = options.trace_every;
  cfg.format = options.format;
  cfg.images_path = options.images_path;
  cfg.labels_path = options.labels_path;
  cfg.cache_path = options.cache_path;
  return cfg;
}

std::vector<BenchMethod> bench_methods(const BenchOptions& options, const PreparedProblem& problem,
                                       const RunConfig& base) {
  const SuiteDefaults d = suite_defaults(options.suite);
  const double spread = 2.0 * problem.truth.reduced_norm;
  const double f = d.step_fraction;
  const double h_first_order = f * 2.0 / spread;
  const double h_rk4 = f * 2.78 / spread;
  const double h_momentum = f * 2.0 / std::sqrt(spread);

  auto make = [&](const std::string& label, Method m, double h, double gha_h) {
    RunConfig cfg = base;
    cfg.method = m;
    cfg.h = h;
    cfg.gha_h = gha_h;
    return BenchMethod{label, cfg};
  };

  std::vector<BenchMethod> out;
  out.push_back(make("gd", Method::Gd, h_first_order, h_first_order));
  out.push_back(make("nag-sc", Method::NagSc, h_momentum, h_first_order));
  out.push_back(make("nag-c", Method::NagC, h_momentum, h_first_order));
  if (options.suite == "stochastic") {
    out.push_back(make("nag-sc-corrected", Method::NagScCorrected, h_momentum, h_first_order));
    out.push_back(make("nag-c-corrected", Method::NagCCorrected, h_momentum, h_first_order));
  }
  out.push_back(make("gha-euler", Method::GhaEuler, h_momentum, h_first_order));
  out.push_back(make("gha-rk4", Method::GhaRk4, h_momentum, h_rk4));
  if (base.problem == "lda") {
    BenchMethod identity = make("gha-rk4-identity", Method::GhaRk4, h_momentum, h_rk4);
    identity.config.gha_init = "identity";
    out.push_back(identity);
  }
  return out;
}

std::vector<BenchRow> run_bench(const BenchOptions& options) {
  RunConfig base = bench_base_config(options);
  const PreparedProblem prep = prepare_problem(base);
  std::filesystem::create_directories(options.out_dir);
  const std::string ext = options.format == TraceFormat::Csv ? ".csv" : ".jsonl";

  std::vector<BenchRow> rows;
  for (BenchMethod& bm : bench_methods(options, prep, base)) {
    bm.config.out = (options.out_dir / (options.suite + "_" + bm.label + ext)).string();
    const RunOutcome outcome = execute(prep, bm.config);
    write_run_output(outcome);
    BenchRow row;
    row.label = bm.label;
    row.method = bm.config.method;
    row.h = is_gha(bm.config.method) ? outcome.resolved.gha_h : outcome.resolved.h;
    row.numerical_failure = outcome.numerical_failure;
    if (!outcome.records.empty()) {
      row.final_eig_err = outcome.records.back().eig_err;
      row.final_subspace_err = outcome.records.back().subspace_err;
    }
    for (const auto& r : outcome.records) row.max_group_drift = std::max(row.max_group_drift, r.group_drift);
    rows.push_back(row);
  }

  std::ofstream summary(options.out_dir / (options.suite + "_summary.csv"), std::ios::binary);
  if (!summary) throw IoError("cannot write bench summary");
  summary << "method,h,final_eig_err,final_subspace_err,max_group_drift,numerical_failure\n";
  for (const auto& r : rows) {
    summary << r.label << ',' << format_double(r.h) << ',' << format_double(r.final_eig_err) << ','
            << format_double(r.final_subspace_err) << ',' << format_double(r.max_group_drift) << ','
            << (r.numerical_failure ? 1 : 0) << '\n';
  }
  return rows;
}

}  // namespace lieopt
