#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lieopt/dynamics.hpp"
#include "lieopt/stochastic.hpp"
#include "lieopt/trace.hpp"

namespace lieopt {

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Method { Gd, NagSc, NagC, NagScCorrected, NagCCorrected, GhaEuler, GhaRk4 };
enum class SplitOrder { Strang, FourA, FourB };

Method parse_method(const std::string& name);
std::string to_string(Method m);
SplitOrder parse_order(const std::string& name);
std::string to_string(SplitOrder o);
bool is_gha(Method m);

struct RunConfig {
  std::string problem = "ev-leading";  // ev-full | ev-leading | gev | lda
  Method method = Method::NagSc;
  SplitOrder order = SplitOrder::Strang;
  Index n = 100;
  Index l = 2;
  double h = 0.0;      // 0 selects the default 0.1/‖Â‖₂
  double gha_h = 0.0;  // 0 selects the default 0.1/‖Â‖₂
  double gamma = 1.0;
  double c = 0.01;
  std::int64_t steps = 1000;
  std::uint64_t seed = 1;
  std::int64_t trace_every = 100;

  // Synthetic A when no file is given: goe | wishart.
  std::string matrix = "goe";
  // Stochastic mode: K > 0 replaces A by a batch of K perturbed copies.
  std::size_t batch = 0;
  double sigma_scale = 0.25;

  std::string a_path;
  std::string b_path;
  std::string images_path;
  std::string labels_path;
  std::string cache_path;
  int crop = 4;
  bool nogap = false;
  std::string gha_init = "group";  // group | identity (GEV only)
  // canonical: R₀ = L⁻¹ (I without B). rotated: R₀ = L⁻¹Q with a seeded
  // orthogonal Q, for inputs whose canonical start is a stationary point.
  std::string init = "canonical";

  bool timing = false;
  TraceFormat format = TraceFormat::Csv;
  std::string out;
};

void validate(const RunConfig& cfg);
std::string config_json(const RunConfig& cfg);

/// Initial group element for the configured start; satisfies R₀ᵀBR₀ = I.
Matrix start_point(const ProblemSpec& spec, const RunConfig& cfg);

struct PreparedProblem {
  ProblemSpec spec;
  std::optional<MatrixBatch> batch;
  GroundTruth truth;
};

/// Builds (or loads) the problem, the optional stochastic batch and the
/// ground truth. Fills in n (and l for lda) in `cfg` when files decide them.
PreparedProblem prepare_problem(RunConfig& cfg);

struct RunOutcome {
  RunConfig resolved;
  std::vector<TraceRecord> records;
  bool numerical_failure = false;
  std::int64_t last_good_step = 0;
  std::string message;
};

RunOutcome execute(const PreparedProblem& problem, const RunConfig& cfg);
RunOutcome run(const RunConfig& cfg);

/// Writes the trace plus a `<out>.config.json` sidecar with the resolved config.
void write_run_output(const RunOutcome& outcome);

// --- bench ---------------------------------------------------------------

struct BenchOptions {
  std::string suite = "goe";  // goe | wishart | stochastic | lda | lda-nogap
  std::filesystem::path out_dir = "bench_out";
  std::optional<std::int64_t> steps;
  std::uint64_t seed = 1;
  std::int64_t trace_every = 100;
  TraceFormat format = TraceFormat::Csv;
  std::string images_path;
  std::string labels_path;
  std::string cache_path;
};

struct BenchRow {
  std::string label;
  Method method;
  double h = 0.0;
  double final_eig_err = 0.0;
  double final_subspace_err = 0.0;
  double max_group_drift = 0.0;
  bool numerical_failure = false;
};

struct BenchMethod {
  std::string label;
  RunConfig config;
};

/// The suite's base configuration and per-method step sizes. Steps are a
/// fraction of each method's linear-stability limit for spectral spread
/// 2‖Â‖₂: 2/spread for GD and GHA-Euler, 2.78/spread for GHA-RK4 and
/// 2/√spread for the momentum methods.
std::vector<BenchMethod> bench_methods(const BenchOptions& options, const PreparedProblem& problem,
                                       const RunConfig& base);
RunConfig bench_base_config(const BenchOptions& options);

std::vector<BenchRow> run_bench(const BenchOptions& options);

}  // namespace lieopt
