#include <iomanip>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lieopt/dataio.hpp"
#include "lieopt/runner.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct RawFlags {
  std::string method = "nag-sc";
  std::string order = "2";
  std::string format = "csv";
};

void add_run_flags(CLI::App* cmd, lieopt::RunConfig& cfg, RawFlags& raw) {
  cmd->set_help_flag("--help", "print this help and exit");
  cmd->add_option("--method", raw.method, "gd | nag-sc | nag-c | nag-sc-corrected | nag-c-corrected | gha-euler | gha-rk4");
  cmd->add_option("--order", raw.order, "splitting order for momentum methods: 2 | 4a | 4b");
  cmd->add_option("--n", cfg.n, "dimension of the synthetic matrix");
  cmd->add_option("--l", cfg.l, "number of leading eigenpairs");
  cmd->add_option("--h", cfg.h, "step size (default 0.1/||A||_2)");
  cmd->add_option("--gha-h", cfg.gha_h, "GHA step size (default 0.1/||A||_2)");
  cmd->add_option("--gamma", cfg.gamma, "constant friction");
  cmd->add_option("--c", cfg.c, "linear friction correction for *-corrected methods");
  cmd->add_option("--steps", cfg.steps, "iterations");
  cmd->add_option("--seed", cfg.seed, "seed for synthetic data and sampling");
  cmd->add_option("--trace-every", cfg.trace_every, "record interval");
  cmd->add_option("--matrix", cfg.matrix, "synthetic A: goe | wishart");
  cmd->add_option("--batch", cfg.batch, "stochastic mode: number of perturbed copies of A");
  cmd->add_option("--sigma-scale", cfg.sigma_scale, "perturbation scale in stochastic mode");
  cmd->add_option("--a", cfg.a_path, "A from a pair blob or a text matrix");
  cmd->add_option("--b", cfg.b_path, "B from a pair blob or a text matrix");
  cmd->add_option("--images", cfg.images_path, "IDX image file");
  cmd->add_option("--labels", cfg.labels_path, "IDX label file");
  cmd->add_option("--cache", cfg.cache_path, "scatter pair cache (read if present, else written)");
  cmd->add_option("--crop", cfg.crop, "margin cropped from each image side");
  cmd->add_flag("--nogap", cfg.nogap, "remove the leading eigengap");
  cmd->add_option("--gha-init", cfg.gha_init, "GHA start for GEV: group | identity");
  cmd->add_option("--init", cfg.init, "start: canonical (L^-1) | rotated (L^-1 Q, seeded)");
  cmd->add_flag("--timing", cfg.timing, "fill elapsed_ns");
  cmd->add_option("--format", raw.format, "csv | jsonl");
  cmd->add_option("--out", cfg.out, "trace path (stdout if omitted)");
}

lieopt::TraceFormat format_from(const std::string& s) {
  try {
    return lieopt::parse_trace_format(s);
  } catch (const std::invalid_argument& e) {
    throw lieopt::ConfigError(e.what());
  }
}

int run_command(lieopt::RunConfig cfg, const RawFlags& raw, const std::string& problem) {
  cfg.problem = problem;
  cfg.method = lieopt::parse_method(raw.method);
  cfg.order = lieopt::parse_order(raw.order);
  cfg.format = format_from(raw.format);
  const lieopt::RunOutcome outcome = lieopt::run(cfg);
  lieopt::write_run_output(outcome);
  if (outcome.numerical_failure) {
    std::cerr << "lieopt: " << outcome.message << '\n';
    return kExitNumerical;
  }
  return 0;
}

int bench_command(lieopt::BenchOptions options, const std::string& format, std::int64_t steps) {
  options.format = format_from(format);
  if (steps > 0) options.steps = steps;
  const auto rows = lieopt::run_bench(options);
  std::cout << std::left << std::setw(20) << "method" << std::setw(14) << "h" << std::setw(14) << "eig_err"
            << std::setw(14) << "subspace_err" << std::setw(14) << "group_drift" << "status\n";
  bool failed = false;
  for (const auto& r : rows) {
    std::cout << std::left << std::setw(20) << r.label << std::setw(14) << std::setprecision(6) << r.h
              << std::setw(14) << r.final_eig_err << std::setw(14) << r.final_subspace_err << std::setw(14)
              << r.max_group_drift << (r.numerical_failure ? "nan" : "ok") << '\n';
    failed = failed || r.numerical_failure;
  }
  return failed ? kExitNumerical : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Momentum optimization on matrix Lie groups for leading eigenproblems"};
  app.require_subcommand(1);

  lieopt::RunConfig cfg;
  RawFlags raw;
  std::string chosen;
  for (const char* name : {"ev-full", "ev-leading", "gev", "lda"}) {
    CLI::App* cmd = app.add_subcommand(name, std::string("solve the ") + name + " problem");
    add_run_flags(cmd, cfg, raw);
    cmd->callback([&chosen, name] { chosen = name; });
  }

  lieopt::BenchOptions bench;
  std::string bench_format = "csv";
  std::int64_t bench_steps = 0;
  std::string out_dir = bench.out_dir.string();
  CLI::App* bench_cmd = app.add_subcommand("bench", "run a benchmark suite");
  bench_cmd->add_option("suite", bench.suite, "goe | wishart | stochastic | lda | lda-nogap")->required();
  bench_cmd->add_option("--out", out_dir, "output directory");
  bench_cmd->add_option("--steps", bench_steps, "override the suite's iteration count");
  bench_cmd->add_option("--seed", bench.seed, "seed");
  bench_cmd->add_option("--trace-every", bench.trace_every, "record interval");
  bench_cmd->add_option("--format", bench_format, "csv | jsonl");
  bench_cmd->add_option("--images", bench.images_path, "IDX image file");
  bench_cmd->add_option("--labels", bench.labels_path, "IDX label file");
  bench_cmd->add_option("--cache", bench.cache_path, "scatter pair cache");
  bench_cmd->callback([&chosen] { chosen = "bench"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (chosen == "bench") {
      bench.out_dir = out_dir;
      return bench_command(bench, bench_format, bench_steps);
    }
    return run_command(cfg, raw, chosen);
  } catch (const lieopt::ConfigError& e) {
    std::cerr << "lieopt: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const lieopt::NotPositiveDefinite& e) {
    std::cerr << "lieopt: data error: " << e.what() << '\n';
    return kExitData;
  } catch (const lieopt::DimensionMismatch& e) {
    std::cerr << "lieopt: data error: " << e.what() << '\n';
    return kExitData;
  } catch (const lieopt::DataError& e) {
    std::cerr << "lieopt: data error: " << e.what() << '\n';
    return kExitData;
  } catch (const lieopt::NumericalError& e) {
    std::cerr << "lieopt: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "lieopt: " << e.what() << '\n';
    return 1;
  }
}
