#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "lieopt/dataio.hpp"
#include "lieopt/runner.hpp"

using namespace lieopt;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "lieopt_runner_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

#ifdef LIEOPT_CLI_PATH
int cli(const std::string& args) {
  const std::string cmd = std::string(LIEOPT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

RunConfig small(const std::string& problem, Method m) {
  RunConfig cfg;
  cfg.problem = problem;
  cfg.method = m;
  cfg.n = 8;
  cfg.l = 2;
  cfg.steps = 50;
  cfg.trace_every = 10;
  return cfg;
}

}  // namespace

TEST_CASE("emit_trace") {
  SUBCASE("empty CSV is the header alone") {
    std::ostringstream out;
    emit_trace({}, TraceFormat::Csv, out);
    CHECK(out.str() == std::string(kTraceCsvHeader) + "\n");
  }
  SUBCASE("CSV round trip is byte-identical") {
    std::vector<TraceRecord> recs;
    for (int i = 0; i < 5; ++i) {
      TraceRecord r;
      r.step = i * 7;
      r.t = 0.1 * i;
      r.objective = -1.0 / 3.0 - i;
      r.energy = 1e-300 * i;
      r.group_drift = 5e-324;
      r.skew_drift = 0;
      r.eig_err = 1.0 / (i + 1);
      r.subspace_err = 123456789.123;
      r.elapsed_ns = 1000 * i;
      recs.push_back(r);
    }
    std::ostringstream first;
    emit_trace(recs, TraceFormat::Csv, first);
    const auto parsed = parse_trace_csv(first.str());
    REQUIRE(parsed.size() == recs.size());
    CHECK(parsed[2].objective == recs[2].objective);
    std::ostringstream second;
    emit_trace(parsed, TraceFormat::Csv, second);
    CHECK(first.str() == second.str());
  }
  SUBCASE("JSONL has one parseable object per record") {
    std::vector<TraceRecord> recs(3);
    recs[1].eig_err = 0.25;
    std::ostringstream out;
    emit_trace(recs, TraceFormat::Jsonl, out);
    std::istringstream in(out.str());
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
      const auto j = nlohmann::json::parse(line);
      CHECK(j.size() == 9);
      CHECK(j.contains("subspace_err"));
      if (lines == 1) CHECK(j["eig_err"].get<double>() == 0.25);
      ++lines;
    }
    CHECK(lines == 3);
  }
  SUBCASE("unwritable path") {
    CHECK_THROWS_AS(emit_trace({}, TraceFormat::Csv, std::filesystem::path("/nonexistent/dir/t.csv")), IoError);
  }
}

TEST_CASE("validate") {
  RunConfig ok = small("ev-leading", Method::NagSc);
  CHECK_NOTHROW(validate(ok));
  auto bad = [&](auto mutate) {
    RunConfig c = ok;
    mutate(c);
    CHECK_THROWS_AS(validate(c), ConfigError);
  };
  bad([](RunConfig& c) { c.steps = 0; });
  bad([](RunConfig& c) { c.h = -0.1; });
  bad([](RunConfig& c) { c.l = 9; });
  bad([](RunConfig& c) { c.problem = "pca"; });
  bad([](RunConfig& c) {
    c.method = Method::NagScCorrected;
    c.c = 0.0;
  });
  bad([](RunConfig& c) {
    c.problem = "ev-full";
    c.method = Method::GhaRk4;
  });
  bad([](RunConfig& c) { c.init = "random"; });
  CHECK_THROWS_AS(parse_method("adam"), ConfigError);
  CHECK_THROWS_AS(parse_order("3"), ConfigError);
  CHECK(parse_method(to_string(Method::NagCCorrected)) == Method::NagCCorrected);
  CHECK(parse_order("4b") == SplitOrder::FourB);
}

TEST_CASE("run records the start, every interval and the last step") {
  RunConfig cfg = small("ev-leading", Method::Gd);
  cfg.steps = 25;
  const auto out = run(cfg);
  std::vector<std::int64_t> steps;
  for (const auto& r : out.records) steps.push_back(r.step);
  CHECK(steps == std::vector<std::int64_t>{0, 10, 20, 25});
  CHECK(out.resolved.h > 0);
  CHECK_FALSE(out.numerical_failure);
  for (std::size_t i = 1; i < out.records.size(); ++i)
    CHECK(out.records[i].objective <= out.records[i - 1].objective + 1e-14);
}

TEST_CASE("every method runs on every applicable problem") {
  for (const char* problem : {"ev-full", "ev-leading", "gev"}) {
    for (Method m : {Method::Gd, Method::NagSc, Method::NagC, Method::NagScCorrected, Method::NagCCorrected,
                     Method::GhaEuler, Method::GhaRk4}) {
      if (std::string(problem) == "ev-full" && is_gha(m)) continue;
      for (SplitOrder o : {SplitOrder::Strang, SplitOrder::FourA}) {
        RunConfig cfg = small(problem, m);
        cfg.order = o;
        const auto out = run(cfg);
        CHECK_FALSE(out.numerical_failure);
        CHECK(out.records.back().step == cfg.steps);
        if (!is_gha(m)) CHECK(out.records.back().group_drift <= 1e-12);
      }
    }
  }
}

TEST_CASE("stochastic mode uses the batch mean as ground truth") {
  RunConfig cfg = small("ev-leading", Method::NagScCorrected);
  cfg.batch = 5;
  RunConfig resolved = cfg;
  const auto prep = prepare_problem(resolved);
  REQUIRE(prep.batch.has_value());
  CHECK(prep.spec.a().mat() == prep.batch->mean().mat());
  CHECK_FALSE(execute(prep, resolved).numerical_failure);
}

TEST_CASE("rotated start stays on the group and escapes a stationary point") {
  const auto path = scratch("diag_pair.bin");
  write_pair_blob(path, {SymMatrix::diagonal({2, 1}), SymMatrix::diagonal({4, 1})});
  RunConfig cfg;
  cfg.problem = "gev";
  cfg.method = Method::NagSc;
  cfg.l = 1;
  cfg.a_path = cfg.b_path = path.string();
  cfg.h = 0.1;
  cfg.steps = 2000;
  cfg.trace_every = 1000;
  const auto stuck = run(cfg);
  CHECK(stuck.records.back().eig_err == doctest::Approx(0.5));
  cfg.init = "rotated";
  const auto moved = run(cfg);
  CHECK(moved.records.front().group_drift <= 1e-14);
  CHECK(moved.records.back().eig_err <= 1e-8);
}

TEST_CASE("divergence is reported with the last good step") {
  RunConfig cfg = small("ev-leading", Method::GhaEuler);
  cfg.gha_h = 50.0;
  cfg.steps = 200;
  const auto out = run(cfg);
  CHECK(out.numerical_failure);
  CHECK(out.last_good_step < 200);
  CHECK(out.records.back().step <= out.last_good_step);
  for (const auto& r : out.records) CHECK(std::isfinite(r.eig_err));
}

TEST_CASE("identical configs write identical files") {
  for (TraceFormat f : {TraceFormat::Csv, TraceFormat::Jsonl}) {
    RunConfig cfg = small("ev-leading", Method::NagSc);
    cfg.batch = 4;
    cfg.format = f;
    cfg.out = scratch("det_a").string();
    write_run_output(run(cfg));
    cfg.out = scratch("det_b").string();
    write_run_output(run(cfg));
    CHECK(slurp(scratch("det_a")) == slurp(scratch("det_b")));
    const auto side = nlohmann::json::parse(slurp(scratch("det_a.config.json")));
    CHECK(side["method"] == "nag-sc");
    CHECK(side["h"].get<double>() > 0);
  }
}

TEST_CASE("bench writes traces and a summary") {
  BenchOptions opts;
  opts.suite = "wishart";
  opts.steps = 200;
  opts.out_dir = scratch("bench");
  const auto rows = run_bench(opts);
  CHECK(rows.size() == 5);
  CHECK(std::filesystem::exists(opts.out_dir / "wishart_summary.csv"));
  CHECK(std::filesystem::exists(opts.out_dir / "wishart_nag-sc.csv"));
  CHECK(std::filesystem::exists(opts.out_dir / "wishart_nag-sc.csv.config.json"));
  BenchOptions bad = opts;
  bad.suite = "imagenet";
  CHECK_THROWS_AS(run_bench(bad), ConfigError);
}

#ifdef LIEOPT_CLI_PATH
TEST_CASE("cli exit codes") {
  CHECK(cli("ev-leading --method gd --n 5 --l 1 --steps 10 --h 0.05 --seed 1") == 0);
  CHECK(cli("ev-leading --method nag-sc --steps 0") == 2);
  CHECK(cli("ev-leading --method sgd") == 2);
  CHECK(cli("ev-leading --bogus-flag 1") == 2);
  CHECK(cli("gev --a /nonexistent/a.txt") == 3);
  CHECK(cli("lda --images /nonexistent/i --labels /nonexistent/l") == 3);
  CHECK(cli("ev-leading --method gha-euler --gha-h 50 --steps 200 --n 8") == 4);
  const auto a = scratch("cli_a.txt");
  std::ofstream(a) << "2\n2 0\n0 1\n";
  const auto b = scratch("cli_b.txt");
  std::ofstream(b) << "2\n1 0\n0 -1\n";
  CHECK(cli("gev --a " + a.string() + " --b " + b.string() + " --l 1") == 3);
  const auto out = scratch("cli_trace.jsonl");
  CHECK(cli("ev-full --n 4 --steps 3 --trace-every 1 --format jsonl --out " + out.string()) == 0);
  std::ifstream in(out);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 4);
}
#endif
