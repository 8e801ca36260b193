#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lieopt/baselines.hpp"
#include "lieopt/dataio.hpp"
#include "lieopt/runner.hpp"

namespace py = pybind11;
using namespace lieopt;

namespace {

SymMatrix sym(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("expected a square matrix");
  return SymMatrix(m);
}

SkewMatrix skew(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("expected a square matrix");
  return SkewMatrix(m);
}

// Column-per-field view of a trace, ready for numpy or pandas.
py::dict records_to_dict(const std::vector<TraceRecord>& recs) {
  const auto n = static_cast<Index>(recs.size());
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> step(n), elapsed(n);
  Vector t(n), obj(n), en(n), gd(n), sd(n), ee(n), se(n);
  for (Index i = 0; i < n; ++i) {
    const auto& r = recs[static_cast<std::size_t>(i)];
    step(i) = r.step;
    t(i) = r.t;
    obj(i) = r.objective;
    en(i) = r.energy;
    gd(i) = r.group_drift;
    sd(i) = r.skew_drift;
    ee(i) = r.eig_err;
    se(i) = r.subspace_err;
    elapsed(i) = r.elapsed_ns;
  }
  py::dict d;
  d["step"] = step;
  d["t"] = t;
  d["objective"] = obj;
  d["energy"] = en;
  d["group_drift"] = gd;
  d["skew_drift"] = sd;
  d["eig_err"] = ee;
  d["subspace_err"] = se;
  d["elapsed_ns"] = elapsed;
  return d;
}

RunConfig config_from_kwargs(const py::kwargs& kw) {
  RunConfig cfg;
  for (const auto& [key, value] : kw) {
    const auto k = key.cast<std::string>();
    if (k == "problem") cfg.problem = value.cast<std::string>();
    else if (k == "method") cfg.method = parse_method(value.cast<std::string>());
    else if (k == "order") cfg.order = parse_order(py::str(value).cast<std::string>());
    else if (k == "n") cfg.n = value.cast<Index>();
    else if (k == "l") cfg.l = value.cast<Index>();
    else if (k == "h") cfg.h = value.cast<double>();
    else if (k == "gha_h") cfg.gha_h = value.cast<double>();
    else if (k == "gamma") cfg.gamma = value.cast<double>();
    else if (k == "c") cfg.c = value.cast<double>();
    else if (k == "steps") cfg.steps = value.cast<std::int64_t>();
    else if (k == "seed") cfg.seed = value.cast<std::uint64_t>();
    else if (k == "trace_every") cfg.trace_every = value.cast<std::int64_t>();
    else if (k == "matrix") cfg.matrix = value.cast<std::string>();
    else if (k == "batch") cfg.batch = value.cast<std::size_t>();
    else if (k == "sigma_scale") cfg.sigma_scale = value.cast<double>();
    else if (k == "a_path") cfg.a_path = py::str(value).cast<std::string>();
    else if (k == "b_path") cfg.b_path = py::str(value).cast<std::string>();
    else if (k == "images_path") cfg.images_path = py::str(value).cast<std::string>();
    else if (k == "labels_path") cfg.labels_path = py::str(value).cast<std::string>();
    else if (k == "cache_path") cfg.cache_path = py::str(value).cast<std::string>();
    else if (k == "crop") cfg.crop = value.cast<int>();
    else if (k == "nogap") cfg.nogap = value.cast<bool>();
    else if (k == "gha_init") cfg.gha_init = value.cast<std::string>();
    else if (k == "init") cfg.init = value.cast<std::string>();
    else if (k == "timing") cfg.timing = value.cast<bool>();
    else throw ConfigError("unknown run option '" + k + "'");
  }
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Momentum optimization on the matrix group {R : R^T B R = I} for leading eigenproblems.";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<NotPositiveDefinite>(m, "NotPositiveDefinite", numerical.ptr());
  py::register_exception<SingularSolve>(m, "SingularSolve", numerical.ptr());
  py::register_exception<NoConvergence>(m, "NoConvergence", numerical.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base.ptr());

  // matrix-core
  m.def("cholesky", [](const Matrix& b) { return cholesky(sym(b)).upper; }, py::arg("b"),
        "Upper-triangular L with B = L^T L.");
  m.def("cayley", [](const Matrix& x, double h) { return cayley(skew(x), h); }, py::arg("x"), py::arg("h"));
  m.def("pade22_exp", [](const Matrix& x, double h) { return pade22_exp(skew(x), h); }, py::arg("x"),
        py::arg("h"));
  m.def("commutator", [](const Matrix& a, const Matrix& b) { return commutator(a, b).mat(); }, py::arg("m"),
        py::arg("p"));
  m.def(
      "jacobi_eigh",
      [](const Matrix& a, double tol) {
        auto e = jacobi_eigh(sym(a), tol);
        return py::make_tuple(e.values, e.vectors);
      },
      py::arg("a"), py::arg("tol") = 1e-14, "Eigenvalues (descending) and eigenvectors by cyclic Jacobi.");
  m.def("spectral_norm", [](const Matrix& a) { return spectral_norm(sym(a)); }, py::arg("a"));

  // problems
  py::enum_<ProblemKind>(m, "ProblemKind")
      .value("FULL_SPECTRUM", ProblemKind::FullSpectrum)
      .value("LEADING_EV", ProblemKind::LeadingEV)
      .value("LEADING_GEV", ProblemKind::LeadingGEV);

  py::class_<ProblemSpec>(m, "ProblemSpec")
      .def_static("full_spectrum", [](const Matrix& a) { return ProblemSpec::full_spectrum(sym(a)); })
      .def_static("leading_ev", [](const Matrix& a, Index l) { return ProblemSpec::leading_ev(sym(a), l); },
                  py::arg("a"), py::arg("l"))
      .def_static(
          "leading_gev",
          [](const Matrix& a, const Matrix& b, Index l) { return ProblemSpec::leading_gev(sym(a), sym(b), l); },
          py::arg("a"), py::arg("b"), py::arg("l"))
      .def_property_readonly("kind", &ProblemSpec::kind)
      .def_property_readonly("n", &ProblemSpec::n)
      .def_property_readonly("l", &ProblemSpec::l)
      .def_property_readonly("a", [](const ProblemSpec& p) { return p.a().mat(); })
      .def_property_readonly("b", [](const ProblemSpec& p) { return p.b().mat(); });

  py::class_<OptimizerState>(m, "OptimizerState")
      .def_property(
          "r", [](const OptimizerState& s) { return s.r; }, [](OptimizerState& s, const Matrix& r) { s.r = r; })
      .def_property(
          "xi", [](const OptimizerState& s) { return s.xi.mat(); },
          [](OptimizerState& s, const Matrix& x) { s.xi = skew(x); })
      .def_readonly("step", &OptimizerState::step)
      .def_readonly("t", &OptimizerState::t);

  m.def("objective", [](const ProblemSpec& p, const Matrix& r) { return objective(p, r); });
  m.def("force", [](const ProblemSpec& p, const Matrix& r) { return force(p, r).mat(); });
  m.def("initial_state", &initial_state);
  m.def("group_drift", &group_drift);
  m.def("energy", [](const OptimizerState& s, const ProblemSpec& p) { return energy(s, p); });
  m.def("extract_solution", [](const ProblemSpec& p, const Matrix& r) {
    auto s = extract_solution(p, r);
    return py::make_tuple(s.v, s.estimates);
  });

  py::class_<GroundTruth>(m, "GroundTruth")
      .def_readonly("values", &GroundTruth::values)
      .def_readonly("basis", &GroundTruth::basis)
      .def_readonly("optimal_objective", &GroundTruth::optimal_objective)
      .def_readonly("reduced_norm", &GroundTruth::reduced_norm);
  m.def("ground_truth", [](const ProblemSpec& p) { return ground_truth(p); });
  m.def("error_metrics", [](const ProblemSpec& p, const Matrix& r, const GroundTruth& t) {
    const auto e = error_metrics(p, r, t);
    return py::make_tuple(e.eig_err, e.subspace_err);
  });

  // lie-dynamics
  py::class_<DissipationSchedule>(m, "DissipationSchedule")
      .def_static("constant", &DissipationSchedule::constant, py::arg("gamma") = 1.0)
      .def_static("nag_c", &DissipationSchedule::nag_c)
      .def_static("corrected", &DissipationSchedule::corrected, py::arg("base"), py::arg("c") = 0.01)
      .def("damp_factor", &DissipationSchedule::damp_factor, py::arg("t_a"), py::arg("t_b"))
      .def("gamma_at", &DissipationSchedule::gamma_at);

  py::enum_<IntegratorKind>(m, "IntegratorKind")
      .value("LIE_GD", IntegratorKind::LieGD)
      .value("NAG_STRANG", IntegratorKind::NagStrang)
      .value("NAG_ORDER4_V1", IntegratorKind::NagOrder4V1)
      .value("NAG_ORDER4_V2", IntegratorKind::NagOrder4V2);

  m.def(
      "advance",
      [](const OptimizerState& s, const ProblemSpec& p, const DissipationSchedule& sched, double h,
         IntegratorKind kind) { return advance(s, p, p.a(), sched, h, kind); },
      py::arg("state"), py::arg("problem"), py::arg("schedule"), py::arg("h"),
      py::arg("kind") = IntegratorKind::NagStrang);

  // baselines
  m.def("gha_euler_step", [](const Matrix& v, const Matrix& a, const Matrix& b, double h) {
    return gha_euler_step({v, 0}, sym(a), sym(b), h).v;
  });
  m.def("gha_rk4_step", [](const Matrix& v, const Matrix& a, const Matrix& b, double h) {
    return gha_rk4_step({v, 0}, sym(a), sym(b), h).v;
  });

  // dataio
  m.def("gen_goe", [](Index n, std::uint64_t seed) { return gen_goe(n, seed).mat(); }, py::arg("n"),
        py::arg("seed"));
  m.def("gen_negative_wishart", [](Index n, std::uint64_t seed) { return gen_negative_wishart(n, seed).mat(); },
        py::arg("n"), py::arg("seed"));
  m.def("remove_eigengap", [](const Matrix& a, const Matrix& b) {
    auto p = remove_eigengap({sym(a), sym(b)});
    return py::make_tuple(p.a.mat(), p.b.mat());
  });
  m.def("normalize_pair", [](const Matrix& a, const Matrix& b) {
    auto p = normalize_pair({sym(a), sym(b)});
    return py::make_tuple(p.a.mat(), p.b.mat());
  });
  m.def("write_pair_blob", [](const std::filesystem::path& path, const Matrix& a, const Matrix& b) {
    write_pair_blob(path, {sym(a), sym(b)});
  });
  m.def("read_pair_blob", [](const std::filesystem::path& path) {
    auto p = read_pair_blob(path);
    return py::make_tuple(p.a.mat(), p.b.mat());
  });
  m.def("parse_idx", [](const py::bytes& data) -> py::object {
    const std::string s = data;
    const auto parsed = parse_idx(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
    if (const auto* labels = std::get_if<IdxLabels>(&parsed)) return py::cast(labels->labels);
    const auto& img = std::get<IdxImages>(parsed);
    py::array_t<std::uint8_t> out({img.count(), std::size_t{img.rows}, std::size_t{img.cols}});
    std::copy(img.pixels.begin(), img.pixels.end(), out.mutable_data());
    return std::move(out);
  });

  // cli
  m.def(
      "run",
      [](const py::kwargs& kw) {
        const RunOutcome out = run(config_from_kwargs(kw));
        py::dict d;
        d["records"] = records_to_dict(out.records);
        d["numerical_failure"] = out.numerical_failure;
        d["last_good_step"] = out.last_good_step;
        d["config"] = config_json(out.resolved);
        return d;
      },
      "Run one configuration. Keyword names match the command-line flags with underscores.");
}
