#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "vcd/detector.hpp"
#include "vcd/error.hpp"
#include "vcd/experiment.hpp"
#include "vcd/geometry.hpp"
#include "vcd/scenario.hpp"
#include "vcd/theory.hpp"

namespace py = pybind11;
using namespace vcd;

namespace {

SubspaceBasis as_basis(const Matrix& m) { return SubspaceBasis::from_orthonormal(m, 1e-8); }

std::vector<Vector> rows_of(const Matrix& samples) {
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(samples.rows()));
  for (Index r = 0; r < samples.rows(); ++r) out.emplace_back(samples.row(r).transpose());
  return out;
}

py::dict trajectory_dict(const std::vector<TrajectoryPoint>& traj) {
  std::vector<std::size_t> i, k;
  std::vector<double> t, inv_t;
  for (const auto& p : traj) {
    i.push_back(p.index);
    t.push_back(p.t);
    inv_t.push_back(p.inv_t);
    k.push_back(p.rank);
  }
  py::dict d;
  d["i"] = i;
  d["T"] = t;
  d["inv_T"] = inv_t;
  d["k"] = k;
  return d;
}

DetectorConfig detector_config(const Matrix& target_basis, std::optional<double> sigma2,
                               double gamma, double tdiv, double stall_eps, std::size_t patience,
                               std::size_t max_samples, double zero_tol) {
  DetectorConfig cfg;
  cfg.target_basis = as_basis(target_basis);
  cfg.noise_variance_hint = sigma2;
  cfg.rank_gap_factor = gamma;
  cfg.divergence_threshold = tdiv;
  cfg.stall_epsilon = stall_eps;
  cfg.stall_patience = patience;
  cfg.max_samples = max_samples;
  cfg.zero_volume_tol = zero_tol;
  return cfg;
}

BoundInputs bound_inputs(std::vector<double> eigs, double sigma2, std::size_t n, double delta,
                         double eps, std::size_t k, std::optional<std::size_t> d2) {
  BoundInputs in;
  in.eigenvalues = std::move(eigs);
  in.noise_variance = sigma2;
  in.ambient_dim = n;
  in.signal_rank = k;
  in.delta = delta;
  in.epsilon = eps;
  in.target_dim = d2;
  return in;
}

py::dict report_dict(const BoundReport& r) {
  py::dict d;
  d["m_required"] = r.m_required;
  d["exponent_argument"] = r.exponent_argument;
  d["deviation_bound"] = r.deviation_bound ? py::cast(*r.deviation_bound) : py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Volume-correlation subspace detector";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<DegenerateGeometryError>(m, "DegenerateGeometryError", PyExc_ValueError);
  py::register_exception<SingularInputError>(m, "SingularInputError", PyExc_ValueError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("orthonormalize", [](const Matrix& x, double tol) { return orthonormalize(x, tol).matrix(); },
        py::arg("x"), py::arg("tol") = 1e-10);
  m.def("volume", &volume, py::arg("x"), py::arg("d"));
  m.def("log_volume", &log_volume, py::arg("x"), py::arg("d"));
  m.def("principal_angles",
        [](const Matrix& a, const Matrix& b) { return principal_angles(as_basis(a), as_basis(b)).angles; },
        py::arg("a"), py::arg("b"));
  m.def("volume_correlation",
        [](const Matrix& a, const Matrix& b) { return volume_correlation(as_basis(a), as_basis(b)); },
        py::arg("a"), py::arg("b"));
  m.def("incremental_volume_factor", &incremental_volume_factor, py::arg("x"), py::arg("y_prev"),
        py::arg("y"));
  m.def("elementary_symmetric",
        [](const std::vector<double>& v, std::size_t k) { return elementary_symmetric(v, k); },
        py::arg("values"), py::arg("k"));
  m.def("tau", [](const Matrix& s, const Matrix& c) { return tau(as_basis(s), as_basis(c)); },
        py::arg("target"), py::arg("clutter"));

  m.def(
      "make_scenario",
      [](Index n, Index d1, Index d2, std::optional<double> snr_db, bool target_present,
         std::uint64_t seed) {
        ScenarioConfig c;
        c.ambient_dim = n;
        c.clutter_dim = d1;
        c.target_dim = d2;
        c.snr_db = snr_db.value_or(kNoiseless);
        c.target_present = target_present;
        c.seed = seed;
        const Scenario sc = make_scenario(c);
        py::dict d;
        d["target_basis"] = sc.target_basis.matrix();
        d["clutter_basis"] = sc.clutter_basis.matrix();
        d["noise_variance"] = sc.noise_std * sc.noise_std;
        d["population_eigenvalues"] = population_eigenvalues(sc);
        return d;
      },
      py::arg("n"), py::arg("d1"), py::arg("d2"), py::arg("snr_db") = py::none(),
      py::arg("target_present") = true, py::arg("seed") = 0,
      "Random target/clutter geometry. snr_db=None is the noiseless regime.");

  m.def(
      "draw_samples",
      [](Index n, Index d1, Index d2, std::optional<double> snr_db, bool target_present,
         std::uint64_t seed, std::size_t count, std::uint64_t sample_seed) {
        ScenarioConfig c;
        c.ambient_dim = n;
        c.clutter_dim = d1;
        c.target_dim = d2;
        c.snr_db = snr_db.value_or(kNoiseless);
        c.target_present = target_present;
        c.seed = seed;
        const Scenario sc = make_scenario(c);
        RandomStream rng(sample_seed);
        Matrix out(static_cast<Index>(count), n);
        for (std::size_t i = 0; i < count; ++i) {
          out.row(static_cast<Index>(i)) = draw_sample(sc, i + 1, rng).y.transpose();
        }
        return out;
      },
      py::arg("n"), py::arg("d1"), py::arg("d2"), py::arg("snr_db") = py::none(),
      py::arg("target_present") = true, py::arg("seed") = 0, py::arg("count") = 1,
      py::arg("sample_seed") = 0, "Samples as rows of a (count, n) array.");

  m.def(
      "detect",
      [](const Matrix& samples, const Matrix& target_basis, std::optional<double> sigma2,
         double gamma, double tdiv, double stall_eps, std::size_t patience,
         std::optional<std::size_t> max_samples, double zero_tol) {
        const DetectorConfig cfg = detector_config(
            target_basis, sigma2, gamma, tdiv, stall_eps, patience,
            max_samples.value_or(std::max<std::size_t>(1, static_cast<std::size_t>(samples.rows()))),
            zero_tol);
        const StreamResult r = run_stream(cfg, rows_of(samples));
        py::dict d;
        d["decision"] = std::string(to_string(r.decision.verdict));
        d["decided_at"] = r.decision.decided_at ? py::cast(*r.decision.decided_at) : py::none();
        d["trajectory"] = trajectory_dict(r.trajectory);
        return d;
      },
      py::arg("samples"), py::arg("target_basis"), py::arg("sigma2") = py::none(),
      py::arg("gamma") = 2.0, py::arg("tdiv") = 1e6, py::arg("stall_eps") = 1e-3,
      py::arg("patience") = 5, py::arg("max_samples") = py::none(), py::arg("zero_tol") = 1e-8,
      "Run the sequential detector over the rows of `samples`.");

  m.def(
      "noiseless_breakpoint",
      [](const Matrix& target_basis, const Matrix& samples, double tol) {
        const BreakpointResult r = noiseless_breakpoint(as_basis(target_basis), rows_of(samples), tol);
        return py::make_tuple(r.breakpoint ? py::cast(*r.breakpoint) : py::none(), r.target_present);
      },
      py::arg("target_basis"), py::arg("samples"), py::arg("tol") = 1e-8);

  m.def(
      "bound",
      [](const std::string& hypothesis, std::vector<double> eigs, double sigma2, std::size_t n,
         double delta, double eps, std::size_t k, std::optional<std::size_t> d2) {
        const BoundInputs in = bound_inputs(std::move(eigs), sigma2, n, delta, eps, k, d2);
        if (hypothesis == "present") return report_dict(sample_bound_target_present(in));
        if (hypothesis == "absent") return report_dict(sample_bound_target_absent(in));
        throw InputError("hypothesis must be \"present\" or \"absent\"");
      },
      py::arg("hypothesis"), py::arg("eigenvalues"), py::arg("sigma2"), py::arg("n"),
      py::arg("delta"), py::arg("eps"), py::arg("k") = 0, py::arg("d2") = py::none());

  m.def(
      "simulate",
      [](const std::string& config, std::optional<std::size_t> trials,
         std::optional<std::uint64_t> seed, std::size_t parallelism) {
        ExperimentConfig cfg = load_experiment_config(config);
        if (trials) cfg.trials = *trials;
        if (seed) cfg.scenario.seed = *seed;
        cfg.parallelism = parallelism;
        std::vector<TrialResult> results;
        {
          py::gil_scoped_release release;
          results = run_experiment(cfg);
        }
        std::ostringstream csv;
        write_records_csv(csv, results);
        return py::make_tuple(csv.str(), summarize_experiment(cfg, results).dump());
      },
      py::arg("config"), py::arg("trials") = py::none(), py::arg("seed") = py::none(),
      py::arg("parallelism") = 1,
      "Monte Carlo runs; returns (records CSV text, summary JSON text).");
}
