#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "evd/core/log_math.hpp"
#include "evd/evidence/estimators.hpp"
#include "evd/harness/experiments.hpp"
#include "evd/harness/summary.hpp"
#include "evd/models/count_models.hpp"
#include "evd/models/ising.hpp"
#include "evd/models/precision.hpp"
#include "evd/smc/resample.hpp"
#include "evd/zratio/auxiliary.hpp"

namespace py = pybind11;
using namespace evd;

namespace {

Lattice to_lattice(const py::array_t<int, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw py::value_error("lattice must be a 2-d array of -1/+1 spins");
  Lattice l;
  l.rows = static_cast<std::size_t>(a.shape(0));
  l.cols = static_cast<std::size_t>(a.shape(1));
  const auto* p = a.data();
  for (std::size_t i = 0; i < l.sites(); ++i) {
    if (p[i] != 1 && p[i] != -1) throw py::value_error("spins must be -1 or +1");
    l.spins.push_back(static_cast<std::int8_t>(p[i]));
  }
  return l;
}

Vectors to_vectors(const Eigen::MatrixXd& y) {
  Vectors v;
  for (Eigen::Index i = 0; i < y.rows(); ++i) v.push_back(y.row(i).transpose());
  return v;
}

py::dict report_dict(const RunReport& r) {
  py::dict d;
  d["estimator"] = r.estimator;
  d["log_evidence"] = r.log_evidence;
  d["ess"] = r.ess;
  d["sweeps"] = r.sweeps;
  d["particles"] = r.particles;
  d["zero_weights"] = r.zero_weights;
  d["outside_support"] = r.outside_support;
  d["flagged"] = r.flagged();
  return d;
}

}  // namespace

PYBIND11_MODULE(_evd, m) {
  m.doc() = "Evidence estimation for models with intractable normalising constants";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalAbort>(m, "NumericalAbort", PyExc_ArithmeticError);

  m.def("log_sum_exp", [](const std::vector<double>& x) { return log_sum_exp(x); });
  m.def("ess", [](const std::vector<double>& log_w) { return ess(std::span<const double>(log_w)); },
        "Effective sample size of unnormalised log weights.");
  m.def(
      "resample",
      [](const std::vector<double>& log_w, std::size_t count, const std::string& scheme, std::uint64_t seed) {
        RngStream rng(seed);
        return resample_indices(log_w, count, parse_resample_scheme(scheme), rng);
      },
      py::arg("log_w"), py::arg("count"), py::arg("scheme") = "systematic", py::arg("seed") = 1);

  m.def("poisson_log_evidence", &poisson_log_evidence, py::arg("counts"));
  m.def("geometric_log_evidence", &geometric_log_evidence, py::arg("counts"));
  m.def(
      "precision_log_evidence",
      [](const Eigen::MatrixXd& y, std::optional<double> nu) {
        const auto d = y.cols();
        return gaussian_precision_log_evidence(to_vectors(y), nu.value_or(10.0 + static_cast<double>(d)),
                                               Eigen::MatrixXd::Identity(d, d));
      },
      py::arg("y"), py::arg("nu") = py::none(), "Closed-form evidence; y is n x d, identity Wishart scale.");
  m.def(
      "ising_log_z",
      [](double theta, std::size_t rows, std::size_t cols) {
        return ising_exact_log_z(ParameterVector::Constant(1, theta), rows, cols, IsingOrder::first);
      },
      py::arg("theta"), py::arg("rows"), py::arg("cols"));
  m.def(
      "ising_log_evidence",
      [](const py::array_t<int, py::array::c_style | py::array::forcecast>& spins, double lo, double hi) {
        const auto y = to_lattice(spins);
        const IsingModel model(y.rows, y.cols, IsingOrder::first, lo, hi);
        return ising_quadrature_log_evidence(y.rows, y.cols, model.stats(y, y.sites())[0], lo, hi);
      },
      py::arg("spins"), py::arg("prior_lo") = 0.0, py::arg("prior_hi") = 2.0);

  m.def(
      "ising_savis",
      [](const py::array_t<int, py::array::c_style | py::array::forcecast>& spins, double proposal_mean,
         double proposal_sd, std::size_t particles, std::size_t points, std::uint32_t burn_in, std::uint64_t seed) {
        const auto y = to_lattice(spins);
        const IsingModel model(y.rows, y.cols, IsingOrder::first);
        const auto q = IsProposal::gaussian(Eigen::VectorXd::Constant(1, proposal_mean),
                                            Eigen::MatrixXd::Constant(1, 1, proposal_sd * proposal_sd));
        RngStream rng(seed);
        const SimConfig sim = burn_in == 0 ? SimConfig::exact() : SimConfig::gibbs(burn_in);
        py::gil_scoped_release release;
        const auto r = savis_log_evidence(model, y, q, particles, points, UniformSpinAux{}, sim, rng);
        py::gil_scoped_acquire acquire;
        return report_dict(r);
      },
      py::arg("spins"), py::arg("proposal_mean"), py::arg("proposal_sd"), py::arg("particles") = 1000,
      py::arg("points") = 100, py::arg("burn_in") = 20, py::arg("seed") = 1,
      "SAVIS log-evidence for a first-order Ising lattice with a uniform(0, 2) prior.");

  m.def(
      "run_experiment",
      [](const std::string& config_text) {
        const auto cfg = parse_config(config_text);
        ExperimentOutput out;
        {
          py::gil_scoped_release release;
          out = run_experiment(cfg);
        }
        py::dict tables;
        for (const auto& [name, t] : out.tables) tables[py::str(name)] = t.str();
        py::dict d;
        d["id"] = out.id;
        d["hash"] = cfg.hash;
        d["tables"] = tables;
        d["notices"] = out.notices;
        return d;
      },
      py::arg("config_text"), "Run an INI experiment; returns CSV text per table.");

  m.def(
      "summarise",
      [](const std::string& replicates_csv) {
        return summary_table(summarise(estimate_rows(CsvTable::parse(replicates_csv)))).str();
      },
      py::arg("replicates_csv"));

  m.def(
      "prop1_sweep",
      [](std::size_t instances, std::uint64_t seed) {
        Prop1SweepParams p;
        p.instances = instances;
        p.seed = seed;
        const auto r = run_prop1_sweep(p);
        py::dict d;
        d["holding"] = r.holding;
        d["instances"] = instances;
        d["min_margin"] = r.min_margin;
        d["min_lemma_margin"] = r.min_lemma_margin;
        return d;
      },
      py::arg("instances") = 1000, py::arg("seed") = 1);
}
