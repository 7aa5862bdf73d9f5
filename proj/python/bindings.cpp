#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "srr/ao.hpp"
#include "srr/capacities.hpp"
#include "srr/channels.hpp"
#include "srr/dc.hpp"
#include "srr/experiment.hpp"
#include "srr/verify.hpp"

namespace py = pybind11;
using namespace srr;

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Secrecy rate regions for joint multicast and confidential MIMO "
      "transmission with artificial noise";

  py::register_exception<DomainError>(m, "DomainError");

  py::class_<ChannelSet>(m, "ChannelSet")
      .def(py::init<>())
      .def_readwrite("n_t", &ChannelSet::n_t)
      .def_readwrite("rx", &ChannelSet::rx)
      .def("users", &ChannelSet::users)
      .def("eavesdroppers", &ChannelSet::eavesdroppers)
      .def("n_r", &ChannelSet::n_r, py::arg("k"))
      .def("check", &ChannelSet::check);

  py::class_<CovarianceTriple>(m, "CovarianceTriple")
      .def(py::init<>())
      .def_static("zero", &CovarianceTriple::zero, py::arg("n_t"),
                  py::arg("power"))
      .def_readwrite("multicast", &CovarianceTriple::multicast)
      .def_readwrite("confidential", &CovarianceTriple::confidential)
      .def_readwrite("noise", &CovarianceTriple::noise)
      .def_readwrite("power", &CovarianceTriple::power)
      .def("sum", &CovarianceTriple::sum)
      .def("total_trace", &CovarianceTriple::total_trace);

  py::class_<RatePoint>(m, "RatePoint")
      .def_readonly("multicast_bits", &RatePoint::multicast_bits)
      .def_readonly("secrecy_bits", &RatePoint::secrecy_bits)
      .def_readonly("secrecy_gap_bits", &RatePoint::secrecy_gap_bits);

  py::class_<TraceRow>(m, "TraceRow")
      .def_readonly("n", &TraceRow::n)
      .def_readonly("objective_nats", &TraceRow::objective_nats)
      .def_readonly("multicast_bits", &TraceRow::multicast_bits)
      .def_readonly("secrecy_bits", &TraceRow::secrecy_bits);

  py::class_<BoundaryRecord>(m, "BoundaryRecord")
      .def_readonly("param", &BoundaryRecord::param)
      .def_readonly("r0_bits", &BoundaryRecord::r0_bits)
      .def_readonly("rc_bits", &BoundaryRecord::rc_bits)
      .def_readonly("outer_iters", &BoundaryRecord::outer_iters)
      .def_readonly("inner_solves", &BoundaryRecord::inner_solves)
      .def_readonly("wall_ms", &BoundaryRecord::wall_ms)
      .def_readonly("status", &BoundaryRecord::status)
      .def_readonly("trace", &BoundaryRecord::trace);

  py::class_<RegionBoundary>(m, "RegionBoundary")
      .def_readonly("method", &RegionBoundary::method)
      .def_readonly("seed", &RegionBoundary::seed)
      .def_readonly("p_db", &RegionBoundary::p_db)
      .def_readonly("records", &RegionBoundary::records)
      .def_readonly("solutions", &RegionBoundary::solutions);

  py::class_<DcResult>(m, "DcResult")
      .def_readonly("cov", &DcResult::cov)
      .def_readonly("rates", &DcResult::rates)
      .def_readonly("trace", &DcResult::trace)
      .def_readonly("converged", &DcResult::converged)
      .def_readonly("outer_iters", &DcResult::outer_iters)
      .def_readonly("inner_solves", &DcResult::inner_solves)
      .def_readonly("status", &DcResult::status);

  py::class_<AoResult>(m, "AoResult")
      .def_readonly("cov", &AoResult::cov)
      .def_readonly("rates", &AoResult::rates)
      .def_readonly("trace", &AoResult::trace)
      .def_readonly("converged", &AoResult::converged)
      .def_readonly("outer_iters", &AoResult::outer_iters)
      .def_readonly("inner_solves", &AoResult::inner_solves)
      .def_readonly("status", &AoResult::status)
      .def_readonly("objective_nats", &AoResult::objective_nats);

  m.def("generate_channels", &generate_channels, py::arg("seed"),
        py::arg("n_t"), py::arg("n_r"));
  m.def("save_channels", &save_channels, py::arg("ch"), py::arg("path"),
        py::arg("seed") = 0);
  m.def(
      "load_channels",
      [](const std::string& path) { return load_channels(path); },
      py::arg("path"));

  m.def("multicast_capacity", &multicast_capacity, py::arg("ch"),
        py::arg("cov"), py::arg("k"));
  m.def("confidential_capacity", &confidential_capacity, py::arg("ch"),
        py::arg("cov"));
  m.def("eavesdrop_capacity", &eavesdrop_capacity, py::arg("ch"),
        py::arg("cov"), py::arg("k"));
  m.def("multicast_rate", &multicast_rate, py::arg("ch"), py::arg("cov"));
  m.def("max_leakage", &max_leakage, py::arg("ch"), py::arg("cov"));
  m.def("secrecy_rate", &secrecy_rate, py::arg("ch"), py::arg("cov"));
  m.def("rate_point", &rate_point, py::arg("ch"), py::arg("cov"));
  m.def("weighted_objective", &weighted_objective, py::arg("ch"),
        py::arg("cov"), py::arg("lambda_c"));

  m.def(
      "compute_tau_max",
      [](const ChannelSet& ch, double power) {
        TauMaxResult r = compute_tau_max(ch, power);
        return py::make_tuple(r.tau_bits, r.q0);
      },
      py::arg("ch"), py::arg("power"),
      "Largest supportable multicast floor and its covariance");

  m.def(
      "dc_solve",
      [](const ChannelSet& ch, double power, double tau_bits, double tol_bits,
         int max_outer, bool include_an) {
        DcConfig cfg;
        cfg.tol_bits = tol_bits;
        if (max_outer > 0) cfg.max_outer = max_outer;
        cfg.include_an = include_an;
        return dc_solve(ch, power, tau_bits, cfg);
      },
      py::arg("ch"), py::arg("power"), py::arg("tau_bits"),
      py::arg("tol_bits") = 1e-4, py::arg("max_outer") = 0,
      py::arg("include_an") = true);

  m.def(
      "ao_solve",
      [](const ChannelSet& ch, double power, double lambda_c, double tol_bits,
         int max_outer, bool include_an) {
        AoConfig cfg;
        cfg.tol_bits = tol_bits;
        if (max_outer > 0) cfg.max_outer = max_outer;
        cfg.include_an = include_an;
        return ao_solve(ch, power, lambda_c, cfg);
      },
      py::arg("ch"), py::arg("power"), py::arg("lambda_c"),
      py::arg("tol_bits") = 1e-4, py::arg("max_outer") = 0,
      py::arg("include_an") = true);

  m.def(
      "trace_region_dc",
      [](const ChannelSet& ch, double power, int points, bool include_an) {
        DcSweepConfig cfg;
        cfg.points = points;
        cfg.dc.include_an = include_an;
        return trace_region_dc(ch, power, cfg);
      },
      py::arg("ch"), py::arg("power"), py::arg("points") = 21,
      py::arg("include_an") = true);

  m.def(
      "trace_region_ao",
      [](const ChannelSet& ch, double power, std::vector<double> weights,
         bool include_an) {
        AoSweepConfig cfg;
        cfg.weights = std::move(weights);
        cfg.ao.include_an = include_an;
        return trace_region_ao(ch, power, cfg);
      },
      py::arg("ch"), py::arg("power"),
      py::arg("weights") = std::vector<double>{},
      py::arg("include_an") = true);

  m.def(
      "complexity_estimate",
      [](int n_t, int k) {
        ComplexityEstimate e = complexity_estimate(n_t, k);
        return py::make_tuple(e.n1, e.n2, e.t1, e.t2);
      },
      py::arg("n_t"), py::arg("k"));

  m.def("db_to_linear", &db_to_linear, py::arg("db"));
  m.def("linear_to_db", &linear_to_db, py::arg("p"));
}
