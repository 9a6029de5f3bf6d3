#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "gebridge/diagnostics.hpp"
#include "gebridge/ge_bridge.hpp"
#include "gebridge/io.hpp"
#include "gebridge/trace_sim.hpp"

namespace py = pybind11;
using namespace gebridge;

namespace {

KernelSpec make_kernel(const std::string& family, double t_c, double sigma2) {
  KernelSpec k{parse_kernel_family(family), sigma2, t_c};
  k.validate();
  return k;
}

SimPlan make_plan(const std::string& kernel, double t_c, double s, double d, double sigma2,
                  std::size_t n_reps, std::size_t n_slots, std::uint64_t seed) {
  SimPlan plan{make_kernel(kernel, t_c, sigma2), {d, s}, n_slots, n_reps, seed};
  plan.validate();
  return plan;
}

SamplerMethod parse_method(const std::string& m) {
  if (m == "auto") return SamplerMethod::Auto;
  if (m == "factorization") return SamplerMethod::Factorization;
  if (m == "autoregressive") return SamplerMethod::Autoregressive;
  throw DomainError("unknown sampler method '" + m + "'");
}

std::vector<BinaryTrace> traces_from_array(py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> a) {
  if (a.ndim() != 2) throw DomainError("traces must be a 2-D array (replications x slots)");
  std::vector<BinaryTrace> out(static_cast<std::size_t>(a.shape(0)));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  for (std::size_t r = 0; r < out.size(); ++r) {
    out[r].rep = r;
    out[r].bits.assign(a.data(static_cast<py::ssize_t>(r), 0), a.data(static_cast<py::ssize_t>(r), 0) + cols);
    for (auto& b : out[r].bits) b = b ? 1 : 0;
  }
  return out;
}

py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gaussian-threshold to Gilbert-Elliott channel bridge";
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  m.def("normal_cdf", &normal_cdf, py::arg("x"));
  m.def("owens_t", &owens_t, py::arg("h"), py::arg("a"));
  m.def("bivariate_orthant_cdf", [](double s, double rho) { return bivariate_orthant_cdf(s, Correlation(rho)); },
        py::arg("s"), py::arg("rho"));
  m.def(
      "trivariate_orthant",
      [](std::array<double, 3> t, double r1, double r2) { return trivariate_orthant(t, Correlation(r1), Correlation(r2)); },
      py::arg("thresholds"), py::arg("rho1"), py::arg("rho2"));

  py::class_<GeParams>(m, "GeParams")
      .def_readonly("p01", &GeParams::p01)
      .def_readonly("p10", &GeParams::p10)
      .def_readonly("pi0", &GeParams::pi0)
      .def_readonly("pi1", &GeParams::pi1)
      .def_readonly("dwell0", &GeParams::dwell0)
      .def_readonly("dwell1", &GeParams::dwell1)
      .def_readonly("persistence", &GeParams::persistence)
      .def_readonly("q", &GeParams::q)
      .def_readonly("n_cross", &GeParams::n_cross)
      .def_readonly("rho", &GeParams::rho)
      .def("to_dict", [](const GeParams& g) { return to_py(io::to_json(g)); })
      .def("__repr__", [](const GeParams& g) {
        return "GeParams(p01=" + io::format_number(g.p01) + ", p10=" + io::format_number(g.p10) +
               ", persistence=" + io::format_number(g.persistence) + ")";
      });

  m.def(
      "one_step_correlation",
      [](const std::string& kernel, double t_c, double d, double sigma2) {
        return one_step_correlation(make_kernel(kernel, t_c, sigma2), d).value();
      },
      py::arg("kernel"), py::arg("t_c"), py::arg("d") = 1.0, py::arg("sigma2") = 1.0);
  m.def(
      "ge_params",
      [](const std::string& kernel, double t_c, double s, double d, double sigma2) {
        return ge_params(make_kernel(kernel, t_c, sigma2), {d, s});
      },
      py::arg("kernel"), py::arg("t_c"), py::arg("s") = 0.0, py::arg("d") = 1.0, py::arg("sigma2") = 1.0);
  m.def(
      "ge_params_from_rho", [](double rho, double s, double d) { return ge_params_from_rho(Correlation(rho), {d, s}); },
      py::arg("rho"), py::arg("s") = 0.0, py::arg("d") = 1.0);
  m.def(
      "asymptotic_persistence",
      [](const std::string& kernel, double t_c, double s, double d) {
        return asymptotic_persistence(make_kernel(kernel, t_c, 1.0), {d, s});
      },
      py::arg("kernel"), py::arg("t_c"), py::arg("s") = 0.0, py::arg("d") = 1.0);

  m.def(
      "simulate",
      [](const std::string& kernel, double t_c, double s, double d, double sigma2, std::size_t n_reps,
         std::size_t n_slots, std::uint64_t seed, const std::string& method, unsigned jobs) {
        const auto plan = make_plan(kernel, t_c, s, d, sigma2, n_reps, n_slots, seed);
        std::vector<BinaryTrace> traces;
        {
          py::gil_scoped_release release;
          traces = simulate_traces(plan, parse_method(method), jobs);
        }
        py::array_t<std::uint8_t> out({static_cast<py::ssize_t>(n_reps), static_cast<py::ssize_t>(n_slots)});
        auto buf = out.mutable_unchecked<2>();
        for (std::size_t r = 0; r < n_reps; ++r)
          std::memcpy(buf.mutable_data(static_cast<py::ssize_t>(r), 0), traces[r].bits.data(), n_slots);
        return out;
      },
      py::arg("kernel"), py::arg("t_c"), py::arg("s") = 0.0, py::arg("d") = 1.0, py::arg("sigma2") = 1.0,
      py::arg("n_reps") = 250, py::arg("n_slots") = 1200, py::arg("seed") = kDefaultSeed,
      py::arg("method") = "auto", py::arg("jobs") = 1);

  m.def(
      "estimate_transitions",
      [](py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> a, const std::string& aggregation) {
        const auto agg = aggregation == "pooled"            ? Aggregation::Pooled
                         : aggregation == "per-replication" ? Aggregation::PerReplication
                                                            : throw DomainError("unknown aggregation '" + aggregation + "'");
        return to_py(io::to_json(estimate_transitions(traces_from_array(a), agg)));
      },
      py::arg("traces"), py::arg("aggregation") = "pooled");

  m.def(
      "markov_gap_exact",
      [](const std::string& kernel, double t_c, double s, double d) {
        return to_py(io::to_json(markov_gap_exact(make_kernel(kernel, t_c, 1.0), {d, s})));
      },
      py::arg("kernel"), py::arg("t_c"), py::arg("s") = 0.0, py::arg("d") = 1.0);
  m.def(
      "markov_gap_empirical", [](py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> a) {
        return to_py(io::to_json(markov_gap_empirical(traces_from_array(a))));
      },
      py::arg("traces"));

  m.def(
      "report",
      [](const std::string& kernel, double t_c, double s, double d, std::size_t n_reps, std::size_t n_slots,
         std::uint64_t seed, unsigned jobs) {
        const auto plan = make_plan(kernel, t_c, s, d, 1.0, n_reps, n_slots, seed);
        ReportOptions opts;
        opts.jobs = jobs;
        nlohmann::json j;
        {
          py::gil_scoped_release release;
          j = io::to_json(build_report(plan, opts));
        }
        return to_py(j);
      },
      py::arg("kernel"), py::arg("t_c"), py::arg("s") = 0.0, py::arg("d") = 1.0, py::arg("n_reps") = 250,
      py::arg("n_slots") = 1200, py::arg("seed") = kDefaultSeed, py::arg("jobs") = 1);
}
