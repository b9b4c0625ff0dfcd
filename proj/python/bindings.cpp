#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "treeosc/ethernet_backoff.hpp"
#include "treeosc/harmonic_sums.hpp"
#include "treeosc/monte_carlo.hpp"
#include "treeosc/splitting_cost.hpp"

namespace py = pybind11;
using namespace treeosc;

namespace {

splitting::CostMethod method_from(const std::string& name) { return splitting::parse_cost_method(name); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Expected costs of random splitting, their fluctuations, and backoff counter laws";

  py::register_exception<numerics::NonConvergence>(m, "NonConvergence", PyExc_ArithmeticError);
  py::register_exception<ethernet::PrecisionLoss>(m, "PrecisionLoss", PyExc_ValueError);

  m.def("mean_cost", [](std::uint64_t n, const std::string& method) { return splitting::mean_cost(n, method_from(method)); },
        py::arg("n"), py::arg("method") = "series", "E(R_n) by recurrence, series, integral or exact.");
  m.def("solve_recurrence", [](int n_max) { return splitting::solve_recurrence(n_max).values; }, py::arg("n_max"),
        "E(R_0), ..., E(R_n_max) from the recurrence.");
  m.def(
      "solve_recurrence_exact",
      [](int n_max) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& v : splitting::solve_recurrence_exact(n_max).values) {
          out.emplace_back(boost::multiprecision::numerator(v).str(), boost::multiprecision::denominator(v).str());
        }
        return out;
      },
      py::arg("n_max"), "Exact values as (numerator, denominator) decimal strings.");
  m.def("poisson_transform", [](double x) { return splitting::poisson_transform_series(x); }, py::arg("x"));
  m.def("periodic_f", [](double y) { return splitting::periodic_f(y); }, py::arg("y"));
  m.def("periodic_f_mean", &splitting::periodic_f_mean);

  m.def(
      "dyadic_sum",
      [](const std::string& integrand, double x, double beta) {
        return harmonic::dyadic_sum_direct(harmonic::integrand_by_name(integrand), x, beta);
      },
      py::arg("integrand"), py::arg("x"), py::arg("beta") = 0.5);
  m.def(
      "dyadic_sum_representation",
      [](const std::string& integrand, double x) {
        return harmonic::dyadic_sum_representation(harmonic::integrand_by_name(integrand), x);
      },
      py::arg("integrand"), py::arg("x"));
  m.def(
      "dyadic_periodic_f",
      [](const std::string& integrand, double y) {
        return harmonic::dyadic_periodic_f(harmonic::integrand_by_name(integrand), y);
      },
      py::arg("integrand"), py::arg("y"));

  m.def(
      "chain_distribution",
      [](double a, std::uint64_t t) {
        const auto d = ethernet::chain_distribution_at(a, t);
        return py::make_tuple(d.first_counter, d.probs);
      },
      py::arg("a"), py::arg("t"), "(first_counter, probabilities) of the backoff counter at time t.");
  m.def("h_density", [](double a, double x) { return ethernet::h_density(ethernet::make_h_density_spec(a), x); },
        py::arg("a"), py::arg("x"));
  m.def("h_survival", [](double a, double x) { return ethernet::h_survival(ethernet::make_h_density_spec(a), x); },
        py::arg("a"), py::arg("x"));
  m.def("h_fence", [](double a) { return ethernet::make_h_density_spec(a).x_min; }, py::arg("a"));
  m.def("limit_distribution_cdf", py::overload_cast<double, double, double>(&ethernet::limit_distribution_cdf),
        py::arg("a"), py::arg("x"), py::arg("z"));

  m.def(
      "estimate_mean_cost",
      [](std::uint64_t n, std::uint64_t replicas, std::uint64_t seed) {
        py::gil_scoped_release release;
        const auto est = mc::estimate_mean_cost(n, replicas, seed);
        py::gil_scoped_acquire acquire;
        py::dict d;
        d["n"] = est.n;
        d["replicas"] = est.replicas;
        d["mean"] = est.mean;
        d["stderr"] = est.std_error;
        d["seed"] = est.seed;
        return d;
      },
      py::arg("n"), py::arg("replicas"), py::arg("seed") = 1);
}
