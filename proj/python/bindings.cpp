#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tullock/fixed_prize.hpp"
#include "tullock/opf.hpp"
#include "tullock/scenario.hpp"
#include "tullock/simulate.hpp"

namespace py = pybind11;
using namespace tullock;

namespace {

py::dict report_to_dict(const sim::SimulationReport& r) {
  py::dict d;
  d["trials"] = r.trials;
  d["mean_revenue"] = r.mean_revenue;
  d["mean_prize_paid"] = r.mean_prize_paid;
  d["mean_profit"] = r.mean_profit;
  d["mean_welfare"] = r.mean_welfare;
  d["mean_total_contribution"] = r.mean_total_contribution;
  d["se_revenue"] = r.se_revenue;
  d["se_prize_paid"] = r.se_prize_paid;
  d["se_profit"] = r.se_profit;
  d["se_welfare"] = r.se_welfare;
  d["per_type_utility"] = r.per_type_utility;
  return d;
}

}  // namespace

PYBIND11_MODULE(pytullock, m) {
  m.doc() = "Tullock contest design toolkit: prize-function mechanism, "
            "optimized fixed-prize benchmark, Monte-Carlo verification";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  py::class_<CostDistribution>(m, "CostDistribution")
      .def_static("uniform", &CostDistribution::uniform, py::arg("a"), py::arg("b"))
      .def_property_readonly("c_lo", &CostDistribution::c_lo)
      .def_property_readonly("c_hi", &CostDistribution::c_hi)
      .def("cdf", &CostDistribution::cdf)
      .def("pdf", &CostDistribution::pdf)
      .def("inv_cdf", &CostDistribution::inv_cdf)
      .def_property_readonly("name", &CostDistribution::name);

  py::class_<EffortTechnology>(m, "EffortTechnology")
      .def_static("power", &EffortTechnology::power, py::arg("alpha"))
      .def("g", &EffortTechnology::g)
      .def("h", &EffortTechnology::h)
      .def("h_prime", &EffortTechnology::h_prime)
      .def_property_readonly("name", &EffortTechnology::name);

  py::class_<ContestConfig>(m, "ContestConfig")
      .def(py::init<int, double, CostDistribution, EffortTechnology,
                    std::uint64_t>(),
           py::arg("n"), py::arg("nu"), py::arg("dist"), py::arg("tech"),
           py::arg("seed") = 0)
      .def_readonly("n", &ContestConfig::n)
      .def_readonly("nu", &ContestConfig::nu)
      .def_readonly("seed", &ContestConfig::seed)
      .def("with_n", &ContestConfig::with_n)
      .def("with_nu", &ContestConfig::with_nu);

  m.def("virtual_cost", &virtual_cost, py::arg("dist"), py::arg("c"));
  m.def(
      "csf_win_prob",
      [](const std::vector<double>& xi, std::size_t i) {
        return csf_win_prob(xi, i);
      },
      py::arg("contributions"), py::arg("i"));

  py::class_<PrizeSchedule>(m, "PrizeSchedule")
      .def_static("constant", &PrizeSchedule::constant, py::arg("v0"))
      .def("__call__", &PrizeSchedule::operator())
      .def_property_readonly("xi_lo", &PrizeSchedule::xi_lo)
      .def_property_readonly("xi_hi", &PrizeSchedule::xi_hi);

  py::class_<opf::OpfStrategy>(m, "OpfStrategy")
      .def("beta", &opf::OpfStrategy::beta, py::arg("c"))
      .def("beta_inv", &opf::OpfStrategy::beta_inv, py::arg("xi"))
      .def_property_readonly("xi_lo", &opf::OpfStrategy::xi_lo)
      .def_property_readonly("xi_hi", &opf::OpfStrategy::xi_hi);

  py::class_<opf::OpfSolution>(m, "OpfSolution")
      .def_readonly("strategy", &opf::OpfSolution::strategy)
      .def_readonly("prize", &opf::OpfSolution::prize)
      .def_readonly("profit", &opf::OpfSolution::profit)
      .def_readonly("welfare", &opf::OpfSolution::welfare)
      .def("beta", [](const opf::OpfSolution& s, double c) {
        return s.strategy.beta(c);
      })
      .def("prize_at", [](const opf::OpfSolution& s, double xi) {
        return s.prize(xi);
      });

  m.def("opf_strategy", &opf::opf_strategy, py::arg("config"));
  m.def("opf_profit", &opf::opf_profit, py::arg("config"));
  m.def("opf_welfare", &opf::opf_welfare, py::arg("config"));
  m.def(
      "opf_prize",
      [](const ContestConfig& c, const opf::OpfStrategy& s, double xi) {
        return opf::opf_prize(c, s, xi);
      },
      py::arg("config"), py::arg("strategy"), py::arg("xi_w"));
  m.def(
      "win_prob",
      [](const ContestConfig& c, const opf::OpfStrategy& s, double xi,
         long samples) {
        const auto p = opf::win_prob(c, s, xi, samples);
        return py::make_tuple(p.value, p.std_error);
      },
      py::arg("config"), py::arg("strategy"), py::arg("xi"),
      py::arg("mc_samples") = 1'000'000);
  m.def("expected_utility", &opf::expected_utility, py::arg("config"),
        py::arg("strategy"), py::arg("c"));
  m.def("solve_opf", &opf::solve, py::arg("config"),
        "Solve the prize-function mechanism: strategy, prize, profit, welfare");

  py::class_<fixed_prize::FixedPrizeEquilibrium>(m, "FixedPrizeEquilibrium")
      .def_property_readonly(
          "grid_points",
          [](const fixed_prize::FixedPrizeEquilibrium& e) { return e.grid.points; })
      .def_readonly("xi", &fixed_prize::FixedPrizeEquilibrium::xi)
      .def_readonly("v0", &fixed_prize::FixedPrizeEquilibrium::v0)
      .def_readonly("residual", &fixed_prize::FixedPrizeEquilibrium::residual);

  py::class_<fixed_prize::FixedPrizeSolution>(m, "FixedPrizeSolution")
      .def_readonly("v0_star", &fixed_prize::FixedPrizeSolution::v0_star)
      .def_readonly("pi0_star", &fixed_prize::FixedPrizeSolution::pi0_star)
      .def_readonly("equilibrium", &fixed_prize::FixedPrizeSolution::equilibrium)
      .def_readonly("nu", &fixed_prize::FixedPrizeSolution::nu)
      .def_readonly("trajectory", &fixed_prize::FixedPrizeSolution::trajectory);

  m.def(
      "solve_equilibrium",
      [](const ContestConfig& c, double v0, int m_points) {
        return fixed_prize::solve_equilibrium(c, v0, m_points);
      },
      py::arg("config"), py::arg("v0"), py::arg("m"));
  m.def("profit_estimate", &fixed_prize::profit_estimate, py::arg("equilibrium"),
        py::arg("nu"));
  m.def("welfare_estimate", &fixed_prize::welfare_estimate, py::arg("equilibrium"));
  m.def(
      "optimize_benchmark",
      [](const ContestConfig& c, double v0_lo, double v0_hi, double v0_step,
         int m_points) {
        fixed_prize::OptimizeParams p;
        p.v0_lo = v0_lo;
        p.v0_hi = v0_hi;
        p.v0_step = v0_step;
        p.m = m_points;
        return fixed_prize::optimize(c, p);
      },
      py::arg("config"), py::arg("v0_lo") = 0.01, py::arg("v0_hi") = 5.0,
      py::arg("v0_step") = 0.01, py::arg("m") = 100);

  m.def(
      "simulate_opf",
      [](const ContestConfig& c, long trials) {
        const auto sol = opf::solve(c);
        const opf::OpfStrategy strat = sol.strategy;
        return report_to_dict(sim::run(
            c, [strat](double cost) { return strat.beta(cost); }, sol.prize,
            trials));
      },
      py::arg("config"), py::arg("trials") = 100'000,
      "Simulate the prize-function mechanism and aggregate revenue, prize, "
      "profit and welfare");
  m.def(
      "best_response_gap_opf",
      [](const ContestConfig& c, double type_cost, int deviation_points,
         long trials) {
        const auto sol = opf::solve(c);
        const opf::OpfStrategy strat = sol.strategy;
        std::vector<double> devs(deviation_points);
        for (int k = 0; k < deviation_points; ++k) {
          devs[k] = strat.xi_lo() +
                    (strat.xi_hi() - strat.xi_lo()) * k /
                        std::max(1, deviation_points - 1);
        }
        return sim::best_response_gap(
            c, [strat](double cost) { return strat.beta(cost); }, sol.prize,
            type_cost, devs, trials);
      },
      py::arg("config"), py::arg("c"), py::arg("deviation_points") = 64,
      py::arg("trials") = 100'000);

  py::class_<Scenario>(m, "Scenario")
      .def_static("load",
                  [](const std::string& path) { return Scenario::load(path); })
      .def_static("from_json", &Scenario::from_json_text)
      .def_readonly("name", &Scenario::name)
      .def_readonly("n", &Scenario::n)
      .def_readonly("seed", &Scenario::seed)
      .def("nu_values", &Scenario::nu_values)
      .def("make_config",
           [](const Scenario& s, double nu) { return s.make_config(nu); });
}
