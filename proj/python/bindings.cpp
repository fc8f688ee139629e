#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include <json.hpp>

#include "siu/attack.hpp"
#include "siu/estimator.hpp"
#include "siu/graph.hpp"
#include "siu/harness.hpp"
#include "siu/lemma_lab.hpp"
#include "siu/schedule.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

// Python dict -> JSON via the json module; keeps config handling in one place (C++).
json to_json(const py::object& obj) {
  py::module_ json_mod = py::module_::import("json");
  return json::parse(json_mod.attr("dumps")(obj).cast<std::string>());
}

py::object from_json(const json& j) {
  py::module_ json_mod = py::module_::import("json");
  return json_mod.attr("loads")(j.dump());
}

siu::ExperimentConfig config_from(const py::dict& cfg) { return siu::config_from_json(to_json(cfg)); }

py::dict trajectory_dict(const siu::lemma::TrajectoryRecord& r) {
  py::dict d;
  d["t"] = r.t;
  d["v"] = r.v;
  d["w"] = r.w;
  d["horizon"] = r.horizon;
  return d;
}

siu::lemma::TrajectoryRecord trajectory_from(const std::vector<std::int64_t>& t, const std::vector<double>& v,
                                             const std::vector<double>& w, std::int64_t horizon) {
  siu::lemma::TrajectoryRecord r;
  r.t = t;
  r.v = v;
  r.w = w;
  r.horizon = horizon;
  return r;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Saturated innovation update: resilient distributed estimation under sensor attacks";

  static py::exception<siu::Error> base_exc(m, "SiuError", PyExc_RuntimeError);
  static py::exception<siu::ValidationError> validation_exc(m, "ValidationError", base_exc.ptr());
  static py::exception<siu::InvariantViolation> invariant_exc(m, "InvariantViolation", base_exc.ptr());
  static py::exception<siu::DivergenceError> divergence_exc(m, "DivergenceError", base_exc.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const siu::ValidationError& e) {
      py::set_error(validation_exc, e.what());
    } catch (const siu::InvariantViolation& e) {
      py::set_error(invariant_exc, e.what());
    } catch (const siu::DivergenceError& e) {
      py::set_error(divergence_exc, e.what());
    } catch (const siu::Error& e) {
      py::set_error(base_exc, e.what());
    }
  });

  // graph
  py::class_<siu::Graph>(m, "Graph")
      .def(py::init<int, std::vector<siu::Edge>>(), py::arg("n"), py::arg("edges"))
      .def_property_readonly("n", &siu::Graph::num_vertices)
      .def_property_readonly("edges", &siu::Graph::edges)
      .def("neighbors", [](const siu::Graph& g, int v) {
        auto s = g.neighbors(v);
        return std::vector<int>(s.begin(), s.end());
      })
      .def("degree", &siu::Graph::degree)
      .def("max_degree", &siu::Graph::max_degree)
      .def("to_edge_list", [](const siu::Graph& g) { return siu::to_edge_list(g); })
      .def("__eq__", [](const siu::Graph& a, const siu::Graph& b) { return a == b; })
      .def("__repr__", [](const siu::Graph& g) {
        return "Graph(n=" + std::to_string(g.num_vertices()) + ", edges=" + std::to_string(g.num_edges()) + ")";
      });

  py::class_<siu::SpectralSummary>(m, "SpectralSummary")
      .def_readonly("lambda2", &siu::SpectralSummary::lambda2)
      .def_readonly("lambdaN", &siu::SpectralSummary::lambdaN)
      .def_readonly("residual", &siu::SpectralSummary::residual);

  m.def("random_geometric", py::overload_cast<int, double, std::uint64_t>(&siu::random_geometric), py::arg("n"),
        py::arg("radius"), py::arg("seed"));
  m.def("is_connected", &siu::is_connected);
  m.def("laplacian", &siu::laplacian);
  m.def("spectral_bounds", &siu::spectral_bounds, py::arg("L"), py::arg("tol") = siu::kDefaultSpectralTol);
  m.def("parse_edge_list", [](const std::string& text) {
    std::istringstream is(text);
    return siu::read_edge_list(is);
  });

  // schedule
  py::class_<siu::ScheduleConfig>(m, "ScheduleConfig")
      .def(py::init<double, double, double, double, double, double, int>(), py::arg("a") = 1.54e-4,
           py::arg("b") = 3.78e-2, py::arg("tau1") = 0.15, py::arg("tau2") = 0.001, py::arg("s") = 0.201,
           py::arg("eta") = 100.0, py::arg("n_agents") = 1)
      .def_readwrite("a", &siu::ScheduleConfig::a)
      .def_readwrite("b", &siu::ScheduleConfig::b)
      .def_readwrite("tau1", &siu::ScheduleConfig::tau1)
      .def_readwrite("tau2", &siu::ScheduleConfig::tau2)
      .def_readwrite("s", &siu::ScheduleConfig::s)
      .def_readwrite("eta", &siu::ScheduleConfig::eta)
      .def_property("n_agents", &siu::ScheduleConfig::n_agents, &siu::ScheduleConfig::set_n_agents)
      .def_property_readonly("kappa1", &siu::ScheduleConfig::kappa1)
      .def_property_readonly("kappa2", &siu::ScheduleConfig::kappa2);

  py::class_<siu::GammaState>(m, "GammaState")
      .def(py::init<>())
      .def_readwrite("gamma1", &siu::GammaState::gamma1)
      .def_readwrite("gamma2", &siu::GammaState::gamma2)
      .def_readwrite("t", &siu::GammaState::t)
      .def_property_readonly("total", [](const siu::GammaState& g) { return siu::gamma_total(g); });

  m.def("validate", [](const siu::ScheduleConfig& c, double lambdaN, double lambda2) {
    std::vector<std::string> out;
    for (const auto& v : siu::validate(c, lambdaN, lambda2)) out.push_back(v.message);
    return out;
  });
  m.def("alpha", &siu::alpha);
  m.def("beta", &siu::beta);
  m.def("gamma_initial", &siu::gamma_initial);
  m.def("gamma_advance", &siu::gamma_advance);
  m.def("gamma_total", &siu::gamma_total);

  // attack
  m.def(
      "attack_set",
      [](int size, const std::string& mode, std::uint64_t seed, std::int64_t t, int n_agents) {
        siu::AttackPlan plan;
        plan.size = size;
        plan.mode = siu::parse_attack_mode(mode);
        plan.seed = seed;
        return siu::attack_set(plan, t, n_agents);
      },
      py::arg("size"), py::arg("mode"), py::arg("seed"), py::arg("t"), py::arg("n_agents"));
  m.def(
      "measure",
      [](const Eigen::VectorXd& theta, int size, const std::string& mode, const std::string& strategy,
         std::uint64_t seed, std::int64_t t, int n_agents, std::vector<double> offset, double magnitude) {
        siu::AttackSettings s;
        s.size = size;
        s.mode = siu::parse_attack_mode(mode);
        s.strategy = strategy;
        s.seed = seed;
        s.offset = std::move(offset);
        s.magnitude = magnitude;
        const auto plan = siu::make_attack_plan(s, static_cast<int>(theta.size()));
        auto meas = siu::measure(theta, plan, t, n_agents);
        return py::make_tuple(meas.values, meas.attacked);
      },
      py::arg("theta"), py::arg("size"), py::arg("mode") = "fixed", py::arg("strategy") = "negation",
      py::arg("seed") = 0, py::arg("t") = 0, py::arg("n_agents"), py::arg("offset") = std::vector<double>{},
      py::arg("magnitude") = 1.0);

  // estimator
  m.def("gain", py::overload_cast<const Eigen::VectorXd&, const Eigen::VectorXd&, double>(&siu::gain),
        py::arg("y"), py::arg("x"), py::arg("gamma"));
  m.def(
      "siu_step",
      [](const siu::RowMatrix& x, const siu::Graph& g, const siu::RowMatrix& y, double alpha, double beta,
         double gamma) {
        siu::EstimatorState state{x, 0};
        siu::Measurement meas{y, std::vector<bool>(static_cast<std::size_t>(y.rows()), false)};
        std::vector<double> gains(static_cast<std::size_t>(x.rows()));
        auto next = siu::siu_step(state, g, meas, alpha, beta, gamma, gains);
        return py::make_tuple(next.x, gains);
      },
      py::arg("x"), py::arg("graph"), py::arg("y"), py::arg("alpha"), py::arg("beta"), py::arg("gamma"));
  m.def(
      "diagnostics",
      [](const siu::RowMatrix& x, const Eigen::VectorXd& theta, double gamma1, double gamma2) {
        siu::GammaState g{gamma1, gamma2, 0};
        auto d = siu::diagnostics(siu::EstimatorState{x, 0}, theta, g);
        py::dict out;
        out["V"] = d.V;
        out["W"] = d.W;
        out["max_err"] = d.max_err;
        out["mean_err"] = d.mean_err;
        out["inv_v"] = d.v_ok;
        out["inv_w"] = d.w_ok;
        out["inv_err"] = d.err_ok;
        return out;
      },
      py::arg("x"), py::arg("theta"), py::arg("gamma1"), py::arg("gamma2"));

  // lemma lab
  auto lm = m.def_submodule("lemma", "Time-varying recursion oracles");
  py::class_<siu::lemma::ScalarSystemConfig>(lm, "ScalarSystemConfig")
      .def(py::init<>())
      .def_readwrite("c1", &siu::lemma::ScalarSystemConfig::c1)
      .def_readwrite("c2", &siu::lemma::ScalarSystemConfig::c2)
      .def_readwrite("delta1", &siu::lemma::ScalarSystemConfig::delta1)
      .def_readwrite("delta2", &siu::lemma::ScalarSystemConfig::delta2)
      .def_readwrite("c3", &siu::lemma::ScalarSystemConfig::c3)
      .def_readwrite("c4", &siu::lemma::ScalarSystemConfig::c4)
      .def_readwrite("c5", &siu::lemma::ScalarSystemConfig::c5)
      .def_readwrite("c6", &siu::lemma::ScalarSystemConfig::c6)
      .def_readwrite("c7", &siu::lemma::ScalarSystemConfig::c7)
      .def_readwrite("v0", &siu::lemma::ScalarSystemConfig::v0)
      .def_readwrite("w0", &siu::lemma::ScalarSystemConfig::w0);
  lm.def("simulate_basic", [](const siu::lemma::ScalarSystemConfig& c, std::int64_t T) {
    return trajectory_dict(siu::lemma::simulate_basic(c, T));
  });
  lm.def("simulate_modified", [](const siu::lemma::ScalarSystemConfig& c, std::int64_t T) {
    return trajectory_dict(siu::lemma::simulate_modified(c, T));
  });
  lm.def("simulate_coupled", [](const siu::lemma::ScalarSystemConfig& c, std::int64_t T) {
    return trajectory_dict(siu::lemma::simulate_coupled(c, T));
  });
  lm.def("coupled_from_schedule", &siu::lemma::coupled_from_schedule);
  lm.def(
      "decay_rate_check",
      [](const py::dict& traj, double delta0, double tail_fraction, double shrink_factor) {
        auto rec = trajectory_from(traj["t"].cast<std::vector<std::int64_t>>(), traj["v"].cast<std::vector<double>>(),
                                   traj["w"].cast<std::vector<double>>(), traj["horizon"].cast<std::int64_t>());
        return siu::lemma::decay_rate_check(rec, delta0, tail_fraction, shrink_factor);
      },
      py::arg("trajectory"), py::arg("delta0"), py::arg("tail_fraction") = siu::lemma::kDefaultTailFraction,
      py::arg("shrink_factor") = siu::lemma::kDefaultShrinkFactor);

  // harness
  m.def("sample_theta", &siu::sample_theta, py::arg("dim"), py::arg("eta"), py::arg("seed"));
  m.def(
      "run",
      [](const py::dict& cfg) {
        const auto sum = siu::run(config_from(cfg));
        py::dict out = from_json(siu::summary_to_json(sum));
        std::vector<std::int64_t> t;
        std::vector<double> max_err, mean_err, V, W, g1, g2, gt;
        for (const auto& r : sum.rows) {
          t.push_back(r.t);
          max_err.push_back(r.max_err);
          mean_err.push_back(r.mean_err);
          V.push_back(r.V);
          W.push_back(r.W);
          g1.push_back(r.gamma1);
          g2.push_back(r.gamma2);
          gt.push_back(r.gamma_total);
        }
        py::dict rows;
        rows["t"] = t;
        rows["max_err"] = max_err;
        rows["mean_err"] = mean_err;
        rows["V"] = V;
        rows["W"] = W;
        rows["gamma1"] = g1;
        rows["gamma2"] = g2;
        rows["gamma_total"] = gt;
        out["rows"] = rows;
        return out;
      },
      py::arg("config"), "Run an experiment from a flat or nested config dict; returns the summary.");
  m.def(
      "sweep_resilience",
      [](const py::dict& cfg, const std::vector<double>& s_values, std::int64_t T) {
        const auto res = siu::sweep_resilience(config_from(cfg), s_values, T);
        std::vector<std::pair<double, double>> rows;
        for (const auto& r : res.rows) rows.emplace_back(r.s, r.gamma_total);
        return py::make_tuple(rows, res.skipped);
      },
      py::arg("config"), py::arg("s_values"), py::arg("T"));
}
