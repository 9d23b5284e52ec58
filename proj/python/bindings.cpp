#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "bilateral/engine.hpp"
#include "bilateral/errors.hpp"
#include "bilateral/experiments.hpp"
#include "bilateral/outputs.hpp"
#include "bilateral/presets.hpp"
#include "bilateral/utility.hpp"
#include "bilateral/walras.hpp"

namespace py = pybind11;
using namespace bilateral;

namespace {

py::list rows(const Matrix& m) {
  py::list out;
  for (std::size_t r = 0; r < m.rows(); ++r) out.append(std::vector<double>(m.row(r).begin(), m.row(r).end()));
  return out;
}

Matrix to_matrix(const std::vector<std::vector<double>>& v) {
  if (v.empty()) return {};
  Matrix m(v.size(), v.front().size());
  for (std::size_t r = 0; r < v.size(); ++r) {
    if (v[r].size() != m.cols()) throw DomainError("rows differ in length");
    std::copy(v[r].begin(), v[r].end(), m.row(r).begin());
  }
  return m;
}

py::dict summary_dict(const RunSummary& s) {
  py::dict d;
  d["seed"] = s.seed;
  d["status"] = std::string(to_string(s.status));
  d["iterations"] = s.iterations;
  d["trades"] = s.trades;
  d["decays"] = s.decays;
  d["prices"] = s.prices;
  d["holdings"] = rows(s.holdings);
  d["max_dispersion"] = s.max_dispersion;
  d["max_kkt_residual"] = s.max_kkt_residual;
  d["kkt_passes"] = s.kkt_passes;
  d["runtime_seconds"] = s.runtime_seconds;
  return d;
}

py::dict walras_dict(const WalrasSolution& w) {
  py::dict d;
  d["prices"] = w.prices;
  d["normalized_prices"] = w.normalized_prices;
  d["demands"] = rows(w.demands);
  d["residual"] = w.residual;
  d["rcond"] = w.rcond;
  return d;
}

ExperimentConfig with_overrides(ExperimentConfig c, std::optional<double> eps_p, std::optional<double> eps_delta,
                                std::optional<double> lambda, std::optional<std::uint64_t> max_iters) {
  if (eps_p) c.params.eps_p = *eps_p;
  if (eps_delta) c.params.eps_delta = *eps_delta;
  if (lambda) c.params.lambda = *lambda;
  if (max_iters) c.params.max_iters = *max_iters;
  c.params.validate();
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bilateral trading toward equilibrium in an exchange economy (C++ core).";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const IoError& e) {
      PyErr_SetString(PyExc_OSError, e.what());
    } catch (const ConfigError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const DomainError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const StructuralError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const ContractViolation& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<Utility, std::shared_ptr<Utility>>(m, "Utility")
      .def_property_readonly("dimension", &Utility::dimension)
      .def("value", [](const Utility& u, const std::vector<double>& x) { return u.value(x); })
      .def("partial", [](const Utility& u, const std::vector<double>& x, std::size_t j) { return u.partial(x, j); })
      .def("gradient", [](const Utility& u, const std::vector<double>& x) { return u.gradient(x).values(); })
      .def("admissible", [](const Utility& u, const std::vector<double>& x) { return u.admissible(x); });

  py::class_<CobbDouglas, Utility, std::shared_ptr<CobbDouglas>>(m, "CobbDouglas")
      .def(py::init<std::vector<double>>(), py::arg("beta"))
      .def_property_readonly("beta", &CobbDouglas::beta);

  py::class_<SeparableQuadMoney, Utility, std::shared_ptr<SeparableQuadMoney>>(m, "SeparableQuadMoney")
      .def(py::init<double, std::vector<double>, std::vector<double>, std::vector<double>>(), py::arg("alpha"),
           py::arg("a"), py::arg("b"), py::arg("supply"));

  m.def(
      "price_threshold",
      [](const Utility& u, const std::vector<double>& x, std::size_t j) { return price_threshold(u, x, j); },
      py::arg("utility"), py::arg("x"), py::arg("good"),
      "Marginal rate of substitution of good j for money at holdings x.");
  m.def(
      "seller_quantity",
      [](const Utility& u, const std::vector<double>& x, std::size_t j, double pi) {
        return seller_quantity(u, x, j, pi);
      },
      py::arg("utility"), py::arg("x"), py::arg("good"), py::arg("price"),
      "Utility-maximizing quantity of good j to sell at the given price.");
  m.def(
      "buyer_quantity",
      [](const Utility& u, const std::vector<double>& x, std::size_t j, double pi) {
        return buyer_quantity(u, x, j, pi);
      },
      py::arg("utility"), py::arg("x"), py::arg("good"), py::arg("price"),
      "Utility-maximizing quantity of good j to buy at the given price.");
  m.def(
      "stdev_stop", [](const std::vector<std::vector<double>>& t) { return stdev_stop(to_matrix(t)); },
      py::arg("thresholds"), "Largest per-good population standard deviation of an agents x goods table.");

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_readwrite("name", &ExperimentConfig::name)
      .def_readwrite("runs", &ExperimentConfig::runs)
      .def_readwrite("first_seed", &ExperimentConfig::first_seed)
      .def_readwrite("output_dir", &ExperimentConfig::output_dir)
      .def_property_readonly("agent_count", [](const ExperimentConfig& c) { return c.economy.agents.size(); })
      .def_property_readonly("goods_count",
                             [](const ExperimentConfig& c) { return c.economy.agents.front().holdings.size(); })
      .def_property_readonly("utility", [](const ExperimentConfig& c) { return std::string(to_string(c.economy.family)); })
      .def_property_readonly("holdings", [](const ExperimentConfig& c) { return rows(initial_holdings(c.economy)); })
      .def("seeds", &ExperimentConfig::seeds)
      .def("to_json", [](const ExperimentConfig& c) { return config_to_json(c).dump(2); })
      .def("__eq__", [](const ExperimentConfig& a, const ExperimentConfig& b) { return a == b; })
      .def("__repr__", [](const ExperimentConfig& c) {
        return "<ExperimentConfig " + c.name + ", " + std::to_string(c.economy.agents.size()) + " agents>";
      });

  m.def("load_config", &load_config, py::arg("path"));
  m.def(
      "parse_config", [](const std::string& text) { return parse_config(text); }, py::arg("text"));
  m.def(
      "preset",
      [](const std::string& name, std::int64_t trial) {
        if (name == "example1") return presets::example1();
        if (name == "example2") return presets::example2();
        if (name == "example3") return presets::example3(trial);
        throw ConfigError("unknown preset '" + name + "' (expected example1, example2 or example3)");
      },
      py::arg("name"), py::arg("trial") = 0);

  m.def(
      "run",
      [](const ExperimentConfig& c, std::uint64_t seed, std::optional<double> eps_p, std::optional<double> eps_delta,
         std::optional<double> lambda, std::optional<std::uint64_t> max_iters) {
        const ExperimentConfig cfg = with_overrides(c, eps_p, eps_delta, lambda, max_iters);
        AlgorithmParams params = cfg.params;
        params.seed = seed;
        RunOptions opts;
        opts.trajectory_stride = 0;
        std::optional<RunResult> r;
        {
          py::gil_scoped_release release;
          r.emplace(run(build_economy(cfg.economy), params, opts));
        }
        py::dict d = summary_dict(summarize(seed, r->report));
        d["thresholds"] = rows(r->report.thresholds);
        d["trade_log"] = format_trade_log(r->trades);
        return d;
      },
      py::arg("config"), py::arg("seed") = 1, py::kw_only(), py::arg("eps_p") = py::none(),
      py::arg("eps_delta") = py::none(), py::arg("lambda_") = py::none(), py::arg("max_iters") = py::none(),
      "One engine run; returns the run summary plus final thresholds and the trade log as CSV text.");

  m.def(
      "run_batch",
      [](const ExperimentConfig& c, std::optional<std::vector<std::uint64_t>> seeds,
         std::optional<std::filesystem::path> output_dir, unsigned jobs) {
        const auto s = seeds ? *seeds : c.seeds();
        BatchOptions opts;
        opts.output_dir = output_dir;
        opts.jobs = jobs;
        BatchResult b;
        {
          py::gil_scoped_release release;
          b = run_batch(c, s, opts);
        }
        py::list out;
        for (const auto& r : b.runs) out.append(summary_dict(r));
        return out;
      },
      py::arg("config"), py::arg("seeds") = py::none(), py::arg("output_dir") = py::none(), py::arg("jobs") = 1);

  m.def(
      "solve_walras",
      [](const ExperimentConfig& c) { return walras_dict(solve_walras_cobb_douglas(build_economy(c.economy))); },
      py::arg("config"), "Walras benchmark for a Cobb-Douglas economy.");
  m.def(
      "solve_walras",
      [](const std::vector<std::vector<double>>& betas, const std::vector<std::vector<double>>& holdings) {
        return walras_dict(solve_walras_cobb_douglas(to_matrix(betas), to_matrix(holdings)));
      },
      py::arg("betas"), py::arg("holdings"));

  m.def(
      "verify_state",
      [](const std::filesystem::path& path, double tol) {
        const SavedState s = load_state(path);
        const KktReport k = verify_equilibrium(build_economy(s.economy), s.prices, tol);
        py::dict d;
        d["passes"] = k.passes;
        d["max_residual"] = k.max_residual;
        d["max_threshold_gap"] = k.max_threshold_gap;
        return d;
      },
      py::arg("path"), py::arg("tol"));
}
