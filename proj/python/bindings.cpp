#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cmath>
#include <limits>

#include "roam/choice.hpp"
#include "roam/diagnostics.hpp"
#include "roam/errors.hpp"
#include "roam/estimator.hpp"
#include "roam/harness.hpp"
#include "roam/io.hpp"
#include "roam/linalg.hpp"

namespace py = pybind11;
using namespace roam;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Absent values become NaN so that series map onto float arrays.
py::dict trajectory_dict(const Trajectory& tr) {
  const auto n = static_cast<Eigen::Index>(tr.steps.size());
  Eigen::VectorXd inst(n), cum(n), err(n), ratio(n), rx(n), ry(n);
  Eigen::VectorXi t(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = tr.steps[static_cast<std::size_t>(i)];
    t(i) = s.t;
    inst(i) = s.inst_regret;
    cum(i) = s.cum_regret;
    err(i) = s.est_error.value_or(kNaN);
    ratio(i) = s.critical_ratio.value_or(kNaN);
    rx(i) = s.regret_x;
    ry(i) = s.regret_y.value_or(kNaN);
  }
  py::dict d;
  d["run"] = tr.run_index;
  d["t"] = t;
  d["inst_regret"] = inst;
  d["cum_regret"] = cum;
  d["est_error"] = err;
  d["critical_ratio"] = ratio;
  d["regret_x"] = rx;
  d["regret_y"] = ry;
  d["theta_star"] = tr.theta_star;
  return d;
}

py::dict aggregate_dict(const AggregateStats& stats) {
  py::dict out;
  for (Metric m : kAllMetrics) {
    const auto& series = stats.at(m);
    const auto n = static_cast<Eigen::Index>(series.size());
    Eigen::VectorXd mean(n), sd(n), hw(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& p = series[static_cast<std::size_t>(i)];
      mean(i) = p ? p->mean : kNaN;
      sd(i) = p ? p->std : kNaN;
      hw(i) = p ? p->half_width : kNaN;
    }
    py::dict md;
    md["mean"] = mean;
    md["std"] = sd;
    md["half_width"] = hw;
    out[py::str(std::string(to_string(m)))] = md;
  }
  return out;
}

Dataset make_dataset(const Eigen::MatrixXd& z, const Eigen::VectorXi& o) {
  if (z.rows() != o.size()) throw ConfigError("solve_mle: z has " + std::to_string(z.rows()) +
                                              " rows but o has " + std::to_string(o.size()));
  Dataset data;
  data.reserve(static_cast<std::size_t>(z.rows()));
  for (Eigen::Index i = 0; i < z.rows(); ++i) data.push_back({z.row(i).transpose(), o(i)});
  return data;
}

}  // namespace

PYBIND11_MODULE(_roam, m) {
  m.doc() = "History-constrained contextual duelling bandits: ROAM, CoLSTIM and diagnostics";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("sigmoid", &sigmoid, py::arg("u"));
  m.def("sigmoid_derivative", &sigmoid_derivative, py::arg("u"));
  m.def(
      "win_probability",
      [](const Vec& theta_star, const Vec& x, const Vec& y) {
        return win_probability(UserModel(theta_star), x, y);
      },
      py::arg("theta_star"), py::arg("x"), py::arg("y"));

  m.def("weighted_norm", &weighted_norm, py::arg("z"), py::arg("m"));
  m.def(
      "extreme_eigenvalues",
      [](const SymMatrix& mat) {
        const EigenRange e = extreme_eigenvalues(mat);
        return py::make_tuple(e.lambda_min, e.lambda_max);
      },
      py::arg("m"));

  py::class_<DesignState>(m, "DesignState")
      .def(py::init<SymMatrix, int>(), py::arg("v"), py::arg("refresh_period") = DesignState::kDefaultRefreshPeriod)
      .def("rank_one_update", &DesignState::rank_one_update, py::arg("z"))
      .def("inverse_norm", &DesignState::inverse_norm, py::arg("z"))
      .def_property_readonly("v", &DesignState::v)
      .def_property_readonly("v_inv", &DesignState::v_inv)
      .def_property_readonly("update_count", &DesignState::update_count);

  m.def(
      "solve_mle",
      [](const Eigen::MatrixXd& z, const Eigen::VectorXi& o, double reg_lambda, double tol, int max_iter) {
        MleConfig cfg;
        cfg.reg_lambda = reg_lambda;
        cfg.tol = tol;
        cfg.max_iter = max_iter;
        const MleResult r = solve_mle(make_dataset(z, o), LinkFunction::logistic(), cfg, z.cols());
        py::dict d;
        d["theta"] = r.theta;
        d["residual"] = r.residual;
        d["iterations"] = r.iterations;
        d["regularized_fallback"] = r.regularized_fallback;
        return d;
      },
      py::arg("z"), py::arg("o"), py::arg("reg_lambda") = 0.0, py::arg("tol") = 1e-8,
      py::arg("max_iter") = 100,
      "Logistic MLE over rows of z with binary outcomes o.");

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init([] { return RunConfig::defaults(); }))
      .def_property(
          "d", [](const RunConfig& c) { return c.env.d; }, [](RunConfig& c, int v) { c.env.d = v; })
      .def_property(
          "k", [](const RunConfig& c) { return c.env.k; }, [](RunConfig& c, int v) { c.env.k = v; })
      .def_property(
          "r", [](const RunConfig& c) { return c.env.r; }, [](RunConfig& c, double v) { c.env.r = v; })
      .def_readwrite("T", &RunConfig::T)
      .def_readwrite("tau", &RunConfig::tau)
      .def_readwrite("n_runs", &RunConfig::n_runs)
      .def_readwrite("master_seed", &RunConfig::master_seed)
      .def_readwrite("label", &RunConfig::label)
      .def_property(
          "policy", [](const RunConfig& c) { return std::string(to_string(c.policy)); },
          [](RunConfig& c, const std::string& v) { c.policy = parse_policy_kind(v); })
      .def_property(
          "c1", [](const RunConfig& c) { return c.colstim.c1; },
          [](RunConfig& c, double v) { c.colstim.c1 = v; })
      .def_property(
          "c2", [](const RunConfig& c) { return c.colstim.c2; },
          [](RunConfig& c, double v) { c.colstim.c2 = v; })
      .def_property(
          "reg_lambda", [](const RunConfig& c) { return c.mle.reg_lambda; },
          [](RunConfig& c, double v) { c.mle.reg_lambda = v; })
      .def("validate", &RunConfig::validate)
      .def("to_json", [](const RunConfig& c) { return config_to_json(c).dump(); })
      .def_static("from_json", [](const std::string& text) {
        return config_from_json(nlohmann::json::parse(text));
      });

  m.def("preset", py::overload_cast<std::string_view, std::uint64_t>(&preset), py::arg("name"),
        py::arg("master_seed") = kDefaultMasterSeed);

  m.def(
      "run_single",
      [](const RunConfig& cfg, int run_index) {
        Trajectory tr;
        {
          py::gil_scoped_release release;
          tr = run_single(cfg, run_index);
        }
        return trajectory_dict(tr);
      },
      py::arg("config"), py::arg("run_index") = 0);

  m.def(
      "run_batch",
      [](const RunConfig& cfg, int parallel) {
        BatchResult r;
        {
          py::gil_scoped_release release;
          r = run_batch(cfg, {.parallel = parallel, .order = {}});
        }
        py::list runs;
        for (const auto& tr : r.trajectories) runs.append(trajectory_dict(tr));
        py::dict d;
        d["trajectories"] = runs;
        d["aggregate"] = aggregate_dict(r.aggregate);
        return d;
      },
      py::arg("config"), py::arg("parallel") = 1);

  m.def(
      "export_batch",
      [](const RunConfig& cfg, const std::filesystem::path& dir, const std::string& format, int parallel) {
        const BatchResult r = run_batch(cfg, {.parallel = parallel, .order = {}});
        return export_batch(r, dir, parse_output_format(format), cfg.label);
      },
      py::arg("config"), py::arg("out_dir"), py::arg("format") = "csv", py::arg("parallel") = 1,
      "Runs a batch and writes it in the CLI's file layout; returns the written paths.");

  m.def(
      "read_aggregate_csv", [](const std::filesystem::path& p) { return aggregate_dict(import_aggregate_csv(p)); },
      py::arg("path"));

  m.def(
      "moving_average",
      [](const std::vector<double>& series, int window) { return moving_average(series, window); },
      py::arg("series"), py::arg("window"));

  m.def(
      "critical_ratio",
      [](const Vec& x, const Vec& x_star, const Vec& y, const SymMatrix& v_inv) {
        return critical_ratio(x, x_star, y, v_inv);
      },
      py::arg("x_t"), py::arg("x_star"), py::arg("y_t"), py::arg("v_inv"));

  m.def("compute_kappa_sigmoid", &compute_kappa_sigmoid, py::arg("r"));
  m.def("compute_alpha", &compute_alpha, py::arg("t"), py::arg("d"), py::arg("delta"), py::arg("kappa"));
  m.def("compute_beta", &compute_beta, py::arg("r"), py::arg("lambda_min_sigma"));
  m.def(
      "check_concentration",
      [](int d, int tau, double epsilon, int n_trials, std::uint64_t seed) {
        RandomStream rng(seed);
        return check_concentration(d, tau, epsilon, n_trials, rng);
      },
      py::arg("d"), py::arg("tau"), py::arg("epsilon"), py::arg("n_trials"), py::arg("seed") = 0);
  m.def("check_lambda_min_condition", &check_lambda_min_condition, py::arg("config"), py::arg("n_runs"));

  m.attr("TRAJECTORY_CSV_HEADER") = std::string(kTrajectoryCsvHeader);
  m.attr("AGGREGATE_CSV_HEADER") = std::string(kAggregateCsvHeader);
}
