// Python bindings: configs, the finite-difference solver, PINN training and
// evaluation, and the process metrics, mirroring the C++ interfaces.
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "curepinn/config.hpp"
#include "curepinn/errors.hpp"
#include "curepinn/oracle.hpp"
#include "curepinn/pinn.hpp"
#include "curepinn/surrogate.hpp"

namespace py = pybind11;
using namespace curepinn;

namespace {

TrainSchedule schedule_from_kwargs(int iterations, int epochs, int batch,
                                   double lr0, int nx, int nt,
                                   bool adaptive_weights,
                                   double early_stop_loss,
                                   const std::string& phases) {
  TrainSchedule s;
  s.iterations = iterations;
  s.epochs_per_net = epochs;
  s.batch = batch;
  s.lr0 = lr0;
  s.colloc.nx = nx;
  s.colloc.nt = nt;
  s.adaptive_weights = adaptive_weights;
  s.early_stop_total = early_stop_loss;
  if (phases == "both")
    s.phases = PhaseSelect::Both;
  else if (phases == "alpha")
    s.phases = PhaseSelect::AlphaOnly;
  else if (phases == "T")
    s.phases = PhaseSelect::TOnly;
  else
    throw ConfigError("phases must be 'both', 'alpha', or 'T'");
  return s;
}

py::list history_to_list(const TrainResult& r) {
  py::list rows;
  for (const HistoryRow& h : r.history) {
    py::dict d;
    d["epoch"] = h.epoch;
    d["phase"] = std::string(1, h.phase);
    d["lr"] = h.lr;
    d["L_alpha"] = h.losses.L_alpha;
    d["L_T"] = h.losses.L_T;
    d["L_alpha0"] = h.losses.L_alpha0;
    d["L_T0"] = h.losses.L_T0;
    d["L_bc1"] = h.losses.L_bc1;
    d["L_bc2"] = h.losses.L_bc2;
    d["L_tau"] = h.losses.L_tau;
    d["L_q"] = h.losses.L_q;
    d["total"] = weighted_total(h.losses, h.weights);
    rows.append(d);
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Coupled exothermic heat-conduction / resin-cure PINN toolkit";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericsError>(m, "NumericsError",
                                        PyExc_ArithmeticError);
  py::register_exception<ArtifactError>(m, "ArtifactError", PyExc_IOError);

  py::class_<ProblemConfig>(m, "Config")
      .def_static("preset", &preset_config, py::arg("name"))
      .def_static("parse", &parse_config_text, py::arg("text"))
      .def_static("load", &load_config_file, py::arg("path"))
      .def("dump", &dump_config)
      .def_property_readonly("hash", &config_hash)
      .def_property_readonly("length", &ProblemConfig::length)
      .def_property_readonly("x_interface", &ProblemConfig::x_interface)
      .def_readonly("T_init", &ProblemConfig::T_init)
      .def_readonly("alpha0", &ProblemConfig::alpha0)
      .def_property_readonly(
          "t_end", [](const ProblemConfig& c) { return c.cycle.t_e; })
      .def_property_readonly("convective", [](const ProblemConfig& c) {
        return c.bc.kind == BcKind::Convective;
      });

  m.def("preset_names", &preset_names);
  m.def(
      "cure_rate",
      [](double alpha, double T, const ProblemConfig& cfg) {
        return cure_rate(alpha, T, cfg.kinetics);
      },
      py::arg("alpha"), py::arg("T"), py::arg("config"));
  m.def(
      "air_temperature",
      [](double t, const ProblemConfig& cfg) {
        return air_temperature(t, cfg.cycle);
      },
      py::arg("t"), py::arg("config"));

  py::class_<FieldGrid>(m, "Fields")
      .def_property_readonly("x",
                             [](const FieldGrid& f) { return f.x; })
      .def_property_readonly("t",
                             [](const FieldGrid& f) { return f.t; })
      .def_readonly("interface_node", &FieldGrid::interface_node)
      .def_property_readonly("T", [](const FieldGrid& f) { return f.T; })
      .def_property_readonly("alpha",
                             [](const FieldGrid& f) { return f.alpha; });

  m.def(
      "solve_fd",
      [](const ProblemConfig& cfg, int cells_tool, int cells_comp,
         int time_steps) {
        GridSpec g;
        g.cells_tool = cells_tool;
        g.cells_comp = cells_comp;
        g.time_steps = time_steps;
        return solve_fd(cfg, g);
      },
      py::arg("config"), py::arg("cells_tool") = 32, py::arg("cells_comp") = 32,
      py::arg("time_steps") = 4000);

  m.def(
      "isothermal_cure",
      [](double T, double t_end, const ProblemConfig& cfg, int samples) {
        const CureTable table =
            isothermal_cure(T, cfg.alpha0, t_end, cfg.kinetics, samples);
        return py::make_tuple(table.t, table.alpha);
      },
      py::arg("T"), py::arg("t_end"), py::arg("config"),
      py::arg("samples") = 2001);

  py::class_<PinnModel>(m, "Model")
      .def_property_readonly(
          "has_zeta", [](const PinnModel& m_) { return m_.norm.has_zeta; })
      .def_property_readonly("config",
                             [](const PinnModel& m_) { return m_.config; })
      .def(
          "eval",
          [](const PinnModel& m_, double x, double t,
             std::optional<double> zeta) {
            const ComposedPoint c = compose_fields(m_, x, t, zeta);
            return py::make_tuple(
                c.T.value, c.has_alpha ? py::cast(c.alpha.value)
                                       : py::object(py::none()));
          },
          py::arg("x"), py::arg("t"), py::arg("zeta") = py::none())
      .def("residual_T", &residual_temperature, py::arg("x"), py::arg("t"),
           py::arg("zeta") = py::none())
      .def("residual_alpha", &residual_alpha, py::arg("x"), py::arg("t"),
           py::arg("zeta") = py::none())
      .def(
          "save",
          [](const PinnModel& m_, const std::string& dir,
             const std::string& stem) { save_pinn(m_, dir, stem); },
          py::arg("dir"), py::arg("stem") = "model");

  m.def(
      "init_model",
      [](const ProblemConfig& cfg, std::uint64_t seed,
         std::optional<std::pair<double, double>> zeta) {
        std::optional<ZetaRange> range;
        if (zeta) range = ZetaRange{zeta->first, zeta->second};
        return init_pinn(cfg, seed, range);
      },
      py::arg("config"), py::arg("seed") = 0, py::arg("zeta") = py::none());

  m.def("load_model", &load_pinn, py::arg("dir"), py::arg("stem"),
        py::arg("config"));

  m.def(
      "train",
      [](const ProblemConfig& cfg, std::uint64_t seed, int iterations,
         int epochs, int batch, double lr0, int nx, int nt,
         bool adaptive_weights, double early_stop_loss,
         const std::string& phases) {
        TrainResult result;
        PinnModel model = train_sequential(
            cfg,
            schedule_from_kwargs(iterations, epochs, batch, lr0, nx, nt,
                                 adaptive_weights, early_stop_loss, phases),
            seed, &result);
        py::dict info;
        info["history"] = history_to_list(result);
        info["stopped_early"] = result.stopped_early;
        return py::make_tuple(std::move(model), std::move(info));
      },
      py::arg("config"), py::arg("seed") = 0, py::arg("iterations") = 10,
      py::arg("epochs") = 30, py::arg("batch") = 512, py::arg("lr0") = 1e-3,
      py::arg("nx") = 500, py::arg("nt") = 1000,
      py::arg("adaptive_weights") = true, py::arg("early_stop_loss") = 0.0,
      py::arg("phases") = "both");

  m.def(
      "eval_surrogate",
      [](const PinnModel& m_, double x, double t, double zeta) {
        const SurrogateEval e = eval_surrogate(m_, x, t, zeta);
        return py::make_tuple(e.T, e.alpha, e.extrapolated);
      },
      py::arg("model"), py::arg("x"), py::arg("t"), py::arg("zeta"));

  m.def(
      "thermal_lag",
      [](const FieldGrid& f, const ProblemConfig& cfg) {
        const ThermalLag lag = thermal_lag(f, cfg);
        return py::make_tuple(lag.lag_K, lag.t_at_max);
      },
      py::arg("fields"), py::arg("config"));

  m.def(
      "exotherm",
      [](const FieldGrid& f) {
        const Exotherm e = exotherm(f);
        return py::make_tuple(e.T_max, e.x_at, e.t_at);
      },
      py::arg("fields"));
}
