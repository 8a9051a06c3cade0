// Python bindings for the core estimation pipeline.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "predlab/bounds.hpp"
#include "predlab/data.hpp"
#include "predlab/estimators.hpp"
#include "predlab/synth.hpp"
#include "predlab/trainer.hpp"

namespace py = pybind11;
using namespace predlab;

namespace {

TrainConfig config_from_dict(const py::dict& d) {
  nlohmann::json j;
  for (const auto& item : d) {
    const std::string key = py::cast<std::string>(item.first);
    if (key == "perturb") {
      j[key] = py::cast<bool>(item.second);
    } else if (key == "learning_rate" || key == "dropout_rate" ||
               key == "val_fraction") {
      j[key] = py::cast<double>(item.second);
    } else if (key == "seed") {
      j[key] = py::cast<std::uint64_t>(item.second);
    } else {
      j[key] = py::cast<int>(item.second);
    }
  }
  TrainConfig cfg;
  cfg.merge_json(j);
  return cfg;
}

py::dict report_to_dict(const EstimateReport& rep) {
  py::dict out;
  out["h_knifecp"] = rep.h_knifecp;
  out["h_knifedp"] = rep.h_knifedp;
  out["h_lmcp"] = rep.h_lmcp;
  out["var_knifecp"] = rep.var_knifecp;
  out["var_knifedp"] = rep.var_knifedp;
  out["var_lmcp"] = rep.var_lmcp;
  py::list reps;
  for (const auto& r : rep.per_repetition) {
    py::dict jr;
    jr["seed"] = r.seed;
    if (r.ok()) {
      jr["h_knifecp"] = r.h_knifecp;
      jr["h_knifedp"] = r.h_knifedp;
      jr["h_lmcp"] = r.h_lmcp;
    } else {
      jr["error"] = r.error;
    }
    reps.append(jr);
  }
  out["reps"] = reps;
  out["json"] = rep.to_json().dump();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Conditional-entropy estimation and predictability bounds";

  py::enum_<NoiseKind>(m, "NoiseKind")
      .value("uniform", NoiseKind::kUniform)
      .value("laplacian", NoiseKind::kLaplacian)
      .value("gaussian", NoiseKind::kGaussian);

  py::enum_<SynthTaskKind>(m, "SynthTask")
      .value("linearity", SynthTaskKind::kLinearity)
      .value("nonlinearity", SynthTaskKind::kNonlinearity)
      .value("interaction", SynthTaskKind::kInteraction)
      .value("multivariate", SynthTaskKind::kMultivariate);

  m.def("noise_entropy", &noise_entropy, py::arg("kind"), py::arg("param"),
        "Differential entropy of the noise family");
  m.def("noise_param_for_mse", &noise_param_for_mse, py::arg("kind"),
        py::arg("target_mse"));
  m.def("mse_lower_bound", &mse_lower_bound, py::arg("h"), py::arg("kind"));
  m.def("mae_lower_bound", &mae_lower_bound, py::arg("h"), py::arg("kind"));
  m.def(
      "r2_indicator",
      [](double h, double var_y, const std::string& mode) {
        return r2_indicator(h, var_y, r2_mode_from_name(mode));
      },
      py::arg("h"), py::arg("var_y"), py::arg("mode") = "paper");

  m.def(
      "gen_dataset",
      [](const std::string& task, const std::string& noise, double target_mse,
         int n, std::uint64_t seed) {
        auto [ds, gt] = gen_dataset(synth_task_from_name(task),
                                    noise_kind_from_name(noise), target_mse, n,
                                    seed);
        py::dict truth;
        truth["noise_param"] = gt.noise_param;
        truth["h_cond_true"] = gt.h_cond_true;
        truth["mse_true"] = gt.mse_true;
        truth["mae_true"] = gt.mae_true;
        return py::make_tuple(ds.X, ds.y, truth);
      },
      py::arg("task"), py::arg("noise"), py::arg("target_mse"), py::arg("n"),
      py::arg("seed"));

  m.def(
      "estimate",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
         const py::dict& config) {
        return report_to_dict(run_algorithm1(X, y, config_from_dict(config)));
      },
      py::arg("X"), py::arg("y"), py::arg("config") = py::dict(),
      "Run the full estimation pipeline; returns headline entropies, "
      "per-repetition values and the serialized report");

  m.def(
      "load_table",
      [](const std::string& path, const std::string& target) {
        const LabeledDataset ds = load_table(path, target);
        return py::make_tuple(ds.X, ds.y, ds.feature_names, ds.dropped_rows);
      },
      py::arg("path"), py::arg("target"));

  m.def(
      "pca_reduce_ev",
      [](const Eigen::MatrixXd& X, double ev_threshold) {
        return pca_reduce_ev(pca_fit(X), X, ev_threshold);
      },
      py::arg("X"), py::arg("ev_threshold"),
      "Fit PCA and keep the fewest components reaching the explained-variance "
      "threshold");

  m.attr("__version__") = PREDLAB_VERSION;
}
