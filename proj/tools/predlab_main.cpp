// predlab: conditional-entropy estimation and predictability bounds for
// tabular regression data.
//
// Subcommands:
//   estimate     paired entropy estimates + error bounds for one dataset
//   analyze      the same per PCA explained-variance level
//   synth-bench  estimator benchmark over synthetic task grids
//   synth        write one synthetic dataset with known ground truth

#include <cstdio>
#include <exception>
#include <fstream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "predlab/bounds.hpp"
#include "predlab/data.hpp"
#include "predlab/estimators.hpp"
#include "predlab/report.hpp"
#include "predlab/synth.hpp"

namespace {

using nlohmann::json;
using namespace predlab;

struct CommonOpts {
  std::string target = "y";
  std::string config_path;
  std::string out = "report.json";
  std::string r2_mode = "paper";
  std::uint64_t seed = 0;
  int repetitions = 0;
  int kernels = 0;
  int hidden_dim = 0;
  int layers = 0;
  double dropout = 0.0;
  int epochs = 0;
  int patience = 0;
  int batch = 0;
  double lr = 0.0;
  double val_fraction = 0.0;
  bool no_perturb = false;
  std::vector<double> ev;
};

void add_common_flags(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--target", o.target, "Target column name");
  sub->add_option("--seed", o.seed, "Base random seed");
  sub->add_option("--config", o.config_path, "JSON config file");
  sub->add_option("--out", o.out, "Report output path");
  sub->add_option("--repetitions", o.repetitions, "Training repetitions");
  sub->add_option("--kernels", o.kernels, "Mixture kernel count");
  sub->add_option("--hidden-dim", o.hidden_dim, "Hidden layer width");
  sub->add_option("--layers", o.layers, "Hidden layer count");
  sub->add_option("--dropout", o.dropout, "Dropout rate");
  sub->add_option("--epochs", o.epochs, "Max training epochs");
  sub->add_option("--patience", o.patience, "Early-stopping patience");
  sub->add_option("--batch", o.batch, "Mini-batch size");
  sub->add_option("--lr", o.lr, "Learning rate");
  sub->add_option("--val-fraction", o.val_fraction, "Validation fraction");
  sub->add_flag("--no-perturb", o.no_perturb, "Disable batch perturbation");
  sub->add_option("--r2-mode", o.r2_mode, "R^2 coefficient mode")
      ->check(CLI::IsMember({"paper", "gaussian"}));
  sub->add_option("--ev", o.ev, "Explained-variance threshold (repeatable)");
}

// Precedence: built-in defaults < config file < CLI flags.
TrainConfig resolve_config(const CLI::App* sub, const CommonOpts& o) {
  TrainConfig cfg;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw std::runtime_error("cannot open config: " + o.config_path);
    cfg.merge_json(json::parse(in));
  }
  if (sub->count("--seed")) cfg.seed = o.seed;
  if (sub->count("--repetitions")) cfg.repetitions = o.repetitions;
  if (sub->count("--kernels")) cfg.kernel_count = o.kernels;
  if (sub->count("--hidden-dim")) cfg.hidden_dim = o.hidden_dim;
  if (sub->count("--layers")) cfg.layer_count = o.layers;
  if (sub->count("--dropout")) cfg.dropout_rate = o.dropout;
  if (sub->count("--epochs")) cfg.epochs = o.epochs;
  if (sub->count("--patience")) cfg.patience = o.patience;
  if (sub->count("--batch")) cfg.batch_size = o.batch;
  if (sub->count("--lr")) cfg.learning_rate = o.lr;
  if (sub->count("--val-fraction")) cfg.val_fraction = o.val_fraction;
  if (o.no_perturb) cfg.perturb = false;
  cfg.validate();
  return cfg;
}

RunManifest make_manifest(const std::string& command, const TrainConfig& cfg,
                          const std::string& input_digest) {
  RunManifest m;
  m.command = command;
  m.config = cfg;
  m.seed = cfg.seed;
  m.input_digest = input_digest;
  m.created_at = utc_timestamp_now();
  return m;
}

double sample_variance(const Eigen::VectorXd& y) {
  const double mean = y.mean();
  return (y.array() - mean).square().sum() /
         static_cast<double>(y.size() - 1);
}

json traces_summary(const EstimateReport& rep) {
  json out = json::array();
  for (const auto& r : rep.per_repetition) {
    if (!r.ok()) {
      out.push_back({{"seed", r.seed}, {"error", r.error}});
      continue;
    }
    out.push_back({{"seed", r.seed},
                   {"epochs_run_cond", r.epochs_run_cond},
                   {"epochs_run_marg", r.epochs_run_marg},
                   {"best_epoch_cond", r.best_epoch_cond},
                   {"best_epoch_marg", r.best_epoch_marg},
                   {"best_val_cond", r.best_val_cond},
                   {"best_val_marg", r.best_val_marg}});
  }
  return out;
}

void print_estimate_table(const EstimateReport& rep,
                          const IndicatorReport& ind) {
  std::printf("\n%-12s %12s %12s\n", "estimator", "H (nats)", "R^2");
  std::printf("%-12s %12.4f %12.4f\n", "knifecp", rep.h_knifecp, ind.r2_knifecp);
  std::printf("%-12s %12.4f %12.4f\n", "knifedp", rep.h_knifedp, ind.r2_knifedp);
  std::printf("%-12s %12.4f %12.4f\n", "lmcp", rep.h_lmcp, ind.r2_lmcp);
  std::printf("mse_bound_gaussian=%.4f  mae_bound_laplacian=%.4f  ordering_ok=%s\n",
              ind.mse_bound_gaussian, ind.mae_bound_laplacian,
              ind.ordering_ok ? "yes" : "no");
}

int cmd_estimate(const CLI::App* sub, const CommonOpts& o,
                 const std::string& dataset_path) {
  const TrainConfig cfg = resolve_config(sub, o);
  const LabeledDataset ds = load_table(dataset_path, o.target);
  const RunManifest manifest =
      make_manifest("estimate " + dataset_path, cfg, file_digest(dataset_path));

  const EstimateReport rep = run_algorithm1(ds.X, ds.y, cfg);
  const IndicatorReport ind =
      indicator_report(rep, sample_variance(ds.y), r2_mode_from_name(o.r2_mode));

  json report = {{"manifest", manifest.to_json()},
                 {"entropies", rep.to_json()},
                 {"indicators", ind.to_json()},
                 {"traces", traces_summary(rep)},
                 {"dataset", {{"rows", ds.size()},
                              {"features", ds.dim()},
                              {"dropped_rows", ds.dropped_rows},
                              {"target", ds.target_name}}}};
  write_report(report, o.out);
  print_estimate_table(rep, ind);
  std::printf("report written to %s\n", o.out.c_str());
  return 0;
}

int cmd_analyze(const CLI::App* sub, const CommonOpts& o,
                const std::string& dataset_path, bool no_standardize) {
  const TrainConfig cfg = resolve_config(sub, o);
  const LabeledDataset ds = load_table(dataset_path, o.target);
  std::vector<double> thresholds = o.ev.empty() ? std::vector<double>{1.0} : o.ev;
  for (double t : thresholds) {
    if (t <= 0.0 || t > 1.0) {
      throw std::invalid_argument("ev threshold must be in (0, 1]");
    }
  }
  const RunManifest manifest =
      make_manifest("analyze " + dataset_path, cfg, file_digest(dataset_path));
  const R2Mode mode = r2_mode_from_name(o.r2_mode);

  // Features are standardized before PCA unless disabled.
  Eigen::MatrixXd feats = ds.X;
  if (!no_standardize) feats = zscore_apply(zscore_fit(feats), feats);
  const PcaModel pca = pca_fit(feats);
  const double var_y = sample_variance(ds.y);

  json rows = json::array();
  std::printf("\n%-8s %4s %12s %12s %12s\n", "EV", "k", "R2_knifecp",
              "R2_knifedp", "R2_lmcp");
  for (const double t : thresholds) {
    const int k = pca_components_for_ev(pca, t);
    const Eigen::MatrixXd reduced = pca_reduce(pca, feats, k);
    const EstimateReport rep = run_algorithm1(reduced, ds.y, cfg);
    const IndicatorReport ind = indicator_report(rep, var_y, mode);
    rows.push_back({{"ev", t},
                    {"components", k},
                    {"entropies", rep.to_json()},
                    {"indicators", ind.to_json()}});
    std::printf("%-8.3f %4d %12.4f %12.4f %12.4f\n", t, k, ind.r2_knifecp,
                ind.r2_knifedp, ind.r2_lmcp);
  }

  json report = {{"manifest", manifest.to_json()},
                 {"standardized", !no_standardize},
                 {"ev_ratios", std::vector<double>(pca.ev_ratios.begin(),
                                                   pca.ev_ratios.end())},
                 {"rows", rows}};
  write_report(report, o.out);
  std::printf("report written to %s\n", o.out.c_str());
  return 0;
}

int cmd_synth_bench(const CLI::App* sub, const CommonOpts& o,
                    std::vector<std::string> tasks,
                    std::vector<std::string> noises, std::vector<double> mses,
                    int n, bool gauss_baseline) {
  const TrainConfig cfg = resolve_config(sub, o);
  if (tasks.empty() || noises.empty() || mses.empty()) {
    throw std::invalid_argument("task, noise and mse grids must be nonempty");
  }
  std::sort(tasks.begin(), tasks.end());
  std::sort(noises.begin(), noises.end());
  std::sort(mses.begin(), mses.end());

  const std::string params = "synthetic n=" + std::to_string(n);
  const RunManifest manifest = make_manifest("synth-bench", cfg, params);

  json cells = json::array();
  json tidy = json::array();
  std::uint64_t cell_index = 0;
  std::printf("\n%-14s %-10s %8s %12s %12s %12s\n", "task", "noise",
              "true_mse", "mse_knifecp", "mse_lmcp", "mse_gauss");
  for (const auto& task_name : tasks) {
    for (const auto& noise_name : noises) {
      for (const double mse : mses) {
        const std::uint64_t cell_seed = cfg.seed + 1000003ULL * cell_index;
        ++cell_index;
        json cell = {{"task", task_name},
                     {"noise", noise_name},
                     {"mse", mse},
                     {"seed", cell_seed}};
        try {
          const SynthTaskKind task = synth_task_from_name(task_name);
          const NoiseKind noise = noise_kind_from_name(noise_name);
          auto [ds, gt] = gen_dataset(task, noise, mse, n, cell_seed);
          TrainConfig cell_cfg = cfg;
          cell_cfg.seed = cell_seed;
          const EstimateReport rep = run_algorithm1(ds.X, ds.y, cell_cfg);

          const double mse_cp = mse_lower_bound(rep.h_knifecp, noise);
          const double mse_lmc = mse_lower_bound(rep.h_lmcp, noise);
          cell["ground_truth"] = gt.to_json();
          cell["entropies"] = rep.to_json();
          cell["mse_knifecp"] = mse_cp;
          cell["mse_lmcp"] = mse_lmc;
          cell["mae_knifecp"] = mae_lower_bound(rep.h_knifecp, noise);
          cell["mae_lmcp"] = mae_lower_bound(rep.h_lmcp, noise);
          tidy.push_back({{"estimator", "knifecp"}, {"task", task_name},
                          {"noise", noise_name}, {"mse", mse}, {"value", mse_cp}});
          tidy.push_back({{"estimator", "lmcp"}, {"task", task_name},
                          {"noise", noise_name}, {"mse", mse}, {"value", mse_lmc}});

          double mse_gauss = std::numeric_limits<double>::quiet_NaN();
          if (gauss_baseline) {
            const Normalizer norm = zscore_fit(ds.X);
            Rng rng(cell_seed);
            const auto [h_gc, h_gm] =
                gauss_doe_entropy(zscore_apply(norm, ds.X), ds.y, cell_cfg, rng);
            mse_gauss = mse_lower_bound(h_gc, noise);
            cell["h_gauss_cond"] = h_gc;
            cell["h_gauss_marg"] = h_gm;
            cell["mse_gauss"] = mse_gauss;
            tidy.push_back({{"estimator", "gauss"}, {"task", task_name},
                            {"noise", noise_name}, {"mse", mse},
                            {"value", mse_gauss}});
          }
          std::printf("%-14s %-10s %8.0f %12.2f %12.2f %12.2f\n",
                      task_name.c_str(), noise_name.c_str(), mse, mse_cp,
                      mse_lmc, mse_gauss);
        } catch (const std::exception& e) {
          cell["error"] = e.what();
          std::printf("%-14s %-10s %8.0f FAILED: %s\n", task_name.c_str(),
                      noise_name.c_str(), mse, e.what());
        }
        cells.push_back(cell);
      }
    }
  }
  json report = {{"manifest", manifest.to_json()},
                 {"samples_per_cell", n},
                 {"cells", cells},
                 {"tidy", tidy}};
  write_report(report, o.out);
  std::printf("report written to %s\n", o.out.c_str());
  return 0;
}

int cmd_synth(const CLI::App* sub, const CommonOpts& o,
              const std::string& task_name, const std::string& noise_name,
              double mse, int n) {
  const TrainConfig cfg = resolve_config(sub, o);
  const SynthTaskKind task = synth_task_from_name(task_name);
  const NoiseKind noise = noise_kind_from_name(noise_name);
  auto [ds, gt] = gen_dataset(task, noise, mse, n, cfg.seed);
  save_table(ds, o.out);

  const RunManifest manifest =
      make_manifest("synth " + task_name, cfg, file_digest(o.out));
  json sidecar = {{"manifest", manifest.to_json()},
                  {"ground_truth", gt.to_json()},
                  {"samples", n}};
  write_report(sidecar, o.out + ".truth.json");
  std::printf("dataset written to %s (ground truth in %s.truth.json)\n",
              o.out.c_str(), o.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional-entropy estimation and predictability bounds"};
  app.require_subcommand(1);

  CommonOpts est_o, ana_o, bench_o, synth_o;
  std::string est_path, ana_path;
  bool no_standardize = false;
  std::vector<std::string> tasks = {"linearity", "nonlinearity", "interaction",
                                    "multivariate"};
  std::vector<std::string> noises = {"uniform", "laplacian", "gaussian"};
  std::vector<double> mses = {10.0, 250.0, 500.0, 750.0, 1000.0};
  int bench_n = 3000;
  bool gauss_baseline = false;
  std::string synth_task = "linearity", synth_noise = "gaussian";
  double synth_mse = 500.0;
  int synth_n = 3000;

  CLI::App* est = app.add_subcommand(
      "estimate", "Estimate H(Y|X) bounds and indicators for a dataset");
  est->add_option("dataset", est_path, "CSV dataset path")->required();
  add_common_flags(est, est_o);

  CLI::App* ana = app.add_subcommand(
      "analyze", "Indicators per PCA explained-variance level");
  ana->add_option("dataset", ana_path, "CSV dataset path")->required();
  add_common_flags(ana, ana_o);
  ana->add_flag("--no-standardize", no_standardize,
                "Skip z-scoring before PCA");

  CLI::App* bench = app.add_subcommand(
      "synth-bench", "Benchmark estimators over synthetic task grids");
  add_common_flags(bench, bench_o);
  bench->add_option("--tasks", tasks, "Task names");
  bench->add_option("--noises", noises, "Noise family names");
  bench->add_option("--mse", mses, "Target MSE grid");
  bench->add_option("-n,--samples", bench_n, "Samples per cell");
  bench->add_flag("--gauss-baseline", gauss_baseline,
                  "Also run the single-Gaussian baseline");

  CLI::App* syn = app.add_subcommand(
      "synth", "Generate a synthetic dataset with known ground truth");
  add_common_flags(syn, synth_o);
  syn->add_option("--task", synth_task, "Task name");
  syn->add_option("--noise", synth_noise, "Noise family");
  syn->add_option("--mse", synth_mse, "Target MSE");
  syn->add_option("-n,--samples", synth_n, "Sample count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (est->parsed()) return cmd_estimate(est, est_o, est_path);
    if (ana->parsed()) return cmd_analyze(ana, ana_o, ana_path, no_standardize);
    if (bench->parsed()) {
      return cmd_synth_bench(bench, bench_o, tasks, noises, mses, bench_n,
                             gauss_baseline);
    }
    if (syn->parsed()) {
      return cmd_synth(syn, synth_o, synth_task, synth_noise, synth_mse,
                       synth_n);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
