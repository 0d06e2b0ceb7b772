#include <CLI11.hpp>
#include <iostream>

#include "experiment.hpp"
#include "nsgp/errors.hpp"

namespace {

using nsgp::cli::Options;

void add_dataset_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--dataset", opt.dataset,
                  "synth | synth-linear | synth-trig | synth-vartrig | path to CSV");
  cmd->add_option("--n-points", opt.n_points, "synthetic sample size");
  cmd->add_option("--noise", opt.noise_variance, "synthetic noise variance");
  cmd->add_option("--dim", opt.csv_input_columns,
                  "number of input columns in a CSV dataset");
  cmd->add_option("--test-fraction", opt.test_fraction,
                  "held-out fraction for CSV datasets");
}

void add_fit_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--optimizer", opt.optimizer, "de | mcmc")
      ->check(CLI::IsMember({"de", "mcmc"}));
  cmd->add_option("--iterations", opt.iterations,
                  "DE generations or MCMC chain length (0 = defaults)");
  cmd->add_option("--nugget", opt.fixed_nugget,
                  "pin the observation-noise variance to this value");
  cmd->add_option("--train-nugget", opt.train_nugget,
                  "train the nugget as a hyperparameter (overrides the default)");
  cmd->add_option("--threads", opt.threads, "worker threads (0 = all cores)");
}

void add_common_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--seed", opt.seed, "RNG seed; every run is reproducible");
  cmd->add_option("--out", opt.out_dir, "output directory (default $NSGP_OUT or .)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Gaussian-process regression with stationary, parametric non-stationary, "
      "deep, and hybrid kernels"};
  app.set_config("--config", "",
                 "TOML config file, given before the subcommand; keys live in a "
                 "[subcommand] section and explicit flags win")
      ->check(CLI::ExistingFile);
  app.require_subcommand(1);

  Options opt;

  CLI::App* fit = app.add_subcommand(
      "fit", "train one kernel; writes model.json, trace.csv, report.json");
  fit->add_option("--kernel", opt.kernels,
                  "stationary|matern32|exponential|rbf|parametric|deep|hybrid")
      ->required();
  add_dataset_flags(fit, opt);
  add_fit_flags(fit, opt);
  add_common_flags(fit, opt);

  CLI::App* predict = app.add_subcommand(
      "predict", "posterior mean/variance at grid or CSV queries, original units");
  predict->add_option("--model", opt.model_path, "model.json from fit")->required();
  predict->add_option("--grid", opt.grid,
                      "per-axis start:stop:count or a fixed value, comma separated");
  predict->add_option("--queries", opt.queries_csv, "CSV of query points");
  add_common_flags(predict, opt);

  CLI::App* compare = app.add_subcommand(
      "compare", "fit several kernels on identical data; writes comparison tables");
  compare->add_option("--kernel", opt.kernels, "two or more kernel names")->required();
  add_dataset_flags(compare, opt);
  add_fit_flags(compare, opt);
  add_common_flags(compare, opt);

  CLI::App* measure = app.add_subcommand(
      "measure", "non-stationarity diagnostic; writes measure.json and scatter CSV");
  add_dataset_flags(measure, opt);
  measure->add_option("--m-iterations", opt.m_iterations, "diagnostic repetitions");
  measure->add_option("--subset-size", opt.subset_size, "points per local subset");
  measure->add_option("--mcmc-iterations", opt.measure_mcmc_iterations,
                      "chain length of each local fit");
  measure->add_option("--threads", opt.threads, "worker threads (0 = all cores)");
  add_common_flags(measure, opt);

  CLI::App* synth = app.add_subcommand("synth", "write a synthetic dataset as CSV");
  add_dataset_flags(synth, opt);
  add_common_flags(synth, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return nsgp::cli::kExitUsage;
  }

  try {
    if (fit->parsed()) return nsgp::cli::cmd_fit(opt);
    if (predict->parsed()) return nsgp::cli::cmd_predict(opt);
    if (compare->parsed()) return nsgp::cli::cmd_compare(opt);
    if (measure->parsed()) return nsgp::cli::cmd_measure(opt);
    if (synth->parsed()) return nsgp::cli::cmd_synth(opt);
  } catch (const nsgp::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return nsgp::cli::kExitData;
  } catch (const nsgp::NotPositiveDefiniteError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return nsgp::cli::kExitNumerical;
  } catch (const nsgp::DimensionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return nsgp::cli::kExitData;
  } catch (const nsgp::Error& e) {
    // unknown kernel names and other configuration mistakes
    std::cerr << "error: " << e.what() << '\n';
    return nsgp::cli::kExitUsage;
  }
  return nsgp::cli::kExitUsage;
}
