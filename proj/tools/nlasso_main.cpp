// nlasso command line: simulate synthetic benchmark data, fit a single model,
// or run a full repeated-validation experiment.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "nlasso/classic_lasso.hpp"
#include "nlasso/datagen.hpp"
#include "nlasso/harness.hpp"
#include "nlasso/model_core.hpp"
#include "nlasso/model_io.hpp"
#include "nlasso/rng.hpp"
#include "nlasso/training.hpp"

namespace {

struct SimulateArgs {
  nlasso::SyntheticConfig cfg;
  std::string out;
  std::string out_test;
};

struct FitArgs {
  std::string data;
  std::string target = "y";
  std::string task = "linear";
  std::string method = "statistical";
  int k = 5;
  int grid_count = 100;
  double grid_ratio = 1e-3;
  nlasso::TrainConfig train;
  std::uint64_t seed = 0;
  std::string model_out;
};

struct ExperimentArgs {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string format = "csv";
};

int run_simulate(const SimulateArgs& args) {
  auto [train, test] = nlasso::simulate(args.cfg);
  nlasso::save_csv(train, args.out);
  if (!args.out_test.empty()) nlasso::save_csv(test, args.out_test);
  std::cerr << "wrote " << train.n() << " training rows to " << args.out;
  if (!args.out_test.empty())
    std::cerr << " and " << test.n() << " test rows to " << args.out_test;
  std::cerr << "\n";
  return 0;
}

int run_fit(const FitArgs& args) {
  const nlasso::Task task = nlasso::task_from_string(args.task);
  const nlasso::Method method = nlasso::method_from_string(args.method);
  const nlasso::LabeledDataset ds = nlasso::load_csv(args.data, args.target, task);

  auto [std_ds, params] = nlasso::standardize(ds, task);
  const nlasso::LambdaGrid grid =
      nlasso::lambda_grid(std_ds, task, args.grid_count, args.grid_ratio);

  nlasso::TrainConfig tcfg = args.train;
  tcfg.seed = nlasso::mix_seed(args.seed, 0x73706c69);
  const std::uint64_t fold_seed = nlasso::mix_seed(args.seed, 0x666f6c64);

  nlasso::FittedModel model;
  switch (method) {
    case nlasso::Method::statistical:
      model = nlasso::cv_statistical_lasso(ds, task, args.k, grid, fold_seed);
      break;
    case nlasso::Method::standard_neural:
      model = nlasso::fit_standard(ds, task, grid, tcfg);
      break;
    case nlasso::Method::restricted_neural:
      model = nlasso::fit_restricted(ds, task, grid, args.k, tcfg, fold_seed);
      break;
    case nlasso::Method::voting_neural:
      model = nlasso::fit_voting(ds, task, grid, args.k, tcfg, fold_seed);
      break;
  }

  if (args.model_out.empty()) {
    nlasso::emit_model(model, ds.col_names, std::cout);
  } else {
    nlasso::emit_model(model, ds.col_names, args.model_out);
    std::cerr << "method=" << nlasso::to_string(model.method)
              << " lambda=" << model.lambda << " selected=" << model.selected_count()
              << "/" << model.p() << " -> " << args.model_out << "\n";
  }
  return 0;
}

int run_experiment_cmd(const ExperimentArgs& args) {
  nlasso::ExperimentConfig cfg;
  if (!args.config_path.empty()) cfg = nlasso::ExperimentConfig::from_file(args.config_path);
  cfg.apply(args.pairs);  // inline flags override file entries

  const nlasso::ReportTable table = nlasso::run_experiment(cfg);
  const nlasso::ReportFormat format =
      args.format == "markdown" ? nlasso::ReportFormat::markdown : nlasso::ReportFormat::csv;

  if (cfg.output_path.empty()) {
    nlasso::write_report(table, std::cout, format);
  } else {
    nlasso::write_report(table, cfg.output_path, format);
    std::cerr << "report -> " << cfg.output_path << "\n";
  }
  if (!table.failure_log.empty()) {
    if (!cfg.output_path.empty()) {
      std::ofstream flog(cfg.output_path + ".failures");
      for (const auto& line : table.failure_log) flog << line << "\n";
      std::cerr << table.failure_log.size() << " failures -> " << cfg.output_path
                << ".failures\n";
    } else {
      for (const auto& line : table.failure_log) std::cerr << "failure: " << line << "\n";
    }
  }
  std::cerr << "wall: " << table.wall_seconds << " s\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse linear/logistic regression via coordinate descent and "
               "gradient-trained networks"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic benchmark dataset");
  simulate->add_option("--p", sim.cfg.p, "number of predictors");
  simulate->add_option("--n-train", sim.cfg.n_train, "training rows");
  simulate->add_option("--n-test", sim.cfg.n_test, "test rows");
  simulate->add_option("--rho", sim.cfg.rho, "AR(1) correlation");
  simulate->add_option("--noise-std", sim.cfg.noise_std, "noise standard deviation");
  simulate->add_option("--seed", sim.cfg.seed, "random seed");
  simulate->add_flag("--no-permute", [&sim](std::int64_t) { sim.cfg.permute_columns = false; },
                     "keep the coefficient pattern on the leading columns");
  simulate->add_option("--out", sim.out, "training CSV path")->required();
  simulate->add_option("--out-test", sim.out_test, "test CSV path (optional)");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "fit one model to a CSV dataset");
  fit_cmd->add_option("--data", fit.data, "input CSV")->required();
  fit_cmd->add_option("--target", fit.target, "target column name");
  fit_cmd->add_option("--task", fit.task, "linear|logistic");
  fit_cmd->add_option("--method", fit.method, "statistical|standard|restricted|voting");
  fit_cmd->add_option("--k", fit.k, "cross-validation folds");
  fit_cmd->add_option("--grid-count", fit.grid_count, "penalty grid size");
  fit_cmd->add_option("--grid-ratio", fit.grid_ratio, "lambda_min / lambda_max");
  fit_cmd->add_option("--lr", fit.train.lr, "Adam learning rate");
  fit_cmd->add_option("--max-epochs", fit.train.max_epochs, "epoch budget");
  fit_cmd->add_option("--seed", fit.seed, "random seed");
  fit_cmd->add_option("--model-out", fit.model_out, "model file path (stdout if omitted)");

  ExperimentArgs exp;
  std::vector<std::string> inline_flags = {
      "kind", "repetitions", "k", "methods", "p", "n_train", "n_test", "rho",
      "noise_std", "permute_columns", "data", "target", "train_size", "test_size",
      "grid_count", "grid_ratio", "lr", "max_epochs", "patience", "train_tol",
      "val_fraction", "standard_sweep", "seed", "out", "threads"};
  auto* exp_cmd = app.add_subcommand("experiment", "run a repeated-validation benchmark");
  exp_cmd->add_option("--config", exp.config_path, "key=value config file");
  exp_cmd->add_option("--format", exp.format, "csv|markdown");
  std::vector<std::string> holders(inline_flags.size());
  for (std::size_t i = 0; i < inline_flags.size(); ++i) {
    std::string flag = "--" + inline_flags[i];
    for (auto& c : flag)
      if (c == '_') c = '-';
    exp_cmd->add_option(flag, holders[i], "config key " + inline_flags[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints usage, exit 0
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*fit_cmd) return run_fit(fit);
    for (std::size_t i = 0; i < inline_flags.size(); ++i)
      if (!holders[i].empty()) exp.pairs.emplace_back(inline_flags[i], holders[i]);
    return run_experiment_cmd(exp);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
