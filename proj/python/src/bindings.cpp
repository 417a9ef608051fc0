#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>

#include "nlasso/classic_lasso.hpp"
#include "nlasso/datagen.hpp"
#include "nlasso/harness.hpp"
#include "nlasso/metrics.hpp"
#include "nlasso/model_core.hpp"
#include "nlasso/rng.hpp"
#include "nlasso/training.hpp"

namespace py = pybind11;
using namespace nlasso;

namespace {

LabeledDataset make_dataset(const Matrix& X, const Vector& y,
                            const std::optional<std::vector<bool>>& truth) {
  LabeledDataset ds;
  ds.X = X;
  ds.y = y;
  ds.truth_support = truth;
  return ds;
}

TrainConfig make_train_config(long max_epochs, long patience, double lr,
                              double val_fraction, double tol, bool standard_sweep,
                              std::uint64_t seed) {
  TrainConfig cfg;
  cfg.max_epochs = max_epochs;
  cfg.patience = patience;
  cfg.lr = lr;
  cfg.val_fraction = val_fraction;
  cfg.tol = tol;
  cfg.standard_sweep = standard_sweep;
  cfg.seed = mix_seed(seed, 0x73706c69);
  return cfg;
}

LambdaGrid shared_grid(const LabeledDataset& ds, Task task, int grid_count,
                       double grid_ratio) {
  auto [std_ds, params] = standardize(ds, task);
  return lambda_grid(std_ds, task, grid_count, grid_ratio);
}

}  // namespace

PYBIND11_MODULE(_nlasso, m) {
  m.doc() = "sparse linear/logistic regression: coordinate-descent lasso and "
            "gradient-trained reformulations";

  py::register_exception<Error>(m, "NlassoError");

  py::class_<FittedModel>(m, "FittedModel")
      .def_property_readonly("task", [](const FittedModel& f) { return std::string(to_string(f.task)); })
      .def_property_readonly("method", [](const FittedModel& f) { return std::string(to_string(f.method)); })
      .def_readonly("beta", &FittedModel::beta)
      .def_readonly("intercept", &FittedModel::intercept)
      .def_readonly("support", &FittedModel::support)
      .def_readonly("lambda_", &FittedModel::lambda)
      .def_readonly("beta_original", &FittedModel::beta_original)
      .def_readonly("intercept_original", &FittedModel::intercept_original)
      .def("predict", [](const FittedModel& f, const Matrix& X) {
        return f.task == Task::linear ? f.predict_linear(X) : f.predict_proba(X);
      }, py::arg("X"), "Predictions on raw rows: values (linear) or probabilities (logistic).")
      .def("__repr__", [](const FittedModel& f) {
        return "<FittedModel method=" + std::string(to_string(f.method)) +
               " selected=" + std::to_string(f.selected_count()) + "/" +
               std::to_string(f.p()) + ">";
      });

  m.def("simulate",
        [](int p, int n_train, int n_test, double rho, double noise_std,
           bool permute_columns, bool logistic_response, std::uint64_t seed) {
          SyntheticConfig cfg;
          cfg.p = p;
          cfg.n_train = n_train;
          cfg.n_test = n_test;
          cfg.rho = rho;
          cfg.noise_std = noise_std;
          cfg.permute_columns = permute_columns;
          cfg.logistic_response = logistic_response;
          cfg.seed = seed;
          auto [train, test] = simulate(cfg);
          return py::make_tuple(train.X, train.y, test.X, test.y, *train.truth_support);
        },
        py::arg("p") = 20, py::arg("n_train") = 50, py::arg("n_test") = 1000,
        py::arg("rho") = 0.5, py::arg("noise_std") = 1.0,
        py::arg("permute_columns") = true, py::arg("logistic_response") = false,
        py::arg("seed") = 0,
        "Correlated Gaussian design with y = X beta + eps; returns "
        "(X_train, y_train, X_test, y_test, truth_support).");

  m.def("soft_threshold", &soft_threshold, py::arg("x"), py::arg("t"));

  m.def("lambda_grid",
        [](const Matrix& X, const Vector& y, const std::string& task, int count,
           double ratio) {
          const Task t = task_from_string(task);
          const LambdaGrid grid = shared_grid(make_dataset(X, y, std::nullopt), t, count, ratio);
          return grid.values;
        },
        py::arg("X"), py::arg("y"), py::arg("task") = "linear",
        py::arg("count") = 100, py::arg("ratio") = 1e-3);

  m.def("fit_statistical",
        [](const Matrix& X, const Vector& y, const std::string& task, int k,
           int grid_count, double grid_ratio, std::uint64_t seed) {
          const Task t = task_from_string(task);
          const LabeledDataset ds = make_dataset(X, y, std::nullopt);
          const LambdaGrid grid = shared_grid(ds, t, grid_count, grid_ratio);
          return cv_statistical_lasso(ds, t, k, grid, mix_seed(seed, 0x666f6c64));
        },
        py::arg("X"), py::arg("y"), py::arg("task") = "linear", py::arg("k") = 5,
        py::arg("grid_count") = 100, py::arg("grid_ratio") = 1e-3, py::arg("seed") = 0,
        "Coordinate-descent lasso with K-fold cross-validated penalty.");

  m.def("fit_standard",
        [](const Matrix& X, const Vector& y, const std::string& task, int grid_count,
           double grid_ratio, long max_epochs, long patience, double lr,
           double val_fraction, double tol, bool sweep, std::uint64_t seed) {
          const Task t = task_from_string(task);
          const LabeledDataset ds = make_dataset(X, y, std::nullopt);
          const LambdaGrid grid = shared_grid(ds, t, grid_count, grid_ratio);
          return fit_standard(ds, t, grid,
                              make_train_config(max_epochs, patience, lr, val_fraction,
                                                tol, sweep, seed));
        },
        py::arg("X"), py::arg("y"), py::arg("task") = "linear",
        py::arg("grid_count") = 100, py::arg("grid_ratio") = 1e-3,
        py::arg("max_epochs") = 2000, py::arg("patience") = 100, py::arg("lr") = 0.01,
        py::arg("val_fraction") = 0.2, py::arg("tol") = 1e-9, py::arg("sweep") = true,
        py::arg("seed") = 0,
        "Gradient-trained fit selected on a single validation split.");

  m.def("fit_restricted",
        [](const Matrix& X, const Vector& y, const std::string& task, int k,
           int grid_count, double grid_ratio, long max_epochs, double lr, double tol,
           std::uint64_t seed) {
          const Task t = task_from_string(task);
          const LabeledDataset ds = make_dataset(X, y, std::nullopt);
          const LambdaGrid grid = shared_grid(ds, t, grid_count, grid_ratio);
          TrainConfig cfg = make_train_config(max_epochs, 100, lr, 0.2, tol, true, seed);
          return fit_restricted(ds, t, grid, k, cfg, mix_seed(seed, 0x666f6c64));
        },
        py::arg("X"), py::arg("y"), py::arg("task") = "linear", py::arg("k") = 5,
        py::arg("grid_count") = 100, py::arg("grid_ratio") = 1e-3,
        py::arg("max_epochs") = 2000, py::arg("lr") = 0.01, py::arg("tol") = 1e-9,
        py::arg("seed") = 0,
        "Gradient-trained fit with the scale frozen at 1 and the penalty chosen "
        "by K-fold cross-validation.");

  m.def("fit_voting",
        [](const Matrix& X, const Vector& y, const std::string& task, int k,
           int grid_count, double grid_ratio, long max_epochs, long patience, double lr,
           std::uint64_t seed) {
          const Task t = task_from_string(task);
          const LabeledDataset ds = make_dataset(X, y, std::nullopt);
          const LambdaGrid grid = shared_grid(ds, t, grid_count, grid_ratio);
          TrainConfig cfg = make_train_config(max_epochs, patience, lr, 0.2, 1e-9, true, seed);
          VotingFitInfo info;
          FittedModel model = fit_voting(ds, t, grid, k, cfg, mix_seed(seed, 0x666f6c64), &info);
          return py::make_tuple(model, info.tally.votes, info.tally.majority_threshold);
        },
        py::arg("X"), py::arg("y"), py::arg("task") = "linear", py::arg("k") = 5,
        py::arg("grid_count") = 100, py::arg("grid_ratio") = 1e-3,
        py::arg("max_epochs") = 2000, py::arg("patience") = 100, py::arg("lr") = 0.01,
        py::arg("seed") = 0,
        "Per-fold best-penalty supports vote; majority winners are refit without "
        "penalty. Returns (model, votes, majority_threshold).");

  m.def("refit_unpenalized",
        [](const Matrix& X, const Vector& y, const std::vector<bool>& support,
           const std::string& task) {
          return refit_unpenalized(make_dataset(X, y, std::nullopt), support,
                                   task_from_string(task));
        },
        py::arg("X"), py::arg("y"), py::arg("support"), py::arg("task") = "linear");

  m.def("test_mse",
        [](const FittedModel& model, const Matrix& X, const Vector& y) {
          return test_mse(model, make_dataset(X, y, std::nullopt));
        },
        py::arg("model"), py::arg("X"), py::arg("y"));

  m.def("test_accuracy",
        [](const FittedModel& model, const Matrix& X, const Vector& y) {
          return test_accuracy(model, make_dataset(X, y, std::nullopt));
        },
        py::arg("model"), py::arg("X"), py::arg("y"));

  m.def("support_precision", &support_precision, py::arg("model"), py::arg("truth_support"));
  m.def("support_recall", &support_recall, py::arg("model"), py::arg("truth_support"));
  m.def("selected_fraction", &selected_fraction, py::arg("model"));

  m.def("paired_t_test",
        [](const std::vector<double>& a, const std::vector<double>& b) {
          const TTestResult r = paired_t_test(a, b);
          return py::make_tuple(r.t, r.p_value);
        },
        py::arg("a"), py::arg("b"),
        "Two-sided paired Student t test; returns (t, p_value).");
}
