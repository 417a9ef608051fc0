#pragma once

#include <cstdint>
#include <vector>

#include "nlasso/types.hpp"

namespace nlasso {

/// Log-equispaced penalty grid, strictly decreasing from lambda_max down to
/// ratio * lambda_max.
struct LambdaGrid {
  std::vector<double> values;
  int count = 0;
  double ratio = 1.0;

  static LambdaGrid single(double lambda);
};

/// sign(x) * max(|x| - t, 0).
double soft_threshold(double x, double t);

/// Smallest penalty at which the all-zero solution is optimal for the given
/// standardized data: max_j |(2/N) X_j^t y| (linear) or
/// max_j |(1/N) X_j^t (y - 0.5)| (logistic).
double lambda_max(const LabeledDataset& std_ds, Task task);

LambdaGrid lambda_grid(const LabeledDataset& std_ds, Task task, int count = 100,
                       double ratio = 1e-3);

/// Cyclic coordinate descent for
///   (1/N) ||y - X beta||^2 + lambda ||beta||_1
/// on standardized data with centered y. Converged when the largest
/// coefficient change in a full sweep drops below tol.
FittedModel cd_linear(const LabeledDataset& std_ds, double lambda,
                      double tol = 1e-7, long max_sweeps = 10000);

/// L1-penalized logistic regression,
///   (1/N) sum [log(1 + e^eta_i) - y_i eta_i] + lambda ||beta||_1,
/// eta = X beta + b0, with the intercept unpenalized. Outer loop: quadratic
/// approximation at the current iterate (weights v_i = p_i (1 - p_i) clamped
/// at 1e-5, working response z_i = eta_i + (y_i - p_i)/v_i); inner loop:
/// weighted coordinate descent.
FittedModel cd_logistic(const LabeledDataset& std_ds, double lambda,
                        double tol = 1e-7, long max_outer = 100);

struct CvInfo {
  std::vector<double> mean_cv_error;  // one entry per grid value
  std::size_t chosen_index = 0;
};

/// K-fold cross-validated lasso. Standardizes per fold-train and full-train
/// internally, selects the lambda with the smallest mean validation error
/// (largest lambda on ties within 1e-12), and refits on everything.
FittedModel cv_statistical_lasso(const LabeledDataset& ds, Task task, int k,
                                 const LambdaGrid& grid, std::uint64_t seed,
                                 CvInfo* info = nullptr);

double objective_linear(const LabeledDataset& std_ds, const Vector& beta, double lambda);
double objective_logistic(const LabeledDataset& std_ds, const Vector& beta,
                          double intercept, double lambda);

/// Mean binary cross-entropy of probabilities sigma(eta) against y, in the
/// overflow-safe log1p form.
double binary_cross_entropy(const Vector& eta, const Vector& y);

}  // namespace nlasso
