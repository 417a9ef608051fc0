#pragma once

#include <cstdint>
#include <vector>

#include "nlasso/classic_lasso.hpp"
#include "nlasso/neural.hpp"
#include "nlasso/types.hpp"

namespace nlasso {

struct TrainConfig {
  long max_epochs = 2000;
  long patience = 100;   // early stop: epochs without validation improvement
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double tol = 1e-9;     // relative training-loss change, convergence mode
  double val_fraction = 0.2;
  std::uint64_t seed = 0;
  bool standard_sweep = true;  // sweep the full grid vs. train once at its head
};

/// Majority vote over per-fold supports: selected_j iff
/// votes_j >= floor(k/2) + 1.
struct VoteTally {
  std::vector<int> votes;
  int k = 0;
  int majority_threshold = 0;
  std::vector<bool> selected;

  static VoteTally from_supports(const std::vector<std::vector<bool>>& fold_supports, int k);
};

struct StandardFitInfo {
  std::vector<double> val_error_per_lambda;
  std::size_t chosen_index = 0;
  double best_val_error = 0.0;
};

struct RestrictedFitInfo {
  std::vector<double> mean_cv_error;
  std::size_t chosen_index = 0;
};

struct VotingFitInfo {
  VoteTally tally;
  std::vector<std::vector<bool>> fold_supports;
  std::vector<double> fold_lambda;  // per-fold selected penalty
};

/// Single train/validation split; every grid penalty is trained full-batch
/// with per-epoch zeroing, the best-validation epoch is snapshotted, and the
/// penalty with the smallest validation error wins.
FittedModel fit_standard(const LabeledDataset& ds, Task task, const LambdaGrid& grid,
                         const TrainConfig& cfg, StandardFitInfo* info = nullptr);

/// gamma frozen at 1; the penalty is chosen by K-fold cross-validation with
/// per-fold training run to convergence, then the model is retrained on the
/// full data at the winner.
FittedModel fit_restricted(const LabeledDataset& ds, Task task, const LambdaGrid& grid,
                           int k, const TrainConfig& cfg, std::uint64_t seed,
                           RestrictedFitInfo* info = nullptr);

/// Each fold trains like fit_standard with that fold as validation set and
/// picks its own best penalty; supports vote, and the majority winners are
/// refit without penalty on the full data. An empty majority yields the
/// intercept-only model.
FittedModel fit_voting(const LabeledDataset& ds, Task task, const LambdaGrid& grid,
                       int k, const TrainConfig& cfg, std::uint64_t seed,
                       VotingFitInfo* info = nullptr);

/// Least squares (linear, via column-pivoted QR) or damped-Newton logistic
/// fit on the selected columns only; everything outside the support stays
/// exactly zero.
FittedModel refit_unpenalized(const LabeledDataset& ds, const std::vector<bool>& support,
                              Task task);

}  // namespace nlasso
