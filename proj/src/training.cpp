#include "nlasso/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlasso/model_core.hpp"
#include "nlasso/rng.hpp"

namespace nlasso {

namespace {

constexpr double kTieTol = 1e-12;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

NeuralParams init_params(Index p, double l1, bool gamma_frozen, bool l1_trainable = false) {
  NeuralParams params;
  params.w = Vector::Zero(p);
  params.gamma = 1.0;
  params.b0 = 0.0;
  params.l1 = l1;
  params.gamma_frozen = gamma_frozen;
  params.l1_trainable = l1_trainable;
  return params;
}

double train_loss(const Matrix& X, const Vector& y, const NeuralParams& params, Task task) {
  return task == Task::linear ? loss_linear(X, y, params) : loss_logistic(X, y, params);
}

Gradient train_grad(const Matrix& X, const Vector& y, const NeuralParams& params, Task task) {
  return task == Task::linear ? grad_linear(X, y, params) : grad_logistic(X, y, params);
}

ZeroCheckReport zero_report(const Matrix& X, const Vector& y, const NeuralParams& params,
                            Task task) {
  return task == Task::linear ? zero_condition_linear(X, y, params)
                              : zero_condition_logistic(X, y, params);
}

// Validation error on rows already mapped into the training standardization;
// linear predictions add back the training response mean.
double validation_error(const Matrix& Xval_std, const Vector& yval_raw,
                        const NeuralParams& params, Task task, double y_mean) {
  if (task == Task::linear) {
    Vector pred = forward_linear(Xval_std, params);
    pred.array() += y_mean;
    return (yval_raw - pred).squaredNorm() / static_cast<double>(yval_raw.size());
  }
  Vector eta = params.gamma * (Xval_std * params.w);
  eta.array() += params.b0;
  return binary_cross_entropy(eta, yval_raw);
}

struct TrainedRun {
  NeuralParams params;
  double best_val_error = std::numeric_limits<double>::infinity();
  long best_epoch = 0;
  long epochs = 0;
};

// Patience ignores improvements below this relative margin; full-batch Adam
// iterates jiggle the validation error at roughly the step-size scale, and
// counting that jitter as progress would let runs drift far past the
// optimum before stopping.
constexpr double kMinImprovement = 1e-3;

// Full-batch Adam with the zero-condition applied after every epoch; tracks
// the parameters at the epoch with the smallest validation error and stops
// after `patience` epochs without meaningful improvement.
//
// With l1_trainable the run descends the penalty path on its own: the
// penalty starts just below the largest worthwhile value for the data the
// network sees (so the strongest coordinate activates immediately) and the
// run ends once the penalty falls through `l1_floor`, the bottom of the
// grid the other methods search.
TrainedRun train_with_validation(const Matrix& X, const Vector& y, Task task, double l1,
                                 bool gamma_frozen, bool l1_trainable,
                                 const TrainConfig& cfg, const Matrix& Xval_std,
                                 const Vector& yval_raw, double y_mean,
                                 double l1_floor = 0.0) {
  NeuralParams params = init_params(X.cols(), l1, gamma_frozen, l1_trainable);
  if (l1_trainable) {
    // Start at the largest worthwhile penalty for the data this network sees.
    LabeledDataset view;
    view.X = X;
    view.y = y;
    params.l1 = lambda_max(view, task);
  }
  AdamState adam(trainable_count(params, task), cfg.lr, cfg.beta1, cfg.beta2, cfg.eps);

  TrainedRun run;
  run.params = params;
  run.best_val_error = validation_error(Xval_std, yval_raw, params, task, y_mean);
  // The patience clock arms once the run first beats its starting error;
  // a penalty-path run can spend many epochs descending from the null
  // region before any coordinate gets traction. Path runs also get a wider
  // window: the penalty moves a fraction of a step per epoch, so the same
  // span of penalties covers more epochs than a fixed-penalty run needs.
  const long patience_budget =
      l1_trainable ? cfg.patience + cfg.patience / 2 : cfg.patience;
  bool armed = !l1_trainable;
  long stale = 0;
  for (long epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const Gradient grad = train_grad(X, y, params, task);
    adam_step(adam, params, grad, task);
    ZeroCheckReport report = zero_report(X, y, params, task);
    if (l1_trainable) {
      // A penalty-path run must never zero out the whole model: clamp the
      // penalty just below the strongest statistic so the leading
      // coordinate always survives the pass.
      const double top = report.stat.cwiseAbs().maxCoeff();
      if (params.l1 >= top && top > l1_floor) {
        params.l1 = 0.999 * top;
        report.threshold = params.l1;
        for (Index j = 0; j < params.w.size(); ++j)
          report.zeroed[static_cast<std::size_t>(j)] =
              std::abs(report.stat[j]) <= params.l1;
      }
    }
    apply_zeroing(params, report, &adam);

    // Candidate snapshots report weights within one optimizer step of zero
    // as zero: those are transient, not selections. The recorded error is
    // the cleaned candidate's, so the returned model reproduces it exactly.
    NeuralParams candidate = params;
    for (Index j = 0; j < candidate.w.size(); ++j)
      if (std::abs(candidate.w[j]) <= 2.0 * adam.lr) candidate.w[j] = 0.0;
    const double val = validation_error(Xval_std, yval_raw, candidate, task, y_mean);
    if (val < run.best_val_error -
                  kMinImprovement * std::max(1.0, std::abs(run.best_val_error))) {
      run.best_val_error = val;
      run.best_epoch = epoch;
      run.params = candidate;
      stale = 0;
      armed = true;
    } else if (armed && ++stale >= patience_budget) {
      run.epochs = epoch;
      return run;
    }
    if (l1_trainable && params.l1 <= l1_floor) {
      run.epochs = epoch;
      return run;
    }
  }
  run.epochs = cfg.max_epochs;
  return run;
}

// Train until the relative training-loss change settles below cfg.tol.
// Adam with a fixed step orbits the optimum instead of landing on it, so the
// step size is halved whenever a 50-epoch window brings no loss improvement;
// the run stops once the step size underflows or the loss settles. An
// optional warm start seeds the weights from a neighbouring penalty.
NeuralParams train_to_convergence(const Matrix& X, const Vector& y, Task task, double l1,
                                  bool gamma_frozen, const TrainConfig& cfg,
                                  const NeuralParams* warm = nullptr) {
  NeuralParams params = warm ? *warm : init_params(X.cols(), l1, gamma_frozen);
  params.l1 = l1;
  params.gamma_frozen = gamma_frozen;
  AdamState adam(trainable_count(params, task), cfg.lr, cfg.beta1, cfg.beta2, cfg.eps);
  const double lr_floor = std::max(1e-10, cfg.lr * 0x1p-14);
  constexpr long kWindow = 50;

  double best = train_loss(X, y, params, task);
  double window_best = best;
  double prev = best;
  int settled = 0;
  for (long epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const Gradient grad = train_grad(X, y, params, task);
    adam_step(adam, params, grad, task);
    apply_zeroing(params, zero_report(X, y, params, task), &adam);

    const double loss = train_loss(X, y, params, task);
    best = std::min(best, loss);
    // settling counts only after the step size has come down, so a flat
    // stretch of a wide orbit is not mistaken for convergence
    if (std::abs(loss - prev) <= cfg.tol * std::max(1.0, std::abs(prev)) &&
        adam.lr <= cfg.lr / 16.0) {
      if (++settled >= 3) break;
    } else {
      settled = 0;
    }
    prev = loss;
    if (epoch % kWindow == 0) {
      if (window_best - best <= cfg.tol * std::max(1.0, std::abs(best))) {
        if (adam.lr <= lr_floor) break;
        adam.lr *= 0.5;
      }
      window_best = best;
    }
  }
  return params;
}

FittedModel model_from_params(const NeuralParams& params, Task task, Method method,
                              const StandardizationParams& std_params) {
  FittedModel model;
  model.task = task;
  model.method = method;
  model.beta = params.coefficients();
  model.intercept = task == Task::logistic ? params.b0 : 0.0;
  model.lambda = params.gamma != 0.0 ? params.l1 / std::abs(params.gamma) : 0.0;
  destandardize(model, std_params);
  return model;
}

std::size_t argmin_largest_lambda(const std::vector<double>& errors) {
  const double best = *std::min_element(errors.begin(), errors.end());
  std::size_t chosen = 0;
  while (chosen + 1 < errors.size() && errors[chosen] > best + kTieTol) ++chosen;
  return chosen;
}

}  // namespace

VoteTally VoteTally::from_supports(const std::vector<std::vector<bool>>& fold_supports, int k) {
  if (fold_supports.empty()) throw BadConfig("no fold supports to tally");
  VoteTally tally;
  tally.k = k;
  tally.majority_threshold = k / 2 + 1;
  const std::size_t p = fold_supports.front().size();
  tally.votes.assign(p, 0);
  for (const auto& support : fold_supports) {
    if (support.size() != p) throw DimensionMismatch("fold supports disagree on p");
    for (std::size_t j = 0; j < p; ++j)
      if (support[j]) ++tally.votes[j];
  }
  tally.selected.resize(p);
  for (std::size_t j = 0; j < p; ++j)
    tally.selected[j] = tally.votes[j] >= tally.majority_threshold;
  return tally;
}

FittedModel fit_standard(const LabeledDataset& ds, Task task, const LambdaGrid& grid,
                         const TrainConfig& cfg, StandardFitInfo* info) {
  ds.validate(task);
  const auto split =
      train_val_split(static_cast<std::size_t>(ds.n()), cfg.val_fraction, cfg.seed);
  const LabeledDataset train = subset_rows(ds, split.train);
  const LabeledDataset val = subset_rows(ds, split.val);
  auto [std_train, std_params] = standardize(train, task);
  const Matrix Xval_std = apply_standardization(val.X, std_params);

  // Sweep mode trains one run per grid value at a fixed penalty; otherwise a
  // single run starts at the grid head with the penalty trainable and the
  // best-validation snapshot selects the effective penalty.
  const std::vector<double> sweep =
      cfg.standard_sweep ? grid.values : std::vector<double>{grid.values.front()};

  std::vector<double> val_errors(sweep.size());
  double best_error = std::numeric_limits<double>::infinity();
  std::size_t best_index = 0;
  NeuralParams best_params;
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    TrainedRun run = train_with_validation(std_train.X, std_train.y, task, sweep[i],
                                           /*gamma_frozen=*/false,
                                           /*l1_trainable=*/!cfg.standard_sweep, cfg,
                                           Xval_std, val.y, std_params.y_mean,
                                           grid.values.back());
    val_errors[i] = run.best_val_error;
    if (run.best_val_error < best_error) {
      best_error = run.best_val_error;
      best_index = i;
      best_params = run.params;
    }
  }
  if (info) {
    info->val_error_per_lambda = val_errors;
    info->chosen_index = best_index;
    info->best_val_error = best_error;
  }
  return model_from_params(best_params, task, Method::standard_neural, std_params);
}

FittedModel fit_restricted(const LabeledDataset& ds, Task task, const LambdaGrid& grid,
                           int k, const TrainConfig& cfg, std::uint64_t seed,
                           RestrictedFitInfo* info) {
  ds.validate(task);
  const FoldAssignment folds = make_folds(static_cast<std::size_t>(ds.n()), k, seed);
  std::vector<double> mean_err(grid.values.size(), 0.0);

  for (int fold = 0; fold < k; ++fold) {
    const auto train_idx = folds.out_of_fold(fold);
    if (train_idx.size() < 2) throw FoldTooSmall("training fold has fewer than 2 rows");
    const LabeledDataset train = subset_rows(ds, train_idx);
    const LabeledDataset val = subset_rows(ds, folds.in_fold(fold));
    auto [std_train, std_params] = standardize(train, task);
    const Matrix Xval_std = apply_standardization(val.X, std_params);

    // Warm-started sweep down the penalty path.
    NeuralParams params;
    for (std::size_t gi = 0; gi < grid.values.size(); ++gi) {
      params = train_to_convergence(std_train.X, std_train.y, task, grid.values[gi],
                                    /*gamma_frozen=*/true, cfg, gi == 0 ? nullptr : &params);
      mean_err[gi] += validation_error(Xval_std, val.y, params, task, std_params.y_mean) /
                      static_cast<double>(k);
    }
  }

  const std::size_t chosen = argmin_largest_lambda(mean_err);
  if (info) {
    info->mean_cv_error = mean_err;
    info->chosen_index = chosen;
  }

  auto [std_full, std_params] = standardize(ds, task);
  NeuralParams params;
  for (std::size_t gi = 0; gi <= chosen; ++gi)
    params = train_to_convergence(std_full.X, std_full.y, task, grid.values[gi],
                                  /*gamma_frozen=*/true, cfg, gi == 0 ? nullptr : &params);
  return model_from_params(params, task, Method::restricted_neural, std_params);
}

FittedModel fit_voting(const LabeledDataset& ds, Task task, const LambdaGrid& grid,
                       int k, const TrainConfig& cfg, std::uint64_t seed,
                       VotingFitInfo* info) {
  ds.validate(task);
  const FoldAssignment folds = make_folds(static_cast<std::size_t>(ds.n()), k, seed);

  // Each fold runs a single descent of the penalty path: the penalty is
  // trained jointly with the weights, and the snapshot with the smallest
  // error on the held-out fold marks that fold's selection.
  std::vector<std::vector<bool>> fold_supports;
  std::vector<double> fold_lambda;
  fold_supports.reserve(static_cast<std::size_t>(k));
  for (int fold = 0; fold < k; ++fold) {
    const auto train_idx = folds.out_of_fold(fold);
    if (train_idx.size() < 2) throw FoldTooSmall("training fold has fewer than 2 rows");
    const LabeledDataset train = subset_rows(ds, train_idx);
    const LabeledDataset val = subset_rows(ds, folds.in_fold(fold));
    auto [std_train, std_params] = standardize(train, task);
    const Matrix Xval_std = apply_standardization(val.X, std_params);

    const TrainedRun run = train_with_validation(
        std_train.X, std_train.y, task, grid.values.front(), /*gamma_frozen=*/false,
        /*l1_trainable=*/true, cfg, Xval_std, val.y, std_params.y_mean,
        grid.values.back());
    fold_supports.push_back(support_of(run.params.coefficients()));
    fold_lambda.push_back(run.params.gamma != 0.0
                              ? run.params.l1 / std::abs(run.params.gamma)
                              : 0.0);
  }

  const VoteTally tally = VoteTally::from_supports(fold_supports, k);
  if (info) {
    info->tally = tally;
    info->fold_supports = fold_supports;
    info->fold_lambda = fold_lambda;
  }

  FittedModel model = refit_unpenalized(ds, tally.selected, task);
  model.method = Method::voting_neural;
  model.lambda = 0.0;
  return model;
}

FittedModel refit_unpenalized(const LabeledDataset& ds, const std::vector<bool>& support,
                              Task task) {
  ds.validate(task);
  if (static_cast<Index>(support.size()) != ds.p())
    throw DimensionMismatch("support length does not match p");

  std::vector<Index> selected;
  for (std::size_t j = 0; j < support.size(); ++j)
    if (support[j]) selected.push_back(static_cast<Index>(j));
  if (static_cast<Index>(selected.size()) > ds.n() - 1)
    throw SingularDesign("more selected variables than the sample can identify");

  auto [std_ds, std_params] = standardize(ds, task);

  FittedModel model;
  model.task = task;
  model.method = Method::voting_neural;
  model.beta = Vector::Zero(ds.p());
  model.lambda = 0.0;

  if (selected.empty()) {
    model.intercept = task == Task::logistic
                          ? std::log(ds.y.mean() / (1.0 - ds.y.mean()))
                          : 0.0;
    destandardize(model, std_params);
    return model;
  }

  Matrix Xsel(ds.n(), static_cast<Index>(selected.size()));
  for (std::size_t s = 0; s < selected.size(); ++s)
    Xsel.col(static_cast<Index>(s)) = std_ds.X.col(selected[s]);

  if (task == Task::linear) {
    Eigen::ColPivHouseholderQR<Matrix> qr(Xsel);
    if (qr.rank() < Xsel.cols())
      throw SingularDesign("selected columns are linearly dependent");
    const Vector beta_sel = qr.solve(std_ds.y);
    for (std::size_t s = 0; s < selected.size(); ++s)
      model.beta[selected[s]] = beta_sel[static_cast<Index>(s)];
    model.intercept = 0.0;
  } else {
    Eigen::ColPivHouseholderQR<Matrix> qr(Xsel);
    if (qr.rank() < Xsel.cols())
      throw SingularDesign("selected columns are linearly dependent");

    // Damped Newton on the unpenalized logistic loss with an intercept.
    const Index s = Xsel.cols();
    const double n = static_cast<double>(ds.n());
    Vector theta = Vector::Zero(s + 1);  // [beta_sel; b0]
    theta[s] = std::log(ds.y.mean() / (1.0 - ds.y.mean()));
    auto nll = [&](const Vector& th) {
      Vector eta = Xsel * th.head(s);
      eta.array() += th[s];
      double total = 0.0;
      for (Index i = 0; i < eta.size(); ++i) {
        const double e = eta[i];
        total += (e > 0.0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e))) -
                 std_ds.y[i] * e;
      }
      return total / n;
    };
    bool converged = false;
    for (int iter = 0; iter < 200; ++iter) {
      Vector eta = Xsel * theta.head(s);
      eta.array() += theta[s];
      const Vector prob = eta.unaryExpr([](double e) { return sigmoid(e); });
      Vector grad(s + 1);
      grad.head(s) = Xsel.transpose() * (prob - std_ds.y) / n;
      grad[s] = (prob - std_ds.y).sum() / n;
      if (grad.norm() < 1e-8) {
        converged = true;
        break;
      }
      const Vector weight = prob.array() * (1.0 - prob.array());
      Matrix hess(s + 1, s + 1);
      hess.topLeftCorner(s, s) = Xsel.transpose() * weight.asDiagonal() * Xsel / n;
      const Vector cross = Xsel.transpose() * weight / n;
      hess.topRightCorner(s, 1) = cross;
      hess.bottomLeftCorner(1, s) = cross.transpose();
      hess(s, s) = weight.sum() / n;
      hess.diagonal().array() += 1e-12;
      const Vector step = hess.ldlt().solve(grad);
      if (!step.allFinite()) throw SingularDesign("logistic refit produced a singular step");

      const double f0 = nll(theta);
      double scale = 1.0;
      Vector candidate = theta - step;
      for (int half = 0; half < 60 && nll(candidate) > f0; ++half) {
        scale *= 0.5;
        candidate = theta - scale * step;
      }
      theta = candidate;
    }
    if (!converged)
      throw NoConvergence("unpenalized logistic refit did not converge",
                          std::vector<double>(theta.data(), theta.data() + theta.size()),
                          theta[s], 200);
    for (std::size_t si = 0; si < selected.size(); ++si)
      model.beta[selected[si]] = theta[static_cast<Index>(si)];
    model.intercept = theta[s];
  }

  destandardize(model, std_params);
  return model;
}

}  // namespace nlasso
