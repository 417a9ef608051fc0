#include "nlasso/classic_lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlasso/model_core.hpp"

namespace nlasso {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log(1 + e^x) without overflow.
double log1pexp(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

std::vector<double> to_std(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// One cyclic sweep of coordinate updates for the linear problem, over all
// coordinates or the current active set. Each update is the exact
// single-coordinate minimizer, so the objective never increases. Returns the
// largest coefficient change.
double linear_sweep(const Matrix& X, Vector& beta, Vector& residual,
                    const Vector& inv_colnorm, double lambda, bool active_only) {
  const double n = static_cast<double>(X.rows());
  double max_change = 0.0;
  for (Index j = 0; j < X.cols(); ++j) {
    const double old = beta[j];
    if (active_only && old == 0.0) continue;
    const double rho = X.col(j).dot(residual) / n + old / inv_colnorm[j];
    const double next = soft_threshold(rho, lambda / 2.0) * inv_colnorm[j];
    if (next != old) {
      residual.noalias() -= X.col(j) * (next - old);
      beta[j] = next;
      max_change = std::max(max_change, std::abs(next - old));
    }
  }
  return max_change;
}

// In-place CD so the CV path can warm-start along the grid. Full screening
// sweeps alternate with active-set-only cycling; convergence is declared
// only when a full sweep moves no coefficient by tol or more.
bool cd_linear_inplace(const Matrix& X, const Vector& y, Vector& beta, double lambda,
                       double tol, long max_sweeps, long* sweeps_used = nullptr) {
  const double n = static_cast<double>(X.rows());
  Vector inv_colnorm(X.cols());
  for (Index j = 0; j < X.cols(); ++j) {
    const double cn = X.col(j).squaredNorm() / n;
    inv_colnorm[j] = cn > 0.0 ? 1.0 / cn : 0.0;
  }
  Vector residual = y - X * beta;
  long used = 0;
  while (used < max_sweeps) {
    ++used;
    const double change = linear_sweep(X, beta, residual, inv_colnorm, lambda, false);
    if (change < tol) {
      if (sweeps_used) *sweeps_used = used;
      return true;
    }
    while (used < max_sweeps) {
      ++used;
      if (linear_sweep(X, beta, residual, inv_colnorm, lambda, true) < tol) break;
    }
  }
  if (sweeps_used) *sweeps_used = max_sweeps;
  return false;
}

struct LogisticState {
  Vector beta;
  double b0 = 0.0;
};

// Outer IRLS / inner weighted CD. Fixed points satisfy the stationarity
// condition |(1/N) X_j^t (y - p)| <= lambda at zero coordinates and
// (1/N) X_j^t (y - p) = lambda sign(beta_j) on the active set.
bool cd_logistic_inplace(const Matrix& X, const Vector& y, LogisticState& state,
                         double lambda, double tol, long max_outer) {
  const Index n = X.rows(), p = X.cols();
  const double dn = static_cast<double>(n);

  for (long outer = 1; outer <= max_outer; ++outer) {
    Vector eta = X * state.beta;
    eta.array() += state.b0;
    Vector prob = eta.unaryExpr([](double e) { return sigmoid(e); });
    Vector weight(n);
    for (Index i = 0; i < n; ++i)
      weight[i] = std::max(prob[i] * (1.0 - prob[i]), 1e-5);
    // Working residual of the quadratic approximation: r = z - eta.
    Vector residual = (y - prob).cwiseQuotient(weight);

    Vector denom(p);
    for (Index j = 0; j < p; ++j)
      denom[j] = X.col(j).cwiseAbs2().dot(weight) / dn;
    const double weight_sum = weight.sum();

    const Vector beta_before = state.beta;
    const double b0_before = state.b0;

    for (long sweep = 0; sweep < 1000; ++sweep) {
      double change = 0.0;
      for (Index j = 0; j < p; ++j) {
        const double old = state.beta[j];
        const double rho =
            X.col(j).dot(weight.cwiseProduct(residual)) / dn + denom[j] * old;
        const double next = soft_threshold(rho, lambda) / denom[j];
        if (next != old) {
          residual.noalias() -= X.col(j) * (next - old);
          state.beta[j] = next;
          change = std::max(change, std::abs(next - old));
        }
      }
      const double b0_delta = weight.dot(residual) / weight_sum;
      if (b0_delta != 0.0) {
        residual.array() -= b0_delta;
        state.b0 += b0_delta;
        change = std::max(change, std::abs(b0_delta));
      }
      if (change < tol) break;
    }

    const double outer_change = std::max(
        (state.beta - beta_before).cwiseAbs().maxCoeff(), std::abs(state.b0 - b0_before));
    if (outer_change < tol) return true;
  }
  return false;
}

FittedModel make_standardized_model(Task task, Vector beta, double intercept, double lambda) {
  FittedModel model;
  model.task = task;
  model.method = Method::statistical;
  model.beta = std::move(beta);
  model.intercept = intercept;
  model.lambda = lambda;
  model.support = support_of(model.beta);
  model.beta_original = model.beta;
  model.intercept_original = model.intercept;
  return model;
}

}  // namespace

LambdaGrid LambdaGrid::single(double lambda) {
  LambdaGrid grid;
  grid.values = {lambda};
  grid.count = 1;
  grid.ratio = 1.0;
  return grid;
}

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

double lambda_max(const LabeledDataset& std_ds, Task task) {
  const double n = static_cast<double>(std_ds.n());
  if (task == Task::linear)
    return (std_ds.X.transpose() * std_ds.y).cwiseAbs().maxCoeff() * 2.0 / n;
  const Vector centered = std_ds.y.array() - 0.5;  // sigma(0)
  return (std_ds.X.transpose() * centered).cwiseAbs().maxCoeff() / n;
}

LambdaGrid lambda_grid(const LabeledDataset& std_ds, Task task, int count, double ratio) {
  if (count < 1) throw BadConfig("grid count must be >= 1");
  if (!(ratio > 0.0 && ratio <= 1.0)) throw BadConfig("grid ratio must lie in (0, 1]");
  LambdaGrid grid;
  grid.count = count;
  grid.ratio = ratio;
  grid.values.resize(static_cast<std::size_t>(count));
  const double top = lambda_max(std_ds, task);
  if (count == 1) {
    grid.values[0] = top;
    return grid;
  }
  const double log_top = std::log(top);
  const double log_step = std::log(ratio) / static_cast<double>(count - 1);
  for (int i = 0; i < count; ++i)
    grid.values[static_cast<std::size_t>(i)] = std::exp(log_top + log_step * i);
  return grid;
}

FittedModel cd_linear(const LabeledDataset& std_ds, double lambda, double tol,
                      long max_sweeps) {
  if (lambda < 0.0) throw BadConfig("lambda must be >= 0");
  Vector beta = Vector::Zero(std_ds.p());
  long sweeps = 0;
  if (!cd_linear_inplace(std_ds.X, std_ds.y, beta, lambda, tol, max_sweeps, &sweeps))
    throw NoConvergence("coordinate descent did not converge in " +
                            std::to_string(max_sweeps) + " sweeps",
                        to_std(beta), 0.0, max_sweeps);
  return make_standardized_model(Task::linear, std::move(beta), 0.0, lambda);
}

FittedModel cd_logistic(const LabeledDataset& std_ds, double lambda, double tol,
                        long max_outer) {
  if (lambda < 0.0) throw BadConfig("lambda must be >= 0");
  std_ds.validate(Task::logistic);
  const double ybar = std_ds.y.mean();

  LogisticState state;
  state.beta = Vector::Zero(std_ds.p());
  state.b0 = std::log(ybar / (1.0 - ybar));
  if (!cd_logistic_inplace(std_ds.X, std_ds.y, state, lambda, tol, max_outer))
    throw NoConvergence("penalized IRLS did not converge in " +
                            std::to_string(max_outer) + " outer iterations",
                        to_std(state.beta), state.b0, max_outer);
  return make_standardized_model(Task::logistic, std::move(state.beta), state.b0, lambda);
}

double objective_linear(const LabeledDataset& std_ds, const Vector& beta, double lambda) {
  const double n = static_cast<double>(std_ds.n());
  return (std_ds.y - std_ds.X * beta).squaredNorm() / n + lambda * beta.lpNorm<1>();
}

double objective_logistic(const LabeledDataset& std_ds, const Vector& beta,
                          double intercept, double lambda) {
  const double n = static_cast<double>(std_ds.n());
  Vector eta = std_ds.X * beta;
  eta.array() += intercept;
  double nll = 0.0;
  for (Index i = 0; i < eta.size(); ++i)
    nll += log1pexp(eta[i]) - std_ds.y[i] * eta[i];
  return nll / n + lambda * beta.lpNorm<1>();
}

double binary_cross_entropy(const Vector& eta, const Vector& y) {
  if (eta.size() != y.size()) throw DimensionMismatch("eta and y lengths differ");
  double total = 0.0;
  for (Index i = 0; i < eta.size(); ++i) total += log1pexp(eta[i]) - y[i] * eta[i];
  return total / static_cast<double>(eta.size());
}

FittedModel cv_statistical_lasso(const LabeledDataset& ds, Task task, int k,
                                 const LambdaGrid& grid, std::uint64_t seed,
                                 CvInfo* info) {
  ds.validate(task);
  const FoldAssignment folds = make_folds(static_cast<std::size_t>(ds.n()), k, seed);
  std::vector<double> mean_err(grid.values.size(), 0.0);

  for (int fold = 0; fold < k; ++fold) {
    const auto train_idx = folds.out_of_fold(fold);
    const auto val_idx = folds.in_fold(fold);
    if (train_idx.size() < 2) throw FoldTooSmall("training fold has fewer than 2 rows");
    const LabeledDataset train = subset_rows(ds, train_idx);
    const LabeledDataset val = subset_rows(ds, val_idx);
    auto [std_train, params] = standardize(train, task);

    // Warm-started path down the grid.
    Vector beta = Vector::Zero(ds.p());
    LogisticState logit;
    if (task == Task::logistic) {
      logit.beta = Vector::Zero(ds.p());
      const double ybar = std_train.y.mean();
      logit.b0 = std::log(ybar / (1.0 - ybar));
    }
    for (std::size_t gi = 0; gi < grid.values.size(); ++gi) {
      const double lambda = grid.values[gi];
      FittedModel model;
      if (task == Task::linear) {
        if (!cd_linear_inplace(std_train.X, std_train.y, beta, lambda, 1e-7, 200000))
          throw NoConvergence("coordinate descent did not converge on a CV fold",
                              to_std(beta), 0.0, 200000);
        model = make_standardized_model(task, beta, 0.0, lambda);
      } else {
        if (!cd_logistic_inplace(std_train.X, std_train.y, logit, lambda, 1e-7, 100))
          throw NoConvergence("penalized IRLS did not converge on a CV fold",
                              to_std(logit.beta), logit.b0, 100);
        model = make_standardized_model(task, logit.beta, logit.b0, lambda);
      }
      destandardize(model, params);
      if (task == Task::linear) {
        mean_err[gi] +=
            (val.y - model.predict_linear(val.X)).squaredNorm() /
            static_cast<double>(val.y.size()) / static_cast<double>(k);
      } else {
        Vector eta = val.X * model.beta_original;
        eta.array() += model.intercept_original;
        mean_err[gi] += binary_cross_entropy(eta, val.y) / static_cast<double>(k);
      }
    }
  }

  // Smallest mean error; ties within 1e-12 go to the largest (sparsest) lambda.
  const double best = *std::min_element(mean_err.begin(), mean_err.end());
  std::size_t chosen = 0;
  while (chosen + 1 < mean_err.size() && mean_err[chosen] > best + 1e-12) ++chosen;
  if (info) {
    info->mean_cv_error = mean_err;
    info->chosen_index = chosen;
  }

  // Full refit at the winner, warm-started along the same path.
  auto [std_full, params] = standardize(ds, task);
  FittedModel model;
  if (task == Task::linear) {
    Vector beta = Vector::Zero(ds.p());
    for (std::size_t gi = 0; gi <= chosen; ++gi)
      if (!cd_linear_inplace(std_full.X, std_full.y, beta, grid.values[gi], 1e-7, 200000))
        throw NoConvergence("coordinate descent did not converge on the full refit",
                            to_std(beta), 0.0, 200000);
    model = make_standardized_model(task, std::move(beta), 0.0, grid.values[chosen]);
  } else {
    LogisticState logit;
    logit.beta = Vector::Zero(ds.p());
    const double ybar = std_full.y.mean();
    logit.b0 = std::log(ybar / (1.0 - ybar));
    for (std::size_t gi = 0; gi <= chosen; ++gi)
      if (!cd_logistic_inplace(std_full.X, std_full.y, logit, grid.values[gi], 1e-7, 100))
        throw NoConvergence("penalized IRLS did not converge on the full refit",
                            to_std(logit.beta), logit.b0, 100);
    model = make_standardized_model(task, std::move(logit.beta), logit.b0,
                                    grid.values[chosen]);
  }
  model.method = Method::statistical;
  destandardize(model, params);
  return model;
}

}  // namespace nlasso
