#include "nlasso/model_core.hpp"

#include <algorithm>
#include <cmath>

#include "nlasso/rng.hpp"

namespace nlasso {

const char* to_string(Task task) {
  return task == Task::linear ? "linear" : "logistic";
}

const char* to_string(Method method) {
  switch (method) {
    case Method::statistical: return "statistical";
    case Method::standard_neural: return "standard_neural";
    case Method::restricted_neural: return "restricted_neural";
    case Method::voting_neural: return "voting_neural";
  }
  return "?";
}

Task task_from_string(const std::string& s) {
  if (s == "linear") return Task::linear;
  if (s == "logistic") return Task::logistic;
  throw BadConfig("unknown task '" + s + "'");
}

Method method_from_string(const std::string& s) {
  if (s == "statistical") return Method::statistical;
  if (s == "standard" || s == "standard_neural") return Method::standard_neural;
  if (s == "restricted" || s == "restricted_neural") return Method::restricted_neural;
  if (s == "voting" || s == "voting_neural") return Method::voting_neural;
  throw BadConfig("unknown method '" + s + "'");
}

std::string LabeledDataset::col_name(Index j) const {
  if (j >= 0 && j < static_cast<Index>(col_names.size())) return col_names[j];
  return "x" + std::to_string(j + 1);
}

void LabeledDataset::validate(Task task) const {
  if (n() < 2) throw BadConfig("need at least 2 observations");
  if (p() < 1) throw BadConfig("need at least 1 predictor");
  if (y.size() != n()) throw DimensionMismatch("X and y row counts differ");
  if (!X.allFinite() || !y.allFinite()) throw NonFinite("dataset contains NaN or Inf");
  if (task == Task::logistic) {
    bool seen0 = false, seen1 = false;
    for (Index i = 0; i < y.size(); ++i) {
      if (y[i] == 0.0) seen0 = true;
      else if (y[i] == 1.0) seen1 = true;
      else throw BadConfig("logistic responses must be 0 or 1");
    }
    if (!seen0 || !seen1) throw SingleClass("logistic response has a single class");
  }
}

Index FittedModel::selected_count() const {
  Index count = 0;
  for (bool s : support) count += s ? 1 : 0;
  return count;
}

Vector FittedModel::predict_linear(const Matrix& X_raw) const {
  if (X_raw.cols() != beta_original.size())
    throw DimensionMismatch("prediction matrix has wrong column count");
  return (X_raw * beta_original).array() + intercept_original;
}

Vector FittedModel::predict_proba(const Matrix& X_raw) const {
  Vector eta = predict_linear(X_raw);
  return eta.unaryExpr([](double e) { return 1.0 / (1.0 + std::exp(-e)); });
}

std::vector<bool> support_of(const Vector& beta) {
  std::vector<bool> s(static_cast<std::size_t>(beta.size()));
  for (Index j = 0; j < beta.size(); ++j) s[static_cast<std::size_t>(j)] = beta[j] != 0.0;
  return s;
}

std::vector<std::size_t> FoldAssignment::in_fold(int fold) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == fold) idx.push_back(i);
  return idx;
}

std::vector<std::size_t> FoldAssignment::out_of_fold(int fold) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != fold) idx.push_back(i);
  return idx;
}

std::pair<LabeledDataset, StandardizationParams> standardize(const LabeledDataset& ds, Task task) {
  ds.validate(task);
  const Index n = ds.n(), p = ds.p();

  StandardizationParams params;
  params.col_mean.resize(p);
  params.col_scale.resize(p);

  LabeledDataset out = ds;
  for (Index j = 0; j < p; ++j) {
    const double mean = ds.X.col(j).mean();
    Vector centered = ds.X.col(j).array() - mean;
    const double var = centered.squaredNorm() / static_cast<double>(n);
    if (var == 0.0) throw ConstantColumn(j);
    const double scale = std::sqrt(var);
    params.col_mean[j] = mean;
    params.col_scale[j] = scale;
    out.X.col(j) = centered / scale;
  }

  if (task == Task::linear) {
    params.y_mean = ds.y.mean();
    out.y = ds.y.array() - params.y_mean;
  } else {
    params.y_mean = 0.0;
  }
  return {std::move(out), std::move(params)};
}

Matrix apply_standardization(const Matrix& X_raw, const StandardizationParams& params) {
  if (X_raw.cols() != params.col_mean.size())
    throw DimensionMismatch("matrix column count does not match standardization params");
  Matrix out = X_raw;
  for (Index j = 0; j < out.cols(); ++j)
    out.col(j) = (out.col(j).array() - params.col_mean[j]) / params.col_scale[j];
  return out;
}

FoldAssignment make_folds(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2 || static_cast<std::size_t>(k) > n)
    throw BadK("k must satisfy 2 <= k <= n (got k=" + std::to_string(k) +
               ", n=" + std::to_string(n) + ")");
  Rng rng(seed);
  const auto perm = rng.permutation(n);
  FoldAssignment fa;
  fa.fold_of.resize(n);
  fa.k = k;
  fa.seed = seed;
  for (std::size_t i = 0; i < n; ++i)
    fa.fold_of[perm[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  return fa;
}

TrainValSplit train_val_split(std::size_t n, double val_fraction, std::uint64_t seed) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0))
    throw DegenerateSplit("val_fraction must lie in (0, 1)");
  const auto n_val = static_cast<std::size_t>(
      std::max(1L, std::lround(val_fraction * static_cast<double>(n))));
  if (n_val >= n) throw DegenerateSplit("split would leave an empty training side");

  Rng rng(seed);
  auto perm = rng.permutation(n);
  TrainValSplit split;
  split.val.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_val));
  split.train.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_val), perm.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.train.begin(), split.train.end());
  return split;
}

void destandardize(FittedModel& model, const StandardizationParams& params) {
  if (model.beta.size() != params.col_scale.size())
    throw DimensionMismatch("model and standardization params disagree on p");
  model.beta_original = model.beta.cwiseQuotient(params.col_scale);
  model.intercept_original =
      params.y_mean + model.intercept - model.beta_original.dot(params.col_mean);
  model.support = support_of(model.beta);
}

LabeledDataset subset_rows(const LabeledDataset& ds, const std::vector<std::size_t>& rows) {
  LabeledDataset out;
  out.X.resize(static_cast<Index>(rows.size()), ds.p());
  out.y.resize(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.X.row(static_cast<Index>(i)) = ds.X.row(static_cast<Index>(rows[i]));
    out.y[static_cast<Index>(i)] = ds.y[static_cast<Index>(rows[i])];
  }
  out.truth_support = ds.truth_support;
  out.col_names = ds.col_names;
  return out;
}

}  // namespace nlasso
