#include "nlasso/neural.hpp"

#include <cmath>

namespace nlasso {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double log1pexp(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double sign_or_zero(double x) {
  if (x > 0.0) return 1.0;
  if (x < 0.0) return -1.0;
  return 0.0;  // minimum-norm subgradient at w_j = 0
}

void check_shapes(const Matrix& X, const Vector& y, const NeuralParams& params) {
  if (X.cols() != params.w.size())
    throw DimensionMismatch("X column count does not match w");
  if (X.rows() != y.size()) throw DimensionMismatch("X and y row counts differ");
}

}  // namespace

Index trainable_count(const NeuralParams& params, Task task) {
  Index n = params.w.size();
  if (!params.gamma_frozen) ++n;
  if (task == Task::logistic) ++n;
  if (params.l1_trainable) ++n;
  return n;
}

Vector forward_linear(const Matrix& X, const NeuralParams& params) {
  if (X.cols() != params.w.size())
    throw DimensionMismatch("X column count does not match w");
  return params.gamma * (X * params.w);
}

double loss_linear(const Matrix& X, const Vector& y, const NeuralParams& params) {
  check_shapes(X, y, params);
  const double n = static_cast<double>(X.rows());
  return (y - forward_linear(X, params)).squaredNorm() / n +
         params.l1 * params.w.lpNorm<1>();
}

Gradient grad_linear(const Matrix& X, const Vector& y, const NeuralParams& params) {
  check_shapes(X, y, params);
  const double n = static_cast<double>(X.rows());
  const Vector xw = X * params.w;
  const Vector err = y - params.gamma * xw;

  Gradient g;
  g.w = (-2.0 * params.gamma / n) * (X.transpose() * err);
  for (Index j = 0; j < g.w.size(); ++j)
    g.w[j] += params.l1 * sign_or_zero(params.w[j]);
  g.gamma = params.gamma_frozen ? 0.0 : (-2.0 / n) * xw.dot(err);
  g.b0 = 0.0;
  g.l1 = params.l1_trainable ? params.w.lpNorm<1>() : 0.0;
  return g;
}

Vector forward_logistic(const Matrix& X, const NeuralParams& params) {
  if (X.cols() != params.w.size())
    throw DimensionMismatch("X column count does not match w");
  Vector eta = params.gamma * (X * params.w);
  eta.array() += params.b0;
  return eta.unaryExpr([](double e) { return sigmoid(e); });
}

double loss_logistic(const Matrix& X, const Vector& y, const NeuralParams& params) {
  check_shapes(X, y, params);
  const double n = static_cast<double>(X.rows());
  Vector eta = params.gamma * (X * params.w);
  eta.array() += params.b0;
  double nll = 0.0;
  for (Index i = 0; i < eta.size(); ++i) nll += log1pexp(eta[i]) - y[i] * eta[i];
  return nll / n + params.l1 * params.w.lpNorm<1>();
}

Gradient grad_logistic(const Matrix& X, const Vector& y, const NeuralParams& params) {
  check_shapes(X, y, params);
  const double n = static_cast<double>(X.rows());
  const Vector xw = X * params.w;
  Vector eta = params.gamma * xw;
  eta.array() += params.b0;
  Vector diff = eta.unaryExpr([](double e) { return sigmoid(e); }) - y;

  Gradient g;
  g.w = (params.gamma / n) * (X.transpose() * diff);
  for (Index j = 0; j < g.w.size(); ++j)
    g.w[j] += params.l1 * sign_or_zero(params.w[j]);
  g.gamma = params.gamma_frozen ? 0.0 : xw.dot(diff) / n;
  g.b0 = diff.sum() / n;
  g.l1 = params.l1_trainable ? params.w.lpNorm<1>() : 0.0;
  return g;
}

ZeroCheckReport zero_condition_linear(const Matrix& X, const Vector& y,
                                      const NeuralParams& params) {
  check_shapes(X, y, params);
  const Index p = X.cols();
  const double n = static_cast<double>(X.rows());
  const Vector xw = X * params.w;

  ZeroCheckReport report;
  report.stat.resize(p);
  report.threshold = params.l1;
  report.zeroed.resize(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) {
    // X w*_j = X w - X_j w_j
    const Vector partial = y - params.gamma * (xw - X.col(j) * params.w[j]);
    report.stat[j] = (2.0 * params.gamma / n) * X.col(j).dot(partial);
    report.zeroed[static_cast<std::size_t>(j)] = std::abs(report.stat[j]) <= params.l1;
  }
  return report;
}

ZeroCheckReport zero_condition_logistic(const Matrix& X, const Vector& y,
                                        const NeuralParams& params) {
  check_shapes(X, y, params);
  const Index p = X.cols();
  const double n = static_cast<double>(X.rows());
  const Vector xw = X * params.w;

  ZeroCheckReport report;
  report.stat.resize(p);
  report.threshold = params.l1;
  report.zeroed.resize(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) {
    Vector eta = params.gamma * (xw - X.col(j) * params.w[j]);
    eta.array() += params.b0;
    const Vector diff = y - eta.unaryExpr([](double e) { return sigmoid(e); });
    report.stat[j] = (params.gamma / n) * X.col(j).dot(diff);
    report.zeroed[static_cast<std::size_t>(j)] = std::abs(report.stat[j]) <= params.l1;
  }
  return report;
}

void apply_zeroing(NeuralParams& params, const ZeroCheckReport& report, AdamState* adam) {
  if (static_cast<Index>(report.zeroed.size()) != params.w.size())
    throw DimensionMismatch("report and params disagree on p");
  for (Index j = 0; j < params.w.size(); ++j) {
    if (!report.zeroed[static_cast<std::size_t>(j)]) continue;
    params.w[j] = 0.0;
    if (adam && j < adam->m.size()) {
      adam->m[j] = 0.0;
      adam->v[j] = 0.0;
    }
  }
}

void adam_step(AdamState& state, NeuralParams& params, const Gradient& grad, Task task) {
  const Index p = params.w.size();
  const Index n = trainable_count(params, task);
  if (state.m.size() != n || grad.w.size() != p)
    throw DimensionMismatch("Adam state does not match the trainable layout");

  state.step_count += 1;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));

  auto update = [&](Index slot, double g, double& value) {
    state.m[slot] = state.beta1 * state.m[slot] + (1.0 - state.beta1) * g;
    state.v[slot] = state.beta2 * state.v[slot] + (1.0 - state.beta2) * g * g;
    const double mhat = state.m[slot] / c1;
    const double vhat = state.v[slot] / c2;
    value -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
  };

  for (Index j = 0; j < p; ++j) update(j, grad.w[j], params.w[j]);
  Index slot = p;
  if (!params.gamma_frozen) update(slot++, grad.gamma, params.gamma);
  if (task == Task::logistic) update(slot++, grad.b0, params.b0);
  if (params.l1_trainable && params.l1 > 0.0) {
    // The penalty lives on the log scale so it moves multiplicatively; a
    // fixed-size step then sweeps penalty magnitudes at the same resolution
    // the log-spaced grid uses. Chain rule: d/d(log l1) = l1 * d/d(l1).
    // Its parameter group runs at a fraction of the weight step so the
    // weights stay adapted to the current penalty as the path descends.
    const double saved_lr = state.lr;
    state.lr *= 0.3;
    double log_l1 = std::log(params.l1);
    update(slot++, params.l1 * grad.l1, log_l1);
    params.l1 = std::exp(log_l1);
    state.lr = saved_lr;
  }
}

}  // namespace nlasso
