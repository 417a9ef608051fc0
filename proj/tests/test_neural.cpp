#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlasso/classic_lasso.hpp"
#include "nlasso/model_core.hpp"
#include "nlasso/neural.hpp"
#include "nlasso/rng.hpp"
#include "test_util.hpp"

using namespace nlasso;

namespace {

NeuralParams random_params(Rng& rng, Index p, double l1, bool away_from_zero) {
  NeuralParams params;
  params.w.resize(p);
  for (Index j = 0; j < p; ++j) {
    double v = rng.uniform(-2.0, 2.0);
    if (away_from_zero && std::abs(v) < 1e-2) v = v < 0 ? v - 0.1 : v + 0.1;
    params.w[j] = v;
  }
  params.gamma = rng.uniform(0.3, 2.5);
  params.b0 = rng.uniform(-1.0, 1.0);
  params.l1 = l1;
  return params;
}

// Cross-entropy in the two-branch probability form,
//   -(1/N) sum [y log sigma(eta) + (1-y) log(1 - sigma(eta))],
// with the log-sigmoids evaluated accurately (log sigma(eta) = -log(1+e^-eta))
// so the comparison probes the algebraic identity rather than rounding noise.
double direct_logistic_loss(const Matrix& X, const Vector& y, const NeuralParams& params) {
  auto log1pexp = [](double v) {
    return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
  };
  double total = 0.0;
  for (Index i = 0; i < X.rows(); ++i) {
    double eta = params.b0;
    for (Index j = 0; j < X.cols(); ++j) eta += params.gamma * X(i, j) * params.w[j];
    total += y[i] * (-log1pexp(-eta)) + (1.0 - y[i]) * (-log1pexp(eta));
  }
  double pen = 0.0;
  for (Index j = 0; j < params.w.size(); ++j) pen += std::abs(params.w[j]);
  return -total / static_cast<double>(X.rows()) + params.l1 * pen;
}

template <typename LossFn>
void finite_difference_check(const Matrix& X, const Vector& y, NeuralParams params,
                             Task task, LossFn loss_fn) {
  const auto grad = task == Task::linear ? grad_linear(X, y, params)
                                         : grad_logistic(X, y, params);
  const double h = 1e-6;
  auto check_one = [&](double& slot, double analytic) {
    const double saved = slot;
    slot = saved + h;
    const double up = loss_fn(params);
    slot = saved - h;
    const double down = loss_fn(params);
    slot = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double scale = std::max({1.0, std::abs(analytic), std::abs(numeric)});
    CHECK(std::abs(analytic - numeric) / scale < 1e-5);
  };
  for (Index j = 0; j < params.w.size(); ++j) check_one(params.w[j], grad.w[j]);
  check_one(params.gamma, grad.gamma);
  if (task == Task::logistic) check_one(params.b0, grad.b0);
}

}  // namespace

TEST_CASE("forward_linear basics and naive-loop oracle") {
  Matrix X(1, 1);
  X << 2.0;
  NeuralParams params;
  params.w = Vector::Constant(1, 3.0);
  params.gamma = 1.0;
  CHECK(forward_linear(X, params)[0] == doctest::Approx(6.0));

  params.w = Vector::Zero(1);
  CHECK(forward_linear(X, params)[0] == 0.0);

  Rng rng(31);
  Matrix R(20, 7);
  for (Index i = 0; i < 20; ++i)
    for (Index j = 0; j < 7; ++j) R(i, j) = rng.normal();
  NeuralParams rp = random_params(rng, 7, 0.1, false);
  const Vector fast = forward_linear(R, rp);
  for (Index i = 0; i < 20; ++i) {
    double acc = 0.0;
    for (Index j = 0; j < 7; ++j) acc += R(i, j) * rp.w[j];
    CHECK(std::abs(fast[i] - rp.gamma * acc) < 1e-12);
  }

  Matrix bad(3, 2);
  CHECK_THROWS_AS(forward_linear(bad, rp), DimensionMismatch);
}

TEST_CASE("loss_linear: null weights and perfect fit") {
  Matrix X(2, 1);
  X << -1.0, 1.0;
  Vector y(2);
  y << -1.0, 1.0;

  NeuralParams params;
  params.w = Vector::Zero(1);
  params.l1 = 0.0;
  CHECK(loss_linear(X, y, params) == doctest::Approx(y.squaredNorm() / 2.0));

  params.w = Vector::Constant(1, 1.0);
  params.gamma = 1.0;
  CHECK(loss_linear(X, y, params) == doctest::Approx(0.0));
}

TEST_CASE("loss equivalence: network loss equals the penalized objective") {
  Rng rng(32);
  LabeledDataset std_ds = testutil::random_standardized(rng, 30, 6, Task::linear);
  for (int trial = 0; trial < 100; ++trial) {
    NeuralParams params = random_params(rng, 6, rng.uniform(0.0, 0.7), false);
    const double net = loss_linear(std_ds.X, std_ds.y, params);
    const Vector beta = params.gamma * params.w;
    const double lambda = params.l1 / params.gamma;
    const double classic = objective_linear(std_ds, beta, lambda);
    CHECK(std::abs(net - classic) < 1e-12);
  }
}

TEST_CASE("loss equivalence: stable logistic form equals the direct form") {
  Rng rng(33);
  LabeledDataset std_ds = testutil::random_standardized(rng, 40, 5, Task::logistic);
  for (int trial = 0; trial < 100; ++trial) {
    NeuralParams params = random_params(rng, 5, rng.uniform(0.0, 0.5), false);
    const double stable = loss_logistic(std_ds.X, std_ds.y, params);
    const double direct = direct_logistic_loss(std_ds.X, std_ds.y, params);
    CHECK(std::abs(stable - direct) < 1e-10);
  }
}

TEST_CASE("loss_logistic: sigma(0) gives log 2, huge margins stay finite") {
  Rng rng(34);
  LabeledDataset std_ds = testutil::random_standardized(rng, 25, 3, Task::logistic);
  NeuralParams params;
  params.w = Vector::Zero(3);
  params.gamma = 1.0;
  params.b0 = 0.0;
  params.l1 = 0.0;
  const Vector probs = forward_logistic(std_ds.X, params);
  for (Index i = 0; i < probs.size(); ++i) CHECK(probs[i] == doctest::Approx(0.5));
  CHECK(loss_logistic(std_ds.X, std_ds.y, params) == doctest::Approx(std::log(2.0)));

  params.b0 = 1e4;
  CHECK(std::isfinite(loss_logistic(std_ds.X, std_ds.y, params)));
  params.b0 = -1e4;
  CHECK(std::isfinite(loss_logistic(std_ds.X, std_ds.y, params)));
}

TEST_CASE("gradients match central finite differences") {
  Rng rng(35);
  LabeledDataset lin = testutil::random_standardized(rng, 30, 5, Task::linear);
  LabeledDataset log = testutil::random_standardized(rng, 40, 4, Task::logistic);
  for (int trial = 0; trial < 20; ++trial) {
    NeuralParams pl = random_params(rng, 5, rng.uniform(0.0, 0.5), true);
    finite_difference_check(lin.X, lin.y, pl, Task::linear,
                            [&](const NeuralParams& q) { return loss_linear(lin.X, lin.y, q); });
    NeuralParams pg = random_params(rng, 4, rng.uniform(0.0, 0.5), true);
    finite_difference_check(log.X, log.y, pg, Task::logistic,
                            [&](const NeuralParams& q) { return loss_logistic(log.X, log.y, q); });
  }
}

TEST_CASE("grad_linear closed forms at special points") {
  Rng rng(36);
  LabeledDataset ds = testutil::random_standardized(rng, 20, 4, Task::linear);

  NeuralParams params;
  params.w = Vector::Zero(4);
  params.gamma = 1.3;
  params.l1 = 0.0;
  auto g = grad_linear(ds.X, ds.y, params);
  const Vector expect = -2.0 * params.gamma / 20.0 * (ds.X.transpose() * ds.y);
  CHECK((g.w - expect).cwiseAbs().maxCoeff() < 1e-14);

  params = random_params(rng, 4, 0.0, false);
  params.gamma = 0.0;
  g = grad_linear(ds.X, ds.y, params);
  CHECK(g.w.cwiseAbs().maxCoeff() == 0.0);
  const Vector xw = ds.X * params.w;
  CHECK(g.gamma == doctest::Approx(-2.0 / 20.0 * xw.dot(ds.y)));
}

TEST_CASE("zero_condition_linear: orthogonal column and zero threshold") {
  // orthogonal design: statistic vanishes for a column orthogonal to y
  Matrix X(4, 2);
  X << 1, 0, -1, 0, 0, 1, 0, -1;
  Vector y(4);
  y << 0, 0, 3, -3;  // orthogonal to column 0

  NeuralParams params;
  params.w = Vector::Zero(2);
  params.gamma = 1.0;
  params.l1 = 0.5;
  auto report = zero_condition_linear(X, y, params);
  CHECK(report.stat[0] == doctest::Approx(0.0));
  CHECK(report.zeroed[0]);
  CHECK(report.subgradient_bound == 1.0);
  CHECK(report.threshold == 0.5);

  params.l1 = 0.0;
  report = zero_condition_linear(X, y, params);
  CHECK(report.zeroed[0]);        // stat exactly 0
  CHECK_FALSE(report.zeroed[1]);  // stat = (2/4) * 6 != 0
}

TEST_CASE("zero_condition_logistic: gamma 0 and the sigma(0) anchor") {
  Rng rng(37);
  LabeledDataset ds = testutil::random_standardized(rng, 30, 4, Task::logistic);

  NeuralParams params;
  params.w = Vector::Zero(4);
  params.gamma = 0.0;
  params.l1 = 0.1;
  auto report = zero_condition_logistic(ds.X, ds.y, params);
  for (Index j = 0; j < 4; ++j) {
    CHECK(report.stat[j] == 0.0);
    CHECK(report.zeroed[j]);
  }

  params.gamma = 1.0;
  params.b0 = 0.0;
  report = zero_condition_logistic(ds.X, ds.y, params);
  for (Index j = 0; j < 4; ++j) {
    const double expect =
        ds.X.col(j).dot(ds.y.array().matrix() - Vector::Constant(30, 0.5)) / 30.0;
    CHECK(report.stat[j] == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("zero conditions agree with the CD solutions (linear)") {
  Rng rng(38);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 30 + static_cast<Index>(rng.uniform_below(40));
    const Index p = 3 + static_cast<Index>(rng.uniform_below(8));
    LabeledDataset std_ds = testutil::random_standardized(rng, n, p, Task::linear);
    const double lambda = lambda_max(std_ds, Task::linear) * rng.uniform(0.1, 0.7);
    auto model = cd_linear(std_ds, lambda, 1e-10);

    NeuralParams params;
    params.w = model.beta;
    params.gamma = 1.0;
    params.l1 = lambda;
    auto report = zero_condition_linear(std_ds.X, std_ds.y, params);
    for (Index j = 0; j < p; ++j) {
      if (std::abs(std::abs(report.stat[j]) - lambda) <= 1e-6) continue;  // boundary
      CHECK(report.zeroed[j] == (model.beta[j] == 0.0));
    }
  }
}

TEST_CASE("zero conditions agree with the CD solutions (logistic)") {
  Rng rng(39);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 50 + static_cast<Index>(rng.uniform_below(50));
    const Index p = 3 + static_cast<Index>(rng.uniform_below(6));
    LabeledDataset std_ds = testutil::random_standardized(rng, n, p, Task::logistic);
    const double lambda = lambda_max(std_ds, Task::logistic) * rng.uniform(0.15, 0.7);
    auto model = cd_logistic(std_ds, lambda, 1e-10);

    NeuralParams params;
    params.w = model.beta;
    params.gamma = 1.0;
    params.b0 = model.intercept;
    params.l1 = lambda;
    auto report = zero_condition_logistic(std_ds.X, std_ds.y, params);
    for (Index j = 0; j < p; ++j) {
      if (std::abs(std::abs(report.stat[j]) - lambda) <= 1e-6) continue;  // boundary
      CHECK(report.zeroed[j] == (model.beta[j] == 0.0));
    }
  }
}

TEST_CASE("apply_zeroing: exact zeros, idempotence, moment reset") {
  Rng rng(40);
  NeuralParams params = random_params(rng, 5, 0.2, false);
  AdamState adam(trainable_count(params, Task::linear), 0.01, 0.9, 0.999, 1e-8);
  adam.m.setConstant(0.5);
  adam.v.setConstant(0.25);

  ZeroCheckReport report;
  report.stat = Vector::Zero(5);
  report.threshold = params.l1;
  report.zeroed = {true, false, true, false, true};

  NeuralParams before = params;
  apply_zeroing(params, report, &adam);
  for (Index j = 0; j < 5; ++j) {
    if (report.zeroed[static_cast<std::size_t>(j)]) {
      CHECK(params.w[j] == 0.0);
      CHECK(adam.m[j] == 0.0);
      CHECK(adam.v[j] == 0.0);
    } else {
      CHECK(params.w[j] == before.w[j]);
      CHECK(adam.m[j] == 0.5);
    }
  }

  NeuralParams once = params;
  apply_zeroing(params, report, &adam);
  CHECK((params.w - once.w).cwiseAbs().maxCoeff() == 0.0);

  report.zeroed = {false, false, false, false, false};
  NeuralParams untouched = params;
  apply_zeroing(params, report);
  CHECK((params.w - untouched.w).cwiseAbs().maxCoeff() == 0.0);

  report.zeroed = {true, true, true, true, true};
  apply_zeroing(params, report);
  CHECK(params.w.isZero(0.0));
}

TEST_CASE("adam_step: zero gradient, first-step identity, saturation") {
  NeuralParams params;
  params.w = Vector::Constant(1, 1.0);
  params.gamma_frozen = true;

  AdamState adam(1, 0.1, 0.9, 0.999, 1e-8);
  Gradient zero;
  zero.w = Vector::Zero(1);
  adam_step(adam, params, zero, Task::linear);
  CHECK(params.w[0] == 1.0);
  CHECK(adam.step_count == 1);

  // first step with g = 1: update is -lr * g/|g| up to eps
  params.w[0] = 1.0;
  adam = AdamState(1, 0.1, 0.9, 0.999, 1e-8);
  Gradient one;
  one.w = Vector::Constant(1, 1.0);
  adam_step(adam, params, one, Task::linear);
  CHECK(params.w[0] == doctest::Approx(0.9).epsilon(1e-7));

  // constant gradient: monotone motion with per-step size approaching lr
  params.w[0] = 0.0;
  adam = AdamState(1, 0.1, 0.9, 0.999, 1e-8);
  double prev = params.w[0];
  double last_step = 0.0;
  for (int t = 0; t < 400; ++t) {
    adam_step(adam, params, one, Task::linear);
    CHECK(params.w[0] < prev);
    last_step = prev - params.w[0];
    prev = params.w[0];
  }
  CHECK(last_step == doctest::Approx(0.1).epsilon(1e-3));

  AdamState wrong(3, 0.1, 0.9, 0.999, 1e-8);
  CHECK_THROWS_AS(adam_step(wrong, params, one, Task::linear), DimensionMismatch);
}
