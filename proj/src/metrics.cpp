#include "nlasso/metrics.hpp"

#include <cmath>

namespace nlasso {

namespace {

// Regularized incomplete beta function I_x(a, b), continued fraction
// evaluated with the modified Lentz method.
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

const std::vector<bool>& require_truth(const std::vector<bool>& truth,
                                       const FittedModel& model) {
  if (truth.size() != model.support.size())
    throw DimensionMismatch("truth support length does not match the model");
  return truth;
}

}  // namespace

double test_mse(const FittedModel& model, const LabeledDataset& test) {
  const Vector pred = model.predict_linear(test.X);
  return (test.y - pred).squaredNorm() / static_cast<double>(test.y.size());
}

double test_accuracy(const FittedModel& model, const LabeledDataset& test) {
  const Vector prob = model.predict_proba(test.X);
  Index hits = 0;
  for (Index i = 0; i < prob.size(); ++i) {
    const double label = prob[i] >= 0.5 ? 1.0 : 0.0;
    if (label == test.y[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(prob.size());
}

double support_precision(const FittedModel& model, const std::vector<bool>& truth_support) {
  require_truth(truth_support, model);
  Index noise = 0, zeroed = 0;
  for (std::size_t j = 0; j < truth_support.size(); ++j) {
    if (truth_support[j]) continue;
    ++noise;
    if (!model.support[j]) ++zeroed;
  }
  if (noise == 0) throw UndefinedMetric("no truly non-significant variable exists");
  return static_cast<double>(zeroed) / static_cast<double>(noise);
}

double support_recall(const FittedModel& model, const std::vector<bool>& truth_support) {
  require_truth(truth_support, model);
  Index significant = 0, found = 0;
  for (std::size_t j = 0; j < truth_support.size(); ++j) {
    if (!truth_support[j]) continue;
    ++significant;
    if (model.support[j]) ++found;
  }
  if (significant == 0) throw UndefinedMetric("true support is empty");
  return static_cast<double>(found) / static_cast<double>(significant);
}

double selected_fraction(const FittedModel& model) {
  if (model.support.empty()) return 0.0;
  return static_cast<double>(model.selected_count()) /
         static_cast<double>(model.support.size());
}

TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw LengthMismatch("paired vectors differ in length");
  const std::size_t r = a.size();
  if (r < 2) throw LengthMismatch("need at least 2 pairs");

  double mean = 0.0;
  for (std::size_t i = 0; i < r; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(r);
  double ss = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    const double d = a[i] - b[i] - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / static_cast<double>(r - 1));
  if (sd == 0.0) {
    if (mean == 0.0) return {0.0, 1.0};  // identical vectors
    throw ZeroVariance("paired differences are a nonzero constant");
  }

  const double nu = static_cast<double>(r - 1);
  const double t = mean / (sd / std::sqrt(static_cast<double>(r)));
  const double p = reg_inc_beta(nu / 2.0, 0.5, nu / (nu + t * t));
  return {t, p};
}

RunMetrics evaluate(const FittedModel& model, const LabeledDataset& test) {
  RunMetrics m;
  if (model.task == Task::linear)
    m.mse = test_mse(model, test);
  else
    m.acc = test_accuracy(model, test);
  if (test.truth_support) {
    m.precision = support_precision(model, *test.truth_support);
    m.recall = support_recall(model, *test.truth_support);
  }
  m.selected_fraction = selected_fraction(model);
  return m;
}

}  // namespace nlasso
