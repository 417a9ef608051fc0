#pragma once

#include <optional>
#include <vector>

#include "nlasso/types.hpp"

namespace nlasso {

struct RunMetrics {
  std::optional<double> mse;        // linear task
  std::optional<double> acc;        // logistic task
  std::optional<double> precision;  // needs truth_support
  std::optional<double> recall;     // needs truth_support
  double selected_fraction = 0.0;
};

double test_mse(const FittedModel& model, const LabeledDataset& test);
double test_accuracy(const FittedModel& model, const LabeledDataset& test);

/// Fraction of truly non-significant variables the model sets to zero (a
/// true-negative rate; this benchmark family's "precision", not TP/(TP+FP)).
double support_precision(const FittedModel& model, const std::vector<bool>& truth_support);

/// Fraction of truly significant variables with a nonzero coefficient.
double support_recall(const FittedModel& model, const std::vector<bool>& truth_support);

double selected_fraction(const FittedModel& model);

struct TTestResult {
  double t = 0.0;
  double p_value = 1.0;
};

/// Two-sided paired Student t test with R-1 degrees of freedom; the p-value
/// comes from the regularized incomplete beta function. All-zero differences
/// give (t=0, p=1); a nonzero constant difference has no variance to test
/// against and raises ZeroVariance.
TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

RunMetrics evaluate(const FittedModel& model, const LabeledDataset& test);

}  // namespace nlasso
