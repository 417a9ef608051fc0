#pragma once

#include <vector>

#include "nlasso/types.hpp"

namespace nlasso {

/// Parameters of the single-layer network: effective coefficients are
/// beta = gamma * w and the effective penalty is lambda = l1 / gamma.
///
/// l1 is normally a fixed hyper-parameter. When l1_trainable is set it joins
/// the optimizer instead: its loss gradient is ||w||_1 >= 0, so it decays
/// from its initial value and the run traverses a continuous penalty path
/// whose best-validation snapshot picks the effective penalty.
struct NeuralParams {
  Vector w;
  double gamma = 1.0;
  double b0 = 0.0;  // logistic bias; unused for the linear task
  double l1 = 0.0;
  bool gamma_frozen = false;
  bool l1_trainable = false;

  Vector coefficients() const { return gamma * w; }
};

/// Per-coordinate subgradient statistic and which weights it allows to be
/// set exactly to zero (|stat_j| <= threshold, threshold = l1).
struct ZeroCheckReport {
  Vector stat;
  double threshold = 0.0;
  std::vector<bool> zeroed;
  double subgradient_bound = 1.0;
};

struct AdamState {
  Vector m;
  Vector v;
  long step_count = 0;
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState() = default;
  AdamState(Index n, double lr, double beta1, double beta2, double eps)
      : m(Vector::Zero(n)), v(Vector::Zero(n)), lr(lr), beta1(beta1), beta2(beta2), eps(eps) {}
};

/// Gradient over the trainable parameters, in the same layout the Adam state
/// uses: w first, then gamma (unless frozen), then b0 (logistic only), then
/// l1 (when trainable).
struct Gradient {
  Vector w;
  double gamma = 0.0;
  double b0 = 0.0;
  double l1 = 0.0;
};

Vector forward_linear(const Matrix& X, const NeuralParams& params);
double loss_linear(const Matrix& X, const Vector& y, const NeuralParams& params);
Gradient grad_linear(const Matrix& X, const Vector& y, const NeuralParams& params);

Vector forward_logistic(const Matrix& X, const NeuralParams& params);
double loss_logistic(const Matrix& X, const Vector& y, const NeuralParams& params);
Gradient grad_logistic(const Matrix& X, const Vector& y, const NeuralParams& params);

/// stat_j = (2 gamma / N) X_j^t (y - gamma X w*_j), w*_j = w with entry j
/// zeroed. Computed from X w with a rank-one column correction, O(Np) total.
ZeroCheckReport zero_condition_linear(const Matrix& X, const Vector& y,
                                      const NeuralParams& params);

/// stat_j = (gamma / N) X_j^t (y - sigma(gamma X w*_j + b0)).
ZeroCheckReport zero_condition_logistic(const Matrix& X, const Vector& y,
                                        const NeuralParams& params);

/// Set w_j to exact zero wherever the report allows it. When an Adam state is
/// given, the moments of zeroed coordinates are reset so stale momentum does
/// not immediately un-zero a weight.
void apply_zeroing(NeuralParams& params, const ZeroCheckReport& report,
                   AdamState* adam = nullptr);

/// Bias-corrected Adam update over (w, gamma unless frozen, b0 for logistic).
void adam_step(AdamState& state, NeuralParams& params, const Gradient& grad, Task task);

Index trainable_count(const NeuralParams& params, Task task);

}  // namespace nlasso
