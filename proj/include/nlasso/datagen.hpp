#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nlasso/types.hpp"

namespace nlasso {

struct SyntheticConfig {
  int p = 20;
  int n_train = 50;
  int n_test = 1000;
  double rho = 0.5;
  double noise_std = 1.0;
  std::vector<double> beta_pattern = {1.0, 2.0, 3.0, 4.0};
  bool permute_columns = true;
  // Extension beyond the benchmark design: Bernoulli(sigmoid(X beta))
  // responses for exercising the logistic pipeline on synthetic data.
  bool logistic_response = false;
  std::uint64_t seed = 0;
};

/// AR(1) covariance, Sigma_ij = rho^|i-j|.
Matrix ar1_covariance(int p, double rho);

/// Rows ~ N(0, Sigma) via the Cholesky factor, y = X beta + eps with
/// eps ~ N(0, noise_std^2); one seeded column permutation is shared by the
/// train and test matrices and the truth_support vector.
std::pair<LabeledDataset, LabeledDataset> simulate(const SyntheticConfig& cfg);

}  // namespace nlasso
