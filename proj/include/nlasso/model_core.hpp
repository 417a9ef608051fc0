#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nlasso/types.hpp"

namespace nlasso {

/// Center each column and scale it so (1/N) * sum x^2 = 1. For the linear
/// task the response is centered as well; logistic responses are left alone
/// and handled by an unpenalized intercept.
std::pair<LabeledDataset, StandardizationParams> standardize(const LabeledDataset& ds, Task task);

/// (X_raw - col_mean) / col_scale, e.g. to map validation rows into the
/// space of a model fitted on standardized training data.
Matrix apply_standardization(const Matrix& X_raw, const StandardizationParams& params);

/// Seeded permutation dealt round-robin into k folds; fold sizes differ by
/// at most one and the assignment is a pure function of (n, k, seed).
FoldAssignment make_folds(std::size_t n, int k, std::uint64_t seed);

struct TrainValSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
};

/// Disjoint covering split with |val| = max(1, round(val_fraction * n)),
/// rounding half away from zero. Deterministic per seed.
TrainValSplit train_val_split(std::size_t n, double val_fraction, std::uint64_t seed);

/// Fill beta_original / intercept_original from the standardized fields:
/// beta_original_j = beta_j / col_scale_j and the intercept absorbs the
/// column means (plus y_mean for the linear task).
void destandardize(FittedModel& model, const StandardizationParams& params);

LabeledDataset subset_rows(const LabeledDataset& ds, const std::vector<std::size_t>& rows);

}  // namespace nlasso
