#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlasso/errors.hpp"

namespace nlasso {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class Task { linear, logistic };

enum class Method { statistical, standard_neural, restricted_neural, voting_neural };

const char* to_string(Task task);
const char* to_string(Method method);
Task task_from_string(const std::string& s);
Method method_from_string(const std::string& s);

/// Design matrix X (N x p), response y, and the true support when known
/// (synthetic data). Column names are optional; x1..xp are used when empty.
struct LabeledDataset {
  Matrix X;
  Vector y;
  std::optional<std::vector<bool>> truth_support;
  std::vector<std::string> col_names;

  Index n() const { return X.rows(); }
  Index p() const { return X.cols(); }
  std::string col_name(Index j) const;

  // N >= 2, p >= 1, everything finite; logistic responses in {0,1} with both
  // classes present.
  void validate(Task task) const;
};

/// Per-column centering/scaling and the removed response mean. After
/// applying, each column has mean 0 and (1/N) * sum x^2 = 1.
struct StandardizationParams {
  Vector col_mean;
  Vector col_scale;  // population std dev, strictly positive
  double y_mean = 0.0;
};

struct FoldAssignment {
  std::vector<int> fold_of;  // length N, values in [0, k)
  int k = 0;
  std::uint64_t seed = 0;

  std::vector<std::size_t> in_fold(int fold) const;
  std::vector<std::size_t> out_of_fold(int fold) const;
};

/// A fitted sparse model. `beta`/`intercept` live on the standardized scale;
/// `beta_original`/`intercept_original` on the input scale. support_j is
/// exactly (beta_j != 0).
struct FittedModel {
  Task task = Task::linear;
  Method method = Method::statistical;
  Vector beta;
  double intercept = 0.0;
  std::vector<bool> support;
  double lambda = 0.0;
  Vector beta_original;
  double intercept_original = 0.0;

  Index p() const { return beta.size(); }
  Index selected_count() const;

  // Predictions on raw (unstandardized) rows.
  Vector predict_linear(const Matrix& X_raw) const;
  Vector predict_proba(const Matrix& X_raw) const;
};

std::vector<bool> support_of(const Vector& beta);

}  // namespace nlasso
