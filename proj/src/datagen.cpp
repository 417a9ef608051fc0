#include "nlasso/datagen.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "nlasso/rng.hpp"

namespace nlasso {

Matrix ar1_covariance(int p, double rho) {
  if (!(std::abs(rho) < 1.0)) throw BadConfig("rho must satisfy |rho| < 1");
  if (p < 1) throw BadConfig("p must be >= 1");
  Matrix sigma(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      sigma(i, j) = std::pow(rho, std::abs(i - j));
  return sigma;
}

namespace {

// Rows are filled one observation at a time (normals drawn row-major), then
// noise, so the draw order is part of the format and reproducible.
Matrix gaussian_rows(Rng& rng, int n, int p, const Matrix& chol_lower) {
  Matrix X(n, p);
  Vector z(p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) z[j] = rng.normal();
    X.row(i) = (chol_lower * z).transpose();
  }
  return X;
}

LabeledDataset assemble(Rng& rng, const SyntheticConfig& cfg, int n, const Matrix& chol,
                        const Vector& beta) {
  LabeledDataset ds;
  ds.X = gaussian_rows(rng, n, cfg.p, chol);
  ds.y.resize(n);
  const Vector eta = ds.X * beta;
  if (cfg.logistic_response) {
    for (int i = 0; i < n; ++i) {
      const double prob = 1.0 / (1.0 + std::exp(-eta[i]));
      ds.y[i] = rng.next_double() < prob ? 1.0 : 0.0;
    }
  } else {
    for (int i = 0; i < n; ++i) ds.y[i] = eta[i] + cfg.noise_std * rng.normal();
  }
  return ds;
}

}  // namespace

std::pair<LabeledDataset, LabeledDataset> simulate(const SyntheticConfig& cfg) {
  if (cfg.p < static_cast<int>(cfg.beta_pattern.size()))
    throw BadConfig("p is smaller than the coefficient pattern");
  if (cfg.n_train < 2 || cfg.n_test < 1) throw BadConfig("degenerate sample sizes");
  if (cfg.noise_std < 0.0) throw BadConfig("noise_std must be >= 0");

  const Matrix sigma = ar1_covariance(cfg.p, cfg.rho);
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) throw BadConfig("covariance is not positive definite");
  const Matrix chol = llt.matrixL();

  Vector beta = Vector::Zero(cfg.p);
  for (std::size_t j = 0; j < cfg.beta_pattern.size(); ++j)
    beta[static_cast<Index>(j)] = cfg.beta_pattern[j];

  Rng rng(cfg.seed);
  LabeledDataset train = assemble(rng, cfg, cfg.n_train, chol, beta);
  LabeledDataset test = assemble(rng, cfg, cfg.n_test, chol, beta);

  std::vector<bool> truth(static_cast<std::size_t>(cfg.p));
  for (int j = 0; j < cfg.p; ++j) truth[static_cast<std::size_t>(j)] = beta[j] != 0.0;

  if (cfg.permute_columns) {
    const auto perm = rng.permutation(static_cast<std::size_t>(cfg.p));
    Matrix train_x(train.X.rows(), cfg.p), test_x(test.X.rows(), cfg.p);
    std::vector<bool> truth_perm(truth.size());
    // perm[j] = source column placed at position j
    for (int j = 0; j < cfg.p; ++j) {
      const auto src = static_cast<Index>(perm[static_cast<std::size_t>(j)]);
      train_x.col(j) = train.X.col(src);
      test_x.col(j) = test.X.col(src);
      truth_perm[static_cast<std::size_t>(j)] = truth[perm[static_cast<std::size_t>(j)]];
    }
    train.X = std::move(train_x);
    test.X = std::move(test_x);
    truth = std::move(truth_perm);
  }

  train.truth_support = truth;
  test.truth_support = truth;
  return {std::move(train), std::move(test)};
}

}  // namespace nlasso
