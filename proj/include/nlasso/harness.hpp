#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nlasso/datagen.hpp"
#include "nlasso/training.hpp"
#include "nlasso/types.hpp"

namespace nlasso {

enum class ExperimentKind { synthetic_linear, real_linear, real_logistic };

const char* to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& s);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::synthetic_linear;
  int repetitions = 100;
  int k = 5;
  std::vector<Method> methods = {Method::statistical, Method::standard_neural,
                                 Method::restricted_neural, Method::voting_neural};
  SyntheticConfig synthetic;
  std::string data_path;
  std::string target_column;
  int train_size = 0;
  int test_size = 0;
  int grid_count = 100;
  double grid_ratio = 1e-3;
  TrainConfig train_cfg;
  std::uint64_t base_seed = 0;
  std::string output_path;  // empty: render to stdout
  int threads = 0;          // 0: hardware concurrency

  Task task() const { return kind == ExperimentKind::real_logistic ? Task::logistic : Task::linear; }

  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs);

  /// Overlay key=value pairs (e.g. command-line flags) onto this config.
  void apply(const std::vector<std::pair<std::string, std::string>>& pairs);

  std::string echo() const;  // canonical key=value rendering
};

struct ReportRow {
  Method method;
  std::string metric;
  double mean = 0.0;
  double sd = 0.0;
  double p_value = std::numeric_limits<double>::quiet_NaN();  // vs statistical
  std::string star;  // "", "*", or "**"
};

struct ReportTable {
  std::vector<ReportRow> rows;
  std::string config_echo;
  std::uint64_t base_seed = 0;
  double wall_seconds = 0.0;  // diagnostics only; never rendered into reports
  int failed_repetitions = 0;
  std::vector<std::string> failure_log;  // "rep,seed,method,error" lines
};

enum class ReportFormat { csv, markdown };

/// Repeated validation: per repetition, draw data (or a seeded train/test
/// partition of the real dataset), fit every requested method on identical
/// training data / folds / penalty grid, evaluate on the identical test set,
/// then aggregate mean/SD and paired t-tests against the statistical lasso.
/// Repetition failures are logged and skipped; more than 10% failing aborts.
ReportTable run_experiment(const ExperimentConfig& cfg);

/// Strict numeric CSV with a header row; the target column may sit anywhere.
LabeledDataset load_csv(const std::string& path, const std::string& target_column, Task task);

void save_csv(const LabeledDataset& ds, const std::string& path,
              const std::string& target_name = "y");

void write_report(const ReportTable& table, std::ostream& out, ReportFormat format);
void write_report(const ReportTable& table, const std::string& path, ReportFormat format);

}  // namespace nlasso
