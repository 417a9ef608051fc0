#include "nlasso/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "nlasso/classic_lasso.hpp"
#include "nlasso/metrics.hpp"
#include "nlasso/model_core.hpp"
#include "nlasso/rng.hpp"

namespace nlasso {

namespace {

constexpr std::uint64_t kFoldStream = 0x666f6c64;   // fold assignment sub-seed
constexpr std::uint64_t kSplitStream = 0x73706c69;  // train/val split sub-seed

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_echo(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string format_fixed(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

double parse_double(const std::string& s, const std::string& key) {
  double v = 0.0;
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  const auto result = std::from_chars(begin, end, v);
  if (result.ec != std::errc() || result.ptr != end)
    throw BadConfig("invalid numeric value for '" + key + "': " + s);
  return v;
}

long parse_long(const std::string& s, const std::string& key) {
  long v = 0;
  const auto result = std::from_chars(s.data(), s.data() + s.size(), v);
  if (result.ec != std::errc() || result.ptr != s.data() + s.size())
    throw BadConfig("invalid integer value for '" + key + "': " + s);
  return v;
}

bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "on" || s == "true" || s == "1") return true;
  if (s == "off" || s == "false" || s == "0") return false;
  throw BadConfig("invalid boolean value for '" + key + "': " + s);
}

std::vector<Method> parse_methods(const std::string& csv) {
  std::vector<Method> methods;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    methods.push_back(method_from_string(item));
  }
  if (methods.empty()) throw BadConfig("methods list is empty");
  return methods;
}

struct RepResult {
  // One slot per requested method; empty optional means the method failed.
  std::vector<std::optional<RunMetrics>> metrics;
  std::vector<std::string> errors;  // parallel to metrics, "" when fine
  std::uint64_t seed = 0;
};

std::vector<std::string> metric_names(const ExperimentConfig& cfg) {
  std::vector<std::string> names;
  if (cfg.task() == Task::linear)
    names.push_back("mse");
  else
    names.push_back("acc");
  if (cfg.kind == ExperimentKind::synthetic_linear) {
    names.push_back("precision");
    names.push_back("recall");
  }
  names.push_back("selected_fraction");
  return names;
}

std::optional<double> metric_value(const RunMetrics& m, const std::string& name) {
  if (name == "mse") return m.mse;
  if (name == "acc") return m.acc;
  if (name == "precision") return m.precision;
  if (name == "recall") return m.recall;
  if (name == "selected_fraction") return m.selected_fraction;
  return std::nullopt;
}

RepResult run_repetition(const ExperimentConfig& cfg, int rep,
                         const LabeledDataset* real_data) try {
  RepResult result;
  result.seed = mix_seed(cfg.base_seed, static_cast<std::uint64_t>(rep));
  result.metrics.resize(cfg.methods.size());
  result.errors.resize(cfg.methods.size());

  LabeledDataset train, test;
  if (cfg.kind == ExperimentKind::synthetic_linear) {
    SyntheticConfig scfg = cfg.synthetic;
    scfg.seed = result.seed;
    std::tie(train, test) = simulate(scfg);
  } else {
    Rng rng(result.seed);
    const auto perm = rng.permutation(static_cast<std::size_t>(real_data->n()));
    std::vector<std::size_t> train_rows(perm.begin(), perm.begin() + cfg.train_size);
    std::vector<std::size_t> test_rows(perm.begin() + cfg.train_size,
                                       perm.begin() + cfg.train_size + cfg.test_size);
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());
    train = subset_rows(*real_data, train_rows);
    test = subset_rows(*real_data, test_rows);
  }

  const Task task = cfg.task();
  const std::uint64_t fold_seed = mix_seed(result.seed, kFoldStream);
  TrainConfig tcfg = cfg.train_cfg;
  tcfg.seed = mix_seed(result.seed, kSplitStream);

  // Shared penalty grid so every method sees the same candidates.
  auto [std_train, std_params] = standardize(train, task);
  const LambdaGrid grid = lambda_grid(std_train, task, cfg.grid_count, cfg.grid_ratio);

  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    try {
      FittedModel model;
      switch (cfg.methods[mi]) {
        case Method::statistical:
          model = cv_statistical_lasso(train, task, cfg.k, grid, fold_seed);
          break;
        case Method::standard_neural:
          model = fit_standard(train, task, grid, tcfg);
          break;
        case Method::restricted_neural:
          model = fit_restricted(train, task, grid, cfg.k, tcfg, fold_seed);
          break;
        case Method::voting_neural:
          model = fit_voting(train, task, grid, cfg.k, tcfg, fold_seed);
          break;
      }
      result.metrics[mi] = evaluate(model, test);
    } catch (const Error& e) {
      result.errors[mi] = e.what();
    }
  }
  return result;
} catch (const std::exception& e) {
  // data draw or shared-grid failure: the whole repetition is lost
  RepResult result;
  result.seed = mix_seed(cfg.base_seed, static_cast<std::uint64_t>(rep));
  result.metrics.resize(cfg.methods.size());
  result.errors.assign(cfg.methods.size(), e.what());
  return result;
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::synthetic_linear: return "synthetic_linear";
    case ExperimentKind::real_linear: return "real_linear";
    case ExperimentKind::real_logistic: return "real_logistic";
  }
  return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  if (s == "synthetic_linear" || s == "synthetic-linear") return ExperimentKind::synthetic_linear;
  if (s == "real_linear" || s == "real-linear") return ExperimentKind::real_linear;
  if (s == "real_logistic" || s == "real-logistic") return ExperimentKind::real_logistic;
  throw BadConfig("unknown experiment kind '" + s + "'");
}

ExperimentConfig ExperimentConfig::from_pairs(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
  ExperimentConfig cfg;
  cfg.apply(pairs);
  return cfg;
}

void ExperimentConfig::apply(const std::vector<std::pair<std::string, std::string>>& pairs) {
  ExperimentConfig& cfg = *this;
  for (const auto& [key, value] : pairs) {
    if (key == "kind") cfg.kind = experiment_kind_from_string(value);
    else if (key == "repetitions") cfg.repetitions = static_cast<int>(parse_long(value, key));
    else if (key == "k") cfg.k = static_cast<int>(parse_long(value, key));
    else if (key == "methods") cfg.methods = parse_methods(value);
    else if (key == "p") cfg.synthetic.p = static_cast<int>(parse_long(value, key));
    else if (key == "n_train") cfg.synthetic.n_train = static_cast<int>(parse_long(value, key));
    else if (key == "n_test") cfg.synthetic.n_test = static_cast<int>(parse_long(value, key));
    else if (key == "rho") cfg.synthetic.rho = parse_double(value, key);
    else if (key == "noise_std") cfg.synthetic.noise_std = parse_double(value, key);
    else if (key == "permute_columns") cfg.synthetic.permute_columns = parse_bool(value, key);
    else if (key == "data") cfg.data_path = value;
    else if (key == "target") cfg.target_column = value;
    else if (key == "train_size") cfg.train_size = static_cast<int>(parse_long(value, key));
    else if (key == "test_size") cfg.test_size = static_cast<int>(parse_long(value, key));
    else if (key == "grid_count") cfg.grid_count = static_cast<int>(parse_long(value, key));
    else if (key == "grid_ratio") cfg.grid_ratio = parse_double(value, key);
    else if (key == "lr") cfg.train_cfg.lr = parse_double(value, key);
    else if (key == "max_epochs") cfg.train_cfg.max_epochs = parse_long(value, key);
    else if (key == "patience") cfg.train_cfg.patience = parse_long(value, key);
    else if (key == "train_tol") cfg.train_cfg.tol = parse_double(value, key);
    else if (key == "val_fraction") cfg.train_cfg.val_fraction = parse_double(value, key);
    else if (key == "standard_sweep") cfg.train_cfg.standard_sweep = parse_bool(value, key);
    else if (key == "seed") cfg.base_seed = static_cast<std::uint64_t>(parse_long(value, key));
    else if (key == "out") cfg.output_path = value;
    else if (key == "threads") cfg.threads = static_cast<int>(parse_long(value, key));
    else throw BadConfig("unknown config key '" + key + "'");
  }
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw BadConfig("config line " + std::to_string(line_no) + " is not key=value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    pairs.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return from_pairs(pairs);
}

std::string ExperimentConfig::echo() const {
  std::ostringstream out;
  out << "kind=" << to_string(kind) << "\n";
  out << "repetitions=" << repetitions << "\n";
  out << "k=" << k << "\n";
  out << "methods=";
  for (std::size_t i = 0; i < methods.size(); ++i)
    out << (i ? "," : "") << to_string(methods[i]);
  out << "\n";
  if (kind == ExperimentKind::synthetic_linear) {
    out << "p=" << synthetic.p << "\n";
    out << "n_train=" << synthetic.n_train << "\n";
    out << "n_test=" << synthetic.n_test << "\n";
    out << "rho=" << format_echo(synthetic.rho) << "\n";
    out << "noise_std=" << format_echo(synthetic.noise_std) << "\n";
  } else {
    out << "data=" << data_path << "\n";
    out << "target=" << target_column << "\n";
    out << "train_size=" << train_size << "\n";
    out << "test_size=" << test_size << "\n";
  }
  out << "grid_count=" << grid_count << "\n";
  out << "grid_ratio=" << format_echo(grid_ratio) << "\n";
  out << "lr=" << format_echo(train_cfg.lr) << "\n";
  out << "max_epochs=" << train_cfg.max_epochs << "\n";
  out << "patience=" << train_cfg.patience << "\n";
  out << "train_tol=" << format_echo(train_cfg.tol) << "\n";
  out << "val_fraction=" << format_echo(train_cfg.val_fraction) << "\n";
  out << "standard_sweep=" << (train_cfg.standard_sweep ? "on" : "off") << "\n";
  out << "seed=" << base_seed << "\n";
  return out.str();
}

ReportTable run_experiment(const ExperimentConfig& cfg) {
  if (cfg.repetitions < 1) throw BadConfig("repetitions must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();

  LabeledDataset real_data;
  const bool is_real = cfg.kind != ExperimentKind::synthetic_linear;
  if (is_real) {
    if (cfg.data_path.empty()) throw BadConfig("real-data experiment needs a data path");
    real_data = load_csv(cfg.data_path, cfg.target_column, cfg.task());
    if (cfg.train_size < 2 || cfg.test_size < 1)
      throw BadConfig("train_size/test_size must be set for real data");
    if (cfg.train_size + cfg.test_size > real_data.n())
      throw BadConfig("train_size + test_size exceeds the dataset rows");
  }

  std::vector<RepResult> reps(static_cast<std::size_t>(cfg.repetitions));
  {
    unsigned n_threads = cfg.threads > 0
                             ? static_cast<unsigned>(cfg.threads)
                             : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(cfg.repetitions));
    std::atomic<int> next{0};
    auto worker = [&] {
      for (;;) {
        const int rep = next.fetch_add(1);
        if (rep >= cfg.repetitions) return;
        reps[static_cast<std::size_t>(rep)] =
            run_repetition(cfg, rep, is_real ? &real_data : nullptr);
      }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
  }

  ReportTable table;
  table.config_echo = cfg.echo();
  table.base_seed = cfg.base_seed;

  // Ordered reduction by repetition index keeps aggregation deterministic.
  for (int rep = 0; rep < cfg.repetitions; ++rep) {
    const auto& r = reps[static_cast<std::size_t>(rep)];
    bool failed = false;
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      if (r.metrics[mi]) continue;
      failed = true;
      table.failure_log.push_back(std::to_string(rep) + "," + std::to_string(r.seed) +
                                  "," + to_string(cfg.methods[mi]) + "," + r.errors[mi]);
    }
    if (failed) ++table.failed_repetitions;
  }
  if (table.failed_repetitions * 10 > cfg.repetitions)
    throw Error("more than 10% of repetitions failed (" +
                std::to_string(table.failed_repetitions) + " of " +
                std::to_string(cfg.repetitions) + ")");

  const auto names = metric_names(cfg);
  const auto stat_it = std::find(cfg.methods.begin(), cfg.methods.end(), Method::statistical);
  const std::size_t stat_index = static_cast<std::size_t>(stat_it - cfg.methods.begin());
  const bool have_statistical = stat_it != cfg.methods.end();

  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    for (const auto& name : names) {
      std::vector<double> values;
      std::vector<double> paired_self, paired_stat;
      for (const auto& r : reps) {
        if (!r.metrics[mi]) continue;
        const auto v = metric_value(*r.metrics[mi], name);
        if (!v) continue;
        values.push_back(*v);
        if (have_statistical && mi != stat_index && r.metrics[stat_index]) {
          const auto sv = metric_value(*r.metrics[stat_index], name);
          if (sv) {
            paired_self.push_back(*v);
            paired_stat.push_back(*sv);
          }
        }
      }
      if (values.empty()) continue;

      ReportRow row;
      row.method = cfg.methods[mi];
      row.metric = name;
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= static_cast<double>(values.size());
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      row.mean = mean;
      row.sd = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;

      if (have_statistical && mi != stat_index && paired_self.size() >= 2) {
        try {
          row.p_value = paired_t_test(paired_self, paired_stat).p_value;
          if (row.p_value < 0.01) row.star = "**";
          else if (row.p_value < 0.05) row.star = "*";
        } catch (const ZeroVariance&) {
          // constant nonzero differences: no valid test, leave p as NaN
        }
      }
      table.rows.push_back(std::move(row));
    }
  }

  table.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return table;
}

LabeledDataset load_csv(const std::string& path, const std::string& target_column, Task task) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset: " + path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file", 1, 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
    if (!ss && line.size() && line.back() == ',') header.push_back("");
  }
  long target_idx = -1;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == target_column) target_idx = static_cast<long>(j);
  if (target_idx < 0) throw MissingTarget("target column '" + target_column + "' not found");

  std::vector<std::vector<double>> rows;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(header.size());
    std::size_t start = 0;
    long col = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const std::string cell = line.substr(
          start, comma == std::string::npos ? std::string::npos : comma - start);
      ++col;
      if (cell.empty())
        throw ParseError("empty cell", line_no, col);
      double v = 0.0;
      const auto result = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (result.ec != std::errc() || result.ptr != cell.data() + cell.size())
        throw ParseError("non-numeric cell '" + cell + "'", line_no, col);
      row.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (row.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " cells, got " +
                           std::to_string(row.size()),
                       line_no, static_cast<long>(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("no data rows", line_no, 1);

  LabeledDataset ds;
  const auto n = static_cast<Index>(rows.size());
  const auto p = static_cast<Index>(header.size() - 1);
  if (p < 1) throw ParseError("no predictor columns", 1, 1);
  ds.X.resize(n, p);
  ds.y.resize(n);
  for (std::size_t j = 0; j < header.size(); ++j)
    if (static_cast<long>(j) != target_idx) ds.col_names.push_back(header[j]);
  for (Index i = 0; i < n; ++i) {
    Index jj = 0;
    for (std::size_t j = 0; j < header.size(); ++j) {
      const double v = rows[static_cast<std::size_t>(i)][j];
      if (static_cast<long>(j) == target_idx)
        ds.y[i] = v;
      else
        ds.X(i, jj++) = v;
    }
  }
  if (task == Task::logistic) {
    for (Index i = 0; i < n; ++i)
      if (ds.y[i] != 0.0 && ds.y[i] != 1.0)
        throw NonBinaryTarget("logistic target contains " + format_full(ds.y[i]));
  }
  return ds;
}

void save_csv(const LabeledDataset& ds, const std::string& path, const std::string& target_name) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset: " + path);
  for (Index j = 0; j < ds.p(); ++j) out << ds.col_name(j) << ",";
  out << target_name << "\n";
  for (Index i = 0; i < ds.n(); ++i) {
    for (Index j = 0; j < ds.p(); ++j) out << format_full(ds.X(i, j)) << ",";
    out << format_full(ds.y[i]) << "\n";
  }
  if (!out) throw IoError("failed while writing dataset: " + path);
}

void write_report(const ReportTable& table, std::ostream& out, ReportFormat format) {
  if (format == ReportFormat::csv) {
    out << "method,metric,mean,sd,p_value,star,mean_full,sd_full\n";
    for (const auto& row : table.rows) {
      out << to_string(row.method) << "," << row.metric << ","
          << format_fixed(row.mean, 3) << "," << format_fixed(row.sd, 3) << ",";
      if (!std::isnan(row.p_value)) out << format_fixed(row.p_value, 4);
      out << "," << row.star << "," << format_full(row.mean) << ","
          << format_full(row.sd) << "\n";
    }
    return;
  }

  out << "# experiment report\n\n";
  out << "```\n" << table.config_echo << "```\n";
  std::vector<std::string> groups;
  for (const auto& row : table.rows)
    if (std::find(groups.begin(), groups.end(), row.metric) == groups.end())
      groups.push_back(row.metric);
  for (const auto& metric : groups) {
    out << "\n## " << metric << "\n\n";
    out << "| method | mean (sd) | p vs statistical |\n";
    out << "|---|---|---|\n";
    for (const auto& row : table.rows) {
      if (row.metric != metric) continue;
      out << "| " << to_string(row.method) << " | " << format_fixed(row.mean, 3)
          << row.star << " (" << format_fixed(row.sd, 3) << ") | ";
      if (!std::isnan(row.p_value)) out << format_fixed(row.p_value, 4);
      out << " |\n";
    }
  }
}

void write_report(const ReportTable& table, const std::string& path, ReportFormat format) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report: " + path);
  write_report(table, out, format);
  if (!out) throw IoError("failed while writing report: " + path);
}

}  // namespace nlasso
