#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nlasso/datagen.hpp"
#include "nlasso/harness.hpp"
#include "test_util.hpp"

using namespace nlasso;

namespace {

std::string write_file(const std::string& content) {
  const std::string path = testutil::temp_path("harness");
  std::ofstream out(path);
  out << content;
  return path;
}

struct FileGuard {
  std::string path;
  ~FileGuard() { std::filesystem::remove(path); }
};

}  // namespace

TEST_CASE("load_csv: fixture with exact values") {
  FileGuard f{write_file("a,b,y\n1,2,3\n4,5,6\n7,8,9\n")};
  const LabeledDataset ds = load_csv(f.path, "y", Task::linear);
  CHECK(ds.n() == 3);
  CHECK(ds.p() == 2);
  CHECK(ds.col_names == std::vector<std::string>{"a", "b"});
  CHECK(ds.X(0, 0) == 1.0);
  CHECK(ds.X(2, 1) == 8.0);
  CHECK(ds.y[1] == 6.0);
}

TEST_CASE("load_csv: target column position does not matter") {
  FileGuard f{write_file("y,a,b\n3,1,2\n6,4,5\n")};
  const LabeledDataset ds = load_csv(f.path, "y", Task::linear);
  CHECK(ds.X(1, 0) == 4.0);
  CHECK(ds.y[0] == 3.0);
}

TEST_CASE("load_csv: error cases carry 1-based line numbers") {
  FileGuard empty_cell{write_file("a,y\n1,2\n,3\n")};
  CHECK_THROWS_AS(load_csv(empty_cell.path, "y", Task::linear), ParseError);
  try {
    load_csv(empty_cell.path, "y", Task::linear);
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
    CHECK(e.column == 1);
  }

  FileGuard non_numeric{write_file("a,y\n1,2\n4,potato\n")};
  try {
    load_csv(non_numeric.path, "y", Task::linear);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
    CHECK(e.column == 2);
  }

  FileGuard missing{write_file("a,b\n1,2\n")};
  CHECK_THROWS_AS(load_csv(missing.path, "y", Task::linear), MissingTarget);

  FileGuard bad_target{write_file("a,y\n1,2\n1,0\n")};
  CHECK_THROWS_AS(load_csv(bad_target.path, "y", Task::logistic), NonBinaryTarget);

  FileGuard ragged{write_file("a,b,y\n1,2,3\n1,2\n")};
  CHECK_THROWS_AS(load_csv(ragged.path, "y", Task::linear), ParseError);
}

TEST_CASE("save_csv then load_csv round trip") {
  Rng rng(70);
  LabeledDataset ds = testutil::random_linear_dataset(rng, 12, 3);
  FileGuard f{testutil::temp_path("roundtrip") + ".csv"};
  save_csv(ds, f.path);
  const LabeledDataset back = load_csv(f.path, "y", Task::linear);
  CHECK((back.X - ds.X).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.y - ds.y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("write_report: header-only for an empty table, 3-decimal rounding") {
  ReportTable table;
  std::ostringstream empty;
  write_report(table, empty, ReportFormat::csv);
  CHECK(empty.str() == "method,metric,mean,sd,p_value,star,mean_full,sd_full\n");

  ReportRow row;
  row.method = Method::statistical;
  row.metric = "mse";
  row.mean = 1.2944;
  row.sd = 0.1884;
  table.rows.push_back(row);
  std::ostringstream one;
  write_report(table, one, ReportFormat::csv);
  const std::string rendered = one.str();
  CHECK(rendered.find("statistical,mse,1.294,0.188,,,") != std::string::npos);
}

TEST_CASE("write_report: csv parses back to the rendered precision") {
  ReportTable table;
  ReportRow a;
  a.method = Method::statistical;
  a.metric = "mse";
  a.mean = 1.29439;
  a.sd = 0.18811;
  table.rows.push_back(a);
  ReportRow b;
  b.method = Method::voting_neural;
  b.metric = "mse";
  b.mean = 1.18825;
  b.sd = 0.14402;
  b.p_value = 0.00123;
  b.star = "**";
  table.rows.push_back(b);

  FileGuard f{testutil::temp_path("report") + ".csv"};
  write_report(table, f.path, ReportFormat::csv);

  std::ifstream in(f.path);
  std::string line;
  std::getline(in, line);  // header
  std::getline(in, line);
  CHECK(line.substr(0, line.find(",,")) == "statistical,mse,1.294,0.188");
  std::getline(in, line);
  std::stringstream ss(line);
  std::string cell;
  std::vector<std::string> cells;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  CHECK(cells[0] == "voting_neural");
  CHECK(cells[2] == "1.188");
  CHECK(cells[3] == "0.144");
  CHECK(cells[4] == "0.0012");
  CHECK(cells[5] == "**");
  CHECK(std::stod(cells[6]) == 1.18825);  // full-precision column
}

TEST_CASE("write_report: markdown groups by metric") {
  ReportTable table;
  table.config_echo = "kind=synthetic_linear\n";
  ReportRow a;
  a.method = Method::statistical;
  a.metric = "mse";
  a.mean = 1.0;
  table.rows.push_back(a);
  ReportRow b = a;
  b.metric = "recall";
  table.rows.push_back(b);
  std::ostringstream out;
  write_report(table, out, ReportFormat::markdown);
  CHECK(out.str().find("## mse") != std::string::npos);
  CHECK(out.str().find("## recall") != std::string::npos);
}

TEST_CASE("experiment config: file parsing, overrides, unknown keys") {
  FileGuard f{write_file(
      "# benchmark\nkind = synthetic_linear\nrepetitions = 4\np = 10\nn_train = 40\n"
      "n_test = 50\nmethods = statistical,voting\nseed = 9\ngrid_count = 20\n")};
  ExperimentConfig cfg = ExperimentConfig::from_file(f.path);
  CHECK(cfg.repetitions == 4);
  CHECK(cfg.synthetic.p == 10);
  CHECK(cfg.methods.size() == 2);
  CHECK(cfg.base_seed == 9);

  cfg.apply({{"repetitions", "2"}});
  CHECK(cfg.repetitions == 2);

  CHECK_THROWS_AS(ExperimentConfig::from_pairs({{"bogus", "1"}}), BadConfig);
  CHECK_THROWS_AS(ExperimentConfig::from_pairs({{"repetitions", "abc"}}), BadConfig);
}

TEST_CASE("run_experiment: statistical only, no stars, deterministic replay") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::synthetic_linear;
  cfg.repetitions = 2;
  cfg.methods = {Method::statistical};
  cfg.synthetic.p = 8;
  cfg.synthetic.n_train = 40;
  cfg.synthetic.n_test = 60;
  cfg.grid_count = 25;
  cfg.base_seed = 31;
  cfg.threads = 2;

  const ReportTable t1 = run_experiment(cfg);
  CHECK(t1.failed_repetitions == 0);
  for (const auto& row : t1.rows) {
    CHECK(row.star.empty());
    CHECK(std::isnan(row.p_value));
  }

  std::ostringstream r1, r2;
  write_report(t1, r1, ReportFormat::csv);
  write_report(run_experiment(cfg), r2, ReportFormat::csv);
  CHECK(r1.str() == r2.str());
}

TEST_CASE("run_experiment: all methods, paired rows present") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::synthetic_linear;
  cfg.repetitions = 3;
  cfg.synthetic.p = 8;
  cfg.synthetic.n_train = 40;
  cfg.synthetic.n_test = 50;
  cfg.grid_count = 12;
  cfg.train_cfg.max_epochs = 300;
  cfg.base_seed = 17;
  cfg.threads = 3;

  const ReportTable table = run_experiment(cfg);
  // 4 methods x (mse, precision, recall, selected_fraction)
  CHECK(table.rows.size() == 16);
  int with_p = 0;
  for (const auto& row : table.rows) {
    if (row.method == Method::statistical) {
      CHECK(row.star.empty());
    } else if (!std::isnan(row.p_value)) {
      ++with_p;
      CHECK(row.p_value >= 0.0);
      CHECK(row.p_value <= 1.0);
    }
  }
  CHECK(with_p > 0);
}

TEST_CASE("run_experiment: real-data kind resamples a fixed csv") {
  Rng rng(71);
  LabeledDataset ds = testutil::random_linear_dataset(rng, 60, 4);
  FileGuard f{testutil::temp_path("real") + ".csv"};
  save_csv(ds, f.path);

  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::real_linear;
  cfg.data_path = f.path;
  cfg.target_column = "y";
  cfg.train_size = 40;
  cfg.test_size = 20;
  cfg.repetitions = 3;
  cfg.methods = {Method::statistical};
  cfg.grid_count = 20;
  cfg.base_seed = 5;
  cfg.threads = 2;

  const ReportTable table = run_experiment(cfg);
  bool saw_mse = false, saw_fraction = false;
  for (const auto& row : table.rows) {
    if (row.metric == "mse") saw_mse = true;
    if (row.metric == "selected_fraction") saw_fraction = true;
    CHECK(row.metric != "precision");  // no truth support on real data
  }
  CHECK(saw_mse);
  CHECK(saw_fraction);

  CHECK_THROWS_AS(
      run_experiment([&] {
        ExperimentConfig bad = cfg;
        bad.train_size = 55;
        bad.test_size = 20;
        return bad;
      }()),
      BadConfig);
}

TEST_CASE("run_experiment: aborts when too many repetitions fail") {
  // a constant predictor makes every repetition fail at standardization
  LabeledDataset ds;
  ds.X = Matrix::Ones(30, 2);
  Rng rng(72);
  for (Index i = 0; i < 30; ++i) ds.X(i, 1) = rng.normal();
  ds.y.resize(30);
  for (Index i = 0; i < 30; ++i) ds.y[i] = rng.normal();
  FileGuard f{testutil::temp_path("const_col") + ".csv"};
  save_csv(ds, f.path);

  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::real_linear;
  cfg.data_path = f.path;
  cfg.target_column = "y";
  cfg.train_size = 20;
  cfg.test_size = 10;
  cfg.repetitions = 3;
  cfg.methods = {Method::statistical};
  cfg.threads = 1;
  CHECK_THROWS_AS(run_experiment(cfg), Error);
}

TEST_CASE("run_experiment: logistic kind end to end") {
  SyntheticConfig scfg;
  scfg.p = 5;
  scfg.n_train = 120;
  scfg.n_test = 10;
  scfg.logistic_response = true;
  scfg.seed = 14;
  auto [data, unused] = simulate(scfg);
  FileGuard f{testutil::temp_path("logit") + ".csv"};
  save_csv(data, f.path);

  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::real_logistic;
  cfg.data_path = f.path;
  cfg.target_column = "y";
  cfg.train_size = 80;
  cfg.test_size = 40;
  cfg.repetitions = 2;
  cfg.methods = {Method::statistical, Method::voting_neural};
  cfg.grid_count = 20;
  cfg.train_cfg.max_epochs = 400;
  cfg.base_seed = 3;
  cfg.threads = 2;

  const ReportTable table = run_experiment(cfg);
  CHECK(table.failed_repetitions == 0);
  const bool has_acc = std::any_of(table.rows.begin(), table.rows.end(), [](const auto& r) {
    return r.metric == "acc";
  });
  CHECK(has_acc);
  for (const auto& row : table.rows) {
    if (row.metric != "acc") continue;
    CHECK(row.mean >= 0.0);
    CHECK(row.mean <= 1.0);
  }
}
