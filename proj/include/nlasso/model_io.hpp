#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "nlasso/types.hpp"

namespace nlasso {

/// Plain-text key-value model file: task, method, lambda,
/// intercept_original, then one `name,coefficient` line per nonzero
/// original-scale coefficient in ascending column order. Values carry 17
/// significant digits so a round trip is lossless.
void emit_model(const FittedModel& model, const std::vector<std::string>& col_names,
                std::ostream& out);
void emit_model(const FittedModel& model, const std::vector<std::string>& col_names,
                const std::string& path);

struct ModelFile {
  Task task = Task::linear;
  Method method = Method::statistical;
  double lambda = 0.0;
  double intercept_original = 0.0;
  std::vector<std::pair<std::string, double>> coefficients;
};

ModelFile read_model(const std::string& path);

}  // namespace nlasso
