#include "nlasso/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

namespace nlasso {

namespace {

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string name_of(const std::vector<std::string>& names, Index j) {
  if (j >= 0 && j < static_cast<Index>(names.size())) return names[static_cast<std::size_t>(j)];
  return "x" + std::to_string(j + 1);
}

}  // namespace

void emit_model(const FittedModel& model, const std::vector<std::string>& col_names,
                std::ostream& out) {
  out << "task," << to_string(model.task) << "\n";
  out << "method," << to_string(model.method) << "\n";
  out << "lambda," << format_full(model.lambda) << "\n";
  out << "intercept_original," << format_full(model.intercept_original) << "\n";
  for (Index j = 0; j < model.beta_original.size(); ++j)
    if (model.beta_original[j] != 0.0)
      out << name_of(col_names, j) << "," << format_full(model.beta_original[j]) << "\n";
}

void emit_model(const FittedModel& model, const std::vector<std::string>& col_names,
                const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write model file: " + path);
  emit_model(model, col_names, out);
  if (!out) throw IoError("failed while writing model file: " + path);
}

ModelFile read_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read model file: " + path);
  ModelFile file;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("expected key,value", line_no, 1);
    const std::string key = line.substr(0, comma);
    const std::string value = line.substr(comma + 1);
    if (key == "task") file.task = task_from_string(value);
    else if (key == "method") file.method = method_from_string(value);
    else if (key == "lambda") file.lambda = std::stod(value);
    else if (key == "intercept_original") file.intercept_original = std::stod(value);
    else file.coefficients.emplace_back(key, std::stod(value));
  }
  return file;
}

}  // namespace nlasso
