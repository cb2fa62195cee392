// Copyright The mgfmax Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mgfmax/bench.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "mgfmax/errors.h"

namespace mgfmax {

namespace {

std::string fmt(const char *format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

bool parse_csv_line(const std::string &line, std::vector<double> &out) {
  out.clear();
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
      return false;
    }
    const auto last = cell.find_last_not_of(" \t\r");
    cell = cell.substr(first, last - first + 1);
    std::size_t used = 0;
    try {
      out.push_back(std::stod(cell, &used));
    } catch (const std::exception &) {
      return false;
    }
    if (used != cell.size()) {
      return false;
    }
  }
  return !out.empty();
}

template <class T>
T get(const Json &j, const std::string &key, T fallback) {
  if (!j.contains(key)) {
    return fallback;
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

}  // namespace

void CostModel::validate() const {
  for (double t : {t_add, t_pmult, t_cmult, t_rot, t_boot}) {
    if (!(t >= 0.0)) {
      throw ConfigError("unit operation times must be nonnegative");
    }
  }
}

CostBreakdown estimate_cost(const OpCounters &counts, const CostModel &cost) {
  CostBreakdown b;
  b.add = static_cast<double>(counts.n_add) * cost.t_add;
  b.pmult = static_cast<double>(counts.n_pmult) * cost.t_pmult;
  b.cmult = static_cast<double>(counts.n_cmult) * cost.t_cmult;
  b.rot = static_cast<double>(counts.n_rot) * cost.t_rot;
  b.boot = static_cast<double>(counts.n_boot) * cost.t_boot;
  b.total = b.add + b.pmult + b.cmult + b.rot + b.boot;
  return b;
}

CostBreakdown estimate_cost(const SoftmaxReport &report, const CostModel &cost) {
  return estimate_cost(report.counters, cost);
}

std::string method_name(Method m) {
  return m == Method::kMgf ? "mgf" : "baseline";
}

Method method_from_name(const std::string &name) {
  if (name == "mgf") {
    return Method::kMgf;
  }
  if (name == "baseline") {
    return Method::kBaseline;
  }
  throw ConfigError("unknown method '" + name + "' (expected mgf or baseline)");
}

std::string input_distribution_name(InputDistribution d) {
  return d == InputDistribution::kUniform ? "uniform" : "gaussian-mixture";
}

InputDistribution input_distribution_from_name(const std::string &name) {
  if (name == "uniform") {
    return InputDistribution::kUniform;
  }
  if (name == "gaussian-mixture") {
    return InputDistribution::kGaussianMixture;
  }
  throw ConfigError("unknown input distribution '" + name + "'");
}

void ExperimentConfig::validate() const {
  he.validate();
  cost.validate();
  if (rows == 0 || cols == 0) {
    throw ConfigError("matrix dimensions must be positive");
  }
  if (!(m > 0.0)) {
    throw ConfigError("input bound M must be positive");
  }
  if (baseline) {
    baseline->validate();
  }
}

BaselineSpec ExperimentConfig::baseline_spec() const {
  return baseline ? *baseline : BaselineSpec::for_input(m, cols);
}

Json to_json(const ExperimentConfig &c) {
  Json j;
  j["he"] = to_json(c.he);
  j["rows"] = c.rows;
  j["cols"] = c.cols;
  j["M"] = c.m;
  j["method"] = method_name(c.method);
  j["spec"] = to_json(c.spec);
  j["baseline"] = to_json(c.baseline_spec());
  j["family"] = family_name(c.family);
  j["seed"] = c.seed;
  j["cost"] = Json{{"add", c.cost.t_add},
                   {"pmult", c.cost.t_pmult},
                   {"cmult", c.cost.t_cmult},
                   {"rot", c.cost.t_rot},
                   {"boot", c.cost.t_boot}};
  j["input"] = Json{{"distribution", input_distribution_name(c.input)}, {"csv", c.input_csv}};
  j["outputs"] = Json{{"report_json", c.report_json}, {"errors_csv", c.errors_csv}, {"markdown", c.markdown}};
  return j;
}

ExperimentConfig experiment_config_from_json(const Json &j, ExperimentConfig defaults) {
  static const std::vector<std::string> keys = {"he",     "rows", "cols", "M",    "method", "spec",
                                                "baseline", "family", "seed", "cost", "input", "outputs"};
  if (!j.is_object()) {
    throw ConfigError("config must be a JSON object");
  }
  for (const auto &[key, value] : j.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  ExperimentConfig c = std::move(defaults);
  if (j.contains("he")) {
    c.he = he_params_from_json(j.at("he"), c.he);
  }
  c.rows = get(j, "rows", c.rows);
  c.cols = get(j, "cols", c.cols);
  c.m = get(j, "M", c.m);
  if (j.contains("method")) {
    c.method = method_from_name(get<std::string>(j, "method", ""));
  }
  if (j.contains("spec")) {
    c.spec = exp_spec_from_json(j.at("spec"));
  }
  if (j.contains("baseline")) {
    c.baseline = baseline_spec_from_json(j.at("baseline"), c.baseline_spec());
  }
  if (j.contains("family")) {
    c.family = family_from_name(get<std::string>(j, "family", ""));
  }
  c.seed = get(j, "seed", c.seed);
  if (j.contains("cost")) {
    const Json &k = j.at("cost");
    for (const auto &[key, value] : k.items()) {
      if (key != "add" && key != "pmult" && key != "cmult" && key != "rot" && key != "boot") {
        throw ConfigError("unknown key '" + key + "' in cost");
      }
    }
    c.cost.t_add = get(k, "add", c.cost.t_add);
    c.cost.t_pmult = get(k, "pmult", c.cost.t_pmult);
    c.cost.t_cmult = get(k, "cmult", c.cost.t_cmult);
    c.cost.t_rot = get(k, "rot", c.cost.t_rot);
    c.cost.t_boot = get(k, "boot", c.cost.t_boot);
  }
  if (j.contains("input")) {
    const Json &in = j.at("input");
    for (const auto &[key, value] : in.items()) {
      if (key != "distribution" && key != "csv") {
        throw ConfigError("unknown key '" + key + "' in input");
      }
    }
    if (in.contains("distribution")) {
      c.input = input_distribution_from_name(get<std::string>(in, "distribution", ""));
    }
    c.input_csv = get(in, "csv", c.input_csv);
  }
  if (j.contains("outputs")) {
    const Json &out = j.at("outputs");
    for (const auto &[key, value] : out.items()) {
      if (key != "report_json" && key != "errors_csv" && key != "markdown") {
        throw ConfigError("unknown key '" + key + "' in outputs");
      }
    }
    c.report_json = get(out, "report_json", c.report_json);
    c.errors_csv = get(out, "errors_csv", c.errors_csv);
    c.markdown = get(out, "markdown", c.markdown);
  }
  c.validate();
  return c;
}

Matrix generate_input(std::size_t rows, std::size_t cols, double m, InputDistribution dist, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Matrix a(rows, cols);
  if (dist == InputDistribution::kUniform) {
    std::uniform_real_distribution<double> u(-m, 0.0);
    for (double &v : a.data) {
      v = u(gen);
    }
    return a;
  }
  std::bernoulli_distribution pick(0.5);
  std::normal_distribution<double> normal(0.0, m / 16.0);
  for (double &v : a.data) {
    const double centre = pick(gen) ? -0.25 * m : -0.75 * m;
    v = std::clamp(centre + normal(gen), -m, 0.0);
  }
  return a;
}

Matrix read_matrix_csv(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot read '" + path + "'");
  }
  Matrix a;
  std::string line;
  std::vector<double> cells;
  bool first = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    if (!parse_csv_line(line, cells)) {
      if (first) {
        first = false;
        continue;
      }
      throw ConfigError(path + ":" + std::to_string(line_no) + ": not a numeric CSV row");
    }
    first = false;
    if (a.cols == 0) {
      a.cols = cells.size();
    } else if (cells.size() != a.cols) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(a.cols) +
                        " columns, got " + std::to_string(cells.size()));
    }
    a.data.insert(a.data.end(), cells.begin(), cells.end());
    ++a.rows;
  }
  if (a.rows == 0) {
    throw EmptyInput("'" + path + "' holds no matrix rows");
  }
  return a;
}

ExperimentResult run_experiment(const ExperimentConfig &config) {
  config.validate();
  const Matrix input = config.input_csv.empty()
                           ? generate_input(config.rows, config.cols, config.m, config.input, config.seed)
                           : read_matrix_csv(config.input_csv);
  return run_experiment(config, input);
}

ExperimentResult run_experiment(const ExperimentConfig &config, const Matrix &input) {
  config.validate();
  Engine engine(config.he, config.seed);
  const PackedMatrix packed = pack(engine, input);
  ExperimentResult r;
  r.method = config.method;
  HeSoftmaxResult out;
  if (config.method == Method::kMgf) {
    r.label = "Proposed";
    out = he_mgf_softmax(engine, packed, config.spec, config.family);
  } else {
    r.label = "Baseline";
    out = he_softmax_baseline(engine, packed, config.baseline_spec());
  }
  r.report = out.report;
  r.cost = estimate_cost(r.report, config.cost);

  const Matrix result = unpack(engine, out.output);
  for (std::size_t i = 0; i < input.rows; ++i) {
    const auto exact = softmax_exact(input.row(i));
    const auto mgf = mgf_softmax_plain(input.row(i), config.family);
    RowError e;
    e.row = i;
    for (std::size_t j = 0; j < input.cols; ++j) {
      e.vs_exact = std::max(e.vs_exact, std::abs(result(i, j) - exact[j]));
      e.vs_mgf = std::max(e.vs_mgf, std::abs(result(i, j) - mgf[j]));
    }
    r.max_vs_exact = std::max(r.max_vs_exact, e.vs_exact);
    r.max_vs_mgf = std::max(r.max_vs_mgf, e.vs_mgf);
    r.rows.push_back(e);
  }
  return r;
}

void emit_report(std::ostream &out, const std::vector<ExperimentResult> &results, ReportFormat format) {
  switch (format) {
    case ReportFormat::kJson: {
      Json runs = Json::array();
      for (const auto &r : results) {
        Json j;
        j["label"] = r.label;
        j["method"] = method_name(r.method);
        j["report"] = to_json(r.report);
        j["cost_seconds"] = Json{{"add", r.cost.add},     {"pmult", r.cost.pmult}, {"cmult", r.cost.cmult},
                                 {"rot", r.cost.rot},     {"boot", r.cost.boot},   {"total", r.cost.total}};
        j["accuracy"] = Json{{"max_abs_vs_exact", r.max_vs_exact}, {"max_abs_vs_mgf", r.max_vs_mgf}};
        runs.push_back(std::move(j));
      }
      out << runs.dump(2) << '\n';
      break;
    }
    case ReportFormat::kCsv:
      out << "run,row,max_abs_vs_exact,max_abs_vs_mgf\n";
      for (const auto &r : results) {
        for (const auto &e : r.rows) {
          out << r.label << ',' << e.row << ',' << fmt("%.10g", e.vs_exact) << ',' << fmt("%.10g", e.vs_mgf)
              << '\n';
        }
      }
      break;
    case ReportFormat::kMarkdown:
      out << "| Method | Depth | # CMult | # Rot | # Boot | Add (s) | PMult (s) | CMult (s) | Rot (s) | Boot (s) | Total (s) |\n";
      out << "|---|---|---|---|---|---|---|---|---|---|---|\n";
      for (const auto &r : results) {
        out << "| " << r.label << " | " << r.report.depth << " | " << r.report.counters.n_cmult << " | "
            << r.report.counters.n_rot << " | " << r.report.boots << " | " << fmt("%.2f", r.cost.add) << " | "
            << fmt("%.2f", r.cost.pmult) << " | " << fmt("%.2f", r.cost.cmult) << " | " << fmt("%.2f", r.cost.rot)
            << " | " << fmt("%.2f", r.cost.boot) << " | " << fmt("%.2f", r.cost.total) << " |\n";
      }
      break;
  }
}

void emit_report(const std::string &path, const std::vector<ExperimentResult> &results, ReportFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write '" + path + "'");
  }
  emit_report(out, results, format);
  if (!out) {
    throw IoError("write to '" + path + "' failed");
  }
}

}  // namespace mgfmax
