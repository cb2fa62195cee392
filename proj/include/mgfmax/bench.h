// Copyright The mgfmax Authors.
// SPDX-License-Identifier: Apache-2.0

// Experiment driver: configuration, seeded inputs, cost estimates from unit
// operation times and report emission.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mgfmax/baseline.h"
#include "mgfmax/he_softmax.h"
#include "mgfmax/serialization.h"

namespace mgfmax {

// Seconds per operation.
struct CostModel {
  double t_add = 1.4e-3;
  double t_pmult = 2.1e-3;
  double t_cmult = 8.9e-2;
  double t_rot = 5.9e-2;
  double t_boot = 14.0;

  void validate() const;
};

struct CostBreakdown {
  double add = 0.0;
  double pmult = 0.0;
  double cmult = 0.0;
  double rot = 0.0;
  double boot = 0.0;
  double total = 0.0;
};

CostBreakdown estimate_cost(const OpCounters &counts, const CostModel &cost);
CostBreakdown estimate_cost(const SoftmaxReport &report, const CostModel &cost);

enum class Method { kMgf, kBaseline };
enum class InputDistribution { kUniform, kGaussianMixture };

std::string method_name(Method m);
Method method_from_name(const std::string &name);
std::string input_distribution_name(InputDistribution d);
InputDistribution input_distribution_from_name(const std::string &name);

struct ExperimentConfig {
  HeParams he = [] {
    HeParams p;
    p.auto_bootstrap = true;
    return p;
  }();
  std::size_t rows = 256;
  std::size_t cols = 256;
  // Inputs are drawn from [-M, 0].
  double m = 128.0;
  Method method = Method::kMgf;
  ExpApproxSpec spec = ExpApproxSpec::chebyshev(15, -8.0, 0.0, 4);
  // Unset: BaselineSpec::for_input(M, cols).
  std::optional<BaselineSpec> baseline;
  Family family = Family::kGaussian;
  std::uint64_t seed = 1;
  CostModel cost;
  InputDistribution input = InputDistribution::kUniform;
  // Read the matrix from this CSV file instead of generating it.
  std::string input_csv;
  std::string report_json;
  std::string errors_csv;
  std::string markdown;

  void validate() const;
  BaselineSpec baseline_spec() const;
};

Json to_json(const ExperimentConfig &c);
// Keys missing from j keep the values of defaults.
ExperimentConfig experiment_config_from_json(const Json &j, ExperimentConfig defaults = {});

/// Seeded matrix with entries in [-M, 0]. The Gaussian mixture draws each
/// entry from one of two components centred at -M/4 and -3M/4 with standard
/// deviation M/16, clamped to the interval.
Matrix generate_input(std::size_t rows, std::size_t cols, double m, InputDistribution dist, std::uint64_t seed);

/// Numeric CSV, one matrix row per line. A first line that does not parse as
/// numbers is treated as a header.
Matrix read_matrix_csv(const std::string &path);

struct RowError {
  std::size_t row = 0;
  // Max-abs deviation from the exact softmax.
  double vs_exact = 0.0;
  // Max-abs deviation from the exact-exp MGF-softmax of the configured family.
  double vs_mgf = 0.0;
};

struct ExperimentResult {
  std::string label;
  Method method = Method::kMgf;
  SoftmaxReport report;
  CostBreakdown cost;
  std::vector<RowError> rows;
  double max_vs_exact = 0.0;
  double max_vs_mgf = 0.0;
};

ExperimentResult run_experiment(const ExperimentConfig &config);
ExperimentResult run_experiment(const ExperimentConfig &config, const Matrix &input);

enum class ReportFormat { kJson, kCsv, kMarkdown };

/// json: list of runs with report, cost and accuracy summary.
/// csv: "run,row,max_abs_vs_exact,max_abs_vs_mgf".
/// markdown: one table row per run labelled "Proposed" or "Baseline".
void emit_report(std::ostream &out, const std::vector<ExperimentResult> &results, ReportFormat format);
/// Writes to path; IoError when the file cannot be written.
void emit_report(const std::string &path, const std::vector<ExperimentResult> &results, ReportFormat format);

}  // namespace mgfmax
