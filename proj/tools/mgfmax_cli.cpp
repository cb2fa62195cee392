// Copyright The mgfmax Authors.
// SPDX-License-Identifier: Apache-2.0

// mgfmax: experiment driver.
//
//   mgfmax softmax-eval   run one pipeline and print its report
//   mgfmax compare        run both pipelines on the same input
//   mgfmax depth-table    measured depth and counts for a range of k
//   mgfmax error-sweep    analytic vs Monte-Carlo tail probabilities
//   mgfmax cost-estimate  seconds for given operation counts
//
// Exit codes: 0 success, 2 configuration error, 3 pipeline error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "mgfmax/bench.h"
#include "mgfmax/error_analysis.h"
#include "mgfmax/errors.h"

namespace {

using namespace mgfmax;

constexpr int kConfigError = 2;
constexpr int kPipelineError = 3;

struct ExperimentFlags {
  std::string config;
  std::optional<std::size_t> rows, cols, slots;
  std::optional<int> levels;
  std::optional<double> m, noise;
  std::optional<bool> auto_bootstrap;
  std::optional<std::string> method, family, input_dist, input_csv, report_json, errors_csv, markdown;
  std::optional<std::uint64_t> seed;
  // Exp approximation.
  std::optional<std::string> variant, preset;
  std::optional<int> k, degree;
  std::optional<double> x0, lo, hi;
  // Baseline.
  std::optional<int> baseline_k, gs_iters;
  std::optional<double> inv_range;

  void add_to(CLI::App *app) {
    app->add_option("-c,--config", config, "JSON experiment config (falls back to $MGFMAX_CONFIG)");
    app->add_option("--rows", rows, "Matrix rows");
    app->add_option("--cols", cols, "Matrix columns (softmax dimension)");
    app->add_option("--M", m, "Inputs are drawn from [-M, 0]");
    app->add_option("--method", method, "mgf or baseline");
    app->add_option("--family", family, "gaussian, uniform or laplace");
    app->add_option("--seed", seed, "Random seed");
    app->add_option("--slots", slots, "Slot count s");
    app->add_option("--levels", levels, "Levels L after bootstrapping");
    app->add_option("--noise", noise, "Relative noise per level-consuming op");
    app->add_option("--auto-bootstrap", auto_bootstrap, "Insert bootstraps automatically");
    app->add_option("--variant", variant, "chebyshev, limit or taylor");
    app->add_option("--preset", preset, "Named exp approximation");
    app->add_option("--k", k, "Domain scaling exponent of the exp approximation");
    app->add_option("--degree", degree, "Polynomial degree");
    app->add_option("--x0", x0, "Taylor expansion point");
    app->add_option("--lo", lo, "Chebyshev interval lower end");
    app->add_option("--hi", hi, "Chebyshev interval upper end");
    app->add_option("--baseline-k", baseline_k, "Normalize-and-square iterations");
    app->add_option("--gs-iters", gs_iters, "Goldschmidt iterations");
    app->add_option("--inv-range", inv_range, "Upper bound of inverted denominators");
    app->add_option("--input-dist", input_dist, "uniform or gaussian-mixture");
    app->add_option("--input-csv", input_csv, "Read the input matrix from CSV");
    app->add_option("--report-json", report_json, "Write the JSON report here");
    app->add_option("--errors-csv", errors_csv, "Write per-row errors here");
    app->add_option("--markdown", markdown, "Write a markdown table here");
  }

  ExperimentConfig resolve() const {
    Json j = Json::object();
    std::string path = config;
    if (path.empty()) {
      if (const char *env = std::getenv("MGFMAX_CONFIG")) {
        path = env;
      }
    }
    if (!path.empty()) {
      j = read_json_file(path);
    }
    auto set = [&](const char *key, const auto &opt) {
      if (opt) {
        j[key] = *opt;
      }
    };
    auto set_in = [&](const char *section, const char *key, const auto &opt) {
      if (opt) {
        j[section][key] = *opt;
      }
    };
    set("rows", rows);
    set("cols", cols);
    set("M", m);
    set("method", method);
    set("family", family);
    set("seed", seed);
    set_in("he", "slot_count", slots);
    set_in("he", "max_level", levels);
    set_in("he", "noise_stddev", noise);
    set_in("he", "auto_bootstrap", auto_bootstrap);
    set_in("input", "distribution", input_dist);
    set_in("input", "csv", input_csv);
    set_in("outputs", "report_json", report_json);
    set_in("outputs", "errors_csv", errors_csv);
    set_in("outputs", "markdown", markdown);

    if (preset) {
      j["spec"] = Json{{"preset", *preset}};
    } else if (variant || k || degree || x0 || lo || hi) {
      Json spec = j.contains("spec") ? j["spec"] : Json::object();
      if (spec.contains("preset")) {
        spec = to_json(exp_spec_from_json(spec));
      }
      if (variant && spec.value("variant", std::string("chebyshev")) != *variant) {
        spec = Json{{"variant", *variant}};
      }
      if (k) {
        spec["k"] = *k;
      }
      if (degree) {
        spec["degree"] = *degree;
      }
      if (x0) {
        spec["x0"] = *x0;
      }
      if (lo || hi) {
        auto interval = spec.value("interval", std::vector<double>{-8.0, 0.0});
        interval[0] = lo.value_or(interval[0]);
        interval[1] = hi.value_or(interval[1]);
        spec["interval"] = interval;
      }
      j["spec"] = spec;
    }
    set_in("baseline", "k", baseline_k);
    set_in("baseline", "gs_iters", gs_iters);
    set_in("baseline", "inv_range", inv_range);
    return experiment_config_from_json(j);
  }
};

void write_outputs(const ExperimentConfig &c, const std::vector<ExperimentResult> &results) {
  if (!c.report_json.empty()) {
    emit_report(c.report_json, results, ReportFormat::kJson);
  }
  if (!c.errors_csv.empty()) {
    emit_report(c.errors_csv, results, ReportFormat::kCsv);
  }
  if (!c.markdown.empty()) {
    emit_report(c.markdown, results, ReportFormat::kMarkdown);
  }
}

int softmax_eval(const ExperimentFlags &flags) {
  const ExperimentConfig c = flags.resolve();
  const std::vector<ExperimentResult> results{run_experiment(c)};
  emit_report(std::cout, results, ReportFormat::kJson);
  write_outputs(c, results);
  return 0;
}

int compare(const ExperimentFlags &flags) {
  ExperimentConfig c = flags.resolve();
  const Matrix input =
      c.input_csv.empty() ? generate_input(c.rows, c.cols, c.m, c.input, c.seed) : read_matrix_csv(c.input_csv);
  c.method = Method::kMgf;
  std::vector<ExperimentResult> results{run_experiment(c, input)};
  c.method = Method::kBaseline;
  results.push_back(run_experiment(c, input));
  emit_report(std::cout, results, ReportFormat::kMarkdown);
  std::cout << "\nestimated baseline / proposed time: "
            << results[1].cost.total / results[0].cost.total << '\n';
  write_outputs(c, results);
  return 0;
}

int depth_table(const ExperimentFlags &flags, int k_min, int k_max, bool with_baseline) {
  ExperimentConfig c = flags.resolve();
  const Matrix input = generate_input(c.rows, c.cols, c.m, c.input, c.seed);
  std::cout << "| k | depth | k+6 | cmult/stream | rot | boot/stream | floor((k+6)/L) |";
  if (with_baseline) {
    std::cout << " baseline depth | 8k+9 | baseline boot |";
  }
  std::cout << "\n|---|---|---|---|---|---|---|" << (with_baseline ? "---|---|---|" : "") << '\n';
  for (int k = k_min; k <= k_max; ++k) {
    const auto &cheb = c.spec.variant() == ExpApproxSpec::Variant::kChebyshev
                           ? c.spec.as_chebyshev().poly
                           : chebyshev_fit_exp(-8.0, 0.0, 15);
    c.method = Method::kMgf;
    c.spec = ExpApproxSpec::chebyshev(cheb.degree(), cheb.lo, cheb.hi, k);
    const auto r = run_experiment(c, input).report;
    std::cout << "| " << k << " | " << r.depth << " | " << k + 6 << " | " << r.cmult_per_stream() << " | "
              << r.counters.n_rot << " | " << r.boot_per_stream() << " | " << (k + 6) / c.he.max_level << " |";
    if (with_baseline) {
      BaselineSpec b = c.baseline_spec();
      b.k = k;
      c.baseline = b;
      c.method = Method::kBaseline;
      const auto rb = run_experiment(c, input).report;
      std::cout << ' ' << rb.depth << " | " << 8 * k + 9 << " | " << rb.boots << " |";
    }
    std::cout << '\n';
  }
  return 0;
}

std::vector<std::string> split(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(item);
  }
  return out;
}

template <class T>
std::vector<T> parse_list(const std::string &s, const char *what) {
  std::vector<T> out;
  for (const auto &item : split(s)) {
    try {
      if constexpr (std::is_same_v<T, double>) {
        out.push_back(std::stod(item));
      } else {
        out.push_back(static_cast<T>(std::stoull(item)));
      }
    } catch (const std::exception &) {
      throw ConfigError(std::string("bad entry '") + item + "' in " + what);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"MGF-softmax under a simulated leveled HE engine"};
  app.require_subcommand(1);

  ExperimentFlags eval_flags;
  auto *eval = app.add_subcommand("softmax-eval", "Run one pipeline and print its report");
  eval_flags.add_to(eval);

  ExperimentFlags compare_flags;
  auto *cmp = app.add_subcommand("compare", "Run MGF-softmax and the baseline on the same input");
  compare_flags.add_to(cmp);

  ExperimentFlags depth_flags;
  int k_min = 1;
  int k_max = 6;
  bool with_baseline = false;
  auto *depth = app.add_subcommand("depth-table", "Measured depth and counts over a range of k");
  depth_flags.add_to(depth);
  depth->add_option("--k-min", k_min, "Smallest k")->capture_default_str();
  depth->add_option("--k-max", k_max, "Largest k")->capture_default_str();
  depth->add_flag("--with-baseline", with_baseline, "Also run the baseline with the same k");

  std::string deltas = "0.05,0.1,0.2";
  std::string ns = "64,256,1024";
  std::string sigmas = "0.5,1";
  std::size_t trials = 10000;
  std::uint64_t sweep_seed = 1;
  unsigned threads = 0;
  std::string mode = "true";
  std::string sweep_out;
  auto *sweep = app.add_subcommand("error-sweep", "Analytic vs Monte-Carlo deviation probabilities (CSV)");
  sweep->add_option("--deltas", deltas, "Comma-separated thresholds")->capture_default_str();
  sweep->add_option("--ns", ns, "Comma-separated vector lengths")->capture_default_str();
  sweep->add_option("--sigmas", sigmas, "Comma-separated standard deviations")->capture_default_str();
  sweep->add_option("--trials", trials, "Monte-Carlo trials per (n, sigma)")->capture_default_str();
  sweep->add_option("--seed", sweep_seed, "Random seed")->capture_default_str();
  sweep->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
  sweep->add_option("--mode", mode, "true or estimated parameters inside M_X(1)")
      ->check(CLI::IsMember({"true", "estimated"}))
      ->capture_default_str();
  sweep->add_option("-o,--out", sweep_out, "CSV path (default stdout)");

  OpCounters counts;
  CostModel cost;
  std::string report_path;
  auto *cost_cmd = app.add_subcommand("cost-estimate", "Seconds for the given operation counts");
  cost_cmd->add_option("--add", counts.n_add, "Number of additions");
  cost_cmd->add_option("--pmult", counts.n_pmult, "Number of plaintext multiplications");
  cost_cmd->add_option("--cmult", counts.n_cmult, "Number of ciphertext multiplications");
  cost_cmd->add_option("--rot", counts.n_rot, "Number of rotations");
  cost_cmd->add_option("--boot", counts.n_boot, "Number of bootstraps");
  cost_cmd->add_option("--report", report_path, "Take counts from a softmax-eval JSON report");
  cost_cmd->add_option("--t-add", cost.t_add, "Seconds per addition")->capture_default_str();
  cost_cmd->add_option("--t-pmult", cost.t_pmult, "Seconds per plaintext multiplication")->capture_default_str();
  cost_cmd->add_option("--t-cmult", cost.t_cmult, "Seconds per ciphertext multiplication")->capture_default_str();
  cost_cmd->add_option("--t-rot", cost.t_rot, "Seconds per rotation")->capture_default_str();
  cost_cmd->add_option("--t-boot", cost.t_boot, "Seconds per bootstrap")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  try {
    if (*eval) {
      return softmax_eval(eval_flags);
    }
    if (*cmp) {
      return compare(compare_flags);
    }
    if (*depth) {
      return depth_table(depth_flags, k_min, k_max, with_baseline);
    }
    if (*sweep) {
      McOptions options;
      options.threads = threads;
      options.mode = mode == "true" ? McMode::kTrueParameters : McMode::kEstimatedParameters;
      const auto rows = error_sweep(parse_list<double>(deltas, "--deltas"), parse_list<std::size_t>(ns, "--ns"),
                                    parse_list<double>(sigmas, "--sigmas"), trials, sweep_seed, options);
      if (sweep_out.empty()) {
        write_sweep_csv(std::cout, rows);
      } else {
        std::ofstream out(sweep_out);
        if (!out) {
          throw IoError("cannot write '" + sweep_out + "'");
        }
        write_sweep_csv(out, rows);
      }
      return 0;
    }
    if (*cost_cmd) {
      cost.validate();
      if (!report_path.empty()) {
        const Json j = read_json_file(report_path);
        const Json &r = j.is_array() ? j.at(0).at("report") : j.contains("report") ? j.at("report") : j;
        counts.n_add = r.value("add", std::uint64_t{0});
        counts.n_pmult = r.value("pmult", std::uint64_t{0});
        counts.n_cmult = r.value("cmult", std::uint64_t{0});
        counts.n_rot = r.value("rot", std::uint64_t{0});
        counts.n_boot = r.value("boot", std::uint64_t{0});
      }
      const CostBreakdown b = estimate_cost(counts, cost);
      std::cout << Json{{"add", b.add},   {"pmult", b.pmult}, {"cmult", b.cmult},
                        {"rot", b.rot},   {"boot", b.boot},   {"total", b.total}}
                       .dump(2)
                << '\n';
      return 0;
    }
  } catch (const ConfigError &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError &e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kConfigError;
  } catch (const nlohmann::json::exception &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kPipelineError;
  }
  return 0;
}
