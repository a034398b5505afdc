#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "stableval/harness.hpp"
#include "stableval/stats.hpp"

namespace stableval {

enum class report_kind { fluctuation, convergence, stability, seed_sweep };
enum class report_format { markdown, csv };

std::string to_string(report_kind value);
report_kind report_kind_from_string(const std::string& text);
std::string to_string(report_format value);
report_format report_format_from_string(const std::string& text);

// one benchmark column: per-run scores plus their running average
struct convergence_series {
  std::string benchmark_id;
  std::vector<double> scores;
};

struct convergence_data {
  std::vector<convergence_series> series;  // all series must have equal length
};

struct stability_data {
  std::string series_id;
  stability_params params;
  stability_result result;
};

struct seed_sweep_entry {
  uint64_t seed = 0;
  std::vector<double> scores;  // one per benchmark, aligned with benchmarks
};

struct seed_sweep_data {
  std::string model;
  std::vector<std::string> benchmarks;
  std::vector<seed_sweep_entry> entries;
};

using report_data =
    std::variant<fluctuation_table, convergence_data, stability_data, seed_sweep_data>;

// parses the long-form CSV (model,seed,benchmark,score); when model_filter is
// non-empty only that model's rows are kept
seed_sweep_data load_seed_sweep_csv(const std::string& path, const std::string& model_filter);

// byte-stable rendering; every percent value is printed at 1 decimal
std::string render_report(report_kind kind, const report_data& data, report_format format);

void emit_report(report_kind kind, const report_data& data, report_format format,
                 const std::string& path);

}  // namespace stableval
