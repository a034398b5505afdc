#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "stableval/corpus.hpp"
#include "stableval/engine.hpp"
#include "stableval/promptgen.hpp"
#include "stableval/stats.hpp"
#include "stableval/store.hpp"

namespace stableval {

struct eval_config {
  std::string benchmark_id;
  std::string dataset_path;
  std::string dataset_version_id;
  std::string registry_path;  // when set, the version must resolve against it
  field_mapping mapping;
  int n = 64;
  seed_policy seeds;
  instruction_policy instruction;  // empty text resolves to the benchmark default
  layout_spec layout;
  uint64_t layout_seed = 0;
  sampling_params sampling;
  std::string backend_kind = "simulated";  // simulated | http
  endpoint_config endpoint;
  simulated_model_spec sim;
  std::map<std::string, std::string> metadata;
  // storage address only; two series of the same config (a repeated trial)
  // differ here and nowhere else
  std::string series_id;
};

// canonical serialization; the API key and the series_id address never enter
// it, so the hash covers semantics only
nlohmann::json config_to_json(const eval_config& cfg);
eval_config config_from_json(const nlohmann::json& doc);
eval_config load_config(const std::string& path);
std::string config_hash(const eval_config& cfg);
std::string resolve_series_id(const eval_config& cfg);

// environment overrides for live endpoints
extern const char* const env_base_url;
extern const char* const env_api_key;
void apply_env_overrides(eval_config& cfg);

// thrown by the test hook that kills a run mid-flight
class interrupted_error : public error {
 public:
  using error::error;
};

struct run_options {
  int concurrency = 1;
  // abort with interrupted_error once this many new records are persisted;
  // negative disables the hook
  long interrupt_after = -1;
  entropy_source entropy;  // defaults to os_entropy64
};

// executes (or resumes) the config's series until n complete runs exist and
// returns their scores; reruns of an already complete series execute nothing
score_series run_experiment(const eval_config& cfg, run_store& store,
                            const run_options& opts = {});

// expands a fixed_set policy into one sub-series per seed, in seed-list order
std::vector<std::pair<uint64_t, score_series>> run_seed_sweep(const eval_config& cfg,
                                                              run_store& store,
                                                              const run_options& opts = {});

// per-run scores currently stored for the config's series: the fixture score
// column when one exists, otherwise scores aggregated from complete runs
std::vector<double> series_scores(const eval_config& cfg, run_store& store);

// same lookup addressed by series id directly
std::vector<double> series_scores(run_store& store, const std::string& series_id);

enum class group_role { control, experimental, repeated_trial };

std::string to_string(group_role role);
group_role group_role_from_string(const std::string& text);

struct experiment_group {
  std::string name;
  eval_config config;
  group_role role = group_role::experimental;
};

struct fluctuation_row {
  std::string name;
  group_role role = group_role::experimental;
  double mean = 0.0;
  double fluctuation_points = 0.0;
};

struct fluctuation_table {
  std::string benchmark_id;
  std::string control_name;
  double control_mean = 0.0;
  int control_n = 0;
  std::vector<fluctuation_row> rows;
};

// means are taken over the first control_n runs of every group; a repeated
// trial must hash identically to the control
fluctuation_table compare_groups(const std::vector<experiment_group>& groups, run_store& store);

struct stability_estimate {
  stability_result result;
  std::string series_id;
  int new_runs = 0;
};

// drives the adaptive procedure against the config's series, persisting as it
// goes; a series with an imported fixture column is replayed with the budget
// clamped to the stored run count, so it never executes new attempts
stability_estimate estimate_stability(const eval_config& cfg, const stability_params& params,
                                      run_store& store, const run_options& opts = {});

struct fixture_import {
  std::string prefix;
  std::vector<std::string> benchmarks;  // order of first appearance in the file
  std::map<std::string, std::vector<double>> scores;
  std::map<std::string, std::string> series_ids;
};

// CSV columns: run_index, benchmark, score; creates one series per benchmark
// under "<prefix>/<benchmark>" with the scores as its fixture column
fixture_import import_fixture(const std::string& csv_path, const std::string& prefix,
                              run_store& store);

// convenience for pointing a config at an imported fixture series
eval_config fixture_series_config(const std::string& benchmark_id, const std::string& series_id,
                                  int n);

}  // namespace stableval
