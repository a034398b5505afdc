#include "stableval/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "stableval/grading.hpp"
#include "stableval/util.hpp"

namespace stableval {

using nlohmann::json;

const char* const env_base_url = "STABLEVAL_BASE_URL";
const char* const env_api_key = "STABLEVAL_API_KEY";

json config_to_json(const eval_config& cfg) {
  json doc;
  doc["benchmark_id"] = cfg.benchmark_id;
  doc["dataset_path"] = cfg.dataset_path;
  doc["dataset_version_id"] = cfg.dataset_version_id;
  doc["registry_path"] = cfg.registry_path;

  json mapping;
  mapping["kind"] = to_string(cfg.mapping.kind);
  mapping["id_field"] = cfg.mapping.id_field;
  mapping["question_field"] = cfg.mapping.question_field;
  mapping["answer_field"] = cfg.mapping.answer_field;
  mapping["correct_field"] = cfg.mapping.correct_field;
  mapping["distractors_field"] = cfg.mapping.distractors_field;
  doc["mapping"] = mapping;

  doc["n"] = cfg.n;

  json seeds;
  seeds["mode"] = to_string(cfg.seeds.mode);
  if (cfg.seeds.mode == seed_mode::fixed) seeds["seed"] = cfg.seeds.seed;
  if (cfg.seeds.mode == seed_mode::fixed_set) seeds["seeds"] = cfg.seeds.seeds;
  doc["seeds"] = seeds;

  json instruction;
  instruction["text"] = cfg.instruction.text;
  instruction["position"] = to_string(cfg.instruction.position);
  instruction["separator"] = cfg.instruction.separator;
  doc["instruction"] = instruction;

  json layout;
  layout["group"] = to_string(cfg.layout.group);
  layout["bias_variant"] = to_string(cfg.layout.bias_variant);
  layout["bias_mode"] = to_string(cfg.layout.bias_mode);
  layout["position_target"] = std::string(1, cfg.layout.position_target);
  doc["layout"] = layout;
  doc["layout_seed"] = cfg.layout_seed;

  json sampling;
  sampling["temperature"] = cfg.sampling.temperature;
  sampling["top_p"] = cfg.sampling.top_p;
  if (cfg.sampling.top_k) sampling["top_k"] = *cfg.sampling.top_k;
  if (cfg.sampling.min_p) sampling["min_p"] = *cfg.sampling.min_p;
  if (cfg.sampling.presence_penalty) {
    sampling["presence_penalty"] = *cfg.sampling.presence_penalty;
  }
  sampling["max_tokens"] = cfg.sampling.max_tokens;
  doc["sampling"] = sampling;

  doc["backend"] = cfg.backend_kind;

  json endpoint;
  endpoint["base_url"] = cfg.endpoint.base_url;
  endpoint["model"] = cfg.endpoint.model;
  endpoint["max_retries"] = cfg.endpoint.max_retries;
  endpoint["backoff_base_ms"] = cfg.endpoint.backoff_base_ms;
  endpoint["timeout_seconds"] = cfg.endpoint.timeout_seconds;
  doc["endpoint"] = endpoint;

  json sim;
  sim["per_sample_accuracy"] = cfg.sim.per_sample_accuracy;
  sim["uniform_accuracy"] = cfg.sim.uniform_accuracy;
  sim["seed_sensitivity"] = cfg.sim.seed_sensitivity;
  doc["sim"] = sim;

  doc["metadata"] = cfg.metadata;
  return doc;
}

eval_config config_from_json(const json& doc) {
  eval_config cfg;
  cfg.benchmark_id = doc.value("benchmark_id", std::string());
  cfg.dataset_path = doc.value("dataset_path", std::string());
  cfg.dataset_version_id = doc.value("dataset_version_id", std::string());
  cfg.registry_path = doc.value("registry_path", std::string());

  if (doc.contains("mapping")) {
    const json& mapping = doc["mapping"];
    if (mapping.contains("kind")) {
      cfg.mapping.kind = answer_kind_from_string(mapping["kind"].get<std::string>());
    }
    cfg.mapping.id_field = mapping.value("id_field", cfg.mapping.id_field);
    cfg.mapping.question_field = mapping.value("question_field", cfg.mapping.question_field);
    cfg.mapping.answer_field = mapping.value("answer_field", cfg.mapping.answer_field);
    cfg.mapping.correct_field = mapping.value("correct_field", cfg.mapping.correct_field);
    cfg.mapping.distractors_field =
        mapping.value("distractors_field", cfg.mapping.distractors_field);
  }

  cfg.n = doc.value("n", 64);

  if (doc.contains("seeds")) {
    const json& seeds = doc["seeds"];
    cfg.seeds.mode = seed_mode_from_string(seeds.value("mode", std::string("dynamic")));
    if (seeds.contains("seed")) cfg.seeds.seed = seeds["seed"].get<uint64_t>();
    if (seeds.contains("seeds")) {
      cfg.seeds.seeds = seeds["seeds"].get<std::vector<uint64_t>>();
    }
  }

  if (doc.contains("instruction")) {
    const json& instruction = doc["instruction"];
    cfg.instruction.text = instruction.value("text", std::string());
    if (instruction.contains("position")) {
      cfg.instruction.position =
          instruction_position_from_string(instruction["position"].get<std::string>());
    }
    cfg.instruction.separator = instruction.value("separator", std::string(" "));
  }

  if (doc.contains("layout")) {
    const json& layout = doc["layout"];
    if (layout.contains("group")) {
      cfg.layout.group = layout_group_from_string(layout["group"].get<std::string>());
    }
    if (layout.contains("bias_variant")) {
      cfg.layout.bias_variant =
          option_bias_variant_from_string(layout["bias_variant"].get<std::string>());
    }
    if (layout.contains("bias_mode")) {
      cfg.layout.bias_mode =
          option_bias_mode_from_string(layout["bias_mode"].get<std::string>());
    }
    if (layout.contains("position_target")) {
      const std::string target = layout["position_target"].get<std::string>();
      if (target.size() != 1) throw validation_error("position_target must be one letter");
      cfg.layout.position_target = target[0];
    }
  }
  cfg.layout_seed = doc.value("layout_seed", static_cast<uint64_t>(0));

  if (doc.contains("sampling_preset")) {
    cfg.sampling = preset_sampling_params(doc["sampling_preset"].get<std::string>());
  }
  if (doc.contains("sampling")) {
    const json& sampling = doc["sampling"];
    cfg.sampling.temperature = sampling.value("temperature", cfg.sampling.temperature);
    cfg.sampling.top_p = sampling.value("top_p", cfg.sampling.top_p);
    if (sampling.contains("top_k")) cfg.sampling.top_k = sampling["top_k"].get<int>();
    if (sampling.contains("min_p")) cfg.sampling.min_p = sampling["min_p"].get<double>();
    if (sampling.contains("presence_penalty")) {
      cfg.sampling.presence_penalty = sampling["presence_penalty"].get<double>();
    }
    cfg.sampling.max_tokens = sampling.value("max_tokens", cfg.sampling.max_tokens);
  }

  cfg.backend_kind = doc.value("backend", std::string("simulated"));

  if (doc.contains("endpoint")) {
    const json& endpoint = doc["endpoint"];
    cfg.endpoint.base_url = endpoint.value("base_url", std::string());
    cfg.endpoint.model = endpoint.value("model", std::string());
    cfg.endpoint.api_key = endpoint.value("api_key", std::string());
    cfg.endpoint.max_retries = endpoint.value("max_retries", cfg.endpoint.max_retries);
    cfg.endpoint.backoff_base_ms =
        endpoint.value("backoff_base_ms", cfg.endpoint.backoff_base_ms);
    cfg.endpoint.timeout_seconds =
        endpoint.value("timeout_seconds", cfg.endpoint.timeout_seconds);
  }

  if (doc.contains("sim")) {
    const json& sim = doc["sim"];
    if (sim.contains("per_sample_accuracy")) {
      cfg.sim.per_sample_accuracy =
          sim["per_sample_accuracy"].get<std::map<std::string, double>>();
    }
    cfg.sim.uniform_accuracy = sim.value("uniform_accuracy", cfg.sim.uniform_accuracy);
    cfg.sim.seed_sensitivity = sim.value("seed_sensitivity", cfg.sim.seed_sensitivity);
  }

  if (doc.contains("metadata")) {
    cfg.metadata = doc["metadata"].get<std::map<std::string, std::string>>();
  }
  cfg.series_id = doc.value("series_id", std::string());
  return cfg;
}

eval_config load_config(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw parse_error("invalid config JSON in " + path + ": " + e.what());
  }
  eval_config cfg = config_from_json(doc);
  if (cfg.backend_kind == "http") apply_env_overrides(cfg);
  return cfg;
}

void apply_env_overrides(eval_config& cfg) {
  if (const char* base = std::getenv(env_base_url); base && *base) {
    cfg.endpoint.base_url = base;
  }
  if (const char* key = std::getenv(env_api_key); key && *key) {
    cfg.endpoint.api_key = key;
  }
}

std::string config_hash(const eval_config& cfg) {
  return to_hex(fnv1a64(config_to_json(cfg).dump()));
}

std::string resolve_series_id(const eval_config& cfg) {
  return cfg.series_id.empty() ? config_hash(cfg) : cfg.series_id;
}

std::string to_string(group_role role) {
  switch (role) {
    case group_role::control: return "control";
    case group_role::experimental: return "experimental";
    case group_role::repeated_trial: return "repeated_trial";
  }
  throw validation_error("bad group_role value");
}

group_role group_role_from_string(const std::string& text) {
  if (text == "control") return group_role::control;
  if (text == "experimental") return group_role::experimental;
  if (text == "repeated_trial") return group_role::repeated_trial;
  throw validation_error("unknown group role: " + text);
}

namespace {

void validate_config(const eval_config& cfg) {
  if (cfg.benchmark_id.empty()) throw validation_error("benchmark_id must be set");
  if (cfg.n < 1) throw validation_error("replication count must be at least 1");
  cfg.seeds.validate();
  cfg.sampling.validate();
  if (cfg.backend_kind != "simulated" && cfg.backend_kind != "http") {
    throw validation_error("unknown backend kind: " + cfg.backend_kind);
  }
  if (!cfg.registry_path.empty()) {
    const version_registry registry = version_registry::from_file(cfg.registry_path);
    if (!registry.contains(cfg.dataset_version_id)) {
      throw validation_error("config references unknown dataset version: " +
                             cfg.dataset_version_id);
    }
  }
}

std::unique_ptr<backend> make_backend(const eval_config& cfg) {
  if (cfg.backend_kind == "simulated") return std::make_unique<sim_backend>(cfg.sim);
  return std::make_unique<http_backend>(cfg.endpoint);
}

rendered_prompt build_prompt(const eval_config& cfg, const benchmark_sample& sample) {
  const instruction_policy policy = resolve_instruction(cfg.instruction, sample.kind);
  if (sample.kind == answer_kind::mcq) {
    const mcq_layout layout = make_layout(sample.sample_id, cfg.layout, cfg.layout_seed);
    return render_mcq_prompt(sample, layout, policy);
  }
  return render_math_prompt(sample, policy);
}

std::string fingerprint_of_prompt(const rendered_prompt& prompt) {
  uint64_t h = fnv1a64(prompt.text);
  if (prompt.is_mcq) {
    h = fnv1a64(h, "\x1f");
    h = fnv1a64(h, prompt.layout_fingerprint);
  }
  return to_hex(h);
}

verdict grade_completion(const rendered_prompt& prompt, const std::string& text) {
  if (prompt.is_mcq) return grade_mcq(extract_mcq_letter(text), prompt.letter_answer);
  return grade_integer(extract_boxed(text), prompt.integer_answer);
}

// run scores for attempt indices [0, max_runs) where every planned sample has
// a record; stops at the first incomplete run
std::vector<double> aggregate_run_scores(const std::vector<plan_entry>& plan,
                                         const std::vector<attempt_record>& records,
                                         long max_runs) {
  std::set<std::string> universe;
  for (const auto& entry : plan) {
    if (entry.attempt_index == 0) universe.insert(entry.sample_id);
  }
  if (universe.empty()) return {};

  std::map<int, long> correct_by_run;
  std::map<int, long> total_by_run;
  for (const auto& record : records) {
    if (!universe.count(record.sample_id)) continue;
    ++total_by_run[record.attempt_index];
    if (record.result.status == verdict_status::correct) ++correct_by_run[record.attempt_index];
  }

  std::vector<double> scores;
  const long sample_count = static_cast<long>(universe.size());
  for (int run = 0; max_runs < 0 || run < max_runs; ++run) {
    auto it = total_by_run.find(run);
    if (it == total_by_run.end() || it->second < sample_count) break;
    scores.push_back(100.0 * static_cast<double>(correct_by_run[run]) /
                     static_cast<double>(sample_count));
  }
  return scores;
}

void write_manifest_if_absent(const eval_config& cfg, const benchmark_set& set,
                              run_store& store, const std::string& series_id) {
  if (store.get_manifest(series_id)) return;
  json manifest;
  manifest["series_id"] = series_id;
  manifest["config_hash"] = config_hash(cfg);
  manifest["config"] = config_to_json(cfg);
  manifest["provenance"] = "run";
  manifest["benchmark_id"] = cfg.benchmark_id;
  manifest["dataset_version_id"] = cfg.dataset_version_id;
  manifest["dataset_fingerprint"] = dataset_fingerprint(set);
  manifest["sample_count"] = set.samples.size();
  const instruction_policy resolved =
      resolve_instruction(cfg.instruction, set.samples.front().kind);
  manifest["resolved_instruction"] = {{"text", resolved.text},
                                      {"position", to_string(resolved.position)},
                                      {"separator", resolved.separator}};
  manifest["prng"] =
      "counter-based 64-bit mixer; streams keyed by length-prefixed FNV-1a over labeled parts";
  store.put_manifest(series_id, manifest);
}

void check_series_owner(const eval_config& cfg, run_store& store,
                        const std::string& series_id) {
  const auto manifest = store.get_manifest(series_id);
  if (!manifest) return;
  if (manifest->contains("config_hash") &&
      (*manifest)["config_hash"].get<std::string>() != config_hash(cfg)) {
    throw conflict_error("series '" + series_id + "' belongs to a different configuration");
  }
}

struct execution_state {
  std::map<std::string, rendered_prompt> prompts;
};

void execute_pending(const eval_config& cfg, run_store& store, const std::string& series_id,
                     const std::vector<plan_entry>& pending, const execution_state& state,
                     const run_options& opts, int* new_records) {
  if (pending.empty()) return;
  auto engine_backend = make_backend(cfg);
  const std::string hash = config_hash(cfg);

  std::mutex sink;
  std::atomic<size_t> cursor{0};
  std::atomic<bool> stop{false};
  bool interrupted = false;
  long appended = 0;
  std::exception_ptr failure;

  auto worker = [&]() {
    for (;;) {
      if (stop.load(std::memory_order_relaxed)) return;
      const size_t i = cursor.fetch_add(1, std::memory_order_relaxed);
      if (i >= pending.size()) return;
      const plan_entry& entry = pending[i];
      try {
        const rendered_prompt& prompt = state.prompts.at(entry.sample_id);
        attempt_context ctx;
        ctx.sample_id = entry.sample_id;
        ctx.attempt_index = entry.attempt_index;
        ctx.seed = entry.seed;

        attempt_record record;
        record.config_hash = hash;
        record.sample_id = entry.sample_id;
        record.attempt_index = entry.attempt_index;
        record.seed = entry.seed;
        record.prompt_fingerprint = entry.prompt_fingerprint;
        record.started_ms = now_ms();
        const completion result = engine_backend->complete(prompt, cfg.sampling, ctx);
        record.finished_ms = now_ms();
        record.completion_text = result.text;
        record.finish = result.finish;
        record.result = grade_completion(prompt, result.text);

        std::lock_guard<std::mutex> lock(sink);
        if (opts.interrupt_after >= 0 && appended >= opts.interrupt_after) {
          interrupted = true;
          stop.store(true, std::memory_order_relaxed);
          return;
        }
        store.append_record(series_id, record);
        ++appended;
        if (new_records) ++*new_records;
      } catch (...) {
        std::lock_guard<std::mutex> lock(sink);
        if (!failure) failure = std::current_exception();
        stop.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  const int thread_count = std::max(1, opts.concurrency);
  if (thread_count == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  if (failure) std::rethrow_exception(failure);
  if (interrupted) {
    throw interrupted_error("run interrupted after " + std::to_string(appended) +
                            " persisted records");
  }
}

// brings the series up to target_runs complete runs and returns their scores
std::vector<double> ensure_runs(const eval_config& cfg, const benchmark_set& set,
                                run_store& store, const std::string& series_id,
                                long target_runs, const run_options& opts,
                                int* new_records = nullptr) {
  if (const auto fixture = store.fixture_scores(series_id)) {
    if (static_cast<long>(fixture->size()) < target_runs) {
      throw insufficient_data_error(
          "fixture series '" + series_id + "' holds " + std::to_string(fixture->size()) +
          " runs, need " + std::to_string(target_runs));
    }
    return std::vector<double>(fixture->begin(), fixture->begin() + target_runs);
  }

  check_series_owner(cfg, store, series_id);

  execution_state state;
  for (const auto& sample : set.samples) {
    state.prompts.emplace(sample.sample_id, build_prompt(cfg, sample));
  }

  std::vector<plan_entry> plan = store.plan(series_id);
  long planned_runs = 0;
  for (const auto& entry : plan) {
    planned_runs = std::max(planned_runs, static_cast<long>(entry.attempt_index) + 1);
  }

  if (planned_runs < target_runs) {
    write_manifest_if_absent(cfg, set, store, series_id);
    const entropy_source entropy = opts.entropy ? opts.entropy : entropy_source(os_entropy64);
    std::vector<plan_entry> extension;
    extension.reserve(static_cast<size_t>(target_runs - planned_runs) * set.samples.size());
    for (long attempt = planned_runs; attempt < target_runs; ++attempt) {
      for (const auto& sample : set.samples) {
        plan_entry entry;
        entry.sample_id = sample.sample_id;
        entry.attempt_index = static_cast<int>(attempt);
        entry.seed = cfg.seeds.mode == seed_mode::dynamic ? entropy() : cfg.seeds.seed;
        entry.prompt_fingerprint = fingerprint_of_prompt(state.prompts.at(sample.sample_id));
        extension.push_back(std::move(entry));
      }
    }
    store.append_plan(series_id, extension);
    plan.insert(plan.end(), extension.begin(), extension.end());
  }

  const std::vector<attempt_record> existing = store.records(series_id);
  std::set<std::pair<std::string, int>> done;
  for (const auto& record : existing) done.insert({record.sample_id, record.attempt_index});

  std::vector<plan_entry> pending;
  for (const auto& entry : plan) {
    if (entry.attempt_index >= target_runs) continue;
    if (!done.count({entry.sample_id, entry.attempt_index})) pending.push_back(entry);
  }

  execute_pending(cfg, store, series_id, pending, state, opts, new_records);

  const std::vector<double> scores =
      aggregate_run_scores(plan, store.records(series_id), target_runs);
  if (static_cast<long>(scores.size()) < target_runs) {
    throw integrity_error("series '" + series_id + "' incomplete after execution: " +
                          std::to_string(scores.size()) + " of " +
                          std::to_string(target_runs) + " runs");
  }
  return scores;
}

}  // namespace

score_series run_experiment(const eval_config& cfg, run_store& store, const run_options& opts) {
  validate_config(cfg);
  if (cfg.seeds.mode == seed_mode::fixed_set) {
    throw validation_error("fixed_set policies run one series per seed; use run_seed_sweep");
  }
  const std::string series_id = resolve_series_id(cfg);

  if (const auto fixture = store.fixture_scores(series_id)) {
    if (static_cast<long>(fixture->size()) < cfg.n) {
      throw insufficient_data_error("fixture series '" + series_id + "' holds " +
                                    std::to_string(fixture->size()) + " runs, need " +
                                    std::to_string(cfg.n));
    }
    return summarize(std::vector<double>(fixture->begin(), fixture->begin() + cfg.n));
  }

  const benchmark_set set =
      load_benchmark(cfg.dataset_path, cfg.benchmark_id, cfg.dataset_version_id, cfg.mapping);
  return summarize(ensure_runs(cfg, set, store, series_id, cfg.n, opts));
}

std::vector<std::pair<uint64_t, score_series>> run_seed_sweep(const eval_config& cfg,
                                                              run_store& store,
                                                              const run_options& opts) {
  validate_config(cfg);
  if (cfg.seeds.mode != seed_mode::fixed_set) {
    throw validation_error("run_seed_sweep requires a fixed_set seed policy");
  }
  const std::string base = resolve_series_id(cfg);

  std::vector<std::pair<uint64_t, score_series>> out;
  for (uint64_t seed : cfg.seeds.seeds) {
    eval_config sub = cfg;
    sub.seeds.mode = seed_mode::fixed;
    sub.seeds.seed = seed;
    sub.seeds.seeds.clear();
    sub.series_id = base + "/seed_" + std::to_string(seed);
    out.emplace_back(seed, run_experiment(sub, store, opts));
  }
  return out;
}

std::vector<double> series_scores(const eval_config& cfg, run_store& store) {
  return series_scores(store, resolve_series_id(cfg));
}

std::vector<double> series_scores(run_store& store, const std::string& series_id) {
  if (const auto fixture = store.fixture_scores(series_id)) return *fixture;
  if (!store.has_series(series_id)) return {};
  return aggregate_run_scores(store.plan(series_id), store.records(series_id), -1);
}

fluctuation_table compare_groups(const std::vector<experiment_group>& groups,
                                 run_store& store) {
  if (groups.empty()) throw validation_error("compare_groups needs at least one group");
  const experiment_group* control = nullptr;
  for (const auto& group : groups) {
    if (group.role != group_role::control) continue;
    if (control) throw validation_error("exactly one control group is required");
    control = &group;
  }
  if (!control) throw validation_error("exactly one control group is required");

  const std::string control_hash = config_hash(control->config);
  for (const auto& group : groups) {
    if (group.config.benchmark_id != control->config.benchmark_id) {
      throw validation_error("group '" + group.name + "' targets benchmark '" +
                             group.config.benchmark_id + "' but the control targets '" +
                             control->config.benchmark_id + "'");
    }
    if (group.role == group_role::repeated_trial &&
        config_hash(group.config) != control_hash) {
      throw validation_error("repeated trial '" + group.name +
                             "' does not share the control configuration");
    }
  }

  const int control_n = control->config.n;
  if (control_n < 1) throw validation_error("control group needs n >= 1");

  std::map<std::string, std::vector<double>> scores_by_name;
  std::vector<std::string> missing;
  for (const auto& group : groups) {
    std::vector<double> scores = series_scores(group.config, store);
    if (static_cast<int>(scores.size()) < control_n) {
      missing.push_back(group.name);
      continue;
    }
    scores_by_name[group.name] = std::move(scores);
  }
  if (!missing.empty()) {
    std::string what = "groups not fully run:";
    for (const auto& name : missing) what += " " + name;
    throw incomplete_groups_error(what, missing);
  }

  auto mean_at_control_n = [control_n](const std::vector<double>& scores) {
    return summarize(std::vector<double>(scores.begin(), scores.begin() + control_n)).mean;
  };

  fluctuation_table table;
  table.benchmark_id = control->config.benchmark_id;
  table.control_name = control->name;
  table.control_n = control_n;
  table.control_mean = mean_at_control_n(scores_by_name.at(control->name));
  for (const auto& group : groups) {
    if (group.role == group_role::control) continue;
    fluctuation_row row;
    row.name = group.name;
    row.role = group.role;
    row.mean = mean_at_control_n(scores_by_name.at(group.name));
    row.fluctuation_points = fluctuation(row.mean, table.control_mean);
    table.rows.push_back(std::move(row));
  }
  return table;
}

stability_estimate estimate_stability(const eval_config& cfg, const stability_params& params,
                                      run_store& store, const run_options& opts) {
  validate_config(cfg);
  if (cfg.seeds.mode == seed_mode::fixed_set) {
    throw validation_error("estimate_stability drives a single series; use a fixed or "
                           "dynamic seed policy");
  }
  const std::string series_id = resolve_series_id(cfg);

  stability_estimate estimate;
  estimate.series_id = series_id;

  long served = 0;
  if (const auto fixture = store.fixture_scores(series_id)) {
    stability_params clamped = params;
    clamped.n_cap = static_cast<int>(
        std::min<long>(params.n_cap, static_cast<long>(fixture->size())));
    if (clamped.n_cap < 2) {
      throw insufficient_data_error("fixture series '" + series_id +
                                    "' holds too few runs for estimation");
    }
    const std::vector<double> scores = *fixture;
    score_runner runner = [&served, scores](int count) {
      if (served + count > static_cast<long>(scores.size())) {
        throw insufficient_data_error("fixture runs exhausted");
      }
      std::vector<double> slice(scores.begin() + served, scores.begin() + served + count);
      served += count;
      return slice;
    };
    estimate.result = adaptive_n(runner, clamped);
    return estimate;
  }

  const benchmark_set set =
      load_benchmark(cfg.dataset_path, cfg.benchmark_id, cfg.dataset_version_id, cfg.mapping);
  const long runs_before = static_cast<long>(
      aggregate_run_scores(store.plan(series_id), store.records(series_id), -1).size());

  int new_records = 0;
  score_runner runner = [&](int count) {
    const long target = served + count;
    std::vector<double> all = ensure_runs(cfg, set, store, series_id, target, opts, &new_records);
    std::vector<double> slice(all.begin() + served, all.begin() + target);
    served = target;
    return slice;
  };
  estimate.result = adaptive_n(runner, params);
  estimate.new_runs =
      static_cast<int>(std::max<long>(0, estimate.result.final_series.n - runs_before));
  return estimate;
}

fixture_import import_fixture(const std::string& csv_path, const std::string& prefix,
                              run_store& store) {
  if (prefix.empty()) throw validation_error("fixture prefix must be non-empty");
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw io_error("cannot open fixture CSV: " + csv_path);

  fixture_import result;
  result.prefix = prefix;

  std::string line;
  size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (!saw_header) {
      if (fields.size() != 3 || trim(fields[0]) != "run_index" ||
          trim(fields[1]) != "benchmark" || trim(fields[2]) != "score") {
        throw parse_error("fixture CSV header must be run_index,benchmark,score (line " +
                          std::to_string(line_no) + ")");
      }
      saw_header = true;
      continue;
    }
    if (fields.size() != 3) {
      throw parse_error("fixture row " + std::to_string(line_no) + " needs 3 fields");
    }
    int run_index = 0;
    double score = 0.0;
    try {
      size_t pos = 0;
      run_index = std::stoi(trim(fields[0]), &pos);
      if (pos != trim(fields[0]).size()) throw std::invalid_argument("trailing text");
      const std::string score_text = trim(fields[2]);
      score = std::stod(score_text, &pos);
      if (pos != score_text.size()) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      throw parse_error("malformed fixture row " + std::to_string(line_no));
    }
    const std::string benchmark = trim(fields[1]);
    if (benchmark.empty()) {
      throw parse_error("empty benchmark name on fixture row " + std::to_string(line_no));
    }
    if (score < 0.0 || score > 100.0) {
      throw parse_error("score outside [0, 100] on fixture row " + std::to_string(line_no));
    }
    auto [it, inserted] = result.scores.try_emplace(benchmark);
    if (inserted) result.benchmarks.push_back(benchmark);
    if (run_index != static_cast<int>(it->second.size()) + 1) {
      throw parse_error("run_index out of sequence on fixture row " + std::to_string(line_no) +
                        " (expected " + std::to_string(it->second.size() + 1) + ")");
    }
    it->second.push_back(score);
  }
  if (!saw_header) throw parse_error("fixture CSV is empty: " + csv_path);

  for (const auto& benchmark : result.benchmarks) {
    const std::string series_id = prefix + "/" + benchmark;
    store.put_fixture_scores(series_id, result.scores.at(benchmark));
    json manifest;
    manifest["series_id"] = series_id;
    manifest["provenance"] = "fixture";
    manifest["benchmark_id"] = benchmark;
    manifest["source_csv"] = csv_path;
    manifest["run_count"] = result.scores.at(benchmark).size();
    store.put_manifest(series_id, manifest);
    result.series_ids[benchmark] = series_id;
  }
  return result;
}

eval_config fixture_series_config(const std::string& benchmark_id, const std::string& series_id,
                                  int n) {
  eval_config cfg;
  cfg.benchmark_id = benchmark_id;
  cfg.series_id = series_id;
  cfg.n = n;
  return cfg;
}

}  // namespace stableval
