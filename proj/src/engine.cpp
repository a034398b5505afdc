#include "stableval/engine.hpp"

#include <algorithm>
#include <set>

#include "stableval/errors.hpp"

namespace stableval {

void sampling_params::validate() const {
  if (temperature < 0.0) throw validation_error("temperature must be >= 0");
  if (!(top_p > 0.0) || top_p > 1.0) throw validation_error("top_p must lie in (0, 1]");
  if (top_k && *top_k < -1) throw validation_error("top_k must be -1 or a positive count");
  if (min_p && *min_p < 0.0) throw validation_error("min_p must be >= 0");
  if (max_tokens <= 0) throw validation_error("max_tokens must be positive");
}

namespace {

struct preset_row {
  const char* model;
  double temperature;
  int max_tokens;
  double top_p;
  int top_k;          // -2 marks unset
  double min_p;       // -1 marks unset
  double presence;    // -1000 marks unset
};

constexpr int k32 = 32768;
constexpr int k64 = 65536;

const preset_row k_presets[] = {
    {"DeepSeek-R1-Distill-Qwen-32B", 0.6, k32, 0.95, -2, -1, -1000},
    {"QwQ-32B", 0.6, k32, 0.95, 30, 0.0, 1.0},
    {"Skywork-OR1-32B-Preview", 0.6, k32, 0.95, -2, -1, -1000},
    {"Tiny-R1-32B-preview", 0.6, k32, 0.95, -2, -1, -1000},
    {"DeepSeek-R1-Distill-Qwen-14B", 0.6, k32, 0.95, -2, -1, -1000},
    {"DeepCoder-14B-Preview", 0.6, k64, 0.95, -2, -1, -1000},
    {"Light-R1-14B-DS", 0.6, k32, 0.95, -2, -1, -1000},
    {"DeepSeek-R1-Distill-Qwen-7B", 0.6, k32, 0.95, -2, -1, -1000},
    {"Light-R1-7B-DS", 0.6, k32, 0.95, -2, -1, -1000},
    {"Skywork-OR1-Math-7B", 0.6, k32, 0.95, -2, -1, -1000},
    {"DeepSeek-R1-Distill-Qwen-1.5B", 0.6, k32, 0.95, -2, -1, -1000},
    {"DeepScaleR-1.5B-Preview", 0.6, k32, 0.95, -2, -1, -1000},
    {"Open-RS1", 0.6, k32, 0.95, -2, -1, -1000},
    {"Open-RS2", 0.6, k32, 0.95, -2, -1, -1000},
    {"Open-RS3", 0.6, k32, 0.95, -2, -1, -1000},
    {"DeepCoder-1.5B-Preview", 0.6, k32, 0.95, -2, -1, -1000},
    {"ZR1-1.5B", 0.6, k32, 0.95, -2, -1, -1000},
    {"OpenRS-GRPO", 0.6, k32, 0.95, -2, -1, -1000},
    {"FastCuRL-1.5B-Preview", 0.6, k32, 1.0, -1, -1, -1000},
    {"STILL-3-1.5B-preview", 0.6, k32, 0.95, -2, -1, -1000},
};

}  // namespace

sampling_params preset_sampling_params(const std::string& model_name) {
  for (const auto& row : k_presets) {
    if (model_name == row.model) {
      sampling_params params;
      params.temperature = row.temperature;
      params.max_tokens = row.max_tokens;
      params.top_p = row.top_p;
      if (row.top_k != -2) params.top_k = row.top_k;
      if (row.min_p >= 0.0) params.min_p = row.min_p;
      if (row.presence > -1000) params.presence_penalty = row.presence;
      return params;
    }
  }
  throw not_found_error("no sampling preset for model: " + model_name);
}

std::vector<std::string> preset_model_names() {
  std::vector<std::string> names;
  for (const auto& row : k_presets) names.emplace_back(row.model);
  return names;
}

std::string to_string(seed_mode value) {
  switch (value) {
    case seed_mode::dynamic: return "dynamic";
    case seed_mode::fixed: return "fixed";
    case seed_mode::fixed_set: return "fixed_set";
  }
  throw validation_error("bad seed_mode value");
}

seed_mode seed_mode_from_string(const std::string& text) {
  if (text == "dynamic") return seed_mode::dynamic;
  if (text == "fixed") return seed_mode::fixed;
  if (text == "fixed_set") return seed_mode::fixed_set;
  throw validation_error("unknown seed mode: " + text);
}

void seed_policy::validate() const {
  if (mode == seed_mode::fixed_set) {
    if (seeds.empty()) throw validation_error("fixed_set requires at least one seed");
    std::set<uint64_t> distinct(seeds.begin(), seeds.end());
    if (distinct.size() != seeds.size()) {
      throw validation_error("fixed_set seeds must be distinct");
    }
  }
}

attempt_plan plan_attempts(int n, const seed_policy& seeds, const benchmark_set& set,
                           const fingerprint_fn& fingerprint_of, const entropy_source& entropy) {
  if (n < 1) throw validation_error("replication count must be at least 1");
  seeds.validate();
  if (seeds.mode == seed_mode::fixed_set) {
    throw validation_error("fixed_set policies expand to one plan per seed; plan each seed "
                           "with a fixed policy");
  }
  if (seeds.mode == seed_mode::dynamic && !entropy) {
    throw validation_error("dynamic seed policy needs an entropy source");
  }
  if (!fingerprint_of) throw validation_error("fingerprint function must be set");

  attempt_plan plan;
  plan.entries.reserve(static_cast<size_t>(n) * set.samples.size());
  for (int attempt = 0; attempt < n; ++attempt) {
    for (const auto& sample : set.samples) {
      plan_entry entry;
      entry.sample_id = sample.sample_id;
      entry.attempt_index = attempt;
      entry.seed = seeds.mode == seed_mode::dynamic ? entropy() : seeds.seed;
      entry.prompt_fingerprint = fingerprint_of(sample);
      plan.entries.push_back(std::move(entry));
    }
  }
  return plan;
}

std::string to_string(finish_reason value) {
  switch (value) {
    case finish_reason::stop: return "stop";
    case finish_reason::length: return "length";
    case finish_reason::error: return "error";
  }
  throw validation_error("bad finish_reason value");
}

finish_reason finish_reason_from_string(const std::string& text) {
  if (text == "stop") return finish_reason::stop;
  if (text == "length") return finish_reason::length;
  if (text == "error") return finish_reason::error;
  throw validation_error("unknown finish reason: " + text);
}

double simulated_model_spec::true_mean_percent() const {
  if (per_sample_accuracy.empty()) {
    if (uniform_accuracy >= 0.0) return 100.0 * uniform_accuracy;
    throw validation_error("simulated spec holds no samples");
  }
  double total = 0.0;
  for (const auto& [id, p] : per_sample_accuracy) total += p;
  return 100.0 * total / static_cast<double>(per_sample_accuracy.size());
}

void simulated_model_spec::validate() const {
  if (per_sample_accuracy.empty() && uniform_accuracy < 0.0) {
    throw validation_error("simulated spec needs per-sample accuracies or a uniform accuracy");
  }
  for (const auto& [id, p] : per_sample_accuracy) {
    if (p < 0.0 || p > 1.0) {
      throw validation_error("per-sample accuracy outside [0, 1] for sample: " + id);
    }
  }
  if (uniform_accuracy > 1.0) {
    throw validation_error("uniform accuracy outside [0, 1]");
  }
  if (seed_sensitivity < 0.0 || seed_sensitivity > 1.0) {
    throw validation_error("seed_sensitivity must lie in [0, 1]");
  }
}

sim_backend::sim_backend(simulated_model_spec spec) : spec_(std::move(spec)) {
  spec_.validate();
}

double sim_backend::accuracy_of(const std::string& sample_id) const {
  auto it = spec_.per_sample_accuracy.find(sample_id);
  if (it != spec_.per_sample_accuracy.end()) return it->second;
  if (spec_.uniform_accuracy >= 0.0) return spec_.uniform_accuracy;
  throw not_found_error("simulated spec does not cover sample: " + sample_id);
}

bool sim_backend::attempt_varies(const std::string& sample_id, uint64_t seed,
                                 int attempt_index) const {
  if (spec_.seed_sensitivity >= 1.0) return false;
  if (spec_.seed_sensitivity <= 0.0) return true;
  keyed_prng gate(keyed_prng::derive_key({"sim-vary", sample_id, std::to_string(seed),
                              std::to_string(attempt_index)}));
  return gate.uniform01() < 1.0 - spec_.seed_sensitivity;
}

bool sim_backend::sim_outcome(const std::string& sample_id, uint64_t seed,
                              int attempt_index) const {
  const double p = accuracy_of(sample_id);
  const std::string seed_text = std::to_string(seed);
  keyed_prng draw =
      attempt_varies(sample_id, seed, attempt_index)
          ? keyed_prng(keyed_prng::derive_key(
                {"sim-outcome", sample_id, seed_text, std::to_string(attempt_index)}))
          : keyed_prng(keyed_prng::derive_key({"sim-outcome", sample_id, seed_text}));
  return draw.uniform01() < p;
}

completion sim_backend::complete(const rendered_prompt& prompt, const sampling_params& params,
                                 const attempt_context& ctx) {
  params.validate();
  const bool correct = sim_outcome(ctx.sample_id, ctx.seed, ctx.attempt_index);
  const bool varies = attempt_varies(ctx.sample_id, ctx.seed, ctx.attempt_index);
  const std::string seed_text = std::to_string(ctx.seed);

  std::string answer;
  if (prompt.is_mcq) {
    if (correct) {
      answer = std::string(1, prompt.letter_answer);
    } else {
      keyed_prng pick = varies
                            ? keyed_prng(keyed_prng::derive_key({"sim-wrong", ctx.sample_id, seed_text,
                                                     std::to_string(ctx.attempt_index)}))
                            : keyed_prng(keyed_prng::derive_key({"sim-wrong", ctx.sample_id, seed_text}));
      int offset = static_cast<int>(pick.uniform_below(3)) + 1;
      char letter = static_cast<char>('A' + (prompt.letter_answer - 'A' + offset) % 4);
      answer = std::string(1, letter);
    }
  } else {
    const int value =
        correct ? prompt.integer_answer : (prompt.integer_answer + 1) % 1000;
    answer = std::to_string(value);
  }

  completion out;
  out.text = "Simulated reasoning trace for " + ctx.sample_id + " under seed " + seed_text +
             ". The final answer is \\boxed{" + answer + "}.";
  out.finish = finish_reason::stop;
  out.prompt_tokens = static_cast<int>(prompt.text.size() / 4 + 1);
  out.completion_tokens = static_cast<int>(out.text.size() / 4 + 1);
  out.latency_ms = 0;
  return out;
}

}  // namespace stableval
