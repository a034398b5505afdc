#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stableval/corpus.hpp"
#include "stableval/promptgen.hpp"
#include "stableval/rng.hpp"

namespace stableval {

struct sampling_params {
  double temperature = 0.6;
  double top_p = 0.95;
  std::optional<int> top_k;  // -1 disables the filter explicitly
  std::optional<double> min_p;
  std::optional<double> presence_penalty;
  int max_tokens = 32768;

  void validate() const;
};

// inference presets for the models the harness was tuned against
sampling_params preset_sampling_params(const std::string& model_name);
std::vector<std::string> preset_model_names();

enum class seed_mode { dynamic, fixed, fixed_set };

std::string to_string(seed_mode value);
seed_mode seed_mode_from_string(const std::string& text);

struct seed_policy {
  seed_mode mode = seed_mode::dynamic;
  uint64_t seed = 0;            // fixed mode
  std::vector<uint64_t> seeds;  // fixed_set mode

  void validate() const;
};

struct plan_entry {
  std::string sample_id;
  int attempt_index = 0;
  uint64_t seed = 0;
  std::string prompt_fingerprint;
};

struct attempt_plan {
  std::vector<plan_entry> entries;
};

// maps each sample to a stable fingerprint of the prompt it will receive
using fingerprint_fn = std::function<std::string(const benchmark_sample&)>;

// lays out n full passes over the set, run-major, drawing dynamic seeds from
// the supplied entropy source; fixed_set policies must be expanded by the
// caller into one plan per seed
attempt_plan plan_attempts(int n, const seed_policy& seeds, const benchmark_set& set,
                           const fingerprint_fn& fingerprint_of, const entropy_source& entropy);

enum class finish_reason { stop, length, error };

std::string to_string(finish_reason value);
finish_reason finish_reason_from_string(const std::string& text);

struct completion {
  std::string text;
  finish_reason finish = finish_reason::stop;
  int prompt_tokens = 0;
  int completion_tokens = 0;
  long latency_ms = 0;
};

struct attempt_context {
  std::string sample_id;
  int attempt_index = 0;
  uint64_t seed = 0;
};

class backend {
 public:
  virtual ~backend() = default;
  virtual completion complete(const rendered_prompt& prompt, const sampling_params& params,
                              const attempt_context& ctx) = 0;
};

struct simulated_model_spec {
  std::map<std::string, double> per_sample_accuracy;
  // fallback accuracy for samples the map does not cover; negative means none
  double uniform_accuracy = -1.0;
  // 1 ties an outcome to (sample, seed) alone; 0 redraws it per attempt
  double seed_sensitivity = 0.0;

  double true_mean_percent() const;
  void validate() const;
};

class sim_backend : public backend {
 public:
  explicit sim_backend(simulated_model_spec spec);

  completion complete(const rendered_prompt& prompt, const sampling_params& params,
                      const attempt_context& ctx) override;

  // the internal correctness draw, exposed so graded verdicts can be audited
  // against the backend's own coin flips
  bool sim_outcome(const std::string& sample_id, uint64_t seed, int attempt_index) const;

  const simulated_model_spec& spec() const { return spec_; }

 private:
  bool attempt_varies(const std::string& sample_id, uint64_t seed, int attempt_index) const;
  double accuracy_of(const std::string& sample_id) const;

  simulated_model_spec spec_;
};

struct endpoint_config {
  std::string base_url;  // e.g. http://127.0.0.1:8000/v1
  std::string api_key;
  std::string model;
  int max_retries = 4;
  long backoff_base_ms = 250;
  int timeout_seconds = 600;
};

// OpenAI-compatible chat-completions client; declared here, lives in its own
// translation unit
class http_backend : public backend {
 public:
  explicit http_backend(endpoint_config config);

  completion complete(const rendered_prompt& prompt, const sampling_params& params,
                      const attempt_context& ctx) override;

  // injectable so tests exercise the retry schedule without real waits
  std::function<void(long)> sleeper;

 private:
  endpoint_config config_;
};

}  // namespace stableval
