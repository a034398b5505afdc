#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stableval/corpus.hpp"

namespace stableval {

extern const char* const default_math_instruction;
extern const char* const default_mcq_instruction;

enum class instruction_position { before_question, after_question };

std::string to_string(instruction_position value);
instruction_position instruction_position_from_string(const std::string& text);

struct instruction_policy {
  std::string text;  // empty until resolved; rendering an empty instruction is an error
  instruction_position position = instruction_position::after_question;
  std::string separator = " ";
};

// fills in the benchmark-appropriate default text when the policy leaves it empty
instruction_policy resolve_instruction(const instruction_policy& policy, answer_kind kind);

enum class layout_group { control, option_bias, answer_position, randomized };
enum class option_bias_variant { bacd, cabd, dabc };
enum class option_bias_mode { label_permutation, content_permutation };

std::string to_string(layout_group value);
layout_group layout_group_from_string(const std::string& text);
std::string to_string(option_bias_variant value);
option_bias_variant option_bias_variant_from_string(const std::string& text);
std::string to_string(option_bias_mode value);
option_bias_mode option_bias_mode_from_string(const std::string& text);

struct layout_spec {
  layout_group group = layout_group::control;
  option_bias_variant bias_variant = option_bias_variant::bacd;  // option_bias only
  option_bias_mode bias_mode = option_bias_mode::label_permutation;
  char position_target = 'B';  // answer_position only, one of B C D
};

// one displayed option row; content_ref 0 is the correct content, 1..3 the distractors
struct displayed_row {
  char label = 'A';
  int content_ref = 0;
};

struct mcq_layout {
  std::string sample_id;
  layout_group group = layout_group::control;
  std::vector<displayed_row> rows;
  char correct_label = 'A';
  std::string fingerprint;
};

mcq_layout make_layout(const std::string& sample_id, const layout_spec& spec,
                       uint64_t experiment_seed);

struct rendered_prompt {
  std::string text;
  bool is_mcq = false;
  int integer_answer = 0;   // answer key view for integer benchmarks
  char letter_answer = 'A'; // answer key view for MCQ benchmarks
  std::string layout_fingerprint;
};

rendered_prompt render_math_prompt(const benchmark_sample& sample,
                                   const instruction_policy& policy);

rendered_prompt render_mcq_prompt(const benchmark_sample& sample, const mcq_layout& layout,
                                  const instruction_policy& policy);

}  // namespace stableval
