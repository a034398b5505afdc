#include "stableval/promptgen.hpp"

#include <algorithm>
#include <array>

#include "stableval/errors.hpp"
#include "stableval/rng.hpp"
#include "stableval/util.hpp"

namespace stableval {

const char* const default_math_instruction =
    "Let's think step by step and output the final answer within \\boxed{}.";
const char* const default_mcq_instruction =
    "Let's think step by step and output the final answer (the letter of the correct option) "
    "within \\boxed{}.";

std::string to_string(instruction_position value) {
  return value == instruction_position::before_question ? "before_question" : "after_question";
}

instruction_position instruction_position_from_string(const std::string& text) {
  if (text == "before_question") return instruction_position::before_question;
  if (text == "after_question") return instruction_position::after_question;
  throw validation_error("unknown instruction position: " + text);
}

instruction_policy resolve_instruction(const instruction_policy& policy, answer_kind kind) {
  instruction_policy resolved = policy;
  if (resolved.text.empty()) {
    resolved.text =
        kind == answer_kind::mcq ? default_mcq_instruction : default_math_instruction;
  }
  return resolved;
}

std::string to_string(layout_group value) {
  switch (value) {
    case layout_group::control: return "control";
    case layout_group::option_bias: return "option_bias";
    case layout_group::answer_position: return "answer_position";
    case layout_group::randomized: return "randomized";
  }
  throw validation_error("bad layout_group value");
}

layout_group layout_group_from_string(const std::string& text) {
  if (text == "control") return layout_group::control;
  if (text == "option_bias") return layout_group::option_bias;
  if (text == "answer_position") return layout_group::answer_position;
  if (text == "randomized") return layout_group::randomized;
  throw validation_error("unknown layout group: " + text);
}

std::string to_string(option_bias_variant value) {
  switch (value) {
    case option_bias_variant::bacd: return "BACD";
    case option_bias_variant::cabd: return "CABD";
    case option_bias_variant::dabc: return "DABC";
  }
  throw validation_error("bad option_bias_variant value");
}

option_bias_variant option_bias_variant_from_string(const std::string& text) {
  if (text == "BACD") return option_bias_variant::bacd;
  if (text == "CABD") return option_bias_variant::cabd;
  if (text == "DABC") return option_bias_variant::dabc;
  throw validation_error("unknown option bias variant: " + text);
}

std::string to_string(option_bias_mode value) {
  return value == option_bias_mode::label_permutation ? "label_permutation"
                                                      : "content_permutation";
}

option_bias_mode option_bias_mode_from_string(const std::string& text) {
  if (text == "label_permutation") return option_bias_mode::label_permutation;
  if (text == "content_permutation") return option_bias_mode::content_permutation;
  throw validation_error("unknown option bias mode: " + text);
}

namespace {

std::string layout_fingerprint_of(const std::string& sample_id, layout_group group,
                                  const std::vector<displayed_row>& rows, char correct_label) {
  uint64_t h = fnv1a64(sample_id);
  h = fnv1a64(h, "\x1f");
  h = fnv1a64(h, to_string(group));
  for (const auto& row : rows) {
    char buf[4] = {'\x1f', row.label, static_cast<char>('0' + row.content_ref), '\0'};
    h = fnv1a64(h, buf);
  }
  char tail[3] = {'\x1f', correct_label, '\0'};
  h = fnv1a64(h, tail);
  return to_hex(h);
}

// rows with labels A..D in order and the correct content at the given position,
// distractors filling the remaining rows in their source order
std::vector<displayed_row> rows_with_correct_at(int position) {
  std::vector<displayed_row> rows(4);
  int next_distractor = 1;
  for (int i = 0; i < 4; ++i) {
    rows[i].label = static_cast<char>('A' + i);
    rows[i].content_ref = i == position ? 0 : next_distractor++;
  }
  return rows;
}

}  // namespace

mcq_layout make_layout(const std::string& sample_id, const layout_spec& spec,
                       uint64_t experiment_seed) {
  mcq_layout layout;
  layout.sample_id = sample_id;
  layout.group = spec.group;

  switch (spec.group) {
    case layout_group::control: {
      layout.rows = rows_with_correct_at(0);
      layout.correct_label = 'A';
      break;
    }
    case layout_group::answer_position: {
      if (spec.position_target < 'B' || spec.position_target > 'D') {
        throw validation_error("answer_position target must be one of B, C, D");
      }
      layout.rows = rows_with_correct_at(spec.position_target - 'A');
      layout.correct_label = spec.position_target;
      break;
    }
    case layout_group::option_bias: {
      const std::string variant = to_string(spec.bias_variant);
      if (spec.bias_mode == option_bias_mode::label_permutation) {
        // the variant names the label sequence down the displayed rows and the
        // correct content sits in the first displayed row
        layout.rows.resize(4);
        for (int i = 0; i < 4; ++i) {
          layout.rows[i].label = variant[static_cast<size_t>(i)];
          layout.rows[i].content_ref = i;
        }
        layout.correct_label = variant[0];
      } else {
        // the variant names the destination label of each source content, so
        // labels stay A..D and contents move
        layout.rows.resize(4);
        for (int i = 0; i < 4; ++i) {
          layout.rows[i].label = static_cast<char>('A' + i);
          layout.rows[i].content_ref = -1;
        }
        for (int source = 0; source < 4; ++source) {
          const int position = variant[static_cast<size_t>(source)] - 'A';
          layout.rows[static_cast<size_t>(position)].content_ref = source;
        }
        layout.correct_label = variant[0];
      }
      break;
    }
    case layout_group::randomized: {
      keyed_prng prng(keyed_prng::derive_key(
          {"mcq-layout", std::to_string(experiment_seed), sample_id}));
      const int position = static_cast<int>(prng.uniform_below(4));
      layout.rows = rows_with_correct_at(position);
      layout.correct_label = static_cast<char>('A' + position);
      break;
    }
  }

  layout.fingerprint =
      layout_fingerprint_of(layout.sample_id, layout.group, layout.rows, layout.correct_label);
  return layout;
}

rendered_prompt render_math_prompt(const benchmark_sample& sample,
                                   const instruction_policy& policy) {
  if (sample.kind != answer_kind::integer) {
    throw validation_error("render_math_prompt requires an integer-answer sample");
  }
  if (policy.text.empty()) throw validation_error("instruction text must be non-empty");

  rendered_prompt prompt;
  prompt.is_mcq = false;
  prompt.integer_answer = sample.integer_answer;
  if (policy.position == instruction_position::before_question) {
    prompt.text = policy.text + policy.separator + sample.question;
  } else {
    prompt.text = sample.question + policy.separator + policy.text;
  }
  return prompt;
}

rendered_prompt render_mcq_prompt(const benchmark_sample& sample, const mcq_layout& layout,
                                  const instruction_policy& policy) {
  if (sample.kind != answer_kind::mcq) {
    throw validation_error("render_mcq_prompt requires an MCQ sample");
  }
  if (policy.text.empty()) throw validation_error("instruction text must be non-empty");
  if (layout.sample_id != sample.sample_id) {
    throw integrity_error("layout built for sample '" + layout.sample_id +
                          "' used with sample '" + sample.sample_id + "'");
  }
  if (layout.rows.size() != 4) throw integrity_error("layout must hold exactly 4 rows");
  if (layout.fingerprint !=
      layout_fingerprint_of(layout.sample_id, layout.group, layout.rows, layout.correct_label)) {
    throw integrity_error("layout fingerprint mismatch for sample '" + sample.sample_id + "'");
  }

  std::array<bool, 4> seen_ref{};
  std::array<bool, 4> seen_label{};
  for (const auto& row : layout.rows) {
    if (row.label < 'A' || row.label > 'D' || row.content_ref < 0 || row.content_ref > 3) {
      throw integrity_error("layout row out of range");
    }
    seen_ref[static_cast<size_t>(row.content_ref)] = true;
    seen_label[static_cast<size_t>(row.label - 'A')] = true;
  }
  if (!std::all_of(seen_ref.begin(), seen_ref.end(), [](bool b) { return b; }) ||
      !std::all_of(seen_label.begin(), seen_label.end(), [](bool b) { return b; })) {
    throw integrity_error("layout rows must permute labels and contents");
  }

  std::string body = sample.question;
  for (const auto& row : layout.rows) {
    const std::string& content = row.content_ref == 0
                                     ? sample.correct_content
                                     : sample.distractor_contents[static_cast<size_t>(
                                           row.content_ref - 1)];
    body += "\n";
    body += row.label;
    body += ") ";
    body += content;
    if (row.content_ref == 0 && row.label != layout.correct_label) {
      throw integrity_error("correct_label does not match the row holding the correct content");
    }
  }

  rendered_prompt prompt;
  prompt.is_mcq = true;
  prompt.letter_answer = layout.correct_label;
  prompt.layout_fingerprint = layout.fingerprint;
  if (policy.position == instruction_position::before_question) {
    prompt.text = policy.text + policy.separator + body;
  } else {
    prompt.text = body + policy.separator + policy.text;
  }
  return prompt;
}

}  // namespace stableval
