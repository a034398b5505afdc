#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stableval {

enum class verdict_status { correct, incorrect, unparseable };

std::string to_string(verdict_status s);
verdict_status verdict_status_from_string(const std::string& s);

struct verdict {
  verdict_status status = verdict_status::unparseable;
  // the normalized answer that was graded; unset when nothing was extracted
  std::optional<std::string> extracted;
};

struct run_score {
  int run_index = 0;
  double percent = 0.0;  // 100 * correct / total, full precision
};

// content of the last \boxed{...} span; nothing when absent or when the last
// span's braces never balance before end of text
std::optional<std::string> extract_boxed(std::string_view text);

// normalizes whitespace, commas, \text{} and \mathrm{} wrappers, and leading
// zeros, then compares as integers; anything non-integer is unparseable
verdict grade_integer(const std::optional<std::string>& extracted, int truth);

// last boxed span that normalizes to a single letter A-D (case-insensitive,
// punctuation ignored); falls back to the last "Answer: X" occurrence
std::optional<char> extract_mcq_letter(std::string_view text);

verdict grade_mcq(const std::optional<char>& letter, char truth);

double score_percent(const std::vector<verdict>& verdicts);
run_score score_run(int run_index, const std::vector<verdict>& verdicts);

}  // namespace stableval
