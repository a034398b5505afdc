#include "stableval/grading.hpp"

#include <algorithm>
#include <cctype>

#include "stableval/errors.hpp"

namespace stableval {

std::string to_string(verdict_status s) {
  switch (s) {
    case verdict_status::correct: return "correct";
    case verdict_status::incorrect: return "incorrect";
    case verdict_status::unparseable: return "unparseable";
  }
  return "unparseable";
}

verdict_status verdict_status_from_string(const std::string& s) {
  if (s == "correct") return verdict_status::correct;
  if (s == "incorrect") return verdict_status::incorrect;
  if (s == "unparseable") return verdict_status::unparseable;
  throw parse_error("unknown verdict status: " + s);
}

namespace {

constexpr std::string_view kBoxed = "\\boxed{";

// returns the [begin, end) content range of the span starting at the opening
// brace, or nothing when braces never balance
std::optional<std::pair<size_t, size_t>> balanced_span(std::string_view text, size_t open) {
  int depth = 1;
  for (size_t i = open + 1; i < text.size(); ++i) {
    if (text[i] == '{') ++depth;
    else if (text[i] == '}') {
      if (--depth == 0) return std::make_pair(open + 1, i);
    }
  }
  return std::nullopt;
}

std::optional<char> normalize_letter(std::string_view content) {
  char letter = 0;
  for (char c : content) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      if (letter != 0) return std::nullopt;  // more than one token
      letter = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
  }
  if (letter >= 'A' && letter <= 'D') return letter;
  return std::nullopt;
}

}  // namespace

std::optional<std::string> extract_boxed(std::string_view text) {
  size_t pos = text.rfind(kBoxed);
  if (pos == std::string_view::npos) return std::nullopt;
  auto span = balanced_span(text, pos + kBoxed.size() - 1);
  if (!span) return std::nullopt;
  return std::string(text.substr(span->first, span->second - span->first));
}

verdict grade_integer(const std::optional<std::string>& extracted, int truth) {
  if (truth < 0 || truth > 999) {
    throw validation_error("integer answer key out of range [0, 999]");
  }
  if (!extracted) return {verdict_status::unparseable, std::nullopt};
  std::string s = *extracted;

  // unwrap \text{...} / \mathrm{...} layers
  for (;;) {
    std::string t;
    for (std::string_view w : {"\\text{", "\\mathrm{"}) {
      if (s.size() >= w.size() + 1 && s.compare(0, w.size(), w) == 0 && s.back() == '}') {
        t = s.substr(w.size(), s.size() - w.size() - 1);
        break;
      }
    }
    if (t.empty()) break;
    s = t;
  }

  std::string digits;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') continue;
    digits += c;
  }
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c));
      })) {
    return {verdict_status::unparseable, std::nullopt};
  }
  size_t first = digits.find_first_not_of('0');
  std::string canonical = first == std::string::npos ? "0" : digits.substr(first);
  if (canonical.size() > 3) {
    return {verdict_status::incorrect, canonical};
  }
  int value = std::stoi(canonical);
  return {value == truth ? verdict_status::correct : verdict_status::incorrect, canonical};
}

std::optional<char> extract_mcq_letter(std::string_view text) {
  // walk boxed spans, remembering the last one that normalizes
  std::optional<char> best;
  size_t pos = 0;
  for (;;) {
    size_t at = text.find(kBoxed, pos);
    if (at == std::string_view::npos) break;
    auto span = balanced_span(text, at + kBoxed.size() - 1);
    if (!span) {
      // braces never close; a nested span may still balance, keep scanning
      pos = at + kBoxed.size();
      continue;
    }
    auto letter = normalize_letter(text.substr(span->first, span->second - span->first));
    if (letter) best = letter;
    pos = span->first;
  }
  if (best) return best;

  // fallback: last "Answer: X"
  for (size_t i = text.size(); i-- > 0;) {
    static constexpr std::string_view kAnswer = "nswer:";
    if ((text[i] == 'A' || text[i] == 'a') &&
        text.substr(i + 1, kAnswer.size()) == kAnswer) {
      size_t j = i + 1 + kAnswer.size();
      while (j < text.size() && text[j] == ' ') ++j;
      if (j < text.size()) {
        char c = static_cast<char>(std::toupper(static_cast<unsigned char>(text[j])));
        if (c >= 'A' && c <= 'D') return c;
      }
    }
  }
  return std::nullopt;
}

verdict grade_mcq(const std::optional<char>& letter, char truth) {
  if (truth < 'A' || truth > 'D') throw validation_error("MCQ answer key must be A-D");
  if (!letter) return {verdict_status::unparseable, std::nullopt};
  return {*letter == truth ? verdict_status::correct : verdict_status::incorrect,
          std::string(1, *letter)};
}

double score_percent(const std::vector<verdict>& verdicts) {
  if (verdicts.empty()) throw validation_error("cannot score an empty run");
  size_t correct = 0;
  for (const auto& v : verdicts) {
    if (v.status == verdict_status::correct) ++correct;
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(verdicts.size());
}

run_score score_run(int run_index, const std::vector<verdict>& verdicts) {
  return {run_index, score_percent(verdicts)};
}

}  // namespace stableval
