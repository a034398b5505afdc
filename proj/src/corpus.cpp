#include "stableval/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stableval/errors.hpp"
#include "stableval/util.hpp"

namespace stableval {

using nlohmann::json;

std::string to_string(answer_kind kind) {
  return kind == answer_kind::integer ? "integer" : "mcq";
}

answer_kind answer_kind_from_string(const std::string& text) {
  if (text == "integer") return answer_kind::integer;
  if (text == "mcq") return answer_kind::mcq;
  throw validation_error("unknown answer kind: " + text);
}

const benchmark_sample& benchmark_set::sample(const std::string& sample_id) const {
  for (const auto& s : samples) {
    if (s.sample_id == sample_id) return s;
  }
  throw not_found_error("sample not found: " + sample_id);
}

namespace {

std::string record_label(size_t index) { return "record " + std::to_string(index); }

const json& require_field(const json& record, const std::string& field, size_t index) {
  auto it = record.find(field);
  if (it == record.end() || it->is_null()) {
    throw schema_error("missing field '" + field + "' in " + record_label(index));
  }
  return *it;
}

std::string text_field(const json& record, const std::string& field, size_t index) {
  const json& value = require_field(record, field, index);
  if (!value.is_string()) {
    throw schema_error("field '" + field + "' is not a string in " + record_label(index));
  }
  return value.get<std::string>();
}

int integer_answer_field(const json& record, const std::string& field, size_t index) {
  const json& value = require_field(record, field, index);
  long long answer = 0;
  if (value.is_number_integer()) {
    answer = value.get<long long>();
  } else if (value.is_string()) {
    const std::string text = trim(value.get<std::string>());
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
      throw parse_error("malformed integer answer '" + text + "' in " + record_label(index));
    }
    try {
      answer = std::stoll(text);
    } catch (const std::exception&) {
      throw parse_error("malformed integer answer '" + text + "' in " + record_label(index));
    }
  } else {
    throw parse_error("answer field is neither integer nor string in " + record_label(index));
  }
  if (answer < 0 || answer > 999) {
    throw parse_error("integer answer " + std::to_string(answer) + " outside [0, 999] in " +
                      record_label(index));
  }
  return static_cast<int>(answer);
}

std::string synthesize_id(const std::string& benchmark_id, size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04zu", index);
  return benchmark_id + "#" + buf;
}

}  // namespace

benchmark_set load_benchmark(const std::string& path, const std::string& benchmark_id,
                             const std::string& version_id, const field_mapping& mapping) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open dataset file: " + path);

  benchmark_set set;
  set.benchmark_id = benchmark_id;
  set.version_id = version_id;

  std::set<std::string> seen_ids;
  std::string line;
  size_t index = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw parse_error("invalid JSON in " + record_label(index) + ": " + e.what());
    }
    if (!record.is_object()) {
      throw schema_error(record_label(index) + " is not a JSON object");
    }

    benchmark_sample sample;
    sample.kind = mapping.kind;
    if (!mapping.id_field.empty()) {
      const json& id = require_field(record, mapping.id_field, index);
      sample.sample_id = id.is_string() ? id.get<std::string>() : id.dump();
    } else {
      sample.sample_id = synthesize_id(benchmark_id, index);
    }
    sample.question = text_field(record, mapping.question_field, index);

    if (mapping.kind == answer_kind::integer) {
      sample.integer_answer = integer_answer_field(record, mapping.answer_field, index);
    } else {
      sample.correct_content = text_field(record, mapping.correct_field, index);
      const json& distractors = require_field(record, mapping.distractors_field, index);
      if (!distractors.is_array() || distractors.size() != 3) {
        throw schema_error("field '" + mapping.distractors_field +
                           "' must be an array of 3 strings in " + record_label(index));
      }
      for (const auto& d : distractors) {
        if (!d.is_string()) {
          throw schema_error("distractor is not a string in " + record_label(index));
        }
        sample.distractor_contents.push_back(d.get<std::string>());
      }
      std::set<std::string> contents(sample.distractor_contents.begin(),
                                     sample.distractor_contents.end());
      contents.insert(sample.correct_content);
      if (sample.correct_content.empty() ||
          std::any_of(sample.distractor_contents.begin(), sample.distractor_contents.end(),
                      [](const std::string& d) { return d.empty(); })) {
        throw integrity_error("empty option content in " + record_label(index));
      }
      if (contents.size() != 4) {
        throw integrity_error("duplicate option contents in " + record_label(index));
      }
    }

    if (!seen_ids.insert(sample.sample_id).second) {
      throw integrity_error("duplicate sample_id '" + sample.sample_id + "' in " +
                            record_label(index));
    }
    set.samples.push_back(std::move(sample));
    ++index;
  }

  if (set.samples.empty()) {
    throw validation_error("dataset file holds no records: " + path);
  }
  return set;
}

void write_benchmark(const std::string& path, const benchmark_set& set,
                     const field_mapping& mapping) {
  std::ostringstream out;
  for (const auto& sample : set.samples) {
    json record;
    record[mapping.id_field.empty() ? "id" : mapping.id_field] = sample.sample_id;
    record[mapping.question_field] = sample.question;
    if (sample.kind == answer_kind::integer) {
      record[mapping.answer_field] = sample.integer_answer;
    } else {
      record[mapping.correct_field] = sample.correct_content;
      record[mapping.distractors_field] = sample.distractor_contents;
    }
    out << record.dump() << "\n";
  }
  write_file_atomic(path, out.str());
}

std::string to_string(image_description value) {
  switch (value) {
    case image_description::yes: return "yes";
    case image_description::no: return "no";
    case image_description::omitted_if_irrelevant: return "omitted_if_irrelevant";
  }
  throw validation_error("bad image_description value");
}

image_description image_description_from_string(const std::string& text) {
  if (text == "yes") return image_description::yes;
  if (text == "no") return image_description::no;
  if (text == "omitted_if_irrelevant") return image_description::omitted_if_irrelevant;
  throw validation_error("unknown image description value: " + text);
}

std::string to_string(figure_method value) {
  switch (value) {
    case figure_method::asymptote: return "asymptote";
    case figure_method::tikz: return "tikz";
    case figure_method::none: return "none";
  }
  throw validation_error("bad figure_method value");
}

figure_method figure_method_from_string(const std::string& text) {
  if (text == "asymptote") return figure_method::asymptote;
  if (text == "tikz") return figure_method::tikz;
  if (text == "none") return figure_method::none;
  throw validation_error("unknown figure method value: " + text);
}

void version_registry::register_version(const dataset_version_info& info) {
  if (info.version_id.empty()) throw validation_error("version_id must be non-empty");
  if (records_.count(info.version_id)) {
    throw conflict_error("version already registered: " + info.version_id);
  }
  records_[info.version_id] = info;
}

const dataset_version_info& version_registry::resolve(const std::string& version_id) const {
  auto it = records_.find(version_id);
  if (it == records_.end()) throw not_found_error("unknown dataset version: " + version_id);
  return it->second;
}

bool version_registry::contains(const std::string& version_id) const {
  return records_.count(version_id) > 0;
}

std::vector<dataset_version_info> version_registry::records() const {
  std::vector<dataset_version_info> out;
  out.reserve(records_.size());
  for (const auto& [id, info] : records_) out.push_back(info);
  return out;
}

version_registry version_registry::from_file(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw parse_error("invalid registry JSON in " + path + ": " + e.what());
  }
  if (!doc.is_array()) throw schema_error("registry file must hold a JSON array: " + path);
  version_registry registry;
  for (const auto& entry : doc) {
    dataset_version_info info;
    info.version_id = entry.at("version_id").get<std::string>();
    info.contains_image_description =
        image_description_from_string(entry.at("contains_image_description").get<std::string>());
    info.method = figure_method_from_string(entry.at("method").get<std::string>());
    registry.register_version(info);
  }
  return registry;
}

std::vector<sample_diff> diff_versions(const benchmark_set& a, const benchmark_set& b) {
  if (a.benchmark_id != b.benchmark_id) {
    throw validation_error("diff requires matching benchmark ids, got '" + a.benchmark_id +
                           "' and '" + b.benchmark_id + "'");
  }
  std::map<std::string, const benchmark_sample*> b_index;
  for (const auto& s : b.samples) b_index[s.sample_id] = &s;
  if (a.samples.size() != b.samples.size() || b_index.size() != b.samples.size()) {
    throw validation_error("sample_id sets do not align");
  }
  std::vector<sample_diff> diffs;
  for (const auto& s : a.samples) {
    auto it = b_index.find(s.sample_id);
    if (it == b_index.end()) throw validation_error("sample_id sets do not align");
    if (s.question != it->second->question) {
      diffs.push_back({s.sample_id, static_cast<long>(it->second->question.size()) -
                                        static_cast<long>(s.question.size())});
    }
  }
  return diffs;
}

std::string dataset_fingerprint(const benchmark_set& set) {
  uint64_t h = fnv1a64(set.benchmark_id);
  h = fnv1a64(h, "|");
  h = fnv1a64(h, set.version_id);
  for (const auto& s : set.samples) {
    h = fnv1a64(h, "\x1f");
    h = fnv1a64(h, s.sample_id);
    h = fnv1a64(h, "\x1f");
    h = fnv1a64(h, s.question);
    h = fnv1a64(h, "\x1f");
    if (s.kind == answer_kind::integer) {
      h = fnv1a64(h, std::to_string(s.integer_answer));
    } else {
      h = fnv1a64(h, s.correct_content);
      for (const auto& d : s.distractor_contents) {
        h = fnv1a64(h, "\x1e");
        h = fnv1a64(h, d);
      }
    }
  }
  return to_hex(h);
}

}  // namespace stableval
