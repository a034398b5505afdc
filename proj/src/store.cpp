#include "stableval/store.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "stableval/errors.hpp"
#include "stableval/util.hpp"

namespace stableval {

namespace fs = std::filesystem;
using nlohmann::json;

json record_to_json(const attempt_record& record) {
  json doc;
  doc["config_hash"] = record.config_hash;
  doc["sample_id"] = record.sample_id;
  doc["attempt_index"] = record.attempt_index;
  doc["seed"] = record.seed;
  doc["prompt_fingerprint"] = record.prompt_fingerprint;
  doc["completion_text"] = record.completion_text;
  doc["finish_reason"] = to_string(record.finish);
  doc["status"] = to_string(record.result.status);
  if (record.result.extracted) doc["extracted"] = *record.result.extracted;
  doc["started_ms"] = record.started_ms;
  doc["finished_ms"] = record.finished_ms;
  return doc;
}

attempt_record record_from_json(const json& doc) {
  attempt_record record;
  record.config_hash = doc.at("config_hash").get<std::string>();
  record.sample_id = doc.at("sample_id").get<std::string>();
  record.attempt_index = doc.at("attempt_index").get<int>();
  record.seed = doc.at("seed").get<uint64_t>();
  record.prompt_fingerprint = doc.at("prompt_fingerprint").get<std::string>();
  record.completion_text = doc.at("completion_text").get<std::string>();
  record.finish = finish_reason_from_string(doc.at("finish_reason").get<std::string>());
  record.result.status = verdict_status_from_string(doc.at("status").get<std::string>());
  if (doc.contains("extracted")) record.result.extracted = doc["extracted"].get<std::string>();
  record.started_ms = doc.value("started_ms", 0L);
  record.finished_ms = doc.value("finished_ms", 0L);
  return record;
}

namespace {

json plan_entry_to_json(const plan_entry& entry) {
  json doc;
  doc["sample_id"] = entry.sample_id;
  doc["attempt_index"] = entry.attempt_index;
  doc["seed"] = entry.seed;
  doc["prompt_fingerprint"] = entry.prompt_fingerprint;
  return doc;
}

plan_entry plan_entry_from_json(const json& doc) {
  plan_entry entry;
  entry.sample_id = doc.at("sample_id").get<std::string>();
  entry.attempt_index = doc.at("attempt_index").get<int>();
  entry.seed = doc.at("seed").get<uint64_t>();
  entry.prompt_fingerprint = doc.at("prompt_fingerprint").get<std::string>();
  return entry;
}

void validate_series_id(const std::string& series_id) {
  if (series_id.empty()) throw validation_error("series_id must be non-empty");
  for (char c : series_id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.' || c == '/';
    if (!ok) throw validation_error("series_id holds unsupported character: " + series_id);
  }
  if (series_id.front() == '/' || series_id.find("..") != std::string::npos) {
    throw validation_error("series_id may not escape the store root: " + series_id);
  }
}

[[noreturn]] void throw_duplicate(const attempt_record& record) {
  throw conflict_error("record already stored for sample '" + record.sample_id +
                       "' attempt " + std::to_string(record.attempt_index));
}

}  // namespace

bool memory_store::has_series(const std::string& series_id) const {
  return series_.count(series_id) > 0;
}

std::vector<std::string> memory_store::series_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, data] : series_) ids.push_back(id);
  return ids;
}

void memory_store::put_manifest(const std::string& series_id, const json& manifest) {
  validate_series_id(series_id);
  series_[series_id].manifest = manifest;
}

std::optional<json> memory_store::get_manifest(const std::string& series_id) const {
  auto it = series_.find(series_id);
  if (it == series_.end()) return std::nullopt;
  return it->second.manifest;
}

void memory_store::append_plan(const std::string& series_id,
                               const std::vector<plan_entry>& entries) {
  validate_series_id(series_id);
  auto& plan = series_[series_id].plan;
  plan.insert(plan.end(), entries.begin(), entries.end());
}

std::vector<plan_entry> memory_store::plan(const std::string& series_id) const {
  auto it = series_.find(series_id);
  if (it == series_.end()) return {};
  return it->second.plan;
}

void memory_store::append_record(const std::string& series_id, const attempt_record& record) {
  validate_series_id(series_id);
  auto& data = series_[series_id];
  if (!data.record_keys.insert({record.sample_id, record.attempt_index}).second) {
    throw_duplicate(record);
  }
  data.records.push_back(record);
}

std::vector<attempt_record> memory_store::records(const std::string& series_id) const {
  auto it = series_.find(series_id);
  if (it == series_.end()) return {};
  return it->second.records;
}

void memory_store::put_fixture_scores(const std::string& series_id,
                                      const std::vector<double>& scores) {
  validate_series_id(series_id);
  series_[series_id].scores = scores;
}

std::optional<std::vector<double>> memory_store::fixture_scores(
    const std::string& series_id) const {
  auto it = series_.find(series_id);
  if (it == series_.end()) return std::nullopt;
  return it->second.scores;
}

fs_store::fs_store(std::string root) : root_(std::move(root)) {
  if (root_.empty()) throw validation_error("store root must be non-empty");
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw io_error("cannot create store root '" + root_ + "': " + ec.message());
}

std::string fs_store::series_dir(const std::string& series_id) const {
  validate_series_id(series_id);
  return (fs::path(root_) / series_id).string();
}

namespace {

// appends a line, inserting a newline first if a previous write was torn
void append_line(const std::string& path, const std::string& line) {
  bool needs_heal = false;
  {
    std::ifstream probe(path, std::ios::binary | std::ios::ate);
    if (probe && probe.tellg() > 0) {
      probe.seekg(-1, std::ios::end);
      char last = '\n';
      probe.get(last);
      needs_heal = last != '\n';
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw io_error("cannot open for append: " + path);
  if (needs_heal) out << '\n';
  out << line << '\n';
  out.flush();
  if (!out) throw io_error("append failed: " + path);
}

std::vector<json> read_jsonl(const std::string& path) {
  std::vector<json> docs;
  std::ifstream in(path, std::ios::binary);
  if (!in) return docs;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded()) continue;  // torn tail from a killed writer
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace

bool fs_store::has_series(const std::string& series_id) const {
  return fs::exists(series_dir(series_id));
}

std::vector<std::string> fs_store::series_ids() const {
  std::vector<std::string> ids;
  if (!fs::exists(root_)) return ids;
  const fs::path root_path(root_);
  for (const auto& entry : fs::recursive_directory_iterator(root_path)) {
    if (!entry.is_directory()) continue;
    const fs::path dir = entry.path();
    if (fs::exists(dir / "manifest.json") || fs::exists(dir / "plan.jsonl") ||
        fs::exists(dir / "attempts.jsonl") || fs::exists(dir / "scores.csv")) {
      ids.push_back(fs::relative(dir, root_path).generic_string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

void fs_store::put_manifest(const std::string& series_id, const json& manifest) {
  const std::string dir = series_dir(series_id);
  fs::create_directories(dir);
  write_file_atomic((fs::path(dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

std::optional<json> fs_store::get_manifest(const std::string& series_id) const {
  const fs::path path = fs::path(series_dir(series_id)) / "manifest.json";
  if (!fs::exists(path)) return std::nullopt;
  json doc = json::parse(read_file(path.string()), nullptr, false);
  if (doc.is_discarded()) throw parse_error("corrupt manifest: " + path.string());
  return doc;
}

void fs_store::append_plan(const std::string& series_id,
                           const std::vector<plan_entry>& entries) {
  const std::string dir = series_dir(series_id);
  fs::create_directories(dir);
  const std::string path = (fs::path(dir) / "plan.jsonl").string();
  for (const auto& entry : entries) {
    append_line(path, plan_entry_to_json(entry).dump());
  }
}

std::vector<plan_entry> fs_store::plan(const std::string& series_id) const {
  const fs::path path = fs::path(series_dir(series_id)) / "plan.jsonl";
  std::vector<plan_entry> entries;
  for (const auto& doc : read_jsonl(path.string())) {
    entries.push_back(plan_entry_from_json(doc));
  }
  return entries;
}

std::set<std::pair<std::string, int>>& fs_store::key_cache(const std::string& series_id) {
  auto it = keys_.find(series_id);
  if (it == keys_.end()) {
    std::set<std::pair<std::string, int>> keys;
    for (const auto& record : records(series_id)) {
      keys.insert({record.sample_id, record.attempt_index});
    }
    it = keys_.emplace(series_id, std::move(keys)).first;
  }
  return it->second;
}

void fs_store::append_record(const std::string& series_id, const attempt_record& record) {
  auto& keys = key_cache(series_id);
  if (!keys.insert({record.sample_id, record.attempt_index}).second) {
    throw_duplicate(record);
  }
  const std::string dir = series_dir(series_id);
  fs::create_directories(dir);
  append_line((fs::path(dir) / "attempts.jsonl").string(), record_to_json(record).dump());
}

std::vector<attempt_record> fs_store::records(const std::string& series_id) const {
  const fs::path path = fs::path(series_dir(series_id)) / "attempts.jsonl";
  std::vector<attempt_record> out;
  std::set<std::pair<std::string, int>> seen;
  for (const auto& doc : read_jsonl(path.string())) {
    attempt_record record;
    try {
      record = record_from_json(doc);
    } catch (const std::exception&) {
      continue;  // schema drift in a foreign line, skip it
    }
    if (!seen.insert({record.sample_id, record.attempt_index}).second) continue;
    out.push_back(std::move(record));
  }
  return out;
}

void fs_store::put_fixture_scores(const std::string& series_id,
                                  const std::vector<double>& scores) {
  const std::string dir = series_dir(series_id);
  fs::create_directories(dir);
  std::ostringstream csv;
  csv << "run_index,score\n";
  for (size_t i = 0; i < scores.size(); ++i) {
    csv << (i + 1) << "," << format_fixed(scores[i], 2) << "\n";
  }
  write_file_atomic((fs::path(dir) / "scores.csv").string(), csv.str());
}

std::optional<std::vector<double>> fs_store::fixture_scores(
    const std::string& series_id) const {
  const fs::path path = fs::path(series_dir(series_id)) / "scores.csv";
  if (!fs::exists(path)) return std::nullopt;
  std::ifstream in(path.string(), std::ios::binary);
  if (!in) throw io_error("cannot open scores: " + path.string());
  std::vector<double> scores;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != 2) throw parse_error("bad scores row in " + path.string());
    scores.push_back(std::stod(fields[1]));
  }
  return scores;
}

std::map<std::pair<std::string, int>, attempt_record> record_index(
    const std::vector<attempt_record>& records) {
  std::map<std::pair<std::string, int>, attempt_record> index;
  for (const auto& record : records) {
    index[{record.sample_id, record.attempt_index}] = record;
  }
  return index;
}

}  // namespace stableval
