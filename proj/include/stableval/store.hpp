#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "stableval/engine.hpp"
#include "stableval/grading.hpp"

namespace stableval {

struct attempt_record {
  std::string config_hash;
  std::string sample_id;
  int attempt_index = 0;
  uint64_t seed = 0;
  std::string prompt_fingerprint;
  std::string completion_text;
  finish_reason finish = finish_reason::stop;
  verdict result;
  long started_ms = 0;
  long finished_ms = 0;
};

nlohmann::json record_to_json(const attempt_record& record);
attempt_record record_from_json(const nlohmann::json& doc);

// append-only storage for one workspace of experiment series; a series holds
// the plan, the attempt records and optionally a fixture score column
class run_store {
 public:
  virtual ~run_store() = default;

  virtual bool has_series(const std::string& series_id) const = 0;
  virtual std::vector<std::string> series_ids() const = 0;

  virtual void put_manifest(const std::string& series_id, const nlohmann::json& manifest) = 0;
  virtual std::optional<nlohmann::json> get_manifest(const std::string& series_id) const = 0;

  virtual void append_plan(const std::string& series_id,
                           const std::vector<plan_entry>& entries) = 0;
  virtual std::vector<plan_entry> plan(const std::string& series_id) const = 0;

  // duplicate (sample_id, attempt_index) within a series is a conflict
  virtual void append_record(const std::string& series_id, const attempt_record& record) = 0;
  virtual std::vector<attempt_record> records(const std::string& series_id) const = 0;

  // a per-run score column imported from outside rather than executed here
  virtual void put_fixture_scores(const std::string& series_id,
                                  const std::vector<double>& scores) = 0;
  virtual std::optional<std::vector<double>> fixture_scores(
      const std::string& series_id) const = 0;
};

class memory_store : public run_store {
 public:
  bool has_series(const std::string& series_id) const override;
  std::vector<std::string> series_ids() const override;
  void put_manifest(const std::string& series_id, const nlohmann::json& manifest) override;
  std::optional<nlohmann::json> get_manifest(const std::string& series_id) const override;
  void append_plan(const std::string& series_id,
                   const std::vector<plan_entry>& entries) override;
  std::vector<plan_entry> plan(const std::string& series_id) const override;
  void append_record(const std::string& series_id, const attempt_record& record) override;
  std::vector<attempt_record> records(const std::string& series_id) const override;
  void put_fixture_scores(const std::string& series_id,
                          const std::vector<double>& scores) override;
  std::optional<std::vector<double>> fixture_scores(
      const std::string& series_id) const override;

 private:
  struct series_data {
    std::optional<nlohmann::json> manifest;
    std::vector<plan_entry> plan;
    std::vector<attempt_record> records;
    std::set<std::pair<std::string, int>> record_keys;
    std::optional<std::vector<double>> scores;
  };
  std::map<std::string, series_data> series_;
};

// one directory per series under the root: manifest.json, plan.jsonl,
// attempts.jsonl and scores.csv; appends heal a torn trailing line and reads
// skip lines that do not parse, so a killed writer never poisons the store
class fs_store : public run_store {
 public:
  explicit fs_store(std::string root);

  const std::string& root() const { return root_; }

  bool has_series(const std::string& series_id) const override;
  std::vector<std::string> series_ids() const override;
  void put_manifest(const std::string& series_id, const nlohmann::json& manifest) override;
  std::optional<nlohmann::json> get_manifest(const std::string& series_id) const override;
  void append_plan(const std::string& series_id,
                   const std::vector<plan_entry>& entries) override;
  std::vector<plan_entry> plan(const std::string& series_id) const override;
  void append_record(const std::string& series_id, const attempt_record& record) override;
  std::vector<attempt_record> records(const std::string& series_id) const override;
  void put_fixture_scores(const std::string& series_id,
                          const std::vector<double>& scores) override;
  std::optional<std::vector<double>> fixture_scores(
      const std::string& series_id) const override;

 private:
  std::string series_dir(const std::string& series_id) const;
  std::set<std::pair<std::string, int>>& key_cache(const std::string& series_id);

  std::string root_;
  std::map<std::string, std::set<std::pair<std::string, int>>> keys_;
};

// records already present in a store, keyed for resume lookups
std::map<std::pair<std::string, int>, attempt_record> record_index(
    const std::vector<attempt_record>& records);

}  // namespace stableval
