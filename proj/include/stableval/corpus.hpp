#pragma once

#include <map>
#include <string>
#include <vector>

namespace stableval {

enum class answer_kind { integer, mcq };

std::string to_string(answer_kind kind);
answer_kind answer_kind_from_string(const std::string& text);

struct benchmark_sample {
  std::string sample_id;
  std::string question;
  answer_kind kind = answer_kind::integer;
  int integer_answer = 0;
  std::string correct_content;
  std::vector<std::string> distractor_contents;
};

struct benchmark_set {
  std::string benchmark_id;
  std::string version_id;
  std::vector<benchmark_sample> samples;

  const benchmark_sample& sample(const std::string& sample_id) const;
};

// adapts differing upstream field names to the fixed sample shape
struct field_mapping {
  std::string id_field;  // empty: ids are synthesized from the record index
  std::string question_field = "question";
  std::string answer_field = "answer";
  std::string correct_field = "correct";
  std::string distractors_field = "distractors";
  answer_kind kind = answer_kind::integer;
};

// loads a JSON-lines dataset; any invalid record fails the whole load
benchmark_set load_benchmark(const std::string& path, const std::string& benchmark_id,
                             const std::string& version_id, const field_mapping& mapping);

// inverse of load_benchmark, used for round-trip checks and dataset derivation
void write_benchmark(const std::string& path, const benchmark_set& set,
                     const field_mapping& mapping);

enum class image_description { yes, no, omitted_if_irrelevant };
enum class figure_method { asymptote, tikz, none };

std::string to_string(image_description value);
image_description image_description_from_string(const std::string& text);
std::string to_string(figure_method value);
figure_method figure_method_from_string(const std::string& text);

struct dataset_version_info {
  std::string version_id;
  image_description contains_image_description = image_description::no;
  figure_method method = figure_method::none;
};

class version_registry {
 public:
  void register_version(const dataset_version_info& info);
  const dataset_version_info& resolve(const std::string& version_id) const;
  bool contains(const std::string& version_id) const;
  std::vector<dataset_version_info> records() const;

  static version_registry from_file(const std::string& path);

 private:
  std::map<std::string, dataset_version_info> records_;
};

struct sample_diff {
  std::string sample_id;
  long length_delta = 0;  // question length in b minus question length in a
};

// lists samples whose question text differs between two versions of a benchmark
std::vector<sample_diff> diff_versions(const benchmark_set& a, const benchmark_set& b);

// content hash over ids, questions and answer keys, recorded in run manifests
std::string dataset_fingerprint(const benchmark_set& set);

}  // namespace stableval
