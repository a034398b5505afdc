#include <doctest.h>

#include <fstream>
#include <string>

#include "stableval/corpus.hpp"
#include "stableval/errors.hpp"
#include "stableval/util.hpp"
#include "support/tmpdir.hpp"

using namespace stableval;

namespace {

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  for (const auto& line : lines) out << line << "\n";
}

std::vector<std::string> math_lines() {
  return {
      R"({"id": "p1", "question": "What is 2 + 2?", "answer": 4})",
      R"({"id": "p2", "question": "What is 3 * 3?", "answer": "9"})",
      R"({"id": "p3", "question": "Largest two digit prime?", "answer": 97})",
  };
}

std::vector<std::string> mcq_lines() {
  return {
      R"({"question": "Pick the even number.", "correct": "four", "distractors": ["one", "three", "five"]})",
      R"({"question": "Pick the color.", "correct": "red", "distractors": ["run", "jump", "sit"]})",
  };
}

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("load_benchmark reads integer datasets") {
  testsup::tmpdir dir;
  write_lines(dir.str("math.jsonl"), math_lines());
  field_mapping mapping;
  mapping.id_field = "id";
  const benchmark_set set = load_benchmark(dir.str("math.jsonl"), "demo", "v1", mapping);
  CHECK(set.benchmark_id == "demo");
  CHECK(set.version_id == "v1");
  REQUIRE(set.samples.size() == 3);
  CHECK(set.samples[0].sample_id == "p1");
  CHECK(set.samples[0].integer_answer == 4);
  CHECK(set.samples[1].integer_answer == 9);  // digit strings are accepted
  CHECK(set.samples[2].kind == answer_kind::integer);
  CHECK(set.sample("p3").question == "Largest two digit prime?");
  CHECK_THROWS_AS(set.sample("p9"), not_found_error);
}

TEST_CASE("load_benchmark synthesizes ids when no field is mapped") {
  testsup::tmpdir dir;
  write_lines(dir.str("mcq.jsonl"), mcq_lines());
  field_mapping mapping;
  mapping.kind = answer_kind::mcq;
  const benchmark_set set = load_benchmark(dir.str("mcq.jsonl"), "quiz", "v1", mapping);
  REQUIRE(set.samples.size() == 2);
  CHECK(set.samples[0].sample_id == "quiz#0000");
  CHECK(set.samples[1].sample_id == "quiz#0001");
  CHECK(set.samples[0].correct_content == "four");
  REQUIRE(set.samples[0].distractor_contents.size() == 3);
}

TEST_CASE("load_benchmark skips blank lines but rejects malformed records") {
  testsup::tmpdir dir;
  write_lines(dir.str("gaps.jsonl"), {math_lines()[0], "", "   ", math_lines()[2]});
  field_mapping mapping;
  mapping.id_field = "id";
  CHECK(load_benchmark(dir.str("gaps.jsonl"), "demo", "v1", mapping).samples.size() == 2);

  write_lines(dir.str("broken.jsonl"), {math_lines()[0], "{not json"});
  CHECK_THROWS_AS(load_benchmark(dir.str("broken.jsonl"), "demo", "v1", mapping), parse_error);
}

TEST_CASE("load_benchmark reports the missing field and record") {
  testsup::tmpdir dir;
  write_lines(dir.str("missing.jsonl"),
              {R"({"id": "p1", "question": "Q?", "answer": 4})", R"({"id": "p2", "answer": 4})"});
  field_mapping mapping;
  mapping.id_field = "id";
  try {
    load_benchmark(dir.str("missing.jsonl"), "demo", "v1", mapping);
    FAIL("expected schema_error");
  } catch (const schema_error& e) {
    const std::string what = e.what();
    CHECK(what.find("question") != std::string::npos);
    CHECK(what.find("record 1") != std::string::npos);
  }
}

TEST_CASE("load_benchmark rejects out of range and non integer answers") {
  testsup::tmpdir dir;
  field_mapping mapping;
  mapping.id_field = "id";
  write_lines(dir.str("big.jsonl"), {R"({"id": "p1", "question": "Q?", "answer": 1000})"});
  CHECK_THROWS_AS(load_benchmark(dir.str("big.jsonl"), "demo", "v1", mapping), parse_error);
  write_lines(dir.str("neg.jsonl"), {R"({"id": "p1", "question": "Q?", "answer": -1})"});
  CHECK_THROWS_AS(load_benchmark(dir.str("neg.jsonl"), "demo", "v1", mapping), parse_error);
  write_lines(dir.str("word.jsonl"), {R"({"id": "p1", "question": "Q?", "answer": "ten"})"});
  CHECK_THROWS_AS(load_benchmark(dir.str("word.jsonl"), "demo", "v1", mapping), parse_error);
}

TEST_CASE("load_benchmark enforces sample integrity") {
  testsup::tmpdir dir;
  field_mapping mapping;
  mapping.id_field = "id";
  write_lines(dir.str("dup.jsonl"), {math_lines()[0], math_lines()[0]});
  CHECK_THROWS_AS(load_benchmark(dir.str("dup.jsonl"), "demo", "v1", mapping), integrity_error);

  field_mapping mcq_mapping;
  mcq_mapping.kind = answer_kind::mcq;
  write_lines(dir.str("dup_opts.jsonl"),
              {R"({"question": "Q?", "correct": "red", "distractors": ["red", "blue", "green"]})"});
  CHECK_THROWS_AS(load_benchmark(dir.str("dup_opts.jsonl"), "quiz", "v1", mcq_mapping),
                  integrity_error);
  write_lines(dir.str("short_opts.jsonl"),
              {R"({"question": "Q?", "correct": "red", "distractors": ["blue", "green"]})"});
  CHECK_THROWS_AS(load_benchmark(dir.str("short_opts.jsonl"), "quiz", "v1", mcq_mapping),
                  schema_error);
  write_lines(dir.str("empty_opt.jsonl"),
              {R"({"question": "Q?", "correct": "", "distractors": ["a", "b", "c"]})"});
  CHECK_THROWS_AS(load_benchmark(dir.str("empty_opt.jsonl"), "quiz", "v1", mcq_mapping),
                  integrity_error);
}

TEST_CASE("load_benchmark rejects empty or unreadable files") {
  testsup::tmpdir dir;
  field_mapping mapping;
  write_lines(dir.str("empty.jsonl"), {});
  CHECK_THROWS_AS(load_benchmark(dir.str("empty.jsonl"), "demo", "v1", mapping),
                  validation_error);
  CHECK_THROWS_AS(load_benchmark(dir.str("absent.jsonl"), "demo", "v1", mapping), io_error);
}

TEST_CASE("write_benchmark round trips through load_benchmark") {
  testsup::tmpdir dir;
  write_lines(dir.str("math.jsonl"), math_lines());
  field_mapping mapping;
  mapping.id_field = "id";
  const benchmark_set set = load_benchmark(dir.str("math.jsonl"), "demo", "v1", mapping);
  write_benchmark(dir.str("copy.jsonl"), set, mapping);
  const benchmark_set again = load_benchmark(dir.str("copy.jsonl"), "demo", "v1", mapping);
  REQUIRE(again.samples.size() == set.samples.size());
  for (size_t i = 0; i < set.samples.size(); ++i) {
    CHECK(again.samples[i].sample_id == set.samples[i].sample_id);
    CHECK(again.samples[i].question == set.samples[i].question);
    CHECK(again.samples[i].integer_answer == set.samples[i].integer_answer);
  }
  CHECK(dataset_fingerprint(again) == dataset_fingerprint(set));
}

TEST_CASE("version_registry registers and resolves") {
  version_registry registry;
  registry.register_version({"v_base", image_description::yes, figure_method::asymptote});
  registry.register_version({"v_alt", image_description::no, figure_method::none});
  CHECK(registry.contains("v_base"));
  CHECK_FALSE(registry.contains("v_gone"));
  CHECK(registry.resolve("v_base").method == figure_method::asymptote);
  CHECK_THROWS_AS(registry.resolve("v_gone"), not_found_error);
  CHECK(registry.records().size() == 2);
  CHECK_THROWS_AS(
      registry.register_version({"v_base", image_description::no, figure_method::none}),
      conflict_error);
  CHECK_THROWS_AS(registry.register_version({"", image_description::no, figure_method::none}),
                  validation_error);
}

TEST_CASE("version_registry loads the shipped registry file") {
  const version_registry registry = version_registry::from_file("fixtures/dataset_versions.json");
  CHECK(registry.records().size() == 7);
  CHECK(registry.contains("Idavidrein/gpqa"));
  const dataset_version_info& tikz = registry.resolve("yentinglin/aime_2025");
  CHECK(tikz.contains_image_description == image_description::yes);
  CHECK(tikz.method == figure_method::tikz);
  const dataset_version_info& nofig = registry.resolve("simplescaling/aime24_nofigures");
  CHECK(nofig.contains_image_description == image_description::omitted_if_irrelevant);
  CHECK(nofig.method == figure_method::asymptote);
}

TEST_CASE("enum string helpers round trip") {
  for (auto v : {image_description::yes, image_description::no,
                 image_description::omitted_if_irrelevant}) {
    CHECK(image_description_from_string(to_string(v)) == v);
  }
  for (auto v : {figure_method::asymptote, figure_method::tikz, figure_method::none}) {
    CHECK(figure_method_from_string(to_string(v)) == v);
  }
  for (auto v : {answer_kind::integer, answer_kind::mcq}) {
    CHECK(answer_kind_from_string(to_string(v)) == v);
  }
  CHECK_THROWS_AS(answer_kind_from_string("riddle"), validation_error);
}

TEST_CASE("diff_versions lists questions that changed") {
  testsup::tmpdir dir;
  field_mapping mapping;
  mapping.id_field = "id";
  write_lines(dir.str("a.jsonl"), math_lines());
  write_lines(dir.str("b.jsonl"),
              {R"({"id": "p1", "question": "What is 2 + 2?", "answer": 4})",
               R"({"id": "p2", "question": "What is 3 * 3? [figure omitted]", "answer": 9})",
               R"({"id": "p3", "question": "Largest 2 digit prime?", "answer": 97})"});
  const benchmark_set a = load_benchmark(dir.str("a.jsonl"), "demo", "v1", mapping);
  const benchmark_set b = load_benchmark(dir.str("b.jsonl"), "demo", "v2", mapping);
  const auto diffs = diff_versions(a, b);
  REQUIRE(diffs.size() == 2);
  CHECK(diffs[0].sample_id == "p2");
  CHECK(diffs[0].length_delta == 17);
  CHECK(diffs[1].sample_id == "p3");
  CHECK(diffs[1].length_delta == -2);
}

TEST_CASE("diff_versions rejects misaligned inputs") {
  testsup::tmpdir dir;
  field_mapping mapping;
  mapping.id_field = "id";
  write_lines(dir.str("a.jsonl"), math_lines());
  write_lines(dir.str("b.jsonl"), {math_lines()[0], math_lines()[1]});
  const benchmark_set a = load_benchmark(dir.str("a.jsonl"), "demo", "v1", mapping);
  const benchmark_set b = load_benchmark(dir.str("b.jsonl"), "demo", "v2", mapping);
  CHECK_THROWS_AS(diff_versions(a, b), validation_error);

  benchmark_set other = a;
  other.benchmark_id = "different";
  CHECK_THROWS_AS(diff_versions(a, other), validation_error);
}

TEST_CASE("dataset_fingerprint reacts to content changes") {
  testsup::tmpdir dir;
  field_mapping mapping;
  mapping.id_field = "id";
  write_lines(dir.str("a.jsonl"), math_lines());
  const benchmark_set a = load_benchmark(dir.str("a.jsonl"), "demo", "v1", mapping);
  CHECK(dataset_fingerprint(a) == dataset_fingerprint(a));

  benchmark_set changed = a;
  changed.samples[1].question += "!";
  CHECK(dataset_fingerprint(changed) != dataset_fingerprint(a));
  benchmark_set rekeyed = a;
  rekeyed.samples[1].integer_answer = 10;
  CHECK(dataset_fingerprint(rekeyed) != dataset_fingerprint(a));
}

}  // TEST_SUITE
