#include <doctest.h>

#include <string>
#include <vector>

#include "stableval/errors.hpp"
#include "stableval/report.hpp"
#include "stableval/util.hpp"
#include "support/tmpdir.hpp"

using namespace stableval;

namespace {

fluctuation_table small_table() {
  fluctuation_table table;
  table.benchmark_id = "aime24";
  table.control_name = "control";
  table.control_mean = 31.2;
  table.control_n = 64;
  fluctuation_row repeat_row;
  repeat_row.name = "repeat";
  repeat_row.role = group_role::repeated_trial;
  repeat_row.mean = 31.2;
  repeat_row.fluctuation_points = 0.0;
  fluctuation_row biased_row;
  biased_row.name = "pos_b";
  biased_row.role = group_role::experimental;
  biased_row.mean = 29.8;
  biased_row.fluctuation_points = 1.4;
  table.rows = {repeat_row, biased_row};
  return table;
}

stability_data small_stability() {
  stability_data data;
  data.series_id = "fx/aime24";
  data.params.alpha = 0.10;
  data.params.epsilon = 1.0;
  data.params.n0 = 2;
  data.params.n_cap = 64;
  data.result.final_series = summarize({26.7, 23.3});
  data.result.ci = make_confidence_interval(data.result.final_series, 0.10);
  data.result.required_n = 16;
  data.result.converged = false;
  adaptive_iteration step;
  step.n_so_far = 2;
  step.sample_std = *data.result.final_series.sample_std;
  step.n_required = 16;
  data.result.iterations = {step};
  return data;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("kind and format names roundtrip") {
  for (report_kind kind : {report_kind::fluctuation, report_kind::convergence,
                           report_kind::stability, report_kind::seed_sweep}) {
    CHECK(report_kind_from_string(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(report_kind_from_string("histogram"), validation_error);

  CHECK(report_format_from_string("markdown") == report_format::markdown);
  CHECK(report_format_from_string("md") == report_format::markdown);
  CHECK(report_format_from_string("csv") == report_format::csv);
  CHECK_THROWS_AS(report_format_from_string("pdf"), validation_error);
}

TEST_CASE("data must match the requested kind") {
  CHECK_THROWS_AS(render_report(report_kind::fluctuation, convergence_data{},
                                report_format::markdown),
                  validation_error);
  CHECK_THROWS_AS(render_report(report_kind::convergence, small_table(),
                                report_format::markdown),
                  validation_error);
  CHECK_THROWS_AS(render_report(report_kind::stability, seed_sweep_data{},
                                report_format::markdown),
                  validation_error);
  CHECK_THROWS_AS(render_report(report_kind::seed_sweep, small_stability(),
                                report_format::markdown),
                  validation_error);
}

TEST_CASE("fluctuation renders match byte for byte") {
  const std::string md =
      render_report(report_kind::fluctuation, small_table(), report_format::markdown);
  CHECK(md ==
        "# fluctuation report\n"
        "\n"
        "benchmark: aime24\n"
        "control: control (n = 64, mean = 31.2)\n"
        "\n"
        "| group | role | mean | fluctuation |\n"
        "| --- | --- | --- | --- |\n"
        "| repeat | repeated_trial | 31.2 | 0.0 |\n"
        "| pos_b | experimental | 29.8 | 1.4 |\n");

  const std::string csv =
      render_report(report_kind::fluctuation, small_table(), report_format::csv);
  CHECK(csv ==
        "name,role,mean,fluctuation\n"
        "control,control,31.2,\n"
        "repeat,repeated_trial,31.2,0.0\n"
        "pos_b,experimental,29.8,1.4\n");

  // rendering is a pure function of the data
  CHECK(render_report(report_kind::fluctuation, small_table(), report_format::markdown) == md);

  fluctuation_table unnamed = small_table();
  unnamed.benchmark_id.clear();
  CHECK_THROWS_AS(render_report(report_kind::fluctuation, unnamed, report_format::markdown),
                  validation_error);
}

TEST_CASE("csv cells with commas are quoted") {
  fluctuation_table table = small_table();
  table.rows[0].name = "ugly, name";
  const std::string csv = render_report(report_kind::fluctuation, table, report_format::csv);
  CHECK(csv.find("\"ugly, name\",repeated_trial") != std::string::npos);
}

TEST_CASE("convergence renders scores next to their running average") {
  convergence_data single;
  single.series.push_back({"aime24", {26.7, 23.3, 30.0}});
  const std::string csv =
      render_report(report_kind::convergence, single, report_format::csv);
  CHECK(csv ==
        "run_index,aime24,avg_aime24\n"
        "1,26.7,26.7\n"
        "2,23.3,25.0\n"
        "3,30.0,26.7\n");

  convergence_data pair;
  pair.series.push_back({"a", {10.0, 20.0}});
  pair.series.push_back({"b", {30.0, 50.0}});
  const std::string md = render_report(report_kind::convergence, pair, report_format::markdown);
  CHECK(md ==
        "# convergence report\n"
        "\n"
        "| run | a | avg a | b | avg b |\n"
        "| --- | --- | --- | --- | --- |\n"
        "| 1 | 10.0 | 10.0 | 30.0 | 30.0 |\n"
        "| 2 | 20.0 | 15.0 | 50.0 | 40.0 |\n");
}

TEST_CASE("convergence rejects ragged or empty input") {
  CHECK_THROWS_AS(
      render_report(report_kind::convergence, convergence_data{}, report_format::csv),
      validation_error);

  convergence_data empty_series;
  empty_series.series.push_back({"a", {}});
  CHECK_THROWS_AS(render_report(report_kind::convergence, empty_series, report_format::csv),
                  validation_error);

  convergence_data unnamed;
  unnamed.series.push_back({"", {1.0}});
  CHECK_THROWS_AS(render_report(report_kind::convergence, unnamed, report_format::csv),
                  validation_error);

  convergence_data ragged;
  ragged.series.push_back({"a", {1.0, 2.0}});
  ragged.series.push_back({"b", {1.0}});
  CHECK_THROWS_AS(render_report(report_kind::convergence, ragged, report_format::csv),
                  validation_error);
}

TEST_CASE("stability renders the trace and the interval") {
  const stability_data data = small_stability();
  const std::string md = render_report(report_kind::stability, data, report_format::markdown);
  CHECK(md ==
        "# stability report\n"
        "\n"
        "series: fx/aime24\n"
        "alpha = 0.10, epsilon = 1.00, n0 = 2, n_cap = 64\n"
        "converged: no\n"
        "final n = 2\n"
        "mean = 25.0\n"
        "sample std = 2.40\n"
        "ci: 25.0 +/- 2.80 (z = 1.644854)\n"
        "required n = 16\n"
        "\n"
        "| iteration | n | sample std | required n |\n"
        "| --- | --- | --- | --- |\n"
        "| 1 | 2 | 2.40 | 16 |\n");

  const std::string csv = render_report(report_kind::stability, data, report_format::csv);
  CHECK(csv ==
        "iteration,n,sample_std,required_n\n"
        "1,2,2.40,16\n");

  stability_data bare = data;
  bare.result.iterations.clear();
  CHECK_THROWS_AS(render_report(report_kind::stability, bare, report_format::markdown),
                  validation_error);
}

TEST_CASE("seed sweep renders one row per seed") {
  seed_sweep_data data;
  data.model = "local-model";
  data.benchmarks = {"aime24"};
  data.entries.push_back({28354, {35.0}});
  data.entries.push_back({24624, {28.3}});

  const std::string md = render_report(report_kind::seed_sweep, data, report_format::markdown);
  CHECK(md ==
        "# seed sweep report\n"
        "\n"
        "model: local-model\n"
        "\n"
        "| seed | aime24 |\n"
        "| --- | --- |\n"
        "| 28354 | 35.0 |\n"
        "| 24624 | 28.3 |\n");

  const std::string csv = render_report(report_kind::seed_sweep, data, report_format::csv);
  CHECK(csv ==
        "seed,aime24\n"
        "28354,35.0\n"
        "24624,28.3\n");

  seed_sweep_data ragged = data;
  ragged.entries[0].scores.clear();
  CHECK_THROWS_AS(render_report(report_kind::seed_sweep, ragged, report_format::csv),
                  validation_error);
  CHECK_THROWS_AS(render_report(report_kind::seed_sweep, seed_sweep_data{}, report_format::csv),
                  validation_error);
}

TEST_CASE("the long-form sweep csv loads with a model filter") {
  const seed_sweep_data data =
      load_seed_sweep_csv("fixtures/seed_sweep_distill.csv", "DeepSeek-R1-Distill-Qwen-1.5B");
  CHECK(data.model == "DeepSeek-R1-Distill-Qwen-1.5B");
  REQUIRE(data.benchmarks.size() == 3);
  CHECK(data.benchmarks[0] == "aime24");
  CHECK(data.benchmarks[1] == "aime25");
  CHECK(data.benchmarks[2] == "gpqa_diamond");
  REQUIRE(data.entries.size() == 16);
  CHECK(data.entries[0].seed == 28354);
  CHECK(data.entries[0].scores[0] == 35.0);
  CHECK(data.entries[0].scores[2] == 40.7);

  CHECK_THROWS_AS(load_seed_sweep_csv("fixtures/seed_sweep_distill.csv", ""), validation_error);
  CHECK_THROWS_AS(load_seed_sweep_csv("fixtures/seed_sweep_distill.csv", "no-such-model"),
                  validation_error);
}

TEST_CASE("malformed sweep csv inputs are rejected") {
  testsup::tmpdir tmp;
  auto attempt = [&](const std::string& name, const std::string& body) {
    const std::string path = tmp.str(name);
    write_file_atomic(path, body);
    return path;
  };

  CHECK_THROWS_AS(load_seed_sweep_csv(attempt("h.csv", "m,s,b,v\nm1,1,a,1.0\n"), ""),
                  parse_error);
  CHECK_THROWS_AS(
      load_seed_sweep_csv(
          attempt("dup.csv", "model,seed,benchmark,score\nm1,1,a,1.0\nm1,1,a,2.0\n"), ""),
      parse_error);
  CHECK_THROWS_AS(
      load_seed_sweep_csv(
          attempt("gap.csv", "model,seed,benchmark,score\nm1,1,a,1.0\nm1,1,b,1.0\nm1,2,a,1.0\n"),
          ""),
      parse_error);
  CHECK_THROWS_AS(
      load_seed_sweep_csv(attempt("seed.csv", "model,seed,benchmark,score\nm1,x,a,1.0\n"), ""),
      parse_error);
  CHECK_THROWS_AS(
      load_seed_sweep_csv(attempt("range.csv", "model,seed,benchmark,score\nm1,1,a,101.0\n"), ""),
      parse_error);
  CHECK_THROWS_AS(load_seed_sweep_csv(attempt("empty.csv", ""), ""), parse_error);
  CHECK_THROWS_AS(load_seed_sweep_csv(tmp.str("missing.csv"), ""), io_error);
}

TEST_CASE("emit_report writes the rendered bytes") {
  testsup::tmpdir tmp;
  const std::string path = tmp.str("out.md");
  emit_report(report_kind::fluctuation, small_table(), report_format::markdown, path);
  CHECK(read_file(path) ==
        render_report(report_kind::fluctuation, small_table(), report_format::markdown));
}

}  // TEST_SUITE
