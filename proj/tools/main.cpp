#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stableval/harness.hpp"
#include "stableval/report.hpp"
#include "stableval/util.hpp"

namespace fs = std::filesystem;
using namespace stableval;

namespace {

std::pair<std::string, std::string> split_named(const std::string& text) {
  const auto pos = text.find('=');
  if (pos == std::string::npos || pos == 0 || pos + 1 == text.size()) {
    throw validation_error("expected NAME=PATH, got: " + text);
  }
  return {text.substr(0, pos), text.substr(pos + 1)};
}

void print_series_summary(const std::string& series_id, const score_series& series,
                          double alpha) {
  std::cout << "series: " << series_id << "\n";
  std::cout << "n = " << series.n << "\n";
  std::cout << "mean = " << format1(series.mean) << "\n";
  if (series.sample_std) {
    std::cout << "sample std = " << format_fixed(*series.sample_std, 2) << "\n";
    const confidence_interval ci = make_confidence_interval(series, alpha);
    std::cout << "ci(" << format_fixed((1.0 - alpha) * 100.0, 0) << "%): "
              << format1(ci.center) << " +/- " << format_fixed(ci.half_width, 2) << "\n";
  }
}

void emit_or_print(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  write_file_atomic(out_path, text);
  std::cout << "wrote " << out_path << "\n";
}

benchmark_set make_sim_set(const std::string& benchmark_id, int questions) {
  benchmark_set set;
  set.benchmark_id = benchmark_id;
  set.version_id = "sim-v1";
  set.samples.reserve(static_cast<size_t>(questions));
  for (int i = 0; i < questions; ++i) {
    benchmark_sample sample;
    char id[16];
    std::snprintf(id, sizeof id, "q%04d", i + 1);
    sample.sample_id = id;
    sample.question = "Compute the checksum of slot " + std::to_string(i + 1) + ".";
    sample.kind = answer_kind::integer;
    sample.integer_answer = (i * 37 + 11) % 1000;
    set.samples.push_back(std::move(sample));
  }
  return set;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"replicated benchmark evaluation with variance accounting"};
  app.require_subcommand(1);

  std::string config_path;
  std::string store_dir;
  std::string out_path;
  std::string format_name = "markdown";
  std::string series_override;
  int concurrency = 1;
  double alpha = 0.10;

  auto* run_cmd = app.add_subcommand("run", "execute a config until its runs are complete");
  run_cmd->add_option("--config", config_path, "config JSON path")->required();
  run_cmd->add_option("--store", store_dir, "run store directory")->required();
  run_cmd->add_option("--concurrency", concurrency, "worker threads");
  run_cmd->add_option("--alpha", alpha, "significance level for the printed interval");
  run_cmd->add_option("--series", series_override, "override the series id");

  int sim_questions = 30;
  double sim_accuracy = 0.3;
  int sim_runs = 64;
  double sim_sensitivity = 0.0;
  std::string sim_benchmark = "simulated";
  uint64_t sim_seed = 0;
  bool sim_fixed_seed = false;
  bool sim_adaptive = false;
  stability_params params;

  auto* sim_cmd = app.add_subcommand("simulate", "run a synthetic benchmark end to end");
  sim_cmd->add_option("--questions", sim_questions, "benchmark size")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--accuracy", sim_accuracy, "per-question success probability")
      ->check(CLI::Range(0.0, 1.0));
  sim_cmd->add_option("--runs", sim_runs, "replications")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed-sensitivity", sim_sensitivity,
                      "fraction of attempts pinned to the seed")
      ->check(CLI::Range(0.0, 1.0));
  sim_cmd->add_option("--benchmark-id", sim_benchmark, "name for the synthetic benchmark");
  sim_cmd->add_option("--fixed-seed", sim_seed, "pin every attempt to this seed");
  sim_cmd->add_option("--store", store_dir, "run store directory")->required();
  sim_cmd->add_option("--concurrency", concurrency, "worker threads");
  sim_cmd->add_option("--alpha", alpha, "significance level");
  sim_cmd->add_flag("--adaptive", sim_adaptive, "run the adaptive stopping procedure instead");
  sim_cmd->add_option("--epsilon", params.epsilon, "target half width in points");
  sim_cmd->add_option("--n0", params.n0, "initial replication count");
  sim_cmd->add_option("--n-cap", params.n_cap, "replication budget");

  std::string control_arg;
  std::vector<std::string> group_args;
  std::vector<std::string> repeat_args;

  auto* compare_cmd = app.add_subcommand("compare", "fluctuation table against a control group");
  compare_cmd->add_option("--store", store_dir, "run store directory")->required();
  compare_cmd->add_option("--control", control_arg, "NAME=CONFIG of the control group")
      ->required();
  compare_cmd->add_option("--group", group_args, "NAME=CONFIG of an experimental group");
  compare_cmd->add_option("--repeat", repeat_args, "NAME=CONFIG of a repeated trial");
  compare_cmd->add_option("--format", format_name, "markdown or csv");
  compare_cmd->add_option("--out", out_path, "write the report here instead of stdout");

  auto* estimate_cmd =
      app.add_subcommand("estimate-n", "adaptive minimum-replication estimate for a config");
  estimate_cmd->add_option("--config", config_path, "config JSON path")->required();
  estimate_cmd->add_option("--store", store_dir, "run store directory")->required();
  estimate_cmd->add_option("--alpha", params.alpha, "significance level");
  estimate_cmd->add_option("--epsilon", params.epsilon, "target half width in points");
  estimate_cmd->add_option("--n0", params.n0, "initial replication count");
  estimate_cmd->add_option("--n-cap", params.n_cap, "replication budget");
  estimate_cmd->add_option("--concurrency", concurrency, "worker threads");
  estimate_cmd->add_option("--format", format_name, "markdown or csv");
  estimate_cmd->add_option("--out", out_path, "write the report here instead of stdout");

  std::string report_kind_name;
  std::vector<std::string> report_series;
  std::string sweep_csv;
  std::string sweep_model;

  auto* report_cmd = app.add_subcommand("report", "emit a table from stored results");
  report_cmd->add_option("--kind", report_kind_name, "convergence or seed_sweep")->required();
  report_cmd->add_option("--store", store_dir, "run store directory");
  report_cmd->add_option("--series", report_series, "LABEL=SERIES_ID column for convergence");
  report_cmd->add_option("--csv", sweep_csv, "long-form seed sweep CSV");
  report_cmd->add_option("--model", sweep_model, "model filter for the sweep CSV");
  report_cmd->add_option("--format", format_name, "markdown or csv");
  report_cmd->add_option("--out", out_path, "write the report here instead of stdout");

  std::string fixture_csv;
  std::string fixture_prefix;

  auto* import_cmd = app.add_subcommand("import-fixture", "load a score CSV as fixture series");
  import_cmd->add_option("--csv", fixture_csv, "CSV with run_index,benchmark,score")->required();
  import_cmd->add_option("--prefix", fixture_prefix, "series id prefix")->required();
  import_cmd->add_option("--store", store_dir, "run store directory")->required();

  CLI11_PARSE(app, argc, argv);
  sim_fixed_seed = sim_cmd->count("--fixed-seed") > 0;

  try {
    if (app.got_subcommand(run_cmd)) {
      eval_config cfg = load_config(config_path);
      if (!series_override.empty()) cfg.series_id = series_override;
      fs_store store(store_dir);
      run_options opts;
      opts.concurrency = concurrency;
      if (cfg.seeds.mode == seed_mode::fixed_set) {
        for (const auto& [seed, series] : run_seed_sweep(cfg, store, opts)) {
          std::cout << "seed " << seed << ": mean = " << format1(series.mean)
                    << (series.sample_std
                            ? ", sample std = " + format_fixed(*series.sample_std, 2)
                            : std::string())
                    << "\n";
        }
      } else {
        print_series_summary(resolve_series_id(cfg), run_experiment(cfg, store, opts), alpha);
      }
    } else if (app.got_subcommand(sim_cmd)) {
      fs_store store(store_dir);
      const fs::path dataset = fs::path(store_dir) / (sim_benchmark + "_dataset.jsonl");
      eval_config cfg;
      cfg.benchmark_id = sim_benchmark;
      cfg.dataset_path = dataset.string();
      cfg.dataset_version_id = "sim-v1";
      cfg.mapping.id_field = "id";
      cfg.n = sim_runs;
      cfg.backend_kind = "simulated";
      cfg.sim.uniform_accuracy = sim_accuracy;
      cfg.sim.seed_sensitivity = sim_sensitivity;
      if (sim_fixed_seed) {
        cfg.seeds.mode = seed_mode::fixed;
        cfg.seeds.seed = sim_seed;
      }
      cfg.metadata["source"] = "simulate";
      if (!fs::exists(dataset)) {
        write_benchmark(dataset.string(), make_sim_set(sim_benchmark, sim_questions), cfg.mapping);
      }
      run_options opts;
      opts.concurrency = concurrency;
      if (sim_adaptive) {
        params.alpha = alpha;
        const stability_estimate estimate = estimate_stability(cfg, params, store, opts);
        stability_data data{estimate.series_id, params, estimate.result};
        std::cout << render_report(report_kind::stability, data, report_format::markdown);
        std::cout << "new runs executed: " << estimate.new_runs << "\n";
      } else {
        print_series_summary(resolve_series_id(cfg), run_experiment(cfg, store, opts), alpha);
      }
    } else if (app.got_subcommand(compare_cmd)) {
      fs_store store(store_dir);
      std::vector<experiment_group> groups;
      auto add_group = [&groups](const std::string& arg, group_role role) {
        const auto [name, path] = split_named(arg);
        groups.push_back({name, load_config(path), role});
      };
      add_group(control_arg, group_role::control);
      for (const auto& arg : group_args) add_group(arg, group_role::experimental);
      for (const auto& arg : repeat_args) add_group(arg, group_role::repeated_trial);
      const fluctuation_table table = compare_groups(groups, store);
      emit_or_print(render_report(report_kind::fluctuation, table,
                                  report_format_from_string(format_name)),
                    out_path);
    } else if (app.got_subcommand(estimate_cmd)) {
      eval_config cfg = load_config(config_path);
      fs_store store(store_dir);
      run_options opts;
      opts.concurrency = concurrency;
      const stability_estimate estimate = estimate_stability(cfg, params, store, opts);
      stability_data data{estimate.series_id, params, estimate.result};
      emit_or_print(render_report(report_kind::stability, data,
                                  report_format_from_string(format_name)),
                    out_path);
      if (!out_path.empty()) {
        std::cout << (estimate.result.converged ? "converged" : "budget exhausted") << " at n = "
                  << estimate.result.final_series.n << "\n";
      }
    } else if (app.got_subcommand(report_cmd)) {
      const report_kind kind = report_kind_from_string(report_kind_name);
      if (kind == report_kind::convergence) {
        if (store_dir.empty() || report_series.empty()) {
          throw validation_error("convergence reports need --store and at least one --series");
        }
        fs_store store(store_dir);
        convergence_data data;
        for (const auto& arg : report_series) {
          const auto [label, series_id] = split_named(arg);
          std::vector<double> scores = series_scores(store, series_id);
          if (scores.empty()) {
            throw not_found_error("series has no complete runs: " + series_id);
          }
          data.series.push_back({label, std::move(scores)});
        }
        emit_or_print(render_report(kind, data, report_format_from_string(format_name)),
                      out_path);
      } else if (kind == report_kind::seed_sweep) {
        if (sweep_csv.empty()) throw validation_error("seed_sweep reports need --csv");
        const seed_sweep_data data = load_seed_sweep_csv(sweep_csv, sweep_model);
        emit_or_print(render_report(kind, data, report_format_from_string(format_name)),
                      out_path);
      } else {
        throw validation_error("the report subcommand emits convergence or seed_sweep tables; "
                               "compare and estimate-n emit the other kinds");
      }
    } else if (app.got_subcommand(import_cmd)) {
      fs_store store(store_dir);
      const fixture_import result = import_fixture(fixture_csv, fixture_prefix, store);
      if (result.benchmarks.empty()) {
        std::cout << "warning: no data rows imported from " << fixture_csv << "\n";
      }
      for (const auto& benchmark : result.benchmarks) {
        std::cout << "imported " << benchmark << " -> " << result.series_ids.at(benchmark)
                  << " (" << result.scores.at(benchmark).size() << " runs)\n";
      }
    }
  } catch (const incomplete_groups_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
