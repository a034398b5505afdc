#include "stableval/report.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "stableval/util.hpp"

namespace stableval {

std::string to_string(report_kind value) {
  switch (value) {
    case report_kind::fluctuation: return "fluctuation";
    case report_kind::convergence: return "convergence";
    case report_kind::stability: return "stability";
    case report_kind::seed_sweep: return "seed_sweep";
  }
  throw validation_error("bad report_kind value");
}

report_kind report_kind_from_string(const std::string& text) {
  if (text == "fluctuation") return report_kind::fluctuation;
  if (text == "convergence") return report_kind::convergence;
  if (text == "stability") return report_kind::stability;
  if (text == "seed_sweep") return report_kind::seed_sweep;
  throw validation_error("unknown report kind: " + text);
}

std::string to_string(report_format value) {
  switch (value) {
    case report_format::markdown: return "markdown";
    case report_format::csv: return "csv";
  }
  throw validation_error("bad report_format value");
}

report_format report_format_from_string(const std::string& text) {
  if (text == "markdown" || text == "md") return report_format::markdown;
  if (text == "csv") return report_format::csv;
  throw validation_error("unknown report format: " + text);
}

namespace {

template <typename T>
const T& expect_data(const report_data& data, report_kind kind) {
  const T* typed = std::get_if<T>(&data);
  if (!typed) throw validation_error("report data does not match kind " + to_string(kind));
  return *typed;
}

void write_md_row(std::ostringstream& out, const std::vector<std::string>& cells) {
  out << "|";
  for (const auto& cell : cells) out << " " << cell << " |";
  out << "\n";
}

void write_md_table(std::ostringstream& out, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) {
  write_md_row(out, header);
  std::vector<std::string> rule(header.size(), "---");
  write_md_row(out, rule);
  for (const auto& row : rows) write_md_row(out, row);
}

void write_csv(std::ostringstream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) out << ",";
    out << csv_escape(header[i]);
  }
  out << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      out << csv_escape(row[i]);
    }
    out << "\n";
  }
}

std::string render_fluctuation(const fluctuation_table& table, report_format format) {
  if (table.benchmark_id.empty()) throw validation_error("fluctuation table lacks a benchmark");

  std::vector<std::vector<std::string>> rows;
  if (format == report_format::csv) {
    rows.push_back({table.control_name, to_string(group_role::control),
                    format1(table.control_mean), ""});
  }
  for (const auto& row : table.rows) {
    rows.push_back({row.name, to_string(row.role), format1(row.mean),
                    format1(row.fluctuation_points)});
  }

  std::ostringstream out;
  if (format == report_format::csv) {
    write_csv(out, {"name", "role", "mean", "fluctuation"}, rows);
    return out.str();
  }
  out << "# fluctuation report\n\n";
  out << "benchmark: " << table.benchmark_id << "\n";
  out << "control: " << table.control_name << " (n = " << table.control_n
      << ", mean = " << format1(table.control_mean) << ")\n\n";
  write_md_table(out, {"group", "role", "mean", "fluctuation"}, rows);
  return out.str();
}

std::string render_convergence(const convergence_data& data, report_format format) {
  if (data.series.empty()) throw validation_error("convergence report needs at least one series");
  const size_t runs = data.series.front().scores.size();
  if (runs == 0) throw validation_error("convergence report needs at least one run");
  for (const auto& series : data.series) {
    if (series.benchmark_id.empty()) {
      throw validation_error("convergence series lacks a benchmark id");
    }
    if (series.scores.size() != runs) {
      throw validation_error("convergence series '" + series.benchmark_id +
                             "' has a mismatched run count");
    }
  }

  std::vector<std::vector<double>> averages;
  averages.reserve(data.series.size());
  for (const auto& series : data.series) averages.push_back(cumulative_averages(series.scores));

  const bool csv = format == report_format::csv;
  std::vector<std::string> header{csv ? "run_index" : "run"};
  for (const auto& series : data.series) {
    header.push_back(series.benchmark_id);
    header.push_back((csv ? "avg_" : "avg ") + series.benchmark_id);
  }

  std::vector<std::vector<std::string>> rows;
  rows.reserve(runs);
  for (size_t run = 0; run < runs; ++run) {
    std::vector<std::string> row{std::to_string(run + 1)};
    for (size_t s = 0; s < data.series.size(); ++s) {
      row.push_back(format1(data.series[s].scores[run]));
      row.push_back(format1(averages[s][run]));
    }
    rows.push_back(std::move(row));
  }

  std::ostringstream out;
  if (csv) {
    write_csv(out, header, rows);
    return out.str();
  }
  out << "# convergence report\n\n";
  write_md_table(out, header, rows);
  return out.str();
}

std::string render_stability(const stability_data& data, report_format format) {
  if (data.result.iterations.empty()) {
    throw validation_error("stability report needs at least one iteration");
  }

  std::vector<std::vector<std::string>> rows;
  rows.reserve(data.result.iterations.size());
  for (size_t i = 0; i < data.result.iterations.size(); ++i) {
    const adaptive_iteration& step = data.result.iterations[i];
    rows.push_back({std::to_string(i + 1), std::to_string(step.n_so_far),
                    format_fixed(step.sample_std, 2), std::to_string(step.n_required)});
  }

  std::ostringstream out;
  if (format == report_format::csv) {
    write_csv(out, {"iteration", "n", "sample_std", "required_n"}, rows);
    return out.str();
  }

  out << "# stability report\n\n";
  if (!data.series_id.empty()) out << "series: " << data.series_id << "\n";
  out << "alpha = " << format_fixed(data.params.alpha, 2)
      << ", epsilon = " << format_fixed(data.params.epsilon, 2)
      << ", n0 = " << data.params.n0 << ", n_cap = " << data.params.n_cap << "\n";
  out << "converged: " << (data.result.converged ? "yes" : "no") << "\n";
  out << "final n = " << data.result.final_series.n << "\n";
  out << "mean = " << format1(data.result.final_series.mean) << "\n";
  if (data.result.final_series.sample_std) {
    out << "sample std = " << format_fixed(*data.result.final_series.sample_std, 2) << "\n";
  }
  out << "ci: " << format1(data.result.ci.center) << " +/- "
      << format_fixed(data.result.ci.half_width, 2)
      << " (z = " << format_fixed(data.result.ci.z_value, 6) << ")\n";
  out << "required n = " << data.result.required_n << "\n\n";
  write_md_table(out, {"iteration", "n", "sample std", "required n"}, rows);
  return out.str();
}

std::string render_seed_sweep(const seed_sweep_data& data, report_format format) {
  if (data.benchmarks.empty()) throw validation_error("seed sweep report needs benchmarks");
  if (data.entries.empty()) throw validation_error("seed sweep report needs entries");
  for (const auto& entry : data.entries) {
    if (entry.scores.size() != data.benchmarks.size()) {
      throw validation_error("seed sweep entry for seed " + std::to_string(entry.seed) +
                             " has a mismatched score count");
    }
  }

  std::vector<std::string> header{"seed"};
  for (const auto& benchmark : data.benchmarks) header.push_back(benchmark);

  std::vector<std::vector<std::string>> rows;
  rows.reserve(data.entries.size());
  for (const auto& entry : data.entries) {
    std::vector<std::string> row{std::to_string(entry.seed)};
    for (double score : entry.scores) row.push_back(format1(score));
    rows.push_back(std::move(row));
  }

  std::ostringstream out;
  if (format == report_format::csv) {
    write_csv(out, header, rows);
    return out.str();
  }
  out << "# seed sweep report\n\n";
  if (!data.model.empty()) out << "model: " << data.model << "\n\n";
  write_md_table(out, header, rows);
  return out.str();
}

}  // namespace

seed_sweep_data load_seed_sweep_csv(const std::string& path, const std::string& model_filter) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open seed sweep CSV: " + path);

  seed_sweep_data data;
  std::map<std::pair<uint64_t, std::string>, double> cells;
  std::vector<uint64_t> seed_order;
  std::set<uint64_t> seen_seeds;
  std::set<std::string> models;

  std::string line;
  size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (!saw_header) {
      if (fields.size() != 4 || trim(fields[0]) != "model" || trim(fields[1]) != "seed" ||
          trim(fields[2]) != "benchmark" || trim(fields[3]) != "score") {
        throw parse_error("seed sweep CSV header must be model,seed,benchmark,score (line " +
                          std::to_string(line_no) + ")");
      }
      saw_header = true;
      continue;
    }
    if (fields.size() != 4) {
      throw parse_error("seed sweep row " + std::to_string(line_no) + " needs 4 fields");
    }
    const std::string model = trim(fields[0]);
    const std::string benchmark = trim(fields[2]);
    if (model.empty() || benchmark.empty()) {
      throw parse_error("empty model or benchmark on seed sweep row " + std::to_string(line_no));
    }
    if (!model_filter.empty() && model != model_filter) continue;
    models.insert(model);
    if (models.size() > 1) {
      throw validation_error("seed sweep CSV mixes several models; pass a model filter");
    }

    uint64_t seed = 0;
    double score = 0.0;
    try {
      size_t pos = 0;
      seed = std::stoull(trim(fields[1]), &pos);
      if (pos != trim(fields[1]).size()) throw std::invalid_argument("trailing text");
      const std::string score_text = trim(fields[3]);
      score = std::stod(score_text, &pos);
      if (pos != score_text.size()) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      throw parse_error("malformed seed sweep row " + std::to_string(line_no));
    }
    if (score < 0.0 || score > 100.0) {
      throw parse_error("score outside [0, 100] on seed sweep row " + std::to_string(line_no));
    }

    if (std::find(data.benchmarks.begin(), data.benchmarks.end(), benchmark) ==
        data.benchmarks.end()) {
      data.benchmarks.push_back(benchmark);
    }
    if (seen_seeds.insert(seed).second) seed_order.push_back(seed);
    if (!cells.emplace(std::make_pair(seed, benchmark), score).second) {
      throw parse_error("duplicate seed sweep cell on row " + std::to_string(line_no));
    }
  }
  if (!saw_header) throw parse_error("seed sweep CSV is empty: " + path);
  if (cells.empty()) {
    throw validation_error(model_filter.empty()
                               ? "seed sweep CSV has no data rows"
                               : "seed sweep CSV has no rows for model " + model_filter);
  }
  data.model = *models.begin();

  for (uint64_t seed : seed_order) {
    seed_sweep_entry entry;
    entry.seed = seed;
    for (const auto& benchmark : data.benchmarks) {
      auto it = cells.find({seed, benchmark});
      if (it == cells.end()) {
        throw parse_error("seed " + std::to_string(seed) + " lacks a score for benchmark " +
                          benchmark);
      }
      entry.scores.push_back(it->second);
    }
    data.entries.push_back(std::move(entry));
  }
  return data;
}

std::string render_report(report_kind kind, const report_data& data, report_format format) {
  switch (kind) {
    case report_kind::fluctuation:
      return render_fluctuation(expect_data<fluctuation_table>(data, kind), format);
    case report_kind::convergence:
      return render_convergence(expect_data<convergence_data>(data, kind), format);
    case report_kind::stability:
      return render_stability(expect_data<stability_data>(data, kind), format);
    case report_kind::seed_sweep:
      return render_seed_sweep(expect_data<seed_sweep_data>(data, kind), format);
  }
  throw validation_error("bad report_kind value");
}

void emit_report(report_kind kind, const report_data& data, report_format format,
                 const std::string& path) {
  write_file_atomic(path, render_report(kind, data, format));
}

}  // namespace stableval
