// Copyright 2026 The gpbtl Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gpbtl/results.hpp"

#include <cmath>
#include <fstream>
#include <string_view>

#include <fmt/format.h>

#include "gpbtl/error.hpp"

namespace gpbtl {

namespace fs = std::filesystem;

namespace {

std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string name(Algorithm a) { return std::string(algorithm_name(a)); }
std::string code(KernelFamily f) { return std::string(kernel_code(f)); }

}  // namespace

std::string Provenance::line() const {
  return fmt::format("# config_hash={} seed={} version={}", config_hash, seed, version);
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  return fmt::format("{}", value);
}

std::string render_csv(const Provenance& provenance, const CsvRow& header, const std::vector<CsvRow>& rows) {
  std::string out = provenance.line();
  out += '\n';
  auto append = [&out](const CsvRow& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ',';
      out += quote(row[i]);
    }
    out += '\n';
  };
  append(header);
  for (const CsvRow& row : rows) {
    if (row.size() != header.size()) {
      throw DimensionError(fmt::format("CSV row has {} fields, header has {}", row.size(), header.size()));
    }
    append(row);
  }
  return out;
}

void write_csv(const fs::path& path, const Provenance& provenance, const CsvRow& header,
               const std::vector<CsvRow>& rows) {
  const std::string text = render_csv(provenance, header, rows);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot open '{}' for writing", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(fmt::format("write to '{}' failed", path.string()));
}

std::vector<fs::path> write_sweep(const fs::path& dir, const SweepResult& result, const Provenance& provenance) {
  const std::string variable(sweep_variable_name(result.variable));
  std::vector<CsvRow> trials;
  std::vector<CsvRow> summary;
  for (std::size_t a = 0; a < result.algorithms.size(); ++a) {
    for (std::size_t v = 0; v < result.values.size(); ++v) {
      const std::string value = format_number(result.values[v]);
      for (std::size_t t = 0; t < result.mae[a][v].size(); ++t) {
        trials.push_back({name(result.algorithms[a]), variable, value, std::to_string(t),
                          format_number(result.mae[a][v][t])});
      }
      const Quantiles q = result.summary(a, v);
      summary.push_back({name(result.algorithms[a]), variable, value, format_number(q.median), format_number(q.q25),
                         format_number(q.q75)});
    }
  }
  const fs::path trials_path = dir / "sweep_trials.csv";
  const fs::path summary_path = dir / "sweep_summary.csv";
  write_csv(trials_path, provenance, {"algorithm", "variable", "value", "trial", "mae"}, trials);
  write_csv(summary_path, provenance, {"algorithm", "variable", "value", "median", "q25", "q75"}, summary);
  return {trials_path, summary_path};
}

std::vector<fs::path> write_grid(const fs::path& dir, const KernelGridResult& result, const Provenance& provenance) {
  std::vector<CsvRow> trials;
  std::vector<CsvRow> summary;
  for (std::size_t r = 0; r < result.synthesis_families.size(); ++r) {
    const std::string syn = code(result.synthesis_families[r]);
    for (std::size_t t = 0; t < result.snt[r].size(); ++t) {
      trials.push_back({"SNT", syn, syn, std::to_string(t), format_number(result.snt[r][t])});
    }
    const Quantiles q = aggregate(result.snt[r]);
    summary.push_back({"SNT", syn, syn, format_number(q.median), format_number(q.q25), format_number(q.q75), "", "", ""});
  }
  for (Algorithm a : {Algorithm::kTnt, Algorithm::kIcm, Algorithm::kFpda}) {
    const auto& table = result.table(a);
    for (std::size_t r = 0; r < result.synthesis_families.size(); ++r) {
      const std::string syn = code(result.synthesis_families[r]);
      for (std::size_t c = 0; c < result.analysis_families.size(); ++c) {
        const std::string ana = code(result.analysis_families[c]);
        for (std::size_t t = 0; t < table[r][c].size(); ++t) {
          trials.push_back({name(a), syn, ana, std::to_string(t), format_number(table[r][c][t])});
        }
        const Quantiles q = aggregate(table[r][c]);
        const Quantiles d = aggregate(result.differential(a, r, c));
        summary.push_back({name(a), syn, ana, format_number(q.median), format_number(q.q25), format_number(q.q75),
                           format_number(d.median), format_number(d.q25), format_number(d.q75)});
      }
    }
  }
  const fs::path trials_path = dir / "grid_trials.csv";
  const fs::path summary_path = dir / "grid_summary.csv";
  write_csv(trials_path, provenance, {"algorithm", "synthesis", "analysis", "trial", "mae"}, trials);
  write_csv(summary_path, provenance,
            {"algorithm", "synthesis", "analysis", "median", "q25", "q75", "diff_median", "diff_q25", "diff_q75"},
            summary);
  return {trials_path, summary_path};
}

std::vector<fs::path> write_jura(const fs::path& dir, const JuraReport& report, const Provenance& provenance) {
  std::vector<fs::path> written;
  std::vector<CsvRow> restarts;
  for (const JuraRestart& r : report.restarts) {
    for (Algorithm a : kAllAlgorithms) {
      const auto i = static_cast<std::size_t>(a);
      restarts.push_back({std::to_string(r.restart), name(a), format_number(r.mae[i]), format_number(r.nll[i]),
                          r.converged[i] ? "1" : "0"});
    }
  }
  written.push_back(dir / "jura_restarts.csv");
  write_csv(written.back(), provenance, {"restart", "algorithm", "mae", "nll", "converged"}, restarts);

  std::vector<CsvRow> summary;
  for (Algorithm a : kAllAlgorithms) {
    const auto i = static_cast<std::size_t>(a);
    summary.push_back({name(a), format_number(report.mae_mean[i]), format_number(report.mae_sd[i])});
  }
  written.push_back(dir / "jura_summary.csv");
  write_csv(written.back(), provenance, {"algorithm", "mae_mean", "mae_sd"}, summary);

  written.push_back(dir / "jura_message.csv");
  write_csv(written.back(), provenance, {"quantity", "scalars"},
            {{"raw_data", std::to_string(report.raw_message_size)},
             {"predictor", std::to_string(report.predictor_message_size)}});

  for (const JuraMap& map : report.maps) {
    std::vector<CsvRow> rows;
    rows.reserve(static_cast<std::size_t>(map.sites.rows()));
    for (Index i = 0; i < map.sites.rows(); ++i) {
      rows.push_back({format_number(map.sites(i, 0)), format_number(map.sites(i, 1)), format_number(map.mean(i)),
                      format_number(map.sd(i))});
    }
    written.push_back(dir / fmt::format("jura_map_{}.csv", algorithm_name(map.algorithm)));
    write_csv(written.back(), provenance, {"x", "y", "mean", "sd"}, rows);
  }
  return written;
}

void write_dataset(const fs::path& path, const SyntheticDataset& ds, const Provenance& provenance) {
  std::vector<CsvRow> rows;
  for (Index i = 0; i < ds.train_inputs.rows(); ++i) {
    rows.push_back({"train", format_number(ds.train_inputs(i, 0)), format_number(ds.y_source(i)),
                    format_number(ds.y_target(i)), format_number(ds.f_source_train(i)),
                    format_number(ds.f_target_train(i))});
  }
  for (Index i = 0; i < ds.test_inputs.rows(); ++i) {
    rows.push_back({"test", format_number(ds.test_inputs(i, 0)), "", "", format_number(ds.f_source_test(i)),
                    format_number(ds.f_target_test(i))});
  }
  write_csv(path, provenance, {"split", "x", "y_source", "y_target", "f_source", "f_target"}, rows);
}

}  // namespace gpbtl
