// Copyright 2026 The Fairer NMF Authors.
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

#include "fairnmf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "json.hpp"

#include "fairnmf/fairer_am.hpp"
#include "fairnmf/fairer_mu.hpp"
#include "fairnmf/metrics.hpp"

namespace fairnmf {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kFairerAm:
      return "fairer-am";
    case Method::kFairerMu:
      return "fairer-mu";
    case Method::kStandardMu:
      return "standard-mu";
    case Method::kStandardPerGroup:
      return "standard-per-group";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::kFairerAm, Method::kFairerMu, Method::kStandardMu,
                   Method::kStandardPerGroup}) {
    if (method_name(m) == name) return m;
  }
  throw ConfigError("unknown method '" + std::string(name) +
                    "' (expected standard-mu, fairer-am, fairer-mu or "
                    "standard-per-group)");
}

void ExperimentConfig::validate() const {
  if (methods.empty()) throw ConfigError("no methods selected");
  if (ranks.empty()) throw ConfigError("rank range is empty");
  for (Index r : ranks) {
    if (r < 1) throw ConfigError("ranks must be >= 1");
  }
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (baseline_runs < 1) throw ConfigError("baseline_runs must be >= 1");
  if (!(rel_tol > 0.0) || !(solver_tol > 0.0)) {
    throw ConfigError("tolerances must be > 0");
  }
  if (max_iters < 1 || max_outer_iters < 1 || max_inner_iters < 1) {
    throw ConfigError("iteration limits must be >= 1");
  }
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    const std::string item = trim(s.substr(start, pos - start));
    if (!item.empty()) out.push_back(item);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("invalid value '" + s + "' for '" + std::string(key) + "'");
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("invalid boolean '" + s + "' for '" + std::string(key) + "'");
}

// "label=RxCxK,label=RxCxK"
SyntheticSpec parse_synthetic(std::string_view body, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.seed = seed;
  for (const std::string& item : split(body, ',')) {
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("synthetic group '" + item + "' must look like label=RxCxK");
    }
    const std::vector<std::string> dims = split(std::string_view(item).substr(eq + 1), 'x');
    if (dims.size() != 3) {
      throw ConfigError("synthetic group '" + item + "' must look like label=RxCxK");
    }
    spec.groups.push_back({trim(std::string_view(item).substr(0, eq)),
                           parse_number<Index>("dataset", dims[0]),
                           parse_number<Index>("dataset", dims[1]),
                           parse_number<Index>("dataset", dims[2])});
  }
  spec.validate();
  return spec;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, static_cast<std::size_t>(res.ptr - buf));
}

struct Cell {
  Method method;
  Index rank;
  int trial;
};

struct CellOutcome {
  std::vector<ResultRow> rows;
  std::optional<std::string> failure;
};

std::vector<ResultRow> rows_from_fit(Method method, Index rank, int trial,
                                     const GroupedMatrix& x, const FitResult& fit,
                                     const GroupBaselines& baselines, double seconds) {
  const GroupMetrics m = group_metrics(x, fit.factors, baselines.values);
  std::vector<ResultRow> rows;
  for (std::size_t l = 0; l < x.num_groups(); ++l) {
    ResultRow row;
    row.method = method;
    row.rank = rank;
    row.trial = trial;
    row.group = l;
    row.rel_error_pct = 100.0 * m.relative_error[l];
    row.rel_loss = m.relative_loss[l];
    row.objective = m.objective_f;
    row.iterations = fit.report.iterations();
    row.seconds = seconds;
    rows.push_back(row);
  }
  return rows;
}

CellOutcome run_cell(const Cell& cell, const ExperimentConfig& cfg,
                     const GroupedMatrix& x, const GroupBaselines& baselines) {
  using Clock = std::chrono::steady_clock;
  const std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(cell.trial));
  auto seconds_since = [&](Clock::time_point start) {
    return cfg.record_timing
               ? std::chrono::duration<double>(Clock::now() - start).count()
               : 0.0;
  };

  CellOutcome out;
  try {
    switch (cell.method) {
      case Method::kStandardMu: {
        NmfOptions opts{cell.rank, cfg.max_iters, cfg.rel_tol, 1e-12, seed};
        const auto start = Clock::now();
        const FitResult fit = nmf_mu(x.matrix(), opts);
        const double secs = seconds_since(start);
        out.rows = rows_from_fit(cell.method, cell.rank, cell.trial, x, fit, baselines, secs);
        break;
      }
      case Method::kFairerAm:
      case Method::kFairerMu: {
        FairerOptions opts;
        opts.rank = cell.rank;
        opts.max_outer_iters = cfg.max_outer_iters;
        opts.rel_tol = cfg.rel_tol;
        opts.solver_tol = cfg.solver_tol;
        opts.max_inner_iters = cfg.max_inner_iters;
        opts.seed = seed;
        const auto start = Clock::now();
        const FitResult fit = cell.method == Method::kFairerAm
                                  ? fairer_nmf_am(x, baselines, opts)
                                  : fairer_nmf_mu(x, baselines, opts);
        const double secs = seconds_since(start);
        if (fit.report.termination == Termination::kSolverFailure) {
          out.failure = fit.report.message;
        }
        if (fit.report.iterations() > 0) {
          out.rows =
              rows_from_fit(cell.method, cell.rank, cell.trial, x, fit, baselines, secs);
        }
        break;
      }
      case Method::kStandardPerGroup: {
        NmfOptions opts{cell.rank, cfg.max_iters, cfg.rel_tol, 1e-12, seed};
        for (std::size_t l = 0; l < x.num_groups(); ++l) {
          const Matrix block = x.block(l);
          const auto start = Clock::now();
          const FitResult fit = nmf_mu(block, opts);
          ResultRow row;
          row.method = cell.method;
          row.rank = cell.rank;
          row.trial = cell.trial;
          row.group = l;
          row.rel_error_pct =
              100.0 * relative_error(block, fit.factors.W, fit.factors.H);
          row.iterations = fit.report.iterations();
          row.seconds = seconds_since(start);
          out.rows.push_back(row);
        }
        break;
      }
    }
  } catch (const std::exception& e) {
    out.rows.clear();
    out.failure = e.what();
  }
  return out;
}

}  // namespace

void apply_setting(ExperimentConfig& cfg, std::string_view key_in, std::string_view value) {
  const std::string key = trim(key_in);
  if (key == "dataset") {
    cfg.dataset.spec = trim(value);
  } else if (key == "group_column") {
    cfg.dataset.group_column = trim(value);
  } else if (key == "drop_columns") {
    cfg.dataset.drop_columns = split(value, ',');
  } else if (key == "data_seed") {
    cfg.dataset.data_seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "normalize") {
    cfg.dataset.normalize = parse_bool(key, value);
  } else if (key == "methods") {
    cfg.methods.clear();
    for (const std::string& m : split(value, ',')) {
      const Method parsed = parse_method(m);
      if (std::find(cfg.methods.begin(), cfg.methods.end(), parsed) == cfg.methods.end()) {
        cfg.methods.push_back(parsed);
      }
    }
  } else if (key == "ranks") {
    cfg.ranks = parse_ranks(value);
  } else if (key == "trials") {
    cfg.trials = parse_number<int>(key, value);
  } else if (key == "baseline_runs") {
    cfg.baseline_runs = parse_number<int>(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "rel_tol") {
    cfg.rel_tol = parse_number<double>(key, value);
  } else if (key == "solver_tol") {
    cfg.solver_tol = parse_number<double>(key, value);
  } else if (key == "max_iters") {
    cfg.max_iters = parse_number<int>(key, value);
  } else if (key == "max_outer_iters") {
    cfg.max_outer_iters = parse_number<int>(key, value);
  } else if (key == "max_inner_iters") {
    cfg.max_inner_iters = parse_number<int>(key, value);
  } else if (key == "jobs") {
    cfg.jobs = parse_number<int>(key, value);
  } else if (key == "timing") {
    cfg.record_timing = parse_bool(key, value);
  } else if (key == "out") {
    cfg.out_dir = trim(value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  ExperimentConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    apply_setting(cfg, std::string_view(t).substr(0, eq), std::string_view(t).substr(eq + 1));
  }
  return cfg;
}

std::vector<Index> parse_ranks(std::string_view text) {
  std::set<Index> ranks;
  for (const std::string& part : split(text, ',')) {
    const std::size_t dash = part.find('-');
    if (dash == std::string::npos) {
      ranks.insert(parse_number<Index>("ranks", part));
      continue;
    }
    const Index lo = parse_number<Index>("ranks", std::string_view(part).substr(0, dash));
    const Index hi = parse_number<Index>("ranks", std::string_view(part).substr(dash + 1));
    if (lo > hi) throw ConfigError("empty rank range '" + part + "'");
    for (Index r = lo; r <= hi; ++r) ranks.insert(r);
  }
  if (ranks.empty()) throw ConfigError("rank range is empty");
  return {ranks.begin(), ranks.end()};
}

GroupedMatrix load_dataset(const DatasetSource& source) {
  GroupedMatrix data = [&] {
    if (source.spec == "table1") {
      return generate_synthetic(SyntheticSpec::table1(source.data_seed));
    }
    constexpr std::string_view kPrefix = "synthetic:";
    if (source.spec.rfind(kPrefix, 0) == 0) {
      return generate_synthetic(
          parse_synthetic(std::string_view(source.spec).substr(kPrefix.size()),
                          source.data_seed));
    }
    return load_grouped_csv(source.spec, source.group_column, source.drop_columns);
  }();
  return source.normalize ? normalize_features(data) : data;
}

ExperimentResults run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_experiment(cfg, load_dataset(cfg.dataset));
}

ExperimentResults run_experiment(const ExperimentConfig& cfg, const GroupedMatrix& data) {
  cfg.validate();
  ExperimentResults results;
  results.config = cfg;
  results.group_labels = data.labels();
  for (const Group& g : data.groups()) {
    results.group_sizes.push_back(static_cast<Index>(g.rows.size()));
  }

  for (Index rank : cfg.ranks) {
    NmfOptions opts{rank, cfg.max_iters, cfg.rel_tol, 1e-12,
                    derive_seed(cfg.seed, 1'000'000 + static_cast<std::uint64_t>(rank))};
    results.baselines.emplace(rank, estimate_baselines(data, opts, cfg.baseline_runs));
  }

  std::vector<Method> methods = cfg.methods;
  std::sort(methods.begin(), methods.end(), [](Method a, Method b) {
    return method_name(a) < method_name(b);
  });
  std::vector<Cell> cells;
  for (Method m : methods) {
    for (Index rank : cfg.ranks) {
      for (int t = 0; t < cfg.trials; ++t) cells.push_back({m, rank, t});
    }
  }

  std::vector<CellOutcome> outcomes(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      outcomes[i] = run_cell(cells[i], cfg, data, results.baselines.at(cells[i].rank));
    }
  };
  const int threads = std::min<int>(cfg.jobs, static_cast<int>(cells.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (ResultRow& row : outcomes[i].rows) results.rows.push_back(row);
    if (outcomes[i].failure) {
      results.failures.push_back(
          {cells[i].method, cells[i].rank, cells[i].trial, *outcomes[i].failure});
    }
  }
  return results;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile: no values");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

void emit_results(const ExperimentResults& results, const std::filesystem::path& out_dir) {
  if (results.rows.empty() && results.failures.empty()) {
    throw std::invalid_argument("emit_results: nothing to write");
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());

  const std::filesystem::path csv_path = out_dir / "results.csv";
  {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
    csv << "method,rank,trial,group,rel_error_pct,rel_loss,f,iters,seconds\n";
    for (const ResultRow& r : results.rows) {
      csv << method_name(r.method) << ',' << r.rank << ',' << r.trial << ','
          << results.group_labels[r.group] << ',' << format_double(r.rel_error_pct) << ','
          << (r.rel_loss ? format_double(*r.rel_loss) : "") << ','
          << (r.objective ? format_double(*r.objective) : "") << ',' << r.iterations
          << ',' << format_double(r.seconds) << '\n';
    }
    if (!csv) throw std::runtime_error("failed writing " + csv_path.string());
  }

  using nlohmann::ordered_json;
  const ExperimentConfig& cfg = results.config;
  ordered_json summary;
  summary["schema_version"] = kSummarySchemaVersion;

  ordered_json config;
  config["dataset"] = cfg.dataset.spec;
  config["group_column"] = cfg.dataset.group_column;
  config["drop_columns"] = cfg.dataset.drop_columns;
  config["data_seed"] = cfg.dataset.data_seed;
  config["normalize"] = cfg.dataset.normalize;
  config["methods"] = ordered_json::array();
  for (Method m : cfg.methods) config["methods"].push_back(std::string(method_name(m)));
  config["ranks"] = cfg.ranks;
  config["trials"] = cfg.trials;
  config["baseline_runs"] = cfg.baseline_runs;
  config["seed"] = cfg.seed;
  config["rel_tol"] = cfg.rel_tol;
  config["solver_tol"] = cfg.solver_tol;
  config["max_iters"] = cfg.max_iters;
  config["max_outer_iters"] = cfg.max_outer_iters;
  config["max_inner_iters"] = cfg.max_inner_iters;
  config["timing"] = cfg.record_timing;
  summary["config"] = config;

  summary["groups"] = ordered_json::array();
  for (std::size_t l = 0; l < results.group_labels.size(); ++l) {
    summary["groups"].push_back(
        {{"label", results.group_labels[l]}, {"rows", results.group_sizes[l]}});
  }

  summary["baselines"] = ordered_json::array();
  for (const auto& [rank, b] : results.baselines) {
    ordered_json values = ordered_json::array();
    for (std::size_t l = 0; l < b.values.size(); ++l) {
      values.push_back({{"group", results.group_labels[l]}, {"E", b.values[l]}});
    }
    summary["baselines"].push_back({{"rank", rank}, {"runs", b.trials}, {"values", values}});
  }

  // Per (method, rank, group) error and loss statistics.
  std::map<std::tuple<std::string, Index, std::size_t>,
           std::pair<std::vector<double>, std::vector<double>>>
      per_group;
  std::map<std::pair<std::string, Index>, std::map<int, double>> objective;
  std::map<std::pair<std::string, Index>, std::map<int, double>> seconds;
  for (const ResultRow& r : results.rows) {
    const std::string name(method_name(r.method));
    auto& bucket = per_group[{name, r.rank, r.group}];
    bucket.first.push_back(r.rel_error_pct);
    if (r.rel_loss) bucket.second.push_back(*r.rel_loss);
    if (r.objective) objective[{name, r.rank}][r.trial] = *r.objective;
    // Per-group fits report each group's own time; a trial costs their sum.
    if (r.method == Method::kStandardPerGroup) {
      seconds[{name, r.rank}][r.trial] += r.seconds;
    } else {
      seconds[{name, r.rank}][r.trial] = r.seconds;
    }
  }

  summary["aggregates"] = ordered_json::array();
  for (const auto& [key, bucket] : per_group) {
    const auto& [name, rank, group] = key;
    const SampleStats err = summarize(bucket.first);
    ordered_json entry{{"method", name},
                       {"rank", rank},
                       {"group", results.group_labels[group]},
                       {"trials", err.count},
                       {"rel_error_pct_mean", err.mean},
                       {"rel_error_pct_std", err.stddev}};
    if (!bucket.second.empty()) {
      const SampleStats loss = summarize(bucket.second);
      entry["rel_loss_mean"] = loss.mean;
      entry["rel_loss_std"] = loss.stddev;
    }
    summary["aggregates"].push_back(entry);
  }

  summary["objective"] = ordered_json::array();
  for (const auto& [key, by_trial] : objective) {
    std::vector<double> vals;
    for (const auto& [t, v] : by_trial) vals.push_back(v);
    const SampleStats s = summarize(vals);
    summary["objective"].push_back(
        {{"method", key.first}, {"rank", key.second}, {"f_mean", s.mean}, {"f_std", s.stddev}});
  }

  summary["timing"] = ordered_json::array();
  if (cfg.record_timing) {
    for (const auto& [key, by_trial] : seconds) {
      std::vector<double> vals;
      for (const auto& [t, v] : by_trial) vals.push_back(v);
      summary["timing"].push_back({{"method", key.first},
                                   {"rank", key.second},
                                   {"median_seconds", quantile(vals, 0.5)},
                                   {"iqr_seconds", quantile(vals, 0.75) - quantile(vals, 0.25)}});
    }
  }

  summary["failures"] = ordered_json::array();
  for (const CellFailure& f : results.failures) {
    summary["failures"].push_back({{"method", std::string(method_name(f.method))},
                                   {"rank", f.rank},
                                   {"trial", f.trial},
                                   {"message", f.message}});
  }

  const std::filesystem::path json_path = out_dir / "summary.json";
  std::ofstream js(json_path);
  if (!js) throw std::runtime_error("cannot write " + json_path.string());
  js << summary.dump(2) << '\n';
  if (!js) throw std::runtime_error("failed writing " + json_path.string());
}

}  // namespace fairnmf
