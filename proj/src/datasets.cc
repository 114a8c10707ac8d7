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

#include "fairnmf/datasets.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fairnmf {

SyntheticSpec SyntheticSpec::table1(std::uint64_t seed) {
  return SyntheticSpec{{{"large_low_rank", 1000, 20, 3},
                        {"medium_low_rank", 500, 20, 3},
                        {"small_high_rank", 250, 20, 6}},
                       seed};
}

void SyntheticSpec::validate() const {
  if (groups.empty()) throw ConfigError("synthetic spec has no groups");
  for (const SyntheticGroupSpec& g : groups) {
    if (g.rows < 1 || g.cols < 1 || g.rank < 1) {
      throw ConfigError("synthetic group '" + g.label +
                        "' needs rows, cols and rank >= 1");
    }
    if (g.cols != groups.front().cols) {
      throw ConfigError("synthetic groups must share the column count");
    }
  }
}

GroupedMatrix generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Index total = 0;
  for (const SyntheticGroupSpec& g : spec.groups) total += g.rows;
  Matrix data(total, spec.groups.front().cols);
  std::vector<Group> groups;
  Index row = 0;
  for (std::size_t g = 0; g < spec.groups.size(); ++g) {
    const SyntheticGroupSpec& gs = spec.groups[g];
    const Matrix w = random_nonneg(gs.rows, gs.rank, derive_seed(spec.seed, 2 * g));
    const Matrix h = random_nonneg(gs.rank, gs.cols, derive_seed(spec.seed, 2 * g + 1));
    data.middleRows(row, gs.rows) = w * h;
    Group grp{gs.label, {}};
    for (Index i = 0; i < gs.rows; ++i) grp.rows.push_back(row + i);
    groups.push_back(std::move(grp));
    row += gs.rows;
  }
  return GroupedMatrix(std::move(data), std::move(groups));
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace

GroupedMatrix load_grouped_csv(const std::filesystem::path& path,
                               const std::string& group_column,
                               const std::vector<std::string>& drop_columns) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw IngestionError(path.string() + ": missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  std::vector<std::string> header = split_csv_line(line);
  for (std::string& h : header) h = trim(h);

  auto find_column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw ConfigError(path.string() + ": no column named '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t group_idx = find_column(group_column);
  std::vector<char> is_feature(header.size(), 1);
  is_feature[group_idx] = 0;
  for (const std::string& d : drop_columns) is_feature[find_column(d)] = 0;
  std::vector<std::size_t> features;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (is_feature[c]) features.push_back(c);
  }
  if (features.empty()) throw ConfigError(path.string() + ": no feature columns left");

  std::vector<std::string> labels;
  std::vector<double> values;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw IngestionError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                           std::to_string(header.size()) + " fields, found " +
                           std::to_string(fields.size()));
    }
    const std::string label = trim(fields[group_idx]);
    if (label.empty()) {
      throw IngestionError(path.string() + ":" + std::to_string(line_no) +
                           ": missing value in column '" + group_column + "'");
    }
    labels.push_back(label);
    for (std::size_t c : features) {
      const std::string cell = trim(fields[c]);
      const std::string where = path.string() + ":" + std::to_string(line_no) +
                                ": column '" + header[c] + "'";
      if (cell.empty()) throw IngestionError(where + ": missing value");
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw IngestionError(where + ": '" + cell + "' is not a finite number");
      }
      if (v < 0.0) throw IngestionError(where + ": negative value " + cell);
      values.push_back(v);
    }
  }
  if (labels.empty()) throw IngestionError(path.string() + ": no data rows");

  const Index rows = static_cast<Index>(labels.size());
  const Index cols = static_cast<Index>(features.size());
  Matrix data = Eigen::Map<const Matrix>(values.data(), rows, cols);
  return row_partition(data, labels);
}

void write_grouped_csv(const GroupedMatrix& x, const std::filesystem::path& path,
                       const std::string& group_column,
                       const std::vector<std::string>& feature_names) {
  if (!feature_names.empty() && static_cast<Index>(feature_names.size()) != x.cols()) {
    throw DimensionError("write_grouped_csv: " + std::to_string(feature_names.size()) +
                         " names for " + std::to_string(x.cols()) + " columns");
  }
  std::vector<std::string> row_label(static_cast<std::size_t>(x.rows()));
  for (const Group& g : x.groups()) {
    for (Index r : g.rows) row_label[static_cast<std::size_t>(r)] = g.label;
  }
  std::ofstream out(path);
  if (!out) throw IngestionError("cannot write " + path.string());
  out << quote_if_needed(group_column);
  for (Index c = 0; c < x.cols(); ++c) {
    out << ','
        << quote_if_needed(feature_names.empty() ? "f" + std::to_string(c)
                                                 : feature_names[c]);
  }
  out << '\n';
  char buf[32];
  for (Index r = 0; r < x.rows(); ++r) {
    out << quote_if_needed(row_label[static_cast<std::size_t>(r)]);
    for (Index c = 0; c < x.cols(); ++c) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), x.matrix()(r, c),
                                     std::chars_format::general, 17);
      out << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << '\n';
  }
  if (!out) throw IngestionError("failed writing " + path.string());
}

GroupedMatrix normalize_features(const GroupedMatrix& x) {
  Matrix data = x.matrix();
  for (Index c = 0; c < data.cols(); ++c) {
    const double n = data.col(c).norm();
    if (!(n > 0.0)) {
      throw DegenerateGroupError("normalize_features: column " + std::to_string(c) +
                                 " is all zero");
    }
    data.col(c) /= n;
  }
  return GroupedMatrix(std::move(data), x.groups());
}

}  // namespace fairnmf
