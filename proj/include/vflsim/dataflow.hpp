// Copyright 2026 The vflsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dataset ingestion, synthetic data, vertical partitioning, auxiliary-set
// sampling and the per-party random attribute columns.

#ifndef VFLSIM_DATAFLOW_HPP_
#define VFLSIM_DATAFLOW_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "vflsim/errors.hpp"
#include "vflsim/ndcore/rng.hpp"
#include "vflsim/ndcore/tensor.hpp"

namespace vflsim {

enum class Split { kTrain, kValidation };

// One split of a vertically partitioned dataset. Both parties see the same
// rows in the same order; `row_ids` are the rows' positions in the source.
struct VerticalDataset {
  Tensor2 client_features;
  Tensor2 host_features;
  std::vector<int> labels;
  int class_count = 0;
  std::optional<std::vector<int>> client_rand;
  std::optional<std::vector<int>> host_rand;
  Split split = Split::kTrain;
  std::vector<std::size_t> row_ids;

  std::size_t size() const { return labels.size(); }

  void Validate() const {
    const std::size_t n = labels.size();
    if (client_features.rows() != n || host_features.rows() != n ||
        row_ids.size() != n) {
      throw DimensionError("VerticalDataset: parts disagree on row count");
    }
    for (int y : labels) {
      if (y < 0 || y >= class_count) {
        throw ContractError("VerticalDataset: label " + std::to_string(y) +
                            " outside [0, " + std::to_string(class_count) + ")");
      }
    }
    if (client_rand && client_rand->size() != n) {
      throw DimensionError("VerticalDataset: client_rand length");
    }
    if (host_rand && host_rand->size() != n) {
      throw DimensionError("VerticalDataset: host_rand length");
    }
  }

  VerticalDataset Subset(std::span<const std::size_t> rows) const {
    VerticalDataset out;
    out.client_features = client_features.GatherRows(rows);
    out.host_features = host_features.GatherRows(rows);
    out.class_count = class_count;
    out.split = split;
    auto pick = [&](const std::vector<int>& v) {
      std::vector<int> r;
      r.reserve(rows.size());
      for (std::size_t i : rows) r.push_back(v[i]);
      return r;
    };
    out.labels = pick(labels);
    if (client_rand) out.client_rand = pick(*client_rand);
    if (host_rand) out.host_rand = pick(*host_rand);
    for (std::size_t i : rows) out.row_ids.push_back(row_ids[i]);
    return out;
  }

  std::vector<std::size_t> ClassHistogram() const {
    std::vector<std::size_t> h(class_count, 0);
    for (int y : labels) ++h[y];
    return h;
  }
};

struct DatasetSplits {
  VerticalDataset train;
  VerticalDataset validation;
};

// ---------------------------------------------------------------------------
// Normalization

inline constexpr double kMinStddev = 1e-12;

struct ColumnStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // population, clamped at kMinStddev
};

inline ColumnStats ComputeColumnStats(const Tensor2& x) {
  ColumnStats s;
  s.mean.assign(x.cols(), 0.0);
  s.stddev.assign(x.cols(), 0.0);
  if (x.rows() == 0) {
    std::fill(s.stddev.begin(), s.stddev.end(), 1.0);
    return s;
  }
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double m = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) m += x(r, c);
    m /= static_cast<double>(x.rows());
    double v = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) v += (x(r, c) - m) * (x(r, c) - m);
    v /= static_cast<double>(x.rows());
    s.mean[c] = m;
    s.stddev[c] = std::max(std::sqrt(v), kMinStddev);
  }
  return s;
}

inline Tensor2 NormalizeWith(const Tensor2& x, const ColumnStats& stats) {
  if (stats.mean.size() != x.cols()) {
    throw DimensionError("NormalizeWith: stats for " +
                         std::to_string(stats.mean.size()) + " columns, tensor " +
                         x.ShapeString());
  }
  Tensor2 out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c)
      out(r, c) = (x(r, c) - stats.mean[c]) / stats.stddev[c];
  return out;
}

// ---------------------------------------------------------------------------
// CSV ingestion

enum class ColumnRole { kClient, kHost, kLabel, kIgnore };

inline ColumnRole ParseColumnRole(const std::string& s) {
  if (s == "client") return ColumnRole::kClient;
  if (s == "host") return ColumnRole::kHost;
  if (s == "label") return ColumnRole::kLabel;
  if (s == "ignore") return ColumnRole::kIgnore;
  throw ParseError("schema: unknown column role '" + s + "'");
}

// Column-role assignment for a CSV file. Schema document:
//   {"schema_version": 1,
//    "columns": [{"name": "f0", "role": "client"}, ...],
//    "label_values": ["no", "yes"],          // optional, fixes the order
//    "split_column": "split",                // optional: train/validation
//    "validation_fraction": 0.2}             // used without split_column
// CSV columns not named in the schema are ignored.
struct CsvSchema {
  std::vector<std::pair<std::string, ColumnRole>> columns;
  std::vector<std::string> label_values;
  std::optional<std::string> split_column;
  double validation_fraction = 0.2;

  static CsvSchema FromJson(const nlohmann::json& doc) {
    CsvSchema s;
    try {
      int version = doc.value("schema_version", 1);
      if (version != 1) {
        throw ParseError("schema: unsupported schema_version " +
                         std::to_string(version));
      }
      for (const auto& col : doc.at("columns")) {
        s.columns.emplace_back(col.at("name").get<std::string>(),
                               ParseColumnRole(col.at("role").get<std::string>()));
      }
      if (doc.contains("label_values")) {
        for (const auto& v : doc.at("label_values")) {
          s.label_values.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        }
      }
      if (doc.contains("split_column")) {
        s.split_column = doc.at("split_column").get<std::string>();
      }
      s.validation_fraction = doc.value("validation_fraction", 0.2);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("schema: ") + e.what());
    }
    std::size_t labels = 0;
    std::set<std::string> seen;
    for (const auto& [name, role] : s.columns) {
      if (!seen.insert(name).second) {
        throw ParseError("schema: column '" + name + "' assigned twice");
      }
      labels += role == ColumnRole::kLabel;
    }
    if (labels != 1) throw ParseError("schema: exactly one label column required");
    if (!(s.validation_fraction >= 0.0 && s.validation_fraction < 1.0)) {
      throw ParseError("schema: validation_fraction must lie in [0, 1)");
    }
    return s;
  }

  static CsvSchema Load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open schema file " + path);
    try {
      return FromJson(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("schema " + path + ": " + e.what());
    }
  }

  std::size_t CountRole(ColumnRole role) const {
    std::size_t n = 0;
    for (const auto& c : columns) n += c.second == role;
    return n;
  }
};

// Raw comma-separated table: header plus string cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

namespace detail {

inline std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (ch != '\r') {
      cell += ch;
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

inline std::string Trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

inline std::optional<double> ParseNumber(const std::string& s) {
  std::string t = Trim(s);
  if (t.empty()) return std::nullopt;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (*begin == '+') ++begin;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace detail

inline CsvTable ReadCsvTable(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open CSV file " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("CSV " + path + ": missing header", 0);
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  for (auto& h : detail::SplitCsvLine(line)) table.header.push_back(detail::Trim(h));
  long row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (detail::Trim(line).empty()) continue;
    auto cells = detail::SplitCsvLine(line);
    if (cells.size() != table.header.size()) {
      throw ParseError("CSV " + path + ": expected " +
                           std::to_string(table.header.size()) + " cells, got " +
                           std::to_string(cells.size()),
                       row);
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

struct LoadedCsv {
  DatasetSplits splits;
  ColumnStats client_stats;
  ColumnStats host_stats;
  std::vector<std::string> label_values;  // index -> original label text
  std::size_t rejected_rows = 0;
};

// Loads a CSV, partitions the columns per the schema and z-score normalizes
// every feature with statistics of the train split only. Rows with an empty
// feature or label cell are dropped.
inline LoadedCsv LoadCsv(const std::string& path, const CsvSchema& schema) {
  CsvTable table = ReadCsvTable(path);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < table.header.size(); ++i) index[table.header[i]] = i;
  auto find = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) {
      throw ParseError("CSV " + path + ": missing column '" + name + "'", 0);
    }
    return it->second;
  };
  std::vector<std::size_t> client_cols, host_cols;
  std::size_t label_col = 0;
  for (const auto& [name, role] : schema.columns) {
    std::size_t c = find(name);
    if (role == ColumnRole::kClient) client_cols.push_back(c);
    if (role == ColumnRole::kHost) host_cols.push_back(c);
    if (role == ColumnRole::kLabel) label_col = c;
  }
  std::optional<std::size_t> split_col;
  if (schema.split_column) split_col = find(*schema.split_column);

  // Label text -> class index.
  std::map<std::string, int> label_index;
  std::vector<std::string> label_values = schema.label_values;
  if (label_values.empty()) {
    std::set<std::string> distinct;
    for (const auto& r : table.rows) {
      std::string t = detail::Trim(r[label_col]);
      if (!t.empty()) distinct.insert(t);
    }
    label_values.assign(distinct.begin(), distinct.end());
    bool numeric = std::all_of(label_values.begin(), label_values.end(),
                               [](const std::string& s) {
                                 return detail::ParseNumber(s).has_value();
                               });
    if (numeric) {
      std::sort(label_values.begin(), label_values.end(),
                [](const std::string& a, const std::string& b) {
                  return *detail::ParseNumber(a) < *detail::ParseNumber(b);
                });
    }
  }
  for (std::size_t i = 0; i < label_values.size(); ++i) {
    label_index[label_values[i]] = static_cast<int>(i);
  }

  std::vector<std::vector<double>> client_rows, host_rows;
  std::vector<int> labels;
  std::vector<bool> is_validation;
  std::vector<std::size_t> source_rows;
  std::size_t rejected = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& cells = table.rows[r];
    const long line = static_cast<long>(r) + 1;
    auto read = [&](const std::vector<std::size_t>& cols,
                    std::vector<double>& dst) -> bool {
      dst.clear();
      for (std::size_t c : cols) {
        if (detail::Trim(cells[c]).empty()) return false;
        auto v = detail::ParseNumber(cells[c]);
        if (!v) {
          throw ParseError("CSV " + path + ": non-numeric cell '" + cells[c] + "'",
                           line, static_cast<long>(c));
        }
        dst.push_back(*v);
      }
      return true;
    };
    std::vector<double> crow, hrow;
    std::string label_text = detail::Trim(cells[label_col]);
    if (!read(client_cols, crow) || !read(host_cols, hrow) || label_text.empty()) {
      ++rejected;
      continue;
    }
    auto it = label_index.find(label_text);
    if (it == label_index.end()) {
      throw ParseError("CSV " + path + ": unknown label value '" + label_text + "'",
                       line, static_cast<long>(label_col));
    }
    bool validation = false;
    if (split_col) {
      std::string tag = detail::Trim(cells[*split_col]);
      if (tag == "validation") {
        validation = true;
      } else if (tag != "train") {
        throw ParseError("CSV " + path + ": split tag must be train or validation",
                         line, static_cast<long>(*split_col));
      }
    }
    client_rows.push_back(std::move(crow));
    host_rows.push_back(std::move(hrow));
    labels.push_back(it->second);
    is_validation.push_back(validation);
    source_rows.push_back(r);
  }
  if (!split_col) {
    const std::size_t n = labels.size();
    const std::size_t n_val = static_cast<std::size_t>(
        std::floor(schema.validation_fraction * static_cast<double>(n)));
    for (std::size_t i = 0; i < n; ++i) is_validation[i] = i >= n - n_val;
  }

  auto build = [&](bool validation) {
    VerticalDataset ds;
    ds.class_count = static_cast<int>(label_values.size());
    ds.split = validation ? Split::kValidation : Split::kTrain;
    std::vector<double> cv, hv;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (is_validation[i] != validation) continue;
      cv.insert(cv.end(), client_rows[i].begin(), client_rows[i].end());
      hv.insert(hv.end(), host_rows[i].begin(), host_rows[i].end());
      ds.labels.push_back(labels[i]);
      ds.row_ids.push_back(source_rows[i]);
    }
    ds.client_features = Tensor2(ds.labels.size(), client_cols.size(), std::move(cv));
    ds.host_features = Tensor2(ds.labels.size(), host_cols.size(), std::move(hv));
    return ds;
  };

  LoadedCsv out;
  out.splits.train = build(false);
  out.splits.validation = build(true);
  out.client_stats = ComputeColumnStats(out.splits.train.client_features);
  out.host_stats = ComputeColumnStats(out.splits.train.host_features);
  for (VerticalDataset* ds : {&out.splits.train, &out.splits.validation}) {
    ds->client_features = NormalizeWith(ds->client_features, out.client_stats);
    ds->host_features = NormalizeWith(ds->host_features, out.host_stats);
    ds->Validate();
  }
  out.label_values = label_values;
  out.rejected_rows = rejected;

  std::string histogram;
  for (std::size_t c = 0; c < label_values.size(); ++c) {
    std::size_t count = std::count(labels.begin(), labels.end(), static_cast<int>(c));
    histogram += (c ? ", " : "") + label_values[c] + ":" + std::to_string(count);
  }
  spdlog::info("loaded {}: {} rows ({} train, {} validation, {} rejected); classes {{{}}}",
               path, labels.size(), out.splits.train.size(),
               out.splits.validation.size(), rejected, histogram);
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic data

struct BlobParams {
  int class_count = 2;
  std::size_t dims_client = 10;
  std::size_t dims_host = 10;
  std::size_t n_per_class = 100;
  double cluster_spread = 0.2;
};

// One isotropic Gaussian blob per class around a random unit-norm mean in the
// joint feature space, split vertically into client and host columns. Rows
// are shuffled so classes are interleaved.
inline VerticalDataset SynthBlobs(const BlobParams& p, Rng& rng) {
  if (p.class_count < 1 || p.dims_client < 1 || p.dims_host < 1 || p.n_per_class < 1) {
    throw ContractError("SynthBlobs: all counts must be >= 1");
  }
  const std::size_t dims = p.dims_client + p.dims_host;
  std::vector<std::vector<double>> means(p.class_count, std::vector<double>(dims));
  for (auto& m : means) {
    double norm = 0.0;
    do {
      norm = 0.0;
      for (double& v : m) {
        v = rng.Normal();
        norm += v * v;
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (double& v : m) v /= norm;
  }
  const std::size_t n = p.n_per_class * static_cast<std::size_t>(p.class_count);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.Shuffle(std::span<std::size_t>(order));

  VerticalDataset ds;
  ds.class_count = p.class_count;
  ds.client_features = Tensor2(n, p.dims_client);
  ds.host_features = Tensor2(n, p.dims_host);
  ds.labels.assign(n, 0);
  ds.row_ids.resize(n);
  std::iota(ds.row_ids.begin(), ds.row_ids.end(), 0);
  for (std::size_t k = 0; k < n; ++k) {
    const int y = static_cast<int>(k / p.n_per_class);
    const std::size_t row = order[k];
    ds.labels[row] = y;
    for (std::size_t d = 0; d < dims; ++d) {
      double v = means[y][d] + p.cluster_spread * rng.Normal();
      if (d < p.dims_client) {
        ds.client_features(row, d) = v;
      } else {
        ds.host_features(row, d - p.dims_client) = v;
      }
    }
  }
  return ds;
}

// Random train/validation partition of a single dataset.
inline DatasetSplits SplitTrainValidation(const VerticalDataset& ds,
                                          double validation_fraction, Rng& rng) {
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw ContractError("validation_fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), 0);
  rng.Shuffle(std::span<std::size_t>(order));
  const std::size_t n_val = static_cast<std::size_t>(
      std::floor(validation_fraction * static_cast<double>(ds.size())));
  std::vector<std::size_t> train(order.begin(), order.end() - n_val);
  std::vector<std::size_t> val(order.end() - n_val, order.end());
  std::sort(train.begin(), train.end());
  std::sort(val.begin(), val.end());
  DatasetSplits out{ds.Subset(train), ds.Subset(val)};
  out.train.split = Split::kTrain;
  out.validation.split = Split::kValidation;
  return out;
}

// ---------------------------------------------------------------------------
// Auxiliary set

// Labeled rows the attacker holds: its own columns plus true labels.
struct AuxiliarySet {
  Tensor2 client_features;
  std::optional<std::vector<int>> client_rand;
  std::vector<int> labels;
  int class_count = 0;
  std::vector<std::size_t> source_rows;  // indices into the train split

  std::size_t size() const { return labels.size(); }
};

// Stratified sample: class quotas proportional to class frequency, the
// remainder going to the largest fractional parts (ties to the lower class).
inline AuxiliarySet SampleAuxiliary(const VerticalDataset& train,
                                    std::size_t total, Rng& rng) {
  const std::size_t n = train.size();
  if (total > n) {
    throw ContractError("SampleAuxiliary: total " + std::to_string(total) +
                        " exceeds " + std::to_string(n) + " rows");
  }
  if (total < static_cast<std::size_t>(train.class_count)) {
    throw ContractError("SampleAuxiliary: total smaller than class count");
  }
  const int classes = train.class_count;
  std::vector<std::vector<std::size_t>> by_class(classes);
  for (std::size_t i = 0; i < n; ++i) by_class[train.labels[i]].push_back(i);

  std::vector<std::size_t> quota(classes, 0);
  std::vector<std::pair<double, int>> remainders;
  std::size_t assigned = 0;
  for (int c = 0; c < classes; ++c) {
    const double exact = static_cast<double>(total) *
                         static_cast<double>(by_class[c].size()) /
                         static_cast<double>(n);
    quota[c] = static_cast<std::size_t>(std::floor(exact));
    assigned += quota[c];
    remainders.emplace_back(exact - std::floor(exact), c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) {
    ++quota[remainders[k % remainders.size()].second];
  }

  std::vector<std::size_t> picked;
  for (int c = 0; c < classes; ++c) {
    auto& pool = by_class[c];
    if (quota[c] > pool.size()) {
      throw SamplingError("SampleAuxiliary: class " + std::to_string(c) + " has " +
                          std::to_string(pool.size()) + " rows for a quota of " +
                          std::to_string(quota[c]));
    }
    // Partial Fisher-Yates.
    for (std::size_t k = 0; k < quota[c]; ++k) {
      std::size_t j = k + rng.Below(pool.size() - k);
      std::swap(pool[k], pool[j]);
      picked.push_back(pool[k]);
    }
  }
  std::sort(picked.begin(), picked.end());

  AuxiliarySet aux;
  aux.class_count = classes;
  aux.source_rows = picked;
  aux.client_features = train.client_features.GatherRows(picked);
  for (std::size_t i : picked) aux.labels.push_back(train.labels[i]);
  if (train.client_rand) {
    std::vector<int> r;
    for (std::size_t i : picked) r.push_back((*train.client_rand)[i]);
    aux.client_rand = std::move(r);
  }
  return aux;
}

// ---------------------------------------------------------------------------
// Random attributes

// Gives each party an independent column uniform on {0, ..., attribute_max}.
inline VerticalDataset AddRandomAttributes(VerticalDataset ds, int attribute_max,
                                           Rng& rng) {
  if (attribute_max < 1) throw ContractError("attribute_max must be >= 1");
  std::vector<int> client(ds.size()), host(ds.size());
  for (int& v : client) v = rng.UniformInt(0, attribute_max);
  for (int& v : host) v = rng.UniformInt(0, attribute_max);
  ds.client_rand = std::move(client);
  ds.host_rand = std::move(host);
  return ds;
}

// ---------------------------------------------------------------------------
// Party views: what each side actually holds.

// Client-side columns. When the random attribute is present it is appended
// as a final feature column scaled by 1/attribute_max.
struct ClientView {
  Tensor2 features;
  std::vector<int> rand;
};

// Host-side columns plus the labels, which never leave the host.
struct HostView {
  Tensor2 features;
  std::vector<int> labels;
  std::vector<int> rand;
  int class_count = 0;
};

struct PartyData {
  ClientView client;
  HostView host;
  std::vector<std::size_t> row_ids;  // source positions, for traces only
  std::size_t size() const { return host.labels.size(); }
};

namespace detail {

inline Tensor2 AppendScaledColumn(const Tensor2& x, const std::vector<int>& col,
                                  int scale) {
  Tensor2 extra(x.rows(), 1);
  for (std::size_t i = 0; i < col.size(); ++i)
    extra(i, 0) = static_cast<double>(col[i]) / static_cast<double>(scale);
  return ConcatColumns(x, extra);
}

}  // namespace detail

// Splits a dataset into the two party views. With `with_rand` the random
// attribute columns must be present and become extra input features.
inline PartyData MakePartyData(const VerticalDataset& ds, bool with_rand,
                               int attribute_max = 200) {
  PartyData p;
  p.host.labels = ds.labels;
  p.host.class_count = ds.class_count;
  p.row_ids = ds.row_ids;
  if (with_rand) {
    if (!ds.client_rand || !ds.host_rand) {
      throw ContractError("MakePartyData: random attribute columns missing");
    }
    p.client.rand = *ds.client_rand;
    p.host.rand = *ds.host_rand;
    p.client.features = detail::AppendScaledColumn(ds.client_features,
                                                   *ds.client_rand, attribute_max);
    p.host.features = detail::AppendScaledColumn(ds.host_features, *ds.host_rand,
                                                 attribute_max);
  } else {
    p.client.features = ds.client_features;
    p.host.features = ds.host_features;
  }
  return p;
}

// The attacker's view of its auxiliary rows, matching MakePartyData's layout.
inline Tensor2 AuxiliaryInputs(const AuxiliarySet& aux, bool with_rand,
                               int attribute_max = 200) {
  if (!with_rand) return aux.client_features;
  if (!aux.client_rand) throw ContractError("AuxiliaryInputs: client_rand missing");
  return detail::AppendScaledColumn(aux.client_features, *aux.client_rand,
                                    attribute_max);
}

}  // namespace vflsim

#endif  // VFLSIM_DATAFLOW_HPP_
