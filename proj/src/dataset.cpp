// Copyright 2026 The Mutrealism Authors
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

#include "mutrealism/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "mutrealism/error.hpp"
#include "mutrealism/hash.hpp"
#include "mutrealism/rng.hpp"

namespace mutrealism {

std::uint64_t Split::content_hash() const {
  Fnv1a h;
  h.u64(features.rows()).u64(features.cols());
  h.values(features.flat());
  h.values(std::span<const std::size_t>(labels));
  h.values(std::span<const std::size_t>(source_rows));
  return h.digest();
}

std::uint64_t Dataset::content_hash() const {
  Fnv1a h;
  h.text(name).u64(class_count);
  h.u64(train ? train->content_hash() : 0);
  h.u64(test ? test->content_hash() : 0);
  return h.digest();
}

Dataset Dataset::with_train(Split train_split) const {
  Dataset out = *this;
  out.train = std::make_shared<const Split>(std::move(train_split));
  return out;
}

Normalizer Normalizer::fit(const Matrix& features) {
  Normalizer n;
  n.min.assign(features.cols(), 0.0);
  n.max.assign(features.cols(), 0.0);
  for (std::size_t c = 0; c < features.cols(); ++c) {
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t r = 0; r < features.rows(); ++r) {
      lo = std::min(lo, features(r, c));
      hi = std::max(hi, features(r, c));
    }
    if (features.rows() == 0) lo = hi = 0.0;
    n.min[c] = lo;
    n.max[c] = hi;
  }
  return n;
}

Matrix Normalizer::apply(const Matrix& features) const {
  if (features.cols() != min.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "normalizer fitted on " + std::to_string(min.size()) +
                    " features, got " + std::to_string(features.cols()));
  }
  Matrix out(features.rows(), features.cols());
  for (std::size_t r = 0; r < features.rows(); ++r) {
    for (std::size_t c = 0; c < features.cols(); ++c) {
      double range = max[c] - min[c];
      out(r, c) = range > 0.0 ? (features(r, c) - min[c]) / range : 0.0;
    }
  }
  return out;
}

Dataset normalize(const Dataset& data, const Normalizer& normalizer) {
  if (data.normalizer && *data.normalizer == normalizer) return data;
  Dataset out = data;
  Split train = *data.train;
  Split test = *data.test;
  train.features = normalizer.apply(train.features);
  test.features = normalizer.apply(test.features);
  out.train = std::make_shared<const Split>(std::move(train));
  out.test = std::make_shared<const Split>(std::move(test));
  out.normalizer = normalizer;
  return out;
}

std::vector<std::size_t> class_counts(const Split& split,
                                      std::size_t class_count) {
  std::vector<std::size_t> counts(class_count, 0);
  for (std::size_t label : split.labels) {
    if (label < class_count) ++counts[label];
  }
  return counts;
}

namespace {

Split take_rows(const Matrix& features, const std::vector<std::size_t>& labels,
                const std::vector<std::size_t>& rows) {
  Split s;
  s.features = Matrix(rows.size(), features.cols());
  s.labels.reserve(rows.size());
  s.source_rows = rows;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto src = features.row(rows[i]);
    std::copy(src.begin(), src.end(), s.features.row(i).begin());
    s.labels.push_back(labels[rows[i]]);
  }
  return s;
}

// Assembles a normalized dataset from a full table and a test index set.
Dataset assemble(std::string name, const Matrix& features,
                 const std::vector<std::size_t>& labels,
                 std::size_t class_count, std::vector<std::string> class_names,
                 std::vector<std::string> feature_names,
                 std::vector<std::size_t> test_rows, bool normalize_features = true) {
  std::sort(test_rows.begin(), test_rows.end());
  std::vector<std::size_t> train_rows;
  train_rows.reserve(features.rows() - test_rows.size());
  for (std::size_t r = 0, t = 0; r < features.rows(); ++r) {
    if (t < test_rows.size() && test_rows[t] == r) {
      ++t;
    } else {
      train_rows.push_back(r);
    }
  }
  if (train_rows.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "split leaves no training rows in dataset '" + name + "'");
  }
  Dataset d;
  d.name = std::move(name);
  d.class_count = class_count;
  d.class_names = std::move(class_names);
  d.feature_names = std::move(feature_names);
  d.train = std::make_shared<const Split>(take_rows(features, labels, train_rows));
  d.test = std::make_shared<const Split>(take_rows(features, labels, test_rows));
  if (!normalize_features) return d;
  return normalize(d, Normalizer::fit(d.train->features));
}

void check_test_fraction(double f) {
  if (!(f >= 0.0 && f < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "test_fraction must lie in [0, 1)");
  }
}

std::vector<std::size_t> random_test_rows(std::size_t n, double fraction,
                                          std::uint64_t split_seed) {
  auto count = static_cast<std::size_t>(std::llround(fraction * double(n)));
  RandomStream rng(derive_seed(split_seed, "split"));
  return rng.sample_without_replacement(n, count);
}

// Per-class random split so that class shares are preserved exactly where the
// arithmetic allows it.
std::vector<std::size_t> stratified_test_rows(
    const std::vector<std::size_t>& labels, std::size_t class_count,
    double fraction, std::uint64_t split_seed) {
  std::vector<std::size_t> test;
  for (std::size_t c = 0; c < class_count; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t r = 0; r < labels.size(); ++r) {
      if (labels[r] == c) members.push_back(r);
    }
    auto count = static_cast<std::size_t>(
        std::llround(fraction * double(members.size())));
    RandomStream rng(derive_seed(split_seed, "stratified-split", c));
    for (std::size_t pick : rng.sample_without_replacement(members.size(), count)) {
      test.push_back(members[pick]);
    }
  }
  return test;
}

std::vector<double> class_center(std::size_t c, std::size_t classes,
                                 std::size_t dim, double separation) {
  std::vector<double> center(dim, 0.0);
  if (classes <= dim) {
    // Scaled unit vectors: every pair of centers is `separation` apart.
    center[c] = separation / std::sqrt(2.0);
  } else {
    center[0] = double(c) * separation;
  }
  return center;
}

Dataset gaussian_dataset(std::string name,
                         const std::vector<std::size_t>& per_class_rows,
                         std::size_t dim, double separation,
                         std::uint64_t seed, double test_fraction) {
  std::size_t classes = per_class_rows.size();
  std::size_t total = std::accumulate(per_class_rows.begin(),
                                      per_class_rows.end(), std::size_t{0});
  Matrix features(total, dim);
  std::vector<std::size_t> labels;
  labels.reserve(total);
  RandomStream rng(derive_seed(seed, "gaussian-rows"));
  std::size_t r = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    auto center = class_center(c, classes, dim, separation);
    for (std::size_t i = 0; i < per_class_rows[c]; ++i, ++r) {
      for (std::size_t k = 0; k < dim; ++k) {
        features(r, k) = center[k] + rng.normal();
      }
      labels.push_back(c);
    }
  }
  std::vector<std::string> class_names, feature_names;
  for (std::size_t c = 0; c < classes; ++c) class_names.push_back(std::to_string(c));
  for (std::size_t k = 0; k < dim; ++k) feature_names.push_back("x" + std::to_string(k));
  auto test = stratified_test_rows(labels, classes, test_fraction, seed);
  return assemble(std::move(name), features, labels, classes,
                  std::move(class_names), std::move(feature_names),
                  std::move(test));
}

std::optional<double> parse_number(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> starts;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  std::size_t record_line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // A record consisting of one empty field is a blank line.
    if (!(record.size() == 1 && record[0].empty())) {
      records.push_back(std::move(record));
      starts.push_back(record_line);
    }
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (field_started) {
          throw Error(ErrorCode::kSchema,
                      "stray quote inside unquoted field on line " +
                          std::to_string(line));
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        [[fallthrough]];
      case '\n':
        end_record();
        ++line;
        record_line = line;
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (in_quotes) {
    throw Error(ErrorCode::kSchema, "unterminated quoted field starting on line " +
                                        std::to_string(record_line));
  }
  if (field_started || !field.empty() || !record.empty()) end_record();

  if (records.empty()) throw Error(ErrorCode::kSchema, "CSV has no header row");
  table.header = std::move(records.front());
  table.rows.assign(std::make_move_iterator(records.begin() + 1),
                    std::make_move_iterator(records.end()));
  table.line_numbers.assign(starts.begin() + 1, starts.end());
  return table;
}

Dataset dataset_from_csv_text(std::string_view text, std::string name,
                              const CsvSchema& schema, const SplitSpec& split) {
  check_test_fraction(split.test_fraction);
  CsvTable table = parse_csv(text);
  const auto& header = table.header;

  std::vector<std::size_t> malformed;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != header.size()) {
      malformed.push_back(table.line_numbers[r]);
    }
  }
  if (!malformed.empty()) {
    std::ostringstream msg;
    msg << "malformed rows (field count differs from header) on lines";
    for (std::size_t i = 0; i < malformed.size(); ++i) {
      msg << (i ? ", " : " ") << malformed[i];
    }
    throw Error(ErrorCode::kSchema, msg.str());
  }

  auto column_of = [&](const std::string& col) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), col);
    if (it == header.end()) {
      throw Error(ErrorCode::kSchema, "column '" + col + "' not found in header");
    }
    if (std::find(it + 1, header.end(), col) != header.end()) {
      throw Error(ErrorCode::kSchema, "column '" + col + "' appears more than once");
    }
    return static_cast<std::size_t>(it - header.begin());
  };

  const std::size_t label_col = column_of(schema.label_column);
  std::set<std::size_t> categorical;
  for (const auto& c : schema.categorical_columns) {
    std::size_t idx = column_of(c);
    if (idx == label_col) {
      throw Error(ErrorCode::kSchema, "label column cannot be a categorical feature");
    }
    categorical.insert(idx);
  }

  // Category dictionaries, lexicographically ordered.
  std::map<std::size_t, std::vector<std::string>> categories;
  for (std::size_t col : categorical) {
    std::set<std::string> values;
    for (const auto& row : table.rows) values.insert(row[col]);
    categories[col] = {values.begin(), values.end()};
  }
  std::set<std::string> label_values;
  for (const auto& row : table.rows) label_values.insert(row[label_col]);
  std::vector<std::string> class_names(label_values.begin(), label_values.end());

  std::vector<std::string> feature_names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == label_col) continue;
    if (categorical.count(c)) {
      for (const auto& v : categories[c]) feature_names.push_back(header[c] + "=" + v);
    } else {
      feature_names.push_back(header[c]);
    }
  }
  if (feature_names.empty()) {
    throw Error(ErrorCode::kSchema, "CSV has no feature columns");
  }

  Matrix features(table.rows.size(), feature_names.size());
  std::vector<std::size_t> labels;
  labels.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    std::size_t k = 0;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == label_col) continue;
      if (categorical.count(c)) {
        const auto& cats = categories[c];
        for (const auto& v : cats) features(r, k++) = (row[c] == v) ? 1.0 : 0.0;
      } else {
        auto v = parse_number(row[c]);
        if (!v) {
          throw Error(ErrorCode::kSchema,
                      "non-numeric value '" + row[c] + "' in feature column '" +
                          header[c] + "' on line " +
                          std::to_string(table.line_numbers[r]));
        }
        features(r, k++) = *v;
      }
    }
    auto pos = std::lower_bound(class_names.begin(), class_names.end(), row[label_col]);
    labels.push_back(static_cast<std::size_t>(pos - class_names.begin()));
  }

  auto test = random_test_rows(table.rows.size(), split.test_fraction, split.split_seed);
  std::size_t classes = class_names.size();
  return assemble(std::move(name), features, labels, classes,
                  std::move(class_names), std::move(feature_names), std::move(test),
                  split.normalize);
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema,
                 const SplitSpec& split) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open CSV file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return dataset_from_csv_text(buf.str(), path.stem().string(), schema, split);
}

Dataset gen_blobs(const BlobSpec& spec) {
  if (spec.classes < 2) throw Error(ErrorCode::kInvalidArgument, "gen_blobs needs classes >= 2");
  if (spec.per_class < 2) throw Error(ErrorCode::kInvalidArgument, "gen_blobs needs per_class >= 2");
  if (spec.dim < 1) throw Error(ErrorCode::kInvalidArgument, "gen_blobs needs dim >= 1");
  if (!(spec.separation >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "separation must be >= 0");
  check_test_fraction(spec.test_fraction);
  std::vector<std::size_t> counts(spec.classes, spec.per_class);
  return gaussian_dataset("blobs", counts, spec.dim, spec.separation, spec.seed,
                          spec.test_fraction);
}

Dataset gen_imbalanced(const ImbalancedSpec& spec) {
  if (!(spec.majority_fraction > 0.5 && spec.majority_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "majority_fraction must lie in the open interval (0.5, 1)");
  }
  if (spec.classes < 2) throw Error(ErrorCode::kInvalidArgument, "gen_imbalanced needs classes >= 2");
  if (!(spec.separation >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "separation must be >= 0");
  check_test_fraction(spec.test_fraction);
  auto majority = static_cast<std::size_t>(
      std::llround(spec.majority_fraction * double(spec.rows)));
  std::size_t rest = spec.rows - std::min(majority, spec.rows);
  std::size_t minorities = spec.classes - 1;
  if (majority < 2 || rest < minorities) {
    throw Error(ErrorCode::kInvalidArgument,
                "too few rows for the requested class proportions");
  }
  std::vector<std::size_t> counts(spec.classes, rest / minorities);
  counts[0] = majority;
  for (std::size_t c = 1; c <= rest % minorities; ++c) ++counts[c];
  return gaussian_dataset("imbalanced", counts, spec.dim, spec.separation,
                          spec.seed, spec.test_fraction);
}

}  // namespace mutrealism
