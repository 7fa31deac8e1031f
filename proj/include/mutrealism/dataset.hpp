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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mutrealism/matrix.hpp"

namespace mutrealism {

/// One side of a train/test partition. `source_rows` are the row numbers of
/// the originating table (0-based data rows), so the two splits of a dataset
/// are disjoint index sets over the same table.
struct Split {
  Matrix features;
  std::vector<std::size_t> labels;
  std::vector<std::size_t> source_rows;

  std::size_t size() const noexcept { return labels.size(); }
  std::uint64_t content_hash() const;
  bool operator==(const Split&) const = default;
};

/// Per-feature min-max scaling fitted on a training split.
struct Normalizer {
  std::vector<double> min;
  std::vector<double> max;

  static Normalizer fit(const Matrix& features);
  Matrix apply(const Matrix& features) const;
  bool operator==(const Normalizer&) const = default;
};

/// Labeled classification data with a frozen train/test split. The test split
/// is held by a shared pointer to an immutable object; datasets derived by
/// mutating the training side keep pointing at the very same test object.
struct Dataset {
  std::string name;
  std::size_t class_count = 0;
  std::vector<std::string> class_names;
  std::vector<std::string> feature_names;
  std::shared_ptr<const Split> train;
  std::shared_ptr<const Split> test;
  /// Set when features are expressed in the output space of this normalizer.
  std::optional<Normalizer> normalizer;

  std::size_t feature_dim() const noexcept {
    return train ? train->features.cols() : 0;
  }
  std::uint64_t content_hash() const;

  /// Copy of this dataset with a replaced training split; the test split
  /// object is shared.
  Dataset with_train(Split train_split) const;
};

/// Idempotent: a dataset already expressed in `normalizer`'s space is
/// returned unchanged.
Dataset normalize(const Dataset& data, const Normalizer& normalizer);

struct CsvSchema {
  std::string label_column;
  std::vector<std::string> categorical_columns;
};

struct SplitSpec {
  double test_fraction = 0.2;
  std::uint64_t split_seed = 0;
  /// When false, features are left in their raw scale.
  bool normalize = true;
};

/// RFC-4180 records, header included. Quoted fields may contain separators,
/// doubled quotes and line breaks.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// Physical line on which each row starts (1-based, header is line 1).
  std::vector<std::size_t> line_numbers;
};

CsvTable parse_csv(std::string_view text);

/// Loads a CSV file. Categorical feature columns are one-hot encoded with
/// categories in lexicographic order; labels are encoded the same way.
/// Normalization statistics come from the training split only.
Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema,
                 const SplitSpec& split);

/// Same as load_csv on in-memory text.
Dataset dataset_from_csv_text(std::string_view text, std::string name,
                              const CsvSchema& schema, const SplitSpec& split);

struct BlobSpec {
  std::size_t classes = 2;
  std::size_t per_class = 50;
  std::size_t dim = 2;
  /// Distance between class centers in units of the within-class std.
  double separation = 4.0;
  std::uint64_t seed = 0;
  double test_fraction = 0.2;
};

Dataset gen_blobs(const BlobSpec& spec);

struct ImbalancedSpec {
  /// Share of rows in class 0; must lie in the open interval (0.5, 1).
  double majority_fraction = 0.9;
  std::size_t rows = 1000;
  std::size_t classes = 2;
  std::size_t dim = 2;
  double separation = 4.0;
  std::uint64_t seed = 0;
  double test_fraction = 0.2;
};

Dataset gen_imbalanced(const ImbalancedSpec& spec);

/// Per-class row counts of a split (size class_count).
std::vector<std::size_t> class_counts(const Split& split,
                                      std::size_t class_count);

}  // namespace mutrealism
