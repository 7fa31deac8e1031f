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
#include <string>
#include <string_view>
#include <vector>

namespace mutrealism {

enum class OracleKind { kAccuracy, kLoss };

/// Rule deciding whether an instance mishandles a test input relative to its
/// paired original instance.
///   accuracy:  KI = 1 iff original is correct and target is wrong
///   loss(eps): KI = 1 iff target loss > original loss + eps
struct Oracle {
  OracleKind kind = OracleKind::kAccuracy;
  double epsilon = 1e-6;

  /// "accuracy" or "loss(<eps>)".
  std::string describe() const;
  bool operator==(const Oracle&) const = default;
};

std::string_view to_string(OracleKind k) noexcept;
OracleKind parse_oracle_kind(std::string_view s);

/// Binary killing-input matrix: one row per test input, one column per valid
/// instance pair. Columns whose pair contained an invalid instance are listed
/// in `excluded` and carry no cells.
struct ExecutionMatrix {
  std::size_t tests = 0;
  std::size_t n_declared = 0;
  std::vector<std::size_t> columns;   // instance indices that were kept
  std::vector<std::size_t> excluded;  // instance indices that were dropped
  Oracle oracle;
  std::vector<std::uint8_t> cells;    // tests x columns.size(), row-major

  std::size_t n_effective() const noexcept { return columns.size(); }
  std::uint8_t at(std::size_t test, std::size_t column) const noexcept {
    return cells[test * columns.size() + column];
  }
};

}  // namespace mutrealism
