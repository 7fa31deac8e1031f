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

#include <string>
#include <string_view>
#include <variant>

namespace mutrealism {

enum class Approach { kPreTraining, kPostTraining };

/// Scenario groups used for reporting: pre-training mutants, post-training
/// scenario 1 (default ratio, repeated) and scenario 2 (ratio sweep).
enum class Scenario { kPre, kPostS1, kPostS2 };

std::string_view to_string(Approach a) noexcept;
std::string_view to_string(Scenario s) noexcept;
Scenario parse_scenario(std::string_view s);

/// Operator parameter: numeric (rates, factors, ratios, layer indices) or a
/// name (activations, losses, initializers, optimizers).
using ParamValue = std::variant<double, std::string>;

/// Shortest round-trip text for numbers, the name itself for strings.
std::string format_param(const ParamValue& p);

struct MutantDescriptor {
  Approach approach = Approach::kPreTraining;
  Scenario scenario = Scenario::kPre;
  std::string op;
  std::string param;
  /// Repetition index within post-training scenario 1, 0 otherwise.
  std::size_t repetition = 0;
  std::string bug_id;
  std::string source_fingerprint;

  /// Unique within a bug, e.g. "pre/TCL/0.3" or "post_s1/GF/0.01/r2".
  std::string id() const;
};

}  // namespace mutrealism
