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

#include "mutrealism/mutant.hpp"

#include <charconv>

#include "mutrealism/error.hpp"

namespace mutrealism {

std::string_view to_string(Approach a) noexcept {
  return a == Approach::kPreTraining ? "pre_training" : "post_training";
}

std::string_view to_string(Scenario s) noexcept {
  switch (s) {
    case Scenario::kPre: return "pre";
    case Scenario::kPostS1: return "post_s1";
    case Scenario::kPostS2: return "post_s2";
  }
  return "?";
}

Scenario parse_scenario(std::string_view s) {
  for (auto sc : {Scenario::kPre, Scenario::kPostS1, Scenario::kPostS2}) {
    if (to_string(sc) == s) return sc;
  }
  throw Error(ErrorCode::kSchema, "unknown scenario '" + std::string(s) + "'");
}

std::string format_param(const ParamValue& p) {
  if (const auto* s = std::get_if<std::string>(&p)) return *s;
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, std::get<double>(p));
  return std::string(buf, end);
}

std::string MutantDescriptor::id() const {
  std::string out = std::string(to_string(scenario)) + "/" + op + "/" + param;
  if (scenario == Scenario::kPostS1) out += "/r" + std::to_string(repetition);
  return out;
}

}  // namespace mutrealism
