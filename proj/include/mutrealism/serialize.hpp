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

#include <filesystem>
#include <string>

#include "json.hpp"
#include "mutrealism/nn.hpp"

namespace mutrealism {

using Json = nlohmann::ordered_json;

// Model weight file:
//   {"architecture": [{"input_dim", "output_dim", "activation"}, ...],
//    "layers": [{"w": [[...], ...], "b": [...]}, ...],
//    "fingerprint": "<hex>", "valid": true}
// Weight matrices are row-major (output_dim rows). Doubles are written in
// shortest round-trip form; non-finite entries as "nan", "inf", "-inf".
// A deactivated layer carries "identity": true.
Json architecture_to_json(const Architecture& arch);
Architecture architecture_from_json(const Json& j);

Json weights_to_json(const ModelWeights& weights);
/// Throws Error(kSchema) on malformed input or a fingerprint mismatch.
ModelWeights weights_from_json(const Json& j);

void save_weights(const ModelWeights& weights, const std::filesystem::path& path);
ModelWeights load_weights(const std::filesystem::path& path);

Json train_spec_to_json(const TrainSpec& spec);
/// Missing keys fall back to `defaults`.
TrainSpec train_spec_from_json(const Json& j, const TrainSpec& defaults = {});

Json number_or_token(double v);
double number_from_json(const Json& j);

/// Writes `text` to `path` through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

}  // namespace mutrealism
