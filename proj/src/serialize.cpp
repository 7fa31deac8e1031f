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

#include "mutrealism/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mutrealism/error.hpp"

namespace mutrealism {

namespace {

template <typename T>
T require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::kSchema, std::string("missing key '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

Json number_or_token(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "nan") return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
  }
  throw Error(ErrorCode::kSchema, "expected a number, got " + j.dump());
}

Json architecture_to_json(const Architecture& arch) {
  Json layers = Json::array();
  for (const auto& l : arch.layers) {
    layers.push_back({{"input_dim", l.input_dim},
                      {"output_dim", l.output_dim},
                      {"activation", std::string(to_string(l.activation))}});
  }
  return layers;
}

Architecture architecture_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::kSchema, "architecture must be an array");
  Architecture arch;
  for (const auto& l : j) {
    LayerSpec s;
    s.input_dim = require<std::size_t>(l, "input_dim");
    s.output_dim = require<std::size_t>(l, "output_dim");
    s.activation = parse_activation(require<std::string>(l, "activation"));
    arch.layers.push_back(s);
  }
  arch.validate();
  return arch;
}

Json weights_to_json(const ModelWeights& weights) {
  Json layers = Json::array();
  for (const auto& l : weights.layers) {
    Json w = Json::array();
    for (std::size_t r = 0; r < l.w.rows(); ++r) {
      Json row = Json::array();
      for (double v : l.w.row(r)) row.push_back(number_or_token(v));
      w.push_back(std::move(row));
    }
    Json b = Json::array();
    for (double v : l.b) b.push_back(number_or_token(v));
    Json entry = {{"w", std::move(w)}, {"b", std::move(b)}};
    if (l.identity) entry["identity"] = true;
    layers.push_back(std::move(entry));
  }
  return Json{{"architecture", architecture_to_json(weights.architecture)},
              {"layers", std::move(layers)},
              {"fingerprint", weights.fingerprint()},
              {"valid", weights.valid}};
}

ModelWeights weights_from_json(const Json& j) {
  ModelWeights w;
  if (!j.is_object()) throw Error(ErrorCode::kSchema, "weight file must be an object");
  w.architecture = architecture_from_json(j.at("architecture"));
  const Json& layers = j.at("layers");
  if (!layers.is_array()) throw Error(ErrorCode::kSchema, "'layers' must be an array");
  for (const auto& l : layers) {
    LayerWeights lw;
    const Json& rows = l.at("w");
    std::size_t n_rows = rows.size();
    std::size_t n_cols = n_rows ? rows.at(0).size() : 0;
    lw.w = Matrix(n_rows, n_cols);
    for (std::size_t r = 0; r < n_rows; ++r) {
      if (rows.at(r).size() != n_cols) {
        throw Error(ErrorCode::kSchema, "ragged weight matrix");
      }
      for (std::size_t c = 0; c < n_cols; ++c) lw.w(r, c) = number_from_json(rows[r][c]);
    }
    for (const auto& v : l.at("b")) lw.b.push_back(number_from_json(v));
    lw.identity = l.value("identity", false);
    w.layers.push_back(std::move(lw));
  }
  w.valid = j.value("valid", true);
  try {
    w.validate_shapes();
  } catch (const Error& e) {
    throw Error(ErrorCode::kSchema, e.what());
  }
  if (j.contains("fingerprint") && j.at("fingerprint") != w.fingerprint()) {
    throw Error(ErrorCode::kSchema, "architecture fingerprint mismatch");
  }
  if (!w.all_finite()) w.valid = false;
  return w;
}

void save_weights(const ModelWeights& weights, const std::filesystem::path& path) {
  write_file_atomic(path, weights_to_json(weights).dump() + "\n");
}

ModelWeights load_weights(const std::filesystem::path& path) {
  try {
    return weights_from_json(Json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, path.string() + ": " + e.what());
  }
}

Json train_spec_to_json(const TrainSpec& spec) {
  return Json{{"architecture", architecture_to_json(spec.architecture)},
              {"optimizer", std::string(to_string(spec.optimizer))},
              {"learning_rate", spec.learning_rate},
              {"epochs", spec.epochs},
              {"batch_size", spec.batch_size},
              {"loss", std::string(to_string(spec.loss))},
              {"weight_init", std::string(to_string(spec.weight_init))},
              {"seed", spec.seed}};
}

TrainSpec train_spec_from_json(const Json& j, const TrainSpec& defaults) {
  if (!j.is_object()) throw Error(ErrorCode::kSchema, "train_spec must be an object");
  TrainSpec s = defaults;
  try {
    if (j.contains("architecture")) s.architecture = architecture_from_json(j.at("architecture"));
    if (j.contains("optimizer")) s.optimizer = parse_optimizer(j.at("optimizer").get<std::string>());
    if (j.contains("learning_rate")) s.learning_rate = j.at("learning_rate").get<double>();
    if (j.contains("epochs")) s.epochs = j.at("epochs").get<std::size_t>();
    if (j.contains("batch_size")) s.batch_size = j.at("batch_size").get<std::size_t>();
    if (j.contains("loss")) s.loss = parse_loss(j.at("loss").get<std::string>());
    if (j.contains("weight_init")) s.weight_init = parse_weight_init(j.at("weight_init").get<std::string>());
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("train_spec: ") + e.what());
  }
  return s;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out << text;
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace mutrealism
