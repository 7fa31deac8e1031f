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

#include "mutrealism/post_mutation.hpp"

#include <array>
#include <cmath>

#include "mutrealism/error.hpp"
#include "mutrealism/rng.hpp"

namespace mutrealism {

namespace {

constexpr std::array<std::pair<PostOperator, std::string_view>, 7> kNames{{
    {PostOperator::kGF, "GF"}, {PostOperator::kWS, "WS"}, {PostOperator::kNEB, "NEB"},
    {PostOperator::kNAI, "NAI"}, {PostOperator::kNS, "NS"}, {PostOperator::kLD, "LD"},
    {PostOperator::kBF, "BF"},
}};

struct NeuronRef {
  std::size_t layer;
  std::size_t unit;
};

std::vector<NeuronRef> hidden_neurons(const Architecture& arch) {
  std::vector<NeuronRef> out;
  for (std::size_t l = 0; l + 1 < arch.layers.size(); ++l) {
    for (std::size_t j = 0; j < arch.layers[l].output_dim; ++j) out.push_back({l, j});
  }
  return out;
}

std::vector<std::size_t> square_hidden_layers(const Architecture& arch) {
  std::vector<std::size_t> out;
  for (std::size_t l = 0; l + 1 < arch.layers.size(); ++l) {
    if (arch.layers[l].input_dim == arch.layers[l].output_dim) out.push_back(l);
  }
  return out;
}

double population_sd(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double mean = 0.0;
  for (double v : xs) mean += v;
  mean /= double(xs.size());
  double ss = 0.0;
  for (double v : xs) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / double(xs.size()));
}

void swap_incoming(LayerWeights& lw, std::size_t a, std::size_t b) {
  auto ra = lw.w.row(a);
  auto rb = lw.w.row(b);
  std::swap_ranges(ra.begin(), ra.end(), rb.begin());
  std::swap(lw.b[a], lw.b[b]);
}

}  // namespace

std::string_view to_string(PostOperator op) noexcept {
  for (const auto& [o, n] : kNames) {
    if (o == op) return n;
  }
  return "?";
}

PostOperator parse_post_operator(std::string_view s) {
  for (const auto& [o, n] : kNames) {
    if (n == s) return o;
  }
  throw Error(ErrorCode::kSchema, "unknown post-training operator '" + std::string(s) + "'");
}

std::vector<PostOperator> all_post_operators() {
  std::vector<PostOperator> out;
  for (const auto& [o, n] : kNames) out.push_back(o);
  return out;
}

std::size_t selection_count(double ratio, std::size_t eligible) {
  if (ratio <= 0.0 || eligible == 0) return 0;
  auto k = static_cast<std::size_t>(std::floor(ratio * double(eligible) + 0.5));
  return std::min(std::max<std::size_t>(k, 1), eligible);
}

std::size_t eligible_count(PostOperator op, const Architecture& arch) {
  switch (op) {
    case PostOperator::kGF: {
      std::size_t n = 0;
      for (const auto& l : arch.layers) n += l.input_dim * l.output_dim;
      return n;
    }
    case PostOperator::kBF: {
      std::size_t n = 0;
      for (const auto& l : arch.layers) n += l.output_dim;
      return n;
    }
    case PostOperator::kLD:
      return square_hidden_layers(arch).size();
    default:
      return hidden_neurons(arch).size();
  }
}

PostMutationResult apply_post_operator(const PostMutationOperator& op,
                                       const ModelWeights& weights) {
  if (!(op.ratio >= 0.0 && op.ratio <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "mutation ratio must lie in [0, 1]");
  }
  PostMutationResult out;
  out.descriptor.approach = Approach::kPostTraining;
  out.descriptor.op = std::string(to_string(op.op));
  out.descriptor.param = format_param(op.ratio);
  out.descriptor.source_fingerprint = weights.fingerprint();

  const Architecture& arch = weights.architecture;
  const std::size_t eligible = eligible_count(op.op, arch);
  if (eligible == 0) {
    out.skip_reason = op.op == PostOperator::kLD
                          ? "no hidden layer with input_dim == output_dim"
                          : "network has no eligible elements";
    return out;
  }

  ModelWeights mutated = weights;
  RandomStream rng(op.seed);

  if (op.op == PostOperator::kLD) {
    auto layers = square_hidden_layers(arch);
    std::size_t pick = static_cast<std::size_t>(rng.below(layers.size()));
    LayerWeights& lw = mutated.layers[layers[pick]];
    lw.identity = true;
    for (std::size_t r = 0; r < lw.w.rows(); ++r) {
      for (std::size_t c = 0; c < lw.w.cols(); ++c) lw.w(r, c) = r == c ? 1.0 : 0.0;
    }
    std::fill(lw.b.begin(), lw.b.end(), 0.0);
    out.selected = {pick};
    out.weights = std::move(mutated);
    return out;
  }

  const std::size_t k = selection_count(op.ratio, eligible);
  out.selected = rng.sample_without_replacement(eligible, k);

  switch (op.op) {
    case PostOperator::kGF:
    case PostOperator::kBF: {
      const bool biases = op.op == PostOperator::kBF;
      std::vector<double> sd;
      for (const auto& lw : weights.layers) {
        sd.push_back(biases ? population_sd(lw.b) : population_sd(lw.w.flat()));
      }
      std::size_t next = 0;
      std::size_t offset = 0;
      for (std::size_t l = 0; l < mutated.layers.size(); ++l) {
        std::span<double> values = biases ? std::span<double>(mutated.layers[l].b)
                                          : mutated.layers[l].w.flat();
        while (next < out.selected.size() && out.selected[next] < offset + values.size()) {
          values[out.selected[next] - offset] += rng.normal(0.0, sd[l]);
          ++next;
        }
        offset += values.size();
      }
      break;
    }
    case PostOperator::kWS:
    case PostOperator::kNEB:
    case PostOperator::kNAI: {
      auto neurons = hidden_neurons(arch);
      for (std::size_t s : out.selected) {
        const NeuronRef n = neurons[s];
        LayerWeights& lw = mutated.layers[n.layer];
        if (op.op == PostOperator::kWS) {
          rng.shuffle(lw.w.row(n.unit));
        } else if (op.op == PostOperator::kNEB) {
          Matrix& next = mutated.layers[n.layer + 1].w;
          for (std::size_t r = 0; r < next.rows(); ++r) next(r, n.unit) = 0.0;
        } else {
          for (double& v : lw.w.row(n.unit)) v = -v;
          lw.b[n.unit] = -lw.b[n.unit];
        }
      }
      break;
    }
    case PostOperator::kNS: {
      auto neurons = hidden_neurons(arch);
      std::size_t i = 0;
      while (i < out.selected.size()) {
        const std::size_t layer = neurons[out.selected[i]].layer;
        std::vector<std::size_t> units;
        for (; i < out.selected.size() && neurons[out.selected[i]].layer == layer; ++i) {
          units.push_back(neurons[out.selected[i]].unit);
        }
        LayerWeights& lw = mutated.layers[layer];
        std::size_t p = 0;
        for (; p + 1 < units.size(); p += 2) swap_incoming(lw, units[p], units[p + 1]);
        if (p < units.size()) {
          const std::size_t width = arch.layers[layer].output_dim;
          std::vector<std::size_t> others;
          for (std::size_t u = 0; u < width; ++u) {
            if (std::find(units.begin(), units.end(), u) == units.end()) others.push_back(u);
          }
          if (!others.empty()) {
            swap_incoming(lw, units[p], others[rng.below(others.size())]);
          }
        }
      }
      break;
    }
    case PostOperator::kLD:
      break;
  }

  if (!mutated.all_finite()) mutated.valid = false;
  out.weights = std::move(mutated);
  return out;
}

std::vector<PostMutantPlan> plan_mutants(const ScenarioPlan& plan,
                                         const std::vector<PostOperator>& operators,
                                         std::size_t n, std::uint64_t master_seed,
                                         const std::string& bug_id,
                                         const std::string& source_fingerprint) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "plan_mutants needs n >= 1");
  if (plan.scenario == Scenario::kPre) {
    throw Error(ErrorCode::kInvalidArgument, "post-training plans use scenario 1 or 2");
  }
  std::vector<PostMutantPlan> out;
  auto add = [&](PostOperator op, double ratio, std::size_t repetition) {
    PostMutantPlan p;
    p.op = op;
    p.ratio = ratio;
    p.descriptor.approach = Approach::kPostTraining;
    p.descriptor.scenario = plan.scenario;
    p.descriptor.op = std::string(to_string(op));
    p.descriptor.param = format_param(ratio);
    p.descriptor.repetition = repetition;
    p.descriptor.bug_id = bug_id;
    p.descriptor.source_fingerprint = source_fingerprint;
    const std::string tag = "post/" + p.descriptor.id();
    for (std::size_t i = 0; i < n; ++i) {
      p.instance_seeds.push_back(derive_seed(master_seed, tag, i));
    }
    out.push_back(std::move(p));
  };
  for (PostOperator op : operators) {
    if (plan.scenario == Scenario::kPostS1) {
      for (std::size_t r = 0; r < plan.repetitions; ++r) add(op, plan.default_ratio, r);
    } else {
      for (double ratio : plan.ratios) add(op, ratio, 0);
    }
  }
  return out;
}

}  // namespace mutrealism
