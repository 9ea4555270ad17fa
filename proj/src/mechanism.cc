// Copyright 2026 The nodedp Authors.
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

#include "nodedp/mechanism.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "nlohmann/json.hpp"
#include "nodedp/info_quantities.h"

namespace nodedp {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

absl::Status EmptySigmaError() {
  return absl::FailedPreconditionError(
      "EmptySigma: the balanced labeling set is empty");
}

// Class-size compositions (c_1, ..., c_K) inside the balance window.
void Compositions(const BalanceSpec& spec, std::vector<int>& prefix,
                  int remaining, std::vector<std::vector<int>>& out) {
  const int k = spec.num_communities();
  if (static_cast<int>(prefix.size()) == k - 1) {
    if (spec.AdmitsCount(remaining)) {
      prefix.push_back(remaining);
      out.push_back(prefix);
      prefix.pop_back();
    }
    return;
  }
  for (int c = 0; c <= remaining; ++c) {
    if (!spec.AdmitsCount(c)) continue;
    prefix.push_back(c);
    Compositions(spec, prefix, remaining - c, out);
    prefix.pop_back();
  }
}

// Uniform draw from Sigma_beta without enumerating it: pick a composition
// with probability proportional to its multinomial count, then shuffle.
absl::StatusOr<Labeling> SampleUniformBalanced(const BalanceSpec& spec,
                                               Rng& rng) {
  std::vector<std::vector<int>> compositions;
  std::vector<int> prefix;
  Compositions(spec, prefix, spec.num_vertices(), compositions);
  if (compositions.empty()) return EmptySigmaError();
  std::vector<double> log_counts;
  log_counts.reserve(compositions.size());
  const double log_n_fact = std::lgamma(spec.num_vertices() + 1.0);
  for (const auto& comp : compositions) {
    double value = log_n_fact;
    for (int c : comp) value -= std::lgamma(c + 1.0);
    log_counts.push_back(value);
  }
  const double log_total = LogSumExp(log_counts);
  const double u = rng.Uniform();
  size_t chosen = compositions.size() - 1;
  double cumulative = 0.0;
  for (size_t i = 0; i < compositions.size(); ++i) {
    cumulative += std::exp(log_counts[i] - log_total);
    if (u < cumulative) {
      chosen = i;
      break;
    }
  }
  std::vector<int> labels;
  labels.reserve(spec.num_vertices());
  for (int label = 0; label < spec.num_communities(); ++label) {
    labels.insert(labels.end(), compositions[chosen][label], label);
  }
  for (size_t i = labels.size(); i > 1; --i) {
    std::swap(labels[i - 1], labels[rng.UniformInt(i)]);
  }
  return Labeling(std::move(labels), spec.num_communities());
}

}  // namespace

std::string_view SamplerName(Sampler sampler) {
  switch (sampler) {
    case Sampler::kExact:
      return "exact";
    case Sampler::kGumbel:
      return "gumbel";
    case Sampler::kMetropolis:
      return "metropolis";
  }
  return "unknown";
}

absl::StatusOr<Sampler> ParseSampler(std::string_view name) {
  if (name == "exact") return Sampler::kExact;
  if (name == "gumbel") return Sampler::kGumbel;
  if (name == "metropolis") return Sampler::kMetropolis;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown sampler '", std::string(name),
                   "' (expected exact, gumbel or metropolis)"));
}

std::string_view FallbackName(FallbackPolicy policy) {
  return policy == FallbackPolicy::kReject ? "reject" : "uniform_balanced";
}

absl::StatusOr<FallbackPolicy> ParseFallback(std::string_view name) {
  if (name == "uniform_balanced") return FallbackPolicy::kUniformBalanced;
  if (name == "reject") return FallbackPolicy::kReject;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown fallback '", std::string(name),
                   "' (expected uniform_balanced or reject)"));
}

absl::Status ValidateConfig(const MechanismConfig& cfg) {
  if (!(cfg.epsilon >= 0.0) || !std::isfinite(cfg.epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be finite and >= 0, got ", cfg.epsilon));
  }
  if (cfg.chain_steps < 1) {
    return absl::InvalidArgumentError("chain_steps must be >= 1");
  }
  if (!(cfg.calibration_scale > 0.0)) {
    return absl::InvalidArgumentError("calibration_scale must be > 0");
  }
  return absl::OkStatus();
}

double EmDistribution::Probability(size_t i) const {
  return std::exp(LogProbability(i));
}

std::vector<double> EmDistribution::Probabilities() const {
  std::vector<double> out(size());
  for (size_t i = 0; i < size(); ++i) out[i] = Probability(i);
  return out;
}

double LogSumExp(const std::vector<double>& values) {
  if (values.empty()) return kNegInf;
  const double max = *std::max_element(values.begin(), values.end());
  if (max == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max);
  return max + std::log(sum);
}

std::vector<double> ScoreAll(const ScoreContext& ctx,
                             const std::vector<Labeling>& support) {
  std::vector<double> scores;
  scores.reserve(support.size());
  for (const Labeling& sigma : support) {
    scores.push_back(ScoreFromCounts(ctx, sigma));
  }
  return scores;
}

absl::StatusOr<EmDistribution> EmFromScores(std::vector<Labeling> support,
                                            std::vector<double> scores,
                                            double eta) {
  if (support.empty()) return EmptySigmaError();
  if (support.size() != scores.size()) {
    return absl::InvalidArgumentError(
        "DimensionMismatch: one score per support member required");
  }
  EmDistribution dist;
  dist.support = std::move(support);
  dist.scores = std::move(scores);
  dist.log_weights.reserve(dist.scores.size());
  for (double t : dist.scores) dist.log_weights.push_back(eta * t);
  dist.log_partition = LogSumExp(dist.log_weights);
  return dist;
}

absl::StatusOr<EmDistribution> ComputeEmDistribution(const ScoreContext& ctx,
                                                     const MechanismConfig& cfg,
                                                     const SbmParams& params) {
  if (absl::Status s = ValidateConfig(cfg); !s.ok()) return s;
  auto support = EnumerateBalanced(params.balance(), cfg.enumeration_cap);
  if (!support.ok()) return support.status();
  std::vector<double> scores = ScoreAll(ctx, *support);
  return EmFromScores(*std::move(support), std::move(scores), cfg.eta());
}

size_t ArgmaxIndex(const std::vector<double>& scores) {
  // max_element returns the first maximum; supports are in lexicographic
  // order, so this is the lexicographically smallest maximizer.
  return static_cast<size_t>(std::max_element(scores.begin(), scores.end()) -
                             scores.begin());
}

size_t SampleExactIndex(const EmDistribution& dist, Rng& rng) {
  const double u = rng.Uniform();
  double cumulative = 0.0;
  for (size_t i = 0; i < dist.size(); ++i) {
    cumulative += dist.Probability(i);
    if (u < cumulative) return i;
  }
  // Rounding left u above the final cumulative sum; return the last index
  // with positive mass.
  for (size_t i = dist.size(); i > 0; --i) {
    if (dist.log_weights[i - 1] > kNegInf) return i - 1;
  }
  return dist.size() - 1;
}

size_t SampleGumbelIndex(const EmDistribution& dist, Rng& rng) {
  size_t best = 0;
  double best_key = kNegInf;
  for (size_t i = 0; i < dist.size(); ++i) {
    const double key = dist.log_weights[i] + rng.Gumbel();
    if (key > best_key) {
      best_key = key;
      best = i;
    }
  }
  return best;
}

Labeling RunMetropolisChain(const ScoreContext& ctx, const BalanceSpec& spec,
                            double eta, const Labeling& start, int64_t steps,
                            Rng& rng) {
  const int n = ctx.num_vertices();
  const int k = spec.num_communities();
  const int words = ctx.words_per_row();
  std::vector<int> labels = start.labels();
  std::vector<int> counts(k, 0);
  std::vector<uint64_t> members(static_cast<size_t>(k) * words, 0);
  for (int v = 0; v < n; ++v) {
    ++counts[labels[v]];
    members[labels[v] * words + v / 64] |= uint64_t{1} << (v % 64);
  }
  auto edges_into = [&](int v, int label) {
    const uint64_t* row = ctx.Row(v);
    const uint64_t* cls = &members[static_cast<size_t>(label) * words];
    int64_t total = 0;
    for (int w = 0; w < words; ++w) total += std::popcount(row[w] & cls[w]);
    return total;
  };
  const double lambda = ctx.lambda();
  for (int64_t step = 0; step < steps; ++step) {
    const int v = static_cast<int>(rng.UniformInt(n));
    const int to = static_cast<int>(rng.UniformInt(k));
    const int from = labels[v];
    if (to == from) continue;
    if (!spec.AdmitsCount(counts[to] + 1) ||
        !spec.AdmitsCount(counts[from] - 1)) {
      continue;
    }
    // Class sizes exclude v itself: counts[to] others join, counts[from] - 1
    // others leave.
    const double delta =
        static_cast<double>(edges_into(v, to) - edges_into(v, from)) -
        lambda * static_cast<double>(counts[to] - (counts[from] - 1));
    const double log_accept = eta * delta;
    if (log_accept < 0.0 && std::log(rng.UniformOpen()) >= log_accept) {
      continue;
    }
    members[from * words + v / 64] &= ~(uint64_t{1} << (v % 64));
    members[to * words + v / 64] |= uint64_t{1} << (v % 64);
    --counts[from];
    ++counts[to];
    labels[v] = to;
  }
  return Labeling(std::move(labels), k);
}

absl::StatusOr<EmSampler> EmSampler::Create(const MechanismConfig& cfg,
                                            const SbmParams& params) {
  if (absl::Status s = ValidateConfig(cfg); !s.ok()) return s;
  std::vector<Labeling> support;
  auto enumerated = EnumerateBalanced(params.balance(), cfg.enumeration_cap);
  if (enumerated.ok()) {
    support = *std::move(enumerated);
    if (support.empty()) return EmptySigmaError();
  } else if (cfg.sampler != Sampler::kMetropolis) {
    return enumerated.status();
  }
  return EmSampler(cfg, params, std::move(support));
}

absl::StatusOr<EmDistribution> EmSampler::Distribution(
    const ScoreContext& ctx) const {
  if (support_.empty()) {
    return absl::ResourceExhaustedError(
        "EnumerationTooLarge: Sigma_beta was not enumerated for this sampler");
  }
  return EmFromScores(support_, ScoreAll(ctx, support_), cfg_.eta());
}

absl::StatusOr<EmSample> EmSampler::Sample(const ScoreContext& ctx,
                                           Rng& rng) const {
  if (cfg_.sampler == Sampler::kMetropolis) {
    const Labeling start =
        MostBalancedLabeling(params_.n(), params_.num_communities());
    return EmSample{RunMetropolisChain(ctx, params_.balance(), cfg_.eta(),
                                       start, cfg_.chain_steps, rng),
                    /*approximate=*/true};
  }
  auto dist = Distribution(ctx);
  if (!dist.ok()) return dist.status();
  const size_t index = cfg_.sampler == Sampler::kGumbel
                           ? SampleGumbelIndex(*dist, rng)
                           : SampleExactIndex(*dist, rng);
  return EmSample{dist->support[index], /*approximate=*/false};
}

absl::StatusOr<Labeling> EmSampler::SampleUniform(Rng& rng) const {
  if (!support_.empty()) return support_[rng.UniformInt(support_.size())];
  return SampleUniformBalanced(params_.balance(), rng);
}

absl::StatusOr<EmSample> SampleEm(const ScoreContext& ctx,
                                  const MechanismConfig& cfg,
                                  const SbmParams& params, uint64_t seed,
                                  uint64_t stream) {
  auto sampler = EmSampler::Create(cfg, params);
  if (!sampler.ok()) return sampler.status();
  Rng rng(seed, stream);
  return sampler->Sample(ctx, rng);
}

absl::StatusOr<double> EstimatorLambda(const MechanismConfig& cfg,
                                       const SbmParams& params) {
  return PenaltyLambda(params, cfg.w);
}

absl::StatusOr<EstimatorOutput> RunPrivateEstimator(const Graph& g,
                                                    const EmSampler& sampler,
                                                    Rng& rng) {
  const MechanismConfig& cfg = sampler.config();
  if (g.num_vertices() != sampler.params().n()) {
    return absl::InvalidArgumentError(
        absl::StrCat("DimensionMismatch: graph has ", g.num_vertices(),
                     " vertices, params.n = ", sampler.params().n()));
  }
  auto lambda = EstimatorLambda(cfg, sampler.params());
  if (!lambda.ok()) return lambda.status();
  EstimatorOutput out;
  out.lambda = *lambda;
  out.eta = cfg.eta();
  out.envelope_member = InEnvelope(g, cfg.envelope);
  if (out.envelope_member) {
    auto draw = sampler.Sample(ScoreContext(g, *lambda), rng);
    if (!draw.ok()) return draw.status();
    out.labeling = std::move(draw->labeling);
    out.approximate = draw->approximate;
    return out;
  }
  if (cfg.fallback == FallbackPolicy::kReject) {
    out.abstained = true;
    return out;
  }
  auto uniform = sampler.SampleUniform(rng);
  if (!uniform.ok()) return uniform.status();
  out.labeling = *std::move(uniform);
  return out;
}

absl::StatusOr<EstimatorOutput> RunPrivateEstimator(const Graph& g,
                                                    const MechanismConfig& cfg,
                                                    const SbmParams& params,
                                                    uint64_t seed) {
  auto sampler = EmSampler::Create(cfg, params);
  if (!sampler.ok()) return sampler.status();
  Rng rng(seed);
  return RunPrivateEstimator(g, *sampler, rng);
}

std::string EstimatorRecordJson(const EstimatorOutput& out,
                                const MechanismConfig& cfg,
                                const SbmParams& params, uint64_t seed) {
  nlohmann::ordered_json record;
  record["epsilon"] = cfg.epsilon;
  record["epsilon0"] = cfg.epsilon0();
  record["eta"] = out.eta;
  record["envelope_member"] = out.envelope_member;
  record["sampler"] = std::string(SamplerName(cfg.sampler));
  record["approximate"] = out.approximate;
  record["n"] = params.n();
  record["K"] = params.num_communities();
  record["a"] = params.a();
  record["b"] = params.b();
  record["beta"] = params.beta();
  if (out.labeling.has_value()) {
    std::vector<int> one_based = out.labeling->labels();
    for (int& v : one_based) ++v;
    record["labeling"] = one_based;
  } else {
    record["labeling"] = nullptr;
  }
  record["seed"] = seed;
  return record.dump();
}

absl::StatusOr<OutputLaw> MechanismOutputLaw(
    const Graph& g, const MechanismConfig& cfg, double lambda,
    const std::vector<Labeling>& support) {
  if (support.empty()) return EmptySigmaError();
  OutputLaw law;
  law.envelope_member = InEnvelope(g, cfg.envelope);
  if (law.envelope_member) {
    law.log_probs = ScoreAll(ScoreContext(g, lambda), support);
    for (double& v : law.log_probs) v *= cfg.eta();
    const double log_partition = LogSumExp(law.log_probs);
    for (double& v : law.log_probs) v -= log_partition;
    return law;
  }
  if (cfg.fallback == FallbackPolicy::kReject) {
    law.log_probs.assign(support.size(), kNegInf);
    law.abstain_prob = 1.0;
    return law;
  }
  law.log_probs.assign(support.size(),
                       -std::log(static_cast<double>(support.size())));
  return law;
}

}  // namespace nodedp
