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

// Node-private community estimator. Inside the degree envelope G_C the output
// law is the Exponential Mechanism
//
//   P(sigma | A) ∝ exp(eta * T_A(sigma)) 1{sigma in Sigma_beta},
//   eta = epsilon0 / (2 Delta_a),  epsilon0 = epsilon / 2,
//
// and outside G_C a configured fallback policy is applied. Three samplers are
// offered: exact inverse-CDF, Gumbel-max (same law) and a Metropolis chain
// over Sigma_beta whose output is only approximately EM-distributed.

#ifndef NODEDP_MECHANISM_H_
#define NODEDP_MECHANISM_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "nodedp/graph_model.h"
#include "nodedp/rng.h"
#include "nodedp/score_engine.h"

namespace nodedp {

enum class Sampler { kExact, kGumbel, kMetropolis };
enum class FallbackPolicy { kUniformBalanced, kReject };

std::string_view SamplerName(Sampler sampler);
absl::StatusOr<Sampler> ParseSampler(std::string_view name);
std::string_view FallbackName(FallbackPolicy policy);
absl::StatusOr<FallbackPolicy> ParseFallback(std::string_view name);

inline constexpr int64_t kDefaultChainSteps = 100'000;

struct MechanismConfig {
  MechanismConfig(double epsilon, DegreeEnvelope envelope)
      : epsilon(epsilon), envelope(envelope) {}

  double epsilon;  // total advertised budget
  DegreeEnvelope envelope;
  Sampler sampler = Sampler::kExact;
  int64_t chain_steps = kDefaultChainSteps;
  FallbackPolicy fallback = FallbackPolicy::kUniformBalanced;
  // Penalty interpolation weight; required for K >= 3, rejected for K = 2.
  std::optional<double> w;
  int64_t enumeration_cap = kDefaultEnumerationCap;
  // Multiplies eta. Only for mutation tests of the audits; 1 otherwise.
  double calibration_scale = 1.0;

  double epsilon0() const { return epsilon / 2.0; }
  double eta() const {
    return calibration_scale * epsilon0() / (2.0 * envelope.delta_a());
  }
};

// Checks epsilon >= 0 and finite, chain_steps >= 1, calibration_scale > 0.
absl::Status ValidateConfig(const MechanismConfig& cfg);

// The EM law over an explicit support.
struct EmDistribution {
  std::vector<Labeling> support;
  std::vector<double> scores;       // T_A(sigma)
  std::vector<double> log_weights;  // eta * T_A(sigma)
  double log_partition = 0.0;       // log-sum-exp of log_weights

  size_t size() const { return support.size(); }
  double LogProbability(size_t i) const {
    return log_weights[i] - log_partition;
  }
  double Probability(size_t i) const;
  std::vector<double> Probabilities() const;
};

double LogSumExp(const std::vector<double>& values);

// T_A over `support`, via the within-edge / within-pair counts so ties are
// bit-identical.
std::vector<double> ScoreAll(const ScoreContext& ctx,
                             const std::vector<Labeling>& support);

// Builds the law from precomputed scores. FailedPrecondition (EmptySigma) for
// an empty support.
absl::StatusOr<EmDistribution> EmFromScores(std::vector<Labeling> support,
                                            std::vector<double> scores,
                                            double eta);

// Enumerates Sigma_beta for `params` and builds the EM law at cfg.eta().
// ResourceExhausted (EnumerationTooLarge) above cfg.enumeration_cap.
absl::StatusOr<EmDistribution> ComputeEmDistribution(const ScoreContext& ctx,
                                                     const MechanismConfig& cfg,
                                                     const SbmParams& params);

// Lexicographically smallest maximizer of the scores.
size_t ArgmaxIndex(const std::vector<double>& scores);

// Draws from an explicit law.
size_t SampleExactIndex(const EmDistribution& dist, Rng& rng);
size_t SampleGumbelIndex(const EmDistribution& dist, Rng& rng);

// Single-vertex relabel Metropolis chain on Sigma_beta started at `start`:
// uniform vertex, uniform label, moves leaving Sigma_beta rejected, accept
// with probability min{1, exp(eta * delta T)}.
Labeling RunMetropolisChain(const ScoreContext& ctx, const BalanceSpec& spec,
                            double eta, const Labeling& start, int64_t steps,
                            Rng& rng);

struct EmSample {
  Labeling labeling;
  bool approximate = false;  // true for the Metropolis sampler
};

// Caches Sigma_beta (for exact/gumbel) so repeated draws on different graphs
// with the same parameters do not re-enumerate.
class EmSampler {
 public:
  static absl::StatusOr<EmSampler> Create(const MechanismConfig& cfg,
                                          const SbmParams& params);

  absl::StatusOr<EmSample> Sample(const ScoreContext& ctx, Rng& rng) const;
  // The exact law (exact/gumbel samplers only, or any sampler when Sigma_beta
  // is enumerable).
  absl::StatusOr<EmDistribution> Distribution(const ScoreContext& ctx) const;
  // Uniform draw from Sigma_beta.
  absl::StatusOr<Labeling> SampleUniform(Rng& rng) const;

  const MechanismConfig& config() const { return cfg_; }
  const SbmParams& params() const { return params_; }
  // Empty for the Metropolis sampler on non-enumerable instances.
  const std::vector<Labeling>& support() const { return support_; }

 private:
  EmSampler(MechanismConfig cfg, SbmParams params,
            std::vector<Labeling> support)
      : cfg_(cfg), params_(params), support_(std::move(support)) {}
  MechanismConfig cfg_;
  SbmParams params_;
  std::vector<Labeling> support_;
};

// Convenience: one draw from the EM law at cfg.eta() with a fresh sampler.
absl::StatusOr<EmSample> SampleEm(const ScoreContext& ctx,
                                  const MechanismConfig& cfg,
                                  const SbmParams& params, uint64_t seed,
                                  uint64_t stream = 0);

struct EstimatorOutput {
  std::optional<Labeling> labeling;  // nullopt iff abstained
  bool envelope_member = false;
  bool abstained = false;
  bool approximate = false;
  double lambda = 0.0;
  double eta = 0.0;
};

// lambda for the estimator's score: the K = 2 midpoint, or cfg.w for K >= 3.
absl::StatusOr<double> EstimatorLambda(const MechanismConfig& cfg,
                                       const SbmParams& params);

// The full-domain estimator: EM at epsilon0 inside G_C, fallback outside.
absl::StatusOr<EstimatorOutput> RunPrivateEstimator(const Graph& g,
                                                    const EmSampler& sampler,
                                                    Rng& rng);
absl::StatusOr<EstimatorOutput> RunPrivateEstimator(const Graph& g,
                                                    const MechanismConfig& cfg,
                                                    const SbmParams& params,
                                                    uint64_t seed);

// JSON record {epsilon, epsilon0, eta, envelope_member, sampler, n, K, a, b,
// beta, labeling, seed}; labeling is 1-based, or null on abstention.
std::string EstimatorRecordJson(const EstimatorOutput& out,
                                const MechanismConfig& cfg,
                                const SbmParams& params, uint64_t seed);

// Exact output law of the full-domain estimator over `support` (Sigma_beta in
// enumeration order) plus the abstention mass.
struct OutputLaw {
  std::vector<double> log_probs;  // -inf where the mass is zero
  double abstain_prob = 0.0;
  bool envelope_member = false;
};

absl::StatusOr<OutputLaw> MechanismOutputLaw(
    const Graph& g, const MechanismConfig& cfg, double lambda,
    const std::vector<Labeling>& support);

}  // namespace nodedp

#endif  // NODEDP_MECHANISM_H_
