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

// Monte-Carlo risk sweeps of the private estimator over parameter grids,
// with a non-private maximum-likelihood baseline on the same graphs, the
// feasibility quantities of the risk bound, and lower-bound overlays.

#ifndef NODEDP_EXPERIMENTS_H_
#define NODEDP_EXPERIMENTS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "nodedp/graph_model.h"
#include "nodedp/mechanism.h"
#include "nodedp/rng.h"
#include "nodedp/score_engine.h"
#include "nodedp/stats.h"

namespace nodedp {

inline constexpr int kSweepSchemaVersion = 1;

struct TargetConstants {
  double c_s = 1.0;
  double c_mg = 1.0;
  double c0 = 1.0;
  double c1 = 1.0;
  double c3 = 1.0;
  // EM failure level; derived from c3 when unset (see FeasibilityReport).
  std::optional<double> alpha;
};

enum class TruthMode { kFixedBalanced, kUniform };

struct SweepConfig {
  std::vector<int> n_values;
  std::vector<int> k_values = {2};
  std::vector<double> a_values;
  std::vector<double> b_values;
  std::vector<double> beta_values = {1.0};
  std::vector<double> epsilons;
  std::vector<double> c_values = {kDefaultEnvelopeC};
  int64_t replicates = 1000;
  Sampler sampler = Sampler::kExact;
  int64_t chain_steps = kDefaultChainSteps;
  FallbackPolicy fallback = FallbackPolicy::kUniformBalanced;
  std::optional<double> w;
  TruthMode truth = TruthMode::kFixedBalanced;
  uint64_t seed = 0;
  TargetConstants constants;
  // Worker threads for replicates; results do not depend on it.
  int threads = 1;
};

// Parses and validates the JSON sweep schema (see configs/ for examples).
// InvalidArgument on unknown keys, wrong types, empty grids, replicates < 1
// or any grid cell that fails SbmParams validation.
absl::StatusOr<SweepConfig> ParseSweepConfig(std::string_view json);
absl::Status ValidateSweepConfig(const SweepConfig& cfg);

struct FeasibilityReport {
  double b = 0.0;       // C0 K log(nK) / (nI)
  double eta = 0.0;     // epsilon / (4 Delta_a)
  double gamma0 = 0.0;  // eta - B
  double alpha = 0.0;
  double s_star = 0.0;    // (C1 log(nK) + log(4/alpha)) / gamma0, +inf if not
  bool feasible = false;  // gamma0 > 0
};

// alpha is the configured value, else (1/(nK)) exp(-c3 epsilon / 2) when
// eta >= 2B and 0.05 otherwise.
FeasibilityReport ComputeFeasibility(const SbmParams& params, double epsilon,
                                     const DegreeEnvelope& envelope,
                                     const TargetConstants& constants);

// Smallest epsilon with gamma0 >= 0: 4 Delta_a B.
double MinFeasibleEpsilon(const SbmParams& params,
                          const DegreeEnvelope& envelope,
                          const TargetConstants& constants);

// Expected mismatch ratio of a uniform draw from Sigma_beta against `truth`
// (the estimator at epsilon = 0), by enumeration.
absl::StatusOr<double> UniformGuessRisk(const SbmParams& params,
                                        const Labeling& truth);

// argmax_sigma T_A(sigma). Exact (lexicographically smallest maximizer) when
// the sampler holds Sigma_beta; otherwise a multi-start local search over
// Sigma_beta with single relabels and swaps, flagged approximate.
struct MleResult {
  Labeling labeling;
  bool approximate = false;
};
MleResult NonPrivateMle(const ScoreContext& ctx, const EmSampler& sampler,
                        Rng& rng);

struct CellResult {
  int n = 0;
  int k = 0;
  double a = 0.0;
  double b = 0.0;
  double beta = 0.0;
  double epsilon = 0.0;
  double c = 0.0;
  Sampler sampler = Sampler::kExact;
  int64_t replicates = 0;
  double eta = 0.0;
  MeanSummary risk;      // mismatch ratio; abstentions count as r = 1
  int64_t failures = 0;  // replicates with r > 0
  double fail_frac = 0.0;
  Interval fail_ci;  // Wilson 99%
  double envelope_exit_frac = 0.0;
  MeanSummary mle_risk;
  double floor_lb = 0.0;  // 1 / (n (1 + e^{2 epsilon}))
  double signal = 0.0;
  double n_i = 0.0;
  bool feasible = false;
  bool approximate = false;
  bool mle_approximate = false;
};

struct RiskReport {
  std::vector<CellResult> cells;
};

// Cells are the grid product in the order n, K, a, b, beta, epsilon, C.
// Replicate r of cell c draws from Rng(seed, StreamId(c, r)).
absl::StatusOr<RiskReport> RunRiskSweep(const SweepConfig& cfg);

// Columns: n,K,a,b,beta,epsilon,C,sampler,replicates,mean_r,ci_lo,ci_hi,
// fail_frac,fail_ci_lo,fail_ci_hi,envelope_exit_frac,mle_mean_r,floor_lb,
// signal,nI,feasible. Reals printed with %.17g.
inline constexpr std::string_view kRiskCsvHeader =
    "n,K,a,b,beta,epsilon,C,sampler,replicates,mean_r,ci_lo,ci_hi,fail_frac,"
    "fail_ci_lo,fail_ci_hi,envelope_exit_frac,mle_mean_r,floor_lb,signal,nI,"
    "feasible";
void WriteRiskCsv(const RiskReport& report, std::ostream& out);

inline constexpr std::string_view kOverlayCsvHeader =
    "n,K,a,b,beta,epsilon,mean_r,ci_lo,ci_hi,floor_lb,signal_ref,floor_ok";
// Measured risk next to the floor 1/(n(1+e^{2 epsilon})) and the non-private
// reference exp(-Signal); floor_ok iff ci_hi >= floor_lb.
void WriteLowerBoundOverlayCsv(const RiskReport& report, std::ostream& out);

std::string RiskReportJson(const RiskReport& report);

struct TrendReport {
  // Max over cells of |mean - isotonic fit| / (ci_hi - ci_lo); a zero
  // residual counts as 0 even when the interval is degenerate.
  double max_isotonic_ratio = 0.0;
  bool monotone_pass = false;
  // Cells with eta >= huge_eta: the MLE mean lies in the private 99% CI.
  int64_t huge_cells = 0;
  bool huge_pass = false;
  bool floor_pass = false;     // ci_hi >= floor_lb everywhere
  bool markov_pass = false;    // fail_frac <= n mean_r (+1e-12) everywhere
  bool baseline_pass = false;  // mle mean <= private ci_hi + mle half-width
};

// Non-increasing least-squares fit (pool adjacent violators).
std::vector<double> IsotonicDecreasing(const std::vector<double>& values,
                                       const std::vector<double>& weights);

// Groups cells sharing (n, K, a, b, beta, C) into series ordered by epsilon.
TrendReport CheckRiskTrends(const RiskReport& report, double huge_eta = 50.0);

}  // namespace nodedp

#endif  // NODEDP_EXPERIMENTS_H_
