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

// Brute-force checks of the finite-sample inequalities behind the risk
// analysis: tail probabilities of score gaps, the Chernoff bound with slack,
// near-optimal level sets, the peeling bound, split/merge counts and orbit
// counting. Every check is exact arithmetic over an enumerated space.

#ifndef NODEDP_THEORY_VERIFY_H_
#define NODEDP_THEORY_VERIFY_H_

#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nodedp/graph_model.h"
#include "nodedp/mechanism.h"
#include "nodedp/score_engine.h"

namespace nodedp {

inline constexpr double kLemmaTolerance = 1e-12;
// Scores within this distance count as tied when comparing against a level.
inline constexpr double kTieTolerance = 1e-9;
// Exact tail enumeration visits 2^(alpha + gamma) outcomes.
inline constexpr int kMaxTailPairs = 25;
inline constexpr int kMaxGraphEnumerationN = 6;

// Whether T(sigma) - T(truth) >= -s, given the within-edge difference
// e(sigma) - e(truth) and the within-pair difference gamma - alpha.
bool TailEventHolds(int64_t edge_gap, int64_t pair_gap, double lambda,
                    double s);

// P(T_A(sigma) >= T_A(truth) - s) under A ~ SBM(truth), obtained by summing
// over all 2^(alpha + gamma) Bernoulli outcomes on the merge pairs (edge
// probability q) and split pairs (edge probability p). s = +inf gives 1.
// ResourceExhausted (TooManyPairs) when alpha + gamma > kMaxTailPairs.
absl::StatusOr<double> ExactTailProbability(const SbmParams& params,
                                            double lambda,
                                            const Labeling& truth,
                                            const Labeling& sigma, double s);

// The same probability summed over every graph on n <= 6 vertices, each
// weighted by its SBM(truth) probability.
absl::StatusOr<double> TailProbabilityByGraphEnumeration(
    const SbmParams& params, double lambda, const Labeling& truth,
    const Labeling& sigma, double s);

struct TailBoundCheck {
  double lhs = 0.0;  // exact tail probability
  double rhs = 0.0;  // exp(-I min(alpha, gamma) + t* s)
  double slack_s = 0.0;
  SplitMergeCounts counts;
  bool pass = false;  // lhs <= rhs + kLemmaTolerance
};

// One check per entry of s_grid. Requires 0 < b < a < n.
absl::StatusOr<std::vector<TailBoundCheck>> ChernoffBoundCheck(
    const SbmParams& params, double lambda, const Labeling& truth,
    const Labeling& sigma, const std::vector<double>& s_grid);

struct NearOptimalProfile {
  std::vector<double> thresholds;
  std::vector<int64_t> set_sizes;  // |S_s(A)| for each threshold
  double max_score = 0.0;
  double score_range = 0.0;  // max minus min of T over Sigma_beta
  int64_t sigma_size = 0;
  // Diagnostic linear envelope log|S_s| <= slope * s + intercept with
  // slope = C0 K log(nK) / (nI) and intercept = C1 log(nK).
  double slope = 0.0;
  double intercept = 0.0;
};

// Number of scores >= max - s (ties within kTieTolerance included).
// `sorted_scores` must be in descending order.
int64_t LevelSetSize(const std::vector<double>& sorted_scores, double s);

absl::StatusOr<NearOptimalProfile> NearOptimalSets(
    const ScoreContext& ctx, const SbmParams& params,
    const std::vector<double>& s_grid, double c0 = 1.0, double c1 = 1.0,
    int64_t cap = kDefaultEnumerationCap);

struct PeelingCheck {
  double s = 0.0;
  double eta = 0.0;
  double exact_lhs = 0.0;  // P(T(hat sigma) <= T* - s)
  // sum_{l >= 1} |S_{l s}| e^{-eta l s}
  double stated_rhs = 0.0;
  // sum_{l >= 1} |S_{(l+1) s}| e^{-eta l s}; valid for every eta.
  double shifted_rhs = 0.0;
  bool stated_pass = false;
  bool shifted_pass = false;
};

// Both right-hand sides are +inf at s = 0 or eta = 0.
PeelingCheck PeelingBoundCheck(const EmDistribution& dist, double eta,
                               double s);
absl::StatusOr<PeelingCheck> PeelingBoundCheck(const ScoreContext& ctx,
                                               const MechanismConfig& cfg,
                                               const SbmParams& params,
                                               double s);

// Canonical member of sigma's S_K orbit: labels renumbered by first
// occurrence.
Labeling CanonicalOrbitRepresentative(const Labeling& sigma);

// log min{(e n K / m)^m, K^n}; 0 at m = 0.
double OrbitCountLogBound(int n, int num_communities, int m);

struct OrbitCensus {
  std::vector<int64_t> counts;     // |G_m| for m = 0..n
  std::vector<double> log_bounds;  // OrbitCountLogBound per m
  int64_t orbit_size = 0;          // K!
  int64_t sigma_size = 0;          // |Sigma_beta|
  bool bounds_pass = false;        // every count within its bound
  bool total_pass = false;         // sum_m counts[m] * K! == |Sigma_beta|
};

absl::StatusOr<OrbitCensus> ComputeOrbitCensus(
    const BalanceSpec& spec, const Labeling& truth,
    int64_t cap = kDefaultEnumerationCap);

// nm/(beta K) - m^2 when m <= n/(2 beta K), else c_beta n m / K with
// c_beta = (5 - 3 beta^2) / (36 beta).
double SplitMergeBranchBound(int n, int num_communities, double beta, int m);

struct SplitMergeBoundReport {
  int64_t pairs_checked = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  Labeling worst_truth;
  Labeling worst_sigma;
  double worst_bound = 0.0;  // branch bound at the minimizing pair
  double worst_value = 0.0;  // min(alpha, gamma) at the minimizing pair
  bool pass = false;
};

// min(alpha, gamma) >= SplitMergeBranchBound over all ordered pairs in
// Sigma_beta x Sigma_beta. Requires K >= 3 and 1 <= beta < sqrt(5/3).
absl::StatusOr<SplitMergeBoundReport> CheckSplitMergeLowerBound(
    const BalanceSpec& spec, int64_t cap = kDefaultEnumerationCap);

struct IdentityReport {
  int64_t pairs_checked = 0;
  int64_t violations = 0;
};

// alpha + gamma == m (n - m) over all ordered pairs of 2-community labelings
// on n vertices (every label vector, balanced or not).
absl::StatusOr<IdentityReport> CheckTwoCommunityIdentity(int n);

struct VerificationRecord {
  std::string lemma;
  std::string instance;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;

  double margin() const { return rhs - lhs; }
};

class VerificationLog {
 public:
  void Add(VerificationRecord record);
  const std::vector<VerificationRecord>& records() const { return records_; }
  int64_t failures() const;
  bool pass() const { return failures() == 0; }

  // Columns lemma,instance,lhs,rhs,margin,pass.
  void WriteCsv(std::ostream& out) const;
  // One <testsuite> per lemma, one <testcase> per record.
  void WriteJUnitXml(std::ostream& out) const;

 private:
  std::vector<VerificationRecord> records_;
};

struct VerifySuiteConfig {
  explicit VerifySuiteConfig(SbmParams params) : params(std::move(params)) {}

  SbmParams params;
  std::vector<double> s_grid = {0.0, 0.25, 0.5, 1.0, 2.0};
  std::optional<double> w;
  // Replaces the admissible penalty in the tail checks (mutation hook).
  std::optional<double> lambda_override;
  double envelope_c = kDefaultEnvelopeC;
  std::vector<double> epsilons = {1.0, 5.0, 20.0, 50.0, 100.0};
  int peeling_graphs = 4;
  int peeling_grid_points = 10;
  uint64_t seed = 0;
};

// Runs every check that applies to the configured instance and appends the
// records to `log`. Per-check errors (for example TooManyPairs) propagate.
absl::Status RunVerificationSuite(const VerifySuiteConfig& cfg,
                                  VerificationLog& log);

}  // namespace nodedp

#endif  // NODEDP_THEORY_VERIFY_H_
