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

// Exhaustive and statistical checks of the estimator's privacy: worst-case
// log-probability ratios over node-adjacent graph pairs, group privacy along
// longer rewiring chains, and the two-point construction behind the minimax
// lower bound R >= 1 / (n (1 + e^{2 epsilon})).

#ifndef NODEDP_PRIVACY_AUDIT_H_
#define NODEDP_PRIVACY_AUDIT_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "nodedp/graph_model.h"
#include "nodedp/mechanism.h"
#include "nodedp/stats.h"

namespace nodedp {

inline constexpr int kDefaultAuditMaxN = 6;
inline constexpr double kAuditTolerance = 1e-9;

// max over outputs of |log P(o | law_a) - log P(o | law_b)|, where outputs are
// the support members plus abstention. Outputs with zero mass under both laws
// are skipped; zero mass under exactly one law gives +infinity.
double MaxLogRatio(const OutputLaw& law_a, const OutputLaw& law_b);

struct AuditReport {
  // Worst case over node-adjacent pairs with both graphs in G_C.
  double max_log_ratio = 0.0;
  Graph attained_a;
  Graph attained_b;
  Labeling attained_sigma;
  double epsilon_claimed = 0.0;  // epsilon0, the restricted-domain level
  bool pass = false;
  int64_t pairs_checked = 0;
  // max |log Z_A - log Z_A'| on the same pairs; bounded by epsilon0 / 2.
  double max_log_partition_gap = 0.0;
  bool partition_sandwich_pass = false;
  // Pairs with exactly one graph in G_C, under the configured fallback.
  int64_t boundary_pairs = 0;
  double boundary_max_log_ratio = 0.0;
  // Worst single-rewiring log ratio of the full-domain estimator.
  double full_domain_max_log_ratio = 0.0;
};

// Enumerates every graph on n <= max_n vertices and every unordered
// node-adjacent pair. ResourceExhausted (AuditTooLarge) above max_n.
absl::StatusOr<AuditReport> AuditRestrictedDp(const SbmParams& params,
                                              const MechanismConfig& cfg,
                                              int max_n = kDefaultAuditMaxN);

std::string AuditReportJson(const AuditReport& report);

struct GroupPrivacyReport {
  int distance = 0;
  double max_gap = 0.0;
  double bound = 0.0;  // distance * epsilon0
  bool pass = false;
  int64_t pairs_checked = 0;
};

// Max log-probability gap between EM laws of graphs at node distance
// exactly `distance`, both in G_C.
double GroupPrivacyFactor(const OutputLaw& law_a, const OutputLaw& law_b);

// Exhaustive over all graph pairs at n <= max_n (default 5).
absl::StatusOr<GroupPrivacyReport> GroupPrivacyAudit(const SbmParams& params,
                                                     const MechanismConfig& cfg,
                                                     int distance,
                                                     int max_n = 5);

struct TwoPointInstance {
  Labeling sigma;
  Labeling sigma_prime;  // sigma with the labels of u and v exchanged
  int u = 0;
  int v = 0;
  uint64_t coupled_seed = 0;
};

// u, v are the lowest-index vertices of the first two communities of sigma.
// FailedPrecondition (TooFewPerClass) unless every class has >= 2 members.
absl::StatusOr<TwoPointInstance> MakeTwoPointInstance(
    const SbmParams& params, const Labeling& sigma, uint64_t coupled_seed = 0);

// True iff no pi in S_K maps sigma to sigma_prime (K <= 5, by enumeration).
bool OrbitsDisjoint(const Labeling& sigma, const Labeling& sigma_prime);

struct TwoPointResult {
  // Failure probabilities P(hat sigma not in orbit(sigma)) under SBM(sigma),
  // and likewise for sigma'.
  double delta_sigma = 0.0;
  double delta_sigma_prime = 0.0;
  double max_failure = 0.0;
  double epsilon_nominal = 0.0;
  double floor_nominal = 0.0;  // 1 / (1 + e^{2 epsilon})
  double epsilon_audited = 0.0;
  double floor_audited = 0.0;  // 1 / (1 + e^{2 epsilon_audited})
  bool pass = false;           // max_failure >= floor_audited - tolerance
  // Monte-Carlo mode only.
  Interval delta_sigma_ci;
  Interval delta_sigma_prime_ci;
  int64_t replicates = 0;
};

// Exact: sums the full-domain output law against the exact SBM graph
// distributions (n <= max_n). epsilon_audited comes from AuditRestrictedDp.
absl::StatusOr<TwoPointResult> TwoPointExact(const SbmParams& params,
                                             const MechanismConfig& cfg,
                                             const TwoPointInstance& instance,
                                             int max_n = kDefaultAuditMaxN);

// One draw of the coupling: pairs avoiding {u, v} are shared, pairs touching
// u or v are drawn separately under each law. d_v(A, A') <= 2.
std::pair<Graph, Graph> SampleCoupledPair(const SbmParams& params,
                                          const TwoPointInstance& instance,
                                          Rng& rng);

// Estimates both failure probabilities by running the estimator on coupled
// pairs; the floors use the nominal epsilon unless `epsilon_audited` > 0.
absl::StatusOr<TwoPointResult> TwoPointMonteCarlo(
    const SbmParams& params, const MechanismConfig& cfg,
    const TwoPointInstance& instance, int64_t replicates,
    double epsilon_audited = 0.0);

// 1 / (n (1 + e^{2 epsilon})).
double RiskFloor(int n, double epsilon);

struct RiskFloorReport {
  double floor = 0.0;
  bool pass = false;  // expected_mismatch >= floor - tolerance
};
RiskFloorReport RiskFloorCheck(double expected_mismatch, int n, double epsilon,
                               double tolerance = 1e-12);

// Smallest epsilon compatible with failure probability n^{-c}:
// (1/2) log(n^c - 1). Requires n^c > 1.
absl::StatusOr<double> MinEpsilonForFailure(int n, double c);

}  // namespace nodedp

#endif  // NODEDP_PRIVACY_AUDIT_H_
