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

#include "nodedp/privacy_audit.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "nlohmann/json.hpp"

namespace nodedp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

absl::Status AuditTooLarge(int n, int max_n) {
  return absl::ResourceExhaustedError(absl::StrCat(
      "AuditTooLarge: exhaustive audit needs n <= ", max_n, ", got n = ", n));
}

// Full-domain output law of every graph on n vertices, indexed by pair mask.
struct GraphLaws {
  std::vector<Labeling> support;
  std::vector<OutputLaw> laws;
  std::vector<double> log_partition;  // only meaningful inside G_C
};

absl::StatusOr<GraphLaws> ComputeAllLaws(const SbmParams& params,
                                         const MechanismConfig& cfg) {
  if (absl::Status s = ValidateConfig(cfg); !s.ok()) return s;
  auto lambda = EstimatorLambda(cfg, params);
  if (!lambda.ok()) return lambda.status();
  auto support = EnumerateBalanced(params.balance(), cfg.enumeration_cap);
  if (!support.ok()) return support.status();
  if (support->empty()) {
    return absl::FailedPreconditionError(
        "EmptySigma: the balanced labeling set is empty");
  }
  const int n = params.n();
  const uint64_t num_graphs = uint64_t{1} << Graph::NumPairs(n);
  GraphLaws out;
  out.support = *std::move(support);
  out.laws.reserve(num_graphs);
  out.log_partition.assign(num_graphs, 0.0);
  for (uint64_t mask = 0; mask < num_graphs; ++mask) {
    const Graph g = Graph::FromPairMask(n, mask);
    auto law = MechanismOutputLaw(g, cfg, *lambda, out.support);
    if (!law.ok()) return law.status();
    if (law->envelope_member) {
      std::vector<double> log_weights =
          ScoreAll(ScoreContext(g, *lambda), out.support);
      for (double& w : log_weights) w *= cfg.eta();
      out.log_partition[mask] = LogSumExp(log_weights);
    }
    out.laws.push_back(*std::move(law));
  }
  return out;
}

// Pair mask of the edges {v, u} for the neighbours u selected by `star`
// (bit t of `star` is the t-th vertex other than v).
uint64_t StarMask(int n, int v, uint32_t star) {
  uint64_t mask = 0;
  int bit = 0;
  for (int u = 0; u < n; ++u) {
    if (u == v) continue;
    if ((star >> bit++) & 1) {
      mask |=
          uint64_t{1} << Graph::PairIndex(n, std::min(u, v), std::max(u, v));
    }
  }
  return mask;
}

// Calls fn(mask_a, mask_b) once per unordered pair of distinct graphs that
// differ only in edges at one vertex.
template <typename Fn>
void ForEachNodeAdjacentPair(int n, Fn fn) {
  std::vector<uint64_t> stars;
  for (int v = 0; v < n; ++v) {
    for (uint32_t star = 1; star < (1u << (n - 1)); ++star) {
      if (std::popcount(star) == 1) {
        // A single-edge flip {u, v} is also a star at u; keep it only at the
        // smaller endpoint.
        const int t = std::countr_zero(star);
        const int u = t < v ? t : t + 1;
        if (u < v) continue;
      }
      stars.push_back(StarMask(n, v, star));
    }
  }
  const uint64_t num_graphs = uint64_t{1} << Graph::NumPairs(n);
  for (uint64_t a = 0; a < num_graphs; ++a) {
    for (uint64_t star : stars) {
      const uint64_t b = a ^ star;
      if (b > a) fn(a, b);
    }
  }
}

// Indicator of membership in the orbit of `sigma` for each support member.
std::vector<bool> OrbitMembership(const std::vector<Labeling>& support,
                                  const Labeling& sigma) {
  std::vector<bool> in_orbit(support.size());
  for (size_t i = 0; i < support.size(); ++i) {
    in_orbit[i] = MismatchCount(sigma, support[i]) == 0;
  }
  return in_orbit;
}

double GraphProbability(const SbmParams& params, const Labeling& truth,
                        uint64_t mask) {
  const int n = params.n();
  double prob = 1.0;
  int64_t k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++k) {
      const double p = truth[i] == truth[j] ? params.p() : params.q();
      prob *= ((mask >> k) & 1) ? p : 1.0 - p;
    }
  }
  return prob;
}

double FailureMass(const OutputLaw& law, const std::vector<bool>& in_orbit) {
  double mass = law.abstain_prob;
  for (size_t i = 0; i < law.log_probs.size(); ++i) {
    if (!in_orbit[i]) mass += std::exp(law.log_probs[i]);
  }
  return mass;
}

}  // namespace

double MaxLogRatio(const OutputLaw& law_a, const OutputLaw& law_b) {
  double worst = 0.0;
  auto gap = [](double la, double lb) {
    if (la == -kInf && lb == -kInf) return 0.0;
    if (la == -kInf || lb == -kInf) return kInf;
    return std::abs(la - lb);
  };
  for (size_t i = 0; i < law_a.log_probs.size(); ++i) {
    worst = std::max(worst, gap(law_a.log_probs[i], law_b.log_probs[i]));
  }
  worst = std::max(
      worst, gap(std::log(law_a.abstain_prob), std::log(law_b.abstain_prob)));
  return worst;
}

absl::StatusOr<AuditReport> AuditRestrictedDp(const SbmParams& params,
                                              const MechanismConfig& cfg,
                                              int max_n) {
  const int n = params.n();
  if (n > max_n || n > kDefaultAuditMaxN + 1) return AuditTooLarge(n, max_n);
  auto all = ComputeAllLaws(params, cfg);
  if (!all.ok()) return all.status();

  AuditReport report;
  report.epsilon_claimed = cfg.epsilon0();
  uint64_t worst_a = 0;
  uint64_t worst_b = 0;
  size_t worst_sigma = 0;
  ForEachNodeAdjacentPair(n, [&](uint64_t a, uint64_t b) {
    const OutputLaw& la = all->laws[a];
    const OutputLaw& lb = all->laws[b];
    if (la.envelope_member && lb.envelope_member) {
      ++report.pairs_checked;
      for (size_t i = 0; i < la.log_probs.size(); ++i) {
        const double gap = std::abs(la.log_probs[i] - lb.log_probs[i]);
        if (gap > report.max_log_ratio) {
          report.max_log_ratio = gap;
          worst_a = a;
          worst_b = b;
          worst_sigma = i;
        }
      }
      report.max_log_partition_gap =
          std::max(report.max_log_partition_gap,
                   std::abs(all->log_partition[a] - all->log_partition[b]));
    } else if (la.envelope_member != lb.envelope_member) {
      ++report.boundary_pairs;
      report.boundary_max_log_ratio =
          std::max(report.boundary_max_log_ratio, MaxLogRatio(la, lb));
    }
  });
  report.attained_a = Graph::FromPairMask(n, worst_a);
  report.attained_b = Graph::FromPairMask(n, worst_b);
  report.attained_sigma = all->support[worst_sigma];
  report.pass =
      report.max_log_ratio <= report.epsilon_claimed + kAuditTolerance;
  report.partition_sandwich_pass = report.max_log_partition_gap <=
                                   report.epsilon_claimed / 2 + kAuditTolerance;
  // Pairs outside G_C on both sides share the fallback law exactly.
  report.full_domain_max_log_ratio =
      std::max(report.max_log_ratio, report.boundary_max_log_ratio);
  return report;
}

std::string AuditReportJson(const AuditReport& report) {
  auto finite_or_string = [](double x) -> nlohmann::ordered_json {
    if (std::isfinite(x)) return x;
    return "inf";
  };
  nlohmann::ordered_json j;
  j["max_log_ratio"] = report.max_log_ratio;
  j["epsilon_claimed"] = report.epsilon_claimed;
  j["pass"] = report.pass;
  j["pairs_checked"] = report.pairs_checked;
  j["attained_at"] = {
      {"graph_a", FormatGraph(report.attained_a)},
      {"graph_b", FormatGraph(report.attained_b)},
      {"labeling", FormatLabeling(report.attained_sigma)},
  };
  j["max_log_partition_gap"] = report.max_log_partition_gap;
  j["partition_sandwich_pass"] = report.partition_sandwich_pass;
  j["boundary_pairs"] = report.boundary_pairs;
  j["boundary_max_log_ratio"] = finite_or_string(report.boundary_max_log_ratio);
  j["full_domain_max_log_ratio"] =
      finite_or_string(report.full_domain_max_log_ratio);
  return j.dump(2);
}

double GroupPrivacyFactor(const OutputLaw& law_a, const OutputLaw& law_b) {
  return MaxLogRatio(law_a, law_b);
}

absl::StatusOr<GroupPrivacyReport> GroupPrivacyAudit(const SbmParams& params,
                                                     const MechanismConfig& cfg,
                                                     int distance, int max_n) {
  const int n = params.n();
  if (n > max_n || n > kDefaultAuditMaxN) return AuditTooLarge(n, max_n);
  if (distance < 0) return absl::InvalidArgumentError("distance must be >= 0");
  auto all = ComputeAllLaws(params, cfg);
  if (!all.ok()) return all.status();
  const uint64_t num_graphs = uint64_t{1} << Graph::NumPairs(n);
  // d_v depends only on the symmetric difference.
  std::vector<int> cover(num_graphs);
  for (uint64_t diff = 0; diff < num_graphs; ++diff) {
    auto d = NodeDistance(Graph(n), Graph::FromPairMask(n, diff));
    if (!d.ok()) return d.status();
    cover[diff] = d->distance;
  }
  GroupPrivacyReport report;
  report.distance = distance;
  report.bound = distance * cfg.epsilon0();
  for (uint64_t a = 0; a < num_graphs; ++a) {
    if (!all->laws[a].envelope_member) continue;
    for (uint64_t b = a; b < num_graphs; ++b) {
      if (cover[a ^ b] != distance || !all->laws[b].envelope_member) continue;
      ++report.pairs_checked;
      report.max_gap = std::max(report.max_gap,
                                GroupPrivacyFactor(all->laws[a], all->laws[b]));
    }
  }
  report.pass = report.max_gap <= report.bound + kAuditTolerance;
  return report;
}

absl::StatusOr<TwoPointInstance> MakeTwoPointInstance(const SbmParams& params,
                                                      const Labeling& sigma,
                                                      uint64_t coupled_seed) {
  if (sigma.size() != params.n()) {
    return absl::InvalidArgumentError("DimensionMismatch: sigma length != n");
  }
  if (!IsBalanced(sigma, params.balance())) {
    return absl::InvalidArgumentError(
        "BalanceViolation: sigma is not beta-balanced");
  }
  for (int count : sigma.ClassCounts()) {
    if (count < 2) {
      return absl::FailedPreconditionError(
          "TooFewPerClass: every community needs at least 2 vertices");
    }
  }
  TwoPointInstance inst;
  inst.sigma = sigma;
  inst.u = -1;
  inst.v = -1;
  for (int i = 0; i < sigma.size(); ++i) {
    if (inst.u < 0 && sigma[i] == 0) inst.u = i;
    if (inst.v < 0 && sigma[i] == 1) inst.v = i;
  }
  std::vector<int> swapped = sigma.labels();
  std::swap(swapped[inst.u], swapped[inst.v]);
  inst.sigma_prime = Labeling(std::move(swapped), sigma.num_communities());
  inst.coupled_seed = coupled_seed;
  return inst;
}

bool OrbitsDisjoint(const Labeling& sigma, const Labeling& sigma_prime) {
  const int k =
      std::max(sigma.num_communities(), sigma_prime.num_communities());
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    if (sigma.Permuted(perm).labels() == sigma_prime.labels()) return false;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return true;
}

absl::StatusOr<TwoPointResult> TwoPointExact(const SbmParams& params,
                                             const MechanismConfig& cfg,
                                             const TwoPointInstance& instance,
                                             int max_n) {
  const int n = params.n();
  if (n > max_n || n > kDefaultAuditMaxN) return AuditTooLarge(n, max_n);
  auto audit = AuditRestrictedDp(params, cfg, max_n);
  if (!audit.ok()) return audit.status();
  auto all = ComputeAllLaws(params, cfg);
  if (!all.ok()) return all.status();
  const std::vector<bool> in_sigma =
      OrbitMembership(all->support, instance.sigma);
  const std::vector<bool> in_sigma_prime =
      OrbitMembership(all->support, instance.sigma_prime);
  TwoPointResult result;
  const uint64_t num_graphs = uint64_t{1} << Graph::NumPairs(n);
  for (uint64_t mask = 0; mask < num_graphs; ++mask) {
    const double p_sigma = GraphProbability(params, instance.sigma, mask);
    const double p_prime = GraphProbability(params, instance.sigma_prime, mask);
    if (p_sigma > 0) {
      result.delta_sigma += p_sigma * FailureMass(all->laws[mask], in_sigma);
    }
    if (p_prime > 0) {
      result.delta_sigma_prime +=
          p_prime * FailureMass(all->laws[mask], in_sigma_prime);
    }
  }
  result.max_failure = std::max(result.delta_sigma, result.delta_sigma_prime);
  result.epsilon_nominal = cfg.epsilon;
  result.floor_nominal = 1.0 / (1.0 + std::exp(2 * cfg.epsilon));
  result.epsilon_audited = audit->full_domain_max_log_ratio;
  result.floor_audited = 1.0 / (1.0 + std::exp(2 * result.epsilon_audited));
  result.pass = result.max_failure >= result.floor_audited - kAuditTolerance;
  return result;
}

std::pair<Graph, Graph> SampleCoupledPair(const SbmParams& params,
                                          const TwoPointInstance& instance,
                                          Rng& rng) {
  const int n = params.n();
  Graph a(n);
  Graph b(n);
  auto prob = [&](const Labeling& s, int i, int j) {
    return s[i] == s[j] ? params.p() : params.q();
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool touches = i == instance.u || i == instance.v ||
                           j == instance.u || j == instance.v;
      if (!touches) {
        // sigma and sigma' agree away from {u, v}.
        const bool edge = rng.Bernoulli(prob(instance.sigma, i, j));
        a.SetEdge(i, j, edge);
        b.SetEdge(i, j, edge);
      } else {
        a.SetEdge(i, j, rng.Bernoulli(prob(instance.sigma, i, j)));
        b.SetEdge(i, j, rng.Bernoulli(prob(instance.sigma_prime, i, j)));
      }
    }
  }
  return {std::move(a), std::move(b)};
}

absl::StatusOr<TwoPointResult> TwoPointMonteCarlo(
    const SbmParams& params, const MechanismConfig& cfg,
    const TwoPointInstance& instance, int64_t replicates,
    double epsilon_audited) {
  if (replicates < 1) return absl::InvalidArgumentError("replicates >= 1");
  auto sampler = EmSampler::Create(cfg, params);
  if (!sampler.ok()) return sampler.status();
  int64_t fail_sigma = 0;
  int64_t fail_prime = 0;
  for (int64_t r = 0; r < replicates; ++r) {
    Rng rng(instance.coupled_seed, static_cast<uint64_t>(r));
    auto [a, b] = SampleCoupledPair(params, instance, rng);
    auto out_a = RunPrivateEstimator(a, *sampler, rng);
    if (!out_a.ok()) return out_a.status();
    auto out_b = RunPrivateEstimator(b, *sampler, rng);
    if (!out_b.ok()) return out_b.status();
    fail_sigma += !out_a->labeling.has_value() ||
                  MismatchCount(instance.sigma, *out_a->labeling) != 0;
    fail_prime += !out_b->labeling.has_value() ||
                  MismatchCount(instance.sigma_prime, *out_b->labeling) != 0;
  }
  TwoPointResult result;
  result.replicates = replicates;
  result.delta_sigma = static_cast<double>(fail_sigma) / replicates;
  result.delta_sigma_prime = static_cast<double>(fail_prime) / replicates;
  result.delta_sigma_ci = WilsonInterval(fail_sigma, replicates);
  result.delta_sigma_prime_ci = WilsonInterval(fail_prime, replicates);
  result.max_failure = std::max(result.delta_sigma, result.delta_sigma_prime);
  result.epsilon_nominal = cfg.epsilon;
  result.floor_nominal = 1.0 / (1.0 + std::exp(2 * cfg.epsilon));
  result.epsilon_audited = epsilon_audited > 0 ? epsilon_audited : cfg.epsilon;
  result.floor_audited = 1.0 / (1.0 + std::exp(2 * result.epsilon_audited));
  // Statistical version: the upper confidence limit must reach the floor.
  result.pass =
      std::max(result.delta_sigma_ci.hi, result.delta_sigma_prime_ci.hi) >=
      result.floor_audited;
  return result;
}

double RiskFloor(int n, double epsilon) {
  return 1.0 / (n * (1.0 + std::exp(2 * epsilon)));
}

RiskFloorReport RiskFloorCheck(double expected_mismatch, int n, double epsilon,
                               double tolerance) {
  RiskFloorReport report;
  report.floor = RiskFloor(n, epsilon);
  report.pass = expected_mismatch >= report.floor - tolerance;
  return report;
}

absl::StatusOr<double> MinEpsilonForFailure(int n, double c) {
  const double log_target = c * std::log(static_cast<double>(n));
  if (!(log_target > 0.0)) {
    return absl::InvalidArgumentError("need n^c > 1");
  }
  return 0.5 * std::log(std::expm1(log_target));
}

}  // namespace nodedp
