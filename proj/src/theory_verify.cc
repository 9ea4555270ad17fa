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

#include "nodedp/theory_verify.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "boost/property_tree/ptree.hpp"
#include "boost/property_tree/xml_parser.hpp"
#include "nodedp/info_quantities.h"
#include "nodedp/rng.h"

namespace nodedp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

absl::Status CheckSameShape(const Labeling& truth, const Labeling& sigma) {
  if (truth.size() != sigma.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "labelings have lengths ", truth.size(), " and ", sigma.size()));
  }
  return absl::OkStatus();
}

// pow_table[k] = base^k for k = 0..max_power.
std::vector<double> PowTable(double base, int max_power) {
  std::vector<double> table(max_power + 1, 1.0);
  for (int k = 1; k <= max_power; ++k) table[k] = table[k - 1] * base;
  return table;
}

std::string LabelString(const Labeling& sigma) {
  std::string out;
  for (int label : sigma.labels()) absl::StrAppend(&out, label + 1);
  return out;
}

}  // namespace

bool TailEventHolds(int64_t edge_gap, int64_t pair_gap, double lambda,
                    double s) {
  const double gap =
      static_cast<double>(edge_gap) - lambda * static_cast<double>(pair_gap);
  return gap >= -s - kTieTolerance;
}

absl::StatusOr<double> ExactTailProbability(const SbmParams& params,
                                            double lambda,
                                            const Labeling& truth,
                                            const Labeling& sigma, double s) {
  if (absl::Status st = CheckSameShape(truth, sigma); !st.ok()) return st;
  if (s == kInf) return 1.0;
  const SplitMergeCounts counts = SplitMerge(truth, sigma);
  const int alpha = static_cast<int>(counts.alpha);
  const int gamma = static_cast<int>(counts.gamma);
  if (alpha + gamma > kMaxTailPairs) {
    return absl::ResourceExhaustedError(
        absl::StrCat("TooManyPairs: alpha + gamma = ", alpha + gamma,
                     " exceeds ", kMaxTailPairs));
  }
  const double p = params.p();
  const double q = params.q();
  const std::vector<double> p_on = PowTable(p, alpha);
  const std::vector<double> p_off = PowTable(1.0 - p, alpha);
  const std::vector<double> q_on = PowTable(q, gamma);
  const std::vector<double> q_off = PowTable(1.0 - q, gamma);
  // Low gamma bits: merge-pair edges X (gain); high alpha bits: split-pair
  // edges Y (loss).
  const uint64_t merge_bits = (uint64_t{1} << gamma) - 1;
  const uint64_t num_outcomes = uint64_t{1} << (alpha + gamma);
  double total = 0.0;
  for (uint64_t mask = 0; mask < num_outcomes; ++mask) {
    const int x = std::popcount(mask & merge_bits);
    const int y = std::popcount(mask >> gamma);
    if (!TailEventHolds(x - y, gamma - alpha, lambda, s)) continue;
    total += q_on[x] * q_off[gamma - x] * p_on[y] * p_off[alpha - y];
  }
  return total;
}

absl::StatusOr<double> TailProbabilityByGraphEnumeration(
    const SbmParams& params, double lambda, const Labeling& truth,
    const Labeling& sigma, double s) {
  if (absl::Status st = CheckSameShape(truth, sigma); !st.ok()) return st;
  const int n = truth.size();
  if (n > kMaxGraphEnumerationN) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "graph enumeration limited to n <= ", kMaxGraphEnumerationN, ", got ",
        n));
  }
  if (s == kInf) return 1.0;
  const int num_pairs = n * (n - 1) / 2;
  std::vector<double> edge_prob(num_pairs);
  std::vector<int> pair_i(num_pairs), pair_j(num_pairs);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int64_t k = Graph::PairIndex(n, i, j);
      edge_prob[k] = truth[i] == truth[j] ? params.p() : params.q();
      pair_i[k] = i;
      pair_j[k] = j;
    }
  }
  const int64_t pair_gap = WithinPairCount(sigma) - WithinPairCount(truth);
  double total = 0.0;
  const uint64_t num_graphs = uint64_t{1} << num_pairs;
  for (uint64_t mask = 0; mask < num_graphs; ++mask) {
    int64_t edge_gap = 0;
    double prob = 1.0;
    for (int k = 0; k < num_pairs; ++k) {
      const bool present = (mask >> k) & 1;
      prob *= present ? edge_prob[k] : 1.0 - edge_prob[k];
      if (present) {
        edge_gap += (sigma[pair_i[k]] == sigma[pair_j[k]]) -
                    (truth[pair_i[k]] == truth[pair_j[k]]);
      }
    }
    if (TailEventHolds(edge_gap, pair_gap, lambda, s)) total += prob;
  }
  return total;
}

absl::StatusOr<std::vector<TailBoundCheck>> ChernoffBoundCheck(
    const SbmParams& params, double lambda, const Labeling& truth,
    const Labeling& sigma, const std::vector<double>& s_grid) {
  if (!(params.b() > 0 && params.b() < params.a() && params.a() < params.n())) {
    return absl::FailedPreconditionError(
        "the Chernoff comparison needs 0 < b < a < n");
  }
  absl::StatusOr<double> t_star = ChernoffTilt(params);
  if (!t_star.ok()) return t_star.status();
  const double renyi = RenyiHalf(params);
  const SplitMergeCounts counts = SplitMerge(truth, sigma);
  const double exponent =
      -renyi * static_cast<double>(std::min(counts.alpha, counts.gamma));
  std::vector<TailBoundCheck> out;
  out.reserve(s_grid.size());
  for (double s : s_grid) {
    absl::StatusOr<double> lhs =
        ExactTailProbability(params, lambda, truth, sigma, s);
    if (!lhs.ok()) return lhs.status();
    TailBoundCheck check;
    check.lhs = *lhs;
    check.rhs = std::exp(exponent + *t_star * s);
    check.slack_s = s;
    check.counts = counts;
    check.pass = check.lhs <= check.rhs + kLemmaTolerance;
    out.push_back(check);
  }
  return out;
}

int64_t LevelSetSize(const std::vector<double>& sorted_scores, double s) {
  if (sorted_scores.empty()) return 0;
  const double level = sorted_scores.front() - s - kTieTolerance;
  const auto end =
      std::partition_point(sorted_scores.begin(), sorted_scores.end(),
                           [level](double score) { return score >= level; });
  return end - sorted_scores.begin();
}

absl::StatusOr<NearOptimalProfile> NearOptimalSets(
    const ScoreContext& ctx, const SbmParams& params,
    const std::vector<double>& s_grid, double c0, double c1, int64_t cap) {
  absl::StatusOr<std::vector<Labeling>> support =
      EnumerateBalanced(params.balance(), cap);
  if (!support.ok()) return support.status();
  std::vector<double> scores = ScoreAll(ctx, *support);
  std::sort(scores.begin(), scores.end(), std::greater<>());

  NearOptimalProfile profile;
  profile.thresholds = s_grid;
  profile.sigma_size = static_cast<int64_t>(scores.size());
  if (!scores.empty()) {
    profile.max_score = scores.front();
    profile.score_range = scores.front() - scores.back();
  }
  for (double s : s_grid) profile.set_sizes.push_back(LevelSetSize(scores, s));
  const int n = params.n();
  const int k = params.num_communities();
  const double log_nk = std::log(static_cast<double>(n) * k);
  const double n_i = n * RenyiHalf(params);
  profile.slope = n_i > 0 ? c0 * k * log_nk / n_i : kInf;
  profile.intercept = c1 * log_nk;
  return profile;
}

PeelingCheck PeelingBoundCheck(const EmDistribution& dist, double eta,
                               double s) {
  PeelingCheck check;
  check.s = s;
  check.eta = eta;
  std::vector<double> sorted = dist.scores;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  if (sorted.empty()) return check;
  const double top = sorted.front();
  const double range = top - sorted.back();
  for (size_t i = 0; i < dist.size(); ++i) {
    if (dist.scores[i] <= top - s + kTieTolerance) {
      check.exact_lhs += dist.Probability(i);
    }
  }

  const double total = static_cast<double>(sorted.size());
  auto peel = [&](int shift) {
    if (s <= 0.0 || eta <= 0.0) return kInf;
    double sum = 0.0;
    for (int64_t l = 1;; ++l) {
      const double level = static_cast<double>(l + shift) * s;
      const double decay = std::exp(-eta * static_cast<double>(l) * s);
      if (level + kTieTolerance >= range) {
        // Every later level set is all of Sigma_beta: geometric tail.
        return sum + total * decay / -std::expm1(-eta * s);
      }
      const double term = LevelSetSize(sorted, level) * decay;
      sum += term;
      if (term < 1e-300) return sum;
    }
  };
  check.stated_rhs = peel(0);
  check.shifted_rhs = peel(1);
  check.stated_pass = check.exact_lhs <= check.stated_rhs + kLemmaTolerance;
  check.shifted_pass = check.exact_lhs <= check.shifted_rhs + kLemmaTolerance;
  return check;
}

absl::StatusOr<PeelingCheck> PeelingBoundCheck(const ScoreContext& ctx,
                                               const MechanismConfig& cfg,
                                               const SbmParams& params,
                                               double s) {
  absl::StatusOr<EmDistribution> dist = ComputeEmDistribution(ctx, cfg, params);
  if (!dist.ok()) return dist.status();
  return PeelingBoundCheck(*dist, cfg.eta(), s);
}

Labeling CanonicalOrbitRepresentative(const Labeling& sigma) {
  std::vector<int> relabel(sigma.num_communities(), -1);
  std::vector<int> labels(sigma.size());
  int next = 0;
  for (int i = 0; i < sigma.size(); ++i) {
    int& target = relabel[sigma[i]];
    if (target < 0) target = next++;
    labels[i] = target;
  }
  return Labeling(std::move(labels), sigma.num_communities());
}

double OrbitCountLogBound(int n, int num_communities, int m) {
  if (m <= 0) return 0.0;
  const double nk = static_cast<double>(n) * num_communities;
  return std::min(m * (1.0 + std::log(nk / m)),
                  n * std::log(static_cast<double>(num_communities)));
}

absl::StatusOr<OrbitCensus> ComputeOrbitCensus(const BalanceSpec& spec,
                                               const Labeling& truth,
                                               int64_t cap) {
  const int n = spec.num_vertices();
  const int k = spec.num_communities();
  if (truth.size() != n) {
    return absl::InvalidArgumentError("truth length differs from n");
  }
  absl::StatusOr<std::vector<Labeling>> support = EnumerateBalanced(spec, cap);
  if (!support.ok()) return support.status();

  OrbitCensus census;
  census.counts.assign(n + 1, 0);
  census.sigma_size = static_cast<int64_t>(support->size());
  census.orbit_size = 1;
  for (int i = 2; i <= k; ++i) census.orbit_size *= i;
  for (const Labeling& sigma : *support) {
    if (!(CanonicalOrbitRepresentative(sigma) == sigma)) continue;
    ++census.counts[MismatchCount(truth, sigma)];
  }
  census.bounds_pass = true;
  int64_t covered = 0;
  for (int m = 0; m <= n; ++m) {
    census.log_bounds.push_back(OrbitCountLogBound(n, k, m));
    covered += census.counts[m] * census.orbit_size;
    if (census.counts[m] > 0 &&
        std::log(static_cast<double>(census.counts[m])) >
            census.log_bounds[m] + kLemmaTolerance) {
      census.bounds_pass = false;
    }
  }
  census.total_pass = covered == census.sigma_size;
  return census;
}

double SplitMergeBranchBound(int n, int num_communities, double beta, int m) {
  const double nd = n;
  const double md = m;
  const double k = num_communities;
  if (md <= nd / (2.0 * beta * k)) return nd * md / (beta * k) - md * md;
  const double c_beta = (5.0 - 3.0 * beta * beta) / (36.0 * beta);
  return c_beta * nd * md / k;
}

absl::StatusOr<SplitMergeBoundReport> CheckSplitMergeLowerBound(
    const BalanceSpec& spec, int64_t cap) {
  const double beta = spec.beta();
  if (spec.num_communities() < 3 || beta < 1.0 || 3.0 * beta * beta >= 5.0) {
    return absl::InvalidArgumentError(
        "split/merge bound needs K >= 3 and 1 <= beta < sqrt(5/3)");
  }
  absl::StatusOr<std::vector<Labeling>> support = EnumerateBalanced(spec, cap);
  if (!support.ok()) return support.status();
  SplitMergeBoundReport report;
  for (const Labeling& truth : *support) {
    for (const Labeling& sigma : *support) {
      const SplitMergeCounts counts = SplitMerge(truth, sigma);
      const double bound = SplitMergeBranchBound(
          spec.num_vertices(), spec.num_communities(), beta, counts.m);
      const double value =
          static_cast<double>(std::min(counts.alpha, counts.gamma));
      ++report.pairs_checked;
      if (value - bound < report.min_margin) {
        report.min_margin = value - bound;
        report.worst_truth = truth;
        report.worst_sigma = sigma;
        report.worst_bound = bound;
        report.worst_value = value;
      }
    }
  }
  report.pass = report.min_margin >= -kLemmaTolerance;
  return report;
}

absl::StatusOr<IdentityReport> CheckTwoCommunityIdentity(int n) {
  if (n < 2 || n > 12) {
    return absl::InvalidArgumentError(
        "two-community identity check needs 2 <= n <= 12");
  }
  const int num_labelings = 1 << n;
  std::vector<Labeling> all;
  all.reserve(num_labelings);
  for (int code = 0; code < num_labelings; ++code) {
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = (code >> i) & 1;
    all.emplace_back(std::move(labels), 2);
  }
  IdentityReport report;
  for (const Labeling& truth : all) {
    for (const Labeling& sigma : all) {
      const SplitMergeCounts c = SplitMerge(truth, sigma);
      ++report.pairs_checked;
      if (c.alpha + c.gamma != static_cast<int64_t>(c.m) * (n - c.m)) {
        ++report.violations;
      }
    }
  }
  return report;
}

void VerificationLog::Add(VerificationRecord record) {
  records_.push_back(std::move(record));
}

int64_t VerificationLog::failures() const {
  return std::count_if(records_.begin(), records_.end(),
                       [](const VerificationRecord& r) { return !r.pass; });
}

void VerificationLog::WriteCsv(std::ostream& out) const {
  out << "lemma,instance,lhs,rhs,margin,pass\n";
  char buf[160];
  for (const VerificationRecord& r : records_) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,", r.lhs, r.rhs,
                  r.margin());
    out << r.lemma << ',' << r.instance << ',' << buf
        << (r.pass ? "true" : "false") << '\n';
  }
}

void VerificationLog::WriteJUnitXml(std::ostream& out) const {
  namespace pt = boost::property_tree;
  std::map<std::string, std::vector<const VerificationRecord*>> by_lemma;
  for (const VerificationRecord& r : records_) by_lemma[r.lemma].push_back(&r);

  pt::ptree root;
  pt::ptree& suites = root.add("testsuites", "");
  suites.put("<xmlattr>.tests", records_.size());
  suites.put("<xmlattr>.failures", failures());
  for (const auto& [lemma, records] : by_lemma) {
    pt::ptree& suite = suites.add("testsuite", "");
    int64_t failed = 0;
    for (const VerificationRecord* r : records) failed += !r->pass;
    suite.put("<xmlattr>.name", lemma);
    suite.put("<xmlattr>.tests", records.size());
    suite.put("<xmlattr>.failures", failed);
    for (const VerificationRecord* r : records) {
      pt::ptree& tc = suite.add("testcase", "");
      tc.put("<xmlattr>.classname", lemma);
      tc.put("<xmlattr>.name", r->instance);
      if (!r->pass) {
        pt::ptree& failure = tc.add("failure", "");
        failure.put("<xmlattr>.message",
                    absl::StrCat("lhs ", r->lhs, " exceeds rhs ", r->rhs));
      }
    }
  }
  pt::write_xml(out, root, pt::xml_writer_make_settings<std::string>(' ', 2));
}

absl::Status RunVerificationSuite(const VerifySuiteConfig& cfg,
                                  VerificationLog& log) {
  const SbmParams& params = cfg.params;
  const int n = params.n();
  const int k = params.num_communities();
  absl::StatusOr<std::vector<Labeling>> support =
      EnumerateBalanced(params.balance());
  if (!support.ok()) return support.status();

  absl::StatusOr<double> admissible = PenaltyLambda(params, cfg.w);
  if (!admissible.ok()) return admissible.status();
  const double tail_lambda = cfg.lambda_override.value_or(*admissible);

  for (const Labeling& truth : *support) {
    for (const Labeling& sigma : *support) {
      absl::StatusOr<std::vector<TailBoundCheck>> checks =
          ChernoffBoundCheck(params, tail_lambda, truth, sigma, cfg.s_grid);
      if (!checks.ok()) return checks.status();
      for (const TailBoundCheck& c : *checks) {
        const std::string instance =
            absl::StrCat("truth=", LabelString(truth),
                         " sigma=", LabelString(sigma), " s=", c.slack_s);
        log.Add({"chernoff_slack", instance, c.lhs, c.rhs, c.pass});
        if (n > 5) continue;
        absl::StatusOr<double> by_graphs = TailProbabilityByGraphEnumeration(
            params, tail_lambda, truth, sigma, c.slack_s);
        if (!by_graphs.ok()) return by_graphs.status();
        const double diff = std::abs(*by_graphs - c.lhs);
        log.Add({"bernoulli_reduction", instance, diff, kLemmaTolerance,
                 diff <= kLemmaTolerance});
      }
    }
  }

  if (k == 2 && n <= 10) {
    absl::StatusOr<IdentityReport> identity = CheckTwoCommunityIdentity(n);
    if (!identity.ok()) return identity.status();
    log.Add({"two_community_identity",
             absl::StrCat("n=", n, " pairs=", identity->pairs_checked),
             static_cast<double>(identity->violations), 0.0,
             identity->violations == 0});
  }
  if (k >= 3) {
    absl::StatusOr<SplitMergeBoundReport> split =
        CheckSplitMergeLowerBound(params.balance());
    if (!split.ok()) return split.status();
    log.Add({"split_merge_lower_bound",
             absl::StrCat("n=", n, " K=", k, " beta=", params.beta(),
                          " worst_sigma=", LabelString(split->worst_sigma)),
             split->worst_bound, split->worst_value, split->pass});
  }

  const Labeling& truth = support->front();
  absl::StatusOr<OrbitCensus> census =
      ComputeOrbitCensus(params.balance(), truth);
  if (!census.ok()) return census.status();
  for (int m = 0; m <= n; ++m) {
    const double count = static_cast<double>(census->counts[m]);
    const double bound = std::exp(census->log_bounds[m]);
    log.Add({"orbit_counting",
             absl::StrCat("truth=", LabelString(truth), " m=", m), count, bound,
             count <= bound * (1.0 + kLemmaTolerance)});
  }
  log.Add({"orbit_total", absl::StrCat("truth=", LabelString(truth)),
           static_cast<double>(census->sigma_size),
           static_cast<double>(census->sigma_size), census->total_pass});

  for (int g = 0; g < cfg.peeling_graphs; ++g) {
    Rng rng(cfg.seed, StreamId(g));
    const Graph graph = SampleSbmWith(params, truth, rng);
    for (double epsilon : cfg.epsilons) {
      absl::StatusOr<DegreeEnvelope> env =
          DegreeEnvelope::ForParams(params, cfg.envelope_c);
      if (!env.ok()) return env.status();
      MechanismConfig mech(epsilon, *env);
      mech.w = cfg.w;
      absl::StatusOr<double> lambda = EstimatorLambda(mech, params);
      if (!lambda.ok()) return lambda.status();
      const ScoreContext ctx(graph, *lambda);
      absl::StatusOr<EmDistribution> dist =
          ComputeEmDistribution(ctx, mech, params);
      if (!dist.ok()) return dist.status();
      const auto [lo, hi] =
          std::minmax_element(dist->scores.begin(), dist->scores.end());
      const double range = *hi - *lo;
      if (range <= 0.0) continue;
      for (int i = 1; i <= cfg.peeling_grid_points; ++i) {
        const double s = range * i / cfg.peeling_grid_points;
        const PeelingCheck c = PeelingBoundCheck(*dist, mech.eta(), s);
        const std::string instance =
            absl::StrCat("graph=", g, " epsilon=", epsilon, " s=", s);
        log.Add(
            {"peeling", instance, c.exact_lhs, c.stated_rhs, c.stated_pass});
        log.Add({"peeling_shifted", instance, c.exact_lhs, c.shifted_rhs,
                 c.shifted_pass});
      }
    }
  }
  return absl::OkStatus();
}

}  // namespace nodedp
