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
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "boost/property_tree/ptree.hpp"
#include "boost/property_tree/xml_parser.hpp"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "nodedp/info_quantities.h"
#include "nodedp/rng.h"
#include "test_util.h"

namespace nodedp {
namespace {

using ::nodedp::testing::G;
using ::nodedp::testing::L;
using ::nodedp::testing::Params;
using ::testing::ElementsAre;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Independent oracle: split/merge counts and the tail probability summed over
// binomial counts (x merge edges, y split edges) in long double.
struct PairCounts {
  int alpha = 0;
  int gamma = 0;
};

PairCounts CountPairs(const Labeling& truth, const Labeling& sigma) {
  PairCounts c;
  for (int i = 0; i < truth.size(); ++i) {
    for (int j = i + 1; j < truth.size(); ++j) {
      const bool t = truth[i] == truth[j];
      const bool s = sigma[i] == sigma[j];
      c.alpha += t && !s;
      c.gamma += !t && s;
    }
  }
  return c;
}

long double Choose(int n, int k) {
  long double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double BinomialTail(double p, double q, double lambda, const Labeling& truth,
                    const Labeling& sigma, double s) {
  const PairCounts c = CountPairs(truth, sigma);
  long double total = 0;
  for (int x = 0; x <= c.gamma; ++x) {
    for (int y = 0; y <= c.alpha; ++y) {
      const long double gap =
          static_cast<long double>(x - y) - lambda * (c.gamma - c.alpha);
      if (gap < -s - 1e-9L) continue;
      total += Choose(c.gamma, x) * std::pow((long double)q, x) *
               std::pow(1.0L - q, c.gamma - x) * Choose(c.alpha, y) *
               std::pow((long double)p, y) * std::pow(1.0L - p, c.alpha - y);
    }
  }
  return static_cast<double>(total);
}

// Orbit distance by explicit permutation search.
int BruteDistance(const Labeling& truth, const Labeling& sigma) {
  std::vector<int> perm(truth.num_communities());
  std::iota(perm.begin(), perm.end(), 0);
  int best = truth.size();
  do {
    int d = 0;
    for (int i = 0; i < truth.size(); ++i) d += perm[sigma[i]] != truth[i];
    best = std::min(best, d);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

TEST(TailEventTest, ToleratesRoundingAtTheBoundary) {
  EXPECT_TRUE(TailEventHolds(0, 0, 0.5, 0.0));
  EXPECT_TRUE(TailEventHolds(-1, 0, 0.5, 1.0));
  EXPECT_FALSE(TailEventHolds(-2, 0, 0.5, 1.0));
  // 1 - 0.1 * 10 is not exactly 0 in floating point.
  EXPECT_TRUE(TailEventHolds(1, 10, 0.1, 0.0));
}

TEST(ExactTailTest, InfiniteSlackIsCertain) {
  const SbmParams params = Params(4, 2, 2, 1, 1);
  ASSERT_OK_AND_ASSIGN(double p,
                       ExactTailProbability(params, 0.4, L({1, 1, 2, 2}, 2),
                                            L({1, 2, 1, 2}, 2), kInf));
  EXPECT_EQ(p, 1.0);
}

TEST(ExactTailTest, SamePartitionIsDegenerate) {
  const SbmParams params = Params(4, 2, 2, 1, 1);
  const Labeling truth = L({1, 1, 2, 2}, 2);
  const Labeling swapped = L({2, 2, 1, 1}, 2);
  for (double s : {0.0, 0.5, 3.0}) {
    ASSERT_OK_AND_ASSIGN(double p,
                         ExactTailProbability(params, 0.4, truth, swapped, s));
    EXPECT_EQ(p, 1.0);
  }
}

TEST(ExactTailTest, FourVertexExampleMatchesThreeIndependentPaths) {
  const SbmParams params = Params(4, 2, 2, 1, 1);
  const Labeling truth = L({1, 1, 2, 2}, 2);
  const Labeling sigma = L({1, 2, 2, 2}, 2);
  const PairCounts c = CountPairs(truth, sigma);
  ASSERT_EQ(c.alpha, 1);
  ASSERT_EQ(c.gamma, 2);
  ASSERT_OK_AND_ASSIGN(const double lambda, PenaltyLambda(params));

  ASSERT_OK_AND_ASSIGN(double exact,
                       ExactTailProbability(params, lambda, truth, sigma, 0.0));
  // Hand enumeration of the 2^3 outcomes: the gap X1 + X2 - Y - lambda is
  // >= 0 iff X1 + X2 - Y >= 1 (lambda in (0, 1)).
  const double p = 0.5, q = 0.25;
  double hand = 0.0;
  for (int mask = 0; mask < 8; ++mask) {
    const int x1 = mask & 1, x2 = (mask >> 1) & 1, y = (mask >> 2) & 1;
    if (x1 + x2 - y < 1) continue;
    hand += (x1 ? q : 1 - q) * (x2 ? q : 1 - q) * (y ? p : 1 - p);
  }
  EXPECT_NEAR(exact, hand, 1e-15);
  EXPECT_NEAR(exact, BinomialTail(p, q, lambda, truth, sigma, 0.0), 1e-15);

  ASSERT_OK_AND_ASSIGN(
      double by_graphs,
      TailProbabilityByGraphEnumeration(params, lambda, truth, sigma, 0.0));
  EXPECT_NEAR(exact, by_graphs, 1e-12);

  constexpr int kReplicates = 1'000'000;
  Rng rng(20260101);
  int64_t hits = 0;
  for (int r = 0; r < kReplicates; ++r) {
    const ScoreContext ctx(SampleSbmWith(params, truth, rng), lambda);
    hits += Score(ctx, sigma) >= Score(ctx, truth) - 1e-9;
  }
  const double freq = static_cast<double>(hits) / kReplicates;
  const double se = std::sqrt(exact * (1 - exact) / kReplicates);
  EXPECT_NEAR(freq, exact, 3 * se);
}

TEST(ExactTailTest, MatchesBinomialOracleOnRandomPairs) {
  const SbmParams params = Params(8, 2, 5, 2, 1.5);
  ASSERT_OK_AND_ASSIGN(auto support, EnumerateBalanced(params.balance()));
  ASSERT_OK_AND_ASSIGN(const double lambda, PenaltyLambda(params));
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Labeling& truth = support[rng.UniformInt(support.size())];
    const Labeling& sigma = support[rng.UniformInt(support.size())];
    const double s = 3.0 * rng.Uniform();
    ASSERT_OK_AND_ASSIGN(double exact,
                         ExactTailProbability(params, lambda, truth, sigma, s));
    EXPECT_NEAR(exact,
                BinomialTail(params.p(), params.q(), lambda, truth, sigma, s),
                1e-13);
  }
}

TEST(ExactTailTest, RejectsTooManyPairs) {
  const SbmParams params = Params(12, 2, 5, 2, 1);
  const Labeling truth = L({1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2}, 2);
  const Labeling sigma = L({1, 1, 1, 2, 2, 2, 1, 1, 1, 2, 2, 2}, 2);
  auto p = ExactTailProbability(params, 0.3, truth, sigma, 0.0);
  EXPECT_EQ(p.status().code(), absl::StatusCode::kResourceExhausted);
}

TEST(BernoulliReductionTest, OutcomeAndGraphEnumerationAgree) {
  for (const auto& [n, beta] :
       std::vector<std::pair<int, double>>{{4, 1.0}, {5, 1.25}}) {
    const SbmParams params = Params(n, 2, 2.5, 1, beta);
    ASSERT_OK_AND_ASSIGN(auto support, EnumerateBalanced(params.balance()));
    ASSERT_OK_AND_ASSIGN(const double lambda, PenaltyLambda(params));
    for (const Labeling& truth : support) {
      for (const Labeling& sigma : support) {
        for (double s : {0.0, 0.5, 1.7}) {
          ASSERT_OK_AND_ASSIGN(
              double a, ExactTailProbability(params, lambda, truth, sigma, s));
          ASSERT_OK_AND_ASSIGN(double b, TailProbabilityByGraphEnumeration(
                                             params, lambda, truth, sigma, s));
          EXPECT_NEAR(a, b, 1e-12);
        }
      }
    }
  }
}

TEST(ChernoffBoundTest, ExhaustiveAtFourVertices) {
  const SbmParams params = Params(4, 2, 2, 1, 1);
  ASSERT_OK_AND_ASSIGN(auto support, EnumerateBalanced(params.balance()));
  ASSERT_OK_AND_ASSIGN(const double lambda, PenaltyLambda(params));
  ASSERT_OK_AND_ASSIGN(const double t_star, ChernoffTilt(params));
  const double renyi = RenyiHalf(params);
  for (const Labeling& truth : support) {
    for (const Labeling& sigma : support) {
      ASSERT_OK_AND_ASSIGN(auto checks,
                           ChernoffBoundCheck(params, lambda, truth, sigma,
                                              {0.0, 0.5, 1.0, 2.0}));
      const PairCounts c = CountPairs(truth, sigma);
      for (const TailBoundCheck& check : checks) {
        EXPECT_TRUE(check.pass) << check.lhs << " > " << check.rhs;
        EXPECT_NEAR(check.rhs,
                    std::exp(-renyi * std::min(c.alpha, c.gamma) +
                             t_star * check.slack_s),
                    1e-15);
      }
    }
  }
}

TEST(ChernoffBoundTest, LargeSlackIsTrivial) {
  const SbmParams params = Params(6, 2, 4, 1, 1);
  ASSERT_OK_AND_ASSIGN(const double lambda, PenaltyLambda(params));
  ASSERT_OK_AND_ASSIGN(
      auto checks, ChernoffBoundCheck(params, lambda, L({1, 1, 1, 2, 2, 2}, 2),
                                      L({1, 2, 1, 2, 1, 2}, 2), {100.0}));
  EXPECT_GE(checks[0].rhs, 1.0);
  EXPECT_TRUE(checks[0].pass);
}

TEST(ChernoffBoundTest, PenaltyFarOutsideTheIntervalBreaksTheBound) {
  const SbmParams params = Params(6, 2, 5, 1, 1.5);
  ASSERT_OK_AND_ASSIGN(auto support, EnumerateBalanced(params.balance()));
  ASSERT_OK_AND_ASSIGN(const double lambda, PenaltyLambda(params));
  int admissible_failures = 0;
  int mutated_failures = 0;
  for (const Labeling& truth : support) {
    for (const Labeling& sigma : support) {
      ASSERT_OK_AND_ASSIGN(auto good, ChernoffBoundCheck(params, lambda, truth,
                                                         sigma, {0.0, 1.0}));
      ASSERT_OK_AND_ASSIGN(
          auto bad, ChernoffBoundCheck(params, 3.0, truth, sigma, {0.0, 1.0}));
      for (const auto& c : good) admissible_failures += !c.pass;
      for (const auto& c : bad) mutated_failures += !c.pass;
    }
  }
  EXPECT_EQ(admissible_failures, 0);
  EXPECT_GT(mutated_failures, 0);
}

TEST(ChernoffBoundTest, RequiresOrderedProbabilities) {
  const SbmParams params = Params(4, 2, 2, 2, 1);
  auto checks = ChernoffBoundCheck(params, 0.5, L({1, 1, 2, 2}, 2),
                                   L({1, 2, 1, 2}, 2), {0.0});
  EXPECT_EQ(checks.status().code(), absl::StatusCode::kFailedPrecondition);
}

TEST(NearOptimalSetsTest, ProfileMatchesDefinition) {
  const SbmParams params = Params(6, 2, 4, 1, 1);
  const Graph g = G(6, {{1, 2}, {1, 3}, {2, 3}, {4, 5}, {3, 4}, {5, 6}});
  ASSERT_OK_AND_ASSIGN(const double lambda, PenaltyLambda(params));
  const ScoreContext ctx(g, lambda);
  const std::vector<double> grid = {0.0, 0.3, 0.7, 1.0, 1.5,
                                    2.0, 3.0, 5.0, 50.0};
  ASSERT_OK_AND_ASSIGN(NearOptimalProfile profile,
                       NearOptimalSets(ctx, params, grid));
  ASSERT_OK_AND_ASSIGN(auto support, EnumerateBalanced(params.balance()));
  double top = -kInf;
  for (const Labeling& s : support) top = std::max(top, Score(ctx, s));
  ASSERT_EQ(profile.set_sizes.size(), grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    int64_t direct = 0;
    for (const Labeling& s : support) {
      direct += Score(ctx, s) >= top - grid[i] - 1e-9;
    }
    EXPECT_EQ(profile.set_sizes[i], direct) << grid[i];
    if (i > 0) EXPECT_GE(profile.set_sizes[i], profile.set_sizes[i - 1]);
  }
  EXPECT_GE(profile.set_sizes.front(), 1);
  EXPECT_EQ(profile.set_sizes.back(), profile.sigma_size);
  EXPECT_EQ(profile.sigma_size, 20);
  EXPECT_NEAR(profile.max_score, top, 1e-12);
}

TEST(NearOptimalSetsTest, ZeroSlackCountsMaximizers) {
  // The empty graph scores every labeling of equal class sizes identically.
  const SbmParams params = Params(4, 2, 2, 1, 1);
  const ScoreContext ctx(Graph(4), 0.4);
  ASSERT_OK_AND_ASSIGN(NearOptimalProfile profile,
                       NearOptimalSets(ctx, params, {0.0}));
  EXPECT_THAT(profile.set_sizes, ElementsAre(6));
  EXPECT_EQ(profile.score_range, 0.0);
}

TEST(PeelingTest, HoldsAtTheEstimatorTemperature) {
  const SbmParams params = Params(6, 2, 3, 1, 1);
  ASSERT_OK_AND_ASSIGN(auto support, EnumerateBalanced(params.balance()));
  ASSERT_OK_AND_ASSIGN(auto env, DegreeEnvelope::ForParams(params, 10.0));
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Graph g = SampleSbmWith(params, support[0], rng);
    for (double epsilon : {1.0, 20.0, 100.0}) {
      const MechanismConfig cfg(epsilon, env);
      ASSERT_OK_AND_ASSIGN(const double lambda, EstimatorLambda(cfg, params));
      const ScoreContext ctx(g, lambda);
      for (double s : {0.2, 0.5, 1.0, 2.0, 4.0}) {
        ASSERT_OK_AND_ASSIGN(PeelingCheck c,
                             PeelingBoundCheck(ctx, cfg, params, s));
        EXPECT_TRUE(c.stated_pass);
        EXPECT_TRUE(c.shifted_pass);
        EXPECT_GE(c.shifted_rhs, c.stated_rhs);
      }
    }
  }
}

TEST(PeelingTest, ZeroTemperatureGivesTheUniformFraction) {
  const SbmParams params = Params(6, 2, 3, 1, 1);
  const ScoreContext ctx(G(6, {{1, 2}, {2, 3}, {4, 6}}), 0.3);
  ASSERT_OK_AND_ASSIGN(auto support, EnumerateBalanced(params.balance()));
  const std::vector<double> scores = ScoreAll(ctx, support);
  ASSERT_OK_AND_ASSIGN(EmDistribution dist, EmFromScores(support, scores, 0.0));
  const double top = *std::max_element(scores.begin(), scores.end());
  const double s = 0.6;
  const double below =
      std::count_if(scores.begin(), scores.end(),
                    [&](double t) { return t <= top - s + 1e-9; }) /
      static_cast<double>(scores.size());
  const PeelingCheck c = PeelingBoundCheck(dist, 0.0, s);
  EXPECT_NEAR(c.exact_lhs, below, 1e-15);
  EXPECT_EQ(c.stated_rhs, kInf);
  EXPECT_TRUE(c.stated_pass);
}

TEST(PeelingTest, SlackBeyondTheRangeLeavesNothingBelow) {
  const SbmParams params = Params(6, 2, 3, 1, 1);
  const ScoreContext ctx(G(6, {{1, 2}, {2, 3}, {4, 6}}), 0.3);
  ASSERT_OK_AND_ASSIGN(auto support, EnumerateBalanced(params.balance()));
  ASSERT_OK_AND_ASSIGN(EmDistribution dist,
                       EmFromScores(support, ScoreAll(ctx, support), 0.8));
  const PeelingCheck c = PeelingBoundCheck(dist, 0.8, 100.0);
  EXPECT_EQ(c.exact_lhs, 0.0);
  EXPECT_TRUE(c.stated_pass);
  // Closed-form tail only: 20 e^{-80} / (1 - e^{-80}).
  EXPECT_NEAR(c.stated_rhs, 20 * std::exp(-80.0), 1e-40);
}

TEST(PeelingTest, StatedLayerIndexFailsAtHighTemperature) {
  // Counterexample to sum_l |S_{l s}| e^{-eta l s}; the shifted sum holds.
  const SbmParams params = Params(6, 2, 3, 1, 1);
  ASSERT_OK_AND_ASSIGN(auto support, EnumerateBalanced(params.balance()));
  ASSERT_OK_AND_ASSIGN(const double lambda, PenaltyLambda(params));
  const ScoreContext ctx(G(6, {{2, 4}, {4, 6}}), lambda);
  ASSERT_OK_AND_ASSIGN(EmDistribution dist,
                       EmFromScores(support, ScoreAll(ctx, support), 3.0));
  const PeelingCheck c = PeelingBoundCheck(dist, 3.0, 0.9);
  EXPECT_FALSE(c.stated_pass);
  EXPECT_TRUE(c.shifted_pass);
  EXPECT_NEAR(c.exact_lhs, 0.234396, 1e-6);
}

TEST(OrbitCensusTest, FourVertexCounts) {
  ASSERT_OK_AND_ASSIGN(BalanceSpec spec, BalanceSpec::Create(4, 2, 1.0));
  ASSERT_OK_AND_ASSIGN(OrbitCensus census,
                       ComputeOrbitCensus(spec, L({1, 1, 2, 2}, 2)));
  EXPECT_THAT(census.counts, ElementsAre(1, 0, 2, 0, 0));
  EXPECT_EQ(census.orbit_size, 2);
  EXPECT_EQ(census.sigma_size, 6);
  EXPECT_TRUE(census.bounds_pass);
  EXPECT_TRUE(census.total_pass);
}

TEST(OrbitCensusTest, MatchesBruteForceOrbitGrouping) {
  for (const auto& [n, k, beta] : std::vector<std::tuple<int, int, double>>{
           {6, 2, 1.5}, {6, 3, 1.25}, {8, 2, 1.0}, {8, 3, 1.5}}) {
    ASSERT_OK_AND_ASSIGN(BalanceSpec spec, BalanceSpec::Create(n, k, beta));
    ASSERT_OK_AND_ASSIGN(auto support, EnumerateBalanced(spec));
    const Labeling& truth = support[support.size() / 3];
    // Group by the full orbit set, built by applying every permutation.
    std::set<std::vector<int>> seen;
    std::vector<int64_t> counts(n + 1, 0);
    std::vector<int> perm(k);
    for (const Labeling& sigma : support) {
      if (seen.count(sigma.labels())) continue;
      std::iota(perm.begin(), perm.end(), 0);
      do {
        seen.insert(sigma.Permuted(perm).labels());
      } while (std::next_permutation(perm.begin(), perm.end()));
      ++counts[BruteDistance(truth, sigma)];
    }
    ASSERT_OK_AND_ASSIGN(OrbitCensus census, ComputeOrbitCensus(spec, truth));
    EXPECT_EQ(census.counts, counts) << n << " " << k;
    EXPECT_EQ(census.counts[0], 1);
    EXPECT_TRUE(census.bounds_pass);
    EXPECT_TRUE(census.total_pass);
    for (int m = 1; m <= n; ++m) {
      const double direct = std::min(std::pow(std::exp(1.0) * n * k / m, m),
                                     std::pow(double(k), n));
      EXPECT_NEAR(std::exp(census.log_bounds[m]), direct, 1e-9 * direct);
    }
  }
}

TEST(OrbitCensusTest, CanonicalRepresentativeRenumbersByFirstOccurrence) {
  EXPECT_EQ(CanonicalOrbitRepresentative(L({3, 1, 3, 2}, 3)),
            L({1, 2, 1, 3}, 3));
  EXPECT_EQ(OrbitCountLogBound(10, 2, 0), 0.0);
}

TEST(SplitMergeTest, BranchBoundFormula) {
  // m = 1 <= 9 / (2 * 3) takes the small-m branch: 9/3 - 1.
  EXPECT_DOUBLE_EQ(SplitMergeBranchBound(9, 3, 1.0, 1), 2.0);
  // m = 3 takes the large-m branch: (5 - 3)/36 * 27 / 3.
  EXPECT_DOUBLE_EQ(SplitMergeBranchBound(9, 3, 1.0, 3), 0.5);
}

TEST(SplitMergeTest, HoldsAgainstDirectPairCounts) {
  for (double beta : {1.0, 1.1, 1.25}) {
    ASSERT_OK_AND_ASSIGN(BalanceSpec spec, BalanceSpec::Create(9, 3, beta));
    ASSERT_OK_AND_ASSIGN(auto support, EnumerateBalanced(spec));
    const Labeling& truth = support.front();
    const double c_beta = (5 - 3 * beta * beta) / (36 * beta);
    for (const Labeling& sigma : support) {
      const PairCounts c = CountPairs(truth, sigma);
      const int m = BruteDistance(truth, sigma);
      const double bound = m <= 9 / (2 * beta * 3)
                               ? 9.0 * m / (beta * 3) - m * m
                               : c_beta * 9 * m / 3;
      EXPECT_GE(std::min(c.alpha, c.gamma), bound - 1e-12);
    }
    ASSERT_OK_AND_ASSIGN(SplitMergeBoundReport report,
                         CheckSplitMergeLowerBound(spec));
    EXPECT_TRUE(report.pass) << beta;
    EXPECT_EQ(report.pairs_checked,
              static_cast<int64_t>(support.size() * support.size()));
  }
}

TEST(SplitMergeTest, RejectsTwoCommunitiesAndWideBalance) {
  ASSERT_OK_AND_ASSIGN(BalanceSpec k2, BalanceSpec::Create(6, 2, 1.0));
  EXPECT_FALSE(CheckSplitMergeLowerBound(k2).ok());
  ASSERT_OK_AND_ASSIGN(BalanceSpec wide, BalanceSpec::Create(9, 3, 1.3));
  EXPECT_FALSE(CheckSplitMergeLowerBound(wide).ok());
}

TEST(TwoCommunityIdentityTest, HoldsForAllLabelings) {
  for (int n = 2; n <= 8; ++n) {
    ASSERT_OK_AND_ASSIGN(IdentityReport report, CheckTwoCommunityIdentity(n));
    EXPECT_EQ(report.violations, 0) << n;
    EXPECT_EQ(report.pairs_checked, int64_t{1} << (2 * n));
  }
}

TEST(VerificationLogTest, CsvAndJUnitOutput) {
  VerificationLog log;
  log.Add({"chernoff_slack", "a", 0.25, 0.5, true});
  log.Add({"chernoff_slack", "b", 0.75, 0.5, false});
  log.Add({"peeling", "c", 0.0, 1.0, true});
  EXPECT_EQ(log.failures(), 1);
  EXPECT_FALSE(log.pass());

  std::ostringstream csv;
  log.WriteCsv(csv);
  EXPECT_EQ(csv.str(),
            "lemma,instance,lhs,rhs,margin,pass\n"
            "chernoff_slack,a,0.25,0.5,0.25,true\n"
            "chernoff_slack,b,0.75,0.5,-0.25,false\n"
            "peeling,c,0,1,1,true\n");

  std::ostringstream xml;
  log.WriteJUnitXml(xml);
  std::istringstream in(xml.str());
  boost::property_tree::ptree tree;
  boost::property_tree::read_xml(in, tree);
  const auto& suites = tree.get_child("testsuites");
  EXPECT_EQ(suites.get<int>("<xmlattr>.tests"), 3);
  EXPECT_EQ(suites.get<int>("<xmlattr>.failures"), 1);
  int num_suites = 0, num_failures = 0;
  for (const auto& [tag, suite] : suites) {
    if (tag != "testsuite") continue;
    ++num_suites;
    for (const auto& [case_tag, tc] : suite) {
      if (case_tag == "testcase") num_failures += tc.count("failure");
    }
  }
  EXPECT_EQ(num_suites, 2);
  EXPECT_EQ(num_failures, 1);
}

TEST(VerificationSuiteTest, PassesOnAdmissiblePenalty) {
  VerifySuiteConfig cfg(Params(4, 2, 2, 1, 1));
  VerificationLog log;
  ASSERT_OK(RunVerificationSuite(cfg, log));
  EXPECT_TRUE(log.pass());
  std::set<std::string> lemmas;
  for (const auto& r : log.records()) lemmas.insert(r.lemma);
  EXPECT_THAT(lemmas, ::testing::IsSupersetOf(
                          {"chernoff_slack", "bernoulli_reduction",
                           "two_community_identity", "orbit_counting",
                           "orbit_total", "peeling", "peeling_shifted"}));
}

TEST(VerificationSuiteTest, ThreeCommunityInstanceChecksSplitMerge) {
  VerifySuiteConfig cfg(Params(6, 3, 4, 1, 1));
  cfg.w = 0.5;
  cfg.peeling_graphs = 1;
  VerificationLog log;
  ASSERT_OK(RunVerificationSuite(cfg, log));
  EXPECT_TRUE(log.pass());
  EXPECT_TRUE(std::any_of(log.records().begin(), log.records().end(),
                          [](const VerificationRecord& r) {
                            return r.lemma == "split_merge_lower_bound";
                          }));
}

TEST(VerificationSuiteTest, MutatedPenaltyFails) {
  VerifySuiteConfig cfg(Params(6, 2, 5, 1, 1.5));
  cfg.lambda_override = 3.0;
  cfg.peeling_graphs = 0;
  VerificationLog log;
  ASSERT_OK(RunVerificationSuite(cfg, log));
  EXPECT_FALSE(log.pass());
}

}  // namespace
}  // namespace nodedp
