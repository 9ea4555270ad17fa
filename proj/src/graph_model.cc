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

#include "nodedp/graph_model.h"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <numeric>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "nodedp/assignment.h"
#include "nodedp/rng.h"

namespace nodedp {
namespace {

constexpr double kWindowSlack = 1e-9;

}  // namespace

// ---------------------------------------------------------------------------
// Graph

Graph::Graph(int num_vertices)
    : n_(num_vertices), bits_((NumPairs(num_vertices) + 63) / 64, 0) {}

int64_t Graph::PairIndex(int num_vertices, int i, int j) {
  if (i > j) std::swap(i, j);
  return static_cast<int64_t>(i) * (2 * num_vertices - i - 1) / 2 + (j - i - 1);
}

absl::StatusOr<Graph> Graph::FromEdges(
    int num_vertices, std::span<const std::pair<int, int>> edges) {
  if (num_vertices < 0) {
    return absl::InvalidArgumentError("negative vertex count");
  }
  Graph g(num_vertices);
  for (const auto& [i, j] : edges) {
    if (i < 0 || j < 0 || i >= num_vertices || j >= num_vertices) {
      return absl::InvalidArgumentError(
          absl::StrCat("edge endpoint out of range: {", i, ",", j, "}"));
    }
    if (i == j) {
      return absl::InvalidArgumentError(
          absl::StrCat("self-loop at vertex ", i));
    }
    g.SetEdge(i, j, true);
  }
  return g;
}

Graph Graph::FromPairMask(int num_vertices, uint64_t mask) {
  assert(NumPairs(num_vertices) <= 64);
  Graph g(num_vertices);
  if (!g.bits_.empty()) g.bits_[0] = mask;
  return g;
}

uint64_t Graph::PairMask() const {
  assert(NumPairs(n_) <= 64);
  return bits_.empty() ? 0 : bits_[0];
}

bool Graph::HasEdge(int i, int j) const {
  if (i == j) return false;
  const int64_t k = PairIndex(n_, i, j);
  return (bits_[k >> 6] >> (k & 63)) & 1;
}

void Graph::SetEdge(int i, int j, bool present) {
  assert(i != j);
  const int64_t k = PairIndex(n_, i, j);
  const uint64_t bit = uint64_t{1} << (k & 63);
  if (present) {
    bits_[k >> 6] |= bit;
  } else {
    bits_[k >> 6] &= ~bit;
  }
}

void Graph::FlipEdge(int i, int j) {
  assert(i != j);
  const int64_t k = PairIndex(n_, i, j);
  bits_[k >> 6] ^= uint64_t{1} << (k & 63);
}

int Graph::Degree(int v) const {
  int degree = 0;
  for (int u = 0; u < n_; ++u) {
    if (u != v && HasEdge(u, v)) ++degree;
  }
  return degree;
}

int Graph::MaxDegree() const {
  std::vector<int> degree(n_, 0);
  for (const auto& [i, j] : Edges()) {
    ++degree[i];
    ++degree[j];
  }
  return degree.empty() ? 0 : *std::max_element(degree.begin(), degree.end());
}

int64_t Graph::NumEdges() const {
  int64_t count = 0;
  for (uint64_t word : bits_) count += std::popcount(word);
  return count;
}

std::vector<std::pair<int, int>> Graph::Edges() const {
  std::vector<std::pair<int, int>> edges;
  int64_t k = 0;
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j, ++k) {
      if ((bits_[k >> 6] >> (k & 63)) & 1) edges.emplace_back(i, j);
    }
  }
  return edges;
}

// ---------------------------------------------------------------------------
// Labeling

absl::StatusOr<Labeling> Labeling::Create(std::vector<int> labels,
                                          int num_communities) {
  if (num_communities < 1) {
    return absl::InvalidArgumentError("number of communities must be >= 1");
  }
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_communities) {
      return absl::InvalidArgumentError(
          absl::StrCat("label of vertex ", i, " is ", labels[i],
                       ", outside [0, ", num_communities, ")"));
    }
  }
  return Labeling(std::move(labels), num_communities);
}

std::vector<int> Labeling::ClassCounts() const {
  std::vector<int> counts(num_communities_, 0);
  for (int label : labels_) ++counts[label];
  return counts;
}

Labeling Labeling::WithLabel(int vertex, int label) const {
  Labeling out = *this;
  out.labels_[vertex] = label;
  return out;
}

Labeling Labeling::Permuted(std::span<const int> perm) const {
  Labeling out = *this;
  for (int& label : out.labels_) label = perm[label];
  return out;
}

Labeling MostBalancedLabeling(int num_vertices, int num_communities) {
  std::vector<int> labels(num_vertices);
  for (int i = 0; i < num_vertices; ++i) labels[i] = i % num_communities;
  return Labeling(std::move(labels), num_communities);
}

// ---------------------------------------------------------------------------
// BalanceSpec / SbmParams

absl::StatusOr<BalanceSpec> BalanceSpec::Create(int num_vertices,
                                                int num_communities,
                                                double beta) {
  if (num_vertices < 1) {
    return absl::InvalidArgumentError("n must be >= 1");
  }
  if (num_communities < 2) {
    return absl::InvalidArgumentError("K must be >= 2");
  }
  if (!(beta >= 1.0) || !std::isfinite(beta)) {
    return absl::InvalidArgumentError("beta must be a finite value >= 1");
  }
  return BalanceSpec(num_vertices, num_communities, beta);
}

double BalanceSpec::LowerBound() const { return n_ / (beta_ * k_); }
double BalanceSpec::UpperBound() const { return beta_ * n_ / k_; }

bool BalanceSpec::AdmitsCount(int count) const {
  return count >= LowerBound() - kWindowSlack &&
         count <= UpperBound() + kWindowSlack;
}

bool BalanceSpec::IsNonEmpty() const {
  const int lo = static_cast<int>(std::ceil(LowerBound() - kWindowSlack));
  const int hi = static_cast<int>(std::floor(UpperBound() + kWindowSlack));
  if (lo > hi) return false;
  return static_cast<int64_t>(lo) * k_ <= n_ &&
         static_cast<int64_t>(hi) * k_ >= n_;
}

absl::StatusOr<SbmParams> SbmParams::Create(int num_vertices,
                                            int num_communities, double a,
                                            double b, double beta) {
  if (num_vertices < 2) return absl::InvalidArgumentError("n must be >= 2");
  if (!std::isfinite(a) || !std::isfinite(b)) {
    return absl::InvalidArgumentError("a and b must be finite");
  }
  if (b < 0 || a < b) {
    return absl::InvalidArgumentError(
        absl::StrCat("need 0 <= b <= a, got a=", a, " b=", b));
  }
  if (a > num_vertices) {
    return absl::InvalidArgumentError(absl::StrCat(
        "InvalidProbability: a/n = ", a / num_vertices, " exceeds 1"));
  }
  auto balance = BalanceSpec::Create(num_vertices, num_communities, beta);
  if (!balance.ok()) return balance.status();
  if (num_communities >= 3 && !(beta < std::sqrt(5.0 / 3.0))) {
    return absl::InvalidArgumentError(
        absl::StrCat("K >= 3 requires beta < sqrt(5/3), got ", beta));
  }
  if (!balance->IsNonEmpty()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "class-size window [", balance->LowerBound(), ", ",
        balance->UpperBound(), "] admits no balanced labeling of n=",
        num_vertices, " into K=", num_communities));
  }
  return SbmParams(*balance, a, b);
}

bool IsBalanced(const Labeling& sigma, const BalanceSpec& spec) {
  if (sigma.size() != spec.num_vertices()) return false;
  if (sigma.num_communities() > spec.num_communities()) return false;
  std::vector<int> counts(spec.num_communities(), 0);
  for (int label : sigma.labels()) ++counts[label];
  return std::all_of(counts.begin(), counts.end(),
                     [&](int c) { return spec.AdmitsCount(c); });
}

absl::StatusOr<std::vector<Labeling>> EnumerateBalanced(const BalanceSpec& spec,
                                                        int64_t cap) {
  const int n = spec.num_vertices();
  const int k = spec.num_communities();
  // K^n with saturation at cap + 1.
  int64_t candidates = 1;
  for (int i = 0; i < n && candidates <= cap; ++i) candidates *= k;
  if (candidates > cap) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "EnumerationTooLarge: K^n = ", k, "^", n, " exceeds cap ", cap));
  }

  std::vector<Labeling> out;
  if (!spec.IsNonEmpty()) return out;
  const int lo = static_cast<int>(std::ceil(spec.LowerBound() - kWindowSlack));
  const int hi = static_cast<int>(std::floor(spec.UpperBound() + kWindowSlack));

  std::vector<int> labels(n, 0);
  std::vector<int> counts(k, 0);
  // Iterative DFS in lexicographic order with count pruning.
  auto deficit = [&]() {
    int total = 0;
    for (int c : counts) total += std::max(0, lo - c);
    return total;
  };
  int pos = 0;
  labels[0] = -1;
  while (pos >= 0) {
    if (labels[pos] >= 0) --counts[labels[pos]];
    int next = labels[pos] + 1;
    bool placed = false;
    for (; next < k; ++next) {
      if (counts[next] + 1 > hi) continue;
      ++counts[next];
      if (deficit() <= n - pos - 1) {
        placed = true;
        break;
      }
      --counts[next];
    }
    if (!placed) {
      labels[pos] = -1;
      --pos;
      continue;
    }
    labels[pos] = next;
    if (pos == n - 1) {
      out.emplace_back(labels, k);
    } else {
      ++pos;
      labels[pos] = -1;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sampling

Graph SampleSbmWith(const SbmParams& params, const Labeling& truth, Rng& rng) {
  const int n = params.n();
  Graph g(n);
  const double p = params.p();
  const double q = params.q();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.Bernoulli(truth[i] == truth[j] ? p : q)) g.SetEdge(i, j, true);
    }
  }
  return g;
}

absl::StatusOr<Graph> SampleSbm(const SbmParams& params, const Labeling& truth,
                                uint64_t seed, uint64_t stream) {
  if (truth.size() != params.n()) {
    return absl::InvalidArgumentError(
        absl::StrCat("DimensionMismatch: truth has ", truth.size(),
                     " vertices, params.n = ", params.n()));
  }
  if (!IsBalanced(truth, params.balance())) {
    return absl::InvalidArgumentError(
        "BalanceViolation: truth labeling is not beta-balanced");
  }
  if (params.p() > 1.0 || params.q() > 1.0) {
    return absl::InvalidArgumentError("InvalidProbability: a/n or b/n > 1");
  }
  Rng rng(seed, stream);
  return SampleSbmWith(params, truth, rng);
}

// ---------------------------------------------------------------------------
// Mismatch

namespace {

std::vector<std::vector<int>> ConfusionMatrix(const Labeling& truth,
                                              const Labeling& estimate, int k) {
  std::vector<std::vector<int>> confusion(k, std::vector<int>(k, 0));
  for (int i = 0; i < truth.size(); ++i) ++confusion[truth[i]][estimate[i]];
  return confusion;
}

int CommonK(const Labeling& truth, const Labeling& estimate) {
  return std::max(truth.num_communities(), estimate.num_communities());
}

}  // namespace

int MismatchCountByPermutations(const Labeling& truth,
                                const Labeling& estimate) {
  assert(truth.size() == estimate.size());
  const int k = CommonK(truth, estimate);
  const auto confusion = ConfusionMatrix(truth, estimate, k);
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  int best_matches = 0;
  do {
    // Estimate label e is mapped to perm[e]; it matches truth label perm[e].
    int matches = 0;
    for (int e = 0; e < k; ++e) matches += confusion[perm[e]][e];
    best_matches = std::max(best_matches, matches);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return truth.size() - best_matches;
}

int MismatchCountByAssignment(const Labeling& truth, const Labeling& estimate) {
  assert(truth.size() == estimate.size());
  const int k = CommonK(truth, estimate);
  const auto confusion = ConfusionMatrix(truth, estimate, k);
  // Rows: estimate labels; columns: truth labels; cost = -matches.
  std::vector<std::vector<double>> cost(k, std::vector<double>(k));
  for (int e = 0; e < k; ++e) {
    for (int t = 0; t < k; ++t) cost[e][t] = -confusion[t][e];
  }
  const Assignment assignment = SolveMinCostAssignment(cost);
  return truth.size() + static_cast<int>(std::lround(assignment.cost));
}

int MismatchCount(const Labeling& truth, const Labeling& estimate) {
  if (CommonK(truth, estimate) <= kMaxPermutationEnumerationK) {
    return MismatchCountByPermutations(truth, estimate);
  }
  return MismatchCountByAssignment(truth, estimate);
}

double MismatchRatio(const Labeling& truth, const Labeling& estimate) {
  if (truth.size() == 0) return 0.0;
  return static_cast<double>(MismatchCount(truth, estimate)) / truth.size();
}

// ---------------------------------------------------------------------------
// Node distance

namespace {

// Exact minimum vertex cover by branching on an uncovered edge's endpoints.
void CoverSearch(const std::vector<std::pair<int, int>>& edges,
                 std::vector<bool>& chosen, int chosen_count, int& best) {
  if (chosen_count >= best) return;
  const std::pair<int, int>* open = nullptr;
  for (const auto& e : edges) {
    if (!chosen[e.first] && !chosen[e.second]) {
      open = &e;
      break;
    }
  }
  if (open == nullptr) {
    best = chosen_count;
    return;
  }
  for (int endpoint : {open->first, open->second}) {
    chosen[endpoint] = true;
    CoverSearch(edges, chosen, chosen_count + 1, best);
    chosen[endpoint] = false;
  }
}

}  // namespace

absl::StatusOr<NodeDistanceResult> NodeDistance(const Graph& g1,
                                                const Graph& g2) {
  if (g1.num_vertices() != g2.num_vertices()) {
    return absl::InvalidArgumentError(
        absl::StrCat("DimensionMismatch: ", g1.num_vertices(), " vs ",
                     g2.num_vertices(), " vertices"));
  }
  const int n = g1.num_vertices();
  std::vector<std::pair<int, int>> diff;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (g1.HasEdge(i, j) != g2.HasEdge(i, j)) diff.emplace_back(i, j);
    }
  }
  NodeDistanceResult result;
  if (diff.empty()) return result;

  // Maximal matching: its endpoints form a 2-approximate cover.
  std::vector<bool> matched(n, false);
  int greedy = 0;
  for (const auto& [i, j] : diff) {
    if (!matched[i] && !matched[j]) {
      matched[i] = matched[j] = true;
      greedy += 2;
    }
  }
  if (static_cast<int>(diff.size()) > kNodeDistanceExactEdgeCap) {
    result.distance = greedy;
    result.exact = false;
    return result;
  }
  int best = greedy;
  std::vector<bool> chosen(n, false);
  CoverSearch(diff, chosen, 0, best);
  result.distance = best;
  return result;
}

// ---------------------------------------------------------------------------
// Text formats

std::string FormatGraph(const Graph& g) {
  const auto edges = g.Edges();
  std::string out = absl::StrCat(g.num_vertices(), " ", edges.size(), "\n");
  for (const auto& [i, j] : edges)
    absl::StrAppend(&out, i + 1, " ", j + 1, "\n");
  return out;
}

namespace {

// The installed absl predates its std::string_view alias.
absl::string_view ToAbsl(std::string_view s) {
  return absl::string_view(s.data(), s.size());
}

absl::StatusOr<std::vector<int64_t>> ParseInts(absl::string_view line) {
  std::vector<int64_t> values;
  for (absl::string_view token :
       absl::StrSplit(line, absl::ByAnyChar(" \t\r\n"), absl::SkipEmpty())) {
    int64_t value;
    if (!absl::SimpleAtoi(token, &value)) {
      return absl::InvalidArgumentError(
          absl::StrCat("not an integer: '", token, "'"));
    }
    values.push_back(value);
  }
  return values;
}

}  // namespace

absl::StatusOr<Graph> ParseGraph(std::string_view text) {
  std::vector<absl::string_view> lines =
      absl::StrSplit(ToAbsl(text), '\n', absl::SkipWhitespace());
  if (lines.empty()) return absl::InvalidArgumentError("empty graph file");
  auto header = ParseInts(lines[0]);
  if (!header.ok()) return header.status();
  if (header->size() != 2 || (*header)[0] < 0 || (*header)[1] < 0) {
    return absl::InvalidArgumentError("graph header must be 'n m'");
  }
  const int n = static_cast<int>((*header)[0]);
  const int64_t m = (*header)[1];
  if (static_cast<int64_t>(lines.size()) != m + 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "header declares ", m, " edges but found ", lines.size() - 1));
  }
  Graph g(n);
  std::pair<int64_t, int64_t> previous{0, 0};
  for (int64_t e = 1; e <= m; ++e) {
    auto values = ParseInts(lines[e]);
    if (!values.ok()) return values.status();
    if (values->size() != 2) {
      return absl::InvalidArgumentError(
          absl::StrCat("edge line ", e, " must be 'i j'"));
    }
    const int64_t i = (*values)[0];
    const int64_t j = (*values)[1];
    if (i < 1 || j > n || i >= j) {
      return absl::InvalidArgumentError(absl::StrCat(
          "edge line ", e, ": need 1 <= i < j <= n, got ", i, " ", j));
    }
    if (std::pair{i, j} <= previous) {
      return absl::InvalidArgumentError(
          absl::StrCat("edge line ", e, " is not in strictly sorted order"));
    }
    previous = {i, j};
    g.SetEdge(static_cast<int>(i - 1), static_cast<int>(j - 1), true);
  }
  return g;
}

std::string FormatLabeling(const Labeling& sigma) {
  std::string out;
  for (int i = 0; i < sigma.size(); ++i) {
    absl::StrAppend(&out, i == 0 ? "" : " ", sigma[i] + 1);
  }
  out += "\n";
  return out;
}

absl::StatusOr<Labeling> ParseLabeling(std::string_view text,
                                       int num_communities) {
  auto values = ParseInts(ToAbsl(text));
  if (!values.ok()) return values.status();
  std::vector<int> labels;
  labels.reserve(values->size());
  for (int64_t v : *values) {
    if (v < 1 || v > num_communities) {
      return absl::InvalidArgumentError(
          absl::StrCat("label ", v, " outside 1..", num_communities));
    }
    labels.push_back(static_cast<int>(v - 1));
  }
  return Labeling(std::move(labels), num_communities);
}

}  // namespace nodedp
