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

// Core data types for the homogeneous stochastic block model: simple graphs,
// community labelings, the beta-balanced labeling set, SBM sampling, the
// permutation-invariant mismatch loss and the node metric on graphs.

#ifndef NODEDP_GRAPH_MODEL_H_
#define NODEDP_GRAPH_MODEL_H_

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"

namespace nodedp {

inline constexpr int64_t kDefaultEnumerationCap = 20'000'000;

// Simple undirected graph on vertices 0..n-1, stored as an upper-triangular
// bitset keyed by (i, j), i < j. No self-loops by construction.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int num_vertices);

  // Edges are 0-based unordered pairs; duplicates are allowed and collapse.
  static absl::StatusOr<Graph> FromEdges(
      int num_vertices, std::span<const std::pair<int, int>> edges);

  // Bit k of `mask` is the k-th pair in PairIndex order. Requires
  // NumPairs(num_vertices) <= 64.
  static Graph FromPairMask(int num_vertices, uint64_t mask);
  uint64_t PairMask() const;

  static int64_t NumPairs(int num_vertices) {
    return static_cast<int64_t>(num_vertices) * (num_vertices - 1) / 2;
  }
  // Row-major index of the pair (i, j), i < j, in the upper triangle.
  static int64_t PairIndex(int num_vertices, int i, int j);

  int num_vertices() const { return n_; }
  bool HasEdge(int i, int j) const;
  void SetEdge(int i, int j, bool present);
  void FlipEdge(int i, int j);

  int Degree(int v) const;
  int MaxDegree() const;
  int64_t NumEdges() const;
  // Sorted lexicographically, i < j.
  std::vector<std::pair<int, int>> Edges() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  int n_ = 0;
  std::vector<uint64_t> bits_;
};

// A map [n] -> [K]. Labels are stored 0-based; the text format is 1-based.
class Labeling {
 public:
  Labeling() = default;
  // Labels must lie in [0, num_communities); use Create() to validate.
  Labeling(std::vector<int> labels, int num_communities)
      : labels_(std::move(labels)), num_communities_(num_communities) {}

  static absl::StatusOr<Labeling> Create(std::vector<int> labels,
                                         int num_communities);

  int size() const { return static_cast<int>(labels_.size()); }
  int num_communities() const { return num_communities_; }
  int operator[](int i) const { return labels_[i]; }
  const std::vector<int>& labels() const { return labels_; }

  std::vector<int> ClassCounts() const;
  Labeling WithLabel(int vertex, int label) const;
  // Returns pi o sigma, i.e. vertex i gets perm[sigma(i)].
  Labeling Permuted(std::span<const int> perm) const;

  friend bool operator==(const Labeling&, const Labeling&) = default;
  friend auto operator<=>(const Labeling& x, const Labeling& y) {
    return x.labels_ <=> y.labels_;
  }

 private:
  std::vector<int> labels_;
  int num_communities_ = 0;
};

// Labeling with vertex i in community i mod K (class sizes differ by <= 1).
Labeling MostBalancedLabeling(int num_vertices, int num_communities);

// Class-size window [n/(beta K), beta n/K] defining Sigma_beta.
class BalanceSpec {
 public:
  static absl::StatusOr<BalanceSpec> Create(int num_vertices,
                                            int num_communities, double beta);

  int num_vertices() const { return n_; }
  int num_communities() const { return k_; }
  double beta() const { return beta_; }
  double LowerBound() const;
  double UpperBound() const;
  // Closed real interval test; the 1e-9 slack only absorbs representation
  // error in n/(beta K) and beta n/K.
  bool AdmitsCount(int count) const;
  // True iff some integer composition of n into K admissible parts exists.
  bool IsNonEmpty() const;

 private:
  BalanceSpec(int n, int k, double beta) : n_(n), k_(k), beta_(beta) {}
  int n_;
  int k_;
  double beta_;
};

// Parameters (n, K, a, b, beta) of Theta(n, K, a, b, beta).
class SbmParams {
 public:
  // Validates n >= 2, K >= 2, 0 <= b <= a <= n, beta >= 1,
  // beta < sqrt(5/3) when K >= 3, and that Sigma_beta is nonempty.
  static absl::StatusOr<SbmParams> Create(int num_vertices, int num_communities,
                                          double a, double b, double beta);

  int n() const { return balance_.num_vertices(); }
  int num_communities() const { return balance_.num_communities(); }
  double a() const { return a_; }
  double b() const { return b_; }
  double beta() const { return balance_.beta(); }
  // Within- and across-community edge probabilities a/n and b/n.
  double p() const { return a_ / n(); }
  double q() const { return b_ / n(); }
  const BalanceSpec& balance() const { return balance_; }

 private:
  SbmParams(BalanceSpec balance, double a, double b)
      : balance_(balance), a_(a), b_(b) {}
  BalanceSpec balance_;
  double a_;
  double b_;
};

bool IsBalanced(const Labeling& sigma, const BalanceSpec& spec);

// Sigma_beta in lexicographic order of label vectors. Fails with
// ResourceExhausted when K^n exceeds `cap`.
absl::StatusOr<std::vector<Labeling>> EnumerateBalanced(
    const BalanceSpec& spec, int64_t cap = kDefaultEnumerationCap);

class Rng;

// Draws A ~ SBM(truth): pairs i < j in PairIndex order, each present with
// probability a/n (same community) or b/n. Deterministic in (seed, stream).
absl::StatusOr<Graph> SampleSbm(const SbmParams& params, const Labeling& truth,
                                uint64_t seed, uint64_t stream = 0);
// Same law, drawing from a caller-owned generator. `truth` is not validated.
Graph SampleSbmWith(const SbmParams& params, const Labeling& truth, Rng& rng);

// min over pi in S_K of |{i : truth(i) != pi(estimate(i))}|. Both labelings
// must have equal length; K is the larger of their community counts.
int MismatchCount(const Labeling& truth, const Labeling& estimate);
double MismatchRatio(const Labeling& truth, const Labeling& estimate);

// The two exact routes behind MismatchCount: enumeration of S_K, and a
// minimum-cost assignment on the K x K confusion matrix.
int MismatchCountByPermutations(const Labeling& truth,
                                const Labeling& estimate);
int MismatchCountByAssignment(const Labeling& truth, const Labeling& estimate);

// K at or below which MismatchCount enumerates S_K.
inline constexpr int kMaxPermutationEnumerationK = 6;

struct NodeDistanceResult {
  int distance = 0;
  // False when the symmetric difference exceeded kNodeDistanceExactEdgeCap
  // and `distance` is a 2-approximate vertex-cover upper bound.
  bool exact = true;
};

inline constexpr int kNodeDistanceExactEdgeCap = 40;

// d_v(g1, g2): size of a minimum vertex cover of the symmetric-difference
// edge set, i.e. the fewest vertices whose neighbourhoods must be rewired.
absl::StatusOr<NodeDistanceResult> NodeDistance(const Graph& g1,
                                                const Graph& g2);

// Text formats. Graph: "n m" then m lines "i j" (1-based, i < j, sorted).
// Labeling: one line of n space-separated labels in 1..K.
std::string FormatGraph(const Graph& g);
absl::StatusOr<Graph> ParseGraph(std::string_view text);
std::string FormatLabeling(const Labeling& sigma);
absl::StatusOr<Labeling> ParseLabeling(std::string_view text,
                                       int num_communities);

}  // namespace nodedp

#endif  // NODEDP_GRAPH_MODEL_H_
