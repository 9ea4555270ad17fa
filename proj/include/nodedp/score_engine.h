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

// The penalized likelihood score
//
//   T_A(sigma) = sum_{i<j} (A_ij - lambda) 1{sigma(i) = sigma(j)},
//
// its single-vertex increments, the degree envelope G_C with its restricted
// node sensitivity, and the split/merge pair counts between two labelings.

#ifndef NODEDP_SCORE_ENGINE_H_
#define NODEDP_SCORE_ENGINE_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "nodedp/graph_model.h"

namespace nodedp {

inline constexpr double kDefaultEnvelopeC = 10.0;

// Immutable (graph, lambda) pair with per-vertex adjacency bitsets. Safe to
// share across threads.
class ScoreContext {
 public:
  ScoreContext(Graph graph, double lambda);

  const Graph& graph() const { return graph_; }
  double lambda() const { return lambda_; }
  int num_vertices() const { return graph_.num_vertices(); }
  int words_per_row() const { return words_; }
  // Adjacency row of v as words_per_row() 64-bit words.
  const uint64_t* Row(int v) const { return &rows_[v * words_]; }

 private:
  Graph graph_;
  double lambda_;
  int words_;
  std::vector<uint64_t> rows_;
};

// Direct sum over unordered pairs.
double Score(const ScoreContext& ctx, const Labeling& sigma);
// Number of edges with both ends in one community.
int64_t WithinEdgeCount(const Graph& g, const Labeling& sigma);
// sum_k c_k (c_k - 1) / 2 over class sizes c_k.
int64_t WithinPairCount(const Labeling& sigma);
// WithinEdgeCount - lambda * WithinPairCount; the second counting path.
double ScoreFromCounts(const ScoreContext& ctx, const Labeling& sigma);

// T(sigma with `vertex` relabelled to `new_label`) - T(sigma), in O(n) time.
double ScoreDelta(const ScoreContext& ctx, const Labeling& sigma, int vertex,
                  int new_label);

// G_C = { A : d_max(A) <= C max{a, log n} } with Delta_a = 2 C max{a, log n}.
class DegreeEnvelope {
 public:
  static absl::StatusOr<DegreeEnvelope> Create(double c, double a,
                                               int num_vertices);
  static absl::StatusOr<DegreeEnvelope> ForParams(const SbmParams& params,
                                                  double c = kDefaultEnvelopeC);
  // Same construction from log n directly, for instances where n is only
  // known through its logarithm.
  static absl::StatusOr<DegreeEnvelope> FromLogN(double c, double a,
                                                 double log_n);

  double c() const { return c_; }
  double threshold() const { return threshold_; }
  double delta_a() const { return 2.0 * threshold_; }

 private:
  DegreeEnvelope(double c, double threshold) : c_(c), threshold_(threshold) {}
  double c_;
  double threshold_;
};

bool InEnvelope(const Graph& g, const DegreeEnvelope& env);
double RestrictedSensitivity(const DegreeEnvelope& env);

struct SplitMergeCounts {
  int64_t alpha = 0;  // together in truth, apart in sigma
  int64_t gamma = 0;  // apart in truth, together in sigma
  int m = 0;          // orbit distance min_pi d_H(sigma, pi o truth)
};

// Exact pair scan. Both labelings must have the same length.
SplitMergeCounts SplitMerge(const Labeling& truth, const Labeling& sigma);

}  // namespace nodedp

#endif  // NODEDP_SCORE_ENGINE_H_
