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

#include "nodedp/score_engine.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace nodedp {

ScoreContext::ScoreContext(Graph graph, double lambda)
    : graph_(std::move(graph)),
      lambda_(lambda),
      words_((graph_.num_vertices() + 63) / 64),
      rows_(static_cast<size_t>(graph_.num_vertices()) * words_, 0) {
  for (const auto& [i, j] : graph_.Edges()) {
    rows_[i * words_ + j / 64] |= uint64_t{1} << (j % 64);
    rows_[j * words_ + i / 64] |= uint64_t{1} << (i % 64);
  }
}

double Score(const ScoreContext& ctx, const Labeling& sigma) {
  const Graph& g = ctx.graph();
  const int n = g.num_vertices();
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (sigma[i] != sigma[j]) continue;
      total += (g.HasEdge(i, j) ? 1.0 : 0.0) - ctx.lambda();
    }
  }
  return total;
}

int64_t WithinEdgeCount(const Graph& g, const Labeling& sigma) {
  int64_t count = 0;
  for (const auto& [i, j] : g.Edges()) {
    if (sigma[i] == sigma[j]) ++count;
  }
  return count;
}

int64_t WithinPairCount(const Labeling& sigma) {
  int64_t pairs = 0;
  for (int c : sigma.ClassCounts()) {
    pairs += static_cast<int64_t>(c) * (c - 1) / 2;
  }
  return pairs;
}

double ScoreFromCounts(const ScoreContext& ctx, const Labeling& sigma) {
  return static_cast<double>(WithinEdgeCount(ctx.graph(), sigma)) -
         ctx.lambda() * static_cast<double>(WithinPairCount(sigma));
}

double ScoreDelta(const ScoreContext& ctx, const Labeling& sigma, int vertex,
                  int new_label) {
  const int old_label = sigma[vertex];
  if (new_label == old_label) return 0.0;
  const int n = ctx.num_vertices();
  const uint64_t* row = ctx.Row(vertex);
  int64_t edges_to_new = 0;
  int64_t edges_to_old = 0;
  int64_t size_new = 0;
  int64_t size_old = 0;  // excludes `vertex`
  for (int u = 0; u < n; ++u) {
    if (u == vertex) continue;
    const bool adjacent = (row[u / 64] >> (u % 64)) & 1;
    if (sigma[u] == new_label) {
      ++size_new;
      edges_to_new += adjacent;
    } else if (sigma[u] == old_label) {
      ++size_old;
      edges_to_old += adjacent;
    }
  }
  return static_cast<double>(edges_to_new - edges_to_old) -
         ctx.lambda() * static_cast<double>(size_new - size_old);
}

absl::StatusOr<DegreeEnvelope> DegreeEnvelope::FromLogN(double c, double a,
                                                        double log_n) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    return absl::InvalidArgumentError(
        absl::StrCat("envelope constant C must be positive, got ", c));
  }
  if (!(a >= 0.0) || !std::isfinite(log_n)) {
    return absl::InvalidArgumentError(
        absl::StrCat("envelope needs a >= 0 and finite log n (a=", a,
                     ", log n=", log_n, ")"));
  }
  return DegreeEnvelope(c, c * std::max(a, log_n));
}

absl::StatusOr<DegreeEnvelope> DegreeEnvelope::Create(double c, double a,
                                                      int num_vertices) {
  if (num_vertices < 1) {
    return absl::InvalidArgumentError("envelope needs n >= 1");
  }
  return FromLogN(c, a, std::log(static_cast<double>(num_vertices)));
}

absl::StatusOr<DegreeEnvelope> DegreeEnvelope::ForParams(
    const SbmParams& params, double c) {
  return Create(c, params.a(), params.n());
}

bool InEnvelope(const Graph& g, const DegreeEnvelope& env) {
  return g.MaxDegree() <= env.threshold();
}

double RestrictedSensitivity(const DegreeEnvelope& env) {
  return env.delta_a();
}

SplitMergeCounts SplitMerge(const Labeling& truth, const Labeling& sigma) {
  SplitMergeCounts out;
  const int n = truth.size();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool together_truth = truth[i] == truth[j];
      const bool together_sigma = sigma[i] == sigma[j];
      if (together_truth && !together_sigma) ++out.alpha;
      if (!together_truth && together_sigma) ++out.gamma;
    }
  }
  out.m = MismatchCount(truth, sigma);
  return out;
}

}  // namespace nodedp
