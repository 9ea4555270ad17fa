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

// Closed-form scalars of the homogeneous SBM: the order-1/2 Renyi divergence
// between Ber(a/n) and Ber(b/n), the Chernoff tilt, the score penalty lambda
// and the Signal exponent, plus validators for the rate assumptions.

#ifndef NODEDP_INFO_QUANTITIES_H_
#define NODEDP_INFO_QUANTITIES_H_

#include <optional>
#include <utility>

#include "absl/status/statusor.h"
#include "nodedp/graph_model.h"

namespace nodedp {

// I = -2 log( sqrt(pq) + sqrt((1-p)(1-q)) ). Evaluated as
// -2 log1p(-D) with D = ((sqrt p - sqrt q)^2 + (sqrt(1-p) - sqrt(1-q))^2) / 2,
// which keeps full relative precision when p, q are tiny.
absl::StatusOr<double> RenyiHalf(double p, double q);
double RenyiHalf(const SbmParams& params);

// t* = (1/2) log( p(1-q) / (q(1-p)) ). Zero when a == b. FailedPrecondition
// (TiltUndefined) when b == 0 or a == n.
absl::StatusOr<double> ChernoffTilt(const SbmParams& params);

// Endpoints of the admissible penalty interval
//   [ (1/t*) log(q e^{t*} + 1 - q),  -(1/t*) log(p e^{-t*} + 1 - p) ].
// At t* = 0 (a == b) both endpoints take their limit p.
absl::StatusOr<std::pair<double, double>> LambdaInterval(
    const SbmParams& params);

// lambda = w * right + (1 - w) * left. For K = 2 the midpoint (w = 1/2) is
// used and a caller-supplied w is rejected; for K >= 3, w in [0, 1] is
// required.
absl::StatusOr<double> PenaltyLambda(const SbmParams& params,
                                     std::optional<double> w = std::nullopt);

// nI/2 for K = 2, nI/(beta K) otherwise.
double SignalFromNI(int num_communities, double beta, double n_times_i);
double Signal(const SbmParams& params);

struct InfoQuantities {
  double renyi = 0.0;   // I
  double t_star = 0.0;  // Chernoff tilt
  double lambda = 0.0;
  double signal = 0.0;
  double n_times_renyi = 0.0;
  std::optional<double> w;  // only for K >= 3
};

absl::StatusOr<InfoQuantities> ComputeInfoQuantities(
    const SbmParams& params, std::optional<double> w = std::nullopt);

struct AssumptionReport {
  bool signal_entropy_ok = false;
  double signal_margin = 0.0;  // Signal / log(nK)
  bool mild_k_ok = false;
  double mild_k_margin = 0.0;  // log(nK) / (K log K)
  double c_s = 1.0;
  double c_mg = 1.0;
};

// Signal >= C_s log(nK) and log(nK) >= C_mg K log K.
AssumptionReport CheckAssumptions(const SbmParams& params, double c_s = 1.0,
                                  double c_mg = 1.0);

}  // namespace nodedp

#endif  // NODEDP_INFO_QUANTITIES_H_
