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

#include "nodedp/info_quantities.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace nodedp {

absl::StatusOr<double> RenyiHalf(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "InvalidProbability: p=", p, " q=", q, " must lie in [0, 1]"));
  }
  const double root_gap = std::sqrt(p) - std::sqrt(q);
  const double complement_sum = std::sqrt(1.0 - p) + std::sqrt(1.0 - q);
  // sqrt(1-p) - sqrt(1-q) = (q - p) / (sqrt(1-p) + sqrt(1-q)).
  const double complement_gap =
      complement_sum > 0.0 ? (q - p) / complement_sum : 0.0;
  const double d =
      0.5 * (root_gap * root_gap + complement_gap * complement_gap);
  return -2.0 * std::log1p(-d);
}

double RenyiHalf(const SbmParams& params) {
  // SbmParams guarantees 0 <= q <= p <= 1.
  return *RenyiHalf(params.p(), params.q());
}

absl::StatusOr<double> ChernoffTilt(const SbmParams& params) {
  const double p = params.p();
  const double q = params.q();
  if (params.b() == 0.0 || params.a() == params.n()) {
    return absl::FailedPreconditionError(
        absl::StrCat("TiltUndefined: t* needs 0 < b and a < n (a=", params.a(),
                     ", b=", params.b(), ", n=", params.n(), ")"));
  }
  if (p == q) return 0.0;
  return 0.5 * (std::log(p) - std::log(q) + std::log1p(-q) - std::log1p(-p));
}

absl::StatusOr<std::pair<double, double>> LambdaInterval(
    const SbmParams& params) {
  auto t = ChernoffTilt(params);
  if (!t.ok()) return t.status();
  const double p = params.p();
  const double q = params.q();
  if (*t == 0.0) return std::pair{p, p};
  const double left = std::log1p(q * std::expm1(*t)) / *t;
  const double right = -std::log1p(p * std::expm1(-*t)) / *t;
  return std::pair{left, right};
}

absl::StatusOr<double> PenaltyLambda(const SbmParams& params,
                                     std::optional<double> w) {
  if (params.num_communities() == 2) {
    if (w.has_value()) {
      return absl::InvalidArgumentError(
          "K = 2 uses the fixed midpoint penalty; w must not be supplied");
    }
    w = 0.5;
  } else if (!w.has_value()) {
    return absl::InvalidArgumentError("K >= 3 requires w in [0, 1]");
  }
  if (!(*w >= 0.0 && *w <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("w must lie in [0, 1], got ", *w));
  }
  auto interval = LambdaInterval(params);
  if (!interval.ok()) return interval.status();
  return *w * interval->second + (1.0 - *w) * interval->first;
}

double SignalFromNI(int num_communities, double beta, double n_times_i) {
  if (num_communities == 2) return n_times_i / 2.0;
  return n_times_i / (beta * num_communities);
}

double Signal(const SbmParams& params) {
  return SignalFromNI(params.num_communities(), params.beta(),
                      params.n() * RenyiHalf(params));
}

absl::StatusOr<InfoQuantities> ComputeInfoQuantities(const SbmParams& params,
                                                     std::optional<double> w) {
  InfoQuantities out;
  out.renyi = RenyiHalf(params);
  out.n_times_renyi = params.n() * out.renyi;
  out.signal =
      SignalFromNI(params.num_communities(), params.beta(), out.n_times_renyi);
  auto t = ChernoffTilt(params);
  if (!t.ok()) return t.status();
  out.t_star = *t;
  auto lambda = PenaltyLambda(params, w);
  if (!lambda.ok()) return lambda.status();
  out.lambda = *lambda;
  if (params.num_communities() >= 3) out.w = w;
  return out;
}

AssumptionReport CheckAssumptions(const SbmParams& params, double c_s,
                                  double c_mg) {
  AssumptionReport report;
  report.c_s = c_s;
  report.c_mg = c_mg;
  const int k = params.num_communities();
  const double log_nk = std::log(static_cast<double>(params.n()) * k);
  const double k_log_k = k * std::log(static_cast<double>(k));
  const double signal = Signal(params);
  report.signal_margin = signal / log_nk;
  report.signal_entropy_ok = signal >= c_s * log_nk;
  report.mild_k_margin = log_nk / k_log_k;
  report.mild_k_ok = log_nk >= c_mg * k_log_k;
  return report;
}

}  // namespace nodedp
