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

// Confidence intervals for Monte-Carlo summaries.

#ifndef NODEDP_STATS_H_
#define NODEDP_STATS_H_

#include <cstdint>
#include <vector>

namespace nodedp {

// Two-sided 99% standard normal quantile.
inline constexpr double kZ99 = 2.5758293035489004;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool Contains(double x) const { return lo <= x && x <= hi; }
};

// Wilson score interval for a binomial proportion.
Interval WilsonInterval(int64_t successes, int64_t trials, double z = kZ99);

struct MeanSummary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation
  Interval ci;      // normal approximation, clamped to [lo_clamp, hi_clamp]
};

MeanSummary SummarizeMean(const std::vector<double>& values, double z = kZ99,
                          double lo_clamp = 0.0, double hi_clamp = 1.0);

}  // namespace nodedp

#endif  // NODEDP_STATS_H_
