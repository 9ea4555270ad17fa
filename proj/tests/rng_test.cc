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

#include "nodedp/rng.h"

#include <cmath>
#include <set>
#include <vector>

#include "gtest/gtest.h"

namespace nodedp {
namespace {

using Counter = Philox4x32::Counter;
using Key = Philox4x32::Key;

// Known-answer vectors published with Random123 (kat_vectors, philox4x32 10).
TEST(PhiloxTest, KnownAnswerZero) {
  Counter out = Philox4x32::Block({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(PhiloxTest, KnownAnswerAllOnes) {
  Counter out =
      Philox4x32::Block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                        {0xffffffff, 0xffffffff});
  EXPECT_EQ(out, (Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(PhiloxTest, KnownAnswerPiDigits) {
  Counter out =
      Philox4x32::Block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                        {0xa4093822, 0x299f31d0});
  EXPECT_EQ(out, (Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(PhiloxTest, SameSeedAndStreamReproduce) {
  Philox4x32 a(42, 7);
  Philox4x32 b(42, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(PhiloxTest, DistinctStreamsDiffer) {
  Philox4x32 a(42, 0);
  Philox4x32 b(42, 1);
  int equal = 0;
  for (int i = 0; i < 1000; ++i) equal += a() == b();
  EXPECT_LT(equal, 3);
}

TEST(StreamIdTest, DistinctPathsGiveDistinctIds) {
  std::set<uint64_t> ids;
  for (uint64_t cell = 0; cell < 50; ++cell) {
    for (uint64_t rep = 0; rep < 200; ++rep) ids.insert(StreamId(cell, rep));
  }
  EXPECT_EQ(ids.size(), 50u * 200u);
}

TEST(RngTest, UniformMomentsAndRange) {
  Rng rng(123);
  constexpr int kDraws = 200000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < kDraws; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum_sq += u * u;
  }
  // Mean 1/2 with sd sqrt(1/12 / N) ~ 6.5e-4; variance 1/12.
  EXPECT_NEAR(sum / kDraws, 0.5, 0.004);
  EXPECT_NEAR(sum_sq / kDraws - std::pow(sum / kDraws, 2), 1.0 / 12.0, 0.002);
}

TEST(RngTest, UniformIntIsUnbiasedOverSmallRange) {
  Rng rng(9);
  constexpr int kBound = 7;
  constexpr int kDraws = 70000;
  std::vector<int> counts(kBound, 0);
  for (int i = 0; i < kDraws; ++i) ++counts[rng.UniformInt(kBound)];
  double chi2 = 0.0;
  const double expected = static_cast<double>(kDraws) / kBound;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 6 degrees of freedom; the 0.999 quantile is 22.46.
  EXPECT_LT(chi2, 22.46);
}

TEST(RngTest, GumbelMeanIsEulerGamma) {
  Rng rng(5);
  constexpr int kDraws = 200000;
  double sum = 0.0;
  for (int i = 0; i < kDraws; ++i) sum += rng.Gumbel();
  // Var = pi^2/6, so the sd of the mean is ~2.9e-3.
  EXPECT_NEAR(sum / kDraws, 0.5772156649015329, 0.015);
}

TEST(RngTest, BernoulliEdgeCases) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    EXPECT_FALSE(rng.Bernoulli(0.0));
    EXPECT_TRUE(rng.Bernoulli(1.0));
  }
}

}  // namespace
}  // namespace nodedp
