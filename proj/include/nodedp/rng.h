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

#ifndef NODEDP_RNG_H_
#define NODEDP_RNG_H_

#include <array>
#include <cstdint>
#include <limits>

namespace nodedp {

// Philox4x32-10 counter-based generator (Salmon et al., Random123).
//
// Stream splitting: the 64-bit seed is the Philox key; the 128-bit counter is
// split into a 64-bit stream id (high words) and a 64-bit block index (low
// words). Two generators with the same seed and different stream ids never
// share a counter value, so replicates keyed by distinct stream ids are
// independent and reproducible regardless of execution order.
class Philox4x32 {
 public:
  using result_type = uint32_t;
  using Counter = std::array<uint32_t, 4>;
  using Key = std::array<uint32_t, 2>;

  explicit Philox4x32(uint64_t seed, uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  // One 10-round Philox block; exposed for known-answer tests.
  static Counter Block(Counter counter, Key key);

 private:
  Key key_;
  uint64_t stream_;
  uint64_t block_ = 0;
  Counter buffer_{};
  int used_ = 4;
};

// Mixes a stream path (e.g. cell index, replicate index) into one stream id.
uint64_t StreamId(uint64_t a, uint64_t b = 0, uint64_t c = 0);

// Thin convenience layer over Philox4x32. All draws are built from raw 32-bit
// words so results do not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = 0) : engine_(seed, stream) {}

  uint64_t NextU64();
  // Uniform on [0, 1) with 53 random bits.
  double Uniform();
  // Uniform on (0, 1); never returns 0.
  double UniformOpen();
  // Uniform integer in [0, bound), unbiased (rejection sampling).
  uint64_t UniformInt(uint64_t bound);
  bool Bernoulli(double p);
  // Standard Gumbel(0, 1).
  double Gumbel();

  Philox4x32& engine() { return engine_; }

 private:
  Philox4x32 engine_;
};

}  // namespace nodedp

#endif  // NODEDP_RNG_H_
