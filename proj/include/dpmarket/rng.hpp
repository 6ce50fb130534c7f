// Copyright 2026 The dpmarket Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPMARKET_RNG_HPP_
#define DPMARKET_RNG_HPP_

#include <cstdint>
#include <limits>
#include <random>
#include <span>

namespace dpmarket {

// Seedable, splittable pseudo-random source. Every stochastic operation in
// the library takes one of these explicitly; there is no global generator.
//
// Split(stream) derives a child whose sequence depends only on this source's
// seed and the stream id, never on how many values were already drawn. This
// lets a simulation hand provider p the stream Split(p) and get the same
// draws for p regardless of the total provider count.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  Rng Split(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }

  result_type operator()() { return engine_(); }
  static constexpr result_type min() {
    return std::numeric_limits<result_type>::min();
  }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  bool Bernoulli(double p);
  double Normal(double mean, double sd);
  // Uniform in [0, n). n must be positive.
  std::uint64_t UniformIndex(std::uint64_t n);
  void FillBytes(std::span<std::uint8_t> out);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace dpmarket

#endif  // DPMARKET_RNG_HPP_
