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

#ifndef DPMARKET_LDP_HPP_
#define DPMARKET_LDP_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dpmarket/bytes.hpp"
#include "dpmarket/rng.hpp"

namespace dpmarket {

// The consumer's questionnaire. Choice index i is the identity of the i-th
// label and never changes for the life of a session.
class Query {
 public:
  // Requires at least two pairwise-distinct labels.
  explicit Query(std::vector<std::string> choices);

  // Labels "c0", "c1", ..., "c{n-1}".
  static Query WithIndexLabels(std::size_t n);

  std::size_t size() const { return choices_.size(); }
  const std::vector<std::string>& choices() const { return choices_; }

  // u32 label count, then each label as u32 length + UTF-8 bytes.
  Bytes CanonicalBytes() const;

  bool operator==(const Query&) const = default;

 private:
  std::vector<std::string> choices_;
};

struct ResponseBits {
  std::vector<bool> bits;

  std::size_t size() const { return bits.size(); }
  std::size_t Popcount() const;
  bool IsOneHot() const;

  // u16 big-endian bit length followed by the MSB-first packed bits.
  Bytes Serialize() const;
  static ResponseBits Deserialize(ByteView data);

  bool operator==(const ResponseBits&) const = default;
};

// Probability that the first coin reports the true bit. 0.5 is the fair coin.
class CoinBias {
 public:
  explicit CoinBias(double truth_probability);

  static CoinBias Fair() { return CoinBias(0.5); }

  double value() const { return f_; }
  // P(reported bit = 1 | true bit).
  double OneProbability(bool true_bit) const {
    return (true_bit ? f_ : 0.0) + (1.0 - f_) * 0.5;
  }

  bool operator==(const CoinBias&) const = default;

 private:
  double f_;
};

struct FrequencyEstimate {
  std::vector<double> raw;
  std::vector<double> clamped;
  std::int64_t total = 0;

  // clamped / sum(clamped); all zeros if every bin clamped to zero.
  std::vector<double> Distribution() const;

  bool operator==(const FrequencyEstimate&) const = default;
};

struct AdvantageRecord {
  std::size_t n = 0;
  double f = 0.0;
  double p_guess = 0.0;
  double p_posterior = 0.0;
  double advantage = 0.0;
};

ResponseBits EncodeTruth(const Query& query, std::size_t choice_index);
ResponseBits EncodeTruth(std::size_t n, std::size_t choice_index);

// Two-coin randomized response: each bit independently keeps its true value
// with probability f, otherwise becomes a fair coin flip.
ResponseBits Randomize(const ResponseBits& truth, CoinBias f, Rng& rng);

// Per-bin count of set bits. Every response must have exactly n bits.
std::vector<std::int64_t> CountOnes(std::span<const ResponseBits> responses,
                                    std::size_t n);

// Unbiased inversion of Randomize:
//   raw[i] = (observed_ones[i] - (1 - f) * 0.5 * total) / f.
FrequencyEstimate EstimateCounts(std::span<const std::int64_t> observed_ones,
                                 std::int64_t total, CoinBias f);

// Posterior that the true choice is c_i given r_i = 1 under a uniform prior,
// and its ratio to the blind guess 1/n.
AdvantageRecord AttackerAdvantage(std::size_t n, CoinBias f);

// lim_{n -> inf} AttackerAdvantage(n, f).advantage.
double AdvantageLimit(CoinBias f);

// Probability that the maximum-a-posteriori guess from a full randomized
// vector equals the true choice. The MAP guess is a uniformly chosen set bit
// (uniform over all n when none is set); its success probability does not
// depend on the prior over true choices.
double MapGuessSuccessProbability(std::size_t n, CoinBias f);

// The MAP guess itself: argmax of EstimateCounts(response, total = 1), ties
// broken uniformly with `rng`.
std::size_t DecodeMostLikely(const ResponseBits& response, CoinBias f,
                             Rng& rng);

}  // namespace dpmarket

#endif  // DPMARKET_LDP_HPP_
