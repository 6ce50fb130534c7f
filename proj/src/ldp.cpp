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

#include "dpmarket/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dpmarket/error.hpp"

namespace dpmarket {

Query::Query(std::vector<std::string> choices) : choices_(std::move(choices)) {
  if (choices_.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "a query needs at least 2 choices, got " +
                    std::to_string(choices_.size()));
  }
  std::set<std::string> seen;
  for (const auto& label : choices_) {
    if (!seen.insert(label).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate choice label '" + label + "'");
    }
  }
}

Query Query::WithIndexLabels(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back("c" + std::to_string(i));
  return Query(std::move(labels));
}

Bytes Query::CanonicalBytes() const {
  Bytes out;
  AppendU32BE(out, static_cast<std::uint32_t>(choices_.size()));
  for (const auto& label : choices_) {
    AppendU32BE(out, static_cast<std::uint32_t>(label.size()));
    Append(out, AsBytes(label));
  }
  return out;
}

std::size_t ResponseBits::Popcount() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), true));
}

bool ResponseBits::IsOneHot() const { return Popcount() == 1; }

Bytes ResponseBits::Serialize() const {
  if (bits.size() > 0xffff) {
    throw Error(ErrorCode::kInvalidArgument,
                "response has more than 65535 bits");
  }
  Bytes out;
  AppendU16BE(out, static_cast<std::uint16_t>(bits.size()));
  Append(out, PackBits(bits));
  return out;
}

ResponseBits ResponseBits::Deserialize(ByteView data) {
  if (data.size() < 2) {
    throw Error(ErrorCode::kMalformedInput, "response payload shorter than 2 bytes");
  }
  std::size_t count = (std::size_t{data[0]} << 8) | data[1];
  auto packed = data.subspan(2);
  ResponseBits out{UnpackBits(packed, count)};
  // Pad bits must be zero so that the encoding stays canonical.
  if (!packed.empty() && count % 8 != 0) {
    std::uint8_t pad_mask = static_cast<std::uint8_t>(0xffu >> (count % 8));
    if (packed.back() & pad_mask) {
      throw Error(ErrorCode::kMalformedInput, "non-zero pad bits in response");
    }
  }
  return out;
}

CoinBias::CoinBias(double truth_probability) : f_(truth_probability) {
  if (!(f_ > 0.0 && f_ <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "coin bias must lie in (0, 1], got " + std::to_string(f_));
  }
}

std::vector<double> FrequencyEstimate::Distribution() const {
  double sum = 0.0;
  for (double c : clamped) sum += c;
  std::vector<double> out(clamped.size(), 0.0);
  if (sum <= 0.0) return out;
  for (std::size_t i = 0; i < clamped.size(); ++i) out[i] = clamped[i] / sum;
  return out;
}

ResponseBits EncodeTruth(std::size_t n, std::size_t choice_index) {
  if (choice_index >= n) {
    throw Error(ErrorCode::kOutOfRange,
                "choice index " + std::to_string(choice_index) +
                    " out of range for " + std::to_string(n) + " choices");
  }
  ResponseBits out{std::vector<bool>(n, false)};
  out.bits[choice_index] = true;
  return out;
}

ResponseBits EncodeTruth(const Query& query, std::size_t choice_index) {
  return EncodeTruth(query.size(), choice_index);
}

ResponseBits Randomize(const ResponseBits& truth, CoinBias f, Rng& rng) {
  if (!truth.IsOneHot()) {
    throw Error(ErrorCode::kInvalidArgument,
                "randomize expects a one-hot truthful response");
  }
  ResponseBits out{std::vector<bool>(truth.size())};
  for (std::size_t i = 0; i < truth.size(); ++i) {
    out.bits[i] = rng.Bernoulli(f.value()) ? truth.bits[i] : rng.Bernoulli(0.5);
  }
  return out;
}

std::vector<std::int64_t> CountOnes(std::span<const ResponseBits> responses,
                                    std::size_t n) {
  std::vector<std::int64_t> counts(n, 0);
  for (const auto& r : responses) {
    if (r.size() != n) {
      throw Error(ErrorCode::kInvalidArgument,
                  "response has " + std::to_string(r.size()) +
                      " bits, expected " + std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) counts[i] += r.bits[i] ? 1 : 0;
  }
  return counts;
}

FrequencyEstimate EstimateCounts(std::span<const std::int64_t> observed_ones,
                                 std::int64_t total, CoinBias f) {
  if (total < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "total must be at least 1, got " + std::to_string(total));
  }
  FrequencyEstimate est;
  est.total = total;
  est.raw.reserve(observed_ones.size());
  est.clamped.reserve(observed_ones.size());
  const double noise_ones = (1.0 - f.value()) * 0.5 * static_cast<double>(total);
  for (std::size_t i = 0; i < observed_ones.size(); ++i) {
    if (observed_ones[i] < 0 || observed_ones[i] > total) {
      throw Error(ErrorCode::kOutOfRange,
                  "bin " + std::to_string(i) + " has " +
                      std::to_string(observed_ones[i]) +
                      " ones, outside [0, " + std::to_string(total) + "]");
    }
    double raw = (static_cast<double>(observed_ones[i]) - noise_ones) / f.value();
    est.raw.push_back(raw);
    est.clamped.push_back(std::max(raw, 0.0));
  }
  return est;
}

AdvantageRecord AttackerAdvantage(std::size_t n, CoinBias f) {
  if (n == 0) {
    throw Error(ErrorCode::kInvalidArgument, "n must be at least 1");
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  const double keep = f.value() + (1.0 - f.value()) / 2.0;
  AdvantageRecord rec;
  rec.n = n;
  rec.f = f.value();
  rec.p_guess = inv_n;
  rec.p_posterior = (keep * inv_n) / (f.value() * inv_n + (1.0 - f.value()) / 2.0);
  rec.advantage = rec.p_posterior / rec.p_guess;
  return rec;
}

double AdvantageLimit(CoinBias f) {
  const double noise = (1.0 - f.value()) / 2.0;
  if (noise == 0.0) return std::numeric_limits<double>::infinity();
  return (f.value() + noise) / noise;
}

double MapGuessSuccessProbability(std::size_t n, CoinBias f) {
  if (n == 0) {
    throw Error(ErrorCode::kInvalidArgument, "n must be at least 1");
  }
  const double q1 = f.OneProbability(true);
  const double q0 = f.OneProbability(false);
  const double nd = static_cast<double>(n);
  // True bit set: the guess is uniform over 1 + B set bits, B ~ Bin(n-1, q0),
  // and E[1 / (1 + B)] = (1 - (1 - q0)^n) / (n q0).
  const double share =
      q0 == 0.0 ? 1.0 : (1.0 - std::pow(1.0 - q0, nd)) / (nd * q0);
  // Nothing set: uniform guess over all n.
  const double all_zero = (1.0 - q1) * std::pow(1.0 - q0, nd - 1.0);
  return q1 * share + all_zero / nd;
}

std::size_t DecodeMostLikely(const ResponseBits& response, CoinBias f,
                             Rng& rng) {
  const std::size_t n = response.size();
  if (n == 0) {
    throw Error(ErrorCode::kInvalidArgument, "empty response");
  }
  std::vector<std::int64_t> ones(n);
  for (std::size_t i = 0; i < n; ++i) ones[i] = response.bits[i] ? 1 : 0;
  const FrequencyEstimate est = EstimateCounts(ones, 1, f);
  const double best = *std::max_element(est.raw.begin(), est.raw.end());
  std::vector<std::size_t> ties;
  for (std::size_t i = 0; i < n; ++i) {
    if (est.raw[i] == best) ties.push_back(i);
  }
  return ties[rng.UniformIndex(ties.size())];
}

}  // namespace dpmarket
