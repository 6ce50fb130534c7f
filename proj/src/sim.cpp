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

#include "dpmarket/sim.hpp"

#include <algorithm>
#include <cmath>

#include "dpmarket/error.hpp"

namespace dpmarket::sim {

namespace {

// Attacker-side tie-breaking draws from its own stream so the providers'
// streams are identical across modes.
constexpr std::uint64_t kDecoderStream = 0xA7'0000'0000'0001ULL;

struct ProviderDraw {
  std::size_t truth;
  ResponseBits noisy;
};

ProviderDraw DrawProvider(const ExperimentConfig& config, const Rng& root,
                          std::size_t p) {
  Rng rng = root.Split(p);
  const std::size_t truth =
      SampleTruth(config.n_choices, config.mean, config.sd, rng);
  ResponseBits noisy =
      Randomize(EncodeTruth(config.n_choices, truth), config.coin, rng);
  return {truth, std::move(noisy)};
}

}  // namespace

void ExperimentConfig::Validate() const {
  if (n_choices < 2) {
    throw Error(ErrorCode::kInvalidArgument, "need at least 2 choices");
  }
  if (!(mean >= 0.0 && mean < static_cast<double>(n_choices))) {
    throw Error(ErrorCode::kInvalidArgument,
                "mean must lie in [0, n_choices)");
  }
  if (!(sd >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sd must be non-negative");
  }
  if (provider_counts.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "at least one provider count is required");
  }
  for (std::size_t c : provider_counts) {
    if (c < 1) {
      throw Error(ErrorCode::kInvalidArgument, "provider counts must be >= 1");
    }
  }
}

std::size_t SampleTruth(std::size_t n, double mean, double sd, Rng& rng) {
  const double x = std::round(rng.Normal(mean, sd));
  return static_cast<std::size_t>(
      std::clamp(x, 0.0, static_cast<double>(n - 1)));
}

std::vector<std::size_t> SampleTruths(const ExperimentConfig& config,
                                      std::size_t count) {
  config.Validate();
  const Rng root(config.seed);
  std::vector<std::size_t> out;
  out.reserve(count);
  for (std::size_t p = 0; p < count; ++p) {
    Rng rng = root.Split(p);
    out.push_back(SampleTruth(config.n_choices, config.mean, config.sd, rng));
  }
  return out;
}

double TotalVariation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw Error(ErrorCode::kInvalidArgument, "distributions differ in length");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

AccuracyReport RunAccuracyExperiment(const ExperimentConfig& config) {
  config.Validate();
  const Rng root(config.seed);
  const std::size_t n = config.n_choices;
  const double f = config.coin.value();

  AccuracyReport report{config, {}};
  for (std::size_t total : config.provider_counts) {
    AccuracyResult r;
    r.providers = total;
    r.true_counts.assign(n, 0);
    r.observed_ones.assign(n, 0);
    for (std::size_t p = 0; p < total; ++p) {
      const ProviderDraw draw = DrawProvider(config, root, p);
      ++r.true_counts[draw.truth];
      for (std::size_t i = 0; i < n; ++i) r.observed_ones[i] += draw.noisy.bits[i];
    }
    const auto total_i = static_cast<std::int64_t>(total);
    r.estimate = EstimateCounts(r.observed_ones, total_i, config.coin);

    std::vector<double> truth_dist(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth_dist[i] = static_cast<double>(r.true_counts[i]) / static_cast<double>(total);
    }
    r.total_variation = TotalVariation(truth_dist, r.estimate.Distribution());

    r.z_scores.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double p_one = f * truth_dist[i] + (1.0 - f) * 0.5;
      const double sigma =
          std::sqrt(static_cast<double>(total) * p_one * (1.0 - p_one)) / f;
      const double err = r.estimate.raw[i] - static_cast<double>(r.true_counts[i]);
      r.z_scores[i] = sigma > 0.0 ? err / sigma : 0.0;
    }
    report.results.push_back(std::move(r));
  }
  return report;
}

std::string_view ToString(AttackMode mode) {
  return mode == AttackMode::kNoNoise ? "no_noise" : "rappor";
}

AttackMode ParseAttackMode(std::string_view name) {
  if (name == "no_noise") return AttackMode::kNoNoise;
  if (name == "rappor") return AttackMode::kRappor;
  throw Error(ErrorCode::kParseError,
              "unknown attack mode '" + std::string(name) + "'");
}

AttackerReport RunAttackerExperiment(const ExperimentConfig& config,
                                     AttackMode mode, std::size_t providers) {
  config.Validate();
  if (providers < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one provider");
  }
  const Rng root(config.seed);
  Rng decoder = root.Split(kDecoderStream);
  const std::size_t n = config.n_choices;

  AttackerReport report;
  report.mode = mode;
  report.providers = providers;
  report.analytic_success = mode == AttackMode::kNoNoise
                                ? 1.0
                                : MapGuessSuccessProbability(n, config.coin);
  report.steps.reserve(providers);

  double published_sum = 0.0;
  double previous_mean = 0.0;
  std::size_t exact = 0;
  double abs_error = 0.0;
  for (std::size_t k = 1; k <= providers; ++k) {
    const ProviderDraw draw = DrawProvider(config, root, k - 1);
    const std::size_t published =
        mode == AttackMode::kNoNoise
            ? draw.truth
            : DecodeMostLikely(draw.noisy, config.coin, decoder);
    published_sum += static_cast<double>(published);
    const double mean = published_sum / static_cast<double>(k);

    const double reconstructed = mean * static_cast<double>(k) -
                                 previous_mean * static_cast<double>(k - 1);
    const std::size_t guess = static_cast<std::size_t>(std::clamp(
        std::round(reconstructed), 0.0, static_cast<double>(n - 1)));
    previous_mean = mean;

    if (guess == draw.truth) ++exact;
    abs_error += std::abs(static_cast<double>(guess) - static_cast<double>(draw.truth));
    report.steps.push_back({draw.truth, mean, guess});
  }
  report.exact_guess_rate = static_cast<double>(exact) / static_cast<double>(providers);
  report.mean_absolute_error = abs_error / static_cast<double>(providers);
  return report;
}

std::vector<AdvantageRecord> AdvantageSweep(std::span<const std::size_t> n_values,
                                            std::span<const double> f_values) {
  std::vector<AdvantageRecord> rows;
  rows.reserve(n_values.size() * f_values.size());
  for (double f : f_values) {
    const CoinBias coin(f);
    for (std::size_t n : n_values) rows.push_back(AttackerAdvantage(n, coin));
  }
  return rows;
}

}  // namespace dpmarket::sim
