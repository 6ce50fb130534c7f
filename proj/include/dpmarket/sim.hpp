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

#ifndef DPMARKET_SIM_HPP_
#define DPMARKET_SIM_HPP_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "dpmarket/ldp.hpp"
#include "dpmarket/rng.hpp"

namespace dpmarket::sim {

// Defaults reproduce the reference bushfire scenario: 20 choices, true
// answers from a normal distribution with mean 10 and sd 2, and provider
// counts 500 through 10000.
struct ExperimentConfig {
  std::size_t n_choices = 20;
  std::vector<std::size_t> provider_counts{500, 1000, 5000, 10000};
  double mean = 10.0;
  double sd = 2.0;
  CoinBias coin = CoinBias::Fair();
  std::uint64_t seed = 1;

  // Throws kInvalidArgument: n >= 2, mean in [0, n), sd > 0, counts >= 1.
  void Validate() const;
};

// clamp(round(Normal(mean, sd)), 0, n - 1).
std::size_t SampleTruth(std::size_t n, double mean, double sd, Rng& rng);

// Truth for providers 0..count-1, provider p drawing from root.Split(p).
std::vector<std::size_t> SampleTruths(const ExperimentConfig& config,
                                      std::size_t count);

struct AccuracyResult {
  std::size_t providers = 0;
  std::vector<std::int64_t> true_counts;
  std::vector<std::int64_t> observed_ones;
  FrequencyEstimate estimate;
  // Between the normalized true counts and FrequencyEstimate::Distribution().
  double total_variation = 0.0;
  // (raw - true) / sigma with sigma = sqrt(N p (1 - p)) / f; zero when both
  // the error and sigma vanish.
  std::vector<double> z_scores;
};

struct AccuracyReport {
  ExperimentConfig config;
  std::vector<AccuracyResult> results;  // one per provider count, in order
};

// For each provider count N: sample truths, randomize, count ones, estimate.
// Provider p uses root.Split(p) for both its truth and its noise, so the
// first providers are shared across provider counts.
AccuracyReport RunAccuracyExperiment(const ExperimentConfig& config);

double TotalVariation(std::span<const double> p, std::span<const double> q);

enum class AttackMode { kNoNoise, kRappor };
std::string_view ToString(AttackMode mode);
AttackMode ParseAttackMode(std::string_view name);

struct AttackerStep {
  std::size_t truth = 0;
  double observed_mean = 0.0;
  std::size_t guess = 0;
};

struct AttackerReport {
  AttackMode mode = AttackMode::kNoNoise;
  std::size_t providers = 0;
  double exact_guess_rate = 0.0;
  double mean_absolute_error = 0.0;
  // Per-step success probability of the attacker in this mode: 1 without
  // noise, MapGuessSuccessProbability(n, f) with randomization.
  double analytic_success = 0.0;
  std::vector<AttackerStep> steps;
};

// Providers submit one at a time; after each the attacker sees only the
// running mean of the published per-submission values (the true choice
// without noise, the single-response MAP decode with randomization) and
// guesses the newest value as mean_k * k - mean_{k-1} * (k - 1), rounded and
// clamped to a valid choice.
AttackerReport RunAttackerExperiment(const ExperimentConfig& config,
                                     AttackMode mode, std::size_t providers);

// Cross product of AttackerAdvantage over n_values x f_values, f-major.
std::vector<AdvantageRecord> AdvantageSweep(std::span<const std::size_t> n_values,
                                            std::span<const double> f_values);

}  // namespace dpmarket::sim

#endif  // DPMARKET_SIM_HPP_
