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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dpmarket/error.hpp"
#include "dpmarket/serialize.hpp"

namespace dpmarket::sim {
namespace {

TEST(SampleTruthTest, ZeroSpreadIsRoundedMean) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(SampleTruth(20, 10.0, 0.0, rng), 10u);
  EXPECT_EQ(SampleTruth(20, 9.6, 0.0, rng), 10u);
}

TEST(SampleTruthTest, ClampedToRange) {
  Rng rng(2);
  for (int i = 0; i < 10000; ++i) EXPECT_LT(SampleTruth(20, 10.0, 2.0, rng), 20u);
  EXPECT_EQ(SampleTruth(20, -50.0, 0.0, rng), 0u);
  EXPECT_EQ(SampleTruth(20, 500.0, 0.0, rng), 19u);
}

TEST(SampleTruthTest, EmpiricalMean) {
  ExperimentConfig c;
  constexpr std::size_t kN = 100000;
  const auto truths = SampleTruths(c, kN);
  const double mean =
      std::accumulate(truths.begin(), truths.end(), 0.0) / static_cast<double>(kN);
  EXPECT_NEAR(mean, 10.0, 4 * 2.0 / std::sqrt(kN));
}

TEST(ExperimentConfigTest, Validation) {
  ExperimentConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.n_choices = 1;
  EXPECT_THROW(c.Validate(), Error);
  c = {};
  c.provider_counts = {};
  EXPECT_THROW(c.Validate(), Error);
  c = {};
  c.sd = -1;
  EXPECT_THROW(c.Validate(), Error);
}

TEST(AccuracyTest, NoNoiseIsExact) {
  ExperimentConfig c;
  c.coin = CoinBias(1.0);
  for (const AccuracyResult& r : RunAccuracyExperiment(c).results) {
    EXPECT_EQ(r.total_variation, 0.0);
    for (double z : r.z_scores) EXPECT_EQ(z, 0.0);
  }
}

TEST(AccuracyTest, ZScoresWithinFour) {
  ExperimentConfig c;
  c.provider_counts = {10000};
  const AccuracyReport report = RunAccuracyExperiment(c);
  ASSERT_EQ(report.results.size(), 1u);
  const AccuracyResult& r = report.results[0];
  EXPECT_EQ(std::accumulate(r.true_counts.begin(), r.true_counts.end(), std::int64_t{0}),
            10000);
  for (double z : r.z_scores) EXPECT_LE(std::abs(z), 4.0);
}

TEST(AccuracyTest, MedianTotalVariationShrinks) {
  std::vector<std::vector<double>> tv(4);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    ExperimentConfig c;
    c.seed = seed;
    const auto report = RunAccuracyExperiment(c);
    for (std::size_t i = 0; i < 4; ++i) tv[i].push_back(report.results[i].total_variation);
  }
  double prev = 2.0;
  for (auto& v : tv) {
    std::nth_element(v.begin(), v.begin() + 10, v.end());
    EXPECT_LT(v[10], prev);
    prev = v[10];
  }
}

TEST(AccuracyTest, PureFunctionOfConfig) {
  ExperimentConfig c;
  c.seed = 5;
  EXPECT_EQ(AccuracyReportToCsv(RunAccuracyExperiment(c)),
            AccuracyReportToCsv(RunAccuracyExperiment(c)));
}

TEST(TotalVariationTest, Basics) {
  const std::vector<double> p{0.5, 0.5}, q{1.0, 0.0};
  EXPECT_DOUBLE_EQ(TotalVariation(p, p), 0.0);
  EXPECT_DOUBLE_EQ(TotalVariation(p, q), 0.5);
  EXPECT_THROW(TotalVariation(p, std::vector<double>{1.0}), Error);
}

TEST(AttackerTest, NoNoiseRecoversEveryAnswer) {
  const AttackerReport r = RunAttackerExperiment({}, AttackMode::kNoNoise, 1000);
  EXPECT_EQ(r.exact_guess_rate, 1.0);
  EXPECT_EQ(r.mean_absolute_error, 0.0);
  EXPECT_EQ(r.steps.size(), 1000u);
}

TEST(AttackerTest, RapporDegenerateCoinMatchesNoNoise) {
  ExperimentConfig c;
  c.coin = CoinBias(1.0);
  const AttackerReport a = RunAttackerExperiment(c, AttackMode::kRappor, 500);
  const AttackerReport b = RunAttackerExperiment(c, AttackMode::kNoNoise, 500);
  EXPECT_EQ(a.exact_guess_rate, 1.0);
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    EXPECT_EQ(a.steps[i].guess, b.steps[i].guess);
    EXPECT_EQ(a.steps[i].truth, b.steps[i].truth);
  }
}

TEST(AttackerTest, RapporBoundsGuessRate) {
  const AttackerReport r = RunAttackerExperiment({}, AttackMode::kRappor, 1000);
  EXPECT_LE(r.exact_guess_rate, 0.25);
  EXPECT_NEAR(r.analytic_success, MapGuessSuccessProbability(20, CoinBias::Fair()), 1e-15);
}

TEST(AttackModeTest, Names) {
  EXPECT_EQ(ParseAttackMode("no_noise"), AttackMode::kNoNoise);
  EXPECT_EQ(ParseAttackMode("rappor"), AttackMode::kRappor);
  EXPECT_EQ(ToString(AttackMode::kRappor), "rappor");
  EXPECT_THROW(ParseAttackMode("laplace"), Error);
}

TEST(AdvantageSweepTest, RowsAndLimits) {
  std::vector<std::size_t> ns(100);
  std::iota(ns.begin(), ns.end(), 1);
  const std::vector<double> fs{0.5, 0.2};
  const auto rows = AdvantageSweep(ns, fs);
  ASSERT_EQ(rows.size(), 200u);
  for (std::size_t i = 0; i < 100; ++i) {
    EXPECT_EQ(rows[i].f, 0.5);
    EXPECT_LT(rows[i].advantage, 3.0);
    if (i > 0) EXPECT_GT(rows[i].advantage, rows[i - 1].advantage);
  }
  EXPECT_NEAR(rows[0].advantage, 1.0, 1e-12);
  EXPECT_NEAR(rows[100].advantage, 1.0, 1e-12);
  EXPECT_NEAR(rows[199].advantage, 1.5, 0.05);
}

}  // namespace
}  // namespace dpmarket::sim
