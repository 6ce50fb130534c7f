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

#include "dpmarket/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dpmarket/serialize.hpp"

namespace dpmarket::cli {
namespace {

struct Output {
  int code;
  std::string out;
  std::string err;
};

Output Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "dpmarket");
  std::ostringstream out, err;
  const int code = Run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string TempPath(const std::string& name) {
  return (std::filesystem::path(::testing::TempDir()) / name).string();
}

std::string WriteFile(const std::string& name, const std::string& text) {
  const std::string path = TempPath(name);
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

int CountLines(const std::string& s) {
  return static_cast<int>(std::count(s.begin(), s.end(), '\n'));
}

TEST(ListParsingTest, RangesAndValues) {
  EXPECT_EQ(ParseIndexList("2..5,10"), (std::vector<std::size_t>{2, 3, 4, 5, 10}));
  EXPECT_EQ(ParseDoubleList("0.5,0.2"), (std::vector<double>{0.5, 0.2}));
  EXPECT_ANY_THROW(ParseIndexList("5..2"));
  EXPECT_ANY_THROW(ParseIndexList("x"));
  EXPECT_ANY_THROW(ParseDoubleList("0.5,"));
}

TEST(RunSessionCommandTest, HappyPath) {
  const Output o = Invoke({"run-session", "--providers", "10", "--required", "5",
                           "--f", "0.5", "--seed", "3"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const Json j = Json::parse(o.out);
  EXPECT_EQ(j["status"], "Settled");
  EXPECT_EQ(j["contract"]["phase"], "Settled");
  const std::string bits = j["filter"].get<std::string>();
  EXPECT_EQ(std::count(bits.begin(), bits.end(), '1'), 5);
}

TEST(RunSessionCommandTest, ThresholdExit) {
  const Output o = Invoke({"run-session", "--providers", "3", "--required", "5",
                           "--seed", "3"});
  EXPECT_EQ(o.code, kExitThreshold);
}

TEST(RunSessionCommandTest, WrongRevealExit) {
  const Output o = Invoke({"run-session", "--providers", "6", "--required", "5",
                           "--seed", "3", "--inject-wrong-reveal"});
  EXPECT_EQ(o.code, kExitDispute);
  const Json j = Json::parse(o.out);
  EXPECT_EQ(j["contract"]["deposit_balance"], 1000);
  EXPECT_EQ(j["status"], "Disputed");
}

TEST(RunSessionCommandTest, UsageErrors) {
  EXPECT_EQ(Invoke({"run-session", "--providers", "6"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"run-session", "--seed", "1", "--f", "0"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"run-session", "--seed", "1", "--required", "0"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Invoke({}).code, kExitUsage);
}

TEST(AccuracyCommandTest, DefaultShape) {
  const Output o = Invoke({"accuracy", "--seed", "1"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  EXPECT_EQ(CountLines(o.out), 1 + 4 * 20);
  EXPECT_EQ(o.out.substr(0, o.out.find('\n')), "N,bin,true_count,est_count,z");
}

TEST(AccuracyCommandTest, NoNoiseZerosZ) {
  const Output o = Invoke({"accuracy", "--seed", "1", "--f", "1.0", "--format", "json"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  for (const auto& r : Json::parse(o.out)["results"]) {
    for (const auto& z : r["z_scores"]) EXPECT_EQ(z.get<double>(), 0.0);
  }
}

TEST(AccuracyCommandTest, FixedSeedFilesIdentical) {
  const std::string a = TempPath("acc_a.csv"), b = TempPath("acc_b.csv");
  ASSERT_EQ(Invoke({"accuracy", "--seed", "9", "--output", a}).code, kExitOk);
  ASSERT_EQ(Invoke({"accuracy", "--seed", "9", "--output", b}).code, kExitOk);
  std::ifstream fa(a), fb(b);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  EXPECT_FALSE(sa.str().empty());
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(AttackerCommandTest, Modes) {
  Output o = Invoke({"attacker", "--mode", "no_noise", "--seed", "1", "--format", "json"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  EXPECT_EQ(Json::parse(o.out)["exact_guess_rate"], 1.0);
  o = Invoke({"attacker", "--mode", "rappor", "--seed", "1", "--format", "json"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  EXPECT_LE(Json::parse(o.out)["exact_guess_rate"].get<double>(), 0.25);
  EXPECT_EQ(Invoke({"attacker", "--mode", "oracle", "--seed", "1"}).code, kExitUsage);
}

TEST(AdvantageCommandTest, ApproachesLimits) {
  const Output o = Invoke({"advantage", "--n", "2..1000", "--f", "0.5,0.2",
                           "--format", "json"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const Json rows = Json::parse(o.out);
  ASSERT_EQ(rows.size(), 2u * 999u);
  EXPECT_NEAR(rows[998]["advantage"].get<double>(), 3.0, 0.05);
  EXPECT_NEAR(rows[1997]["advantage"].get<double>(), 1.5, 0.05);
}

class TranscriptCommandTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const Output o = Invoke({"run-session", "--providers", "5", "--required", "5",
                             "--seed", "21"});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    path_ = new std::string(WriteFile("session.json", o.out));
    transcript_ = new std::string(o.out);
  }
  static void TearDownTestSuite() {
    delete path_;
    delete transcript_;
  }
  static std::string* path_;
  static std::string* transcript_;
};
std::string* TranscriptCommandTest::path_ = nullptr;
std::string* TranscriptCommandTest::transcript_ = nullptr;

TEST_F(TranscriptCommandTest, VerifyFilterAndResponse) {
  Output o = Invoke({"verify", "--transcript", *path_, "--which", "filter"});
  EXPECT_EQ(o.code, kExitOk);
  EXPECT_EQ(o.out, "true\n");
  const Json j = Json::parse(*transcript_);
  const std::string addr = j["submissions"][0]["address"];
  o = Invoke({"verify", "--transcript", *path_, "--which", "response:" + addr});
  EXPECT_EQ(o.code, kExitOk);
  EXPECT_EQ(o.out, "true\n");
}

TEST_F(TranscriptCommandTest, VerifyDetectsTamper) {
  Json j = Json::parse(*transcript_);
  std::string ct = j["submissions"][0]["ciphertext"];
  ct.back() = ct.back() == '0' ? '1' : '0';
  j["submissions"][0]["ciphertext"] = ct;
  const std::string tampered = WriteFile("tampered.json", j.dump());
  const std::string addr = j["submissions"][0]["address"];
  const Output o = Invoke({"verify", "--transcript", tampered, "--which", "response:" + addr});
  EXPECT_EQ(o.code, kExitDispute);
  EXPECT_EQ(o.out, "false\n");
}

TEST_F(TranscriptCommandTest, VerifyBadInputs) {
  EXPECT_EQ(Invoke({"verify", "--transcript", TempPath("absent.json"), "--which", "filter"}).code,
            kExitMissingInput);
  const std::string junk = WriteFile("junk.json", "{not json");
  EXPECT_EQ(Invoke({"verify", "--transcript", junk, "--which", "filter"}).code, kExitParse);
  EXPECT_EQ(Invoke({"verify", "--transcript", *path_, "--which", "response:00"}).code,
            kExitUsage);
}

TEST_F(TranscriptCommandTest, GasReport) {
  const Output o = Invoke({"gas", "--transcript", *path_, "--format", "json"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const Json j = Json::parse(o.out);
  EXPECT_EQ(j["total_gas"], 1156714);
  const Output csv = Invoke({"gas", "--transcript", *path_, "--format", "csv",
                             "--fiat-rate", "3.8438e-5"});
  ASSERT_EQ(csv.code, kExitOk) << csv.err;
  EXPECT_NE(csv.out.find("deploy,1,660809,25.40\n"), std::string::npos);
  EXPECT_NE(csv.out.find("total,9,1156714,"), std::string::npos);
}

TEST_F(TranscriptCommandTest, GasWithLedgerConfig) {
  const std::string cfg = WriteFile("ledger.cfg", "fiat.usd_per_gas = 1e-6\n");
  const Output o = Invoke({"gas", "--transcript", *path_, "--ledger-config", cfg,
                           "--format", "json"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  EXPECT_NEAR(Json::parse(o.out)["fiat_usd"].get<double>(), 1.156714, 1e-9);
}

TEST(DeterminismTest, ByteIdenticalAcrossRuns) {
  const std::vector<std::vector<std::string>> commands = {
      {"run-session", "--providers", "12", "--seed", "5", "--regions", "A,B",
       "--predicate", "region=A"},
      {"accuracy", "--seed", "5", "--format", "json"},
      {"attacker", "--mode", "rappor", "--seed", "5"},
      {"advantage", "--n", "1..50"},
  };
  for (const auto& cmd : commands) {
    const Output a = Invoke(cmd), b = Invoke(cmd);
    EXPECT_EQ(a.code, b.code);
    EXPECT_EQ(a.out, b.out) << cmd.front();
  }
}

}  // namespace
}  // namespace dpmarket::cli
