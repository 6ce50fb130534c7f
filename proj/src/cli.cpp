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

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "dpmarket/error.hpp"
#include "dpmarket/ledger.hpp"
#include "dpmarket/protocol.hpp"
#include "dpmarket/serialize.hpp"
#include "dpmarket/sim.hpp"

namespace dpmarket::cli {

namespace {

// Thrown for bad flag values that CLI11 itself accepted.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OutputOptions {
  std::string format = "json";
  std::string path;
};

void AddOutputOptions(CLI::App* sub, OutputOptions& o, bool allow_csv) {
  auto* fmt = sub->add_option("--format", o.format, "Output format");
  if (allow_csv) {
    fmt->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  } else {
    fmt->check(CLI::IsMember({"json"}))->capture_default_str();
  }
  sub->add_option("--output", o.path, "Write to this file instead of stdout");
}

void Emit(const OutputOptions& o, const std::string& text, std::ostream& out) {
  if (o.path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(o.path, std::ios::binary);
  if (!file) throw UsageError("cannot write output file " + o.path);
  file << text;
}

std::string Dump(const Json& j) { return j.dump(2) + "\n"; }

std::size_t ParseSize(std::string_view text) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw UsageError("invalid integer '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string> SplitCommas(std::string_view text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    parts.emplace_back(text.substr(start, comma - start));
    start = comma + 1;
  }
  return parts;
}

// Missing-input errors from file loading are reported separately from
// missing on-chain records.
struct MissingFile : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Json ReadJsonFile(const std::string& path) {
  if (!std::filesystem::exists(path)) throw MissingFile("no such file: " + path);
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path + ": " + e.what());
  }
}

SessionTranscript LoadTranscript(const std::string& path) {
  return TranscriptFromJson(ReadJsonFile(path));
}

sim::ExperimentConfig MakeExperimentConfig(std::size_t n, double mean, double sd,
                                           double f, std::uint64_t seed) {
  sim::ExperimentConfig config;
  config.n_choices = n;
  config.mean = mean;
  config.sd = sd;
  config.coin = CoinBias(f);
  config.seed = seed;
  return config;
}

}  // namespace

std::vector<std::size_t> ParseIndexList(std::string_view text) {
  std::vector<std::size_t> values;
  for (const std::string& part : SplitCommas(text)) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      values.push_back(ParseSize(part));
      continue;
    }
    const std::size_t lo = ParseSize(std::string_view(part).substr(0, dots));
    const std::size_t hi = ParseSize(std::string_view(part).substr(dots + 2));
    if (lo > hi) throw UsageError("empty range '" + part + "'");
    for (std::size_t v = lo; v <= hi; ++v) values.push_back(v);
  }
  return values;
}

std::vector<double> ParseDoubleList(std::string_view text) {
  std::vector<double> values;
  for (const std::string& part : SplitCommas(text)) {
    double value = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (ec != std::errc() || ptr != part.data() + part.size()) {
      throw UsageError("invalid number '" + part + "'");
    }
    values.push_back(value);
  }
  return values;
}

int Run(const std::vector<std::string>& argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Privacy-preserving crowdsourced data marketplace simulator"};
  app.name(argv.empty() ? "dpmarket" : argv.front());
  app.require_subcommand(1);

  // run-session
  auto* run = app.add_subcommand("run-session",
                                 "Run one end-to-end marketplace session");
  struct {
    std::size_t n = 20;
    std::int64_t price = 1000;
    std::int64_t required = 5;
    std::size_t providers = 10;
    double f = 0.5;
    std::uint64_t seed = 0;
    std::string predicate = "all";
    std::string regions = "A";
    std::optional<double> mean;
    double sd = 2.0;
    bool wrong_reveal = false;
    bool tamper = false;
    OutputOptions output;
  } rs;
  run->add_option("--choices", rs.n, "Number of query choices")->capture_default_str();
  run->add_option("--price", rs.price, "Agreed price")->capture_default_str();
  run->add_option("--required", rs.required, "Required accepted responses (N_R)")
      ->capture_default_str();
  run->add_option("--providers", rs.providers, "Number of providers")
      ->capture_default_str();
  run->add_option("--f", rs.f, "Coin bias")->capture_default_str();
  run->add_option("--seed", rs.seed, "Root seed")->required();
  run->add_option("--predicate", rs.predicate,
                  "Filter: all | region=X,since=T,until=T")
      ->capture_default_str();
  run->add_option("--regions", rs.regions, "Comma-separated provider regions")
      ->capture_default_str();
  run->add_option("--mean", rs.mean, "Mean true choice (default n/2)");
  run->add_option("--sd", rs.sd, "Std. dev. of true choices")->capture_default_str();
  run->add_flag("--inject-wrong-reveal", rs.wrong_reveal,
                "Operator reveals a wrong s2");
  run->add_flag("--inject-tamper", rs.tamper,
                "Flip a ciphertext bit of the first accepted response");
  AddOutputOptions(run, rs.output, false);
  run->set_config("--config", "", "key=value file overriding flags");

  // accuracy
  auto* acc = app.add_subcommand("accuracy", "Estimator accuracy vs provider count");
  struct {
    std::size_t n = 20;
    std::string counts = "500,1000,5000,10000";
    double mean = 10.0;
    double sd = 2.0;
    double f = 0.5;
    std::uint64_t seed = 0;
    OutputOptions output{"csv", ""};
  } ac;
  acc->add_option("--choices", ac.n, "Number of choices")->capture_default_str();
  acc->add_option("--provider-counts", ac.counts, "Comma-separated provider counts")
      ->capture_default_str();
  acc->add_option("--mean", ac.mean, "Mean true choice")->capture_default_str();
  acc->add_option("--sd", ac.sd, "Std. dev. of true choices")->capture_default_str();
  acc->add_option("--f", ac.f, "Coin bias")->capture_default_str();
  acc->add_option("--seed", ac.seed, "Root seed")->required();
  AddOutputOptions(acc, ac.output, true);
  acc->set_config("--config", "", "key=value file overriding flags");

  // attacker
  auto* atk = app.add_subcommand("attacker", "Sequential running-mean attacker");
  struct {
    std::string mode = "rappor";
    std::size_t providers = 1000;
    std::size_t n = 20;
    double mean = 10.0;
    double sd = 2.0;
    double f = 0.5;
    std::uint64_t seed = 0;
    OutputOptions output;
  } at;
  atk->add_option("--mode", at.mode, "no_noise | rappor")
      ->check(CLI::IsMember({"no_noise", "rappor"}))
      ->capture_default_str();
  atk->add_option("--providers", at.providers, "Number of providers")
      ->capture_default_str();
  atk->add_option("--choices", at.n, "Number of choices")->capture_default_str();
  atk->add_option("--mean", at.mean, "Mean true choice")->capture_default_str();
  atk->add_option("--sd", at.sd, "Std. dev. of true choices")->capture_default_str();
  atk->add_option("--f", at.f, "Coin bias")->capture_default_str();
  atk->add_option("--seed", at.seed, "Root seed")->required();
  AddOutputOptions(atk, at.output, true);
  atk->set_config("--config", "", "key=value file overriding flags");

  // advantage
  auto* adv = app.add_subcommand("advantage", "Analytic attacker advantage table");
  struct {
    std::string n_list = "2..100";
    std::string f_list = "0.5,0.2";
    OutputOptions output{"csv", ""};
  } av;
  adv->add_option("--n", av.n_list, "Choice counts, e.g. 2..100,1000")
      ->capture_default_str();
  adv->add_option("--f", av.f_list, "Coin biases, e.g. 0.5,0.2")->capture_default_str();
  AddOutputOptions(adv, av.output, true);

  // verify
  auto* ver = app.add_subcommand("verify", "Check a response or filter against the chain");
  struct {
    std::string transcript;
    std::string which;
  } vf;
  ver->add_option("--transcript", vf.transcript, "Session transcript JSON")->required();
  ver->add_option("--which", vf.which, "response:<address hex> | filter")->required();

  // gas
  auto* gas = app.add_subcommand("gas", "Gas and fiat report for a session");
  struct {
    std::string transcript;
    std::optional<double> rate;
    std::string ledger_config;
    OutputOptions output;
  } gs;
  gas->add_option("--transcript", gs.transcript, "Session transcript JSON")->required();
  gas->add_option("--fiat-rate", gs.rate, "USD per gas unit (default 3.8438e-5)");
  gas->add_option("--ledger-config", gs.ledger_config,
                  "key=value gas schedule / fiat rate file");
  AddOutputOptions(gas, gs.output, true);

  std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (run->parsed()) {
      SessionRunConfig config;
      config.terms = MarketTerms{Query::WithIndexLabels(rs.n), rs.price, rs.required,
                                 CoinBias(rs.f)};
      config.providers = rs.providers;
      config.seed = rs.seed;
      config.predicate = rs.predicate;
      config.regions = SplitCommas(rs.regions);
      config.inject_wrong_reveal = rs.wrong_reveal;
      config.inject_tamper = rs.tamper;
      const double mean = rs.mean.value_or(static_cast<double>(rs.n) / 2.0);
      const double sd = rs.sd;
      const std::size_t n = rs.n;
      if (!(sd > 0.0)) throw UsageError("--sd must be positive");
      config.choose = [n, mean, sd](std::size_t, Rng& rng) {
        return sim::SampleTruth(n, mean, sd, rng);
      };
      ParsePredicate(config.predicate);

      const SessionRunResult result = RunSession(config);
      Emit(rs.output, Dump(TranscriptToJson(result.transcript)), out);
      if (!result.failure) return kExitOk;
      err << "session failed: " << result.failure_message << "\n";
      switch (*result.failure) {
        case ErrorCode::kThresholdNotMet: return kExitThreshold;
        case ErrorCode::kRevealMismatch:
        case ErrorCode::kIntegrityFailure: return kExitDispute;
        default: return kExitUsage;
      }
    }

    if (acc->parsed()) {
      sim::ExperimentConfig config =
          MakeExperimentConfig(ac.n, ac.mean, ac.sd, ac.f, ac.seed);
      config.provider_counts = ParseIndexList(ac.counts);
      const sim::AccuracyReport report = sim::RunAccuracyExperiment(config);
      Emit(ac.output,
           ac.output.format == "csv" ? AccuracyReportToCsv(report)
                                     : Dump(AccuracyReportToJson(report)),
           out);
      return kExitOk;
    }

    if (atk->parsed()) {
      const sim::ExperimentConfig config =
          MakeExperimentConfig(at.n, at.mean, at.sd, at.f, at.seed);
      const sim::AttackerReport report = sim::RunAttackerExperiment(
          config, sim::ParseAttackMode(at.mode), at.providers);
      Emit(at.output,
           at.output.format == "csv" ? AttackerReportToCsv(report)
                                     : Dump(AttackerReportToJson(report)),
           out);
      return kExitOk;
    }

    if (adv->parsed()) {
      const auto n_values = ParseIndexList(av.n_list);
      const auto f_values = ParseDoubleList(av.f_list);
      const auto rows = sim::AdvantageSweep(n_values, f_values);
      Emit(av.output,
           av.output.format == "csv" ? AdvantageTableToCsv(rows)
                                     : Dump(AdvantageTableToJson(rows)),
           out);
      return kExitOk;
    }

    if (ver->parsed()) {
      const SessionTranscript t = LoadTranscript(vf.transcript);
      const auto& events = t.contract.events();
      bool ok = false;
      if (vf.which == "filter") {
        if (!t.filter) {
          throw Error(ErrorCode::kWrongPhase, "transcript has no filter vector");
        }
        ok = VerifyFilter(*t.filter, events);
      } else if (vf.which.rfind("response:", 0) == 0) {
        Address address;
        try {
          address = Address::FromHex(vf.which.substr(9));
        } catch (const Error& e) {
          throw UsageError(std::string("--which: ") + e.what());
        }
        auto it = std::find_if(t.submissions.begin(), t.submissions.end(),
                               [&](const Submission& s) { return s.address == address; });
        if (it == t.submissions.end()) {
          throw Error(ErrorCode::kMissingRecord,
                      "transcript has no submission from " + address.ToHex());
        }
        ok = VerifyResponseIntegrity(*it, events);
      } else {
        throw UsageError("--which must be 'filter' or 'response:<address>'");
      }
      out << (ok ? "true" : "false") << "\n";
      return ok ? kExitOk : kExitDispute;
    }

    if (gas->parsed()) {
      const SessionTranscript t = LoadTranscript(gs.transcript);
      FiatRate rate;
      if (!gs.ledger_config.empty()) {
        if (!std::filesystem::exists(gs.ledger_config)) {
          throw MissingFile("no such file: " + gs.ledger_config);
        }
        rate = LoadLedgerConfig(gs.ledger_config).fiat;
      }
      if (gs.rate) rate.usd_per_gas = *gs.rate;
      const GasReport report = MakeGasReport(t.contract.events(), rate);
      Emit(gs.output,
           gs.output.format == "csv" ? GasReportToCsv(report)
                                     : Dump(GasReportToJson(report)),
           out);
      return kExitOk;
    }
  } catch (const MissingFile& e) {
    err << "missing input: " << e.what() << "\n";
    return kExitMissingInput;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << ToString(e.code()) << ": " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::kInvalidArgument:
      case ErrorCode::kOutOfRange: return kExitUsage;
      case ErrorCode::kParseError:
      case ErrorCode::kMalformedInput:
      case ErrorCode::kIntegrityFailure: return kExitParse;
      case ErrorCode::kThresholdNotMet: return kExitThreshold;
      default: return kExitDispute;
    }
  }
  return kExitUsage;
}

}  // namespace dpmarket::cli
