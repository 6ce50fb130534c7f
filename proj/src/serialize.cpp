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

#include "dpmarket/serialize.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "dpmarket/error.hpp"

namespace dpmarket {

namespace {

std::string BitString(const std::vector<bool>& bits) {
  std::string s;
  s.reserve(bits.size());
  for (bool b : bits) s.push_back(b ? '1' : '0');
  return s;
}

std::vector<bool> ParseBitString(std::string_view s) {
  std::vector<bool> bits;
  bits.reserve(s.size());
  for (char c : s) {
    if (c != '0' && c != '1') {
      throw Error(ErrorCode::kParseError, "bit string contains '" +
                                              std::string(1, c) + "'");
    }
    bits.push_back(c == '1');
  }
  return bits;
}

// nlohmann reports its own exception types; fold them into kParseError.
template <typename Fn>
auto Guarded(std::string_view what, Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError,
                std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::string FormatDouble(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

Json EventToJson(const ContractEvent& event) {
  Json params = Json::object();
  for (const auto& [k, v] : event.params) params[k] = v;
  return Json{{"seq", event.seq},
              {"op", ToString(event.op)},
              {"params", params},
              {"gas", event.gas},
              {"phase_after", ToString(event.phase_after)}};
}

ContractEvent EventFromJson(const Json& j) {
  return Guarded("contract event", [&] {
    ContractEvent e;
    e.seq = j.at("seq").get<std::uint64_t>();
    e.op = ParseContractOp(j.at("op").get<std::string>());
    for (const auto& [k, v] : j.at("params").items()) {
      e.params[k] = v.get<std::string>();
    }
    e.gas = j.at("gas").get<std::int64_t>();
    e.phase_after = ParsePhase(j.at("phase_after").get<std::string>());
    return e;
  });
}

std::string EventsToJsonLines(std::span<const ContractEvent> events) {
  std::string out;
  for (const auto& e : events) {
    out += EventToJson(e).dump();
    out += '\n';
  }
  return out;
}

std::vector<ContractEvent> EventsFromJsonLines(std::string_view text) {
  std::vector<ContractEvent> events;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    events.push_back(EventFromJson(
        Guarded("event line", [&] { return Json::parse(line); })));
  }
  return events;
}

Json ContractToJson(const Contract& c) {
  Json j{{"phase", ToString(c.phase())},
         {"query_digest", c.query_digest().ToHex()},
         {"s2_commitment", c.s2_commitment().ToHex()},
         {"price", c.price()},
         {"required_responses", c.required_responses()},
         {"response_count", c.response_records().size()}};
  if (c.filter_digest()) j["filter_digest"] = c.filter_digest()->ToHex();
  j["deposit_balance"] = c.deposit_balance();
  j["transferred_out"] = c.transferred_out();
  j["gas_used"] = c.gas_used();
  Json events = Json::array();
  for (const auto& e : c.events()) events.push_back(EventToJson(e));
  j["events"] = std::move(events);
  return j;
}

Json TranscriptToJson(const SessionTranscript& t) {
  Json j;
  j["terms"] = Json{{"choices", t.terms.query.choices()},
                    {"price", t.terms.price},
                    {"required_responses", t.terms.required_responses},
                    {"f", t.terms.coin.value()}};
  j["status"] = ToString(t.status);
  j["dispute_reason"] = t.dispute_reason;
  j["s1"] = t.s1.ToHex();
  if (t.revealed_s2) j["s2"] = t.revealed_s2->ToHex();
  j["contract"] = ContractToJson(t.contract);

  Json subs = Json::array();
  for (const auto& s : t.submissions) {
    subs.push_back(Json{{"address", s.address.ToHex()},
                        {"ciphertext", HexEncode(s.ciphertext.ToBytes())},
                        {"envelope_mac", s.envelope_mac.ToHex()},
                        {"metadata", Json{{"region", s.metadata.region},
                                          {"capture_time", s.metadata.capture_time}}}});
  }
  j["submissions"] = std::move(subs);
  if (t.filter) j["filter"] = BitString(t.filter->bits);
  Json rejected = Json::array();
  for (const auto& a : t.mac_rejected) rejected.push_back(a.ToHex());
  j["mac_rejected"] = std::move(rejected);

  Json payouts = Json::object();
  for (const auto& [addr, amount] : t.payouts) payouts[addr.ToHex()] = amount;
  j["payouts"] = std::move(payouts);
  j["operator_remainder"] = t.operator_remainder;

  Json decrypted = Json::array();
  for (const auto& d : t.decrypted) {
    decrypted.push_back(
        Json{{"address", d.address.ToHex()}, {"bits", BitString(d.bits.bits)}});
  }
  j["decrypted"] = std::move(decrypted);
  if (t.estimate) {
    j["estimate"] = Json{{"total", t.estimate->total},
                         {"raw", t.estimate->raw},
                         {"clamped", t.estimate->clamped},
                         {"distribution", t.estimate->Distribution()}};
  }
  return j;
}

SessionTranscript TranscriptFromJson(const Json& j) {
  return Guarded("transcript", [&] {
    const Json& terms = j.at("terms");
    MarketTerms market{Query(terms.at("choices").get<std::vector<std::string>>()),
                       terms.at("price").get<std::int64_t>(),
                       terms.at("required_responses").get<std::int64_t>(),
                       CoinBias(terms.at("f").get<double>())};

    std::vector<ContractEvent> events;
    for (const auto& e : j.at("contract").at("events")) {
      events.push_back(EventFromJson(e));
    }
    Contract contract = Contract::Replay(events);
    const Json& summary = j.at("contract");
    if (summary.at("gas_used").get<std::int64_t>() != contract.gas_used() ||
        summary.at("deposit_balance").get<std::int64_t>() !=
            contract.deposit_balance() ||
        summary.at("phase").get<std::string>() != ToString(contract.phase())) {
      throw Error(ErrorCode::kIntegrityFailure,
                  "contract summary disagrees with its event log");
    }

    SessionTranscript t{std::move(market),
                        std::move(contract),
                        {},
                        std::nullopt,
                        {},
                        Nonce::FromHex(j.at("s1").get<std::string>()),
                        std::nullopt,
                        {},
                        0,
                        {},
                        std::nullopt,
                        SessionStatus::kCollecting,
                        {}};
    for (const auto& s : j.at("submissions")) {
      t.submissions.push_back(Submission{
          Address::FromHex(s.at("address").get<std::string>()),
          Ciphertext::FromBytes(HexDecode(s.at("ciphertext").get<std::string>())),
          Digest::FromHex(s.at("envelope_mac").get<std::string>()),
          SubmissionMetadata{s.at("metadata").at("region").get<std::string>(),
                             s.at("metadata").at("capture_time").get<std::int64_t>()}});
    }
    if (j.contains("filter")) {
      t.filter = FilterVector{ParseBitString(j.at("filter").get<std::string>())};
    }
    for (const auto& a : j.at("mac_rejected")) {
      t.mac_rejected.push_back(Address::FromHex(a.get<std::string>()));
    }
    if (j.contains("s2")) t.revealed_s2 = Nonce::FromHex(j.at("s2").get<std::string>());
    for (const auto& [addr, amount] : j.at("payouts").items()) {
      t.payouts[Address::FromHex(addr)] = amount.get<std::int64_t>();
    }
    t.operator_remainder = j.at("operator_remainder").get<std::int64_t>();
    for (const auto& d : j.at("decrypted")) {
      t.decrypted.push_back(
          {Address::FromHex(d.at("address").get<std::string>()),
           ResponseBits{ParseBitString(d.at("bits").get<std::string>())}});
    }
    if (j.contains("estimate")) {
      const Json& e = j.at("estimate");
      t.estimate = FrequencyEstimate{e.at("raw").get<std::vector<double>>(),
                                     e.at("clamped").get<std::vector<double>>(),
                                     e.at("total").get<std::int64_t>()};
    }
    t.status = ParseSessionStatus(j.at("status").get<std::string>());
    t.dispute_reason = j.at("dispute_reason").get<std::string>();
    return t;
  });
}

Json GasReportToJson(const GasReport& report) {
  Json lines = Json::array();
  for (const auto& l : report.lines) {
    Json line{{"op", ToString(l.op)}, {"count", l.count}, {"gas", l.gas}};
    if (l.fiat_usd) line["fiat_usd"] = *l.fiat_usd;
    lines.push_back(std::move(line));
  }
  Json j{{"operations", std::move(lines)}, {"total_gas", report.total_gas}};
  if (report.fiat_usd) j["fiat_usd"] = *report.fiat_usd;
  return j;
}

std::string GasReportToCsv(const GasReport& report) {
  auto cents = [](const std::optional<double>& usd) {
    if (!usd) return std::string();
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", *usd);
    return std::string(buf);
  };
  std::string out = "op,count,gas,fiat_usd\n";
  std::int64_t count = 0;
  for (const auto& l : report.lines) {
    count += l.count;
    out += std::string(ToString(l.op)) + "," + std::to_string(l.count) + "," +
           std::to_string(l.gas) + "," + cents(l.fiat_usd) + "\n";
  }
  out += "total," + std::to_string(count) + "," +
         std::to_string(report.total_gas) + "," + cents(report.fiat_usd) + "\n";
  return out;
}

Json AccuracyReportToJson(const sim::AccuracyReport& report) {
  const auto& c = report.config;
  Json j;
  j["config"] = Json{{"n_choices", c.n_choices},
                     {"provider_counts", c.provider_counts},
                     {"mean", c.mean},
                     {"sd", c.sd},
                     {"f", c.coin.value()},
                     {"seed", c.seed}};
  Json results = Json::array();
  for (const auto& r : report.results) {
    results.push_back(Json{{"providers", r.providers},
                           {"true_counts", r.true_counts},
                           {"observed_ones", r.observed_ones},
                           {"raw", r.estimate.raw},
                           {"clamped", r.estimate.clamped},
                           {"total_variation", r.total_variation},
                           {"z_scores", r.z_scores}});
  }
  j["results"] = std::move(results);
  return j;
}

std::string AccuracyReportToCsv(const sim::AccuracyReport& report) {
  std::string out = "N,bin,true_count,est_count,z\n";
  for (const auto& r : report.results) {
    for (std::size_t i = 0; i < r.true_counts.size(); ++i) {
      out += std::to_string(r.providers) + "," + std::to_string(i) + "," +
             std::to_string(r.true_counts[i]) + "," +
             FormatDouble(r.estimate.clamped[i]) + "," +
             FormatDouble(r.z_scores[i]) + "\n";
    }
  }
  return out;
}

Json AttackerReportToJson(const sim::AttackerReport& report) {
  Json steps = Json::array();
  for (const auto& s : report.steps) {
    steps.push_back(Json{{"truth", s.truth},
                         {"observed_mean", s.observed_mean},
                         {"guess", s.guess}});
  }
  return Json{{"mode", sim::ToString(report.mode)},
              {"providers", report.providers},
              {"exact_guess_rate", report.exact_guess_rate},
              {"mean_absolute_error", report.mean_absolute_error},
              {"analytic_success", report.analytic_success},
              {"steps", std::move(steps)}};
}

std::string AttackerReportToCsv(const sim::AttackerReport& report) {
  std::string out = "step,truth,observed_mean,guess\n";
  for (std::size_t k = 0; k < report.steps.size(); ++k) {
    const auto& s = report.steps[k];
    out += std::to_string(k + 1) + "," + std::to_string(s.truth) + "," +
           FormatDouble(s.observed_mean) + "," + std::to_string(s.guess) + "\n";
  }
  return out;
}

Json AdvantageTableToJson(std::span<const AdvantageRecord> rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    out.push_back(Json{{"n", r.n},
                       {"f", r.f},
                       {"p_guess", r.p_guess},
                       {"p_posterior", r.p_posterior},
                       {"advantage", r.advantage}});
  }
  return out;
}

std::string AdvantageTableToCsv(std::span<const AdvantageRecord> rows) {
  std::string out = "n,f,p_guess,p_posterior,advantage\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + "," + FormatDouble(r.f) + "," +
           FormatDouble(r.p_guess) + "," + FormatDouble(r.p_posterior) + "," +
           FormatDouble(r.advantage) + "\n";
  }
  return out;
}

}  // namespace dpmarket
