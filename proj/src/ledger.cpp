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

#include "dpmarket/ledger.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "dpmarket/error.hpp"

namespace dpmarket {

namespace {

std::string Trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

std::int64_t ParseInt(std::string_view text, std::string_view what) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kParseError,
                "invalid integer for " + std::string(what) + ": '" +
                    std::string(text) + "'");
  }
  return value;
}

double ParseDouble(std::string_view text, std::string_view what) {
  double value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kParseError,
                "invalid number for " + std::string(what) + ": '" +
                    std::string(text) + "'");
  }
  return value;
}

const std::string& Param(const ContractEvent& e, const std::string& key) {
  auto it = e.params.find(key);
  if (it == e.params.end()) {
    throw Error(ErrorCode::kParseError, "event " + std::to_string(e.seq) + " (" +
                                            std::string(ToString(e.op)) +
                                            ") lacks param '" + key + "'");
  }
  return it->second;
}

void ApplyLogged(Contract& c, const ContractEvent& e) {
  switch (e.op) {
    case ContractOp::kDeploy:
      throw Error(ErrorCode::kIntegrityFailure, "second deploy in event log");
    case ContractOp::kRecordResponse:
      c.RecordResponseHash(Address::FromHex(Param(e, "address")),
                           Digest::FromHex(Param(e, "digest")));
      break;
    case ContractOp::kRecordFilter:
      c.RecordFilterHash(Digest::FromHex(Param(e, "filter_digest")),
                         ParseInt(Param(e, "accepted_count"), "accepted_count"));
      break;
    case ContractOp::kDeposit:
      c.MakeDeposit(ParseInt(Param(e, "amount"), "amount"));
      break;
    case ContractOp::kRevealAndSettle:
    case ContractOp::kRevealRejected:
      try {
        c.RevealAndSettle(Nonce::FromHex(Param(e, "s2")),
                          Address::FromHex(Param(e, "payee")));
      } catch (const Error& err) {
        if (err.code() != ErrorCode::kRevealMismatch) throw;
      }
      break;
  }
}

}  // namespace

Address GenerateAddress(Rng& rng) {
  std::array<std::uint8_t, Address::kSize> bytes;
  rng.FillBytes(bytes);
  return Address(bytes);
}

void GasSchedule::Validate() const {
  for (std::int64_t g : {deploy, record_response, record_filter, deposit,
                         reveal_and_transfer}) {
    if (g <= 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "gas schedule entries must be positive");
    }
  }
}

LedgerConfig ParseLedgerConfig(std::string_view text) {
  LedgerConfig config;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    const std::string stripped = Trim(view);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = Trim(std::string_view(stripped).substr(0, eq));
    const std::string value = Trim(std::string_view(stripped).substr(eq + 1));
    if (key == "gas.deploy") {
      config.gas.deploy = ParseInt(value, key);
    } else if (key == "gas.record_response") {
      config.gas.record_response = ParseInt(value, key);
    } else if (key == "gas.record_filter") {
      config.gas.record_filter = ParseInt(value, key);
    } else if (key == "gas.deposit") {
      config.gas.deposit = ParseInt(value, key);
    } else if (key == "gas.reveal_and_transfer") {
      config.gas.reveal_and_transfer = ParseInt(value, key);
    } else if (key == "fiat.usd_per_gas") {
      config.fiat.usd_per_gas = ParseDouble(value, key);
    } else {
      throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) +
                                              ": unknown key '" + key + "'");
    }
  }
  config.gas.Validate();
  return config;
}

LedgerConfig LoadLedgerConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kMissingRecord, "cannot open ledger config " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseLedgerConfig(buffer.str());
}

std::string_view ToString(Phase phase) {
  switch (phase) {
    case Phase::kDeployed: return "Deployed";
    case Phase::kCollecting: return "Collecting";
    case Phase::kFiltered: return "Filtered";
    case Phase::kDeposited: return "Deposited";
    case Phase::kSettled: return "Settled";
  }
  return "?";
}

std::string_view ToString(ContractOp op) {
  switch (op) {
    case ContractOp::kDeploy: return "deploy";
    case ContractOp::kRecordResponse: return "record_response";
    case ContractOp::kRecordFilter: return "record_filter";
    case ContractOp::kDeposit: return "deposit";
    case ContractOp::kRevealAndSettle: return "reveal_and_settle";
    case ContractOp::kRevealRejected: return "reveal_rejected";
  }
  return "?";
}

Phase ParsePhase(std::string_view name) {
  for (Phase p : {Phase::kDeployed, Phase::kCollecting, Phase::kFiltered,
                  Phase::kDeposited, Phase::kSettled}) {
    if (ToString(p) == name) return p;
  }
  throw Error(ErrorCode::kParseError, "unknown phase '" + std::string(name) + "'");
}

ContractOp ParseContractOp(std::string_view name) {
  for (ContractOp op :
       {ContractOp::kDeploy, ContractOp::kRecordResponse, ContractOp::kRecordFilter,
        ContractOp::kDeposit, ContractOp::kRevealAndSettle,
        ContractOp::kRevealRejected}) {
    if (ToString(op) == name) return op;
  }
  throw Error(ErrorCode::kParseError, "unknown operation '" + std::string(name) + "'");
}

Contract Contract::Deploy(const Digest& query_digest, const Digest& s2_commitment,
                          std::int64_t price, std::int64_t required_responses,
                          const GasSchedule& schedule) {
  schedule.Validate();
  if (price < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "price must be positive, got " + std::to_string(price));
  }
  if (required_responses < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "required responses must be positive, got " +
                    std::to_string(required_responses));
  }
  Contract c;
  c.schedule_ = schedule;
  c.query_digest_ = query_digest;
  c.s2_commitment_ = s2_commitment;
  c.price_ = price;
  c.required_responses_ = required_responses;
  c.Log(ContractOp::kDeploy,
        {{"query_digest", query_digest.ToHex()},
         {"s2_commitment", s2_commitment.ToHex()},
         {"price", std::to_string(price)},
         {"required_responses", std::to_string(required_responses)}},
        schedule.deploy);
  return c;
}

void Contract::RequirePhase(std::string_view op,
                            std::initializer_list<Phase> allowed) const {
  for (Phase p : allowed) {
    if (phase_ == p) return;
  }
  throw Error(ErrorCode::kWrongPhase, std::string(op) + " not allowed in phase " +
                                          std::string(ToString(phase_)));
}

void Contract::Log(ContractOp op, std::map<std::string, std::string> params,
                   std::int64_t gas) {
  gas_used_ += gas;
  events_.push_back(ContractEvent{events_.size(), op, std::move(params), gas,
                                  phase_});
}

void Contract::RecordResponseHash(const Address& address, const Digest& digest) {
  RequirePhase("record_response", {Phase::kDeployed, Phase::kCollecting});
  if (recorded_.contains(address)) {
    throw Error(ErrorCode::kDuplicateAddress,
                "address " + address.ToHex() + " already recorded a response");
  }
  recorded_.insert(address);
  records_.push_back({address, digest});
  phase_ = Phase::kCollecting;
  Log(ContractOp::kRecordResponse,
      {{"address", address.ToHex()}, {"digest", digest.ToHex()}},
      schedule_.record_response);
}

void Contract::RecordFilterHash(const Digest& filter_digest,
                                std::int64_t accepted_count) {
  RequirePhase("record_filter", {Phase::kCollecting});
  if (accepted_count < required_responses_) {
    throw Error(ErrorCode::kThresholdNotMet,
                std::to_string(accepted_count) + " accepted responses, need " +
                    std::to_string(required_responses_));
  }
  if (accepted_count > static_cast<std::int64_t>(records_.size())) {
    throw Error(ErrorCode::kInvalidArgument,
                "accepted count " + std::to_string(accepted_count) +
                    " exceeds " + std::to_string(records_.size()) + " records");
  }
  filter_digest_ = filter_digest;
  accepted_count_ = accepted_count;
  phase_ = Phase::kFiltered;
  Log(ContractOp::kRecordFilter,
      {{"filter_digest", filter_digest.ToHex()},
       {"accepted_count", std::to_string(accepted_count)}},
      schedule_.record_filter);
}

void Contract::MakeDeposit(std::int64_t amount) {
  RequirePhase("deposit", {Phase::kFiltered});
  if (amount != price_) {
    throw Error(ErrorCode::kWrongAmount, "deposit of " + std::to_string(amount) +
                                             " does not equal price " +
                                             std::to_string(price_));
  }
  deposit_balance_ = amount;
  phase_ = Phase::kDeposited;
  Log(ContractOp::kDeposit, {{"amount", std::to_string(amount)}},
      schedule_.deposit);
}

void Contract::RevealAndSettle(const Nonce& s2, const Address& payee) {
  RequirePhase("reveal_and_settle", {Phase::kDeposited});
  if (Hash(s2.view()) != s2_commitment_) {
    Log(ContractOp::kRevealRejected,
        {{"s2", s2.ToHex()}, {"payee", payee.ToHex()}}, 0);
    throw Error(ErrorCode::kRevealMismatch,
                "revealed nonce does not match the committed hash");
  }
  transferred_out_ = deposit_balance_;
  deposit_balance_ = 0;
  payee_ = payee;
  revealed_s2_ = s2;
  phase_ = Phase::kSettled;
  Log(ContractOp::kRevealAndSettle,
      {{"s2", s2.ToHex()},
       {"payee", payee.ToHex()},
       {"amount", std::to_string(transferred_out_)}},
      schedule_.reveal_and_transfer);
}

Contract Contract::Replay(std::span<const ContractEvent> events,
                          const GasSchedule& schedule) {
  if (events.empty() || events.front().op != ContractOp::kDeploy) {
    throw Error(ErrorCode::kIntegrityFailure,
                "event log must start with a deploy event");
  }
  const ContractEvent& first = events.front();
  Contract c = Deploy(Digest::FromHex(Param(first, "query_digest")),
                      Digest::FromHex(Param(first, "s2_commitment")),
                      ParseInt(Param(first, "price"), "price"),
                      ParseInt(Param(first, "required_responses"),
                               "required_responses"),
                      schedule);
  for (const ContractEvent& e : events.subspan(1)) {
    try {
      ApplyLogged(c, e);
    } catch (const Error& err) {
      throw Error(ErrorCode::kIntegrityFailure,
                  "event " + std::to_string(e.seq) + " does not replay: " + err.what());
    }
  }
  if (!std::equal(c.events_.begin(), c.events_.end(), events.begin(),
                  events.end())) {
    throw Error(ErrorCode::kIntegrityFailure,
                "replayed event log differs from the recorded one");
  }
  return c;
}

std::optional<Digest> FindResponseDigest(std::span<const ContractEvent> events,
                                         const Address& address) {
  const std::string hex = address.ToHex();
  for (const ContractEvent& e : events) {
    if (e.op == ContractOp::kRecordResponse && Param(e, "address") == hex) {
      return Digest::FromHex(Param(e, "digest"));
    }
  }
  return std::nullopt;
}

std::optional<Digest> FindFilterDigest(std::span<const ContractEvent> events) {
  for (const ContractEvent& e : events) {
    if (e.op == ContractOp::kRecordFilter) {
      return Digest::FromHex(Param(e, "filter_digest"));
    }
  }
  return std::nullopt;
}

std::optional<Nonce> FindRevealedNonce(std::span<const ContractEvent> events) {
  for (const ContractEvent& e : events) {
    if (e.op == ContractOp::kRevealAndSettle) {
      return Nonce::FromHex(Param(e, "s2"));
    }
  }
  return std::nullopt;
}

GasReport MakeGasReport(std::span<const ContractEvent> events,
                        std::optional<FiatRate> fiat) {
  std::map<ContractOp, GasReport::Line> by_op;
  GasReport report;
  for (const ContractEvent& e : events) {
    auto& line =
        by_op.try_emplace(e.op, GasReport::Line{e.op, 0, 0, std::nullopt}).first->second;
    ++line.count;
    line.gas += e.gas;
    report.total_gas += e.gas;
  }
  for (auto& [op, line] : by_op) {
    if (fiat) line.fiat_usd = fiat->Convert(line.gas);
    report.lines.push_back(line);
  }
  if (fiat) report.fiat_usd = fiat->Convert(report.total_gas);
  return report;
}

}  // namespace dpmarket
