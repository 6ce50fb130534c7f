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

#ifndef DPMARKET_SERIALIZE_HPP_
#define DPMARKET_SERIALIZE_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dpmarket/ledger.hpp"
#include "dpmarket/protocol.hpp"
#include "dpmarket/sim.hpp"

namespace dpmarket {

using Json = nlohmann::ordered_json;

// Shortest decimal that round-trips.
std::string FormatDouble(double value);

Json EventToJson(const ContractEvent& event);
ContractEvent EventFromJson(const Json& j);

// One compact JSON object per line: {seq, op, params, gas, phase_after}.
std::string EventsToJsonLines(std::span<const ContractEvent> events);
std::vector<ContractEvent> EventsFromJsonLines(std::string_view text);

Json ContractToJson(const Contract& contract);

// Digests, nonces, addresses and ciphertexts are hex; s2 appears only once
// revealed. Parsing replays the event log, so a transcript whose contract
// summary and events disagree is rejected with kIntegrityFailure.
Json TranscriptToJson(const SessionTranscript& transcript);
SessionTranscript TranscriptFromJson(const Json& j);

Json GasReportToJson(const GasReport& report);
std::string GasReportToCsv(const GasReport& report);

Json AccuracyReportToJson(const sim::AccuracyReport& report);
// Columns: N,bin,true_count,est_count,z (est_count is the clamped estimate).
std::string AccuracyReportToCsv(const sim::AccuracyReport& report);

Json AttackerReportToJson(const sim::AttackerReport& report);
// Columns: step,truth,observed_mean,guess.
std::string AttackerReportToCsv(const sim::AttackerReport& report);

Json AdvantageTableToJson(std::span<const AdvantageRecord> rows);
// Columns: n,f,p_guess,p_posterior,advantage.
std::string AdvantageTableToCsv(std::span<const AdvantageRecord> rows);

}  // namespace dpmarket

#endif  // DPMARKET_SERIALIZE_HPP_
