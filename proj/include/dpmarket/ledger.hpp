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

#ifndef DPMARKET_LEDGER_HPP_
#define DPMARKET_LEDGER_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dpmarket/crypto.hpp"

namespace dpmarket {

struct AddressTag {};
using Address = FixedBytes<20, AddressTag>;

Address GenerateAddress(Rng& rng);

// Gas units per successful contract operation, as measured for the reference
// contract deployment.
struct GasSchedule {
  std::int64_t deploy = 660809;
  std::int64_t record_response = 74537;
  std::int64_t record_filter = 63309;
  std::int64_t deposit = 23642;
  std::int64_t reveal_and_transfer = 36269;

  // Throws kInvalidArgument unless every entry is positive.
  void Validate() const;
  // Everything except the per-response records.
  std::int64_t FixedOverhead() const {
    return deploy + record_filter + deposit + reveal_and_transfer;
  }

  bool operator==(const GasSchedule&) const = default;
};

// Display-time conversion from gas to US dollars. The default rate reproduces
// the published fiat column (e.g. 660809 gas -> $25.40) after rounding to
// cents.
struct FiatRate {
  static constexpr double kReferenceUsdPerGas = 3.8438e-5;
  double usd_per_gas = kReferenceUsdPerGas;

  double Convert(std::int64_t gas) const {
    return static_cast<double>(gas) * usd_per_gas;
  }
};

struct LedgerConfig {
  GasSchedule gas;
  FiatRate fiat;
};

// Reads `key = value` lines (# comments allowed). Recognised keys:
// gas.deploy, gas.record_response, gas.record_filter, gas.deposit,
// gas.reveal_and_transfer, fiat.usd_per_gas. Unknown keys are a kParseError.
LedgerConfig ParseLedgerConfig(std::string_view text);
LedgerConfig LoadLedgerConfig(const std::string& path);

enum class Phase { kDeployed, kCollecting, kFiltered, kDeposited, kSettled };

enum class ContractOp {
  kDeploy,
  kRecordResponse,
  kRecordFilter,
  kDeposit,
  kRevealAndSettle,
  kRevealRejected,
};

std::string_view ToString(Phase phase);
std::string_view ToString(ContractOp op);
Phase ParsePhase(std::string_view name);
ContractOp ParseContractOp(std::string_view name);

struct ContractEvent {
  std::uint64_t seq = 0;
  ContractOp op = ContractOp::kDeploy;
  // Digests, nonces and addresses hex-encoded; integers in decimal.
  std::map<std::string, std::string> params;
  std::int64_t gas = 0;
  Phase phase_after = Phase::kDeployed;

  bool operator==(const ContractEvent&) const = default;
};

struct ResponseRecord {
  Address address;
  Digest digest;

  bool operator==(const ResponseRecord&) const = default;
};

// Simulated escrow contract. Single writer: mutate from one owner at a time;
// copies are independent snapshots.
//
// Every operation validates before it mutates, so a rejected call leaves the
// contract exactly as it was. The one exception is a failed reveal, which
// appends a zero-gas `reveal_rejected` event before raising.
class Contract {
 public:
  // Throws kInvalidArgument for price < 1 or required_responses < 1.
  static Contract Deploy(const Digest& query_digest, const Digest& s2_commitment,
                         std::int64_t price, std::int64_t required_responses,
                         const GasSchedule& schedule = {});

  // Phase Deployed or Collecting; one record per address.
  void RecordResponseHash(const Address& address, const Digest& digest);
  // Phase Collecting; required_responses <= accepted_count <= records.
  void RecordFilterHash(const Digest& filter_digest, std::int64_t accepted_count);
  // Phase Filtered; amount must equal price.
  void MakeDeposit(std::int64_t amount);
  // Phase Deposited. On Hash(s2) == commitment, pays the deposit to `payee`.
  void RevealAndSettle(const Nonce& s2, const Address& payee);

  // Rebuilds a contract by re-applying the logged operations. Throws
  // kIntegrityFailure if the regenerated log differs from `events`.
  static Contract Replay(std::span<const ContractEvent> events,
                         const GasSchedule& schedule = {});

  Phase phase() const { return phase_; }
  const Digest& query_digest() const { return query_digest_; }
  const Digest& s2_commitment() const { return s2_commitment_; }
  std::int64_t price() const { return price_; }
  std::int64_t required_responses() const { return required_responses_; }
  const std::vector<ResponseRecord>& response_records() const {
    return records_;
  }
  const std::optional<Digest>& filter_digest() const { return filter_digest_; }
  std::int64_t accepted_count() const { return accepted_count_; }
  std::int64_t deposit_balance() const { return deposit_balance_; }
  std::int64_t transferred_out() const { return transferred_out_; }
  const std::optional<Address>& payee() const { return payee_; }
  const std::optional<Nonce>& revealed_s2() const { return revealed_s2_; }
  std::int64_t gas_used() const { return gas_used_; }
  const GasSchedule& schedule() const { return schedule_; }
  const std::vector<ContractEvent>& events() const { return events_; }

  bool operator==(const Contract&) const = default;

 private:
  Contract() = default;
  void RequirePhase(std::string_view op, std::initializer_list<Phase> allowed) const;
  void Log(ContractOp op, std::map<std::string, std::string> params,
           std::int64_t gas);

  GasSchedule schedule_;
  Phase phase_ = Phase::kDeployed;
  Digest query_digest_;
  Digest s2_commitment_;
  std::int64_t price_ = 0;
  std::int64_t required_responses_ = 0;
  std::vector<ResponseRecord> records_;
  std::set<Address> recorded_;
  std::optional<Digest> filter_digest_;
  std::int64_t accepted_count_ = 0;
  std::int64_t deposit_balance_ = 0;
  std::int64_t transferred_out_ = 0;
  std::optional<Address> payee_;
  std::optional<Nonce> revealed_s2_;
  std::int64_t gas_used_ = 0;
  std::vector<ContractEvent> events_;
};

// Lookups over a public event log, as any observer of the chain would do.
std::optional<Digest> FindResponseDigest(std::span<const ContractEvent> events,
                                         const Address& address);
std::optional<Digest> FindFilterDigest(std::span<const ContractEvent> events);
std::optional<Nonce> FindRevealedNonce(std::span<const ContractEvent> events);

struct GasReport {
  struct Line {
    ContractOp op;
    std::int64_t count = 0;
    std::int64_t gas = 0;
    std::optional<double> fiat_usd;
  };
  std::vector<Line> lines;  // operations that occurred, in ContractOp order
  std::int64_t total_gas = 0;
  std::optional<double> fiat_usd;
};

GasReport MakeGasReport(std::span<const ContractEvent> events,
                        std::optional<FiatRate> fiat = std::nullopt);

}  // namespace dpmarket

#endif  // DPMARKET_LEDGER_HPP_
