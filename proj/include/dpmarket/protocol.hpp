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

#ifndef DPMARKET_PROTOCOL_HPP_
#define DPMARKET_PROTOCOL_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dpmarket/crypto.hpp"
#include "dpmarket/ldp.hpp"
#include "dpmarket/ledger.hpp"

namespace dpmarket {

struct MarketTerms {
  Query query;
  std::int64_t price = 0;
  std::int64_t required_responses = 0;
  CoinBias coin = CoinBias::Fair();

  // required_responses >= 1 and price >= required_responses.
  void Validate() const;
};

// Plaintext attributes the operator filters on. Response content stays
// encrypted; the operator never reads it.
struct SubmissionMetadata {
  std::string region;
  std::int64_t capture_time = 0;  // seconds since epoch

  Bytes CanonicalBytes() const;
  bool operator==(const SubmissionMetadata&) const = default;
};

struct Submission {
  Address address;
  Ciphertext ciphertext;
  Digest envelope_mac;
  SubmissionMetadata metadata;

  // address || ciphertext bytes || metadata bytes, the MAC'd envelope.
  Bytes EnvelopeBytes() const;
  bool operator==(const Submission&) const = default;
};

struct FilterVector {
  std::vector<bool> bits;

  std::size_t Accepted() const;
  // u32 big-endian length, then MSB-first packed bits.
  Bytes CanonicalBytes() const;
  bool operator==(const FilterVector&) const = default;
};

struct ProviderIdentity {
  Address address;
  PreSharedKey psk;

  static ProviderIdentity Generate(Rng& rng);
};

// What a provider receives through the enrollment channel.
struct ProviderKit {
  Query query;
  CoinBias coin;
  Nonce s1;
  Nonce s2;
};

using MetadataPredicate = std::function<bool(const SubmissionMetadata&)>;

// Grammar: "all", or comma-joined clauses "region=X", "since=T", "until=T"
// (inclusive bounds on capture_time), all of which must hold.
MetadataPredicate ParsePredicate(std::string_view text);

enum class SessionStatus { kCollecting, kFiltered, kSettled, kDisputed };
std::string_view ToString(SessionStatus status);
SessionStatus ParseSessionStatus(std::string_view name);

struct DecryptedResponse {
  Address address;
  ResponseBits bits;
};

// Everything that survives a session, in the form handed to the consumer and
// to dispute resolution. Holds no pre-shared keys and no true choices.
struct SessionTranscript {
  MarketTerms terms;
  Contract contract;
  std::vector<Submission> submissions;
  std::optional<FilterVector> filter;
  // Submissions the operator force-rejected because their MAC failed.
  std::vector<Address> mac_rejected;
  Nonce s1;
  std::optional<Nonce> revealed_s2;
  std::map<Address, std::int64_t> payouts;
  std::int64_t operator_remainder = 0;
  std::vector<DecryptedResponse> decrypted;
  std::optional<FrequencyEstimate> estimate;
  SessionStatus status = SessionStatus::kCollecting;
  std::string dispute_reason;
};

// One marketplace round between a consumer, a system operator and any number
// of providers. The object plays all three roles but keeps their secrets in
// separate members: the consumer's s1, the operator's s2 and provider keys.
// Single mutator at a time.
class Session {
 public:
  // Consumer draws s1, operator draws s2 and deploys the contract with
  // Hash(query) and Hash(s2). Throws kInvalidArgument for bad terms.
  static Session PublishQuery(MarketTerms terms, Rng& rng);

  // Operator learns the provider's address and psk.
  void Enroll(const ProviderIdentity& provider);
  ProviderKit EnrollmentKit() const;

  // Operator records Hash(C_R) on chain under the submission's address.
  void Submit(Submission submission);

  // Marks the first required_responses submissions that verify under their
  // psk and satisfy `predicate`, in on-chain order, then records Hash(F).
  // Throws kThresholdNotMet (session unchanged) if too few qualify.
  const FilterVector& OperatorFilter(const MetadataPredicate& predicate);

  // Consumer deposits the price; operator reveals s2 (or `reveal_override`
  // for fault injection). On success pays floor(price / N_R) to each accepted
  // provider. On a reveal mismatch the session becomes Disputed and the
  // deposit stays in the contract; the error is rethrown.
  void ConsumerSettle(std::optional<Nonce> reveal_override = std::nullopt);

  // Consumer reads s2 from the event log, derives sk and decrypts the
  // accepted responses. Throws kWrongPhase before settlement and
  // kIntegrityFailure (session Disputed) naming the address of any response
  // that fails authentication.
  const FrequencyEstimate& ConsumerDecryptAndAggregate();

  // Fault injection: flips one bit of a stored ciphertext body.
  void TamperCiphertext(std::size_t submission_index, std::size_t bit);

  const MarketTerms& terms() const { return terms_; }
  const Contract& contract() const { return contract_; }
  const std::vector<Submission>& submissions() const { return submissions_; }
  const std::optional<FilterVector>& filter() const { return filter_; }
  const std::vector<Address>& mac_rejected() const { return mac_rejected_; }
  const std::map<Address, std::int64_t>& payouts() const { return payouts_; }
  std::int64_t operator_remainder() const { return operator_remainder_; }
  SessionStatus status() const { return status_; }
  const std::string& dispute_reason() const { return dispute_reason_; }
  const Address& operator_address() const { return operator_address_; }
  // Consumer-held values.
  const Nonce& consumer_s1() const { return s1_; }

  SessionTranscript Transcript() const;

 private:
  Session(MarketTerms terms, Nonce s1, Nonce s2, Address operator_address,
          Contract contract);
  void MarkDisputed(std::string reason);

  MarketTerms terms_;
  Nonce s1_;
  Nonce s2_;
  Address operator_address_;
  Contract contract_;
  std::map<Address, PreSharedKey> provider_keys_;
  std::vector<Submission> submissions_;
  std::optional<FilterVector> filter_;
  std::vector<Address> mac_rejected_;
  std::map<Address, std::int64_t> payouts_;
  std::int64_t operator_remainder_ = 0;
  std::vector<DecryptedResponse> decrypted_;
  std::optional<FrequencyEstimate> estimate_;
  SessionStatus status_ = SessionStatus::kCollecting;
  std::string dispute_reason_;
};

// Provider side: randomize the truthful choice, encrypt under
// DeriveKey(s1, s2), MAC the envelope with the psk, and hand the submission
// to the operator (which records Hash(C_R)). Returns the submission.
Submission ProviderRespond(Session& session, const ProviderIdentity& provider,
                           std::size_t true_choice, SubmissionMetadata metadata,
                           Rng& rng);

// Dispute checks against the public event log.
// Throws kMissingRecord if the address never recorded a response.
bool VerifyResponseIntegrity(const Submission& submission,
                             std::span<const ContractEvent> events);
// Throws kWrongPhase if no filter digest has been recorded.
bool VerifyFilter(const FilterVector& filter,
                  std::span<const ContractEvent> events);

// Drives a full session: publish, enroll and respond for every provider,
// filter, settle, decrypt. Provider p draws from rng.Split(p).
struct SessionRunConfig {
  MarketTerms terms{Query::WithIndexLabels(2), 1, 1, CoinBias::Fair()};
  std::size_t providers = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> regions{"A"};
  std::int64_t base_capture_time = 1700000000;
  std::string predicate = "all";
  // Chooses provider p's true answer from its own stream.
  std::function<std::size_t(std::size_t provider, Rng& rng)> choose;
  bool inject_wrong_reveal = false;
  bool inject_tamper = false;
};

struct SessionRunResult {
  SessionTranscript transcript;
  // Set when the session stopped early or ended disputed.
  std::optional<ErrorCode> failure;
  std::string failure_message;
};

SessionRunResult RunSession(const SessionRunConfig& config);

}  // namespace dpmarket

#endif  // DPMARKET_PROTOCOL_HPP_
