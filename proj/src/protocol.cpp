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

#include "dpmarket/protocol.hpp"

#include <algorithm>
#include <charconv>

#include "dpmarket/error.hpp"

namespace dpmarket {

namespace {

// Party streams live far above any provider index.
constexpr std::uint64_t kConsumerStream = 0xC0'0000'0000'0001ULL;
constexpr std::uint64_t kOperatorStream = 0xC0'0000'0000'0002ULL;
constexpr std::uint64_t kRootSessionStream = 0xC0'0000'0000'0003ULL;

std::int64_t ParseTime(std::string_view text) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kParseError,
                "invalid capture time '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

void MarketTerms::Validate() const {
  if (required_responses < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "required responses must be at least 1, got " +
                    std::to_string(required_responses));
  }
  if (price < required_responses) {
    throw Error(ErrorCode::kInvalidArgument,
                "price " + std::to_string(price) +
                    " is below the required response count " +
                    std::to_string(required_responses));
  }
}

Bytes SubmissionMetadata::CanonicalBytes() const {
  Bytes out;
  AppendU32BE(out, static_cast<std::uint32_t>(region.size()));
  Append(out, AsBytes(region));
  AppendU64BE(out, static_cast<std::uint64_t>(capture_time));
  return out;
}

Bytes Submission::EnvelopeBytes() const {
  Bytes out;
  Append(out, address.view());
  Append(out, ciphertext.ToBytes());
  Append(out, metadata.CanonicalBytes());
  return out;
}

std::size_t FilterVector::Accepted() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), true));
}

Bytes FilterVector::CanonicalBytes() const {
  Bytes out;
  AppendU32BE(out, static_cast<std::uint32_t>(bits.size()));
  Append(out, PackBits(bits));
  return out;
}

ProviderIdentity ProviderIdentity::Generate(Rng& rng) {
  Address address = GenerateAddress(rng);
  return {address, PreSharedKey::Generate(rng)};
}

MetadataPredicate ParsePredicate(std::string_view text) {
  if (text.empty() || text == "all") {
    return [](const SubmissionMetadata&) { return true; };
  }
  std::vector<std::string> regions;
  std::optional<std::int64_t> since;
  std::optional<std::int64_t> until;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view clause = text.substr(start, comma - start);
    const auto eq = clause.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kParseError,
                  "predicate clause '" + std::string(clause) + "' lacks '='");
    }
    std::string_view key = clause.substr(0, eq);
    std::string_view value = clause.substr(eq + 1);
    if (key == "region") {
      regions.emplace_back(value);
    } else if (key == "since") {
      since = ParseTime(value);
    } else if (key == "until") {
      until = ParseTime(value);
    } else {
      throw Error(ErrorCode::kParseError,
                  "unknown predicate key '" + std::string(key) + "'");
    }
    start = comma + 1;
  }
  return [regions, since, until](const SubmissionMetadata& m) {
    for (const auto& r : regions) {
      if (m.region != r) return false;
    }
    if (since && m.capture_time < *since) return false;
    if (until && m.capture_time > *until) return false;
    return true;
  };
}

std::string_view ToString(SessionStatus status) {
  switch (status) {
    case SessionStatus::kCollecting: return "Collecting";
    case SessionStatus::kFiltered: return "Filtered";
    case SessionStatus::kSettled: return "Settled";
    case SessionStatus::kDisputed: return "Disputed";
  }
  return "?";
}

SessionStatus ParseSessionStatus(std::string_view name) {
  for (SessionStatus s : {SessionStatus::kCollecting, SessionStatus::kFiltered,
                          SessionStatus::kSettled, SessionStatus::kDisputed}) {
    if (ToString(s) == name) return s;
  }
  throw Error(ErrorCode::kParseError,
              "unknown session status '" + std::string(name) + "'");
}

Session::Session(MarketTerms terms, Nonce s1, Nonce s2, Address operator_address,
                 Contract contract)
    : terms_(std::move(terms)),
      s1_(s1),
      s2_(s2),
      operator_address_(operator_address),
      contract_(std::move(contract)) {}

Session Session::PublishQuery(MarketTerms terms, Rng& rng) {
  terms.Validate();
  Rng consumer_rng = rng.Split(kConsumerStream);
  Rng operator_rng = rng.Split(kOperatorStream);
  const Nonce s1 = GenerateNonce(consumer_rng);
  const Nonce s2 = GenerateNonce(operator_rng);
  const Address operator_address = GenerateAddress(operator_rng);
  Contract contract =
      Contract::Deploy(Hash(terms.query.CanonicalBytes()), Hash(s2.view()),
                       terms.price, terms.required_responses);
  return Session(std::move(terms), s1, s2, operator_address, std::move(contract));
}

void Session::Enroll(const ProviderIdentity& provider) {
  provider_keys_.insert_or_assign(provider.address, provider.psk);
}

ProviderKit Session::EnrollmentKit() const {
  return {terms_.query, terms_.coin, s1_, s2_};
}

void Session::Submit(Submission submission) {
  if (status_ != SessionStatus::kCollecting) {
    throw Error(ErrorCode::kWrongPhase, "session no longer accepts submissions");
  }
  contract_.RecordResponseHash(submission.address,
                               Hash(submission.ciphertext.ToBytes()));
  submissions_.push_back(std::move(submission));
}

const FilterVector& Session::OperatorFilter(const MetadataPredicate& predicate) {
  if (status_ != SessionStatus::kCollecting) {
    throw Error(ErrorCode::kWrongPhase, "filter already finalized");
  }
  FilterVector filter{std::vector<bool>(submissions_.size(), false)};
  std::vector<Address> rejected;
  std::int64_t accepted = 0;
  for (std::size_t i = 0; i < submissions_.size(); ++i) {
    const Submission& s = submissions_[i];
    auto key = provider_keys_.find(s.address);
    if (key == provider_keys_.end() ||
        !MacVerify(key->second, s.EnvelopeBytes(), s.envelope_mac)) {
      rejected.push_back(s.address);
      continue;
    }
    if (accepted < terms_.required_responses && predicate(s.metadata)) {
      filter.bits[i] = true;
      ++accepted;
    }
  }
  if (accepted < terms_.required_responses) {
    throw Error(ErrorCode::kThresholdNotMet,
                std::to_string(accepted) + " submissions qualify, need " +
                    std::to_string(terms_.required_responses));
  }
  contract_.RecordFilterHash(Hash(filter.CanonicalBytes()), accepted);
  mac_rejected_ = std::move(rejected);
  filter_ = std::move(filter);
  status_ = SessionStatus::kFiltered;
  return *filter_;
}

void Session::ConsumerSettle(std::optional<Nonce> reveal_override) {
  if (status_ != SessionStatus::kFiltered) {
    throw Error(ErrorCode::kWrongPhase, "settlement requires a recorded filter");
  }
  contract_.MakeDeposit(terms_.price);
  try {
    contract_.RevealAndSettle(reveal_override.value_or(s2_), operator_address_);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kRevealMismatch) MarkDisputed(e.what());
    throw;
  }
  const std::int64_t share = terms_.price / terms_.required_responses;
  std::int64_t paid = 0;
  for (std::size_t i = 0; i < submissions_.size(); ++i) {
    if (filter_->bits[i]) {
      payouts_[submissions_[i].address] = share;
      paid += share;
    }
  }
  operator_remainder_ = contract_.transferred_out() - paid;
  status_ = SessionStatus::kSettled;
}

const FrequencyEstimate& Session::ConsumerDecryptAndAggregate() {
  const std::optional<Nonce> s2 = FindRevealedNonce(contract_.events());
  if (!s2) {
    throw Error(ErrorCode::kWrongPhase,
                "s2 has not been revealed on chain; no key is available");
  }
  const SymmetricKey key = DeriveKey(s1_, *s2);
  std::vector<DecryptedResponse> decrypted;
  for (std::size_t i = 0; i < submissions_.size(); ++i) {
    if (!filter_->bits[i]) continue;
    const Submission& s = submissions_[i];
    try {
      decrypted.push_back(
          {s.address, ResponseBits::Deserialize(Decrypt(key, s.ciphertext))});
    } catch (const Error& e) {
      const std::string reason = "response from " + s.address.ToHex() +
                                 " failed integrity check: " + e.what();
      MarkDisputed(reason);
      throw Error(ErrorCode::kIntegrityFailure, reason);
    }
    if (decrypted.back().bits.size() != terms_.query.size()) {
      const std::string reason = "response from " + s.address.ToHex() +
                                 " has the wrong number of bits";
      MarkDisputed(reason);
      throw Error(ErrorCode::kIntegrityFailure, reason);
    }
  }
  std::vector<ResponseBits> bits;
  bits.reserve(decrypted.size());
  for (const auto& d : decrypted) bits.push_back(d.bits);
  const auto ones = CountOnes(bits, terms_.query.size());
  estimate_ = EstimateCounts(ones, static_cast<std::int64_t>(decrypted.size()),
                             terms_.coin);
  decrypted_ = std::move(decrypted);
  return *estimate_;
}

void Session::TamperCiphertext(std::size_t submission_index, std::size_t bit) {
  Ciphertext& c = submissions_.at(submission_index).ciphertext;
  if (c.body.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "ciphertext body is empty");
  }
  bit %= c.body.size() * 8;
  c.body[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
}

void Session::MarkDisputed(std::string reason) {
  status_ = SessionStatus::kDisputed;
  dispute_reason_ = std::move(reason);
}

SessionTranscript Session::Transcript() const {
  return SessionTranscript{
      .terms = terms_,
      .contract = contract_,
      .submissions = submissions_,
      .filter = filter_,
      .mac_rejected = mac_rejected_,
      .s1 = s1_,
      .revealed_s2 = contract_.revealed_s2(),
      .payouts = payouts_,
      .operator_remainder = operator_remainder_,
      .decrypted = decrypted_,
      .estimate = estimate_,
      .status = status_,
      .dispute_reason = dispute_reason_,
  };
}

Submission ProviderRespond(Session& session, const ProviderIdentity& provider,
                           std::size_t true_choice, SubmissionMetadata metadata,
                           Rng& rng) {
  const ProviderKit kit = session.EnrollmentKit();
  const ResponseBits noisy =
      Randomize(EncodeTruth(kit.query, true_choice), kit.coin, rng);
  const SymmetricKey key = DeriveKey(kit.s1, kit.s2);
  Submission s;
  s.address = provider.address;
  s.ciphertext = Encrypt(key, noisy.Serialize(), rng);
  s.metadata = std::move(metadata);
  s.envelope_mac = Mac(provider.psk, s.EnvelopeBytes());
  session.Submit(s);
  return s;
}

bool VerifyResponseIntegrity(const Submission& submission,
                             std::span<const ContractEvent> events) {
  const std::optional<Digest> recorded =
      FindResponseDigest(events, submission.address);
  if (!recorded) {
    throw Error(ErrorCode::kMissingRecord,
                "no response recorded for " + submission.address.ToHex());
  }
  return Hash(submission.ciphertext.ToBytes()) == *recorded;
}

bool VerifyFilter(const FilterVector& filter,
                  std::span<const ContractEvent> events) {
  const std::optional<Digest> recorded = FindFilterDigest(events);
  if (!recorded) {
    throw Error(ErrorCode::kWrongPhase, "no filter digest recorded yet");
  }
  return Hash(filter.CanonicalBytes()) == *recorded;
}

SessionRunResult RunSession(const SessionRunConfig& config) {
  const Rng root(config.seed);
  Rng session_rng = root.Split(kRootSessionStream);
  Session session = Session::PublishQuery(config.terms, session_rng);
  const MetadataPredicate predicate = ParsePredicate(config.predicate);
  if (config.regions.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "at least one region is required");
  }

  SessionRunResult result{session.Transcript(), std::nullopt, {}};
  auto fail = [&](const Error& e) {
    result.failure = e.code();
    result.failure_message = e.what();
    result.transcript = session.Transcript();
    return result;
  };

  for (std::size_t p = 0; p < config.providers; ++p) {
    Rng provider_rng = root.Split(p);
    const ProviderIdentity identity = ProviderIdentity::Generate(provider_rng);
    const std::size_t choice =
        config.choose ? config.choose(p, provider_rng)
                      : provider_rng.UniformIndex(config.terms.query.size());
    SubmissionMetadata metadata{
        config.regions[provider_rng.UniformIndex(config.regions.size())],
        config.base_capture_time + static_cast<std::int64_t>(p) * 60};
    session.Enroll(identity);
    ProviderRespond(session, identity, choice, std::move(metadata), provider_rng);
  }

  try {
    session.OperatorFilter(predicate);
    std::optional<Nonce> reveal;
    if (config.inject_wrong_reveal) {
      Rng fault_rng = root.Split(kRootSessionStream + 1);
      reveal = GenerateNonce(fault_rng);
    }
    session.ConsumerSettle(reveal);
    if (config.inject_tamper) {
      const auto& bits = session.filter()->bits;
      const auto first = std::find(bits.begin(), bits.end(), true) - bits.begin();
      session.TamperCiphertext(static_cast<std::size_t>(first), 0);
    }
    session.ConsumerDecryptAndAggregate();
  } catch (const Error& e) {
    return fail(e);
  }
  result.transcript = session.Transcript();
  return result;
}

}  // namespace dpmarket
