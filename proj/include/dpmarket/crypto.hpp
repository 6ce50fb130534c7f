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

#ifndef DPMARKET_CRYPTO_HPP_
#define DPMARKET_CRYPTO_HPP_

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "dpmarket/bytes.hpp"
#include "dpmarket/error.hpp"
#include "dpmarket/rng.hpp"

namespace dpmarket {

// Primitive choices, pinned in one place so test vectors stay stable.
struct CryptoSuite {
  static constexpr std::string_view kHash = "SHA-256";
  static constexpr std::string_view kMac = "HMAC-SHA-256";
  static constexpr std::string_view kCipher = "AES-256-GCM";
  static constexpr std::size_t kDigestBytes = 32;
  static constexpr std::size_t kNonceBytes = 32;
  static constexpr std::size_t kKeyBytes = 32;
  static constexpr std::size_t kIvBytes = 12;
  static constexpr std::size_t kTagBytes = 16;
  static constexpr std::size_t kMinPskBytes = 16;
};

// Fixed-width byte string with hex round-tripping. Tag only distinguishes
// the domain types below.
template <std::size_t N, typename Tag>
class FixedBytes {
 public:
  static constexpr std::size_t kSize = N;

  FixedBytes() : bytes_{} {}
  explicit FixedBytes(const std::array<std::uint8_t, N>& bytes)
      : bytes_(bytes) {}

  // Throws kInvalidArgument unless data.size() == N.
  static FixedBytes FromBytes(ByteView data);
  // Throws kParseError on bad hex or wrong length.
  static FixedBytes FromHex(std::string_view hex);

  std::string ToHex() const { return HexEncode(bytes_); }
  ByteView view() const { return bytes_; }
  const std::array<std::uint8_t, N>& bytes() const { return bytes_; }
  std::array<std::uint8_t, N>& mutable_bytes() { return bytes_; }

  auto operator<=>(const FixedBytes&) const = default;

 private:
  std::array<std::uint8_t, N> bytes_;
};

template <std::size_t N, typename Tag>
inline FixedBytes<N, Tag> FixedBytes<N, Tag>::FromBytes(ByteView data) {
  if (data.size() != N) {
    throw Error(ErrorCode::kInvalidArgument,
                "expected " + std::to_string(N) + " bytes, got " +
                    std::to_string(data.size()));
  }
  std::array<std::uint8_t, N> out;
  std::copy(data.begin(), data.end(), out.begin());
  return FixedBytes(out);
}

template <std::size_t N, typename Tag>
inline FixedBytes<N, Tag> FixedBytes<N, Tag>::FromHex(std::string_view hex) {
  Bytes raw = HexDecode(hex);
  if (raw.size() != N) {
    throw Error(ErrorCode::kParseError,
                "expected " + std::to_string(2 * N) + " hex characters, got " +
                    std::to_string(hex.size()));
  }
  return FromBytes(raw);
}

struct DigestTag {};
struct NonceTag {};

using Digest = FixedBytes<CryptoSuite::kDigestBytes, DigestTag>;
using Nonce = FixedBytes<CryptoSuite::kNonceBytes, NonceTag>;

Nonce GenerateNonce(Rng& rng);
Nonce NonceFromOsEntropy();

class SymmetricKey;
SymmetricKey DeriveKey(ByteView s1, ByteView s2);

// Constructible only through DeriveKey.
class SymmetricKey {
 public:
  ByteView view() const { return bytes_; }
  bool operator==(const SymmetricKey&) const = default;

 private:
  friend SymmetricKey DeriveKey(ByteView s1, ByteView s2);
  explicit SymmetricKey(const std::array<std::uint8_t, CryptoSuite::kKeyBytes>& b)
      : bytes_(b) {}
  std::array<std::uint8_t, CryptoSuite::kKeyBytes> bytes_;
};

class PreSharedKey {
 public:
  // Throws kInvalidArgument for keys shorter than 128 bits.
  static PreSharedKey FromBytes(ByteView data);
  static PreSharedKey Generate(Rng& rng);

  ByteView view() const { return bytes_; }
  bool operator==(const PreSharedKey&) const = default;

 private:
  explicit PreSharedKey(Bytes b) : bytes_(std::move(b)) {}
  Bytes bytes_;
};

struct Ciphertext {
  std::array<std::uint8_t, CryptoSuite::kIvBytes> iv{};
  std::array<std::uint8_t, CryptoSuite::kTagBytes> tag{};
  Bytes body;

  // iv || tag || body.
  Bytes ToBytes() const;
  // Throws kMalformedInput when shorter than iv + tag.
  static Ciphertext FromBytes(ByteView data);

  bool operator==(const Ciphertext&) const = default;
};

Digest Hash(ByteView data);
inline Digest Hash(std::string_view data) { return Hash(AsBytes(data)); }

// sk = Hash(s1 || s2). Order matters.
SymmetricKey DeriveKey(const Nonce& s1, const Nonce& s2);
// Same over arbitrary byte strings.
SymmetricKey DeriveKey(ByteView s1, ByteView s2);

// Fresh IV from `rng` per call.
Ciphertext Encrypt(const SymmetricKey& key, ByteView plaintext, Rng& rng);
// Throws kAuthenticationFailed on a wrong key or any tampering; never returns
// unauthenticated plaintext.
Bytes Decrypt(const SymmetricKey& key, const Ciphertext& ciphertext);

Digest Mac(const PreSharedKey& psk, ByteView data);
// Constant-time tag comparison.
bool MacVerify(const PreSharedKey& psk, ByteView data, const Digest& tag);

}  // namespace dpmarket

#endif  // DPMARKET_CRYPTO_HPP_
