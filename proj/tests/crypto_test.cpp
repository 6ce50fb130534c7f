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

#include "dpmarket/crypto.hpp"

#include <gtest/gtest.h>

#include <bit>

#include "dpmarket/error.hpp"
#include "dpmarket/ldp.hpp"
#include "dpmarket/rng.hpp"

namespace dpmarket {
namespace {

TEST(HashTest, KnownVectors) {
  EXPECT_EQ(Hash(std::string_view()).ToHex(),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(Hash(std::string_view("abc")).ToHex(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(Hash(std::string_view("x")), Hash(std::string_view("x")));
}

TEST(HashTest, Avalanche) {
  Rng rng(42);
  double total = 0;
  constexpr int kTrials = 1000;
  for (int t = 0; t < kTrials; ++t) {
    Bytes msg(32);
    rng.FillBytes(msg);
    const Digest a = Hash(ByteView(msg));
    const std::size_t bit = rng.UniformIndex(msg.size() * 8);
    msg[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    const Digest b = Hash(ByteView(msg));
    int diff = 0;
    for (std::size_t i = 0; i < a.kSize; ++i) diff += std::popcount<unsigned>(a.bytes()[i] ^ b.bytes()[i]);
    total += diff / 256.0;
  }
  EXPECT_NEAR(total / kTrials, 0.5, 0.01);
}

TEST(DeriveKeyTest, DefinitionAndOrder) {
  Rng rng(1);
  const Nonce a = GenerateNonce(rng), b = GenerateNonce(rng);
  EXPECT_EQ(DeriveKey(a, b), DeriveKey(a, b));
  EXPECT_FALSE(DeriveKey(a, b) == DeriveKey(b, a));
  Bytes cat(a.view().begin(), a.view().end());
  Append(cat, b.view());
  const Digest h = Hash(ByteView(cat));
  const SymmetricKey k = DeriveKey(a, b);
  EXPECT_TRUE(std::equal(k.view().begin(), k.view().end(), h.view().begin()));
}

TEST(EncryptTest, RoundTrips) {
  Rng rng(2);
  const SymmetricKey key = DeriveKey(GenerateNonce(rng), GenerateNonce(rng));
  EXPECT_TRUE(Decrypt(key, Encrypt(key, {}, rng)).empty());
  const ResponseBits r = Randomize(EncodeTruth(20, 4), CoinBias::Fair(), rng);
  const Bytes pt = r.Serialize();
  const Ciphertext ct = Encrypt(key, pt, rng);
  EXPECT_EQ(ResponseBits::Deserialize(Decrypt(key, ct)), r);
  EXPECT_EQ(Ciphertext::FromBytes(ct.ToBytes()), ct);
}

TEST(EncryptTest, FreshIvPerCall) {
  Rng rng(3);
  const SymmetricKey key = DeriveKey(GenerateNonce(rng), GenerateNonce(rng));
  const Bytes pt{1, 2, 3};
  EXPECT_NE(Encrypt(key, pt, rng).iv, Encrypt(key, pt, rng).iv);
}

TEST(EncryptTest, EveryBitFlipFailsAuthentication) {
  Rng rng(4);
  const SymmetricKey key = DeriveKey(GenerateNonce(rng), GenerateNonce(rng));
  const Bytes pt = EncodeTruth(20, 3).Serialize();
  const Bytes wire = Encrypt(key, pt, rng).ToBytes();
  for (std::size_t bit = 0; bit < wire.size() * 8; ++bit) {
    Bytes bad = wire;
    bad[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    try {
      Decrypt(key, Ciphertext::FromBytes(bad));
      FAIL() << "bit " << bit << " accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kAuthenticationFailed);
    }
  }
}

TEST(EncryptTest, WrongKeyFails) {
  Rng rng(5);
  const Nonce s1 = GenerateNonce(rng), s2 = GenerateNonce(rng);
  const Ciphertext ct = Encrypt(DeriveKey(s1, s2), Bytes{9}, rng);
  EXPECT_THROW(Decrypt(DeriveKey(s2, s1), ct), Error);
}

TEST(CiphertextTest, RejectsShortInput) {
  EXPECT_THROW(Ciphertext::FromBytes(Bytes(27)), Error);
  EXPECT_NO_THROW(Ciphertext::FromBytes(Bytes(28)));
}

TEST(MacTest, VerifyAndKeySeparation) {
  Rng rng(6);
  const PreSharedKey k = PreSharedKey::Generate(rng);
  const Bytes data{1, 2, 3, 4};
  const Digest tag = Mac(k, data);
  EXPECT_TRUE(MacVerify(k, data, tag));
  EXPECT_NE(tag, Hash(ByteView(data)));
  for (int i = 0; i < 100; ++i) {
    EXPECT_FALSE(MacVerify(PreSharedKey::Generate(rng), data, tag));
  }
  Bytes other = data;
  other[0] ^= 1;
  EXPECT_FALSE(MacVerify(k, other, tag));
}

TEST(MacTest, Rfc4231Case1) {
  const PreSharedKey k = PreSharedKey::FromBytes(Bytes(20, 0x0b));
  EXPECT_EQ(Mac(k, AsBytes("Hi There")).ToHex(),
            "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7");
  EXPECT_THROW(PreSharedKey::FromBytes(AsBytes("Jefe")), Error);
}

TEST(FixedBytesTest, HexRoundTripAndErrors) {
  Rng rng(7);
  const Nonce n = GenerateNonce(rng);
  EXPECT_EQ(Nonce::FromHex(n.ToHex()), n);
  EXPECT_THROW(Nonce::FromHex("abcd"), Error);
  EXPECT_THROW(Nonce::FromHex(std::string(64, 'z')), Error);
  EXPECT_THROW(Digest::FromBytes(Bytes(31)), Error);
}

}  // namespace
}  // namespace dpmarket
