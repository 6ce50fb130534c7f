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

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

#include <algorithm>
#include <memory>

#include "dpmarket/error.hpp"

namespace dpmarket {

namespace {

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

CipherCtx NewCipherCtx() {
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) throw std::bad_alloc();
  return ctx;
}

[[noreturn]] void ThrowOpenSsl(const char* what) {
  throw std::runtime_error(std::string("OpenSSL failure in ") + what);
}

// OpenSSL rejects a null buffer even for zero-length input.
const std::uint8_t* NonNull(ByteView data) {
  static const std::uint8_t kEmpty = 0;
  return data.empty() ? &kEmpty : data.data();
}

}  // namespace

Nonce GenerateNonce(Rng& rng) {
  std::array<std::uint8_t, CryptoSuite::kNonceBytes> bytes;
  rng.FillBytes(bytes);
  return Nonce(bytes);
}

Nonce NonceFromOsEntropy() {
  std::array<std::uint8_t, CryptoSuite::kNonceBytes> bytes;
  if (RAND_bytes(bytes.data(), static_cast<int>(bytes.size())) != 1) {
    ThrowOpenSsl("RAND_bytes");
  }
  return Nonce(bytes);
}

PreSharedKey PreSharedKey::FromBytes(ByteView data) {
  if (data.size() < CryptoSuite::kMinPskBytes) {
    throw Error(ErrorCode::kInvalidArgument,
                "pre-shared key must be at least 16 bytes, got " +
                    std::to_string(data.size()));
  }
  return PreSharedKey(Bytes(data.begin(), data.end()));
}

PreSharedKey PreSharedKey::Generate(Rng& rng) {
  Bytes b(32);
  rng.FillBytes(b);
  return PreSharedKey(std::move(b));
}

Bytes Ciphertext::ToBytes() const {
  Bytes out;
  out.reserve(iv.size() + tag.size() + body.size());
  Append(out, iv);
  Append(out, tag);
  Append(out, body);
  return out;
}

Ciphertext Ciphertext::FromBytes(ByteView data) {
  constexpr std::size_t kHeader = CryptoSuite::kIvBytes + CryptoSuite::kTagBytes;
  if (data.size() < kHeader) {
    throw Error(ErrorCode::kMalformedInput,
                "ciphertext shorter than iv + tag (" +
                    std::to_string(data.size()) + " bytes)");
  }
  Ciphertext c;
  std::copy_n(data.begin(), c.iv.size(), c.iv.begin());
  std::copy_n(data.begin() + c.iv.size(), c.tag.size(), c.tag.begin());
  c.body.assign(data.begin() + kHeader, data.end());
  return c;
}

Digest Hash(ByteView data) {
  std::array<std::uint8_t, CryptoSuite::kDigestBytes> out;
  SHA256(NonNull(data), data.size(), out.data());
  return Digest(out);
}

SymmetricKey DeriveKey(ByteView s1, ByteView s2) {
  Bytes joined;
  joined.reserve(s1.size() + s2.size());
  Append(joined, s1);
  Append(joined, s2);
  return SymmetricKey(Hash(joined).bytes());
}

SymmetricKey DeriveKey(const Nonce& s1, const Nonce& s2) {
  return DeriveKey(s1.view(), s2.view());
}

Ciphertext Encrypt(const SymmetricKey& key, ByteView plaintext, Rng& rng) {
  Ciphertext out;
  rng.FillBytes(out.iv);
  out.body.resize(plaintext.size());

  CipherCtx ctx = NewCipherCtx();
  int len = 0;
  if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr,
                         nullptr) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN,
                          static_cast<int>(out.iv.size()), nullptr) != 1 ||
      EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key.view().data(),
                         out.iv.data()) != 1) {
    ThrowOpenSsl("EVP_EncryptInit_ex");
  }
  if (!plaintext.empty() &&
      EVP_EncryptUpdate(ctx.get(), out.body.data(), &len, plaintext.data(),
                        static_cast<int>(plaintext.size())) != 1) {
    ThrowOpenSsl("EVP_EncryptUpdate");
  }
  std::uint8_t final_block[16];
  if (EVP_EncryptFinal_ex(ctx.get(), final_block, &len) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG,
                          static_cast<int>(out.tag.size()),
                          out.tag.data()) != 1) {
    ThrowOpenSsl("EVP_EncryptFinal_ex");
  }
  return out;
}

Bytes Decrypt(const SymmetricKey& key, const Ciphertext& ciphertext) {
  Bytes plain(ciphertext.body.size());
  std::array<std::uint8_t, CryptoSuite::kTagBytes> tag = ciphertext.tag;

  CipherCtx ctx = NewCipherCtx();
  int len = 0;
  if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr,
                         nullptr) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN,
                          static_cast<int>(ciphertext.iv.size()),
                          nullptr) != 1 ||
      EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key.view().data(),
                         ciphertext.iv.data()) != 1) {
    ThrowOpenSsl("EVP_DecryptInit_ex");
  }
  if (!plain.empty() &&
      EVP_DecryptUpdate(ctx.get(), plain.data(), &len,
                        ciphertext.body.data(),
                        static_cast<int>(ciphertext.body.size())) != 1) {
    ThrowOpenSsl("EVP_DecryptUpdate");
  }
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG,
                          static_cast<int>(tag.size()), tag.data()) != 1) {
    ThrowOpenSsl("EVP_CTRL_GCM_SET_TAG");
  }
  std::uint8_t final_block[16];
  if (EVP_DecryptFinal_ex(ctx.get(), final_block, &len) != 1) {
    OPENSSL_cleanse(plain.data(), plain.size());
    throw Error(ErrorCode::kAuthenticationFailed,
                "ciphertext failed authentication");
  }
  return plain;
}

Digest Mac(const PreSharedKey& psk, ByteView data) {
  std::array<std::uint8_t, CryptoSuite::kDigestBytes> out;
  unsigned int out_len = 0;
  if (HMAC(EVP_sha256(), psk.view().data(), static_cast<int>(psk.view().size()),
           NonNull(data), data.size(), out.data(), &out_len) == nullptr ||
      out_len != out.size()) {
    ThrowOpenSsl("HMAC");
  }
  return Digest(out);
}

bool MacVerify(const PreSharedKey& psk, ByteView data, const Digest& tag) {
  const Digest expected = Mac(psk, data);
  return CRYPTO_memcmp(expected.view().data(), tag.view().data(),
                       Digest::kSize) == 0;
}

}  // namespace dpmarket
