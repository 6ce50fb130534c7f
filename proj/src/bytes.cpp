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

#include "dpmarket/bytes.hpp"

#include "dpmarket/error.hpp"

namespace dpmarket {

std::string_view ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kOutOfRange: return "out_of_range";
    case ErrorCode::kMalformedInput: return "malformed_input";
    case ErrorCode::kAuthenticationFailed: return "authentication_failed";
    case ErrorCode::kWrongPhase: return "wrong_phase";
    case ErrorCode::kDuplicateAddress: return "duplicate_address";
    case ErrorCode::kThresholdNotMet: return "threshold_not_met";
    case ErrorCode::kWrongAmount: return "wrong_amount";
    case ErrorCode::kRevealMismatch: return "reveal_mismatch";
    case ErrorCode::kMissingRecord: return "missing_record";
    case ErrorCode::kIntegrityFailure: return "integrity_failure";
    case ErrorCode::kParseError: return "parse_error";
  }
  return "unknown";
}

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int HexValue(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string HexEncode(ByteView data) {
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0x0f]);
  }
  return out;
}

Bytes HexDecode(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    throw Error(ErrorCode::kParseError, "hex string has odd length");
  }
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = HexValue(hex[2 * i]);
    int lo = HexValue(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) {
      throw Error(ErrorCode::kParseError,
                  "invalid hex character at offset " + std::to_string(2 * i));
    }
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

void AppendU16BE(Bytes& out, std::uint16_t value) {
  out.push_back(static_cast<std::uint8_t>(value >> 8));
  out.push_back(static_cast<std::uint8_t>(value));
}

void AppendU32BE(Bytes& out, std::uint32_t value) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(value >> shift));
  }
}

void AppendU64BE(Bytes& out, std::uint64_t value) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(value >> shift));
  }
}

void Append(Bytes& out, ByteView data) {
  out.insert(out.end(), data.begin(), data.end());
}

std::uint32_t ReadU32BE(ByteView data) {
  if (data.size() < 4) {
    throw Error(ErrorCode::kMalformedInput, "need 4 bytes for a u32");
  }
  return (std::uint32_t{data[0]} << 24) | (std::uint32_t{data[1]} << 16) |
         (std::uint32_t{data[2]} << 8) | std::uint32_t{data[3]};
}

Bytes PackBits(const std::vector<bool>& bits) {
  Bytes out((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  }
  return out;
}

std::vector<bool> UnpackBits(ByteView packed, std::size_t count) {
  if (packed.size() != (count + 7) / 8) {
    throw Error(ErrorCode::kMalformedInput,
                "packed bit field has " + std::to_string(packed.size()) +
                    " bytes, expected " + std::to_string((count + 7) / 8));
  }
  std::vector<bool> bits(count);
  for (std::size_t i = 0; i < count; ++i) {
    bits[i] = (packed[i / 8] >> (7 - i % 8)) & 1u;
  }
  return bits;
}

}  // namespace dpmarket
