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

#ifndef DPMARKET_BYTES_HPP_
#define DPMARKET_BYTES_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dpmarket {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

// Lowercase hex, two characters per byte.
std::string HexEncode(ByteView data);

// Accepts upper or lower case; throws kParseError on odd length or a
// non-hex character.
Bytes HexDecode(std::string_view hex);

void AppendU16BE(Bytes& out, std::uint16_t value);
void AppendU32BE(Bytes& out, std::uint32_t value);
void AppendU64BE(Bytes& out, std::uint64_t value);
void Append(Bytes& out, ByteView data);
std::uint32_t ReadU32BE(ByteView data);

// Bit i lands in byte i / 8 at position 7 - i % 8 (MSB first). Trailing pad
// bits are zero.
Bytes PackBits(const std::vector<bool>& bits);
std::vector<bool> UnpackBits(ByteView packed, std::size_t count);

inline ByteView AsBytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace dpmarket

#endif  // DPMARKET_BYTES_HPP_
