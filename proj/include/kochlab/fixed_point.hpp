// Copyright 2026 The kochlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// 128-bit unsigned helpers for the fixed-point circle representation.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace kochlab {

using u128 = unsigned __int128;
using i128 = __int128;

constexpr u128 make_u128(std::uint64_t hi, std::uint64_t lo) {
  return (static_cast<u128>(hi) << 64) | lo;
}
constexpr std::uint64_t hi64(u128 v) { return static_cast<std::uint64_t>(v >> 64); }
constexpr std::uint64_t lo64(u128 v) { return static_cast<std::uint64_t>(v); }

constexpr int bit_width(u128 v) {
  if (hi64(v) != 0) return 128 - __builtin_clzll(hi64(v));
  if (lo64(v) != 0) return 64 - __builtin_clzll(lo64(v));
  return 0;
}

// floor(a * b / 2^128).
constexpr u128 mulhi(u128 a, u128 b) {
  const u128 a0 = lo64(a), a1 = hi64(a), b0 = lo64(b), b1 = hi64(b);
  const u128 p00 = a0 * b0, p01 = a0 * b1, p10 = a1 * b0, p11 = a1 * b1;
  const u128 mid = (p00 >> 64) + lo64(p01) + lo64(p10);
  return p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
}

struct DivMod {
  u128 quot;
  u128 rem;
};

// floor(2^128 / d) and 2^128 mod d, for d >= 2.
constexpr DivMod divmod_pow128(u128 d) {
  const u128 all = ~static_cast<u128>(0);
  u128 q = all / d;
  u128 r = all % d + 1;
  if (r == d) {
    ++q;
    r = 0;
  }
  return {q, r};
}

// floor(num * 2^128 / den) for num < den.
constexpr u128 ratio_to_fraction(u128 num, u128 den) {
  u128 r = num;
  u128 out = 0;
  for (int i = 0; i < 128; ++i) {
    const bool carry = (r >> 127) != 0;
    r <<= 1;
    out <<= 1;
    if (carry || r >= den) {
      r -= den;
      out |= 1;
    }
  }
  return out;
}

// Returns false on overflow.
inline bool checked_mul(u128 a, u128 b, u128& out) { return !__builtin_mul_overflow(a, b, &out); }
inline bool checked_add(u128 a, u128 b, u128& out) { return !__builtin_add_overflow(a, b, &out); }

std::string to_decimal(u128 v);
std::string to_hex(u128 v);

// Parses "0x..." (hex) or a decimal integer.
u128 parse_u128(std::string_view text);

// Parses the fractional digits of a decimal literal "0.ddd..." into a
// 128-bit binary fraction (floor of each division step).
u128 parse_decimal_fraction(std::string_view digits);

}  // namespace kochlab
