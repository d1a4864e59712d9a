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

#include "kochlab/fixed_point.hpp"

#include <algorithm>
#include <stdexcept>

namespace kochlab {

std::string to_decimal(u128 v) {
  if (v == 0) return "0";
  std::string out;
  while (v != 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::string to_hex(u128 v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(32, '0');
  for (int i = 31; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[static_cast<int>(v & 0xf)];
    v >>= 4;
  }
  return "0x" + out;
}

u128 parse_u128(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty integer literal");
  u128 out = 0;
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    text.remove_prefix(2);
    if (text.empty() || text.size() > 32) throw std::invalid_argument("bad hex literal");
    for (char c : text) {
      int d;
      if (c >= '0' && c <= '9') d = c - '0';
      else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
      else throw std::invalid_argument("bad hex digit");
      out = (out << 4) | static_cast<u128>(d);
    }
    return out;
  }
  for (char c : text) {
    if (c < '0' || c > '9') throw std::invalid_argument("bad decimal digit");
    u128 next;
    if (!checked_mul(out, 10, next) || !checked_add(next, static_cast<u128>(c - '0'), next))
      throw std::out_of_range("integer literal overflows 128 bits");
    out = next;
  }
  return out;
}

u128 parse_decimal_fraction(std::string_view digits) {
  u128 r = 0;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    const char c = *it;
    if (c < '0' || c > '9') throw std::invalid_argument("bad decimal digit");
    // (d * 2^128 + r) / 10 by 64-bit limbs; d < 10 so the top limb quotient is 0.
    u128 t = (static_cast<u128>(c - '0') << 64) | hi64(r);
    const u128 q_hi = t / 10;
    t = ((t % 10) << 64) | lo64(r);
    const u128 q_lo = t / 10;
    r = (q_hi << 64) | q_lo;
  }
  return r;
}

}  // namespace kochlab
