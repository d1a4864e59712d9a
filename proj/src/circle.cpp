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

#include "kochlab/circle.hpp"

#include <cmath>
#include <stdexcept>

namespace kochlab {

double grid_to_double(u128 raw) { return std::ldexp(static_cast<double>(raw), -128); }

CirclePoint CirclePoint::from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite circle coordinate");
  const double frac = x - std::floor(x);
  if (!(frac < 1.0)) return CirclePoint{};
  return CirclePoint(static_cast<u128>(std::ldexp(frac, 128)));
}

CirclePoint CirclePoint::from_ratio(std::int64_t p, std::uint64_t q) {
  if (q == 0) throw std::invalid_argument("zero denominator");
  const auto qi = static_cast<i128>(q);
  i128 num = static_cast<i128>(p) % qi;
  if (num < 0) num += qi;
  return CirclePoint(ratio_to_fraction(static_cast<u128>(num), static_cast<u128>(q)));
}

CirclePoint CirclePoint::parse(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text == "golden") return golden();
  if (text == "sqrt2m1") return sqrt2_minus_1();
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X'))
    return CirclePoint(parse_u128(text));
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto num = text.substr(0, slash);
    const auto den = text.substr(slash + 1);
    const u128 q = parse_u128(den);
    const u128 p = parse_u128(num);
    if (q == 0) throw std::invalid_argument("zero denominator");
    return CirclePoint(ratio_to_fraction(p % q, q));
  }
  if (text.size() >= 2 && text[0] == '0' && text[1] == '.')
    return CirclePoint(parse_decimal_fraction(text.substr(2)));
  if (text == "0") return CirclePoint{};
  throw std::invalid_argument("unrecognized circle point literal: " + std::string(text));
}

double CirclePoint::value() const {
  const double v = grid_to_double(raw_);
  return v < 1.0 ? v : std::nextafter(1.0, 0.0);
}

double CirclePoint::dist0() const { return grid_to_double(dist0_raw()); }

std::string CirclePoint::to_string() const { return to_hex(raw_); }

double dist(CirclePoint a, CirclePoint b) { return grid_to_double(dist_raw(a, b)); }

}  // namespace kochlab
