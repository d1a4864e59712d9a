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

#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "kochlab/fixed_point.hpp"

namespace kochlab {

/// A point of the circle T = R/Z stored as an unsigned 128-bit binary
/// fraction: the represented value is raw / 2^128. Addition and integer
/// multiples wrap modulo 2^128, so rotations carry no rounding error beyond
/// the one-time quantization of the rotation number.
class CirclePoint {
 public:
  constexpr CirclePoint() = default;
  constexpr explicit CirclePoint(u128 raw) : raw_(raw) {}

  /// x mod 1, rounded toward zero to the 128-bit grid.
  static CirclePoint from_double(double x);
  /// p/q mod 1, exact floor on the 128-bit grid. q > 0.
  static CirclePoint from_ratio(std::int64_t p, std::uint64_t q);
  /// Accepts "golden", "sqrt2m1", "p/q", "0x<hex raw>" or a decimal literal.
  static CirclePoint parse(std::string_view text);

  static constexpr CirclePoint golden() {
    return CirclePoint(make_u128(0x9e3779b97f4a7c15ULL, 0xf39cc0605cedc834ULL));
  }
  static constexpr CirclePoint sqrt2_minus_1() {
    return CirclePoint(make_u128(0x6a09e667f3bcc908ULL, 0xb2fb1366ea957d3eULL));
  }

  constexpr u128 raw() const { return raw_; }
  /// Representative in [0, 1).
  double value() const;

  /// Circle distance to 0 on the 128-bit grid, in [0, 2^127].
  constexpr u128 dist0_raw() const {
    const u128 neg = -raw_;
    return raw_ <= neg ? raw_ : neg;
  }
  double dist0() const;

  constexpr CirclePoint& operator+=(CirclePoint o) {
    raw_ += o.raw_;
    return *this;
  }
  constexpr CirclePoint& operator-=(CirclePoint o) {
    raw_ -= o.raw_;
    return *this;
  }
  friend constexpr CirclePoint operator+(CirclePoint a, CirclePoint b) { return a += b; }
  friend constexpr CirclePoint operator-(CirclePoint a, CirclePoint b) { return a -= b; }
  friend constexpr CirclePoint operator-(CirclePoint a) { return CirclePoint(-a.raw_); }
  /// n * p mod 1 (two's complement wrap handles negative n).
  friend constexpr CirclePoint operator*(std::int64_t n, CirclePoint p) {
    return CirclePoint(static_cast<u128>(static_cast<i128>(n)) * p.raw_);
  }

  friend constexpr auto operator<=>(CirclePoint, CirclePoint) = default;

  std::string to_string() const;

 private:
  u128 raw_ = 0;
};

constexpr u128 dist_raw(CirclePoint a, CirclePoint b) { return (a - b).dist0_raw(); }
double dist(CirclePoint a, CirclePoint b);

/// Converts a grid distance (units of 2^-128) to a real number.
double grid_to_double(u128 raw);

}  // namespace kochlab
