// Copyright 2026 The selftest Authors
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

#pragma once

#include <array>
#include <compare>
#include <string>
#include <string_view>

namespace selftest {

/// A measurement angle that is an integer multiple of pi/8, reduced mod pi.
///
/// Measurement settings only ever use the six angles {0, pi/8, pi/4} and
/// their complements {pi/2, 5pi/8, 3pi/4}; storing the multiple of pi/8
/// keeps complements exact and makes settings hashable and printable.
class Angle {
 public:
  constexpr Angle() = default;
  constexpr explicit Angle(int eighths) : eighths_(((eighths % 8) + 8) % 8) {}

  constexpr int eighths() const { return eighths_; }
  double radians() const;

  /// True for the branch a frame stores directly (0, pi/8, pi/4).
  constexpr bool is_primary() const { return eighths_ < 4; }
  constexpr Angle complement() const { return Angle(eighths_ + 4); }
  /// The primary angle whose projector pair contains this branch.
  constexpr Angle base() const { return Angle(eighths_ % 4); }

  std::string label() const;
  static Angle parse(std::string_view text);

  constexpr auto operator<=>(const Angle&) const = default;

 private:
  int eighths_ = 0;
};

inline constexpr Angle kAngle0{0};
inline constexpr Angle kAnglePi8{1};
inline constexpr Angle kAnglePi4{2};
inline constexpr Angle kAnglePi2{4};

/// The three angles whose projector pairs define a measurement frame.
inline constexpr std::array<Angle, 3> kFrameAngles{kAngle0, kAnglePi8, kAnglePi4};
/// All six outcome branches of the three frame measurements.
inline constexpr std::array<Angle, 6> kAllAngles{Angle{0}, Angle{1}, Angle{2},
                                                 Angle{4}, Angle{5}, Angle{6}};
/// Computational basis branches.
inline constexpr std::array<Angle, 2> kBasisAngles{kAngle0, kAnglePi2};
/// Branches used by tomographic reconstruction: 0, pi/4, pi/2.
inline constexpr std::array<Angle, 3> kTomographyAngles{kAngle0, kAnglePi4, kAnglePi2};

}  // namespace selftest
