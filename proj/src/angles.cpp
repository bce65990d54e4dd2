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

#include "selftest/angles.hpp"

#include <numbers>
#include <stdexcept>

namespace selftest {

double Angle::radians() const { return eighths_ * std::numbers::pi / 8.0; }

std::string Angle::label() const {
  static constexpr std::array<std::string_view, 8> kLabels{
      "0", "pi/8", "pi/4", "3pi/8", "pi/2", "5pi/8", "3pi/4", "7pi/8"};
  return std::string(kLabels[eighths_]);
}

Angle Angle::parse(std::string_view text) {
  for (int k = 0; k < 8; ++k) {
    if (Angle(k).label() == text) return Angle(k);
  }
  throw std::invalid_argument("unknown angle '" + std::string(text) +
                              "' (expected one of 0, pi/8, pi/4, pi/2, 5pi/8, 3pi/4)");
}

}  // namespace selftest
