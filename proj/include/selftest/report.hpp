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

// JSON forms of verdicts and equivalence reports. Matrices are row-major
// lists of [re, im] pairs; maps serialize with sorted keys, so identical
// inputs produce byte-identical output.

#pragma once

#include "selftest/device_io.hpp"

#include "selftest/extraction.hpp"

namespace selftest {

nlohmann::json setting_to_json(const Setting& setting);
nlohmann::json record_to_json(const StatRecord& record);
nlohmann::json verdict_to_json(const Verdict& verdict);
nlohmann::json equivalence_to_json(const EquivalenceReport& report);

}  // namespace selftest
