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

// JSON device and circuit files. Matrices are row-major lists of rows whose
// entries are [re, im] pairs (a bare number is read as a real entry).

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "selftest/devices.hpp"

namespace selftest {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j, const std::string& where);

DeviceModel device_from_json(const nlohmann::json& j);
nlohmann::json device_to_json(const DeviceModel& device);

IdealCircuit circuit_from_json(const nlohmann::json& j);
nlohmann::json circuit_to_json(const IdealCircuit& circuit);

/// Parse and validate; every failure is a ConfigError naming the file.
DeviceModel load_device(const std::filesystem::path& path);
IdealCircuit load_circuit(const std::filesystem::path& path);

void save_json(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace selftest
