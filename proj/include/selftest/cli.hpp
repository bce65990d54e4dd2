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


// Command-line front end. Exit codes: 0 accept, 1 reject, 2 usage or
// configuration error.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "selftest/device_io.hpp"

namespace selftest {

struct RunConfig {
  std::string command;
  std::string device;
  std::string circuit;
  std::string x;
  std::optional<std::size_t> wire;
  double eps = 0.1;
  double gamma = 0.05;
  std::optional<std::uint64_t> seed;
  std::string mode = "exact";
  std::string out;
  std::string force_y;
  std::optional<std::size_t> gate_index;

  /// Throws ConfigError naming the flag and the violated constraint.
  void validate() const;
  nlohmann::json to_json() const;
};

/// Circuit file, or one of builtin:figure1, builtin:bell, builtin:<GATE>.
IdealCircuit resolve_circuit(const std::string& spec);

/// Device file or builtin URI; builtin devices are built for `circuit`.
DeviceModel resolve_device(const std::string& spec, const IdealCircuit& circuit);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace selftest
