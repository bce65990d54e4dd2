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

// Named real gates and URI-addressable built-in devices.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "selftest/devices.hpp"

namespace selftest {

/// Matrix of a named real gate: H, X, NOT, CNOT, SWAP, ROT(theta).
/// theta is a decimal number or a multiple of pi such as "pi/5" or "2pi/3".
RealMatrix builtin_gate_matrix(std::string_view name);
std::size_t builtin_gate_arity(std::string_view name);
IdealGate builtin_gate(std::string_view name, std::vector<std::size_t> wires);

/// Parses "pi/8", "3pi/4", "-pi/5", "0.6283".
double parse_angle_expression(std::string_view text);

struct GalleryEntry {
  std::string uri;
  std::string description;
};

std::vector<GalleryEntry> builtin_gallery();

bool is_builtin_uri(std::string_view text);

/// Resolves builtin:honest, builtin:vandam[?frame_qubit=k],
/// builtin:depolarized?p=P, builtin:rotated?theta=T and builtin:classical
/// against a circuit (the circuit fixes the wire count and the gate set).
DeviceModel resolve_builtin_device(std::string_view uri, const IdealCircuit& circuit);

/// Two-wire, three-gate circuit: H on wire 0, CNOT(0,1), ROT(pi/5) on wire 1.
IdealCircuit figure_one_circuit();
/// H then CNOT on |00>.
IdealCircuit bell_prep_circuit();
IdealCircuit single_gate_circuit(std::string_view name, std::size_t n = 1,
                                 std::vector<std::size_t> wires = {0});

}  // namespace selftest
