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

#include "selftest/builtin.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace selftest {

namespace {

double parse_number(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw std::invalid_argument(std::string(what) + ": cannot parse number '" + std::string(text) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

}  // namespace

double parse_angle_expression(std::string_view text) {
  text = trim(text);
  const auto pi_at = text.find("pi");
  if (pi_at == std::string_view::npos) return parse_number(text, "angle");
  std::string_view coeff = text.substr(0, pi_at);
  std::string_view rest = text.substr(pi_at + 2);
  double value = std::numbers::pi;
  if (coeff == "-") {
    value = -value;
  } else if (!coeff.empty()) {
    if (coeff.back() == '*') coeff.remove_suffix(1);
    value *= parse_number(coeff, "angle");
  }
  if (!rest.empty()) {
    if (rest.front() != '/') throw std::invalid_argument("angle: unexpected text after pi in '" + std::string(text) + "'");
    value /= parse_number(rest.substr(1), "angle");
  }
  return value;
}

RealMatrix builtin_gate_matrix(std::string_view name) {
  name = trim(name);
  const double h = 1.0 / std::sqrt(2.0);
  if (name == "H") return (RealMatrix(2, 2) << h, h, h, -h).finished();
  if (name == "X" || name == "NOT") return (RealMatrix(2, 2) << 0, 1, 1, 0).finished();
  if (name == "CNOT") {
    return (RealMatrix(4, 4) << 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0).finished();
  }
  if (name == "SWAP") {
    return (RealMatrix(4, 4) << 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1).finished();
  }
  if (name.starts_with("ROT(") && name.ends_with(")")) {
    const double theta = parse_angle_expression(name.substr(4, name.size() - 5));
    return rotation(theta).real();
  }
  throw std::invalid_argument("unknown builtin gate '" + std::string(name) +
                              "' (known: H, X, NOT, CNOT, SWAP, ROT(theta))");
}

std::size_t builtin_gate_arity(std::string_view name) {
  return static_cast<std::size_t>(std::log2(static_cast<double>(builtin_gate_matrix(name).rows())) + 0.5);
}

IdealGate builtin_gate(std::string_view name, std::vector<std::size_t> wires) {
  RealMatrix m = builtin_gate_matrix(name);
  if (wires.size() != builtin_gate_arity(name)) {
    throw std::invalid_argument("gate '" + std::string(name) + "' acts on " +
                                std::to_string(builtin_gate_arity(name)) + " wire(s)");
  }
  return IdealGate{std::string(trim(name)), std::move(wires), std::move(m)};
}

std::vector<GalleryEntry> builtin_gallery() {
  return {
      {"builtin:honest", "ideal EPR pairs, the circuit's gates and ideal angle projectors"},
      {"builtin:vandam", "one wire hiding two qubits; passes the old Hadamard check, fails the EPR test"},
      {"builtin:depolarized?p=0.02", "honest gates and frames, each pair mixed with white noise of weight p"},
      {"builtin:rotated?theta=0.6283", "honest device behind local unitaries; statistics identical to honest"},
      {"builtin:classical", "honest gates and frames on classically correlated pairs"},
  };
}

bool is_builtin_uri(std::string_view text) { return text.starts_with("builtin:"); }

DeviceModel resolve_builtin_device(std::string_view uri, const IdealCircuit& circuit) {
  if (!is_builtin_uri(uri)) throw std::invalid_argument("not a builtin device URI: " + std::string(uri));
  std::string_view body = uri.substr(8);
  std::string_view name = body;
  std::map<std::string, std::string, std::less<>> params;
  if (const auto q = body.find('?'); q != std::string_view::npos) {
    name = body.substr(0, q);
    std::string_view query = body.substr(q + 1);
    while (!query.empty()) {
      const auto amp = query.find('&');
      const std::string_view item = query.substr(0, amp);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) throw std::invalid_argument("--device: malformed parameter '" + std::string(item) + "'");
      params.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
      query = amp == std::string_view::npos ? std::string_view{} : query.substr(amp + 1);
    }
  }
  auto take = [&](const std::string& key, double fallback) {
    const auto it = params.find(key);
    if (it == params.end()) return fallback;
    const double v = parse_angle_expression(it->second);
    params.erase(it);
    return v;
  };

  DeviceModel d;
  if (name == "honest") {
    d = honest_device(circuit);
  } else if (name == "vandam") {
    const double q = take("frame_qubit", 0.0);
    d = van_dam_device(VanDamOptions{static_cast<std::size_t>(q)});
  } else if (name == "depolarized") {
    const double p = take("p", 0.02);
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("--device: p must lie in [0, 1]");
    d = noisy_source_device(circuit, p);
  } else if (name == "rotated") {
    d = rotated_device(circuit, take("theta", 0.6283));
  } else if (name == "classical") {
    d = classical_source_device(circuit);
  } else {
    throw std::invalid_argument("--device: unknown builtin device '" + std::string(name) + "'");
  }
  if (!params.empty()) {
    throw std::invalid_argument("--device: unknown parameter '" + params.begin()->first + "' for builtin:" +
                                std::string(name));
  }
  return d;
}

IdealCircuit figure_one_circuit() {
  IdealCircuit c;
  c.n = 2;
  c.input = {0, 0};
  c.gates.push_back(builtin_gate("H", {0}));
  c.gates.push_back(builtin_gate("CNOT", {0, 1}));
  c.gates.push_back(builtin_gate("ROT(pi/5)", {1}));
  return c;
}

IdealCircuit bell_prep_circuit() {
  IdealCircuit c;
  c.n = 2;
  c.input = {0, 0};
  c.gates.push_back(builtin_gate("H", {0}));
  c.gates.push_back(builtin_gate("CNOT", {0, 1}));
  return c;
}

IdealCircuit single_gate_circuit(std::string_view name, std::size_t n, std::vector<std::size_t> wires) {
  IdealCircuit c;
  c.n = n;
  c.input = std::vector<int>(n, 0);
  c.gates.push_back(builtin_gate(name, std::move(wires)));
  return c;
}

}  // namespace selftest
