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

// The EPR test and the circuit test: schedules of measurement settings,
// their evaluation on a device, and the accept/reject verdict.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "selftest/statistics.hpp"

namespace selftest {

enum class Mode { Exact, Sampled };

std::string_view mode_name(Mode m);
Mode parse_mode(std::string_view text);

struct TestOptions {
  double eps = 0.1;
  double gamma = 0.05;
  std::uint64_t seed = 0;
  Mode mode = Mode::Exact;
  SampleSizeRule rule = SampleSizeRule::Hoeffding;
  std::optional<std::vector<int>> forced_y;
};

struct Experiment {
  ExperimentKind kind = ExperimentKind::Conspiracy;
  std::size_t step = 0;  ///< gates 1..step have been applied (A side; B side too for conspiracy)
  std::vector<std::size_t> wires;
  std::vector<GateRef> prep;
  IdealContext ideal;
  std::vector<Setting> settings;

  /// "C0", "T1", "C1", ...
  std::string name() const;
};

struct ExperimentSchedule {
  IdealCircuit circuit;
  std::vector<int> x;
  std::vector<int> y;
  /// NOT gates for every wire where x and y differ, then the circuit's gates.
  std::vector<IdealGate> steps;
  std::vector<Experiment> experiments;

  std::size_t record_count() const;
};

/// The 36 joint settings of one wire pair (all branches of both sides).
std::vector<Setting> epr_settings(std::size_t wire, const std::vector<GateRef>& prep = {});

ExperimentSchedule build_schedule(const IdealCircuit& circuit, const std::vector<int>& x,
                                  const std::vector<int>& y);

/// Real 2^n x 2^n matrix of a gate sequence (wire 0 is the most significant bit).
RealMatrix circuit_unitary(std::size_t n, const std::vector<IdealGate>& gates);

struct Verdict {
  bool accepted = false;
  double max_deviation = 0.0;
  std::vector<StatRecord> records;
  std::vector<StatRecord> failing;
  std::map<std::string, double> histogram;
  std::map<std::string, double> ideal_histogram;
  double tv_distance = 0.0;
  std::vector<int> y;
  std::size_t samples_per_statistic = 0;
  std::size_t n_total_samples = 0;
  std::size_t n_experiments = 0;
  double eps = 0.0;
  double gamma = 0.0;
  Mode mode = Mode::Exact;
  std::vector<std::string> notes;
};

/// Evaluates every setting of the experiments against their ideal values.
/// Record k draws its samples from the stream (options.seed, k).
Verdict evaluate_schedule(const DeviceModel& device, const std::vector<Experiment>& experiments,
                          const TestOptions& options);

Verdict epr_test(const DeviceModel& device, std::size_t wire, const TestOptions& options);

Verdict circuit_test(const DeviceModel& device, const IdealCircuit& circuit,
                     const std::vector<int>& x, const TestOptions& options);

/// Largest |device probability - ideal probability| over the settings.
double check_simulation(const DeviceModel& device, const PhysState& state,
                        const IdealContext& ideal, const std::vector<Setting>& settings);

/// For each B outcome x' on the circuit's wires, checks that the collapsed A
/// side behaves like |x'> under the A frames.
Verdict input_prep_check(const DeviceModel& device, const IdealCircuit& circuit, double eps);

/// Probability of outcome '0' after preparing basis state `input` on the A
/// subsystem of `wire` alone and applying the A-side gate `label` `repetitions` times.
double legacy_gate_check(const DeviceModel& device, const std::string& label, std::size_t wire,
                         std::size_t input, std::size_t repetitions);

}  // namespace selftest
