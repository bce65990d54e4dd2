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

// Outcome probabilities of measurement settings on a device, the ideal
// values they are compared against, and seeded sampling.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "selftest/devices.hpp"

namespace selftest {

/// One measured wire: the frame of (side, wire) and the outcome branch,
/// which is either a primary angle or its complement.
struct Measurement {
  Side side = Side::A;
  std::size_t wire = 0;
  Angle angle;

  bool operator==(const Measurement&) const = default;
};

struct Setting {
  std::vector<GateRef> prep;
  std::vector<Measurement> measurements;

  /// Compact text such as "A0=pi/8 B0=0".
  std::string describe() const;
  void validate() const;
};

struct StatRecord {
  Setting setting;
  double ideal_p = 0.0;
  double est_p = 0.0;
  std::size_t n_samples = 0;  ///< 0 in exact mode
  double deviation = 0.0;
  std::string experiment;
};

/// Source with the listed gates applied in order.
PhysState prepare(const DeviceModel& device, const std::vector<GateRef>& prep);
/// Squared norm of the measured branch projectors applied to `state`.
double measure_prob(const DeviceModel& device, const PhysState& state,
                    const std::vector<Measurement>& measurements);
double exact_prob(const DeviceModel& device, const Setting& setting);

enum class ExperimentKind { Conspiracy, Tomography, Computation };
std::string_view experiment_kind_name(ExperimentKind k);

/// What a setting is compared against.
///   Conspiracy:  2^{-n/2} sum_x |x>|x>, closed form 1/2 cos^2(a - b) per wire.
///   Tomography:  (T (x) Id) applied to that state on `wires`.
///   Computation: T|input> measured on the A side.
struct IdealContext {
  ExperimentKind kind = ExperimentKind::Conspiracy;
  std::vector<std::size_t> wires;
  RealMatrix t;
  std::vector<int> input;

  static IdealContext conspiracy();
  static IdealContext tomography(std::vector<std::size_t> wires, RealMatrix t);
  static IdealContext computation(std::size_t n, RealMatrix t, std::vector<int> input);
};

double ideal_prob(const IdealContext& ctx, const Setting& setting);

enum class SampleSizeRule { Hoeffding, Paper };

/// Samples per statistic so that all m estimates are within eps of their
/// means with probability at least 1 - gamma. Hoeffding: ln(2m/gamma)/(2 eps^2);
/// Paper: ln(2m/gamma)/(2 eps).
std::size_t sample_size(double eps, double gamma, std::size_t m,
                        SampleSizeRule rule = SampleSizeRule::Hoeffding);

/// Independent stream seed for record `index` under `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Fraction of n Bernoulli(p) trials that succeed.
double sample_prob(double p, std::size_t n, std::uint64_t master_seed, std::uint64_t index);
double sample_prob(const DeviceModel& device, const Setting& setting, std::size_t n,
                   std::uint64_t master_seed, std::uint64_t index);

/// Index drawn once from a categorical distribution.
std::size_t sample_categorical(const std::vector<double>& probs, std::uint64_t master_seed,
                               std::uint64_t index);
/// Empirical frequencies of n categorical draws.
std::vector<double> sample_frequencies(const std::vector<double>& probs, std::size_t n,
                                       std::uint64_t master_seed, std::uint64_t index);

}  // namespace selftest
