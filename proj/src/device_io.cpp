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

#include "selftest/device_io.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>

#include "selftest/builtin.hpp"

namespace selftest {

using nlohmann::json;

namespace {

Complex entry_from_json(const json& e, const std::string& where) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
    return {e[0].get<double>(), e[1].get<double>()};
  }
  throw ConfigError(where + ": matrix entries must be numbers or [re, im] pairs");
}

bool is_entry(const json& e) {
  return e.is_number() || (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number());
}

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  return j.at(key);
}

std::vector<std::size_t> size_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected a list of non-negative integers");
  std::vector<std::size_t> out;
  for (const json& e : j) {
    if (!e.is_number_integer() || e.get<long long>() < 0) {
      throw ConfigError(where + ": expected a list of non-negative integers");
    }
    out.push_back(e.get<std::size_t>());
  }
  return out;
}

Vector vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected a list of amplitudes");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = entry_from_json(j[i], where);
  return v;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

}  // namespace

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": matrix must be a non-empty list");
  // flat form: d*d entries, row-major; a real row [a, b] also parses as an
  // entry, so a non-square count means nested rows
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(j.size()))));
  if (is_entry(j[0]) && static_cast<std::size_t>(d * d) == j.size()) {
    Matrix m(d, d);
    for (Eigen::Index k = 0; k < d * d; ++k) m(k / d, k % d) = entry_from_json(j[static_cast<std::size_t>(k)], where);
    return m;
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].is_array() ? j[0].size() : 0);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ConfigError(where + ": matrix rows must all have the same length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = entry_from_json(row[static_cast<std::size_t>(c)], where);
  }
  return m;
}

DeviceModel device_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("device: top level must be an object");
  DeviceModel d;
  d.name = j.value("name", std::string("file"));
  d.description = j.value("description", std::string("device loaded from file"));

  const json& lay = require(j, "layout", "device");
  const json& nw = require(lay, "n_wires", "layout");
  if (!nw.is_number_integer() || nw.get<long long>() < 1) throw ConfigError("layout: n_wires must be a positive integer");
  d.layout.n_wires = nw.get<std::size_t>();
  const std::size_t n = d.layout.n_wires;
  d.layout.a_dims = lay.contains("a_dims") ? size_list(lay["a_dims"], "layout.a_dims") : std::vector<std::size_t>(n, 2);
  d.layout.b_dims = lay.contains("b_dims") ? size_list(lay["b_dims"], "layout.b_dims") : std::vector<std::size_t>(n, 2);

  const json& src = require(j, "source", "device");
  const std::string kind = require(src, "kind", "source").get<std::string>();
  const json params = src.value("params", json::object());

  std::optional<std::vector<std::size_t>> c_dims;
  if (lay.contains("c_dim")) {
    const json& c = lay["c_dim"];
    if (c.is_number_integer()) {
      c_dims = std::vector<std::size_t>(n, c.get<std::size_t>());
    } else {
      c_dims = size_list(c, "layout.c_dim");
    }
  }

  if (kind == "epr") {
    d.source_spec = SourceSpec{SourceKind::Epr, 0.0};
    d.layout.c_dims = c_dims.value_or(std::vector<std::size_t>(n, 1));
    d.layout.validate();
    std::vector<PhysState> pairs;
    for (std::size_t i = 0; i < n; ++i) {
      if (d.layout.a_dims[i] != 2 || d.layout.b_dims[i] != 2) {
        throw ConfigError("source: kind 'epr' needs qubit wires (wire " + std::to_string(i) + ")");
      }
      const std::size_t c = d.layout.c_dims[i];
      Vector v = Vector::Zero(static_cast<Eigen::Index>(4 * c));
      v(0) = v(static_cast<Eigen::Index>(3 * c)) = 1.0 / std::sqrt(2.0);
      pairs.emplace_back(SubsystemDims({2, 2, c}), v);
    }
    d.source = assemble_source(d.layout, pairs);
  } else if (kind == "depolarized") {
    const double p = require(params, "p", "source.params").get<double>();
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("source: depolarizing weight p must lie in [0, 1]");
    d.source_spec = SourceSpec{SourceKind::Depolarized, p};
    if (c_dims && *c_dims != std::vector<std::size_t>(n, 4)) {
      throw ConfigError("source: kind 'depolarized' purifies into c_dim = 4 per wire");
    }
    d.layout.c_dims = std::vector<std::size_t>(n, 4);
    d.layout.validate();
    d.source = assemble_source(d.layout, std::vector<PhysState>(n, depolarized_pair(p)));
  } else if (kind == "matrix") {
    d.source_spec = SourceSpec{SourceKind::Matrix, 0.0};
    d.layout.c_dims = c_dims.value_or(std::vector<std::size_t>(n, 1));
    d.layout.validate();
    if (params.contains("pairs")) {
      std::vector<PhysState> pairs;
      for (std::size_t i = 0; i < params["pairs"].size() && i < n; ++i) {
        const std::string where = "source.params.pairs[" + std::to_string(i) + "]";
        pairs.emplace_back(SubsystemDims({d.layout.a_dims[i], d.layout.b_dims[i], d.layout.c_dims[i]}),
                           vector_from_json(params["pairs"][i], where));
      }
      try {
        d.source = assemble_source(d.layout, pairs);
      } catch (const std::exception& e) {
        throw ConfigError(std::string("source: ") + e.what());
      }
    } else {
      Vector amps = vector_from_json(require(params, "amplitudes", "source.params"), "source.params.amplitudes");
      if (static_cast<std::size_t>(amps.size()) != d.layout.full().total_dim()) {
        throw ConfigError("source: amplitude vector length does not match the layout");
      }
      d.source = PhysState(d.layout.full(), std::move(amps));
    }
  } else {
    throw ConfigError("source: kind must be epr, matrix or depolarized (got '" + kind + "')");
  }

  for (const json& g : require(j, "gates", "device")) {
    const std::string label = require(g, "label", "gate").get<std::string>();
    const std::string where = "gate '" + label + "'";
    DeviceGate gate{label, parse_side(require(g, "side", where).get<std::string>()),
                    size_list(require(g, "wires", where), where + ".wires"),
                    matrix_from_json(require(g, "matrix", where), where)};
    set_gate(d, std::move(gate));
  }

  struct Pending {
    std::array<std::optional<Matrix>, 8> by_eighth;
  };
  std::map<std::pair<int, std::size_t>, Pending> pending;
  for (const json& f : require(j, "frames", "device")) {
    const Side side = parse_side(require(f, "side", "frame").get<std::string>());
    const std::size_t wire = require(f, "wire", "frame").get<std::size_t>();
    const std::string where = "frame side " + std::string(side_name(side)) + " wire " + std::to_string(wire);
    const std::string angle_text = require(f, "angle", where).get<std::string>();
    Angle a;
    try {
      a = Angle::parse(angle_text);
    } catch (const std::exception&) {
      throw ConfigError(where + ": angle must be one of \"0\", \"pi/8\", \"pi/4\" (or a complement)");
    }
    if (a.base().eighths() > 2) throw ConfigError(where + ": angle " + angle_text + " is not a frame angle");
    pending[{static_cast<int>(side), wire}].by_eighth[static_cast<std::size_t>(a.eighths())] =
        matrix_from_json(require(f, "matrix", where), where);
  }
  for (auto& [key, p] : pending) {
    const Side side = static_cast<Side>(key.first);
    const std::string where = "frame side " + std::string(side_name(side)) + " wire " + std::to_string(key.second);
    MeasurementFrame frame{side, key.second, {}};
    for (int k = 0; k < 3; ++k) {
      const auto& primary = p.by_eighth[static_cast<std::size_t>(k)];
      const auto& comp = p.by_eighth[static_cast<std::size_t>(k + 4)];
      const std::string at = where + " angle " + Angle(k).label();
      if (!primary && !comp) throw ConfigError(at + ": projector missing");
      if (primary && comp) {
        if (primary->rows() != comp->rows() || primary->cols() != comp->cols()) {
          throw ConfigError(at + ": complement has a different size");
        }
        const Matrix sum = *primary + *comp;
        if ((sum - Matrix::Identity(sum.rows(), sum.cols())).norm() > 1e-10) {
          throw ConfigError(at + ": P^" + Angle(k).label() + " + P^" + Angle(k + 4).label() +
                            " is not the identity");
        }
      }
      frame.primary[static_cast<std::size_t>(k)] =
          primary ? *primary : Matrix(Matrix::Identity(comp->rows(), comp->cols()) - *comp);
    }
    set_frame(d, std::move(frame));
  }

  try {
    d.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("device invalid: ") + e.what());
  }
  return d;
}

json device_to_json(const DeviceModel& device) {
  json j;
  j["name"] = device.name;
  j["description"] = device.description;
  j["layout"] = {{"n_wires", device.layout.n_wires},
                 {"a_dims", device.layout.a_dims},
                 {"b_dims", device.layout.b_dims},
                 {"c_dim", device.layout.c_dims}};
  // the exact amplitudes always round-trip, whatever recipe built them
  j["source"] = {{"kind", "matrix"}, {"params", {{"amplitudes", vector_to_json(device.source.amplitudes)}}}};
  json gates = json::array();
  for (const DeviceGate& g : device.gates) {
    gates.push_back({{"label", g.label}, {"side", side_name(g.side)}, {"wires", g.wires}, {"matrix", matrix_to_json(g.unitary)}});
  }
  j["gates"] = gates;
  json frames = json::array();
  for (const MeasurementFrame& f : device.frames) {
    for (int k = 0; k < 3; ++k) {
      frames.push_back({{"side", side_name(f.side)},
                        {"wire", f.wire},
                        {"angle", Angle(k).label()},
                        {"matrix", matrix_to_json(f.primary[static_cast<std::size_t>(k)])}});
    }
  }
  j["frames"] = frames;
  return j;
}

IdealCircuit circuit_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("circuit: top level must be an object");
  IdealCircuit c;
  const json& n = require(j, "n", "circuit");
  if (!n.is_number_integer() || n.get<long long>() < 1) throw ConfigError("circuit: n must be a positive integer");
  c.n = n.get<std::size_t>();
  if (j.contains("input")) {
    const json& in = j["input"];
    try {
      if (in.is_string()) {
        c.input = parse_bits(in.get<std::string>(), c.n);
      } else {
        for (const json& b : in) c.input.push_back(b.get<int>());
      }
    } catch (const std::exception& e) {
      throw ConfigError(std::string("circuit.input: ") + e.what());
    }
  } else {
    c.input.assign(c.n, 0);
  }
  for (const json& g : require(j, "gates", "circuit")) {
    const std::string where = "circuit gate " + std::to_string(c.gates.size());
    std::vector<std::size_t> wires = size_list(require(g, "wires", where), where + ".wires");
    if (g.contains("builtin")) {
      try {
        IdealGate gate = builtin_gate(g["builtin"].get<std::string>(), std::move(wires));
        if (g.contains("label")) gate.label = g["label"].get<std::string>();
        c.gates.push_back(std::move(gate));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
      }
      continue;
    }
    const std::string label = require(g, "label", where).get<std::string>();
    const Matrix m = matrix_from_json(require(g, "matrix", where), where);
    if (m.imag().cwiseAbs().maxCoeff() > 1e-12) {
      throw ConfigError(where + " ('" + label +
                        "'): ideal gates must have real-valued coefficients; complex gates cannot be self-tested");
    }
    c.gates.push_back(IdealGate{label, std::move(wires), m.real()});
  }
  try {
    c.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("circuit invalid: ") + e.what());
  }
  return c;
}

json circuit_to_json(const IdealCircuit& circuit) {
  json gates = json::array();
  for (const IdealGate& g : circuit.gates) {
    gates.push_back({{"label", g.label}, {"wires", g.wires}, {"matrix", matrix_to_json(g.matrix.cast<Complex>())}});
  }
  return {{"n", circuit.n}, {"input", bits_to_string(circuit.input)}, {"gates", gates}};
}

namespace {
json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path.string() + "': parse error: " + e.what());
  }
}

template <typename F>
auto with_path(const std::filesystem::path& path, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError("'" + path.string() + "': " + e.what());
  } catch (const json::exception& e) {
    throw ConfigError("'" + path.string() + "': " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("'" + path.string() + "': " + e.what());
  } catch (const InvariantError& e) {
    throw ConfigError("'" + path.string() + "': " + e.what());
  }
}
}  // namespace

DeviceModel load_device(const std::filesystem::path& path) {
  const json j = read_json(path);
  return with_path(path, [&] { return device_from_json(j); });
}

IdealCircuit load_circuit(const std::filesystem::path& path) {
  const json j = read_json(path);
  return with_path(path, [&] { return circuit_from_json(j); });
}

void save_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

}  // namespace selftest
