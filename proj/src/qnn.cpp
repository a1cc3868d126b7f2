// Copyright 2026 The qcloud Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qcloud/qnn.hpp"

#include <string>

#include "qcloud/error.hpp"

namespace qcloud {

namespace {

void check_arity(std::size_t got, std::size_t want, const char *what) {
    if (got != want) {
        throw ConfigError(std::string(what) + ": expected " +
                          std::to_string(want) + " values, got " +
                          std::to_string(got));
    }
}

void check_matches(const CircuitConfig &config, const ParameterSet &params) {
    if (!(params.config() == config)) {
        throw ConfigError("parameter set was built for a different circuit");
    }
}

// Appends the three entangling chains of one block starting at `offset`.
void append_chains(std::vector<GateOp> &out, int n, std::span<const double> block,
                   std::ptrdiff_t offset) {
    constexpr GateKind kOrder[] = {GateKind::rzz, GateKind::rxx, GateKind::ryy};
    std::ptrdiff_t j = 0;
    for (const GateKind kind : kOrder) {
        for (int q = 0; q + 1 < n; ++q, ++j) {
            out.push_back({kind, q, q + 1,
                           block[static_cast<std::size_t>(j)], offset + j});
        }
    }
}

PauliAxis axis_of(GateKind kind) {
    switch (kind) {
    case GateKind::rxx:
        return PauliAxis::x;
    case GateKind::ryy:
        return PauliAxis::y;
    default:
        return PauliAxis::z;
    }
}

} // namespace

void validate(const CircuitConfig &config) {
    if (config.n_qubits < 2 || config.n_qubits > kMaxQubits) {
        throw ConfigError("circuit needs 2.." + std::to_string(kMaxQubits) +
                          " qubits for the entangling chains, got " +
                          std::to_string(config.n_qubits));
    }
    if (config.n_enc < 1) {
        throw ConfigError("n_enc must be >= 1");
    }
    if (config.n_var < 0) {
        throw ConfigError("n_var must be >= 0");
    }
}

std::size_t circuit_param_count(const CircuitConfig &config) {
    validate(config);
    return v_block_size(config.n_qubits) * static_cast<std::size_t>(config.n_enc) +
           w_block_size(config.n_qubits) * static_cast<std::size_t>(config.n_var);
}

std::size_t param_count(const CircuitConfig &config) {
    return circuit_param_count(config) + static_cast<std::size_t>(config.n_qubits) + 1;
}

ParameterSet::ParameterSet(const CircuitConfig &config)
    : config_(config), values_(param_count(config), 0.0) {}

ParameterSet ParameterSet::unflatten(const CircuitConfig &config,
                                     std::span<const double> flat) {
    ParameterSet out(config);
    check_arity(flat.size(), out.size(), "flat parameter vector");
    std::copy(flat.begin(), flat.end(), out.values_.begin());
    return out;
}

std::span<double> ParameterSet::encoding_block(int k) {
    if (k < 0 || k >= config_.n_enc) {
        throw ConfigError("encoding block index out of range");
    }
    const std::size_t len = v_block_size(config_.n_qubits);
    return std::span<double>(values_).subspan(static_cast<std::size_t>(k) * len, len);
}

std::span<const double> ParameterSet::encoding_block(int k) const {
    return const_cast<ParameterSet *>(this)->encoding_block(k);
}

std::span<double> ParameterSet::trailing_block(int l) {
    if (l < 0 || l >= config_.n_var) {
        throw ConfigError("trailing block index out of range");
    }
    const std::size_t len = w_block_size(config_.n_qubits);
    const std::size_t start =
        v_block_size(config_.n_qubits) * static_cast<std::size_t>(config_.n_enc);
    return std::span<double>(values_).subspan(start + static_cast<std::size_t>(l) * len,
                                              len);
}

std::span<const double> ParameterSet::trailing_block(int l) const {
    return const_cast<ParameterSet *>(this)->trailing_block(l);
}

std::span<double> ParameterSet::weights() noexcept {
    const auto n = static_cast<std::size_t>(config_.n_qubits);
    return std::span<double>(values_).subspan(values_.size() - n - 1, n);
}

std::span<const double> ParameterSet::weights() const noexcept {
    return const_cast<ParameterSet *>(this)->weights();
}

ParameterSet init_parameters(const CircuitConfig &config, double target_mean,
                             Rng &rng) {
    ParameterSet params(config);
    std::uniform_real_distribution<double> angle(-0.1, 0.1);
    const std::size_t n_angles = circuit_param_count(config);
    for (std::size_t i = 0; i < n_angles; ++i) {
        params.values()[i] = angle(rng);
    }
    const double limit = 1.0 / config.n_qubits;
    std::uniform_real_distribution<double> weight(-limit, limit);
    for (double &w : params.weights()) {
        w = weight(rng);
    }
    params.bias() = target_mean;
    return params;
}

std::vector<GateOp> compile_circuit(const ParameterSet &params,
                                    std::span<const double> angles) {
    const CircuitConfig &config = params.config();
    const int n = config.n_qubits;
    check_arity(angles.size(), static_cast<std::size_t>(n), "encoding angles");

    std::vector<GateOp> gates;
    gates.reserve(static_cast<std::size_t>(config.n_enc) *
                      (static_cast<std::size_t>(n) + v_block_size(n)) +
                  static_cast<std::size_t>(config.n_var) * w_block_size(n));

    std::ptrdiff_t offset = 0;
    for (int k = 0; k < config.n_enc; ++k) {
        for (int q = 0; q < n; ++q) {
            gates.push_back({GateKind::rx, q, q, angles[static_cast<std::size_t>(q)], -1});
        }
        append_chains(gates, n, params.encoding_block(k), offset);
        offset += static_cast<std::ptrdiff_t>(v_block_size(n));
    }
    for (int l = 0; l < config.n_var; ++l) {
        const auto block = params.trailing_block(l);
        append_chains(gates, n, block, offset);
        const std::ptrdiff_t rx_start = 3 * (n - 1);
        for (int q = 0; q < n; ++q) {
            const std::ptrdiff_t j = rx_start + q;
            gates.push_back({GateKind::rx, q, q, block[static_cast<std::size_t>(j)],
                             offset + j});
        }
        offset += static_cast<std::ptrdiff_t>(w_block_size(n));
    }
    return gates;
}

void apply_gate(QuantumState &state, const GateOp &gate) {
    if (gate.kind == GateKind::rx) {
        apply_rx(state, gate.qubit_a, gate.angle);
    } else {
        apply_two_qubit_rotation(state, axis_of(gate.kind), gate.qubit_a,
                                 gate.qubit_b, gate.angle);
    }
}

void apply_gate_inverse(QuantumState &state, const GateOp &gate) {
    GateOp inverse = gate;
    inverse.angle = -gate.angle;
    apply_gate(state, inverse);
}

void apply_encoding_layer(QuantumState &state, std::span<const double> angles) {
    check_arity(angles.size(), static_cast<std::size_t>(state.n_qubits()),
                "encoding angles");
    for (int q = 0; q < state.n_qubits(); ++q) {
        apply_rx(state, q, angles[static_cast<std::size_t>(q)]);
    }
}

void apply_v_block(QuantumState &state, std::span<const double> theta) {
    const int n = state.n_qubits();
    check_arity(theta.size(), v_block_size(n), "V block");
    std::vector<GateOp> gates;
    append_chains(gates, n, theta, 0);
    for (const auto &g : gates) {
        apply_gate(state, g);
    }
}

void apply_w_block(QuantumState &state, std::span<const double> phi) {
    const int n = state.n_qubits();
    check_arity(phi.size(), w_block_size(n), "W block");
    apply_v_block(state, phi.first(v_block_size(n)));
    apply_encoding_layer(state, phi.subspan(v_block_size(n)));
}

QuantumState prepare_state(const ParameterSet &params,
                           std::span<const double> angles) {
    QuantumState state(params.config().n_qubits);
    for (const auto &g : compile_circuit(params, angles)) {
        apply_gate(state, g);
    }
    return state;
}

double readout(const ParameterSet &params, std::span<const double> expectations) {
    const auto w = params.weights();
    check_arity(expectations.size(), w.size(), "readout expectations");
    double acc = params.bias();
    for (std::size_t n = 0; n < w.size(); ++n) {
        acc += w[n] * expectations[n];
    }
    return acc;
}

double forward(const CircuitConfig &config, const ParameterSet &params,
               std::span<const double> angles) {
    check_matches(config, params);
    const QuantumState state = prepare_state(params, angles);
    return readout(params, expectations_z(state));
}

double forward_sampled(const CircuitConfig &config, const ParameterSet &params,
                       std::span<const double> angles, std::uint64_t n_shots,
                       Rng &rng) {
    check_matches(config, params);
    if (n_shots == 0) {
        throw ConfigError("n_shots must be at least 1");
    }
    const QuantumState state = prepare_state(params, angles);
    const BitstringCounts counts = sample_bitstrings(state, n_shots, rng);
    return readout(params, estimate_expectations_z(counts, config.n_qubits));
}

} // namespace qcloud
