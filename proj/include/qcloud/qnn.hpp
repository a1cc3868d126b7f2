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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qcloud/statevector.hpp"

namespace qcloud {

/// Architecture of the data re-uploading circuit. One qubit per feature.
struct CircuitConfig {
    int n_qubits = 8;
    int n_enc = 5;
    int n_var = 3;

    friend bool operator==(const CircuitConfig &, const CircuitConfig &) = default;
};

/// Throws ConfigError unless 2 <= n_qubits <= 12, n_enc >= 1, n_var >= 0.
void validate(const CircuitConfig &config);

/// Scalars per encoding-stage block: ZZ, XX and YY chains of N-1 angles each.
[[nodiscard]] constexpr std::size_t v_block_size(int n_qubits) {
    return 3 * static_cast<std::size_t>(n_qubits - 1);
}

/// Scalars per trailing block: the three chains plus one RX per qubit.
[[nodiscard]] constexpr std::size_t w_block_size(int n_qubits) {
    return 4 * static_cast<std::size_t>(n_qubits) - 3;
}

/// 3(N-1) n_enc + (4N-3) n_var + N + 1.
[[nodiscard]] std::size_t param_count(const CircuitConfig &config);

/// Number of rotation angles (everything except readout weights and bias).
[[nodiscard]] std::size_t circuit_param_count(const CircuitConfig &config);

/**
 * Trainable parameters in their flat storage order:
 *
 *   encoding blocks k = 1..n_enc, each 3(N-1) angles in index order,
 *   trailing blocks l = 1..n_var, each 4N-3 angles in index order,
 *   readout weights w (N values), bias b.
 *
 * Checkpoints and gradient vectors use the same order.
 */
class ParameterSet {
  public:
    explicit ParameterSet(const CircuitConfig &config);

    /// Throws ConfigError when `flat` has the wrong length.
    static ParameterSet unflatten(const CircuitConfig &config,
                                  std::span<const double> flat);
    [[nodiscard]] std::vector<double> flatten() const { return values_; }

    [[nodiscard]] const CircuitConfig &config() const noexcept { return config_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

    [[nodiscard]] std::span<double> values() noexcept { return values_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    [[nodiscard]] std::span<double> encoding_block(int k);
    [[nodiscard]] std::span<const double> encoding_block(int k) const;
    [[nodiscard]] std::span<double> trailing_block(int l);
    [[nodiscard]] std::span<const double> trailing_block(int l) const;
    [[nodiscard]] std::span<double> weights() noexcept;
    [[nodiscard]] std::span<const double> weights() const noexcept;
    [[nodiscard]] double &bias() noexcept { return values_.back(); }
    [[nodiscard]] double bias() const noexcept { return values_.back(); }

  private:
    CircuitConfig config_;
    std::vector<double> values_;
};

/// Circuit angles ~ U(-0.1, 0.1), w ~ U(-1/N, 1/N), b = target_mean.
[[nodiscard]] ParameterSet init_parameters(const CircuitConfig &config,
                                           double target_mean, Rng &rng);

enum class GateKind { rx, rxx, ryy, rzz };

/// One rotation exp(-i angle/2 P) in a compiled circuit. `param_index` is the
/// flat ParameterSet index that supplied the angle, or -1 for data encoding.
struct GateOp {
    GateKind kind;
    int qubit_a;
    int qubit_b;
    double angle;
    std::ptrdiff_t param_index;
};

/// Flattens the full circuit for one input into a gate list, in application
/// order: [S(x) V(theta_k)] for k = 1..n_enc, then W(phi_l) for l = 1..n_var.
[[nodiscard]] std::vector<GateOp> compile_circuit(const ParameterSet &params,
                                                  std::span<const double> angles);

void apply_gate(QuantumState &state, const GateOp &gate);
void apply_gate_inverse(QuantumState &state, const GateOp &gate);

/// Rx(x_n) on qubit n for every n.
void apply_encoding_layer(QuantumState &state, std::span<const double> angles);

/// ZZ chain, then XX chain, then YY chain over pairs (n, n+1).
void apply_v_block(QuantumState &state, std::span<const double> theta);

/// As apply_v_block followed by Rx on every qubit.
void apply_w_block(QuantumState &state, std::span<const double> phi);

/// Final state of the circuit for `angles` (already rescaled).
[[nodiscard]] QuantumState prepare_state(const ParameterSet &params,
                                         std::span<const double> angles);

/// sum_n w_n z_n + b.
[[nodiscard]] double readout(const ParameterSet &params,
                             std::span<const double> expectations);

/// Exact f(x) = sum_n w_n <Z_n> + b.
[[nodiscard]] double forward(const CircuitConfig &config,
                             const ParameterSet &params,
                             std::span<const double> angles);

/// f(x) with every <Z_n> estimated from one shared batch of `n_shots`
/// computational-basis samples.
[[nodiscard]] double forward_sampled(const CircuitConfig &config,
                                     const ParameterSet &params,
                                     std::span<const double> angles,
                                     std::uint64_t n_shots, Rng &rng);

} // namespace qcloud
