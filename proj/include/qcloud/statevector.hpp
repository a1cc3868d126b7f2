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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <vector>

namespace qcloud {

using Complex = std::complex<double>;

/// Seeded stream used for every stochastic operation in the toolkit.
using Rng = std::mt19937_64;

inline constexpr int kMaxQubits = 12;

enum class PauliAxis { x, y, z };

/**
 * Dense statevector over 2^n basis states.
 *
 * Qubit q is bit q of the basis index (little-endian). Gates are applied in
 * place with stride arithmetic; no full unitaries are materialized.
 */
class QuantumState {
  public:
    /// |0...0> on `n_qubits` qubits. Throws ConfigError outside [1, 12].
    explicit QuantumState(int n_qubits);

    [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t dim() const noexcept { return amps_.size(); }

    [[nodiscard]] std::span<const Complex> amplitudes() const noexcept {
        return amps_;
    }
    [[nodiscard]] std::span<Complex> amplitudes() noexcept { return amps_; }

    [[nodiscard]] double norm_squared() const noexcept;

    /// Resets to |0...0> without reallocating.
    void reset() noexcept;

  private:
    int n_qubits_;
    std::vector<Complex> amps_;
};

[[nodiscard]] QuantumState init_state(int n_qubits);

/// exp(-i angle/2 X_q).
void apply_rx(QuantumState &state, int qubit, double angle);

/// exp(-i angle/2 P_a P_b) with P the Pauli operator on `axis`.
void apply_two_qubit_rotation(QuantumState &state, PauliAxis axis, int qubit_a,
                              int qubit_b, double angle);

/// Multiplies the state by a single Pauli operator on one qubit (not unitary
/// evolution in time; used to build generator-weighted overlaps).
void apply_pauli(QuantumState &state, PauliAxis axis, int qubit);

[[nodiscard]] double expectation_z(const QuantumState &state, int qubit);

/// <Z_q> for every qubit from one pass over the amplitudes.
[[nodiscard]] std::vector<double> expectations_z(const QuantumState &state);

/// <a|b>, conjugating the left argument.
[[nodiscard]] Complex inner_product(const QuantumState &a,
                                    const QuantumState &b);

struct BitstringCounts {
    /// Basis index -> occurrences; only observed outcomes are stored.
    std::map<std::uint64_t, std::uint64_t> counts;
    std::uint64_t n_shots = 0;
};

/// Draws `n_shots` measurements in the computational basis from the Born
/// distribution. The multinomial is realized via conditional binomials, so
/// the cost is O(2^n) independent of the shot count.
[[nodiscard]] BitstringCounts sample_bitstrings(const QuantumState &state,
                                                std::uint64_t n_shots,
                                                Rng &rng);

/// Per-qubit (n_plus - n_minus) / n_shots.
[[nodiscard]] std::vector<double>
estimate_expectations_z(const BitstringCounts &counts, int n_qubits);

} // namespace qcloud
