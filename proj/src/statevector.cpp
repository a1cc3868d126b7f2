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

#include "qcloud/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qcloud/error.hpp"

namespace qcloud {

namespace {

void check_qubit(const QuantumState &state, int qubit) {
    if (qubit < 0 || qubit >= state.n_qubits()) {
        throw ConfigError("qubit index " + std::to_string(qubit) +
                          " out of range for " +
                          std::to_string(state.n_qubits()) + " qubits");
    }
}

// Calls fn(i) for every index i whose bit `qubit` is clear.
template <typename Fn>
inline void for_each_low_index(std::size_t dim, int qubit, Fn &&fn) {
    const std::size_t stride = std::size_t{1} << qubit;
    for (std::size_t block = 0; block < dim; block += 2 * stride) {
        for (std::size_t i = block; i < block + stride; ++i) {
            fn(i);
        }
    }
}

} // namespace

QuantumState::QuantumState(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw ConfigError("n_qubits must be in [1, " +
                          std::to_string(kMaxQubits) + "], got " +
                          std::to_string(n_qubits));
    }
    amps_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
    amps_[0] = Complex{1.0, 0.0};
}

double QuantumState::norm_squared() const noexcept {
    double acc = 0.0;
    for (const auto &a : amps_) {
        acc += std::norm(a);
    }
    return acc;
}

void QuantumState::reset() noexcept {
    std::fill(amps_.begin(), amps_.end(), Complex{0.0, 0.0});
    amps_[0] = Complex{1.0, 0.0};
}

QuantumState init_state(int n_qubits) { return QuantumState(n_qubits); }

void apply_rx(QuantumState &state, int qubit, double angle) {
    check_qubit(state, qubit);
    const double c = std::cos(0.5 * angle);
    const double s = std::sin(0.5 * angle);
    const std::size_t stride = std::size_t{1} << qubit;
    auto amps = state.amplitudes();
    for_each_low_index(amps.size(), qubit, [&](std::size_t i) {
        const Complex a = amps[i];
        const Complex b = amps[i + stride];
        // [[c, -is], [-is, c]]
        amps[i] = {c * a.real() + s * b.imag(), c * a.imag() - s * b.real()};
        amps[i + stride] = {c * b.real() + s * a.imag(),
                            c * b.imag() - s * a.real()};
    });
}

void apply_two_qubit_rotation(QuantumState &state, PauliAxis axis, int qubit_a,
                              int qubit_b, double angle) {
    check_qubit(state, qubit_a);
    check_qubit(state, qubit_b);
    if (qubit_a == qubit_b) {
        throw ConfigError("two-qubit rotation needs distinct qubits, got " +
                          std::to_string(qubit_a) + " twice");
    }
    const double c = std::cos(0.5 * angle);
    const double s = std::sin(0.5 * angle);
    const std::size_t bit_a = std::size_t{1} << qubit_a;
    const std::size_t bit_b = std::size_t{1} << qubit_b;
    const std::size_t mask = bit_a | bit_b;
    auto amps = state.amplitudes();
    const std::size_t dim = amps.size();

    if (axis == PauliAxis::z) {
        // Even parity picks up e^{-i angle/2}, odd parity e^{+i angle/2}.
        for (std::size_t i = 0; i < dim; ++i) {
            const bool odd = ((i & bit_a) != 0) != ((i & bit_b) != 0);
            const double sg = odd ? -s : s;
            const double re = amps[i].real();
            const double im = amps[i].imag();
            amps[i] = {c * re + sg * im, c * im - sg * re};
        }
        return;
    }

    // X⊗X and Y⊗Y both pair i with i ^ mask:
    //   out_i = c a_i - i s eta a_j,
    // with eta = 1 for X⊗X; for Y⊗Y eta = -1 when the two bits agree.
    const std::size_t lo_bit = std::min(bit_a, bit_b);
    const std::size_t hi_bit = std::max(bit_a, bit_b);
    for (std::size_t outer = 0; outer < dim; outer += 2 * hi_bit) {
        for (std::size_t mid = outer; mid < outer + hi_bit; mid += 2 * lo_bit) {
            for (std::size_t i = mid; i < mid + lo_bit; ++i) {
                // i has both bits clear; (i, i|mask) agree, (i|lo, i|hi) differ.
                const double s_equal = axis == PauliAxis::y ? -s : s;
                const std::size_t pairs[2][2] = {{i, i | mask}, {i | lo_bit, i | hi_bit}};
                for (int p = 0; p < 2; ++p) {
                    const double se = p == 0 ? s_equal : s;
                    Complex &x = amps[pairs[p][0]];
                    Complex &y = amps[pairs[p][1]];
                    const double xr = x.real();
                    const double xi = x.imag();
                    const double yr = y.real();
                    const double yi = y.imag();
                    x = {c * xr + se * yi, c * xi - se * yr};
                    y = {c * yr + se * xi, c * yi - se * xr};
                }
            }
        }
    }
}

void apply_pauli(QuantumState &state, PauliAxis axis, int qubit) {
    check_qubit(state, qubit);
    const std::size_t stride = std::size_t{1} << qubit;
    auto amps = state.amplitudes();
    switch (axis) {
    case PauliAxis::x:
        for_each_low_index(amps.size(), qubit, [&](std::size_t i) {
            std::swap(amps[i], amps[i + stride]);
        });
        break;
    case PauliAxis::y:
        // Y|0> = i|1>, Y|1> = -i|0>
        for_each_low_index(amps.size(), qubit, [&](std::size_t i) {
            const Complex a = amps[i];
            const Complex b = amps[i + stride];
            amps[i] = Complex{0.0, -1.0} * b;
            amps[i + stride] = Complex{0.0, 1.0} * a;
        });
        break;
    case PauliAxis::z:
        for_each_low_index(amps.size(), qubit,
                           [&](std::size_t i) { amps[i + stride] = -amps[i + stride]; });
        break;
    }
}

double expectation_z(const QuantumState &state, int qubit) {
    check_qubit(state, qubit);
    const std::size_t bit = std::size_t{1} << qubit;
    double acc = 0.0;
    const auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const double p = std::norm(amps[i]);
        acc += (i & bit) ? -p : p;
    }
    return acc;
}

std::vector<double> expectations_z(const QuantumState &state) {
    const int n = state.n_qubits();
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    const auto amps = state.amplitudes();
    // Accumulate probability mass with bit q set; <Z_q> = 1 - 2 P(bit q = 1).
    double total = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const double p = std::norm(amps[i]);
        total += p;
        for (int q = 0; q < n; ++q) {
            out[static_cast<std::size_t>(q)] += static_cast<double>((i >> q) & 1U) * p;
        }
    }
    for (double &z : out) {
        z = total - 2.0 * z;
    }
    return out;
}

Complex inner_product(const QuantumState &a, const QuantumState &b) {
    if (a.dim() != b.dim()) {
        throw ConfigError("inner product of states with different sizes");
    }
    Complex acc{0.0, 0.0};
    const auto x = a.amplitudes();
    const auto y = b.amplitudes();
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc += std::conj(x[i]) * y[i];
    }
    return acc;
}

BitstringCounts sample_bitstrings(const QuantumState &state,
                                  std::uint64_t n_shots, Rng &rng) {
    if (n_shots == 0) {
        throw ConfigError("n_shots must be at least 1");
    }
    BitstringCounts out;
    out.n_shots = n_shots;
    const auto amps = state.amplitudes();

    std::size_t last_nonzero = 0;
    double remaining_mass = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const double p = std::norm(amps[i]);
        remaining_mass += p;
        if (p > 0.0) {
            last_nonzero = i;
        }
    }
    std::uint64_t remaining = n_shots;
    for (std::size_t i = 0; i <= last_nonzero && remaining > 0; ++i) {
        const double p = std::norm(amps[i]);
        std::uint64_t k = 0;
        if (i == last_nonzero || (p > 0.0 && p >= remaining_mass)) {
            k = remaining;
        } else if (p > 0.0) {
            const double ratio = std::clamp(p / remaining_mass, 0.0, 1.0);
            std::binomial_distribution<std::uint64_t> draw(remaining, ratio);
            k = draw(rng);
        }
        if (k > 0) {
            out.counts.emplace(static_cast<std::uint64_t>(i), k);
            remaining -= k;
        }
        remaining_mass -= p;
    }
    return out;
}

std::vector<double> estimate_expectations_z(const BitstringCounts &counts,
                                            int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw ConfigError("n_qubits out of range in estimator");
    }
    if (counts.n_shots == 0) {
        throw ValidationError("bitstring counts with zero shots");
    }
    const std::uint64_t limit = std::uint64_t{1} << n_qubits;
    std::vector<std::int64_t> balance(static_cast<std::size_t>(n_qubits), 0);
    std::uint64_t total = 0;
    for (const auto &[index, k] : counts.counts) {
        if (index >= limit) {
            throw ValidationError("basis index " + std::to_string(index) +
                                  " exceeds register of " +
                                  std::to_string(n_qubits) + " qubits");
        }
        total += k;
        const auto signed_k = static_cast<std::int64_t>(k);
        for (int q = 0; q < n_qubits; ++q) {
            balance[static_cast<std::size_t>(q)] +=
                ((index >> q) & 1U) ? -signed_k : signed_k;
        }
    }
    if (total != counts.n_shots) {
        throw ValidationError("counts sum to " + std::to_string(total) +
                              " but n_shots is " +
                              std::to_string(counts.n_shots));
    }
    std::vector<double> out(static_cast<std::size_t>(n_qubits));
    for (std::size_t q = 0; q < out.size(); ++q) {
        out[q] = static_cast<double>(balance[q]) /
                 static_cast<double>(counts.n_shots);
    }
    return out;
}

} // namespace qcloud
