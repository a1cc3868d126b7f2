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

#include "qcloud/gradients.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qcloud/error.hpp"

namespace qcloud {

namespace {

constexpr double kShift = std::numbers::pi / 2.0;

void check_inputs(const CircuitConfig &config, const ParameterSet &params,
                  std::span<const double> angles) {
    validate(config);
    if (!(params.config() == config)) {
        throw ConfigError("parameter set was built for a different circuit");
    }
    if (angles.size() != static_cast<std::size_t>(config.n_qubits)) {
        throw ConfigError("expected " + std::to_string(config.n_qubits) +
                          " encoding angles, got " + std::to_string(angles.size()));
    }
}

std::vector<double> run_expectations(const CircuitConfig &config,
                                     std::span<const GateOp> gates) {
    QuantumState state(config.n_qubits);
    for (const auto &g : gates) {
        apply_gate(state, g);
    }
    return expectations_z(state);
}

std::vector<double> run_sampled(const CircuitConfig &config,
                                std::span<const GateOp> gates,
                                std::uint64_t n_shots, Rng &rng) {
    QuantumState state(config.n_qubits);
    for (const auto &g : gates) {
        apply_gate(state, g);
    }
    return estimate_expectations_z(sample_bitstrings(state, n_shots, rng),
                                   config.n_qubits);
}

// Im(conj(a) b) without the complex-multiply library call.
inline double im_conj_mul(const Complex &a, const Complex &b) {
    return a.real() * b.imag() - a.imag() * b.real();
}

// Im <bra| P |ket> for the generator P of `gate` (exp(-i angle/2 P)).
double generator_overlap(const QuantumState &bra, const QuantumState &ket,
                         const GateOp &gate) {
    const auto l = bra.amplitudes();
    const auto r = ket.amplitudes();
    const std::size_t bit_a = std::size_t{1} << gate.qubit_a;
    const std::size_t bit_b = std::size_t{1} << gate.qubit_b;
    double acc = 0.0;
    switch (gate.kind) {
    case GateKind::rx:
        for (std::size_t i = 0; i < l.size(); ++i) {
            acc += im_conj_mul(l[i], r[i ^ bit_a]);
        }
        break;
    case GateKind::rxx:
        for (std::size_t i = 0; i < l.size(); ++i) {
            acc += im_conj_mul(l[i], r[i ^ (bit_a | bit_b)]);
        }
        break;
    case GateKind::ryy:
        for (std::size_t i = 0; i < l.size(); ++i) {
            const bool equal = ((i & bit_a) != 0) == ((i & bit_b) != 0);
            const double term = im_conj_mul(l[i], r[i ^ (bit_a | bit_b)]);
            acc += equal ? -term : term;
        }
        break;
    case GateKind::rzz:
        for (std::size_t i = 0; i < l.size(); ++i) {
            const bool equal = ((i & bit_a) != 0) == ((i & bit_b) != 0);
            const double term = im_conj_mul(l[i], r[i]);
            acc += equal ? term : -term;
        }
        break;
    }
    return acc;
}

void check_batch(std::span<const LabeledRow> batch) {
    if (batch.empty()) {
        throw ConfigError("loss gradient needs a non-empty batch");
    }
}

} // namespace

GradientVector parameter_shift_gradient(const CircuitConfig &config,
                                        const ParameterSet &params,
                                        std::span<const double> angles,
                                        GradientStats *stats) {
    check_inputs(config, params, angles);
    std::vector<GateOp> gates = compile_circuit(params, angles);
    GradientVector grad(params.size(), 0.0);
    std::uint64_t evaluations = 0;

    const auto w = params.weights();
    const auto f_of = [&](std::span<const double> z) {
        double acc = 0.0;
        for (std::size_t n = 0; n < w.size(); ++n) {
            acc += w[n] * z[n];
        }
        return acc; // the bias cancels in every difference
    };

    for (auto &gate : gates) {
        if (gate.param_index < 0) {
            continue;
        }
        const double original = gate.angle;
        gate.angle = original + kShift;
        const double plus = f_of(run_expectations(config, gates));
        gate.angle = original - kShift;
        const double minus = f_of(run_expectations(config, gates));
        gate.angle = original;
        evaluations += 2;
        grad[static_cast<std::size_t>(gate.param_index)] += 0.5 * (plus - minus);
    }

    const std::vector<double> z = run_expectations(config, gates);
    ++evaluations;
    const std::size_t w_start = params.size() - w.size() - 1;
    for (std::size_t n = 0; n < w.size(); ++n) {
        grad[w_start + n] = z[n];
    }
    grad.back() = 1.0;

    if (stats != nullptr) {
        stats->circuit_evaluations += evaluations;
    }
    return grad;
}

GradientVector adjoint_gradient(const CircuitConfig &config,
                                const ParameterSet &params,
                                std::span<const double> angles, double *value) {
    check_inputs(config, params, angles);
    const std::vector<GateOp> gates = compile_circuit(params, angles);

    QuantumState psi(config.n_qubits);
    for (const auto &g : gates) {
        apply_gate(psi, g);
    }
    const std::vector<double> z = expectations_z(psi);
    const auto w = params.weights();

    GradientVector grad(params.size(), 0.0);
    const std::size_t w_start = params.size() - w.size() - 1;
    for (std::size_t n = 0; n < w.size(); ++n) {
        grad[w_start + n] = z[n];
    }
    grad.back() = 1.0;
    if (value != nullptr) {
        *value = readout(params, z);
    }

    // lambda = H psi with H = sum_n w_n Z_n (diagonal).
    QuantumState lambda = psi;
    {
        auto amps = lambda.amplitudes();
        for (std::size_t i = 0; i < amps.size(); ++i) {
            double h = 0.0;
            for (std::size_t n = 0; n < w.size(); ++n) {
                h += ((i >> n) & 1U) ? -w[n] : w[n];
            }
            amps[i] = {amps[i].real() * h, amps[i].imag() * h};
        }
    }

    for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
        if (it->param_index >= 0) {
            grad[static_cast<std::size_t>(it->param_index)] +=
                generator_overlap(lambda, psi, *it);
        }
        apply_gate_inverse(psi, *it);
        apply_gate_inverse(lambda, *it);
    }
    return grad;
}

GradientVector finite_difference_gradient(const CircuitConfig &config,
                                          const ParameterSet &params,
                                          std::span<const double> angles,
                                          double h) {
    check_inputs(config, params, angles);
    if (!(h > 0.0)) {
        throw ConfigError("finite-difference step must be positive");
    }
    ParameterSet probe = params;
    GradientVector grad(params.size(), 0.0);
    for (std::size_t j = 0; j < params.size(); ++j) {
        const double original = probe.values()[j];
        probe.values()[j] = original + h;
        const double plus = forward(config, probe, angles);
        probe.values()[j] = original - h;
        const double minus = forward(config, probe, angles);
        probe.values()[j] = original;
        grad[j] = (plus - minus) / (2.0 * h);
    }
    return grad;
}

LossGradient loss_gradient(const CircuitConfig &config, const ParameterSet &params,
                           std::span<const LabeledRow> batch,
                           GradientMethod method) {
    check_batch(batch);
    const auto n_rows = static_cast<std::ptrdiff_t>(batch.size());
    std::vector<GradientVector> per_row(batch.size());
    std::vector<double> residual(batch.size(), 0.0);

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n_rows; ++i) {
        const auto &row = batch[static_cast<std::size_t>(i)];
        double f = 0.0;
        if (method == GradientMethod::adjoint) {
            per_row[static_cast<std::size_t>(i)] = adjoint_gradient(config, params, row.x, &f);
        } else {
            per_row[static_cast<std::size_t>(i)] =
                parameter_shift_gradient(config, params, row.x);
            f = forward(config, params, row.x);
        }
        residual[static_cast<std::size_t>(i)] = f - row.y;
    }

    LossGradient out;
    out.gradient.assign(params.size(), 0.0);
    const double scale = 2.0 / static_cast<double>(batch.size());
    double sse = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        sse += residual[i] * residual[i];
        for (std::size_t j = 0; j < out.gradient.size(); ++j) {
            out.gradient[j] += scale * residual[i] * per_row[i][j];
        }
    }
    out.mse = sse / static_cast<double>(batch.size());
    return out;
}

LossGradient sampled_loss_gradient(const CircuitConfig &config,
                                   const ParameterSet &params,
                                   std::span<const LabeledRow> batch,
                                   std::uint64_t n_shots, Rng &rng) {
    check_batch(batch);
    if (n_shots == 0) {
        throw ConfigError("n_shots must be at least 1");
    }
    LossGradient out;
    out.gradient.assign(params.size(), 0.0);
    const auto w = params.weights();
    const std::size_t w_start = params.size() - w.size() - 1;
    const double scale = 2.0 / static_cast<double>(batch.size());
    const auto weighted = [&](std::span<const double> z) {
        double acc = 0.0;
        for (std::size_t n = 0; n < w.size(); ++n) {
            acc += w[n] * z[n];
        }
        return acc;
    };

    double sse = 0.0;
    for (const auto &row : batch) {
        check_inputs(config, params, row.x);
        std::vector<GateOp> gates = compile_circuit(params, row.x);
        const std::vector<double> z = run_sampled(config, gates, n_shots, rng);
        const double residual = weighted(z) + params.bias() - row.y;
        sse += residual * residual;

        for (auto &gate : gates) {
            if (gate.param_index < 0) {
                continue;
            }
            const double original = gate.angle;
            gate.angle = original + kShift;
            const double plus = weighted(run_sampled(config, gates, n_shots, rng));
            gate.angle = original - kShift;
            const double minus = weighted(run_sampled(config, gates, n_shots, rng));
            gate.angle = original;
            out.gradient[static_cast<std::size_t>(gate.param_index)] +=
                scale * residual * 0.5 * (plus - minus);
        }
        for (std::size_t n = 0; n < w.size(); ++n) {
            out.gradient[w_start + n] += scale * residual * z[n];
        }
        out.gradient.back() += scale * residual;
    }
    out.mse = sse / static_cast<double>(batch.size());
    return out;
}

} // namespace qcloud
