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

#include <cstdint>
#include <span>
#include <vector>

#include "qcloud/qnn.hpp"

namespace qcloud {

/// Flat gradient aligned with ParameterSet storage order.
using GradientVector = std::vector<double>;

/// One (input, target) pair referencing caller-owned feature storage.
struct LabeledRow {
    std::span<const double> x;
    double y;
};

enum class GradientMethod {
    /// Two shifted circuit evaluations per angle, +-pi/2 with prefactor 1/2.
    parameter_shift,
    /// Reverse sweep over the compiled circuit; one forward-equivalent pass.
    adjoint,
};

struct GradientStats {
    std::uint64_t circuit_evaluations = 0;
};

/// df/dtheta for every parameter. Circuit angles use the parameter-shift
/// rule; readout terms use df/dw_n = <Z_n> and df/db = 1 from one
/// unshifted evaluation.
[[nodiscard]] GradientVector
parameter_shift_gradient(const CircuitConfig &config, const ParameterSet &params,
                         std::span<const double> angles,
                         GradientStats *stats = nullptr);

/// Same quantity as parameter_shift_gradient computed by a reverse sweep.
/// Optionally reports f(x) through `value`.
[[nodiscard]] GradientVector adjoint_gradient(const CircuitConfig &config,
                                              const ParameterSet &params,
                                              std::span<const double> angles,
                                              double *value = nullptr);

/// Central differences over every parameter including w and b.
[[nodiscard]] GradientVector
finite_difference_gradient(const CircuitConfig &config, const ParameterSet &params,
                           std::span<const double> angles, double h = 1e-5);

struct LossGradient {
    GradientVector gradient;
    double mse = 0.0;
};

/// Gradient of (1/B) sum_i (f(x_i) - y_i)^2 and the batch MSE. Per-sample
/// terms are reduced in index order so the result does not depend on the
/// thread count.
[[nodiscard]] LossGradient
loss_gradient(const CircuitConfig &config, const ParameterSet &params,
              std::span<const LabeledRow> batch,
              GradientMethod method = GradientMethod::parameter_shift);

/// Shot-noise variant: every circuit evaluation inside the parameter-shift
/// rule (and the readout terms) is estimated from `n_shots` samples.
[[nodiscard]] LossGradient
sampled_loss_gradient(const CircuitConfig &config, const ParameterSet &params,
                      std::span<const LabeledRow> batch, std::uint64_t n_shots,
                      Rng &rng);

} // namespace qcloud
