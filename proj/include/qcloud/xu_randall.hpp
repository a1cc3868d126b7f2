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

namespace qcloud {

/// Tunable constants of the Xu-Randall diagnostic cloud fraction.
struct XuRandallConstants {
    double p = 0.25;       // relative-humidity exponent
    double alpha0 = 100.0; // condensate scale
    double gamma = 0.49;   // exponent on the saturation deficit
};

/// Throws ConfigError unless all constants are positive and finite.
void validate(const XuRandallConstants &constants);

/// Magnus-form saturation vapour pressure over water [Pa].
[[nodiscard]] double saturation_vapor_pressure(double temperature);

/// Saturation specific humidity [kg/kg] at temperature [K] and pressure [Pa].
[[nodiscard]] double saturation_specific_humidity(double temperature,
                                                  double pressure);

/**
 * Cloud fraction in [0, 1]:
 *
 *   RH^p * (1 - exp(-alpha0 q_l / ((1 - RH) q_sat)^gamma)),
 *
 * with RH = q_v / q_sat clamped to [0, 1] and q_l = q_c + q_i. Without
 * condensate the result is 0; at saturation with condensate it is 1.
 */
[[nodiscard]] double xu_randall_cloud_cover(double qv, double qc, double qi,
                                            double temperature, double pressure,
                                            const XuRandallConstants &constants = {});

} // namespace qcloud
