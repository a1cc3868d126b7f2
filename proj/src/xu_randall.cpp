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

#include "qcloud/xu_randall.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qcloud/error.hpp"

namespace qcloud {

void validate(const XuRandallConstants &c) {
    const auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!ok(c.p) || !ok(c.alpha0) || !ok(c.gamma)) {
        throw ConfigError("Xu-Randall constants must be positive and finite");
    }
}

double saturation_vapor_pressure(double temperature) {
    return 610.94 * std::exp(17.625 * (temperature - 273.15) / (temperature - 30.11));
}

double saturation_specific_humidity(double temperature, double pressure) {
    const double es = saturation_vapor_pressure(temperature);
    const double denom = pressure - 0.378 * es;
    if (!(denom > 0.0)) {
        throw ValidationError("saturation humidity undefined at T=" +
                              std::to_string(temperature) +
                              " K, p=" + std::to_string(pressure) + " Pa");
    }
    return 0.622 * es / denom;
}

double xu_randall_cloud_cover(double qv, double qc, double qi, double temperature,
                              double pressure, const XuRandallConstants &c) {
    validate(c);
    if (!(pressure > 0.0)) {
        throw ValidationError("pressure must be positive");
    }
    if (!(temperature > 150.0 && temperature < 350.0)) {
        throw ValidationError("temperature " + std::to_string(temperature) +
                              " K outside (150, 350)");
    }
    if (!(qv >= 0.0 && qc >= 0.0 && qi >= 0.0)) {
        throw ValidationError("humidities must be non-negative");
    }

    const double qsat = saturation_specific_humidity(temperature, pressure);
    const double rh = std::clamp(qv / qsat, 0.0, 1.0);
    const double ql = qc + qi;
    if (ql <= 0.0) {
        return 0.0;
    }
    const double deficit = (1.0 - rh) * qsat;
    if (deficit <= 0.0) {
        return 1.0;
    }
    const double cover =
        std::pow(rh, c.p) * (1.0 - std::exp(-c.alpha0 * ql / std::pow(deficit, c.gamma)));
    return std::clamp(cover, 0.0, 1.0);
}

} // namespace qcloud
