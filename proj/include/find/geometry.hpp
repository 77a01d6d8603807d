// SPDX-License-Identifier: Apache-2.0
//
// find: software receive chain, calibration and DoA toolkit for
// multi-channel 802.11ac baseband captures
// Copyright (C) 2026 The find authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "find/common.hpp"
#include "find/errors.hpp"

namespace find {

// Receive array. Elements live in the x/y plane, the array boresight is +y,
// azimuth is measured from boresight toward +x. A source at azimuth theta has
// unit direction u = (sin theta, cos theta, 0).
struct ArrayGeometry {
    double carrier_hz = 2.412e9;
    std::vector<std::array<double, 3>> element_positions; // meters

    std::size_t n_channels() const { return element_positions.size(); }
    double wavelength() const { return speed_of_light / carrier_hz; }

    void validate() const
    {
        if (element_positions.size() < 2)
            throw config_error("geometry: need at least 2 channels");
        if (carrier_hz <= 0.0)
            throw config_error("geometry: carrier frequency must be positive");
    }
};

// Uniform linear array along x with the given spacing in wavelengths
// (default half-wavelength), element 0 at the origin.
inline ArrayGeometry make_ula(std::size_t n_channels = 4, double carrier_hz = 2.412e9,
                              double spacing_wavelengths = 0.5)
{
    ArrayGeometry g;
    g.carrier_hz = carrier_hz;
    const double d = spacing_wavelengths * g.wavelength();
    g.element_positions.reserve(n_channels);
    for (std::size_t m = 0; m < n_channels; ++m)
        g.element_positions.push_back({static_cast<double>(m) * d, 0.0, 0.0});
    g.validate();
    return g;
}

// Projection of element m onto the arrival direction, in meters.
inline double element_projection(const ArrayGeometry& g, std::size_t m, double azimuth_rad)
{
    const auto& p = g.element_positions[m];
    return p[0] * std::sin(azimuth_rad) + p[1] * std::cos(azimuth_rad);
}

// Narrowband array response a_m(theta) = exp(-j 2 pi (d_m . u(theta)) / lambda),
// evaluated at the given frequency. This is the single source of truth for the
// phase convention shared by the channel simulator and the DoA estimators.
inline cplx element_phase(const ArrayGeometry& g, std::size_t m, double azimuth_rad,
                          double frequency_hz)
{
    const double lambda = speed_of_light / frequency_hz;
    const double phase = -two_pi * element_projection(g, m, azimuth_rad) / lambda;
    return std::polar(1.0, phase);
}

inline cvec steering_phases(const ArrayGeometry& g, double azimuth_rad, double frequency_hz)
{
    cvec a(g.n_channels());
    for (std::size_t m = 0; m < g.n_channels(); ++m)
        a[m] = element_phase(g, m, azimuth_rad, frequency_hz);
    return a;
}

} // namespace find
