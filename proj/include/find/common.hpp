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

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace find {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double speed_of_light = 299792458.0; // m/s

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

inline double deg_to_rad(double deg) { return deg * pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / pi; }

// Wrap into (-pi, pi].
inline double wrap_phase(double rad)
{
    double w = std::remainder(rad, two_pi);
    if (w <= -pi)
        w += two_pi;
    return w;
}

inline double mean_power(const cvec& x)
{
    if (x.empty())
        return 0.0;
    double acc = 0.0;
    for (const auto& v : x)
        acc += std::norm(v);
    return acc / static_cast<double>(x.size());
}

} // namespace find
