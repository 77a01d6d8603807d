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
#include <cstddef>
#include <vector>

#include "find/capture.hpp"
#include "find/common.hpp"
#include "find/errors.hpp"
#include "find/fft.hpp"
#include "find/geometry.hpp"

namespace find {

struct PropagationPath {
    double delay_s = 0.0;     // >= 0, < 4 us (one OFDM symbol)
    cplx gain = {1.0, 0.0};
    double azimuth_rad = 0.0; // in (-pi/2, +pi/2)
};

struct ChannelModel {
    std::vector<PropagationPath> paths;

    static ChannelModel single_path(double azimuth_rad, double delay_s = 0.0, cplx gain = {1.0, 0.0})
    {
        ChannelModel c;
        c.paths.push_back({delay_s, gain, azimuth_rad});
        return c;
    }

    void validate() const
    {
        if (paths.empty())
            throw config_error("channel: at least one path required");
        for (const auto& p : paths) {
            if (p.delay_s < 0.0 || p.delay_s >= 4e-6)
                throw config_error("channel: path delay must be in [0, 4us)");
            if (std::abs(p.azimuth_rad) >= pi / 2.0)
                throw config_error("channel: azimuth must be inside (-pi/2, pi/2)");
        }
    }
};

// Transfer function seen by channel m at baseband frequency f:
// sum_p gain_p e^{-j2πf tau_p} a_m(theta_p). The array phase is the
// narrowband response at the carrier; the delay term varies over the band.
inline cplx channel_frequency_response(const ChannelModel& channel, const ArrayGeometry& geometry,
                                       double frequency_hz, std::size_t m)
{
    cplx h(0.0, 0.0);
    for (const auto& p : channel.paths) {
        const cplx delay_phase = std::polar(1.0, -two_pi * frequency_hz * p.delay_s);
        h += p.gain * delay_phase * element_phase(geometry, m, p.azimuth_rad, geometry.carrier_hz);
    }
    return h;
}

namespace detail {

inline bool near_integer(double x, double tol = 1e-9)
{
    return std::abs(x - std::round(x)) < tol;
}

} // namespace detail

// Propagates a single-channel block through the multipath channel and the
// array manifold. Integer-sample delays are applied as exact shifts;
// fractional delays use a frequency-domain phase ramp over a zero-padded
// grid (band-limited interpolation). Output gains ceil(max delay) samples.
inline MultiChannelCapture apply_channel(const cvec& signal, double sample_rate,
                                         const ChannelModel& channel, const ArrayGeometry& geometry)
{
    if (signal.empty())
        throw config_error("apply_channel: empty signal");
    channel.validate();
    geometry.validate();

    const std::size_t n_ch = geometry.n_channels();
    double max_delay_samples = 0.0;
    bool all_integer = true;
    for (const auto& p : channel.paths) {
        const double d = p.delay_s * sample_rate;
        max_delay_samples = std::max(max_delay_samples, d);
        all_integer = all_integer && detail::near_integer(d);
    }
    const std::size_t out_len = signal.size() + static_cast<std::size_t>(std::ceil(max_delay_samples));

    MultiChannelCapture out;
    out.sample_rate = sample_rate;
    out.channels.assign(n_ch, cvec(out_len, cplx(0.0, 0.0)));

    if (all_integer) {
        for (const auto& p : channel.paths) {
            const std::size_t d = static_cast<std::size_t>(std::llround(p.delay_s * sample_rate));
            for (std::size_t m = 0; m < n_ch; ++m) {
                const cplx g = p.gain * element_phase(geometry, m, p.azimuth_rad, geometry.carrier_hz);
                cplx* dst = out.channels[m].data() + d;
                for (std::size_t n = 0; n < signal.size(); ++n)
                    dst[n] += g * signal[n];
            }
        }
        return out;
    }

    const std::size_t nfft = fft::next_power_of_two(out_len + 64);
    cvec spectrum(nfft, cplx(0.0, 0.0));
    std::copy(signal.begin(), signal.end(), spectrum.begin());
    fft::transform(spectrum.data(), nfft, false);

    // Per-bin signed frequency in Hz; Nyquist bin maps to -fs/2.
    cvec accum(nfft);
    for (std::size_t m = 0; m < n_ch; ++m) {
        std::fill(accum.begin(), accum.end(), cplx(0.0, 0.0));
        for (const auto& p : channel.paths) {
            const cplx g = p.gain * element_phase(geometry, m, p.azimuth_rad, geometry.carrier_hz);
            for (std::size_t b = 0; b < nfft; ++b) {
                const double f = (b <= nfft / 2 ? static_cast<double>(b) : static_cast<double>(b) - static_cast<double>(nfft)) *
                                 sample_rate / static_cast<double>(nfft);
                const double fb = (b == nfft / 2) ? -sample_rate / 2.0 : f;
                accum[b] += g * std::polar(1.0, -two_pi * fb * p.delay_s) * spectrum[b];
            }
        }
        fft::transform(accum.data(), nfft, true);
        std::copy(accum.begin(), accum.begin() + static_cast<std::ptrdiff_t>(out_len), out.channels[m].begin());
    }
    return out;
}

} // namespace find
