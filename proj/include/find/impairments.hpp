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

#include <cstddef>
#include <optional>
#include <vector>

#include "find/capture.hpp"
#include "find/common.hpp"
#include "find/errors.hpp"
#include "find/rng.hpp"

namespace find {

// Hardware imperfections of the receive chain: one shared oscillator offset,
// a constant phase per channel (applied to every sample of a capture), and
// receiver-referred AWGN.
struct ImpairmentSpec {
    double cfo_hz = 0.0;
    std::vector<double> phase_offsets_rad; // length n_channels, [0] must be 0
    std::optional<double> snr_db;          // empty = noiseless
    std::size_t start_offset = 0;          // prepended zero/noise-only samples

    void validate(std::size_t n_channels) const
    {
        if (phase_offsets_rad.size() != n_channels)
            throw config_error("impairments: offsets length must equal channel count");
        if (!phase_offsets_rad.empty() && phase_offsets_rad.front() != 0.0)
            throw config_error("impairments: reference channel offset must be 0");
    }
};

// Noise power is set against the in-frame average sample energy: the mean
// |x|^2 over samples where the clean input is nonzero on some channel, so
// inter-frame gaps do not dilute the SNR definition.
inline MultiChannelCapture apply_impairments(const MultiChannelCapture& capture,
                                             const ImpairmentSpec& spec, Rng& rng)
{
    capture.validate();
    spec.validate(capture.n_channels());

    const std::size_t len_in = capture.n_samples();
    const std::size_t len_out = spec.start_offset + len_in;
    const double fs = capture.sample_rate;

    MultiChannelCapture out;
    out.sample_rate = fs;
    out.truth = capture.truth;
    for (auto& t : out.truth)
        t.start_index += spec.start_offset;
    out.channels.assign(capture.n_channels(), cvec(len_out, cplx(0.0, 0.0)));

    for (std::size_t m = 0; m < capture.n_channels(); ++m) {
        const cplx offset = std::polar(1.0, spec.phase_offsets_rad[m]);
        for (std::size_t n = 0; n < len_in; ++n) {
            const std::size_t g = spec.start_offset + n;
            cplx v = capture.channels[m][n];
            if (spec.cfo_hz != 0.0)
                v *= std::polar(1.0, two_pi * spec.cfo_hz * static_cast<double>(g) / fs);
            if (spec.phase_offsets_rad[m] != 0.0)
                v *= offset;
            out.channels[m][g] = v;
        }
    }

    if (spec.snr_db) {
        double energy = 0.0;
        std::size_t n_in_frame = 0;
        for (std::size_t n = 0; n < len_in; ++n) {
            double s = 0.0;
            for (std::size_t m = 0; m < capture.n_channels(); ++m)
                s += std::norm(capture.channels[m][n]);
            if (s > 0.0) {
                energy += s;
                n_in_frame += capture.n_channels();
            }
        }
        const double signal_power = n_in_frame ? energy / static_cast<double>(n_in_frame) : 0.0;
        const double noise_var = signal_power / db_to_linear(*spec.snr_db);
        if (noise_var > 0.0) {
            for (auto& ch : out.channels)
                for (auto& v : ch)
                    v += rng.cgaussian(noise_var);
        }
    }
    return out;
}

} // namespace find
