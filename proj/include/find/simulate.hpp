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
#include <cstdint>
#include <vector>

#include "find/channel.hpp"
#include "find/impairments.hpp"
#include "find/preamble.hpp"
#include "find/record.hpp"

namespace find {

// One simulated acquisition: a number of preamble frames, each through its
// own channel realization (azimuth sweeps vary the channel per frame), with
// shared impairments. Path 0 of each channel is treated as the tracked
// ground-truth direction.
struct SimulationScenario {
    OfdmNumerology numerology;
    ArrayGeometry geometry = make_ula();
    ImpairmentSpec impairments;
    std::vector<ChannelModel> frame_channels;
    std::size_t gap_samples = 2000;
    std::uint64_t seed = 1;
};

// Frame channels for a platform-rotation sweep: start..stop inclusive.
inline std::vector<ChannelModel> sweep_channels(const ChannelModel& base, double start_deg,
                                                double stop_deg, double step_deg,
                                                std::size_t frames_per_angle = 1)
{
    if (step_deg <= 0.0)
        throw config_error("sweep: step must be positive");
    std::vector<ChannelModel> out;
    for (double a = start_deg; a <= stop_deg + 1e-9; a += step_deg) {
        ChannelModel c = base;
        c.paths.front().azimuth_rad = deg_to_rad(a);
        for (std::size_t i = 0; i < frames_per_angle; ++i)
            out.push_back(c);
    }
    return out;
}

inline MultiChannelCapture simulate_capture(const SimulationScenario& s)
{
    s.geometry.validate();
    const std::size_t n_ch = s.geometry.n_channels();
    s.impairments.validate(n_ch);

    MultiChannelCapture clean;
    clean.sample_rate = s.numerology.sample_rate;
    clean.channels.assign(n_ch, cvec());

    if (s.frame_channels.empty()) {
        Rng rng(s.seed);
        return apply_impairments(clean, s.impairments, rng);
    }

    const PreambleWaveform preamble = build_preamble(s.numerology);
    const std::size_t stride = preamble_length + s.gap_samples;
    const std::size_t total = (s.frame_channels.size() - 1) * stride + preamble_length +
                              s.gap_samples + 640;
    for (auto& ch : clean.channels)
        ch.assign(total, cplx(0.0, 0.0));

    for (std::size_t i = 0; i < s.frame_channels.size(); ++i) {
        const std::size_t start = i * stride;
        MultiChannelCapture frame =
            apply_channel(preamble.samples, s.numerology.sample_rate, s.frame_channels[i], s.geometry);
        for (std::size_t m = 0; m < n_ch; ++m) {
            const cvec& src = frame.channels[m];
            cplx* dst = clean.channels[m].data() + start;
            for (std::size_t n = 0; n < src.size(); ++n)
                dst[n] += src[n];
        }
        FrameTruth t;
        t.start_index = start;
        t.azimuth_rad = s.frame_channels[i].paths.front().azimuth_rad;
        t.cfo_hz = s.impairments.cfo_hz;
        t.phase_offsets_rad = s.impairments.phase_offsets_rad;
        clean.truth.push_back(t);
    }

    Rng rng(s.seed);
    return apply_impairments(clean, s.impairments, rng);
}

// Analytic channel frequency response sampled on the used subcarriers: the
// CSI oracle the receiver is tested against.
inline CsiMatrix analytic_csi(const ChannelModel& channel, const ArrayGeometry& geometry,
                              const OfdmNumerology& num)
{
    CsiMatrix csi(geometry.n_channels());
    const auto subcarriers = num.used_subcarriers();
    for (std::size_t k = 0; k < subcarriers.size(); ++k) {
        const double f = num.subcarrier_frequency(subcarriers[k]);
        for (std::size_t m = 0; m < geometry.n_channels(); ++m)
            csi.at(k, m) = channel_frequency_response(channel, geometry, f, m);
    }
    return csi;
}

} // namespace find
