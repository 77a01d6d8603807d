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
#include <optional>
#include <vector>

#include "find/common.hpp"
#include "find/errors.hpp"

namespace find {

// Ground truth attached to simulated captures, one entry per injected frame.
struct FrameTruth {
    std::size_t start_index = 0;                 // first sample of the frame
    std::optional<double> azimuth_rad;           // dominant-path azimuth
    double cfo_hz = 0.0;
    std::vector<double> phase_offsets_rad;       // per channel
};

// Time-aligned complex baseband streams, one per receive channel.
// All channels share one sample clock and identical length.
struct MultiChannelCapture {
    std::vector<cvec> channels;
    double sample_rate = 80e6;
    std::vector<FrameTruth> truth; // empty for real captures

    std::size_t n_channels() const { return channels.size(); }
    std::size_t n_samples() const { return channels.empty() ? 0 : channels.front().size(); }

    void validate() const
    {
        for (const auto& ch : channels)
            if (ch.size() != n_samples())
                throw config_error("capture: channels must share one length");
    }
};

} // namespace find
