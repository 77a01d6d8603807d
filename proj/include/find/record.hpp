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
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "find/common.hpp"
#include "find/errors.hpp"
#include "find/preamble.hpp"

namespace find {

// Complex channel estimates, one row per used subcarrier (fixed ascending
// order -122..-2, +2..+122), one column per receive channel.
struct CsiMatrix {
    std::size_t n_channels = 0;
    std::vector<cplx> values; // subcarrier-major: values[k * n_channels + m]

    static constexpr std::size_t n_subcarriers = OfdmNumerology::n_used_subcarriers;

    CsiMatrix() = default;
    explicit CsiMatrix(std::size_t channels)
        : n_channels(channels), values(n_subcarriers * channels, cplx(0.0, 0.0))
    {
    }

    cplx& at(std::size_t subcarrier, std::size_t channel)
    {
        return values[subcarrier * n_channels + channel];
    }
    const cplx& at(std::size_t subcarrier, std::size_t channel) const
    {
        return values[subcarrier * n_channels + channel];
    }

    bool well_formed() const { return values.size() == n_subcarriers * n_channels && n_channels > 0; }
};

// Per-field, per-channel time-domain IQ blocks of one received frame.
struct PreambleFields {
    // blocks[field][channel] -> samples
    std::array<std::vector<cvec>, n_preamble_fields> blocks;

    std::size_t n_channels() const { return blocks[0].size(); }

    const std::vector<cvec>& field(FieldId id) const
    {
        return blocks[static_cast<std::size_t>(id)];
    }
    std::vector<cvec>& field(FieldId id) { return blocks[static_cast<std::size_t>(id)]; }
};

// One dataset row: everything the receiver extracts from a frame plus the
// tracked ground truth. Sample payloads are kept at capture precision
// (float32), matching the on-disk representation bit for bit.
struct FrameRecord {
    std::uint64_t id = 0;
    double timestamp_s = 0.0;
    std::optional<double> true_azimuth_deg; // empty = untracked
    std::string position_label;
    std::vector<float> snr_db; // per channel
    double cfo_hz = 0.0;
    float detection_metric = 0.0f;
    CsiMatrix csi;
    PreambleFields fields;

    std::size_t n_channels() const { return csi.n_channels; }
};

// Quantize to float32 precision in place; writing a record to disk and
// reading it back is then an exact identity.
inline cplx quantize_f32(cplx v)
{
    return {static_cast<double>(static_cast<float>(v.real())),
            static_cast<double>(static_cast<float>(v.imag()))};
}

inline void quantize_record_payload(FrameRecord& r)
{
    for (auto& v : r.csi.values)
        v = quantize_f32(v);
    for (auto& field : r.fields.blocks)
        for (auto& ch : field)
            for (auto& v : ch)
                v = quantize_f32(v);
    if (r.true_azimuth_deg)
        r.true_azimuth_deg = static_cast<double>(static_cast<float>(*r.true_azimuth_deg));
}

} // namespace find
