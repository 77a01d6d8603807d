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
//
// Frequency-domain training sequences for the 80 MHz VHT preamble. The
// receiver and the waveform synthesizer must agree on these tables; both
// sides include this header and nothing else defines tone values.

#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "find/common.hpp"

namespace find::seq {

// Legacy long training halves (20 MHz subcarriers -26..-1 and +1..+26).
inline constexpr std::array<int, 26> ltf_left = {
    1, 1, -1, -1, 1, 1, -1, 1, -1, 1, 1, 1, 1, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1, 1, 1, 1};

inline constexpr std::array<int, 26> ltf_right = {
    1, -1, -1, 1, 1, -1, 1, -1, 1, -1, -1, -1, -1, -1, 1, 1, -1, -1, 1, -1, 1, -1, 1, 1, 1, 1};

// Legacy short training tones: (20 MHz subcarrier, value / sqrt(13/6)).
struct StfTone {
    int k;
    double re;
    double im;
};

inline constexpr std::array<StfTone, 12> l_stf_tones = {{
    {-24, 1, 1}, {-20, -1, -1}, {-16, 1, 1}, {-12, -1, -1}, {-8, -1, -1}, {-4, 1, 1},
    {4, -1, -1}, {8, -1, -1}, {12, 1, 1}, {16, 1, 1}, {20, 1, 1}, {24, 1, 1},
}};

inline constexpr double stf_tone_scale = 1.140175425099138; // sqrt(13/6)

// Legacy pilot tones (20 MHz grid).
inline constexpr std::array<std::pair<int, int>, 4> legacy_pilots = {{{-21, 1}, {-7, 1}, {7, 1}, {21, -1}}};

// 20 MHz subchannel centers inside the 256-point 80 MHz grid.
inline constexpr std::array<int, 4> subchannel_centers = {-96, -32, 32, 96};

// Per-subcarrier rotation for 80 MHz duplicate transmission:
// +1 below -64, -1 at and above. Only self-consistency between synthesizer
// and receiver is relied on.
inline constexpr double gamma_80(int k) { return k < -64 ? 1.0 : -1.0; }

// Legacy LTF value on the 20 MHz grid, 0 outside -26..26 and at DC.
inline constexpr int ltf_value_20(int k)
{
    if (k >= -26 && k <= -1)
        return ltf_left[static_cast<std::size_t>(k + 26)];
    if (k >= 1 && k <= 26)
        return ltf_right[static_cast<std::size_t>(k - 1)];
    return 0;
}

// VHT-LTF for 80 MHz: +/-1 on all 242 used subcarriers. Four legacy LTF
// blocks sit on the 20 MHz subchannel centers; the 11-tone gaps between
// blocks and the 4+4 tones flanking the DC nulls carry fixed fill values.
inline constexpr std::array<int, 11> vht_ltf_gap_fill = {-1, -1, -1, 1, -1, 1, 1, -1, 1, 1, -1};
inline constexpr std::array<int, 4> vht_ltf_dc_left = {1, -1, 1, -1};
inline constexpr std::array<int, 4> vht_ltf_dc_right = {1, -1, -1, 1};

// VHT-LTF sign for subcarrier k in [-122, 122] \ {-1, 0, 1}; 0 elsewhere.
inline constexpr int vht_ltf_value_80(int k)
{
    if (k < -122 || k > 122 || (k >= -1 && k <= 1))
        return 0;
    if (k >= -122 && k <= -70)
        return ltf_value_20(k + 96) != 0 ? ltf_value_20(k + 96) : 1; // center tone of block
    if (k >= -69 && k <= -59)
        return vht_ltf_gap_fill[static_cast<std::size_t>(k + 69)];
    if (k >= -58 && k <= -6)
        return ltf_value_20(k + 32) != 0 ? ltf_value_20(k + 32) : 1;
    if (k >= -5 && k <= -2)
        return vht_ltf_dc_left[static_cast<std::size_t>(k + 5)];
    if (k >= 2 && k <= 5)
        return vht_ltf_dc_right[static_cast<std::size_t>(k - 2)];
    if (k >= 6 && k <= 58)
        return ltf_value_20(k - 32) != 0 ? ltf_value_20(k - 32) : 1;
    if (k >= 59 && k <= 69)
        return vht_ltf_gap_fill[static_cast<std::size_t>(k - 59)];
    return ltf_value_20(k - 96) != 0 ? ltf_value_20(k - 96) : 1;
}

// Fixed placeholder bit source for the SIG fields (content is never decoded;
// it only has to be valid BPSK and identical on every run).
inline std::vector<int> placeholder_bits(std::uint64_t tag, std::size_t count)
{
    std::vector<int> bits(count);
    std::uint64_t state = 0x5ec5e11ce5ULL ^ (tag * 0x9e3779b97f4a7c15ULL);
    for (std::size_t i = 0; i < count; ++i) {
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z ^= z >> 31;
        bits[i] = (z & 1) ? 1 : -1;
    }
    return bits;
}

} // namespace find::seq
