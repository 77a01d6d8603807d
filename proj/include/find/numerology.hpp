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

#include "find/errors.hpp"

namespace find {

// 802.11ac VHT 80 MHz numerology. Other bandwidths are rejected by the
// preamble builder, but the struct keeps the parameters explicit so every
// consumer states which grid it works on.
struct OfdmNumerology {
    double sample_rate = 80e6;          // samples/second
    std::size_t fft_size = 256;
    double subcarrier_spacing = 312.5e3; // Hz
    double short_symbol_period = 0.8e-6; // seconds (STF period / guard interval)
    double long_symbol_period = 3.2e-6;  // seconds (FFT core)
    int first_used_subcarrier = -122;
    int last_used_subcarrier = 122;
    int dc_null_half_width = 1; // subcarriers -1..+1 unused

    static constexpr std::size_t n_used_subcarriers = 242;

    std::size_t guard_samples() const
    {
        return static_cast<std::size_t>(std::lround(short_symbol_period * sample_rate));
    }

    std::size_t core_samples() const
    {
        return static_cast<std::size_t>(std::lround(long_symbol_period * sample_rate));
    }

    // Ascending: -122..-2, then +2..+122. Fixed row order of every CsiMatrix.
    std::vector<int> used_subcarriers() const
    {
        std::vector<int> k;
        k.reserve(n_used_subcarriers);
        for (int i = first_used_subcarrier; i <= last_used_subcarrier; ++i) {
            if (i >= -dc_null_half_width && i <= dc_null_half_width)
                continue;
            k.push_back(i);
        }
        return k;
    }

    double subcarrier_frequency(int k) const { return k * subcarrier_spacing; }

    bool is_default_80mhz() const
    {
        return sample_rate == 80e6 && fft_size == 256 && subcarrier_spacing == 312.5e3 &&
               short_symbol_period == 0.8e-6 && long_symbol_period == 3.2e-6 &&
               first_used_subcarrier == -122 && last_used_subcarrier == 122 &&
               dc_null_half_width == 1;
    }

    void validate() const
    {
        if (used_subcarriers().size() != n_used_subcarriers)
            throw config_error("numerology: expected 242 used subcarriers");
        if (subcarrier_spacing * static_cast<double>(fft_size) != sample_rate)
            throw config_error("numerology: spacing * fft_size must equal sample rate");
        if (guard_samples() * 4 != fft_size || core_samples() != fft_size)
            throw config_error("numerology: symbol periods do not fit the FFT grid");
    }
};

} // namespace find
