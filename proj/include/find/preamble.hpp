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
// 80 MHz VHT preamble synthesis. Legacy fields are the 20 MHz waveforms
// duplicated on the four subchannels with the per-subchannel rotation;
// VHT-LTF modulates the shared +/-1 table on all 242 used subcarriers.
// SIG fields carry fixed placeholder BPSK content and are never decoded.

#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "find/common.hpp"
#include "find/errors.hpp"
#include "find/fft.hpp"
#include "find/numerology.hpp"
#include "find/sequences.hpp"

namespace find {

enum class FieldId : std::uint8_t {
    l_stf = 0,
    l_ltf = 1,
    l_sig = 2,
    vht_sig_a = 3,
    vht_stf = 4,
    vht_ltf = 5,
    vht_sig_b = 6,
};

inline constexpr std::size_t n_preamble_fields = 7;

inline const char* field_name(FieldId id)
{
    switch (id) {
    case FieldId::l_stf: return "L-STF";
    case FieldId::l_ltf: return "L-LTF";
    case FieldId::l_sig: return "L-SIG";
    case FieldId::vht_sig_a: return "VHT-SIG-A";
    case FieldId::vht_stf: return "VHT-STF";
    case FieldId::vht_ltf: return "VHT-LTF";
    case FieldId::vht_sig_b: return "VHT-SIG-B";
    }
    return "?";
}

struct FieldSpan {
    FieldId id;
    std::size_t start;  // samples from frame start
    std::size_t length; // samples
};

// Standard field boundaries at 80 MS/s: 8+8+4+8+4+4+4 us.
inline std::array<FieldSpan, n_preamble_fields> preamble_field_table()
{
    return {{
        {FieldId::l_stf, 0, 640},
        {FieldId::l_ltf, 640, 640},
        {FieldId::l_sig, 1280, 320},
        {FieldId::vht_sig_a, 1600, 640},
        {FieldId::vht_stf, 2240, 320},
        {FieldId::vht_ltf, 2560, 320},
        {FieldId::vht_sig_b, 2880, 320},
    }};
}

inline constexpr std::size_t preamble_length = 3200;

struct PreambleWaveform {
    cvec samples; // single TX antenna, 80 MS/s complex baseband
    std::array<FieldSpan, n_preamble_fields> fields;
    double sample_rate = 80e6;
};

namespace detail {

// Natural-order index k (signed subcarrier) into FFT bin order.
inline std::size_t fft_bin(int k, std::size_t n) { return static_cast<std::size_t>((k + static_cast<int>(n)) % static_cast<int>(n)); }

// Scale the tone vector so the modulated core has unit average sample power,
// then inverse-transform. With x[n] = (1/N) sum_k X_k e^{j2πkn/N} the core
// energy is (1/N) sum |X_k|^2 (Parseval), so the scale is N / sqrt(sum|v|^2).
inline cvec modulate_unit_power(const cvec& tones_natural, std::size_t n)
{
    double g = 0.0;
    for (const auto& v : tones_natural)
        g += std::norm(v);
    if (g <= 0.0)
        throw config_error("preamble: empty tone vector");
    const double scale = static_cast<double>(n) / std::sqrt(g);
    cvec spectrum(n, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        spectrum[i] = tones_natural[i] * scale;
    fft::transform(spectrum.data(), n, true);
    return spectrum;
}

// Duplicate a 20 MHz tone map across the four subchannels with rotation.
template <typename ToneFn>
inline cvec duplicate_20mhz(const OfdmNumerology& num, ToneFn&& tone_of_l)
{
    cvec tones(num.fft_size, cplx(0.0, 0.0));
    for (int c : seq::subchannel_centers) {
        for (int l = -26; l <= 26; ++l) {
            const cplx v = tone_of_l(l);
            if (v == cplx(0.0, 0.0))
                continue;
            const int k = c + l;
            tones[fft_bin(k, num.fft_size)] += seq::gamma_80(k) * v;
        }
    }
    return tones;
}

// Periodic extension of the core to `length` samples (STF-style fields).
inline void append_periodic(cvec& out, const cvec& core, std::size_t length)
{
    for (std::size_t i = 0; i < length; ++i)
        out.push_back(core[i % core.size()]);
}

// Cyclic prefix of `gi` samples followed by the core, repeated `reps` times.
inline void append_with_gi(cvec& out, const cvec& core, std::size_t gi, std::size_t reps = 1)
{
    for (std::size_t i = core.size() - gi; i < core.size(); ++i)
        out.push_back(core[i]);
    for (std::size_t r = 0; r < reps; ++r)
        for (const auto& s : core)
            out.push_back(s);
}

inline cvec legacy_stf_core(const OfdmNumerology& num)
{
    auto tones = duplicate_20mhz(num, [](int l) -> cplx {
        for (const auto& t : seq::l_stf_tones)
            if (t.k == l)
                return seq::stf_tone_scale * cplx(t.re, t.im);
        return {0.0, 0.0};
    });
    return modulate_unit_power(tones, num.fft_size);
}

inline cvec legacy_ltf_core(const OfdmNumerology& num)
{
    auto tones = duplicate_20mhz(num, [](int l) -> cplx {
        return {static_cast<double>(seq::ltf_value_20(l)), 0.0};
    });
    return modulate_unit_power(tones, num.fft_size);
}

// BPSK placeholder symbol on the legacy 20 MHz grid (48 data + 4 pilots).
inline cvec legacy_sig_core(const OfdmNumerology& num, std::uint64_t tag)
{
    const auto bits = seq::placeholder_bits(tag, 48);
    std::size_t b = 0;
    std::array<double, 53> val{}; // index l+26
    for (int l = -26; l <= 26; ++l) {
        if (l == 0)
            continue;
        bool pilot = false;
        for (const auto& p : seq::legacy_pilots) {
            if (p.first == l) {
                val[static_cast<std::size_t>(l + 26)] = p.second;
                pilot = true;
                break;
            }
        }
        if (!pilot)
            val[static_cast<std::size_t>(l + 26)] = bits[b++];
    }
    auto tones = duplicate_20mhz(num, [&](int l) -> cplx {
        if (l == 0)
            return {0.0, 0.0};
        return {val[static_cast<std::size_t>(l + 26)], 0.0};
    });
    return modulate_unit_power(tones, num.fft_size);
}

inline cvec vht_stf_core(const OfdmNumerology& num)
{
    // Same tone structure as the legacy STF; only the duration differs.
    return legacy_stf_core(num);
}

inline cvec vht_ltf_tones(const OfdmNumerology& num)
{
    cvec tones(num.fft_size, cplx(0.0, 0.0));
    for (int k : num.used_subcarriers())
        tones[fft_bin(k, num.fft_size)] = seq::gamma_80(k) * static_cast<double>(seq::vht_ltf_value_80(k));
    return tones;
}

inline cvec vht_ltf_core(const OfdmNumerology& num)
{
    return modulate_unit_power(vht_ltf_tones(num), num.fft_size);
}

// BPSK placeholder on all 242 used subcarriers.
inline cvec vht_sig_b_core(const OfdmNumerology& num)
{
    const auto bits = seq::placeholder_bits(0xb51, OfdmNumerology::n_used_subcarriers);
    cvec tones(num.fft_size, cplx(0.0, 0.0));
    std::size_t i = 0;
    for (int k : num.used_subcarriers())
        tones[fft_bin(k, num.fft_size)] = seq::gamma_80(k) * static_cast<double>(bits[i++]);
    return modulate_unit_power(tones, num.fft_size);
}

} // namespace detail

// Transmitted VHT-LTF tone values in used-subcarrier order; the CSI
// estimator divides the received spectrum by exactly these references.
inline cvec vht_ltf_reference(const OfdmNumerology& num)
{
    auto tones = detail::vht_ltf_tones(num);
    double g = 0.0;
    for (const auto& v : tones)
        g += std::norm(v);
    const double scale = static_cast<double>(num.fft_size) / std::sqrt(g);
    cvec ref;
    ref.reserve(OfdmNumerology::n_used_subcarriers);
    for (int k : num.used_subcarriers())
        ref.push_back(tones[detail::fft_bin(k, num.fft_size)] * scale);
    return ref;
}

// Concatenated L-STF, L-LTF, L-SIG, VHT-SIG-A, VHT-STF, VHT-LTF (one symbol,
// single spatial stream), VHT-SIG-B at 80 MS/s, plus the boundary table.
inline PreambleWaveform build_preamble(const OfdmNumerology& num)
{
    if (!num.is_default_80mhz())
        throw config_error("build_preamble: only the 80 MHz VHT numerology is supported");
    num.validate();

    const std::size_t gi = num.guard_samples(); // 64

    PreambleWaveform w;
    w.sample_rate = num.sample_rate;
    w.fields = preamble_field_table();
    w.samples.reserve(preamble_length);

    const cvec stf = detail::legacy_stf_core(num);
    detail::append_periodic(w.samples, stf, 640); // 10 short repetitions

    const cvec ltf = detail::legacy_ltf_core(num);
    detail::append_with_gi(w.samples, ltf, 2 * gi, 2); // 1.6 us GI + two cores

    detail::append_with_gi(w.samples, detail::legacy_sig_core(num, 0x519), gi);

    detail::append_with_gi(w.samples, detail::legacy_sig_core(num, 0xa1), gi);
    detail::append_with_gi(w.samples, detail::legacy_sig_core(num, 0xa2), gi);

    detail::append_periodic(w.samples, detail::vht_stf_core(num), 320); // 5 short repetitions

    detail::append_with_gi(w.samples, detail::vht_ltf_core(num), gi);

    detail::append_with_gi(w.samples, detail::vht_sig_b_core(num), gi);

    if (w.samples.size() != preamble_length)
        throw config_error("build_preamble: internal length mismatch");
    return w;
}

// Clean L-LTF field (GI + two cores) used as the fine-timing template.
inline cvec l_ltf_template(const OfdmNumerology& num)
{
    cvec out;
    out.reserve(640);
    detail::append_with_gi(out, detail::legacy_ltf_core(num), 2 * num.guard_samples(), 2);
    return out;
}

} // namespace find
