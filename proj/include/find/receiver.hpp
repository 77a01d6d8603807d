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
// Software 4-channel receiver: L-STF plateau detection, two-stage CFO
// estimation (lag-64 over L-STF, lag-256 over L-LTF), time-domain field
// extraction, 242-subcarrier CSI from VHT-LTF and L-LTF-based SNR.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "find/capture.hpp"
#include "find/common.hpp"
#include "find/errors.hpp"
#include "find/fft.hpp"
#include "find/preamble.hpp"
#include "find/record.hpp"

namespace find {

struct DetectionResult {
    std::size_t coarse_start = 0; // start of the autocorrelation plateau
    std::size_t fine_start = 0;   // frame start from L-LTF cross-correlation
    double metric_peak = 0.0;     // in [0, 1 + eps]
};

struct CfoEstimate {
    double coarse_hz = 0.0;   // L-STF, lag 64, unambiguous to +/-625 kHz
    double fine_hz = 0.0;     // L-LTF residual, lag 256, +/-156.25 kHz
    double combined_hz = 0.0; // coarse + fine
};

struct ReceiverConfig {
    OfdmNumerology numerology;
    double detection_threshold = 0.8;
    std::string position_label;
};

namespace rxdetail {

inline constexpr std::size_t metric_window = 512; // summed lag products per position
inline constexpr std::size_t metric_lag = 64;
inline constexpr std::size_t plateau_min = 128;
inline constexpr std::size_t min_capture = 1280;

// Coherent multi-channel lag product at one position (shared LO makes the
// per-channel terms phase-aligned).
inline cplx lag_products(const MultiChannelCapture& c, std::size_t n, std::size_t count,
                         std::size_t lag)
{
    cplx acc(0.0, 0.0);
    for (const auto& ch : c.channels) {
        const cplx* x = ch.data();
        for (std::size_t k = 0; k < count; ++k)
            acc += x[n + k] * std::conj(x[n + k + lag]);
    }
    return acc;
}

inline double lag_energy(const MultiChannelCapture& c, std::size_t n, std::size_t count,
                         std::size_t lag)
{
    double acc = 0.0;
    for (const auto& ch : c.channels) {
        const cplx* x = ch.data();
        for (std::size_t k = 0; k < count; ++k)
            acc += std::norm(x[n + k + lag]);
    }
    return acc;
}

} // namespace rxdetail

// Lag-64 normalized autocorrelation metric, coherently summed over channels:
// M[n] = |sum_{k<512} x[n+k] x*[n+k+64]| / sum_{k<512} |x[n+k+64]|^2.
// A detection opens where M stays above the threshold for >= 128 samples;
// coarse_start is the plateau start and fine_start comes from
// cross-correlating the known L-LTF against the coarse-CFO-corrected capture.
inline std::vector<DetectionResult> detect_frame(const MultiChannelCapture& capture,
                                                 double threshold,
                                                 const OfdmNumerology& num = {})
{
    using namespace rxdetail;
    if (threshold <= 0.0 || threshold >= 1.0)
        throw config_error("detect_frame: threshold must be in (0, 1)");
    if (!num.is_default_80mhz())
        throw config_error("detect_frame: only the 80 MHz VHT numerology is supported");
    capture.validate();

    std::vector<DetectionResult> detections;
    const std::size_t n_samples = capture.n_samples();
    if (n_samples < min_capture || capture.n_channels() == 0)
        return detections;

    const std::size_t span = metric_window + metric_lag; // samples touched per position
    const std::size_t last = n_samples - span;            // inclusive metric range
    const double fs = capture.sample_rate;

    static thread_local cvec ltf_template;
    if (ltf_template.empty())
        ltf_template = l_ltf_template(num);
    const std::size_t tpl_len = ltf_template.size(); // 640

    cplx corr_sum(0.0, 0.0);
    double energy_sum = 0.0;
    bool sums_valid = false;

    bool in_run = false;
    std::size_t run_start = 0;
    double run_peak = 0.0;
    std::size_t run_peak_pos = 0;
    std::size_t next_allowed = 0;

    auto finish_run = [&](std::size_t run_end) {
        if (run_end - run_start < plateau_min || run_start < next_allowed)
            return;

        // Coarse CFO at the metric peak, used only to stabilize the template
        // correlation; the reported estimate comes from estimate_cfo.
        const cplx p = lag_products(capture, run_peak_pos, metric_window, metric_lag);
        const double coarse_cfo = -std::arg(p) / (two_pi * 0.8e-6);

        // L-LTF starts one STF after the frame start; the plateau start can
        // lead the frame by up to ~window/2, so search a generous range.
        const std::size_t lo = run_start + 256;
        const std::size_t hi_want = run_start + 1152;
        if (lo + tpl_len > n_samples)
            return;
        const std::size_t hi = std::min(hi_want, n_samples - tpl_len);

        const std::size_t buf_len = hi - lo + tpl_len;
        std::vector<cvec> corrected(capture.n_channels(), cvec(buf_len));
        for (std::size_t m = 0; m < capture.n_channels(); ++m)
            for (std::size_t i = 0; i < buf_len; ++i)
                corrected[m][i] = capture.channels[m][lo + i] *
                                  std::polar(1.0, -two_pi * coarse_cfo * static_cast<double>(lo + i) / fs);

        double best = -1.0;
        std::size_t best_tau = lo;
        for (std::size_t tau = lo; tau <= hi; ++tau) {
            double score = 0.0;
            for (std::size_t m = 0; m < capture.n_channels(); ++m) {
                cplx acc(0.0, 0.0);
                const cplx* x = corrected[m].data() + (tau - lo);
                for (std::size_t k = 0; k < tpl_len; ++k)
                    acc += x[k] * std::conj(ltf_template[k]);
                score += std::norm(acc);
            }
            if (score > best) {
                best = score;
                best_tau = tau;
            }
        }
        if (best_tau < tpl_len)
            return; // frame begins before the capture
        DetectionResult d;
        d.coarse_start = run_start;
        d.fine_start = best_tau - tpl_len;
        d.metric_peak = run_peak;
        detections.push_back(d);
        next_allowed = d.fine_start + preamble_length;
    };

    for (std::size_t n = 0; n <= last; ++n) {
        if (!sums_valid || (n & 0xffff) == 0) {
            corr_sum = lag_products(capture, n, metric_window, metric_lag);
            energy_sum = lag_energy(capture, n, metric_window, metric_lag);
            sums_valid = true;
        }

        const double metric = energy_sum > 1e-30 ? std::abs(corr_sum) / energy_sum : 0.0;
        if (metric > threshold) {
            if (!in_run) {
                in_run = true;
                run_start = n;
                run_peak = metric;
                run_peak_pos = n;
            } else if (metric > run_peak) {
                run_peak = metric;
                run_peak_pos = n;
            }
        } else if (in_run) {
            in_run = false;
            finish_run(n);
        }

        if (n < last) {
            for (const auto& ch : capture.channels) {
                const cplx* x = ch.data();
                corr_sum -= x[n] * std::conj(x[n + metric_lag]);
                corr_sum += x[n + metric_window] * std::conj(x[n + metric_window + metric_lag]);
                energy_sum -= std::norm(x[n + metric_lag]);
                energy_sum += std::norm(x[n + metric_window + metric_lag]);
            }
        }
    }
    if (in_run)
        finish_run(last + 1);
    return detections;
}

// Two-stage CFO estimate. Coarse over the whole L-STF at lag 64, fine over
// the L-LTF at lag 256 after coarse correction; combined = coarse + fine.
inline CfoEstimate estimate_cfo(const MultiChannelCapture& capture, const DetectionResult& det)
{
    using namespace rxdetail;
    const std::size_t fine = det.fine_start;
    if (fine + 1280 > capture.n_samples())
        throw bounds_error("estimate_cfo: detection window exceeds capture bounds");
    const double fs = capture.sample_rate;

    CfoEstimate est;
    // Skip the first short period: it holds the multipath settling transient
    // for any delay spread up to one guard interval, and the remaining 512
    // pairs sit entirely in the periodic steady state.
    const cplx coarse_acc = lag_products(capture, fine + metric_lag, 512, metric_lag);
    est.coarse_hz = -std::arg(coarse_acc) / (two_pi * 0.8e-6);

    // L-LTF occupies [fine+640, fine+1280); the GI is cyclic, so lag-256
    // pairs repeat exactly once the channel has settled.
    cplx fine_acc(0.0, 0.0);
    for (const auto& ch : capture.channels) {
        const cplx* x = ch.data() + fine + 640;
        for (std::size_t i = 64; i < 384; ++i) {
            const cplx a = x[i] * std::polar(1.0, -two_pi * est.coarse_hz * static_cast<double>(i) / fs);
            const cplx b = x[i + 256] *
                           std::polar(1.0, -two_pi * est.coarse_hz * static_cast<double>(i + 256) / fs);
            fine_acc += a * std::conj(b);
        }
    }
    est.fine_hz = -std::arg(fine_acc) / (two_pi * 3.2e-6);
    est.combined_hz = est.coarse_hz + est.fine_hz;
    return est;
}

// Counter-rotates every channel by the combined estimate, with the sample
// index referenced to fine_start.
inline MultiChannelCapture correct_cfo(const MultiChannelCapture& capture, const CfoEstimate& cfo,
                                       const DetectionResult& det)
{
    MultiChannelCapture out;
    out.sample_rate = capture.sample_rate;
    out.truth = capture.truth;
    out.channels.reserve(capture.n_channels());
    const double fs = capture.sample_rate;
    for (const auto& ch : capture.channels) {
        cvec y(ch.size());
        for (std::size_t n = 0; n < ch.size(); ++n) {
            const double t = static_cast<double>(n) - static_cast<double>(det.fine_start);
            y[n] = ch[n] * std::polar(1.0, -two_pi * cfo.combined_hz * t / fs);
        }
        out.channels.push_back(std::move(y));
    }
    return out;
}

// Slices the seven preamble fields at the standard boundaries relative to
// fine_start. The capture is expected to be CFO-corrected already.
inline PreambleFields extract_fields(const MultiChannelCapture& capture, const DetectionResult& det)
{
    const auto table = preamble_field_table();
    const std::size_t n = capture.n_samples();
    for (const auto& span : table) {
        if (det.fine_start + span.start + span.length > n)
            throw truncation_error(std::string("extract_fields: frame truncated inside ") +
                                   field_name(span.id));
    }

    PreambleFields out;
    for (const auto& span : table) {
        auto& block = out.field(span.id);
        block.resize(capture.n_channels());
        for (std::size_t m = 0; m < capture.n_channels(); ++m) {
            const cplx* src = capture.channels[m].data() + det.fine_start + span.start;
            block[m].assign(src, src + span.length);
        }
    }
    return out;
}

// H_m(k) = Y_m(k) / L(k) on the 242 used subcarriers, where Y is the 256-point
// transform of the VHT-LTF core (guard interval removed) and L is the known
// transmitted reference tone.
inline CsiMatrix estimate_csi(const PreambleFields& fields, const OfdmNumerology& num = {})
{
    if (!num.is_default_80mhz())
        throw config_error("estimate_csi: only the 80 MHz VHT numerology is supported");
    const auto& block = fields.field(FieldId::vht_ltf);
    if (block.empty() || block.front().size() < num.guard_samples() + num.fft_size)
        throw truncation_error("estimate_csi: VHT-LTF field missing or short");

    static thread_local cvec reference;
    if (reference.empty())
        reference = vht_ltf_reference(num);
    const auto subcarriers = num.used_subcarriers();

    CsiMatrix csi(block.size());
    cvec core(num.fft_size);
    for (std::size_t m = 0; m < block.size(); ++m) {
        std::copy(block[m].begin() + static_cast<std::ptrdiff_t>(num.guard_samples()),
                  block[m].begin() + static_cast<std::ptrdiff_t>(num.guard_samples() + num.fft_size),
                  core.begin());
        fft::transform(core.data(), num.fft_size, false);
        for (std::size_t k = 0; k < subcarriers.size(); ++k) {
            const std::size_t bin = detail::fft_bin(subcarriers[k], num.fft_size);
            csi.at(k, m) = core[bin] / reference[k];
        }
    }
    return csi;
}

struct SnrEstimate {
    std::vector<double> per_channel_db; // clamped to [-60, +60]
};

// SNR from the repeated L-LTF halves. The coherent half-sum carries
// signal + half the noise power and the half-difference carries the other
// half, so the noise estimate is doubled and subtracted from the signal
// estimate before forming the ratio.
inline SnrEstimate estimate_snr(const PreambleFields& fields)
{
    const auto& block = fields.field(FieldId::l_ltf);
    if (block.empty() || block.front().size() < 640)
        throw truncation_error("estimate_snr: L-LTF field missing or short");

    SnrEstimate est;
    for (const auto& ch : block) {
        double sum_power = 0.0;
        double diff_power = 0.0;
        for (std::size_t i = 0; i < 256; ++i) {
            const cplx a = ch[128 + i];
            const cplx b = ch[384 + i];
            sum_power += std::norm((a + b) * 0.5);
            diff_power += std::norm((a - b) * 0.5);
        }
        sum_power /= 256.0;
        diff_power /= 256.0;
        const double noise = 2.0 * diff_power;
        const double signal = std::max(sum_power - diff_power, 0.0);
        double db;
        if (noise <= 0.0 || signal / noise >= 1e6)
            db = 60.0; // cap when the noise estimate underflows
        else
            db = std::max(linear_to_db(signal / noise), -60.0);
        est.per_channel_db.push_back(db);
    }
    return est;
}

struct ProcessResult {
    std::vector<FrameRecord> records;
    std::size_t frames_failed = 0;
    std::size_t frames_detected = 0;
};

// Full per-frame pipeline: detect -> estimate/correct CFO -> extract fields
// -> CSI -> SNR. A failing frame is skipped and counted, never fatal.
inline ProcessResult process_capture(const MultiChannelCapture& capture, const ReceiverConfig& config)
{
    ProcessResult result;
    if (capture.n_samples() == 0)
        return result;

    const auto detections = detect_frame(capture, config.detection_threshold, config.numerology);
    result.frames_detected = detections.size();
    const double fs = capture.sample_rate;

    for (const auto& det : detections) {
        try {
            const CfoEstimate cfo = estimate_cfo(capture, det);
            if (det.fine_start + preamble_length > capture.n_samples())
                throw truncation_error("process_capture: frame truncated");

            // CFO-corrected frame slice, sample index referenced to fine_start.
            MultiChannelCapture frame;
            frame.sample_rate = fs;
            frame.channels.reserve(capture.n_channels());
            for (const auto& ch : capture.channels) {
                cvec y(preamble_length);
                for (std::size_t i = 0; i < preamble_length; ++i)
                    y[i] = ch[det.fine_start + i] *
                           std::polar(1.0, -two_pi * cfo.combined_hz * static_cast<double>(i) / fs);
                frame.channels.push_back(std::move(y));
            }

            DetectionResult local;
            local.coarse_start = 0;
            local.fine_start = 0;
            local.metric_peak = det.metric_peak;

            const PreambleFields fields = extract_fields(frame, local);
            const CsiMatrix csi = estimate_csi(fields, config.numerology);
            const SnrEstimate snr = estimate_snr(fields);

            FrameRecord rec;
            rec.id = result.records.size();
            rec.timestamp_s = static_cast<double>(det.fine_start) / fs;
            rec.position_label = config.position_label;
            rec.cfo_hz = cfo.combined_hz;
            rec.detection_metric = static_cast<float>(det.metric_peak);
            rec.csi = csi;
            rec.fields = fields;
            for (double v : snr.per_channel_db)
                rec.snr_db.push_back(static_cast<float>(v));

            for (const auto& t : capture.truth) {
                const auto delta = static_cast<long long>(det.fine_start) -
                                   static_cast<long long>(t.start_index);
                if (std::abs(delta) <= 64 && t.azimuth_rad) {
                    rec.true_azimuth_deg = rad_to_deg(*t.azimuth_rad);
                    break;
                }
            }

            quantize_record_payload(rec);
            result.records.push_back(std::move(rec));
        } catch (const std::exception&) {
            ++result.frames_failed;
        }
    }
    return result;
}

} // namespace find
