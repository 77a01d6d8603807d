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
// Constant inter-channel phase calibration. Offsets are measured from frames
// captured with all receive antennas equidistant from the transmitter (a
// caller-asserted placement contract); aggregation uses circular statistics
// throughout, so phases near +/-pi are handled correctly.

#pragma once

#include <cstddef>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "find/common.hpp"
#include "find/errors.hpp"
#include "find/record.hpp"

namespace find {

// Circular mean and dispersion of angle-valued samples. The mean is the
// argument of the summed unit vectors; the std is sqrt(-2 ln Rbar) with Rbar
// the mean resultant length.
struct CircularStats {
    double mean = 0.0;
    double std = 0.0;
    double resultant = 0.0;
    std::size_t count = 0;
};

inline CircularStats circular_stats(const std::vector<double>& angles_rad)
{
    CircularStats s;
    s.count = angles_rad.size();
    if (angles_rad.empty())
        return s;
    cplx acc(0.0, 0.0);
    for (double a : angles_rad)
        acc += std::polar(1.0, a);
    const double rbar = std::min(std::abs(acc) / static_cast<double>(angles_rad.size()), 1.0);
    s.mean = std::arg(acc);
    s.resultant = rbar;
    s.std = rbar > 0.0 ? std::sqrt(std::max(-2.0 * std::log(rbar), 0.0)) + 0.0 : pi;
    return s;
}

struct CalibrationProfile {
    std::size_t reference_channel = 0;
    std::vector<double> offsets_rad;      // length n_channels, [0] == 0
    std::vector<double> circular_std_rad; // per channel
    std::size_t n_frames_used = 0;
    std::string environment_label;

    std::size_t n_channels() const { return offsets_rad.size(); }
};

// Frames captured under the equidistant placement contract, grouped by the
// position label carried in each record.
struct CalibrationMeasurement {
    std::vector<FrameRecord> records;

    std::map<std::string, std::vector<const FrameRecord*>> by_position() const
    {
        std::map<std::string, std::vector<const FrameRecord*>> groups;
        for (const auto& r : records)
            groups[r.position_label].push_back(&r);
        return groups;
    }
};

// Per-channel offset of one frame: circular mean over the 242 subcarriers of
// angle(H_m(k) H_0*(k)). Every subcarrier is weighted equally.
inline std::vector<double> estimate_offsets(const CsiMatrix& csi)
{
    if (!csi.well_formed())
        throw config_error("estimate_offsets: malformed CSI");

    std::size_t weak = 0;
    for (std::size_t k = 0; k < CsiMatrix::n_subcarriers; ++k)
        if (std::abs(csi.at(k, 0)) < 1e-12)
            ++weak;
    if (weak * 10 > CsiMatrix::n_subcarriers)
        throw low_signal_error("estimate_offsets: reference channel CSI below usable level");

    std::vector<double> offsets(csi.n_channels, 0.0);
    for (std::size_t m = 1; m < csi.n_channels; ++m) {
        cplx acc(0.0, 0.0);
        for (std::size_t k = 0; k < CsiMatrix::n_subcarriers; ++k) {
            const cplx u = csi.at(k, m) * std::conj(csi.at(k, 0));
            const double mag = std::abs(u);
            if (mag < 1e-300)
                continue;
            acc += u / mag;
        }
        offsets[m] = std::arg(acc);
    }
    return offsets;
}

inline std::vector<double> estimate_offsets(const FrameRecord& record)
{
    return estimate_offsets(record.csi);
}

// Circular mean of per-frame offsets across all records of a measurement.
inline CalibrationProfile aggregate_profile(const CalibrationMeasurement& measurement,
                                            const std::string& environment_label = "")
{
    if (measurement.records.empty())
        throw insufficient_data_error("aggregate_profile: no records");

    const std::size_t n_ch = measurement.records.front().n_channels();
    std::vector<std::vector<double>> per_channel(n_ch);
    for (const auto& rec : measurement.records) {
        const auto offs = estimate_offsets(rec);
        if (offs.size() != n_ch)
            throw schema_error("aggregate_profile: inconsistent channel counts");
        for (std::size_t m = 0; m < n_ch; ++m)
            per_channel[m].push_back(offs[m]);
    }

    CalibrationProfile p;
    p.environment_label = environment_label;
    p.n_frames_used = measurement.records.size();
    p.offsets_rad.resize(n_ch, 0.0);
    p.circular_std_rad.resize(n_ch, 0.0);
    for (std::size_t m = 0; m < n_ch; ++m) {
        const auto s = circular_stats(per_channel[m]);
        p.offsets_rad[m] = m == 0 ? 0.0 : s.mean;
        p.circular_std_rad[m] = s.std;
    }
    return p;
}

// H'_m(k) = H_m(k) e^{-j offset_m}. Pure phase rotation, |H| preserved.
inline CsiMatrix apply_profile(const CsiMatrix& csi, const CalibrationProfile& profile)
{
    if (csi.n_channels != profile.n_channels())
        throw schema_error("apply_profile: profile channel count does not match CSI");
    CsiMatrix out = csi;
    for (std::size_t m = 0; m < csi.n_channels; ++m) {
        const cplx rot = std::polar(1.0, -profile.offsets_rad[m]);
        for (std::size_t k = 0; k < CsiMatrix::n_subcarriers; ++k)
            out.at(k, m) *= rot;
    }
    return out;
}

struct PositionStats {
    std::string label;
    std::vector<double> offsets_rad;
    std::vector<double> circular_std_rad;
    std::size_t n_frames = 0;
};

struct StabilityReport {
    std::string environment_label;
    std::vector<PositionStats> positions;
    std::vector<double> cross_position_std_rad; // per channel, over position means
};

// Fig.-2-style stability analysis: per-position aggregated offsets plus the
// circular spread of those offsets across positions.
inline StabilityReport stability_report(const CalibrationMeasurement& measurement,
                                        const std::string& environment_label)
{
    const auto groups = measurement.by_position();
    if (groups.size() < 2)
        throw insufficient_data_error("stability_report: need at least 2 position groups");

    StabilityReport rep;
    rep.environment_label = environment_label;

    std::size_t n_ch = 0;
    for (const auto& [label, recs] : groups) {
        CalibrationMeasurement group;
        for (const auto* r : recs)
            group.records.push_back(*r);
        const auto prof = aggregate_profile(group, environment_label);
        n_ch = prof.n_channels();
        rep.positions.push_back({label, prof.offsets_rad, prof.circular_std_rad, prof.n_frames_used});
    }

    rep.cross_position_std_rad.resize(n_ch, 0.0);
    for (std::size_t m = 0; m < n_ch; ++m) {
        std::vector<double> means;
        for (const auto& pos : rep.positions)
            means.push_back(pos.offsets_rad[m]);
        rep.cross_position_std_rad[m] = circular_stats(means).std;
    }
    return rep;
}

namespace detail {

inline std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

// Text serialization: one key per line, values space-separated, the
// environment label (free text) last on its line.
inline std::string profile_to_text(const CalibrationProfile& p)
{
    std::ostringstream os;
    os << "find-calibration-profile v1\n";
    os << "reference_channel " << p.reference_channel << "\n";
    os << "n_channels " << p.offsets_rad.size() << "\n";
    os << "offsets_rad";
    for (double v : p.offsets_rad)
        os << ' ' << detail::format_double(v);
    os << "\ncircular_std_rad";
    for (double v : p.circular_std_rad)
        os << ' ' << detail::format_double(v);
    os << "\nn_frames_used " << p.n_frames_used << "\n";
    os << "environment_label " << p.environment_label << "\n";
    return os.str();
}

inline CalibrationProfile profile_from_text(const std::string& text)
{
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != "find-calibration-profile v1")
        throw format_error("profile: unrecognized header line");

    CalibrationProfile p;
    std::size_t n_ch = 0;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "reference_channel") {
            ls >> p.reference_channel;
        } else if (key == "n_channels") {
            ls >> n_ch;
        } else if (key == "offsets_rad") {
            double v;
            while (ls >> v)
                p.offsets_rad.push_back(v);
        } else if (key == "circular_std_rad") {
            double v;
            while (ls >> v)
                p.circular_std_rad.push_back(v);
        } else if (key == "n_frames_used") {
            ls >> p.n_frames_used;
        } else if (key == "environment_label") {
            std::string rest;
            std::getline(ls, rest);
            if (!rest.empty() && rest.front() == ' ')
                rest.erase(rest.begin());
            p.environment_label = rest;
        } else {
            throw format_error("profile: unknown key '" + key + "'");
        }
    }
    if (n_ch != p.offsets_rad.size() || n_ch != p.circular_std_rad.size() || n_ch == 0)
        throw format_error("profile: channel count mismatch");
    if (p.reference_channel != 0 || p.offsets_rad.front() != 0.0)
        throw format_error("profile: reference channel must be 0 with zero offset");
    return p;
}

inline void save_profile(const CalibrationProfile& p, const std::string& path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw io_error("cannot open profile for writing: " + path);
    f << profile_to_text(p);
}

inline CalibrationProfile load_profile(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw io_error("cannot open profile: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return profile_from_text(ss.str());
}

// CSV views of a stability report (per-position table and the
// cross-position dispersion summary).
inline std::string stability_positions_csv(const StabilityReport& rep)
{
    std::ostringstream os;
    const std::size_t n_ch = rep.cross_position_std_rad.size();
    os << "position,n_frames";
    for (std::size_t m = 0; m < n_ch; ++m)
        os << ",offset_rad_ch" << m;
    for (std::size_t m = 0; m < n_ch; ++m)
        os << ",circular_std_rad_ch" << m;
    os << "\n";
    for (const auto& pos : rep.positions) {
        os << pos.label << ',' << pos.n_frames;
        for (double v : pos.offsets_rad)
            os << ',' << detail::format_double(v);
        for (double v : pos.circular_std_rad)
            os << ',' << detail::format_double(v);
        os << "\n";
    }
    return os.str();
}

inline std::string stability_summary_csv(const StabilityReport& rep)
{
    std::ostringstream os;
    os << "channel,cross_position_circular_std_rad\n";
    for (std::size_t m = 0; m < rep.cross_position_std_rad.size(); ++m)
        os << m << ',' << detail::format_double(rep.cross_position_std_rad[m]) << "\n";
    return os.str();
}

} // namespace find
