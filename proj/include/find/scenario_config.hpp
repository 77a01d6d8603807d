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
// Declarative simulation scenarios. A scenario file is a JSON document with
// an explicit seed; unknown keys are rejected so typos cannot silently
// change an experiment. One scenario materializes into one or more
// simulation jobs (one per position group).

#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "find/errors.hpp"
#include "find/rng.hpp"
#include "find/simulate.hpp"

namespace find {

struct PathSpec {
    double azimuth_deg = 0.0;
    double delay_ns = 0.0;
    double gain_db = 0.0;
    double phase_deg = 0.0;
};

struct RandomPathsSpec {
    std::size_t count = 5;
    double max_delay_ns = 750.0;
    double min_azimuth_deg = -60.0;
    double max_azimuth_deg = 60.0;
    double min_gain_db = -10.0;
    double max_gain_db = 0.0;
};

struct PositionSpec {
    std::string label;
    std::vector<PathSpec> paths;                 // explicit paths, or
    std::optional<RandomPathsSpec> random_paths; // drawn from the scenario seed
};

struct SweepSpec {
    double start_deg = -60.0;
    double stop_deg = 60.0;
    double step_deg = 5.0;
};

struct ScenarioConfig {
    std::uint64_t seed = 1;
    double carrier_hz = 2.412e9;
    std::size_t n_channels = 4;
    double element_spacing_wavelengths = 0.5;
    std::size_t frames = 1; // per position, or per sweep angle
    std::size_t gap_samples = 2000;
    std::size_t start_offset = 1000;
    double cfo_hz = 0.0;
    std::vector<double> phase_offsets_rad; // defaults to all zero
    std::optional<double> snr_db;
    double detection_threshold = 0.8;
    std::string environment_label = "sim";
    std::string position_label = "pos-0";
    std::vector<PathSpec> paths = {{}};
    std::optional<SweepSpec> sweep;
    std::vector<PositionSpec> positions;

    ArrayGeometry geometry() const
    {
        return make_ula(n_channels, carrier_hz, element_spacing_wavelengths);
    }
};

namespace detail {

inline void require_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                         const std::string& where)
{
    if (!j.is_object())
        throw config_error("scenario: " + where + " must be an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key))
            throw config_error("scenario: unknown key '" + key + "' in " + where);
    }
}

inline PathSpec parse_path(const nlohmann::json& j)
{
    require_keys(j, {"azimuth_deg", "delay_ns", "gain_db", "phase_deg"}, "path");
    PathSpec p;
    p.azimuth_deg = j.value("azimuth_deg", 0.0);
    p.delay_ns = j.value("delay_ns", 0.0);
    p.gain_db = j.value("gain_db", 0.0);
    p.phase_deg = j.value("phase_deg", 0.0);
    return p;
}

inline RandomPathsSpec parse_random_paths(const nlohmann::json& j)
{
    require_keys(j,
                 {"count", "max_delay_ns", "min_azimuth_deg", "max_azimuth_deg", "min_gain_db",
                  "max_gain_db"},
                 "random_paths");
    RandomPathsSpec r;
    r.count = j.value("count", 5u);
    r.max_delay_ns = j.value("max_delay_ns", 750.0);
    r.min_azimuth_deg = j.value("min_azimuth_deg", -60.0);
    r.max_azimuth_deg = j.value("max_azimuth_deg", 60.0);
    r.min_gain_db = j.value("min_gain_db", -10.0);
    r.max_gain_db = j.value("max_gain_db", 0.0);
    if (r.count == 0)
        throw config_error("scenario: random_paths.count must be positive");
    return r;
}

} // namespace detail

inline ScenarioConfig parse_scenario(const nlohmann::json& j)
{
    detail::require_keys(j,
                         {"seed", "carrier_hz", "n_channels", "element_spacing_wavelengths",
                          "frames", "gap_samples", "start_offset", "cfo_hz", "phase_offsets_rad",
                          "snr_db", "detection_threshold", "environment_label", "position_label",
                          "paths", "sweep", "positions"},
                         "scenario");
    if (!j.contains("seed"))
        throw config_error("scenario: explicit 'seed' is required for reproducibility");

    ScenarioConfig c;
    c.seed = j.at("seed").get<std::uint64_t>();
    c.carrier_hz = j.value("carrier_hz", 2.412e9);
    c.n_channels = j.value("n_channels", 4u);
    c.element_spacing_wavelengths = j.value("element_spacing_wavelengths", 0.5);
    c.frames = j.value("frames", 1u);
    c.gap_samples = j.value("gap_samples", 2000u);
    c.start_offset = j.value("start_offset", 1000u);
    c.cfo_hz = j.value("cfo_hz", 0.0);
    c.detection_threshold = j.value("detection_threshold", 0.8);
    c.environment_label = j.value("environment_label", std::string("sim"));
    c.position_label = j.value("position_label", std::string("pos-0"));

    if (j.contains("phase_offsets_rad"))
        c.phase_offsets_rad = j.at("phase_offsets_rad").get<std::vector<double>>();
    else
        c.phase_offsets_rad.assign(c.n_channels, 0.0);

    if (j.contains("snr_db") && !j.at("snr_db").is_null())
        c.snr_db = j.at("snr_db").get<double>();

    if (j.contains("paths")) {
        c.paths.clear();
        for (const auto& p : j.at("paths"))
            c.paths.push_back(detail::parse_path(p));
        if (c.paths.empty())
            throw config_error("scenario: paths must not be empty");
    }

    if (j.contains("sweep")) {
        detail::require_keys(j.at("sweep"), {"start_deg", "stop_deg", "step_deg"}, "sweep");
        SweepSpec s;
        s.start_deg = j.at("sweep").value("start_deg", -60.0);
        s.stop_deg = j.at("sweep").value("stop_deg", 60.0);
        s.step_deg = j.at("sweep").value("step_deg", 5.0);
        c.sweep = s;
    }

    if (j.contains("positions")) {
        for (const auto& pj : j.at("positions")) {
            detail::require_keys(pj, {"label", "paths", "random_paths"}, "position");
            PositionSpec pos;
            pos.label = pj.value("label", std::string());
            if (pos.label.empty())
                throw config_error("scenario: every position needs a label");
            if (pj.contains("paths"))
                for (const auto& p : pj.at("paths"))
                    pos.paths.push_back(detail::parse_path(p));
            if (pj.contains("random_paths"))
                pos.random_paths = detail::parse_random_paths(pj.at("random_paths"));
            if (pos.paths.empty() && !pos.random_paths)
                throw config_error("scenario: position '" + pos.label +
                                   "' needs paths or random_paths");
            c.positions.push_back(std::move(pos));
        }
        if (c.sweep)
            throw config_error("scenario: sweep and positions are mutually exclusive");
    }
    return c;
}

inline ScenarioConfig load_scenario(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw io_error("cannot open scenario: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("scenario: invalid JSON: ") + e.what());
    }
    return parse_scenario(j);
}

// One simulation job: a label plus a fully resolved scenario.
struct SimJob {
    std::string position_label;
    SimulationScenario scenario;
};

namespace detail {

inline ChannelModel resolve_paths(const std::vector<PathSpec>& specs)
{
    ChannelModel ch;
    for (const auto& p : specs)
        ch.paths.push_back({p.delay_ns * 1e-9,
                            std::polar(db_to_linear(p.gain_db / 2.0), deg_to_rad(p.phase_deg)),
                            deg_to_rad(p.azimuth_deg)});
    return ch;
}

inline ChannelModel draw_random_paths(const RandomPathsSpec& spec, Rng& rng)
{
    ChannelModel ch;
    for (std::size_t i = 0; i < spec.count; ++i) {
        PropagationPath p;
        p.delay_s = rng.uniform(0.0, spec.max_delay_ns) * 1e-9;
        p.gain = std::polar(db_to_linear(rng.uniform(spec.min_gain_db, spec.max_gain_db) / 2.0),
                            rng.uniform(-pi, pi));
        p.azimuth_rad = deg_to_rad(rng.uniform(spec.min_azimuth_deg, spec.max_azimuth_deg));
        ch.paths.push_back(p);
    }
    return ch;
}

} // namespace detail

// Materializes the scenario into per-position simulation jobs. All
// randomness (random paths, noise) derives from the scenario seed.
inline std::vector<SimJob> scenario_jobs(const ScenarioConfig& c)
{
    if (c.phase_offsets_rad.size() != c.n_channels)
        throw config_error("scenario: phase_offsets_rad length must equal n_channels");

    SimulationScenario base;
    base.geometry = c.geometry();
    base.impairments.cfo_hz = c.cfo_hz;
    base.impairments.phase_offsets_rad = c.phase_offsets_rad;
    base.impairments.snr_db = c.snr_db;
    base.impairments.start_offset = c.start_offset;
    base.gap_samples = c.gap_samples;

    Rng master(c.seed);
    std::vector<SimJob> jobs;

    if (!c.positions.empty()) {
        for (std::size_t i = 0; i < c.positions.size(); ++i) {
            const auto& pos = c.positions[i];
            Rng draw = master.fork(i);
            ChannelModel ch = pos.random_paths ? detail::draw_random_paths(*pos.random_paths, draw)
                                               : detail::resolve_paths(pos.paths);
            SimJob job;
            job.position_label = pos.label;
            job.scenario = base;
            job.scenario.seed = master.fork(0x9000 + i).next_u64();
            job.scenario.frame_channels.assign(c.frames, ch);
            jobs.push_back(std::move(job));
        }
        return jobs;
    }

    SimJob job;
    job.position_label = c.position_label;
    job.scenario = base;
    job.scenario.seed = master.fork(0x9000).next_u64();
    const ChannelModel ch = detail::resolve_paths(c.paths);
    if (c.sweep)
        job.scenario.frame_channels =
            sweep_channels(ch, c.sweep->start_deg, c.sweep->stop_deg, c.sweep->step_deg, c.frames);
    else
        job.scenario.frame_channels.assign(c.frames, ch);
    jobs.push_back(std::move(job));
    return jobs;
}

} // namespace find
