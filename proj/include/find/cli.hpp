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
// Batch front end: simulate sweeps into datasets, process raw captures,
// calibrate, estimate DoA, run stability comparisons, export plot views,
// validate containers and benchmark the pipeline.

#pragma once

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "find/calib.hpp"
#include "find/dataset.hpp"
#include "find/doa.hpp"
#include "find/export.hpp"
#include "find/receiver.hpp"
#include "find/scenario_config.hpp"
#include "find/simulate.hpp"

namespace find::cli {

namespace detail {

inline std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

inline DatasetHeader header_for(const ArrayGeometry& geometry, const std::string& environment)
{
    DatasetHeader h;
    h.carrier_hz = geometry.carrier_hz;
    h.element_positions = geometry.element_positions;
    h.n_channels = static_cast<std::uint8_t>(geometry.n_channels());
    h.environment_label = environment;
    return h;
}

struct ProcessedScenario {
    DatasetHeader header;
    std::vector<FrameRecord> records;
    std::size_t frames_simulated = 0;
    std::size_t frames_detected = 0;
    std::size_t frames_failed = 0;
    std::vector<FrameTruth> truth;
    std::vector<std::size_t> record_truth; // index into truth per record, or npos
};

// simulate -> receive for every job of a scenario; records get sequential
// ids and per-job position labels.
inline ProcessedScenario run_scenario(const ScenarioConfig& config)
{
    ProcessedScenario out;
    out.header = header_for(config.geometry(), config.environment_label);

    for (const auto& job : scenario_jobs(config)) {
        const auto capture = simulate_capture(job.scenario);
        out.frames_simulated += capture.truth.size();

        ReceiverConfig rx;
        rx.detection_threshold = config.detection_threshold;
        rx.position_label = job.position_label;
        auto result = process_capture(capture, rx);
        out.frames_detected += result.frames_detected;
        out.frames_failed += result.frames_failed;

        const std::size_t truth_base = out.truth.size();
        for (const auto& t : capture.truth)
            out.truth.push_back(t);

        for (auto& rec : result.records) {
            rec.id = out.records.size();
            std::size_t match = static_cast<std::size_t>(-1);
            const auto fine = static_cast<long long>(rec.timestamp_s * capture.sample_rate + 0.5);
            for (std::size_t i = 0; i < capture.truth.size(); ++i) {
                if (std::abs(fine - static_cast<long long>(capture.truth[i].start_index)) <= 64) {
                    match = truth_base + i;
                    break;
                }
            }
            out.record_truth.push_back(match);
            out.records.push_back(std::move(rec));
        }
    }
    return out;
}

inline CalibrationMeasurement load_measurement(const std::vector<std::string>& paths)
{
    CalibrationMeasurement meas;
    for (const auto& path : paths) {
        DatasetReader reader(path);
        while (auto rec = reader.next())
            meas.records.push_back(std::move(*rec));
    }
    return meas;
}

inline void write_text(const std::string& path, const std::string& content)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw io_error("cannot open for writing: " + path);
    f << content;
}

} // namespace detail

inline int run(const std::vector<std::string>& args)
{
    CLI::App app{"find: 802.11ac multi-channel receive chain, calibration and DoA toolkit"};
    app.require_subcommand(1);

    // ---- simulate ----------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "synthesize a scenario into a dataset");
    std::string sim_scenario;
    std::string sim_out;
    sim->add_option("--scenario", sim_scenario, "scenario JSON file")->required();
    sim->add_option("--out", sim_out, "output dataset path")->required();

    // ---- process ------------------------------------------------------
    auto* proc = app.add_subcommand("process", "turn a raw capture into a dataset");
    std::string proc_in;
    std::string proc_out;
    std::size_t proc_channels = 4;
    double proc_rate = 80e6;
    double proc_carrier = 2.412e9;
    double proc_spacing = 0.5;
    double proc_threshold = 0.8;
    std::string proc_position = "pos-0";
    std::string proc_environment = "capture";
    proc->add_option("--in", proc_in, "raw capture (interleaved complex float32, channel-major blocks)")
        ->required();
    proc->add_option("--out", proc_out, "output dataset path")->required();
    proc->add_option("--channels", proc_channels, "receive channel count");
    proc->add_option("--sample-rate", proc_rate, "sample rate in Hz");
    proc->add_option("--carrier", proc_carrier, "carrier frequency in Hz");
    proc->add_option("--spacing", proc_spacing, "array spacing in wavelengths");
    proc->add_option("--threshold", proc_threshold, "detection threshold");
    proc->add_option("--position", proc_position, "position label for the records");
    proc->add_option("--environment", proc_environment, "environment label for the header");

    // ---- calibrate ----------------------------------------------------
    auto* cal = app.add_subcommand("calibrate", "estimate a phase-offset profile from a dataset");
    std::string cal_in;
    std::string cal_out;
    std::string cal_environment;
    cal->add_option("--in", cal_in, "calibration dataset")->required();
    cal->add_option("--out", cal_out, "output profile path")->required();
    cal->add_option("--environment", cal_environment, "environment label (default: dataset label)");

    // ---- doa ------------------------------------------------------------
    auto* doa = app.add_subcommand("doa", "estimate DoA for every record of a dataset");
    std::string doa_in;
    std::string doa_out;
    std::string doa_profile;
    std::string doa_spectrum_prefix;
    std::string doa_method = "music";
    std::size_t doa_sources = 1;
    double doa_grid_step = 0.25;
    bool doa_no_fb = false;
    doa->add_option("--in", doa_in, "input dataset")->required();
    doa->add_option("--out", doa_out, "estimates CSV path")->required();
    doa->add_option("--profile", doa_profile, "calibration profile to apply");
    doa->add_option("--spectrum-out", doa_spectrum_prefix, "also write per-record spectrum CSVs");
    doa->add_option("--method", doa_method, "music | bartlett");
    doa->add_option("--n-sources", doa_sources, "assumed source count");
    doa->add_option("--grid-step-deg", doa_grid_step, "scan grid step in degrees");
    doa->add_flag("--no-forward-backward", doa_no_fb, "disable forward-backward averaging");

    // ---- stability ------------------------------------------------------
    auto* stab = app.add_subcommand("stability", "per-position offset stability tables");
    std::vector<std::string> stab_in;
    std::string stab_out;
    std::string stab_environment = "unknown";
    stab->add_option("--in", stab_in, "input datasets (records grouped by position label)")
        ->required()
        ->expected(-1);
    stab->add_option("--out", stab_out, "output prefix for the CSV pair")->required();
    stab->add_option("--environment", stab_environment, "environment label");

    // ---- export -----------------------------------------------------------
    auto* exp = app.add_subcommand("export", "normalized magnitude views of selected records");
    std::string exp_in;
    std::string exp_out;
    std::vector<std::uint64_t> exp_records = {0};
    exp->add_option("--in", exp_in, "input dataset")->required();
    exp->add_option("--out", exp_out, "output prefix")->required();
    exp->add_option("--records", exp_records, "record ids to export");

    // ---- validate -----------------------------------------------------------
    auto* val = app.add_subcommand("validate", "structural audit of a dataset");
    std::string val_in;
    val->add_option("--in", val_in, "dataset to validate")->required();

    // ---- bench ------------------------------------------------------------
    auto* ben = app.add_subcommand("bench", "accuracy / throughput summary for a scenario");
    std::string ben_scenario;
    std::string ben_profile;
    ben->add_option("--scenario", ben_scenario, "scenario JSON (default: built-in sweep)");
    ben->add_option("--profile", ben_profile, "calibration profile applied before DoA");

    try {
        // CLI11's vector overload consumes from the back
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*sim) {
            const auto config = load_scenario(sim_scenario);
            auto processed = detail::run_scenario(config);
            write_dataset(sim_out, processed.header, processed.records);
            std::cout << "seed " << config.seed << "\n";
            std::cout << "frames simulated " << processed.frames_simulated << "\n";
            std::cout << "records written " << processed.records.size() << "\n";
            std::cout << "frames failed " << processed.frames_failed << "\n";
            std::cout << "dataset " << sim_out << "\n";
        } else if (*proc) {
            std::ifstream f(proc_in, std::ios::binary | std::ios::ate);
            if (!f)
                throw io_error("cannot open capture: " + proc_in);
            const auto total_bytes = static_cast<std::uint64_t>(f.tellg());
            f.seekg(0);
            if (proc_channels == 0 || total_bytes % (8ull * proc_channels) != 0)
                throw format_error("capture size is not a whole number of channel-major cf32 blocks");
            const std::size_t n_samples = total_bytes / (8ull * proc_channels);

            MultiChannelCapture capture;
            capture.sample_rate = proc_rate;
            capture.channels.assign(proc_channels, cvec(n_samples));
            std::vector<float> buf(2 * n_samples);
            for (auto& ch : capture.channels) {
                f.read(reinterpret_cast<char*>(buf.data()),
                       static_cast<std::streamsize>(buf.size() * sizeof(float)));
                if (static_cast<std::size_t>(f.gcount()) != buf.size() * sizeof(float))
                    throw truncation_error("capture file shorter than its size promised");
                for (std::size_t i = 0; i < n_samples; ++i)
                    ch[i] = cplx(buf[2 * i], buf[2 * i + 1]);
            }

            ReceiverConfig rx;
            rx.detection_threshold = proc_threshold;
            rx.position_label = proc_position;
            auto result = process_capture(capture, rx);
            const auto geometry = make_ula(proc_channels, proc_carrier, proc_spacing);
            write_dataset(proc_out, detail::header_for(geometry, proc_environment), result.records);
            std::cout << "records written " << result.records.size() << "\n";
            std::cout << "frames failed " << result.frames_failed << "\n";
        } else if (*cal) {
            DatasetReader probe(cal_in);
            const std::string environment =
                !cal_environment.empty() ? cal_environment : probe.header().environment_label;
            const auto meas = detail::load_measurement({cal_in});
            const auto profile = aggregate_profile(meas, environment);
            save_profile(profile, cal_out);
            std::cout << "frames used " << profile.n_frames_used << "\n";
            for (std::size_t m = 0; m < profile.n_channels(); ++m)
                std::cout << "offset ch" << m << " " << detail::fmt(profile.offsets_rad[m])
                          << " rad (circular std " << detail::fmt(profile.circular_std_rad[m])
                          << ")\n";
            std::cout << "profile " << cal_out << "\n";
        } else if (*doa) {
            DatasetReader reader(doa_in);
            const auto& hdr = reader.header();

            CalibrationProfile profile;
            if (!doa_profile.empty()) {
                profile = load_profile(doa_profile);
            } else {
                profile.offsets_rad.assign(hdr.n_channels, 0.0);
                profile.circular_std_rad.assign(hdr.n_channels, 0.0);
                std::cerr << "warning: no calibration profile, using zero offsets\n";
            }

            SteeringModel model;
            model.geometry.carrier_hz = hdr.carrier_hz;
            model.geometry.element_positions = hdr.element_positions;

            DoaConfig config;
            config.n_sources = doa_sources;
            config.forward_backward = !doa_no_fb;
            config.grid_step_rad = deg_to_rad(doa_grid_step);
            if (doa_method == "music")
                config.method = DoaMethod::music;
            else if (doa_method == "bartlett")
                config.method = DoaMethod::bartlett;
            else
                throw config_error("unknown method '" + doa_method + "'");

            std::ofstream out(doa_out, std::ios::binary | std::ios::trunc);
            if (!out)
                throw io_error("cannot open for writing: " + doa_out);
            out << "frame_id,azimuth_deg,peak_value,method\n";

            const auto grid =
                make_angle_grid(config.grid_start_rad, config.grid_stop_rad, config.grid_step_rad);
            std::size_t incomplete = 0;
            while (auto rec = reader.next()) {
                const auto calibrated = apply_profile(rec->csi, profile);
                const auto r = spatial_covariance(calibrated, {config.forward_backward});
                const auto spectrum = config.method == DoaMethod::music
                                          ? music_spectrum(r, model, config.n_sources, grid)
                                          : bartlett_spectrum(r, model, grid);
                const auto peaks = pick_peaks(spectrum, config.n_sources);
                incomplete += peaks.size() < config.n_sources ? 1 : 0;
                for (const auto& p : peaks)
                    out << rec->id << ',' << detail::fmt(rad_to_deg(p.azimuth_rad)) << ','
                        << detail::fmt(p.value) << ',' << spectrum.method << "\n";
                if (!doa_spectrum_prefix.empty()) {
                    std::ostringstream ss;
                    ss << "angle_deg,value\n";
                    for (std::size_t i = 0; i < spectrum.angles_rad.size(); ++i)
                        ss << detail::fmt(rad_to_deg(spectrum.angles_rad[i])) << ','
                           << detail::fmt(spectrum.values[i]) << "\n";
                    detail::write_text(doa_spectrum_prefix + "record" + std::to_string(rec->id) +
                                           ".csv",
                                       ss.str());
                }
            }
            if (incomplete)
                std::cerr << "warning: " << incomplete << " records had fewer peaks than sources\n";
            std::cout << "records " << reader.records_read() << "\n";
            std::cout << "estimates " << doa_out << "\n";
        } else if (*stab) {
            const auto meas = detail::load_measurement(stab_in);
            const auto report = stability_report(meas, stab_environment);
            detail::write_text(stab_out + "positions.csv", stability_positions_csv(report));
            detail::write_text(stab_out + "summary.csv", stability_summary_csv(report));
            for (std::size_t m = 0; m < report.cross_position_std_rad.size(); ++m)
                std::cout << "cross-position std ch" << m << " "
                          << detail::fmt(report.cross_position_std_rad[m]) << " rad\n";
        } else if (*exp) {
            const auto result = export_views(exp_in, exp_records, exp_out);
            for (const auto& w : result.warnings)
                std::cerr << "warning: " << w << "\n";
            for (const auto& file : result.files)
                std::cout << file << "\n";
        } else if (*val) {
            const auto report = validate_dataset(val_in);
            std::cout << "declared records " << report.declared_records << "\n";
            std::cout << "records read " << report.records_read << "\n";
            std::cout << "violations " << report.violations.size() << "\n";
            for (const auto& v : report.violations)
                std::cout << "violation record " << v.record_index << ": " << v.message << "\n";
            if (report.records_read > 0)
                std::cout << "snr range [" << detail::fmt(report.snr_min_db) << ", "
                          << detail::fmt(report.snr_max_db) << "] dB\n";
            std::size_t bins = 0;
            for (auto c : report.angle_histogram_5deg)
                bins += c > 0 ? 1 : 0;
            std::cout << "angle bins covered " << bins << "/36\n";
            std::cout << "untracked records " << report.untracked_records << "\n";
            if (!report.clean())
                return 1;
        } else if (*ben) {
            ScenarioConfig config;
            if (!ben_scenario.empty()) {
                config = load_scenario(ben_scenario);
            } else {
                nlohmann::json j = {{"seed", 1},
                                    {"frames", 4},
                                    {"snr_db", 20.0},
                                    {"sweep", {{"start_deg", -60.0}, {"stop_deg", 60.0}, {"step_deg", 5.0}}}};
                config = parse_scenario(j);
            }

            const auto t0 = std::chrono::steady_clock::now();
            auto processed = detail::run_scenario(config);

            SteeringModel model;
            model.geometry = config.geometry();
            DoaConfig doa_config;

            double sq_err = 0.0;
            double max_err = 0.0;
            std::size_t with_truth = 0;
            double max_cfo_err = 0.0;
            double max_timing_err = 0.0;
            double snr_acc = 0.0;
            std::size_t snr_count = 0;

            CalibrationProfile profile;
            if (!ben_profile.empty()) {
                profile = load_profile(ben_profile);
            } else {
                profile.offsets_rad.assign(config.n_channels, 0.0);
                profile.circular_std_rad.assign(config.n_channels, 0.0);
            }

            for (std::size_t i = 0; i < processed.records.size(); ++i) {
                const auto& rec = processed.records[i];
                const auto est = estimate_doa(rec, profile, model, doa_config);
                const std::size_t ti = processed.record_truth[i];
                if (ti != static_cast<std::size_t>(-1) && !est.peaks.empty()) {
                    const auto& truth = processed.truth[ti];
                    if (truth.azimuth_rad) {
                        const double err =
                            rad_to_deg(std::abs(est.peaks.front().azimuth_rad - *truth.azimuth_rad));
                        sq_err += err * err;
                        max_err = std::max(max_err, err);
                        ++with_truth;
                    }
                    max_cfo_err = std::max(max_cfo_err, std::abs(rec.cfo_hz - truth.cfo_hz));
                    const double t_err =
                        std::abs(rec.timestamp_s * 80e6 - static_cast<double>(truth.start_index));
                    max_timing_err = std::max(max_timing_err, t_err);
                }
                for (float v : rec.snr_db) {
                    snr_acc += v;
                    ++snr_count;
                }
            }
            const auto t1 = std::chrono::steady_clock::now();
            const double elapsed = std::chrono::duration<double>(t1 - t0).count();

            std::cout << "seed " << config.seed << "\n";
            std::cout << "frames simulated " << processed.frames_simulated << "\n";
            std::cout << "frames detected " << processed.frames_detected << "\n";
            std::cout << "frames failed " << processed.frames_failed << "\n";
            std::cout << "records " << processed.records.size() << "\n";
            if (with_truth > 0)
                std::cout << "doa rms error deg "
                          << detail::fmt(std::sqrt(sq_err / static_cast<double>(with_truth)))
                          << "\n"
                          << "doa max error deg " << detail::fmt(max_err) << "\n";
            std::cout << "max timing error samples " << detail::fmt(max_timing_err) << "\n";
            std::cout << "max cfo error hz " << detail::fmt(max_cfo_err) << "\n";
            if (snr_count > 0)
                std::cout << "snr mean db "
                          << detail::fmt(snr_acc / static_cast<double>(snr_count)) << "\n";
            std::cout << "elapsed s " << detail::fmt(elapsed) << "\n";
            std::cout << "frames per s "
                      << detail::fmt(static_cast<double>(processed.records.size()) /
                                     std::max(elapsed, 1e-9))
                      << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace find::cli
