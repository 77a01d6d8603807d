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
// Direction of arrival from calibrated CSI: subcarriers act as frequency
// snapshots for the spatial covariance (with optional forward-backward
// averaging against coherent multipath), scanned by Bartlett or MUSIC over
// a steering grid evaluated at the carrier.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "find/calib.hpp"
#include "find/common.hpp"
#include "find/errors.hpp"
#include "find/geometry.hpp"
#include "find/record.hpp"

namespace find {

struct SteeringModel {
    ArrayGeometry geometry;
    double frequency_hz = 0.0; // 0 = evaluate at the carrier

    double evaluation_frequency() const
    {
        return frequency_hz > 0.0 ? frequency_hz : geometry.carrier_hz;
    }
};

// a_m(theta), unit modulus, same convention as the channel simulator.
inline cvec steering_vector(const SteeringModel& model, double azimuth_rad)
{
    if (azimuth_rad < -pi / 2.0 || azimuth_rad > pi / 2.0)
        throw std::domain_error("steering_vector: azimuth outside [-pi/2, pi/2]");
    return steering_phases(model.geometry, azimuth_rad, model.evaluation_frequency());
}

struct CovarianceOptions {
    bool forward_backward = false;
};

// R = (1/242) sum_k x_k x_k^H with x_k the per-subcarrier channel vector.
// Forward-backward averaging: R <- (R + J conj(R) J) / 2.
inline Eigen::MatrixXcd spatial_covariance(const CsiMatrix& csi, CovarianceOptions options = {})
{
    if (!csi.well_formed())
        throw config_error("spatial_covariance: malformed CSI");
    const auto n = static_cast<Eigen::Index>(csi.n_channels);

    Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(n, n);
    Eigen::VectorXcd x(n);
    for (std::size_t k = 0; k < CsiMatrix::n_subcarriers; ++k) {
        for (Eigen::Index m = 0; m < n; ++m)
            x(m) = csi.at(k, static_cast<std::size_t>(m));
        r.noalias() += x * x.adjoint();
    }
    r /= static_cast<double>(CsiMatrix::n_subcarriers);

    if (options.forward_backward) {
        Eigen::MatrixXcd rb(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                rb(i, j) = std::conj(r(n - 1 - i, n - 1 - j));
        r = 0.5 * (r + rb);
    }
    return r;
}

struct SpatialSpectrum {
    std::vector<double> angles_rad;
    std::vector<double> values; // nonnegative
    std::string method;         // "bartlett" | "music"
};

inline std::vector<double> make_angle_grid(double start_rad = -pi / 2.0, double stop_rad = pi / 2.0,
                                           double step_rad = deg_to_rad(0.25))
{
    if (step_rad <= 0.0 || stop_rad < start_rad)
        throw config_error("angle grid: bad range");
    std::vector<double> grid;
    const auto count = static_cast<std::size_t>(std::floor((stop_rad - start_rad) / step_rad + 1e-9)) + 1;
    grid.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        grid.push_back(start_rad + static_cast<double>(i) * step_rad);
    return grid;
}

// P(theta) = a^H R a / n^2.
inline SpatialSpectrum bartlett_spectrum(const Eigen::MatrixXcd& r, const SteeringModel& model,
                                         const std::vector<double>& grid)
{
    const auto n = r.rows();
    SpatialSpectrum sp;
    sp.method = "bartlett";
    sp.angles_rad = grid;
    sp.values.reserve(grid.size());
    Eigen::VectorXcd a(n);
    for (double theta : grid) {
        const cvec av = steering_vector(model, theta);
        for (Eigen::Index m = 0; m < n; ++m)
            a(m) = av[static_cast<std::size_t>(m)];
        const double p = std::real(cplx(a.dot(r * a))) / static_cast<double>(n * n);
        sp.values.push_back(std::max(p, 0.0));
    }
    return sp;
}

// MUSIC pseudospectrum P(theta) = 1 / ||E_n^H a(theta)||^2 with E_n the
// eigenvectors of the n - n_sources smallest eigenvalues of R.
inline SpatialSpectrum music_spectrum(const Eigen::MatrixXcd& r, const SteeringModel& model,
                                      std::size_t n_sources, const std::vector<double>& grid)
{
    const auto n = r.rows();
    if (n_sources < 1 || n_sources >= static_cast<std::size_t>(n))
        throw config_error("music_spectrum: need 1 <= n_sources < n_channels");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (r + r.adjoint()));
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("music_spectrum: eigendecomposition failed");
    // eigenvalues ascending: the leading columns span the noise subspace
    const Eigen::MatrixXcd noise =
        eig.eigenvectors().leftCols(n - static_cast<Eigen::Index>(n_sources));

    SpatialSpectrum sp;
    sp.method = "music";
    sp.angles_rad = grid;
    sp.values.reserve(grid.size());
    Eigen::VectorXcd a(n);
    for (double theta : grid) {
        const cvec av = steering_vector(model, theta);
        for (Eigen::Index m = 0; m < n; ++m)
            a(m) = av[static_cast<std::size_t>(m)];
        const double d = (noise.adjoint() * a).squaredNorm();
        sp.values.push_back(d > 1e-18 ? 1.0 / d : 1e18);
    }
    return sp;
}

struct DoaPeak {
    double azimuth_rad = 0.0;
    double value = 0.0;
};

struct DoaEstimate {
    std::vector<DoaPeak> peaks; // sorted by value, descending
    std::size_t n_sources_assumed = 1;
    bool incomplete = false; // fewer spectrum peaks than requested sources
};

enum class DoaMethod { music, bartlett };

struct DoaConfig {
    DoaMethod method = DoaMethod::music;
    double grid_start_rad = -pi / 2.0;
    double grid_stop_rad = pi / 2.0;
    double grid_step_rad = deg_to_rad(0.25);
    std::size_t n_sources = 1;
    bool forward_backward = true;
};

// Local maxima of the spectrum refined by 3-point parabolic interpolation on
// the log spectrum, strongest first.
inline std::vector<DoaPeak> pick_peaks(const SpatialSpectrum& sp, std::size_t max_peaks)
{
    std::vector<std::size_t> maxima;
    const auto& v = sp.values;
    if (v.size() < 2)
        return {};
    for (std::size_t i = 0; i < v.size(); ++i) {
        const bool left_ok = i == 0 || v[i] >= v[i - 1];
        const bool right_ok = i + 1 == v.size() || v[i] > v[i + 1];
        if (left_ok && right_ok)
            maxima.push_back(i);
    }
    std::sort(maxima.begin(), maxima.end(),
              [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
    if (maxima.size() > max_peaks)
        maxima.resize(max_peaks);

    std::vector<DoaPeak> peaks;
    for (std::size_t i : maxima) {
        DoaPeak p;
        p.value = v[i];
        p.azimuth_rad = sp.angles_rad[i];
        if (i > 0 && i + 1 < v.size() && v[i - 1] > 0.0 && v[i + 1] > 0.0 && v[i] > 0.0) {
            const double l = std::log(v[i - 1]);
            const double c = std::log(v[i]);
            const double r = std::log(v[i + 1]);
            const double denom = l - 2.0 * c + r;
            if (denom < 0.0) {
                const double delta = 0.5 * (l - r) / denom;
                const double step = sp.angles_rad[i + 1] - sp.angles_rad[i];
                p.azimuth_rad += std::clamp(delta, -0.5, 0.5) * step;
            }
        }
        peaks.push_back(p);
    }
    return peaks;
}

inline DoaEstimate estimate_doa_from_covariance(const Eigen::MatrixXcd& r,
                                                const SteeringModel& model, const DoaConfig& config)
{
    const auto grid = make_angle_grid(config.grid_start_rad, config.grid_stop_rad, config.grid_step_rad);
    const SpatialSpectrum sp = config.method == DoaMethod::music
                                   ? music_spectrum(r, model, config.n_sources, grid)
                                   : bartlett_spectrum(r, model, grid);
    DoaEstimate est;
    est.n_sources_assumed = config.n_sources;
    est.peaks = pick_peaks(sp, config.n_sources);
    est.incomplete = est.peaks.size() < config.n_sources;
    return est;
}

// apply_profile -> spatial_covariance -> spectrum -> peak picking.
inline DoaEstimate estimate_doa(const FrameRecord& record, const CalibrationProfile& profile,
                                const SteeringModel& model, const DoaConfig& config = {})
{
    const CsiMatrix calibrated = apply_profile(record.csi, profile);
    const Eigen::MatrixXcd r = spatial_covariance(calibrated, {config.forward_backward});
    return estimate_doa_from_covariance(r, model, config);
}

} // namespace find
