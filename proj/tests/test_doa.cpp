#include <catch2/catch.hpp>

#include "find/doa.hpp"
#include "find/receiver.hpp"
#include "find/simulate.hpp"

using namespace find;

namespace {

SteeringModel default_model() { return {make_ula(4), 0.0}; }

CsiMatrix csi_for(const ChannelModel& ch)
{
    return analytic_csi(ch, make_ula(4), {});
}

CalibrationProfile zero_profile(std::size_t n = 4)
{
    CalibrationProfile p;
    p.offsets_rad.assign(n, 0.0);
    p.circular_std_rad.assign(n, 0.0);
    return p;
}

FrameRecord simulated_record(const ChannelModel& ch, std::optional<double> snr_db,
                             const std::vector<double>& offsets, std::uint64_t seed)
{
    SimulationScenario s;
    s.impairments.phase_offsets_rad = offsets;
    s.impairments.snr_db = snr_db;
    s.impairments.start_offset = 500;
    s.frame_channels.assign(1, ch);
    s.seed = seed;
    auto result = process_capture(simulate_capture(s), {});
    REQUIRE(result.records.size() == 1);
    return std::move(result.records.front());
}

} // namespace

TEST_CASE("steering vector at broadside is all ones")
{
    const auto a = steering_vector(default_model(), 0.0);
    REQUIRE(a.size() == 4);
    for (const auto& v : a)
        REQUIRE(std::abs(v - cplx(1.0, 0.0)) < 1e-12);
}

TEST_CASE("steering vector at 30 degrees is (1, -j, -1, +j)")
{
    const auto a = steering_vector(default_model(), deg_to_rad(30.0));
    const cplx expected[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
    for (std::size_t m = 0; m < 4; ++m)
        REQUIRE(std::abs(a[m] - expected[m]) < 1e-9);
}

TEST_CASE("steering entries are unit modulus across the range")
{
    for (double deg = -90.0; deg <= 90.0; deg += 7.5)
        for (const auto& v : steering_vector(default_model(), deg_to_rad(deg)))
            REQUIRE(std::abs(v) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("steering rejects out-of-range azimuths")
{
    REQUIRE_THROWS_AS(steering_vector(default_model(), 2.0), std::domain_error);
}

TEST_CASE("all-ones CSI gives the rank-one all-ones covariance")
{
    CsiMatrix csi(4);
    for (auto& v : csi.values)
        v = {1.0, 0.0};
    const auto r = spatial_covariance(csi);
    for (Eigen::Index i = 0; i < 4; ++i)
        for (Eigen::Index j = 0; j < 4; ++j)
            REQUIRE(std::abs(r(i, j) - cplx(1.0, 0.0)) < 1e-12);
}

TEST_CASE("trace equals the mean per-subcarrier power")
{
    const auto csi = csi_for({{{0.0, {1.0, 0.0}, 0.3}, {200e-9, {0.4, 0.1}, -0.7}}});
    const auto r = spatial_covariance(csi);
    double expected = 0.0;
    for (std::size_t k = 0; k < CsiMatrix::n_subcarriers; ++k)
        for (std::size_t m = 0; m < 4; ++m)
            expected += std::norm(csi.at(k, m));
    expected /= static_cast<double>(CsiMatrix::n_subcarriers);
    REQUIRE(std::real(r.trace()) == Approx(expected).epsilon(1e-12));
}

TEST_CASE("covariance is Hermitian positive semidefinite")
{
    const auto csi = csi_for({{{0.0, {1.0, 0.0}, 0.5}, {100e-9, {0.7, -0.3}, -0.2}}});
    for (bool fb : {false, true}) {
        const auto r = spatial_covariance(csi, {fb});
        REQUIRE((r - r.adjoint()).norm() < 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(r);
        REQUIRE(eig.eigenvalues().minCoeff() >= -1e-9 * eig.eigenvalues().maxCoeff());
    }
}

TEST_CASE("two delay-distinct paths give a numerically rank-2 covariance")
{
    ChannelModel ch;
    ch.paths = {{0.0, {1.0, 0.0}, 0.0}, {300e-9, {1.0, 0.0}, deg_to_rad(40.0)}};
    const auto r = spatial_covariance(csi_for(ch));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(r);
    const auto ev = eig.eigenvalues(); // ascending
    REQUIRE(ev(3) > 1e-3);
    REQUIRE(ev(2) > 1e-3);      // second source present
    REQUIRE(ev(1) < 1e-9 * ev(3)); // third eigenvalue collapses
}

TEST_CASE("bartlett peaks at the path azimuth and is flat for identity R")
{
    const auto grid = make_angle_grid();
    const auto sp = bartlett_spectrum(spatial_covariance(csi_for(ChannelModel::single_path(deg_to_rad(20.0)))),
                                      default_model(), grid);
    const auto it = std::max_element(sp.values.begin(), sp.values.end());
    const double peak_deg = rad_to_deg(sp.angles_rad[static_cast<std::size_t>(it - sp.values.begin())]);
    REQUIRE(peak_deg == Approx(20.0).margin(0.25 + 1e-9));
    for (double v : sp.values)
        REQUIRE(v >= 0.0);

    const auto flat = bartlett_spectrum(Eigen::MatrixXcd::Identity(4, 4), default_model(), grid);
    for (double v : flat.values)
        REQUIRE(v == Approx(0.25).epsilon(1e-12));
}

TEST_CASE("music locates a single noisy path within a degree")
{
    const auto rec = simulated_record(ChannelModel::single_path(deg_to_rad(20.0)), 20.0,
                                      {0, 0, 0, 0}, 31);
    const auto est = estimate_doa(rec, zero_profile(), default_model(), {});
    REQUIRE(est.peaks.size() == 1);
    REQUIRE(rad_to_deg(est.peaks.front().azimuth_rad) == Approx(20.0).margin(1.0));
}

TEST_CASE("music spectrum is invariant under a global phase")
{
    const auto csi = csi_for(ChannelModel::single_path(deg_to_rad(-33.0)));
    CsiMatrix rotated = csi;
    for (auto& v : rotated.values)
        v *= std::polar(1.0, 1.234);
    const auto grid = make_angle_grid();
    const auto a = music_spectrum(spatial_covariance(csi), default_model(), 1, grid);
    const auto b = music_spectrum(spatial_covariance(rotated), default_model(), 1, grid);
    for (std::size_t i = 0; i < a.values.size(); ++i)
        REQUIRE(b.values[i] == Approx(a.values[i]).epsilon(1e-9));
}

TEST_CASE("music rejects a full signal subspace")
{
    const auto r = spatial_covariance(csi_for(ChannelModel::single_path(0.0)));
    REQUIRE_THROWS_AS(music_spectrum(r, default_model(), 4, make_angle_grid()), config_error);
    REQUIRE_THROWS_AS(music_spectrum(r, default_model(), 0, make_angle_grid()), config_error);
}

TEST_CASE("music and bartlett agree on clean single-path data")
{
    const auto r = spatial_covariance(csi_for(ChannelModel::single_path(deg_to_rad(-47.0))));
    const auto grid = make_angle_grid();
    const auto mu = music_spectrum(r, default_model(), 1, grid);
    const auto ba = bartlett_spectrum(r, default_model(), grid);
    const auto i_mu = std::max_element(mu.values.begin(), mu.values.end()) - mu.values.begin();
    const auto i_ba = std::max_element(ba.values.begin(), ba.values.end()) - ba.values.begin();
    REQUIRE(std::abs(i_mu - i_ba) <= 1);
}

TEST_CASE("refined noiseless estimate is within 0.05 degrees")
{
    const auto rec = simulated_record(ChannelModel::single_path(0.0), std::nullopt, {0, 0, 0, 0}, 32);
    const auto est = estimate_doa(rec, zero_profile(), default_model(), {});
    REQUIRE(est.peaks.size() == 1);
    REQUIRE(std::abs(rad_to_deg(est.peaks.front().azimuth_rad)) < 0.05);
    REQUIRE_FALSE(est.incomplete);
}

TEST_CASE("two coherent paths resolve with forward-backward smoothing")
{
    ChannelModel ch;
    ch.paths = {{0.0, {1.0, 0.0}, 0.0}, {200e-9, {0.9, 0.0}, deg_to_rad(40.0)}};
    const auto rec = simulated_record(ch, std::nullopt, {0, 0, 0, 0}, 33);
    DoaConfig cfg;
    cfg.n_sources = 2;
    const auto est = estimate_doa(rec, zero_profile(), default_model(), cfg);
    REQUIRE(est.peaks.size() == 2);
    std::vector<double> found = {rad_to_deg(est.peaks[0].azimuth_rad),
                                 rad_to_deg(est.peaks[1].azimuth_rad)};
    std::sort(found.begin(), found.end());
    REQUIRE(found[0] == Approx(0.0).margin(2.0));
    REQUIRE(found[1] == Approx(40.0).margin(2.0));
}

TEST_CASE("estimate is invariant under scaling the CSI")
{
    auto rec = simulated_record(ChannelModel::single_path(deg_to_rad(12.0)), 25.0, {0, 0, 0, 0}, 34);
    const auto base = estimate_doa(rec, zero_profile(), default_model(), {});
    for (auto& v : rec.csi.values)
        v *= cplx(-4.2, 0.7);
    const auto scaled = estimate_doa(rec, zero_profile(), default_model(), {});
    REQUIRE(scaled.peaks.front().azimuth_rad ==
            Approx(base.peaks.front().azimuth_rad).margin(1e-12));
}

TEST_CASE("uncalibrated offsets wreck the estimate and the profile restores it")
{
    const std::vector<double> offsets = {0.0, 0.7, -1.2, 2.1};
    const double truth_deg = 10.0;
    const auto rec = simulated_record(ChannelModel::single_path(deg_to_rad(truth_deg)), 20.0,
                                      offsets, 35);

    const auto raw = estimate_doa(rec, zero_profile(), default_model(), {});
    const double raw_err = std::abs(rad_to_deg(raw.peaks.front().azimuth_rad) - truth_deg);

    CalibrationProfile prof = zero_profile();
    prof.offsets_rad = offsets;
    const auto fixed = estimate_doa(rec, prof, default_model(), {});
    const double fixed_err = std::abs(rad_to_deg(fixed.peaks.front().azimuth_rad) - truth_deg);

    REQUIRE(raw_err > 5.0);
    REQUIRE(fixed_err < 0.5);
    REQUIRE(fixed_err < raw_err);
}
