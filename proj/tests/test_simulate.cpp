#include <catch2/catch.hpp>

#include "find/simulate.hpp"

using namespace find;

TEST_CASE("zero frames yields an empty capture and truth list")
{
    SimulationScenario s;
    s.impairments.phase_offsets_rad = {0, 0, 0, 0};
    const auto cap = simulate_capture(s);
    REQUIRE(cap.n_samples() == 0);
    REQUIRE(cap.truth.empty());
}

TEST_CASE("truth start indices are spaced by frame length plus gap")
{
    SimulationScenario s;
    s.impairments.phase_offsets_rad = {0, 0, 0, 0};
    s.gap_samples = 10000;
    s.frame_channels.assign(10, ChannelModel::single_path(0.0));
    const auto cap = simulate_capture(s);
    REQUIRE(cap.truth.size() == 10);
    for (std::size_t i = 0; i + 1 < cap.truth.size(); ++i)
        REQUIRE(cap.truth[i + 1].start_index - cap.truth[i].start_index == 3200 + 10000);
}

TEST_CASE("angle sweep produces matching truth azimuths")
{
    SimulationScenario s;
    s.impairments.phase_offsets_rad = {0, 0, 0, 0};
    s.frame_channels = sweep_channels(ChannelModel::single_path(0.0), -60.0, 60.0, 5.0);
    REQUIRE(s.frame_channels.size() == 25);
    const auto cap = simulate_capture(s);
    REQUIRE(cap.truth.size() == 25);
    for (std::size_t i = 0; i < 25; ++i) {
        const double expected = -60.0 + 5.0 * static_cast<double>(i);
        REQUIRE(rad_to_deg(*cap.truth[i].azimuth_rad) == Approx(expected).margin(1e-9));
    }
}

TEST_CASE("identical seeds give identical captures")
{
    SimulationScenario s;
    s.impairments.phase_offsets_rad = {0, 0, 0, 0};
    s.impairments.snr_db = 10.0;
    s.seed = 99;
    s.frame_channels.assign(3, ChannelModel::single_path(0.2));
    const auto a = simulate_capture(s);
    const auto b = simulate_capture(s);
    REQUIRE(a.channels == b.channels);
}

TEST_CASE("analytic CSI oracle is flat for the trivial channel")
{
    const auto csi = analytic_csi(ChannelModel::single_path(0.0), make_ula(4), {});
    for (std::size_t k = 0; k < CsiMatrix::n_subcarriers; ++k)
        for (std::size_t m = 0; m < 4; ++m)
            REQUIRE(std::abs(csi.at(k, m) - cplx(1.0, 0.0)) < 1e-12);
}
