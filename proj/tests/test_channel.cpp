#include <catch2/catch.hpp>

#include "find/channel.hpp"
#include "find/preamble.hpp"
#include "find/simulate.hpp"
#include "oracles.hpp"

using namespace find;

namespace {

cvec tone(double freq_hz, double fs, std::size_t n)
{
    cvec x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = std::polar(1.0, two_pi * freq_hz * static_cast<double>(i) / fs);
    return x;
}

} // namespace

TEST_CASE("broadside single path leaves all channels identical")
{
    Rng rng(11);
    const cvec sig = oracle::random_signal(512, rng);
    const auto cap = apply_channel(sig, 80e6, ChannelModel::single_path(0.0), make_ula(4));
    for (std::size_t m = 1; m < 4; ++m)
        REQUIRE(cap.channels[m] == cap.channels[0]);
}

TEST_CASE("unit-gain zero-delay broadside path is the identity on channel 0")
{
    Rng rng(12);
    const cvec sig = oracle::random_signal(777, rng);
    const auto cap = apply_channel(sig, 80e6, ChannelModel::single_path(0.0), make_ula(4));
    REQUIRE(oracle::max_abs_diff(cap.channels[0], sig) == 0.0);
}

TEST_CASE("30 degrees on a half-wavelength ULA steps the phase by -pi/2")
{
    const double fs = 80e6;
    const auto geom = make_ula(4);
    const cvec sig = tone(1e6, fs, 4096);
    const auto cap = apply_channel(sig, fs, ChannelModel::single_path(deg_to_rad(30.0)), geom);
    for (std::size_t m = 0; m < 4; ++m) {
        // phase of channel m relative to channel 0, measured mid-signal
        const cplx ratio = cap.channels[m][2048] / cap.channels[0][2048];
        const double expected = -pi * 0.5 * static_cast<double>(m);
        REQUIRE(std::abs(ratio - std::polar(1.0, expected)) < 1e-9);
    }
}

TEST_CASE("two paths superpose linearly")
{
    Rng rng(13);
    const cvec sig = oracle::random_signal(1024, rng);
    const auto geom = make_ula(4);
    const double fs = 80e6;

    ChannelModel p1 = ChannelModel::single_path(deg_to_rad(10.0), 100e-9, cplx(0.8, 0.1));
    ChannelModel p2 = ChannelModel::single_path(deg_to_rad(-35.0), 337.5e-9, cplx(-0.3, 0.6));
    ChannelModel both;
    both.paths = {p1.paths[0], p2.paths[0]};

    const auto a = apply_channel(sig, fs, p1, geom);
    const auto b = apply_channel(sig, fs, p2, geom);
    const auto ab = apply_channel(sig, fs, both, geom);

    for (std::size_t m = 0; m < 4; ++m) {
        for (std::size_t n = 0; n < ab.channels[m].size(); ++n) {
            const cplx va = n < a.channels[m].size() ? a.channels[m][n] : cplx(0, 0);
            const cplx vb = n < b.channels[m].size() ? b.channels[m][n] : cplx(0, 0);
            REQUIRE(std::abs(ab.channels[m][n] - (va + vb)) < 1e-12);
        }
    }
}

TEST_CASE("shift path and frequency-domain path agree on integer delays")
{
    Rng rng(14);
    const cvec sig = oracle::random_signal(500, rng);
    const auto geom = make_ula(4);
    const auto direct = apply_channel(sig, 80e6, ChannelModel::single_path(0.2, 50e-9), geom);

    // A zero-gain fractional companion path defeats the integer fast path
    // without changing the channel, so the same delay runs through the
    // phase-ramp implementation.
    ChannelModel forced = ChannelModel::single_path(0.2, 50e-9);
    forced.paths.push_back({13.7e-9, {0.0, 0.0}, 0.0});
    const auto via_fft = apply_channel(sig, 80e6, forced, geom);
    for (std::size_t m = 0; m < 4; ++m) {
        REQUIRE(via_fft.channels[m].size() >= direct.channels[m].size());
        for (std::size_t n = 0; n < direct.channels[m].size(); ++n)
            REQUIRE(std::abs(via_fft.channels[m][n] - direct.channels[m][n]) < 1e-12);
    }
}

TEST_CASE("frequency response matches a measured probe")
{
    // Push one OFDM symbol through the channel and compare the per-subcarrier
    // response against channel_frequency_response.
    const OfdmNumerology num;
    const auto geom = make_ula(4);
    ChannelModel ch;
    ch.paths = {{0.0, {1.0, 0.0}, deg_to_rad(20.0)}, {100e-9, {0.4, -0.2}, deg_to_rad(-40.0)}};

    // probe: random tones on the used subcarriers, cyclic prefix keeps the
    // delayed copies inside the analysis window
    Rng rng(15);
    cvec tones(num.fft_size, cplx(0, 0));
    const auto used = num.used_subcarriers();
    for (int k : used)
        tones[detail::fft_bin(k, num.fft_size)] = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    cvec core = fft::inverse(tones);
    cvec symbol;
    for (std::size_t i = num.fft_size - 64; i < num.fft_size; ++i)
        symbol.push_back(core[i]);
    symbol.insert(symbol.end(), core.begin(), core.end());

    const auto cap = apply_channel(symbol, num.sample_rate, ch, geom);
    for (std::size_t m = 0; m < 4; ++m) {
        cvec rx(cap.channels[m].begin() + 64, cap.channels[m].begin() + 64 + 256);
        const cvec spectrum = fft::forward(rx);
        for (std::size_t i = 0; i < used.size(); ++i) {
            const cplx tx = tones[detail::fft_bin(used[i], num.fft_size)];
            const cplx h_meas = spectrum[detail::fft_bin(used[i], num.fft_size)] / tx;
            const cplx h_ref =
                channel_frequency_response(ch, geom, num.subcarrier_frequency(used[i]), m);
            REQUIRE(std::abs(h_meas - h_ref) < 1e-9);
        }
    }
}

TEST_CASE("steering convention matches the channel simulator exactly")
{
    const auto geom = make_ula(4);
    for (double deg : {-72.0, -30.0, 0.0, 12.5, 45.0, 89.0}) {
        const double az = deg_to_rad(deg);
        const auto phases = steering_phases(geom, az, geom.carrier_hz);
        const cplx h = channel_frequency_response(ChannelModel::single_path(az), geom, 0.0, 3);
        REQUIRE(std::abs(h - phases[3]) < 1e-12);
    }
}

TEST_CASE("configuration errors")
{
    cvec sig(16, cplx(1.0, 0.0));
    ChannelModel empty;
    REQUIRE_THROWS_AS(apply_channel(sig, 80e6, empty, make_ula(4)), config_error);
    REQUIRE_THROWS_AS(apply_channel({}, 80e6, ChannelModel::single_path(0.0), make_ula(4)),
                      config_error);
    REQUIRE_THROWS_AS(apply_channel(sig, 80e6, ChannelModel::single_path(0.0, 5e-6), make_ula(4)),
                      config_error);
    REQUIRE_THROWS_AS(apply_channel(sig, 80e6, ChannelModel::single_path(pi), make_ula(4)),
                      config_error);
}
