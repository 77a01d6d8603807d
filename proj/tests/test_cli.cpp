#include <catch2/catch.hpp>

#include <filesystem>
#include <fstream>

#include "find/cli.hpp"
#include "find/scenario_config.hpp"

using namespace find;
namespace fs = std::filesystem;

namespace {

fs::path work_dir()
{
    const auto dir = fs::temp_directory_path() / "find_cli_tests";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& data)
{
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f.write(data.data(), static_cast<std::streamsize>(data.size()));
}

const char* sweep_scenario = R"json({
  "seed": 13,
  "frames": 1,
  "snr_db": 25.0,
  "start_offset": 600,
  "gap_samples": 1500,
  "sweep": {"start_deg": -20, "stop_deg": 20, "step_deg": 10},
  "environment_label": "clitest"
})json";

} // namespace

TEST_CASE("unknown scenario keys are rejected")
{
    auto j = nlohmann::json::parse(R"({"seed": 1, "framez": 10})");
    REQUIRE_THROWS_AS(parse_scenario(j), config_error);
    auto nested = nlohmann::json::parse(R"({"seed": 1, "sweep": {"start": -60}})");
    REQUIRE_THROWS_AS(parse_scenario(nested), config_error);
    auto path_typo = nlohmann::json::parse(R"({"seed": 1, "paths": [{"azimuth": 5}]})");
    REQUIRE_THROWS_AS(parse_scenario(path_typo), config_error);
}

TEST_CASE("seed is mandatory")
{
    auto j = nlohmann::json::parse(R"({"frames": 10})");
    REQUIRE_THROWS_AS(parse_scenario(j), config_error);
}

TEST_CASE("scenario jobs are deterministic, including random paths")
{
    auto j = nlohmann::json::parse(R"({
      "seed": 5,
      "frames": 2,
      "positions": [
        {"label": "a", "random_paths": {"count": 5}},
        {"label": "b", "random_paths": {"count": 5}}
      ]
    })");
    const auto c = parse_scenario(j);
    const auto jobs1 = scenario_jobs(c);
    const auto jobs2 = scenario_jobs(c);
    REQUIRE(jobs1.size() == 2);
    for (std::size_t i = 0; i < jobs1.size(); ++i) {
        REQUIRE(jobs1[i].scenario.seed == jobs2[i].scenario.seed);
        REQUIRE(jobs1[i].scenario.frame_channels.size() == 2);
        for (std::size_t f = 0; f < 2; ++f) {
            const auto& p1 = jobs1[i].scenario.frame_channels[f].paths;
            const auto& p2 = jobs2[i].scenario.frame_channels[f].paths;
            REQUIRE(p1.size() == 5);
            for (std::size_t k = 0; k < p1.size(); ++k) {
                REQUIRE(p1[k].delay_s == p2[k].delay_s);
                REQUIRE(p1[k].gain == p2[k].gain);
                REQUIRE(p1[k].azimuth_rad == p2[k].azimuth_rad);
            }
        }
    }
    // different positions draw different channels
    REQUIRE(jobs1[0].scenario.frame_channels[0].paths[0].delay_s !=
            jobs1[1].scenario.frame_channels[0].paths[0].delay_s);
}

TEST_CASE("simulate is byte-deterministic, then calibrate and doa run end to end")
{
    const auto dir = work_dir();
    const auto scn = dir / "sweep.json";
    spit(scn, sweep_scenario);

    const auto ds1 = dir / "a.ds";
    const auto ds2 = dir / "b.ds";
    REQUIRE(cli::run({"simulate", "--scenario", scn.string(), "--out", ds1.string()}) == 0);
    REQUIRE(cli::run({"simulate", "--scenario", scn.string(), "--out", ds2.string()}) == 0);
    REQUIRE(slurp(ds1) == slurp(ds2));

    const auto prof = dir / "p.txt";
    REQUIRE(cli::run({"calibrate", "--in", ds1.string(), "--out", prof.string()}) == 0);
    const auto est = dir / "est.csv";
    REQUIRE(cli::run({"doa", "--in", ds1.string(), "--profile", prof.string(), "--out",
                      est.string()}) == 0);
    const auto csv = slurp(est);
    REQUIRE(csv.rfind("frame_id,azimuth_deg,peak_value,method\n", 0) == 0);
    REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 6); // header + 5 sweep records

    REQUIRE(cli::run({"validate", "--in", ds1.string()}) == 0);
}

TEST_CASE("calibrate recovers injected offsets through the CLI")
{
    const auto dir = work_dir();
    const auto scn = dir / "anechoic.json";
    spit(scn, R"json({
      "seed": 21,
      "frames": 40,
      "snr_db": 20.0,
      "phase_offsets_rad": [0, 0.7, -1.2, 2.1],
      "paths": [{"azimuth_deg": 0}],
      "environment_label": "anechoic"
    })json");

    const auto ds = dir / "anechoic.ds";
    const auto prof_path = dir / "anechoic_profile.txt";
    REQUIRE(cli::run({"simulate", "--scenario", scn.string(), "--out", ds.string()}) == 0);
    REQUIRE(cli::run({"calibrate", "--in", ds.string(), "--out", prof_path.string()}) == 0);

    const auto prof = load_profile(prof_path.string());
    const double truth[4] = {0.0, 0.7, -1.2, 2.1};
    REQUIRE(prof.n_frames_used == 40);
    REQUIRE(prof.environment_label == "anechoic");
    for (std::size_t m = 0; m < 4; ++m)
        REQUIRE(std::abs(wrap_phase(prof.offsets_rad[m] - truth[m])) < 1e-2);
}

TEST_CASE("usage errors exit with status 2")
{
    REQUIRE(cli::run({"frobnicate"}) == 2);
    REQUIRE(cli::run({"simulate", "--nonsense"}) == 2);
    REQUIRE(cli::run({}) == 2);
}

TEST_CASE("missing files exit with status 1 and an error line")
{
    REQUIRE(cli::run({"validate", "--in", "/nonexistent/path.ds"}) == 1);
    REQUIRE(cli::run({"simulate", "--scenario", "/nonexistent.json", "--out", "/tmp/x.ds"}) == 1);
}

TEST_CASE("process ingests a headerless cf32 capture")
{
    const auto dir = work_dir();

    // build a raw capture from the simulator: channel-major float32 blocks
    SimulationScenario s;
    s.impairments.phase_offsets_rad = {0, 0, 0, 0};
    s.impairments.snr_db = 20.0;
    s.impairments.start_offset = 750;
    s.frame_channels.assign(3, ChannelModel::single_path(deg_to_rad(15.0)));
    s.seed = 77;
    const auto cap = simulate_capture(s);

    const auto raw = dir / "capture.cf32";
    {
        std::ofstream f(raw, std::ios::binary | std::ios::trunc);
        for (const auto& ch : cap.channels)
            for (const auto& v : ch) {
                const float re = static_cast<float>(v.real());
                const float im = static_cast<float>(v.imag());
                f.write(reinterpret_cast<const char*>(&re), 4);
                f.write(reinterpret_cast<const char*>(&im), 4);
            }
    }

    const auto ds = dir / "processed.ds";
    REQUIRE(cli::run({"process", "--in", raw.string(), "--out", ds.string(), "--channels", "4",
                      "--sample-rate", "80e6"}) == 0);
    DatasetReader reader(ds.string());
    REQUIRE(reader.header().record_count == 3);
    auto rec = reader.next();
    REQUIRE(rec.has_value());
    REQUIRE_FALSE(rec->true_azimuth_deg.has_value()); // raw captures carry no truth
    REQUIRE(rec->csi.well_formed());
}
