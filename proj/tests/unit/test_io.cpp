#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace satsol;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("satsol_io_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

GroundState synthetic_state() {
    const RadialGrid g = make_grid(4.0, 32);
    RadialProfile rho = RadialProfile::sample(g, [](double r) { return std::exp(-r) / 3.0; });
    return GroundState{-30.0, rho, 6.5, -2.25, 1e-9, 2e-5, 6.49, {{2.0, -2.0}, {4.0, -2.25}}, 2.5, 0.0};
}

} // namespace

TEST(ProfileCsv, RoundTripIsExact) {
    const fs::path dir = scratch("csv");
    const RadialProfile p = RadialProfile::sample(make_grid(3.0, 48), [](double r) { return std::sin(r) / (1.0 + r); });
    io::write_profile_csv(p, dir / "p.csv");
    std::ifstream in(dir / "p.csv");
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "r,value");
    const RadialProfile q = io::read_profile_csv(dir / "p.csv");
    EXPECT_TRUE(q.grid() == p.grid());
    for (std::size_t j = 0; j < p.size(); ++j) {
        EXPECT_EQ(q[j], p[j]);
    }
}

TEST(ProfileCsv, RejectsBadFiles) {
    const fs::path dir = scratch("badcsv");
    io::write_text(dir / "a.csv", "x,y\n0,1\n");
    EXPECT_THROW(io::read_profile_csv(dir / "a.csv"), IoError);
    io::write_text(dir / "b.csv", "r,value\n0,1\n0.1,abc\n");
    EXPECT_THROW(io::read_profile_csv(dir / "b.csv"), IoError);
    EXPECT_THROW(io::read_profile_csv(dir / "missing.csv"), IoError);
}

TEST(StateJson, RoundTrip) {
    const fs::path dir = scratch("state");
    const GroundState gs = synthetic_state();
    io::save_ground_state(gs, dir);
    const auto j = io::read_json(dir / "state.json");
    EXPECT_EQ(j.at("profile"), "profile.csv");
    EXPECT_EQ(j.at("gamma"), -30.0);
    const GroundState back = io::load_ground_state(dir / "state.json");
    EXPECT_EQ(back.lambda, gs.lambda);
    EXPECT_EQ(back.mu, gs.mu);
    EXPECT_EQ(back.decay_rate, gs.decay_rate);
    EXPECT_EQ(back.ball_energies, gs.ball_energies);
    EXPECT_EQ(back.profile[7], gs.profile[7]);
}

TEST(StateJson, CorruptOrMissing) {
    const fs::path dir = scratch("corrupt");
    io::write_text(dir / "state.json", "{\"gamma\": -30, \"lambda\": ");
    EXPECT_THROW(io::load_ground_state(dir / "state.json"), IoError);
    io::write_text(dir / "state.json", "{\"gamma\": -30}");
    EXPECT_THROW(io::load_ground_state(dir / "state.json"), IoError);
    EXPECT_THROW(io::load_ground_state(dir / "nothing.json"), IoError);
}

TEST(Json, ThresholdKeys) {
    ThresholdEstimate e = make_estimate(11.7, {{1.0, 13.0}, {0.5, 12.0}});
    const auto j = io::to_json(e);
    EXPECT_EQ(j.at("townes_mass"), 11.7);
    EXPECT_EQ(j.at("T0_estimate"), 11.7);
    EXPECT_EQ(j.at("upper_bounds").size(), 2u);
    EXPECT_EQ(j.at("upper_bounds")[1][0], 0.5);
    const ThresholdEstimate back = io::threshold_from_json(j);
    EXPECT_EQ(back.bracket_width, e.bracket_width);
}

TEST(Json, FunctionalAndDiagnosticsKeys) {
    const auto f = io::to_json(functional_report(normalized(fixtures::unit_gaussian_on(make_grid(8.0, 256))), -30.0));
    for (const char* key : {"energy_H", "power_P", "kinetic", "potential", "lambda_pz2", "lambda_pz1",
                            "pohozaev_residual"}) {
        EXPECT_TRUE(f.contains(key)) << key;
    }
    EXPECT_EQ(f.size(), 7u);
    DiagnosticsReport r;
    r.add("x", true, 1.0, 2.0);
    r.add("y", false, INFINITY, 1.0);
    const auto j = io::to_json(r);
    EXPECT_EQ(j.at("overall"), false);
    EXPECT_EQ(j.at("checks")[0].at("name"), "x");
    EXPECT_EQ(j.at("checks")[1].at("measured"), "inf");
    EXPECT_NE(io::render_table(r).find("FAIL"), std::string::npos);
}

TEST(TraceCsv, Headers) {
    const fs::path dir = scratch("trace");
    io::write_flow_trace_csv({{0, 1.0, 0.5}, {100, 0.5, 0.6}}, dir / "t.csv");
    PropagationTrace t;
    t.z = {0.1};
    t.power = {1.0};
    t.center_phase = {0.7};
    t.profile_error = {1e-5};
    io::write_propagation_csv(t, dir / "p.csv");
    std::ifstream a(dir / "t.csv"), b(dir / "p.csv");
    std::string l1, l2;
    std::getline(a, l1);
    std::getline(b, l2);
    EXPECT_EQ(l1, "iter,energy,sup_rho");
    EXPECT_EQ(l2, "z,power,center_phase,profile_error");
}

TEST(Io, UnwritablePath) {
    EXPECT_THROW(io::write_text("/nonexistent_dir_satsol/x.txt", "x"), IoError);
}
