#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "targetcost/io.hpp"

using namespace targetcost;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "targetcost_io_test";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(CurveIo, RoundTripIsBitIdentical) {
    const auto shot = shoot(2.0);
    const auto csv = scratch("g2.csv");
    write_curve(csv, shot.curve, sidecar_of(shot));
    ASSERT_TRUE(fs::exists(sidecar_path(csv)));
    const auto loaded = read_curve(csv);
    ASSERT_EQ(loaded.curve.size(), shot.curve.size());
    for (std::size_t i = 0; i < shot.curve.size(); ++i) {
        ASSERT_EQ(loaded.curve.y()[i], shot.curve.y()[i]);
        ASSERT_EQ(loaded.curve.g()[i], shot.curve.g()[i]);
        ASSERT_EQ(loaded.curve.dg()[i], shot.curve.dg()[i]);
    }
    EXPECT_EQ(loaded.meta.p, 2.0);
    EXPECT_EQ(loaded.meta.g_mid, shot.g_mid);
    EXPECT_EQ(loaded.meta.gamma, shot.gamma);
    EXPECT_EQ(loaded.meta.epsilon, shot.curve.epsilon());
    const Params params{2.0, 1.3, 0.2, -0.4};
    EXPECT_EQ(value_function(loaded.curve, params), value_function(shot.curve, params));
    EXPECT_EQ(slurp(csv).substr(0, 7), "y,g,dg\n");
}

TEST(CurveIo, MalformedInputs) {
    const auto csv = scratch("bad.csv");
    {
        std::ofstream(csv) << "y,g,dg\n0.1,0.9,-0.1\n0.2,abc,-0.1\n";
        std::ofstream(sidecar_path(csv)) << R"({"p": 2, "epsilon": 1e-4, "g_mid": 0.87, "gamma": -0.5})";
    }
    EXPECT_THROW(read_curve(csv), UsageError);
    {
        std::ofstream(csv) << "y,g,dg\n0.1,0.9,-0.1\n0.2,0.8,-0.1\n";
        std::ofstream(sidecar_path(csv)) << R"({"epsilon": 1e-4})";
    }
    EXPECT_THROW(read_curve(csv), UsageError);
    EXPECT_THROW(read_curve(scratch("missing.csv")), ResourceError);
}

TEST(PathIo, DumpHasHeaderAndOneRowPerTime) {
    const auto shot = shoot(2.0);
    const auto path = run_optimal_control(shot.curve, Params{}, simulate_brownian(1.0, 50, 3));
    std::ostringstream a, b;
    write_path(a, path);
    write_path(b, run_optimal_control(shot.curve, Params{}, simulate_brownian(1.0, 50, 3)));
    EXPECT_EQ(a.str(), b.str());
    std::istringstream in(a.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "t,W,M,u,X,cost_running");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 51);
}

TEST(WitnessIo, Header) {
    std::ostringstream out;
    write_witnesses(out, {{duality_witness(4, 1.0, 0.0), 0.2}});
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "n,I_n,mass,entropy,duality_gap");
}

TEST(Format, SeventeenDigitsRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) EXPECT_EQ(std::stod(fmt17(v)), v);
}
