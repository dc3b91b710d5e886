#include "json.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(TWISTGAP_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = ::popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    const int status = ::pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

nlohmann::json run_json(const std::string& args) {
    const auto r = run(args + " --format json");
    EXPECT_EQ(r.code, 0) << args;
    return nlohmann::json::parse(r.out);
}

std::vector<std::string> data_lines(const std::string& csv) {
    std::vector<std::string> out;
    std::istringstream is(csv);
    std::string line;
    while (std::getline(is, line))
        if (!line.empty() && line[0] != '#') out.push_back(line);
    return out;
}

}  // namespace

TEST(Cli, Lgt2dBoundRowsAllHold) {
    const auto j = run_json("lgt2d --group u1 --beta 1.0 --size 8x8 --areas 1,2,4,8");
    ASSERT_EQ(j["rows"].size(), 4u);
    for (const auto& r : j["rows"]) {
        EXPECT_TRUE(r["ok"].get<bool>());
        EXPECT_LE(r["lhs"].get<double>(), r["rhs"].get<double>());
    }
    EXPECT_EQ(j["config"]["group"], "u1");
    EXPECT_EQ(j["config"]["command"], "lgt2d");
}

TEST(Cli, ZeroBetaGivesZeroLhs) {
    const auto j = run_json("lgt2d --group su2 --beta 0 --size 4x4 --areas 1,2");
    for (const auto& r : j["rows"]) EXPECT_EQ(r["lhs"].get<double>(), 0.0);
}

TEST(Cli, CsvCarriesConfigHeaderAndColumns) {
    const auto r = run("lgt2d --group z3 --beta 0.5 --size 4x4 --areas 1,2");
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("# command=lgt2d"), std::string::npos);
    EXPECT_NE(r.out.find("# threads="), std::string::npos);
    const auto lines = data_lines(r.out);
    ASSERT_EQ(lines.size(), 3u);
    EXPECT_EQ(lines[0].rfind("group,beta,L1,L2,irrep,area,lhs,rhs", 0), 0u);
}

TEST(Cli, SectorTable) {
    const auto j = run_json("lgt2d --group su2 --beta 1 --size 2x2 --sectors");
    double flux = 0.0;
    for (const auto& r : j["rows"])
        if (r["kind"] == "flux") flux += r["value"].get<double>();
    EXPECT_NEAR(flux, 1.0, 1e-10);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("lgt2d --group su2 --j 0").code, 2);
    EXPECT_EQ(run("lgt2d --group u1 --j 0.5").code, 2);
    EXPECT_EQ(run("nonsense").code, 2);
    EXPECT_EQ(run("tri --t1 0.2 --t 0.9").code, 3);
    EXPECT_EQ(run("square --a 0.6 --b 0.6 --size 8x8 --decay").code, 3);
    EXPECT_EQ(run("oracle enumerate --lattice square --size 6x5 --method enumeration").code, 4);
    EXPECT_EQ(run("tri --t1 0 --t 0.2").code, 0);
}

TEST(Cli, TriangularRhoReference) {
    const auto j = run_json("tri --t1 0 --t 0.2");
    ASSERT_EQ(j["rows"].size(), 1u);
    EXPECT_NEAR(j["rows"][0]["rho"].get<double>(), 0.8754687373538999, 1e-12);
}

TEST(Cli, HeatmapWritesSvg) {
    const auto svg = std::filesystem::temp_directory_path() / "twistgap_test_heatmap.svg";
    const auto j = run_json("tri --heatmap 11x11 --svg " + svg.string());
    EXPECT_EQ(j["rows"].size(), 121u);
    std::ifstream in(svg);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_NE(ss.str().find("<svg"), std::string::npos);
    std::filesystem::remove(svg);
}

TEST(Cli, OracleInequalityHolds) {
    const auto j = run_json("oracle check-inequality --lattice square --size 4x2 --a 0.3 --b 0.3");
    ASSERT_FALSE(j["rows"].empty());
    for (const auto& r : j["rows"]) EXPECT_TRUE(r["ok"].get<bool>());
}

TEST(Cli, OracleEquivalenceAndMod2) {
    const auto e = run_json("oracle equivalence --N 4 --M 2 --t1 0.2 --t 0.3");
    EXPECT_LT(std::fabs(e["rows"][0]["diff"].get<double>()), 1e-12);
    EXPECT_EQ(run("oracle mod2 --lattice square --size 4x3").code, 0);
}

TEST(Cli, McReportsExactComparison) {
    const auto j = run_json("mc --size 4x4 --a 0.3 --b 0.3 --sweeps 100000 --seed 5");
    EXPECT_TRUE(j.contains("ratio"));
    EXPECT_TRUE(j.contains("stderr"));
    EXPECT_TRUE(j["acceptance"].contains("sector"));
    EXPECT_LT(std::fabs(j["z_score"].get<double>()), 4.0);
    EXPECT_EQ(j["config"]["seed"], "5");
}

TEST(Cli, PcmChain) {
    const auto j = run_json("pcm --group z2 --beta 0.5 --L 16 --n 1,2,4,8");
    for (const auto& r : j["rows"])
        if (r["regime"] == "theorem") EXPECT_TRUE(r["ok"].get<bool>());
}

TEST(Cli, ConfigFileWithFlagOverride) {
    const auto path = std::filesystem::temp_directory_path() / "twistgap_test.cfg";
    {
        std::ofstream f(path);
        f << "# comment\ngroup = z2\nbeta = 0.7\nsize = 4x4\nareas = 1,2\n";
    }
    const auto j = run_json("lgt2d --config " + path.string() + " --beta 0.3");
    EXPECT_EQ(j["config"]["group"], "z2");
    EXPECT_EQ(j["config"]["beta"], "0.3");
    EXPECT_EQ(j["rows"].size(), 2u);
    std::filesystem::remove(path);
}
