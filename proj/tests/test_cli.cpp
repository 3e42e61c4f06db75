#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "orisurf/config.hpp"
#include "orisurf/metrics.hpp"

namespace orisurf {
namespace {

namespace fs = std::filesystem;

struct CliResult {
    int code = -1;
    std::string out;
};

// Runs the CLI with stderr merged into stdout.
CliResult cli(const std::string& args)
{
    const std::string cmd = std::string(ORISURF_CLI) + " " + args + " 2>&1";
    CliResult r;
    FILE* p = ::popen(cmd.c_str(), "r");
    if (!p)
        return r;
    char buf[4096];
    while (size_t n = std::fread(buf, 1, sizeof buf, p))
        r.out.append(buf, n);
    const int status = ::pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir = fs::temp_directory_path() / ("orisurf_cli_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string path(const std::string& name) const { return (dir / name).string(); }

    std::string write_config(const std::string& name, const std::string& text) const
    {
        std::ofstream(dir / name) << text;
        return path(name);
    }

    fs::path dir;
};

constexpr const char* kStill = R"({
  "seed": 3,
  "object": {"shape": "box", "size": [0.3, 0.3, 0.01], "mass": 0.254},
  "mode": "translate:+y:fast",
  "params": {"h_amp": 0.0, "psi_amp": 0.0},
  "sim": {"duration": 1.0}
})";

TEST_F(Cli, SimulateWritesTrajectorySidecarAndMetrics)
{
    const std::string cfg = write_config("still.json", kStill);
    const CliResult r = cli("simulate --config " + cfg + " --trajectory " + path("run.csv") + " --metrics " + path("m.json"));
    ASSERT_EQ(r.code, 0) << r.out;

    std::ifstream csv(path("run.csv"));
    const auto rows = read_trajectory_csv(csv);
    EXPECT_EQ(rows.size(), 21u);
    EXPECT_LT(compute_metrics(rows).v, 1e-3);

    const Json side = Json::parse(slurp(path("run.sidecar.json")));
    EXPECT_EQ(side.at("samples").get<int>(), 21);
    const ExperimentConfig parsed = parse_config(side.at("config"));
    EXPECT_EQ(side.at("config").dump(2), normalized_config_text(parsed));
    EXPECT_EQ(parsed.seed, 3u);
    EXPECT_EQ(parsed.params.h_amp, 0.0);

    const Json m = Json::parse(slurp(path("m.json")));
    EXPECT_DOUBLE_EQ(m.at("J").get<double>(), -m.at("v").get<double>());
}

TEST_F(Cli, SidecarConfigReproducesTrajectory)
{
    const std::string cfg = write_config("a.json", kStill);
    ASSERT_EQ(cli("simulate --config " + cfg + " --trajectory " + path("a.csv") + " --metrics " + path("am.json")).code, 0);
    const Json side = Json::parse(slurp(path("a.sidecar.json")));
    const std::string again = write_config("b_cfg.json", side.at("config").dump());
    ASSERT_EQ(cli("simulate --config " + again + " --trajectory " + path("b.csv") + " --metrics " + path("bm.json")).code, 0);
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
}

TEST_F(Cli, SeedFlagOverridesConfig)
{
    const std::string cfg = write_config("s.json", kStill);
    ASSERT_EQ(cli("simulate --config " + cfg + " --seed 41 --trajectory " + path("s.csv") + " --metrics " + path("sm.json")).code, 0);
    EXPECT_EQ(Json::parse(slurp(path("s.sidecar.json"))).at("config").at("seed").get<int>(), 41);
}

TEST_F(Cli, MissingObjectExitsWithUsageCode)
{
    const std::string cfg = write_config("noobj.json", R"({"mode": "fast:+y"})");
    const CliResult r = cli("simulate --config " + cfg + " --trajectory " + path("x.csv"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("object"), std::string::npos);
    EXPECT_FALSE(fs::exists(path("x.csv")));
}

TEST_F(Cli, UnknownKeyAndBadArguments)
{
    const std::string cfg = write_config("bad.json", R"({"mode": "fast:+y", "objekt": {}})");
    const CliResult r = cli("simulate --config " + cfg);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("objekt"), std::string::npos);
    EXPECT_EQ(cli("frobnicate").code, 2);
    EXPECT_EQ(cli("simulate").code, 2);
    EXPECT_EQ(cli("ik --psi notanumber").code, 2);
}

TEST_F(Cli, MetricsOfTrajectoryFile)
{
    std::ofstream(dir / "line.csv") << "t,x,y,z,roll,pitch,yaw,vx,vy,vz,wx,wy,wz\n"
                                       "0,0,0,0.035,0,0,0,0,0,0,0,0,0\n"
                                       "1,0.03,0.04,0.035,0,0,0.02,0,0,0,0,0,0\n"
                                       "2,0.06,0.08,0.036,0,0.01,0.04,0,0,0,0,0,0\n";
    const CliResult r = cli("metrics --in " + path("line.csv") + " --mode fast:+y");
    ASSERT_EQ(r.code, 0) << r.out;
    const Json j = Json::parse(r.out);
    EXPECT_NEAR(j.at("v").get<double>(), 0.05, 1e-12);
    EXPECT_NEAR(j.at("omega").get<double>(), 0.02, 1e-12);
    EXPECT_NEAR(j.at("max_z").get<double>(), 0.001, 1e-12);
    EXPECT_NEAR(j.at("J").get<double>(), -0.05, 1e-12);
    EXPECT_TRUE(j.contains("z_std"));
    EXPECT_EQ(cli("metrics --in " + path("missing.csv")).code, 2);
}

TEST_F(Cli, InverseKinematicsJson)
{
    const CliResult r = cli("ik --delta 0.3 --psi 0.2 --height 0.035 --fk");
    ASSERT_EQ(r.code, 0) << r.out;
    const Json j = Json::parse(r.out);
    EXPECT_TRUE(j.at("feasible").get<bool>());
    EXPECT_NEAR(j.at("theta")[0].get<double>(), 0.45391279264070715, 1e-12);
    EXPECT_NEAR(j.at("fk").at("psi").get<double>(), 0.2, 1e-9);
    EXPECT_EQ(cli("ik --delta 0 --psi 0 --height 0.08").code, 1);
}

TEST_F(Cli, WorkspaceRaster)
{
    const CliResult r = cli("workspace --h-low 0.02 --h-high 0.04 --resolution 21 --height-samples 3 --out " + path("ws.csv"));
    ASSERT_EQ(r.code, 0) << r.out;
    std::ifstream in(path("ws.csv"));
    std::string comment, header, line;
    std::getline(in, comment);
    std::getline(in, header);
    EXPECT_EQ(comment.rfind("# feasible_area=", 0), 0u);
    EXPECT_EQ(header, "psi_x,psi_y,feasible");
    int n = 0, feasible = 0;
    while (std::getline(in, line)) {
        ++n;
        feasible += line.back() == '1';
    }
    EXPECT_EQ(n, 21 * 21);
    EXPECT_GT(feasible, 0);
    EXPECT_LT(feasible, n);
}

TEST_F(Cli, CpgTraceColumns)
{
    const CliResult r = cli("cpg-trace --mode fast:+y --duration 2 --rate 10");
    ASSERT_EQ(r.code, 0) << r.out;
    std::istringstream in(r.out);
    std::string header, line;
    std::getline(in, header);
    EXPECT_EQ(header, "t,group1_height,group1_psi,group2_height,group2_psi");
    int n = 0;
    while (std::getline(in, line))
        ++n;
    EXPECT_EQ(n, 21);
}

TEST_F(Cli, OptimizeWritesCampaign)
{
    const std::string base = write_config("base.json", R"({"sim": {"duration": 0.5}})");
    const CliResult r = cli("optimize --mode fast:+x --object box:0.3x0.3x0.01:0.254 --budget 3 --seed 4 --config " + base
                      + " --out " + path("camp.json"));
    ASSERT_EQ(r.code, 0) << r.out;
    const Campaign c = load_campaign(path("camp.json"));
    EXPECT_EQ(c.history.size(), 3u);
    EXPECT_EQ(c.seed, 4u);
    EXPECT_EQ(c.mode, "translate:+x:fast");
}

} // namespace
} // namespace orisurf
