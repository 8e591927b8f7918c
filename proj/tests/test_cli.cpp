#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <sys/wait.h>

#include "optomech/config.hpp"
#include "optomech/csv.hpp"

using namespace optomech;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
};

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("optomech_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write(const std::string& name, const std::string& text) const {
        const auto p = dir_ / name;
        std::ofstream(p) << text;
        return p;
    }

    CliRun run(const std::string& args) const {
        const auto log = dir_ / "stdout.txt";
        const std::string cmd = std::string(OPTOMECH_CLI) + " " + args + " > " + log.string() + " 2>&1";
        const int status = std::system(cmd.c_str());
        CliRun r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        std::ifstream in(log);
        std::stringstream ss;
        ss << in.rdbuf();
        r.out = ss.str();
        return r;
    }

    fs::path dir_;
};

const char* vacuum_config = R"({
  "effective": {"g1_eff_wm": 0.0, "g2_eff_wm": 0.0, "delta_a_wm": 1.0, "kappa_wm": 1.0,
                "gamma1_wm": 0.1, "gamma2_wm": 0.1, "n_th": 0.0}
})";

} // namespace

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("bogus").code, 1);
    EXPECT_EQ(run("point").code, 1); // no --config
    EXPECT_EQ(run("point --config " + (dir_ / "missing.json").string()).code, 1);
    EXPECT_EQ(run("figure fig9 --out " + dir_.string()).code, 1);
    EXPECT_EQ(run("--help").code, 0);
}

TEST_F(CliTest, PointOnVacuum) {
    const auto cfg = write("vac.json", vacuum_config);
    const auto r = run("point --config " + cfg.string());
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("stable: yes"), std::string::npos);
    EXPECT_NE(r.out.find("n1 = 0\n"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("E_N(a|b1) = 0\n"), std::string::npos) << r.out;
}

TEST_F(CliTest, PointCsvOutput) {
    const auto cfg = write("vac.json", vacuum_config);
    const auto csv = dir_ / "point.csv";
    ASSERT_EQ(run("point --quiet --config " + cfg.string() + " --out " + csv.string()).code, 0);
    std::ifstream in(csv);
    const auto t = read_csv(in);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(*t.rows[0][t.column("n1")], 0.0);
}

TEST_F(CliTest, ConfigErrorExitCode) {
    const auto cfg = write("bad.json", R"({"effective": {"kappa_wm": 1.0, "nope": 2}})");
    const auto r = run("point --config " + cfg.string());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("nope"), std::string::npos);
    const auto broken = write("broken.json", "{not json");
    EXPECT_EQ(run("point --config " + broken.string()).code, 1);
}

TEST_F(CliTest, StabilityReportsGrowthRate) {
    // g = 0, Delta = 0, theta = 0, chi = 0.3 kappa: growth rate -kappa/2 + 2 chi = 0.1 kappa.
    const auto cfg = write("unstable.json", R"({
      "effective": {"delta_a_wm": 0.0, "kappa_wm": 2.0, "chi_wm": 0.6, "theta": 0.0,
                    "gamma1_wm": 0.1, "gamma2_wm": 0.1}
    })");
    const auto r = run("stability --quiet --config " + cfg.string());
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("stable: no"), std::string::npos);
    const auto pos = r.out.find("max_real_part: ");
    ASSERT_NE(pos, std::string::npos);
    EXPECT_NEAR(std::stod(r.out.substr(pos + 15)), 0.2, 1e-12);
}

TEST_F(CliTest, SweepRequiresSection) {
    const auto cfg = write("vac.json", vacuum_config);
    EXPECT_EQ(run("sweep --config " + cfg.string()).code, 1);
}

TEST_F(CliTest, SweepRerunFromEchoedConfigIsBitwise) {
    auto doc = preset_documents("fig3").front();
    doc["sweep"]["n_points"] = 7;
    const auto cfg = write("s.json", doc.dump(2));
    const auto first = dir_ / "first.csv";
    ASSERT_EQ(run("sweep --quiet --config " + cfg.string() + " --out " + first.string()).code, 0);
    std::ifstream in(first);
    const auto t1 = read_csv(in);
    ASSERT_EQ(t1.rows.size(), 7u);
    std::string echoed;
    for (const auto& c : t1.comments) {
        if (c.rfind("config: ", 0) == 0) echoed = c.substr(8);
    }
    ASSERT_FALSE(echoed.empty());
    const auto cfg2 = write("echo.json", echoed);
    const auto second = dir_ / "second.csv";
    ASSERT_EQ(run("sweep --quiet --threads 3 --config " + cfg2.string() + " --out " + second.string()).code, 0);
    std::ifstream in2(second);
    const auto t2 = read_csv(in2);
    EXPECT_EQ(t1.header, t2.header);
    EXPECT_EQ(t1.rows, t2.rows);
}

TEST_F(CliTest, FigureWritesAllCurves) {
    const auto r = run("figure fig1 --quiet --out " + dir_.string());
    ASSERT_EQ(r.code, 0) << r.out;
    for (const char* name : {"fig1_chi0.csv", "fig1_chiopt.csv"}) {
        std::ifstream in(dir_ / name);
        ASSERT_TRUE(in.good()) << name;
        const auto t = read_csv(in);
        EXPECT_EQ(t.rows.size(), 201u);
        EXPECT_EQ(t.header.size(), 16u);
    }
}

TEST_F(CliTest, Hybrid) {
    const auto cfg = write("h.json", R"({
      "effective": {"g1_eff_wm": 0.3, "g2_eff_wm": 0.4, "lambda_mpa_wm": 0.1, "kappa_wm": 1.0,
                    "delta_a_wm": 1.0, "gamma1_wm": 0.01, "gamma2_wm": 0.01}
    })");
    const auto r = run("hybrid --config " + cfg.string());
    EXPECT_EQ(r.code, 0);
    const auto pos = r.out.find("g_BD_lambda: ");
    ASSERT_NE(pos, std::string::npos) << r.out;
    EXPECT_NEAR(std::stod(r.out.substr(pos + 13)), 0.048, 1e-15);
    EXPECT_NE(r.out.find("dark_mode_broken: yes"), std::string::npos);
    const auto zero = write("z.json", R"({"effective": {"kappa_wm": 1.0, "gamma1_wm": 0.1, "gamma2_wm": 0.1}})");
    EXPECT_EQ(run("hybrid --config " + zero.string()).code, 2);
}
