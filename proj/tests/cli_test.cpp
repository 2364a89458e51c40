#include <hjmm/commands.hpp>
#include <hjmm/config.hpp>
#include <hjmm/error.hpp>
#include <hjmm/io.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hjmm;
namespace fs = std::filesystem;

namespace {

const char* kGamma = R"({
  "version": 1,
  "levy": {"drift_a": 0.6321205588285577, "gaussian_q": 0.0, "subordinator": true,
           "measure": {"family": "gamma_like", "c": 1.0, "beta": 1.0}},
  "volatility": {"terms": [{"time": 1.0, "maturity": 0.5}]},
  "initial_curve": 0.1,
  "grid": {"delta": 0.0625, "t_star": 1.0, "t_max": 2.0, "gamma": 1.0},
  "mc": {"n_paths": 40, "master_seed": 9, "eps": 1e-3}
})";

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    if (pos != std::string::npos) s.replace(pos, from.size(), to);
    return s;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("hjmm_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                                            ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    CliOptions write(const std::string& text, const std::string& sub = "out") {
        const fs::path cfg = dir_ / "config.json";
        std::ofstream(cfg) << text;
        CliOptions o;
        o.config = cfg.string();
        o.out = (dir_ / sub).string();
        return o;
    }

    fs::path dir_;
};

}  // namespace

TEST(Config, ParsesProfilesAndDefaults) {
    const RunConfig c = parse_config(kGamma);
    EXPECT_EQ(c.version, 1);
    EXPECT_TRUE(std::holds_alternative<GammaLike>(c.levy.measure));
    EXPECT_DOUBLE_EQ(c.vol.lambda_upper, 0.5);
    EXPECT_DOUBLE_EQ(c.r0(1.3), 0.1);
    EXPECT_EQ(c.mc.n_paths, 40u);
    EXPECT_DOUBLE_EQ(c.solver.tol, 1e-10);
}

TEST(Config, RejectsWrongVersion) {
    EXPECT_THROW(parse_config(replace(kGamma, "\"version\": 1", "\"version\": 7")), Error);
}

TEST(Config, DiagnosticsNameFieldAndAssumption) {
    try {
        parse_config(replace(kGamma, "\"initial_curve\": 0.1", "\"initial_curve\": {\"kind\": \"affine\", \"c0\": 1.0, \"c1\": -1.0}"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ConfigError);
        EXPECT_NE(std::string(e.what()).find("(A1)"), std::string::npos) << e.what();
    }
    try {
        parse_config(replace(kGamma, "\"delta\": 0.0625", "\"delta\": \"x\""));
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("grid.delta"), std::string::npos) << e.what();
    }
}

TEST(Io, NumberFormat) {
    EXPECT_EQ(format_number(0.1), "1.0000000000e-01");
    EXPECT_EQ(format_number(-2.5e-300), "-2.5000000000e-300");
}

TEST_F(CliTest, ClassifyExitCodes) {
    EXPECT_EQ(cmd_classify(write(kGamma)), exit_code::kOk);
    EXPECT_EQ(cmd_classify(write(replace(kGamma, "\"gaussian_q\": 0.0", "\"gaussian_q\": 1.0"))), exit_code::kExplosion);
    const std::string user = replace(kGamma, R"({"family": "gamma_like", "c": 1.0, "beta": 1.0})",
                                     R"({"family": "user_density", "nodes": [[0.01, 50.0], [0.1, 4.0], [1.0, 0.3]], "certified": false})");
    EXPECT_EQ(cmd_classify(write(replace(user, "\"subordinator\": true", "\"subordinator\": false"))),
              exit_code::kIndeterminate);
    CliOptions missing;
    missing.config = (dir_ / "nope.json").string();
    EXPECT_EQ(cmd_classify(missing), exit_code::kConfig);
}

TEST_F(CliTest, SolveWritesFieldCsv) {
    const CliOptions o = write(kGamma);
    ASSERT_EQ(cmd_solve(o), exit_code::kOk);
    const std::string csv = slurp(fs::path(*o.out) / "field_musiela.csv");
    EXPECT_EQ(csv.substr(0, 6), "t,x,r\n");
    EXPECT_TRUE(fs::exists(fs::path(*o.out) / "solver_report.json"));
}

TEST_F(CliTest, SolveRefusesExplosiveUnlessForced) {
    const std::string stable = replace(replace(kGamma, R"({"family": "gamma_like", "c": 1.0, "beta": 1.0})",
                                               R"({"family": "stable_like", "c": 1.0, "alpha": 1.5, "y_max": 1.0})"),
                                       "\"initial_curve\": 0.1", "\"initial_curve\": 100.0");
    CliOptions o = write(replace(stable, "\"eps\": 1e-3", "\"eps\": 1e-2"));
    EXPECT_EQ(cmd_solve(o), exit_code::kConfig);
    o.allow_explosive = true;
    EXPECT_EQ(cmd_solve(o), exit_code::kNotConverged);
}

TEST_F(CliTest, VerifyPasses) { EXPECT_EQ(cmd_verify(write(kGamma)), exit_code::kOk); }

TEST_F(CliTest, McDeterministicAcrossThreads) {
    CliOptions one = write(kGamma, "one");
    CliOptions three = one;
    three.out = (dir_ / "three").string();
    three.threads = 3;
    ASSERT_EQ(cmd_mc(one), exit_code::kOk);
    ASSERT_EQ(cmd_mc(three), exit_code::kOk);
    for (const char* f : {"mc_zscores.csv", "mc_summary.json"})
        EXPECT_EQ(slurp(fs::path(*one.out) / f), slurp(fs::path(*three.out) / f)) << f;
}

TEST_F(CliTest, McSinglePathFails) {
    EXPECT_EQ(cmd_mc(write(replace(kGamma, "\"n_paths\": 40", "\"n_paths\": 1"))), exit_code::kMcFailed);
}
