#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "lqdim/cli.hpp"

using namespace lqdim;

namespace {

const std::string source_dir = LQDIM_SOURCE_DIR;
const std::string binary = LQDIM_BINARY;

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

RunConfig config_from(const std::string& name) {
    RunConfig cfg;
    apply_config_json(cfg, Json::parse(slurp(source_dir + "/configs/" + name + ".json")));
    return cfg;
}

struct RunResult {
    int code;
    std::string out, err;
};

RunResult run_in_process(const RunConfig& cfg) {
    std::ostringstream out, err;
    int code = run(cfg, out, err);
    return {code, out.str(), err.str()};
}

/// Runs the CLI binary with stdout discarded; returns its exit status.
int exit_status(const std::string& args) {
    std::string cmd = binary + " " + args + " > /dev/null 2>&1";
    int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string capture(const std::string& args) {
    auto tmp = std::filesystem::temp_directory_path() / ("lqdim-cli-" + std::to_string(::getpid()) + ".out");
    std::string cmd = binary + " " + args + " > " + tmp.string() + " 2>/dev/null";
    int raw = std::system(cmd.c_str());
    EXPECT_TRUE(WIFEXITED(raw) && WEXITSTATUS(raw) == 0) << cmd;
    std::string text = slurp(tmp);
    std::filesystem::remove(tmp);
    return text;
}

class CliGolden : public ::testing::TestWithParam<std::string> {};

} // namespace

TEST_P(CliGolden, ShippedConfigReproducesGoldenReport) {
    std::filesystem::path golden = source_dir + "/tests/golden/" + GetParam() + ".json";
    ASSERT_TRUE(std::filesystem::exists(golden)) << golden;
    RunResult r = run_in_process(config_from(GetParam()));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, slurp(golden));
}

INSTANTIATE_TEST_SUITE_P(Configs, CliGolden,
                         ::testing::Values("analyze_cantor", "spectrum_golden", "garsia_golden", "separation_two_thirds",
                                           "flatten_tree", "intersect_sqrt2"));

TEST(Cli, AnalyzeCantorExample) {
    RunConfig cfg;
    cfg.command = "analyze";
    cfg.preset = "p_cantor:3:0,2";
    cfg.q = {2};
    cfg.m_max = 16;
    RunResult r = run_in_process(cfg);
    ASSERT_EQ(r.code, 0) << r.err;
    Json j = Json::parse(r.out);
    EXPECT_EQ(j["schema"], "1");
    EXPECT_EQ(j["status"], "ok");
    const std::string text = j.dump();
    // one q, so exactly one estimate/prediction pair
    const Json& row = j["spectrum"]["rows"][0];
    EXPECT_NEAR(row["D_hat"].get<double>(), 0.631, 0.03) << text;
    EXPECT_NEAR(row["predicted_D"].get<double>(), 0.63093, 1e-5) << text;
}

TEST(Cli, SeparationTwoThirdsExample) {
    RunResult r = run_in_process(config_from("separation_two_thirds"));
    ASSERT_EQ(r.code, 0) << r.err;
    Json j = Json::parse(r.out);
    ASSERT_EQ(j["gamma"].size(), 12u);
    const Json& cert = j["certificate"];
    EXPECT_TRUE(cert["issued"].get<bool>());
    EXPECT_EQ(cert["k"], 12);
    EXPECT_EQ(cert["bound"]["num"], "1");
    EXPECT_EQ(cert["bound"]["den"], "177147"); // 3^11
}

TEST(Cli, GarsiaGoldenExample) {
    RunResult r = run_in_process(config_from("garsia_golden"));
    ASSERT_EQ(r.code, 0) << r.err;
    Json j = Json::parse(r.out);
    EXPECT_EQ(j["garsia"]["overlap_level"], 3);
    const Json& L = j["fekete"][0]["L"];
    ASSERT_EQ(L.size(), 18u);
    for (const auto& row : L) EXPECT_TRUE(row["norm_q_pow_q"].is_string()); // exact for integer q
    EXPECT_EQ(L[2]["norm_q_pow_q"], "5/32");
}

TEST(Cli, DeterministicAcrossRuns) {
    for (const char* name : {"analyze_cantor", "flatten_tree"}) {
        RunResult a = run_in_process(config_from(name)), b = run_in_process(config_from(name));
        EXPECT_EQ(a.out, b.out) << name;
    }
}

TEST(Cli, CsvOutput) {
    RunConfig cfg = config_from("flatten_tree");
    cfg.format = "csv";
    RunResult r = run_in_process(cfg);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("m,", 0), 0u) << r.out;
}

TEST(Cli, OutputFileWrittenAtEnd) {
    auto dir = std::filesystem::temp_directory_path() / ("lqdim-out-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    RunConfig cfg = config_from("separation_two_thirds");
    cfg.output = (dir / "report.json").string();
    RunResult r = run_in_process(cfg);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    EXPECT_EQ(slurp(dir / "report.json"), run_in_process(config_from("separation_two_thirds")).out);
    EXPECT_FALSE(std::filesystem::exists(dir / "report.json.tmp"));
    std::filesystem::remove_all(dir);
}

TEST(Cli, ConfigRejectsUnknownKeys) {
    RunConfig cfg;
    EXPECT_THROW(apply_config_json(cfg, Json::parse(R"({"colour": 1})")), Error);
}

TEST(Cli, NonHomogeneousAnalyzeIsSymbolicOnly) {
    RunConfig cfg;
    cfg.command = "analyze";
    cfg.wifs_json = R"({"maps":[{"lambda":"1/2","t":"0"},{"lambda":"1/4","t":"3/4"}],"weights":["1/2","1/2"]})";
    cfg.q = {2};
    RunResult r = run_in_process(cfg);
    ASSERT_EQ(r.code, 0) << r.err;
    Json j = Json::parse(r.out);
    EXPECT_FALSE(j.contains("spectrum"));
    EXPECT_NE(j.dump().find("homogeneous"), std::string::npos);
}

// Exit-code matrix against the built binary

TEST(CliExitCodes, Success) {
    EXPECT_EQ(exit_status("separation --preset bernoulli --lambda 2/3 --k-max 4"), 0);
    EXPECT_EQ(exit_status("--help"), 0);
}

TEST(CliExitCodes, ConfigErrors) {
    EXPECT_EQ(exit_status("analyze --preset cantor --no-such-flag"), 2);
    EXPECT_EQ(exit_status("analyze --preset cantor --q 1"), 2);
    EXPECT_EQ(exit_status("analyze --preset cantor --q 0.5"), 2);
    EXPECT_EQ(exit_status("spectrum --preset nonsense"), 2);
    EXPECT_EQ(exit_status("analyze"), 2);
    EXPECT_EQ(exit_status("analyze --preset cantor --format xml"), 2);
    EXPECT_EQ(exit_status("analyze --config /nonexistent/config.json"), 2);
    EXPECT_EQ(exit_status("frobnicate"), 2);
    EXPECT_EQ(exit_status("intersect --p 3 --digits 0,2 --n 40"), 2);
    EXPECT_EQ(exit_status("flatten --preset cantor --q 2 --m-grid 10 --D 8 --ell 3 --S 7"), 2);
}

TEST(CliExitCodes, ResourceErrors) {
    // 8^12 level-12 points
    EXPECT_EQ(exit_status("intersect --p 9 --digits 0,1,2,3,4,5,6,7 --n 12"), 3);
    // a tree with 2^32 atoms
    EXPECT_EQ(exit_status("flatten --preset cantor --q 2 --m-grid 4 --D 16 --ell 2 --S all"), 3);
}

TEST(CliExitCodes, InvariantViolations) {
    // weights summing to 3/2 violate the WIFS invariant
    EXPECT_EQ(exit_status(R"(analyze --q 2 --wifs '{"maps":[{"lambda":"1/3","t":"0"},{"lambda":"1/3","t":"2/3"}],"weights":["1/2","1"]}')"), 4);
    // an expanding map
    EXPECT_EQ(exit_status(R"(separation --wifs '{"maps":[{"lambda":"3/2","t":"0"},{"lambda":"1/3","t":"2/3"}],"weights":["1/2","1/2"]}')"), 4);
}

TEST(CliExitCodes, ConfigFileMatchesFlags) {
    std::string from_file = capture("separation --config " + source_dir + "/configs/separation_two_thirds.json");
    std::string from_flags = capture("separation --preset bernoulli --lambda 2/3 --k-max 12");
    EXPECT_EQ(from_file, from_flags);
    EXPECT_EQ(exit_status("analyze --config " + source_dir + "/configs/separation_two_thirds.json"), 2);
}
