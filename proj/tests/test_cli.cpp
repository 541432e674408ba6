#include "svolkit/cli.hpp"
#include "svolkit/errors.hpp"
#include "svolkit/pricing.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace svolkit;

namespace {

RunConfig lognormal_config() {
    RunConfig c;
    c.model.x0 = 1.0;
    c.model.y0 = 0.2;
    c.model.rho = -0.5;
    c.model.vol = {VolKind::lognormal, 0.3};
    c.t = 1.0;
    c.grid = {0.5, 1.5, 11};
    return c;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SVOLKIT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(Config, JsonRoundTripIsIdentity) {
    RunConfig c = lognormal_config();
    c.task = Task::price;
    c.strikes = {0.85, 1.0, 1.0 / 3.0};
    c.kind = OptionKind::put;
    c.method = Method::mixing_mc;
    c.n_paths = 12345;
    c.n_steps = 77;
    c.seed = 18446744073709551557ull;
    c.threads = 3;
    c.format = OutputFormat::json;
    c.out_path = "out.json";
    c.allow_local_martingale = true;
    c.model.horizon = 2.5;
    c.model.y0 = 0.1 + 0.2;
    const RunConfig back = config_from_json(config_to_json(c));
    EXPECT_EQ(config_to_json(back), config_to_json(c));
    EXPECT_EQ(back.seed, c.seed);
    EXPECT_EQ(back.model.y0, c.model.y0);
    EXPECT_EQ(back.strikes, c.strikes);
    EXPECT_EQ(back.kind, OptionKind::put);
    EXPECT_EQ(back.method, Method::mixing_mc);
}

TEST(Config, BareModelDocument) {
    const ModelSpec m =
        model_from_json(R"({"x0": 2, "y0": 0.3, "rho": -0.2, "horizon": 3, "vol": {"kind": "bessel3"}})");
    EXPECT_EQ(m.x0, 2.0);
    EXPECT_EQ(m.vol.kind, VolKind::bessel3);
    EXPECT_EQ(config_from_json(model_to_json(m)).model.horizon, 3.0);
}

TEST(Config, RejectsBadInput) {
    EXPECT_THROW(config_from_json("{not json"), ConfigError);
    EXPECT_THROW(config_from_json(R"({"model": {"x0": 1}, "bogus": 1})"), ConfigError);
    EXPECT_THROW(config_from_json(R"({"model": {"vol": {"kind": "heston"}}})"), ConfigError);
    EXPECT_THROW(config_from_json(R"({"model": {}, "method": "magic"})"), ConfigError);
    EXPECT_THROW(parse_r_grid("0.5:1.5"), ConfigError);
    EXPECT_THROW(parse_r_grid("a:1:3"), ConfigError);
    RunConfig c = lognormal_config();
    c.grid = {1.5, 0.5, 11};
    EXPECT_THROW(c.validate(), ConfigError);
    c.grid = {0.5, 1.5, 1};
    EXPECT_THROW(c.validate(), ConfigError);
    c = lognormal_config();
    c.t = 2.0;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, GridParsing) {
    const RGrid g = parse_r_grid("0.25:4:16");
    EXPECT_EQ(g.r_min, 0.25);
    EXPECT_EQ(g.r_max, 4.0);
    EXPECT_EQ(g.n_points, 16);
}

TEST(Output, ShortestRoundTripFloats) {
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(1.0 / 3.0), "0.3333333333333333");
    EXPECT_EQ(std::stod(format_double(2.0275964998454312)), 2.0275964998454312);
}

TEST(Density, ConstantClosedFormIsLognormal) {
    RunConfig c;
    c.model.vol = {VolKind::constant, 0.2};
    c.method = Method::closed_form;
    const auto rows = parse_csv(cmd_density(c));
    ASSERT_EQ(rows.size(), 12u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"r", "density", "stderr"}));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double r = std::stod(rows[i][0]);
        const double z = (std::log(r) + 0.02) / 0.2;
        EXPECT_NEAR(std::stod(rows[i][1]), std::exp(-0.5 * z * z) / (std::sqrt(2.0 * M_PI) * 0.2 * r), 1e-15);
        EXPECT_EQ(rows[i][2], "");
    }
}

TEST(Density, LognormalAutoMatchesGolden) {
    const std::string out = cmd_density(lognormal_config());
    const auto got = parse_csv(out);
    const auto want = parse_csv(read_file(std::string(SVOLKIT_GOLDEN_DIR) + "/lognormal_density.csv"));
    ASSERT_EQ(got.size(), want.size());
    ASSERT_GT(want.size(), 1u);
    EXPECT_EQ(got[0], want[0]);
    for (std::size_t i = 1; i < want.size(); ++i) {
        EXPECT_EQ(got[i][0], want[i][0]);
        EXPECT_NEAR(std::stod(got[i][1]), std::stod(want[i][1]), 1e-6) << "row " << i;
        EXPECT_EQ(got[i][2], "");
    }
    EXPECT_EQ(out.find('\r'), std::string::npos);
}

TEST(Density, JsonOutput) {
    RunConfig c;
    c.model.vol = {VolKind::constant, 0.2};
    c.format = OutputFormat::json;
    c.grid = {0.9, 1.1, 3};
    const auto j = nlohmann::json::parse(cmd_density(c));
    EXPECT_EQ(j["method"], "closed_form");
    ASSERT_EQ(j["rows"].size(), 3u);
    EXPECT_TRUE(j["rows"][0]["stderr"].is_null());
}

TEST(Density, Bessel3McDeterministicAcrossThreads) {
    RunConfig c;
    c.model.vol.kind = VolKind::bessel3;
    c.model.y0 = 1.0;
    c.model.rho = -0.3;
    c.model.horizon = 0.5;
    c.t = 0.5;
    c.n_paths = 5000;
    c.seed = 42;
    c.threads = 1;
    const std::string a = cmd_density(c);
    c.threads = 3;
    EXPECT_EQ(cmd_density(c), a);
    EXPECT_EQ(cmd_density(c), a);
    EXPECT_NE(parse_csv(a)[1][2], "");
}

TEST(Density, PayoffMethodIsConfigError) {
    RunConfig c = lognormal_config();
    c.method = Method::payoff_mc;
    EXPECT_THROW(cmd_density(c), ConfigError);
}

TEST(Price, ConstantRowsAreBlackScholes) {
    RunConfig c;
    c.model.vol = {VolKind::constant, 0.2};
    c.task = Task::price;
    const auto rows = parse_csv(cmd_price(c));
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"strike", "kind", "value", "stderr", "method"}));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double k = std::stod(rows[i][0]);
        EXPECT_EQ(std::stod(rows[i][2]), black_scholes_price(1.0, k, 0.2, 1.0, OptionKind::call));
        EXPECT_EQ(rows[i][4], "black_scholes");
    }
}

TEST(Price, PositiveCorrelationRefusedUnlessOverridden) {
    RunConfig c = lognormal_config();
    c.model.rho = 0.5;
    c.n_paths = 2000;
    EXPECT_THROW(cmd_price(c), MartingaleViolation);
    c.allow_local_martingale = true;
    const auto rows = parse_csv(cmd_price(c));
    EXPECT_EQ(rows[1][4], "mixing_mc");
}

TEST(Validate, EmptyCheckListIsVacuouslyTrue) {
    RunConfig c;
    c.format = OutputFormat::json;
    const ValidateOutcome v = cmd_validate(c, std::vector<std::string>{}, false);
    EXPECT_TRUE(v.overall);
    const auto j = nlohmann::json::parse(v.text);
    EXPECT_TRUE(j["overall"].get<bool>());
    EXPECT_TRUE(j["checks"].empty());
}

TEST(Validate, CorruptedThetaFailsGNormalization) {
    RunConfig c;
    c.format = OutputFormat::json;
    const ValidateOutcome good = cmd_validate(c, std::vector<std::string>{"g_normalization"}, false);
    EXPECT_TRUE(good.overall);
    const ValidateOutcome bad = cmd_validate(c, std::vector<std::string>{"g_normalization"}, true);
    EXPECT_FALSE(bad.overall);
    const auto j = nlohmann::json::parse(bad.text);
    bool named = false;
    for (const auto& chk : j["checks"])
        if (!chk["pass"].get<bool>() && chk["name"].get<std::string>().find("g_normalization") == 0) named = true;
    EXPECT_TRUE(named);
}

TEST(Validate, UnknownCheckIsConfigError) {
    RunConfig c;
    EXPECT_THROW(cmd_validate(c, std::vector<std::string>{"nope"}, false), ConfigError);
}

TEST(Binary, ExitCodes) {
    EXPECT_EQ(run_cli("density --model constant --sigma 0.2"), kExitOk);
    EXPECT_EQ(run_cli("density --model heston"), kExitConfig);
    EXPECT_EQ(run_cli("density --r-grid 2:1:5"), kExitConfig);
    EXPECT_EQ(run_cli("density --config /nonexistent.json"), kExitConfig);
    EXPECT_EQ(run_cli("price --model lognormal --rho 0.5 --paths 1000"), kExitMartingale);
    EXPECT_EQ(run_cli("price --model lognormal --rho 0.5 --paths 1000 --allow-local-martingale"), kExitOk);
    EXPECT_EQ(run_cli("validate --checks ''"), kExitOk);
    EXPECT_EQ(run_cli("validate --checks g_normalization --inject-theta-fault"), kExitValidation);
    EXPECT_EQ(run_cli("frobnicate"), kExitConfig);
}

TEST(Binary, ConfigFileWithFlagOverride) {
    const std::string cfg = testing::TempDir() + "svolkit_cfg.json";
    const std::string out = testing::TempDir() + "svolkit_out.csv";
    RunConfig c;
    c.model.vol = {VolKind::constant, 0.2};
    c.grid = {0.9, 1.1, 3};
    std::ofstream(cfg) << config_to_json(c);
    ASSERT_EQ(run_cli("density --config " + cfg + " --sigma 0.3 --out " + out), kExitOk);
    RunConfig expect = c;
    expect.model.vol.sigma = 0.3;
    EXPECT_EQ(read_file(out), cmd_density(expect));
}
