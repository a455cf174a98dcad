#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "seqtest/cli/commands.hpp"

namespace seqtest::cli {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Parsing, Numbers) {
  EXPECT_EQ(parse_number("x", " 1e-3 "), 1e-3);
  EXPECT_THROW(parse_number("x", "1e-3a"), ValidationError);
  EXPECT_THROW(parse_number("x", ""), ValidationError);
  EXPECT_EQ(parse_integer("n", "42"), 42);
  EXPECT_THROW(parse_integer("n", "4.5"), ValidationError);
}

TEST(Parsing, Angles) {
  EXPECT_DOUBLE_EQ(parse_angle("t", "pi"), kPi);
  EXPECT_DOUBLE_EQ(parse_angle("t", "pi/10"), kPi / 10.0);
  EXPECT_DOUBLE_EQ(parse_angle("t", "3pi/4"), 3.0 * kPi / 4.0);
  EXPECT_DOUBLE_EQ(parse_angle("t", "0.5*pi"), kPi / 2.0);
  EXPECT_DOUBLE_EQ(parse_angle("t", "-pi/2"), -kPi / 2.0);
  EXPECT_DOUBLE_EQ(parse_angle("t", "0.25"), 0.25);
  EXPECT_THROW(parse_angle("t", "pi/0"), ValidationError);
  EXPECT_THROW(parse_angle("t", "pi*2"), ValidationError);
}

TEST(Parsing, GridsRangesLists) {
  const Grid g = parse_grid("g", "0:1:5");
  EXPECT_EQ(g.values(), (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
  EXPECT_DOUBLE_EQ(parse_grid("g", "pi/10:pi:10").values().back(), kPi);
  EXPECT_THROW(parse_grid("g", "0:1"), ValidationError);
  EXPECT_THROW(parse_grid("g", "1:0:3"), ValidationError);
  EXPECT_EQ(parse_int_range("r", "2:10:4").values(), (std::vector<int>{2, 6, 10}));
  EXPECT_EQ(parse_int_range("r", "3:5").values(), (std::vector<int>{3, 4, 5}));
  EXPECT_THROW(parse_int_range("r", "0:5"), ValidationError);
  EXPECT_EQ(parse_list("l", "0, pi/2").size(), 2u);
}

TEST(Config, UnknownAndInvalidFields) {
  ExperimentConfig cfg;
  EXPECT_THROW(cfg.set("colour", "red"), ValidationError);
  EXPECT_THROW(cfg.set("pair", "0.5,0.5"), ValidationError);
  EXPECT_THROW(cfg.set("pair", "1.5,0.5,1"), ValidationError);
  EXPECT_THROW(cfg.set("n-max", "0"), ValidationError);
  cfg.set("pair", "0.7,0.9,pi/10");
  EXPECT_DOUBLE_EQ(cfg.pair->theta, kPi / 10.0);
}

TEST(Config, ErrorSpecModes) {
  ExperimentConfig cfg;
  cfg.set("eps0", "1e-6");
  const ErrorSpec s = cfg.error_spec();
  EXPECT_EQ(s.mode, ErrorMode::kStrong);
  EXPECT_EQ(s.eps1, 1e-6);
  cfg.set("mode", "weak-asymmetric");
  EXPECT_THROW(cfg.error_spec(), ValidationError);
  cfg.set("alpha", "0.05");
  cfg.set("beta", "1e-6");
  EXPECT_EQ(*cfg.error_spec().alpha, 0.05);
}

TEST(Config, JsonFileWithFlagOverride) {
  const std::string path = ::testing::TempDir() + "seqtest_cfg.json";
  {
    std::ofstream os(path);
    os << R"({"command": "bounds", "pair": [0.9, 0.5, 0.785], "eps0": 1e-4, "trials": 10})";
  }
  ExperimentConfig cfg;
  apply_config_file(cfg, path, "bounds");
  EXPECT_DOUBLE_EQ(cfg.pair->r0, 0.9);
  EXPECT_EQ(*cfg.eps0, 1e-4);
  cfg.set("eps0", "1e-5");
  EXPECT_EQ(*cfg.eps0, 1e-5);
  ExperimentConfig other;
  EXPECT_THROW(apply_config_file(other, path, "region"), ValidationError);
  {
    std::ofstream os(path);
    os << R"({"pair": "0.9,0.5,1", "unknown": 3})";
  }
  ExperimentConfig bad;
  EXPECT_THROW(apply_config_file(bad, path, "bounds"), ValidationError);
  {
    std::ofstream os(path);
    os << "{not json";
  }
  EXPECT_THROW(apply_config_file(bad, path, "bounds"), ValidationError);
  std::remove(path.c_str());
}

TEST(Table, CsvQuotingAndMetadata) {
  Table t({"name", "value"});
  t.set_meta("command", std::string("demo"));
  t.set_meta("seed", std::int64_t{7});
  t.add_warning("careful");
  t.add_row({std::string("a,b"), 0.1});
  t.add_row({std::string("say \"hi\""), kInf});
  t.add_row({std::string("plain"), Cell{}});
  std::ostringstream os;
  t.write(os, "csv");
  EXPECT_EQ(os.str(),
            "# command=demo\n# seed=7\n# warning=careful\nname,value\n\"a,b\",0.1\n\"say \"\"hi\"\"\",inf\nplain,\n");
  EXPECT_THROW(t.add_row({1.0}), ShapeError);
  EXPECT_THROW(t.write(os, "xml"), ValidationError);
}

TEST(Table, JsonRowsAndNonFiniteValues) {
  Table t({"x", "y"});
  t.set_meta("units", std::string("nats"));
  t.add_row({1.5, -kInf});
  t.add_row({std::numeric_limits<double>::quiet_NaN(), std::int64_t{3}});
  std::ostringstream os;
  t.write(os, "json");
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  const auto meta = nlohmann::json::parse(line);
  EXPECT_EQ(meta["metadata"]["units"], "nats");
  EXPECT_EQ(meta["metadata"]["columns"], (std::vector<std::string>{"x", "y"}));
  std::getline(in, line);
  const auto r1 = nlohmann::json::parse(line);
  EXPECT_EQ(r1["x"], 1.5);
  EXPECT_EQ(r1["y"], "-inf");
  std::getline(in, line);
  EXPECT_EQ(nlohmann::json::parse(line)["x"], "nan");
}

TEST(Table, ShortestRoundTripNumbers) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1e-300), "1e-300");
  EXPECT_EQ(std::stod(format_number(kPi)), kPi);
}

ExperimentConfig with(std::initializer_list<std::pair<const char*, const char*>> kv) {
  ExperimentConfig cfg;
  for (const auto& [k, v] : kv) cfg.set(k, v);
  return cfg;
}

TEST(Commands, DivergenceIdenticalStatesAreZero) {
  const CommandOutput out = run_command("divergence", with({{"pair", "0.5,0.5,0"}}));
  const Table& t = out.main;
  const std::size_t value = t.column("value");
  for (const auto& row : t.rows()) EXPECT_NEAR(std::get<double>(row[value]), 0.0, 1e-14);
  EXPECT_FALSE(t.warnings().empty());
}

TEST(Commands, DivergencePureStatesCarryInfinityMarkers) {
  const CommandOutput out = run_command("divergence", with({{"pair", "1,1,1"}}));
  const Table& t = out.main;
  EXPECT_EQ(std::get<std::string>(t.rows()[0][t.column("note")]), "infinite");
}

TEST(Commands, DivergenceCommutingFixture) {
  const CommandOutput out = run_command("divergence", with({{"pair", "0.5,0.5,pi"}}));
  EXPECT_NEAR(std::get<double>(out.main.rows()[0][out.main.column("value")]), 0.5 * std::log(3.0), 1e-14);
  const CommandOutput bits = run_command("divergence", with({{"pair", "0.5,0.5,pi"}, {"log-base", "2"}}));
  EXPECT_NEAR(std::get<double>(bits.main.rows()[0][bits.main.column("value")]), 0.5 * std::log2(3.0), 1e-14);
}

TEST(Commands, LocalPhiSweepFindsSingularMinimum) {
  const CommandOutput out = run_command("local", with({{"pair", "1,1,pi"}, {"phi-grid", "33"}, {"eps0", "1e-6"}}));
  const Table& t = out.main;
  EXPECT_EQ(t.columns()[0], "phi");
  bool has_optimum = false;
  for (const auto& row : t.rows()) {
    if (std::holds_alternative<std::string>(row[t.column("note")]) &&
        std::get<std::string>(row[t.column("note")]).find("optimum") != std::string::npos) {
      has_optimum = true;
      EXPECT_NEAR(std::get<double>(row[t.column("phi")]), kPi / 2.0, 1e-9);
    }
  }
  EXPECT_TRUE(has_optimum);
}

TEST(Commands, LocalGridRatioAtLeastOne) {
  const CommandOutput out = run_command("local", with({{"sweep", "grid"}, {"r-grid", "0.1:0.95:4"}, {"theta-grid", "pi/10:pi:4"}}));
  const std::size_t ratio = out.main.column("ratio");
  for (const auto& row : out.main.rows()) {
    EXPECT_GE(std::get<double>(row[ratio]), 1.0);
    EXPECT_LE(std::get<double>(row[ratio]), 4.0);
  }
}

TEST(Commands, RegionColumnsAndDiagonal) {
  const CommandOutput out = run_command("region", with({{"r-grid", "0.1:0.9:3"}, {"theta-list", "0,pi/2"}}));
  EXPECT_EQ(out.main.columns(), (std::vector<std::string>{"theta", "r0", "r1", "region"}));
  EXPECT_EQ(out.main.rows().size(), 18u);
  for (const auto& row : out.main.rows()) {
    const double th = std::get<double>(row[0]);
    const std::string region = std::get<std::string>(row[3]);
    if (th == 0.0) EXPECT_NE(region, "not_attained");
    if (th > 0.0 && std::get<double>(row[1]) == std::get<double>(row[2])) EXPECT_EQ(region, "not_attained");
  }
}

TEST(Commands, PureFixtures) {
  const CommandOutput out = run_command("pure", with({{"s-grid", "0:0.5:2"}}));
  EXPECT_EQ(std::get<double>(out.main.rows()[0][out.main.column("bayes")]), 1.0);
  EXPECT_EQ(std::get<double>(out.main.rows()[1][out.main.column("bayes")]), 2.0);
  const CommandOutput scan = run_command("pure", with({{"sweep", "c0"}, {"s", "0.5"}}));
  for (const auto& [k, v] : scan.main.meta()) {
    if (k == "argmin_worst_case_c0") EXPECT_NEAR(std::get<double>(v), 0.5, 0.75 / 101.0);
  }
}

TEST(Commands, SdpCurveWarnsBelowCriticalCopyNumber) {
  const CommandOutput out = run_command("sdp-curve", with({{"pair", "0.9,0.9,pi/4"}, {"eps0", "1e-3"}, {"n-max", "3"}}));
  EXPECT_FALSE(out.main.warnings().empty());
  bool warning_row = false;
  for (const auto& row : out.main.rows()) {
    const Cell& note = row[out.main.column("note")];
    warning_row |= std::holds_alternative<std::string>(note) && std::get<std::string>(note).find("n*") != std::string::npos;
  }
  EXPECT_TRUE(warning_row);
}

TEST(Commands, SdpCurveCommutingLpMatchesSdp) {
  const auto base = with({{"pair", "0.5,0.5,pi"}, {"eps0", "1e-4"}, {"n-max", "6"}});
  auto lp_cfg = base;
  lp_cfg.set("method", "lp");
  const Table sdp = run_command("sdp-curve", base).main;
  const Table lp = run_command("sdp-curve", lp_cfg).main;
  // The first row carries the truncation warning.
  ASSERT_EQ(sdp.rows().size(), 7u);
  ASSERT_EQ(lp.rows().size(), 7u);
  const std::size_t col = sdp.column("T");
  for (std::size_t i = 1; i < 7; ++i) {
    EXPECT_NEAR(std::get<double>(sdp.rows()[i][col]), std::get<double>(lp.rows()[i][col]), 1e-6);
  }
}

TEST(Commands, BoundsOrthogonalPureAreOrderOne) {
  const CommandOutput out = run_command("bounds", with({{"pair", "1,1,pi"}}));
  const Table& t = out.main;
  const auto& row = t.rows()[0];
  EXPECT_EQ(std::get<double>(row[t.column("n0")]), 1.0);
  EXPECT_EQ(std::get<double>(row[t.column("n1")]), 1.0);
}

TEST(Commands, UnknownCommand) { EXPECT_THROW(run_command("plot", ExperimentConfig{}), ValidationError); }

}  // namespace
}  // namespace seqtest::cli
