#include "rotframe/harness.hpp"
#include "rotframe/universality.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace rotframe;
using nlohmann::json;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string &csv) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string> &header, const std::string &name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  ADD_FAILURE() << "missing column " << name;
  return 0;
}

} // namespace

TEST(Config, StrictParsing) {
  EXPECT_THROW(parse_config(json::parse(R"({"experiment":"zinv_sweep","bogus":1})")), config_error);
  EXPECT_THROW(parse_config(json::parse(R"({"experiment":"nope"})")), config_error);
  EXPECT_THROW(parse_config(json::parse(R"({"seed":1})")), config_error);
  EXPECT_THROW(parse_config(json::parse(R"({"experiment":"zinv_sweep","l_RZ":"25"})")), config_error);
  EXPECT_THROW(parse_config(json::parse(R"({"experiment":"zinv_sweep","l_RZ":[0.3]})")), config_error);
  EXPECT_THROW(parse_config(json::parse(R"({"experiment":"xrf_sweep","N":[1]})")), config_error);
  EXPECT_THROW(parse_config(json::parse(R"({"experiment":"zinv_sweep","restarts":0})")), config_error);
  EXPECT_THROW(load_config("/nonexistent/config.json"), config_error);
}

TEST(Config, HalfIntegerForms) {
  const auto c = parse_config(json::parse(R"({"experiment":"zinv_sweep","l_sys":["1/2",1,1.5],"l_RZ":[25,"51/2"],"seed":7})"));
  ASSERT_EQ(c.l_sys.size(), 3u);
  EXPECT_EQ(c.l_sys[0], HalfInt::half());
  EXPECT_EQ(c.l_sys[2], HalfInt::from_twice(3));
  EXPECT_EQ(c.l_RZ[1], HalfInt::from_twice(51));
  EXPECT_EQ(c.seed, 7u);
}

TEST(Run, EmptyGridGivesHeaderOnly) {
  const auto out = run(parse_config(json::parse(R"({"experiment":"zinv_sweep","l_RZ":[]})")));
  const auto rows = parse_csv(out.csv);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0], csv_header(Experiment::zinv_sweep));
  EXPECT_EQ(out.violations, 0);
}

TEST(Run, ZinvSweepRowsWithinBound) {
  const auto out = run(parse_config(json::parse(R"({"experiment":"zinv_sweep","l_RZ":[25,50,100,200,400]})")));
  const auto rows = parse_csv(out.csv);
  ASSERT_EQ(rows.size(), 6u);
  const auto &h = rows[0];
  for (std::size_t r = 1; r < rows.size(); ++r) {
    EXPECT_LE(std::stod(rows[r][column(h, "measured")]), std::stod(rows[r][column(h, "bound")]));
    EXPECT_EQ(rows[r][column(h, "error")], "");
  }
  EXPECT_EQ(out.violations, 0);
  EXPECT_TRUE(out.summary["log_log_slopes"].contains("l_sys=1/2,k=0"));
}

TEST(Run, Scheme2CurveBoundColumn) {
  const auto out = run(parse_config(json::parse(R"({"experiment":"scheme2_curve","x":[10,30,100,300,1000]})")));
  const auto rows = parse_csv(out.csv);
  ASSERT_EQ(rows.size(), 6u);
  const auto &h = rows[0];
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const double x = std::stod(rows[r][column(h, "x")]);
    const double w = lambert_w(x);
    EXPECT_NEAR(std::stod(rows[r][column(h, "bound")]), std::exp(-w) + w * w / x, 1e-14);
  }
}

TEST(Run, ByteIdenticalAcrossThreadCounts) {
  const auto cfg = parse_config(json::parse(R"({"experiment":"xrf_sweep","N":[5,10],"targets":3,"seed":42})"));
  const auto a = run(cfg, 1), b = run(cfg, 4), c = run(cfg, 1);
  EXPECT_EQ(a.csv, b.csv);
  EXPECT_EQ(a.csv, c.csv);
  EXPECT_EQ(a.summary.dump(), b.summary.dump());
}

TEST(Run, SeedChangesRows) {
  auto cfg = parse_config(json::parse(R"({"experiment":"xrf_sweep","N":[5],"targets":1})"));
  const auto a = run(cfg);
  cfg.seed = 2;
  EXPECT_NE(a.csv, run(cfg).csv);
}

TEST(Run, TimingColumnIsOptIn) {
  auto cfg = parse_config(json::parse(R"({"experiment":"lie_closure_table","d":[2]})"));
  EXPECT_EQ(run(cfg).csv.find("wall_ms"), std::string::npos);
  cfg.timing = true;
  EXPECT_NE(run(cfg).csv.find("wall_ms"), std::string::npos);
}

TEST(Run, FailingRowKeepsSweepAlive) {
  // d(U, scheme I) needs l_RZ >= N + 3 l_sys; optimal_N with a tiny frame breaks it per row
  const auto out = run(parse_config(json::parse(R"({"experiment":"scheme1_sweep","optimal_N":true,"l_RZ":[2,500]})")));
  const auto rows = parse_csv(out.csv);
  ASSERT_EQ(rows.size(), 3u);
  const auto e = column(rows[0], "error");
  EXPECT_NE(rows[1][e], "");
  EXPECT_EQ(rows[2].size() > e ? rows[2][e] : "", "");
  EXPECT_GE(out.violations, 1);
}

TEST(Run, LieClosureAndLemma2Tables) {
  const auto lc = parse_csv(run(parse_config(json::parse(R"({"experiment":"lie_closure_table","d":[2,3,4]})"))).csv);
  for (std::size_t r = 1; r < lc.size(); ++r) EXPECT_EQ(lc[r][column(lc[0], "dimension")], lc[r][column(lc[0], "expected")]);
  const auto out = run(parse_config(json::parse(R"({"experiment":"lemma2_grid","l1":["1/2",1],"l2":[10,1000],"k":[0,1]})")));
  EXPECT_EQ(out.violations, 0);
  EXPECT_EQ(parse_csv(out.csv).size(), 1u + 5 * 2 * 2);
}

TEST(Format, FifteenSignificantDigits) {
  EXPECT_EQ(format_number(1.0 / 3), "0.333333333333333");
  EXPECT_EQ(format_number(0.25), "0.25");
  EXPECT_EQ(format_number(1e-20), "1e-20");
}

TEST(CgCli, Examples) {
  std::ostringstream out, err;
  EXPECT_EQ(cg_cli({"1", "1", "1", "1", "2", "2"}, out, err), 0);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "1.000000000000000");
  out.str("");
  EXPECT_EQ(cg_cli({"1/2", "1/2", "1/2", "-1/2", "0", "0"}, out, err), 0);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "0.707106781186548");
  out.str("");
  EXPECT_EQ(cg_cli({"1", "0", "1", "1", "2", "2"}, out, err), 0);
  EXPECT_NE(out.str().find("violated"), std::string::npos);
}

TEST(CgCli, MalformedInput) {
  std::ostringstream out, err;
  EXPECT_NE(cg_cli({"1/2", "x", "1", "1", "2", "2"}, out, err), 0);
  EXPECT_NE(err.str().find("usage"), std::string::npos);
  EXPECT_NE(cg_cli({"1"}, out, err), 0);
  EXPECT_NE(cg_cli({"1/2", "1", "1", "1", "2", "2"}, out, err), 0);
}

TEST(Dilate, ReportsResiduals) {
  const json spec = json::parse(R"({"group":"cyclic","n":2,"charges":[0,1],"kraus":[
      {"j":0,"matrix":[[0.8,0],[0,0.8]]},{"j":1,"matrix":[[0,[0.6,0]],[0.6,0]]}]})");
  bool ok = false;
  const json r = run_dilation(spec, ok);
  EXPECT_TRUE(ok);
  EXPECT_EQ(r["ancilla_dim"], 3);
  EXPECT_LT(r["unitarity_residual"].get<double>(), 1e-10);
  EXPECT_THROW(run_dilation(json::parse(R"({"group":"su2","kraus":[],"extra":1})"), ok), config_error);
}
