#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "tde_app.hpp"

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "tdesim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = tde::app::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<double> fields(const std::string& line) {
  std::vector<double> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(std::stod(f));
  return out;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("tdesim_test_" + name);
}

}  // namespace

TEST(Cli, DistanceTable) {
  const auto r = run_cli({"fig2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = lines_of(r.out);
  ASSERT_EQ(lines.size(), 102u);
  EXPECT_EQ(lines[0], "beta2,D_in_paper,D_in_tracenorm,D_out");
  const auto mid = fields(lines[51]);
  EXPECT_DOUBLE_EQ(mid[0], 0.5);
  EXPECT_NEAR(mid[1], 1.0, 1e-12);
  EXPECT_NEAR(mid[3], 1.0, 1e-12);
  const auto quarter = fields(lines[26]);
  EXPECT_NEAR(quarter[0], 0.25, 1e-12);
  EXPECT_NEAR(quarter[3], 0.75, 1e-12);
}

TEST(Cli, DistanceJson) {
  const auto r = run_cli({"fig2", "--steps", "5", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j.at("points").size(), 5u);
  EXPECT_EQ(j.at("points").at(1).at("trend_paper"), "amplified");
  EXPECT_EQ(j.at("points").at(2).at("trend_paper"), "unchanged");
}

TEST(Cli, EntropyColumns) {
  const auto r = run_cli({"fig3", "--pvac", "0.5", "--steps", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = lines_of(r.out);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "beta2,S_in,S_rho_d,S_out");
  EXPECT_NEAR(fields(lines[1])[1], 1.0, 1e-12);
}

TEST(Cli, CircuitDefaultAndFile) {
  const auto d = run_cli({"circuit", "--beta-sq", "0.25"});
  ASSERT_EQ(d.code, 0) << d.err;
  const auto lines = lines_of(d.out);
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[0], "row,col,re,im");
  EXPECT_NEAR(fields(lines[1])[2], 0.625, 1e-12);
  EXPECT_EQ(run_cli({"circuit", "--alpha-sq", "0.75"}).out, d.out);

  const auto path = temp_path("fig1.tdc");
  std::ofstream(path) << tde::circuit::fig1_program_text(0.25);
  const auto f = run_cli({"circuit", path.string()});
  EXPECT_EQ(f.code, 0) << f.err;
  EXPECT_EQ(f.out, d.out);

  std::ofstream(path) << "prepare q1 @0 |0>\ncnot q1 q3 @0\noutput q1 @0\n";
  const auto bad = run_cli({"circuit", path.string()});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("line 2"), std::string::npos) << bad.err;
  EXPECT_NE(bad.err.find("q3"), std::string::npos) << bad.err;
  std::filesystem::remove(path);
}

TEST(Cli, CircuitJson) {
  const auto r = run_cli({"circuit", "--beta-sq", "0.25", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  for (const char* key : {"input", "rho_s", "rho_d", "rho_out", "entropies"}) EXPECT_TRUE(j.contains(key)) << key;
}

TEST(Cli, NoSignalJson) {
  for (const char* basis : {"computational", "diagonal"}) {
    const auto r = run_cli({"nosignal", "--basis", basis, "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j.at("basis"), basis);
    ASSERT_EQ(j.at("outcomes").size(), 2u);
    EXPECT_NEAR(j.at("average").at("matrix").at(0).at(0).at(0).get<double>(), 0.5, 1e-12);
    EXPECT_NEAR(j.at("average").at("matrix").at(1).at(1).at(0).get<double>(), 0.5, 1e-12);
  }
}

TEST(Cli, Decohere) {
  const auto r = run_cli({"decohere"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("outcome,probability\n00,0.25\n01,0.25\n10,0.25\n11,0.25\n"), std::string::npos) << r.out;
}

TEST(Cli, ReverseProprietyAndSweep) {
  const auto rev = run_cli({"reverse", "--steps", "11"});
  EXPECT_EQ(rev.code, 0) << rev.err;
  EXPECT_EQ(lines_of(rev.out).size(), 12u);
  const auto prop = run_cli({"propriety"});
  EXPECT_EQ(prop.code, 0) << prop.err;
  EXPECT_NEAR(fields(lines_of(prop.out)[1].substr(lines_of(prop.out)[1].find(',') + 1)).back(), 1.0, 1e-12);
  const auto diag = run_cli({"propriety", "--basis", "diagonal"});
  EXPECT_NEAR(fields(lines_of(diag.out)[1].substr(lines_of(diag.out)[1].find(',') + 1)).back(), 0.0, 1e-12);
  const auto sweep = run_cli({"sweep", "--steps", "21"});
  EXPECT_EQ(sweep.code, 0) << sweep.err;
  EXPECT_EQ(lines_of(sweep.out)[0], "beta2,out00,out11,map00,map11,max_dev");
}

TEST(Cli, OutputIsDeterministicAndFileMatchesStdout) {
  for (const auto& cmd : std::vector<std::vector<std::string>>{
           {"fig2"}, {"fig3"}, {"sweep"}, {"nosignal", "--format", "json"}, {"circuit", "--format", "json"}}) {
    EXPECT_EQ(run_cli(cmd).out, run_cli(cmd).out) << cmd[0];
  }
  const auto path = temp_path("fig2.csv");
  ASSERT_EQ(run_cli({"fig2", "--out", path.string()}).code, 0);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), run_cli({"fig2"}).out);
  std::filesystem::remove(path);
}

TEST(Cli, BadArgumentsExitNonZero) {
  EXPECT_NE(run_cli({}).code, 0);
  EXPECT_NE(run_cli({"fig2", "--bogus"}).code, 0);
  EXPECT_NE(run_cli({"fig2", "--steps", "1"}).code, 0);
  EXPECT_NE(run_cli({"fig2", "--format", "xml"}).code, 0);
  EXPECT_NE(run_cli({"circuit", "--beta-sq", "0.2", "--alpha-sq", "0.8"}).code, 0);
  EXPECT_NE(run_cli({"circuit", "--beta-sq", "1.5"}).code, 0);
  EXPECT_NE(run_cli({"nosignal", "--basis", "polar"}).code, 0);
  EXPECT_NE(run_cli({"circuit", "/nonexistent/prog.tdc"}).code, 0);
  EXPECT_NE(run_cli({"frobnicate"}).code, 0);
}

TEST(Cli, HelpExitsZero) {
  const auto r = run_cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("fig2"), std::string::npos);
}
