#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "maxreg/maxreg.hpp"

using namespace maxreg;
namespace fs = std::filesystem;

namespace {

json small_config() {
  return json::parse(R"({
    "domain": {"kind": "rectangle", "params": {"lo": [0, 0], "hi": [1, 1]}},
    "h": 0.0625,
    "m": 1,
    "alpha": 0,
    "p": [2],
    "fields": [{"kind": "gaussian", "center": [0.5, 0.5], "width": 0.2}],
    "checks": [],
    "seed": 1
  })");
}

std::string pointer_of(const json& j) {
  try {
    parse_config(j);
  } catch (const config_error& e) {
    return e.pointer();
  }
  return "<no error>";
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("maxreg_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MAXREG_CLI) + " " + args + " > /dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

fs::path write_config(const fs::path& dir, const json& j) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(is), {});
}

VerificationReport row(const std::string& id, bool pass) {
  VerificationReport r;
  r.check_id = id;
  r.exponents = exponent_table(1, 2, {4}, 1.0);
  r.pass_fraction = pass ? 1.0 : 0.5;
  r.empirical_constant = 2.5;
  r.pass = pass;
  return r;
}

} // namespace

TEST(ParseConfig, MinimalConfig) {
  const RunConfig c = parse_config(small_config());
  EXPECT_EQ(c.domain.kind, "rectangle");
  EXPECT_EQ(c.h, 0.0625);
  EXPECT_EQ(c.m, 1);
  EXPECT_TRUE(c.checks.empty());
  EXPECT_EQ(c.output_dir, "out");
}

TEST(ParseConfig, ErrorsCarryJsonPointers) {
  json j = small_config();
  j["checks"] = {"thm21", "thm99"};
  EXPECT_EQ(pointer_of(j), "/checks/1");
  j = small_config();
  j["fields"][0]["kind"] = "spline";
  EXPECT_EQ(pointer_of(j), "/fields/0/kind");
  j = small_config();
  j["colour"] = "blue";
  EXPECT_EQ(pointer_of(j), "/colour");
  j = small_config();
  j.erase("h");
  EXPECT_EQ(pointer_of(j), "/h");
  j = small_config();
  j["p"] = {2, 2};
  EXPECT_EQ(pointer_of(j), "/p");
  j = small_config();
  j["threads"] = "many";
  EXPECT_EQ(pointer_of(j), "/threads");
  j = small_config();
  j["domain"]["kind"] = "torus";
  EXPECT_EQ(pointer_of(j), "/domain/kind");
  j = small_config();
  j["h"] = "small";
  EXPECT_EQ(pointer_of(j), "/h");
}

TEST(ParseConfig, AllExpandsToEveryCheck) {
  json j = small_config();
  j["checks"] = {"all"};
  EXPECT_EQ(parse_config(j).checks, known_checks());
}

TEST(ParseConfig, ShippedConfigsParse) {
  for (const char* name : {"standard.json", "calculus.json", "alpha0.json"})
    EXPECT_NO_THROW(load_config(std::string(MAXREG_SOURCE_DIR) + "/configs/" + name)) << name;
}

TEST(EmitReport, SinglePassingRow) {
  const std::string s = emit_report({row("thm23", true)});
  std::istringstream is(s);
  std::string header, line, extra;
  std::getline(is, header);
  std::getline(is, line);
  EXPECT_FALSE(std::getline(is, extra));
  EXPECT_EQ(header.substr(0, 8), "check_id");
  EXPECT_EQ(line.substr(0, 5), "thm23");
  EXPECT_EQ(line.substr(line.size() - 4), "true");
  EXPECT_EQ(header.size(), line.size());
}

TEST(EmitReport, RowsSortedByCheckId) {
  const std::string s = emit_report({row("zero_boundary", false), row("eq21", true), row("continuity", true)});
  const auto a = s.find("continuity"), b = s.find("eq21"), c = s.find("zero_boundary");
  EXPECT_LT(a, b);
  EXPECT_LT(b, c);
}

TEST(EmitReport, EmptyListIsAnError) {
  try {
    emit_report({});
    FAIL();
  } catch (const argument_error& e) {
    EXPECT_STREQ(e.what(), "nothing to report");
  }
}

TEST(EmitReport, SurvivesJsonRoundTrip) {
  const std::vector<VerificationReport> rs{row("eq21", true), row("thm23", false)};
  EXPECT_EQ(emit_report(reports_from_json(json::parse(dump_json(to_json(rs))))), emit_report(rs));
}

TEST(Cli, NoChecksWritesFieldsOnly) {
  const fs::path d = scratch("nochecks");
  const fs::path cfg = write_config(d, small_config());
  EXPECT_EQ(run_cli("verify --config " + cfg.string() + " --out " + (d / "out").string()), 0);
  EXPECT_TRUE(fs::exists(d / "out" / "fields" / "f1.csv"));
  EXPECT_TRUE(fs::exists(d / "out" / "fields" / "delta.csv"));
  EXPECT_FALSE(fs::exists(d / "out" / "maximal"));
}

TEST(Cli, ComputeWritesMaximalFields) {
  const fs::path d = scratch("compute");
  const fs::path cfg = write_config(d, small_config());
  EXPECT_EQ(run_cli("compute --config " + cfg.string() + " --out " + (d / "out").string()), 0);
  EXPECT_TRUE(fs::exists(d / "out" / "maximal" / "maximal.csv"));
  EXPECT_TRUE(fs::exists(d / "out" / "maximal" / "spherical.csv"));
  const json a = json::parse(slurp(d / "out" / "maximal" / "argmax.json"));
  EXPECT_GT(a.size(), 0u);
}

TEST(Cli, ExponentOneIsAHypothesisFailure) {
  const fs::path d = scratch("pone");
  json j = small_config();
  j["p"] = {1.0};
  const fs::path cfg = write_config(d, j);
  EXPECT_EQ(run_cli("verify --config " + cfg.string() + " --out " + (d / "out").string()), 2);
  const std::string msg = std::string(MAXREG_CLI) + " verify --config " + cfg.string() + " --out " +
                          (d / "out").string() + " 2> " + (d / "err.txt").string();
  EXPECT_EQ(WEXITSTATUS(std::system(msg.c_str())), 2);
  EXPECT_NE(slurp(d / "err.txt").find("1 < p_j < inf"), std::string::npos);
}

TEST(Cli, UngatedCheckIsAHypothesisFailure) {
  const fs::path d = scratch("gate");
  json j = small_config();
  j["checks"] = {"thm23"};
  EXPECT_EQ(run_cli("verify --config " + write_config(d, j).string() + " --out " + (d / "out").string()), 2);
}

TEST(Cli, BadConfigExitsThree) {
  const fs::path d = scratch("bad");
  std::ofstream(d / "broken.json") << "{ not json";
  EXPECT_EQ(run_cli("verify --config " + (d / "broken.json").string()), 3);
  json j = small_config();
  j["checks"] = {"nope"};
  EXPECT_EQ(run_cli("verify --config " + write_config(d, j).string()), 3);
  EXPECT_EQ(run_cli("verify --config " + (d / "missing.json").string()), 3);
  EXPECT_EQ(run_cli("frobnicate"), 3);
}

TEST(Cli, ReportsAreByteIdenticalAcrossThreadCounts) {
  const fs::path d = scratch("determinism");
  json j = small_config();
  j["checks"] = {"thm21", "norm_bounds", "argmax_stability"};
  const fs::path cfg = write_config(d, j);
  const int a = run_cli("verify --config " + cfg.string() + " --threads 1 --out " + (d / "a").string());
  const int b = run_cli("verify --config " + cfg.string() + " --threads 3 --out " + (d / "b").string());
  EXPECT_EQ(a, b);
  EXPECT_EQ(slurp(d / "a" / "reports.json"), slurp(d / "b" / "reports.json"));
  EXPECT_EQ(slurp(d / "a" / "maximal" / "maximal.csv"), slurp(d / "b" / "maximal" / "maximal.csv"));
  EXPECT_EQ(json::parse(slurp(d / "a" / "reports.json")).size(), 3u);
  EXPECT_EQ(run_cli("report --out " + (d / "a").string()), a);
}

TEST(Cli, ShippedSuitesPassWithOneReportPerCheck) {
  for (const std::string name : {"standard", "alpha0", "calculus"}) {
    const fs::path d = scratch(name);
    const std::string cfg = std::string(MAXREG_SOURCE_DIR) + "/configs/" + name + ".json";
    EXPECT_EQ(run_cli("verify --config " + cfg + " --out " + (d / "out").string()), 0) << name;
    const json reports = json::parse(slurp(d / "out" / "reports.json"));
    const RunConfig c = load_config(cfg);
    ASSERT_EQ(reports.size(), c.checks.size()) << name;
    for (std::size_t i = 0; i < reports.size(); ++i) EXPECT_EQ(reports[i]["check_id"], c.checks[i]) << name;
  }
}
