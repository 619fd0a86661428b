#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr folded into stdout when `merge` is set.
Run cli(const std::string& args, bool merge = false) {
  const std::string cmd = std::string(KNZ_CLI_PATH) + " " + args + (merge ? " 2>&1" : " 2>/dev/null");
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string config(const std::string& name) { return std::string(KNZ_SOURCE_DIR) + "/configs/" + name; }

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << text;
  return path;
}

// Dotted key paths; arrays contribute "[]" and are merged over elements.
void key_paths(const nlohmann::ordered_json& j, const std::string& pre, std::set<std::string>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string p = pre.empty() ? it.key() : pre + "." + it.key();
      out.insert(p);
      key_paths(it.value(), p, out);
    }
  } else if (j.is_array()) {
    for (const auto& v : j)
      if (v.is_object() || v.is_array()) key_paths(v, pre + "[]", out);
  }
}

void expect_golden_keys(const std::string& json_text, const std::string& golden) {
  std::set<std::string> got;
  key_paths(nlohmann::ordered_json::parse(json_text), "", got);
  std::ifstream f(std::string(KNZ_SOURCE_DIR) + "/tests/golden/" + golden);
  ASSERT_TRUE(f.good()) << golden;
  std::set<std::string> want;
  for (std::string line; std::getline(f, line);)
    if (!line.empty()) want.insert(line);
  EXPECT_EQ(got, want) << golden;
}

}  // namespace

TEST(Cli, BasisClassicalRows) {
  const auto r = cli("basis --config " + config("classical.cfg"));
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::ordered_json::parse(r.out);
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["command"], "basis");
  bool seen = false;
  for (const auto& e : j["elements"]) {
    EXPECT_EQ(e["provenance"], "closed_form");
    if (e["lambda"] == 2 && e["degree"] == 1) {
      EXPECT_EQ(e["form"], "z^-1 dz^2");
      EXPECT_EQ(e["orders"][0], -1);
      seen = true;
    }
  }
  EXPECT_TRUE(seen);
  expect_golden_keys(r.out, "basis_classical.keys");
}

TEST(Cli, BasisGenusOneHasPeriodicityResiduals) {
  const auto r = cli("basis --config " + config("genus1_two_points.cfg"));
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::ordered_json::parse(r.out);
  int with_b = 0;
  for (const auto& e : j["elements"]) {
    EXPECT_LT(e["periodicity_residual"].get<double>(), 1e-9);
    if (e.contains("b")) ++with_b;
  }
  EXPECT_GT(with_b, 0);
}

TEST(Cli, KzTwoPointExample) {
  const auto r = cli("kz --config " + config("genus0_two_points.cfg"));
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::ordered_json::parse(r.out);
  EXPECT_EQ(j["equation_count"], 2);
  EXPECT_NEAR(j["reduced"]["r"][0][1][0].get<double>(), -2.0 / 3.0, 1e-10);
  EXPECT_NEAR(j["reduced"]["r"][0][1][1].get<double>(), 0.0, 1e-10);
  for (const auto& eq : j["equations"])
    for (const auto& t : eq["terms"]) EXPECT_TRUE(t["provenance"] == "both" || t["provenance"] == "quadrature");
  expect_golden_keys(r.out, "kz_genus0_two_points.keys");
}

TEST(Cli, KzGenusOneEquationCount) {
  const auto r = cli("kz --config " + config("genus1_two_points.cfg"));
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::ordered_json::parse(r.out);
  EXPECT_EQ(j["equation_count"], 3);
  EXPECT_EQ(j["equations"][0]["direction"], "0");
  expect_golden_keys(r.out, "kz_genus1_two_points.keys");
}

TEST(Cli, OutputIsByteIdentical) {
  for (const std::string cmd : {"pairing", "structure", "cocycle"}) {
    const auto a = cli(cmd + " --config " + config("genus0_two_points.cfg") + " --seed 5");
    const auto b = cli(cmd + " --config " + config("genus0_two_points.cfg") + " --seed 5");
    ASSERT_EQ(a.code, 0) << cmd;
    EXPECT_EQ(a.out, b.out) << cmd;
  }
}

TEST(Cli, CsvExport) {
  const auto r = cli("pairing --config " + config("classical.cfg") + " --format csv");
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "lambda,n,p,m,r,closed_re,closed_im,quadrature_re,quadrature_im,expected,residual");
}

TEST(Cli, WritesToOutFile) {
  const std::string path = ::testing::TempDir() + "knz_basis.json";
  std::remove(path.c_str());
  const auto r = cli("basis --config " + config("classical.cfg") + " --out " + path);
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_EQ(nlohmann::ordered_json::parse(ss.str())["command"], "basis");
}

TEST(Cli, ConfigErrorsExitTwo) {
  const auto dup = cli("basis --config " + write_temp("dup.cfg", "genus = 0\nin_points = 0, 0\n"), true);
  EXPECT_EQ(dup.code, 2);
  EXPECT_NE(dup.out.find("marked points must be distinct"), std::string::npos);
  EXPECT_EQ(cli("basis --config /nonexistent.cfg").code, 2);
  EXPECT_EQ(cli("basis --format xml").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("verify --tol -1").code, 2);
}

TEST(Cli, CriticalLevelExitsThree) {
  const auto path = write_temp("critical.cfg", "in_points = 0, 1\nalgebra = sl2\nhighest_weights = 1, 1\nlevel = -2\n");
  const auto r = cli("kz --config " + path, true);
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("critical level"), std::string::npos);
}

TEST(Cli, VerifySubsetPassesAndIsDeterministic) {
  const auto a = cli("verify --only 2,3 --seed 11");
  const auto b = cli("verify --only 2,3 --seed 11");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const auto j = nlohmann::ordered_json::parse(a.out);
  EXPECT_EQ(j["passed"], true);
  EXPECT_EQ(j["failed"], 0);
}

TEST(Cli, TamperedToleranceFailsWithDualityName) {
  const auto r = cli("verify --only 1 --tol 1e-30");
  EXPECT_EQ(r.code, 1);
  const auto j = nlohmann::ordered_json::parse(r.out);
  EXPECT_EQ(j["passed"], false);
  bool named = false;
  for (const auto& c : j["checks"]) named = named || (c["name"] == "duality_edu" && c["pass"] == false);
  EXPECT_TRUE(named);
}
