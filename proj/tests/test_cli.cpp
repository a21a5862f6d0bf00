#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "json.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result run(const std::string& args) {
  const std::string err_path = test::temp_path("stderr.txt");
  const std::string cmd = std::string(CLOAK_CLI_PATH) + " " + args + " 2>" + err_path;
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream is(err_path);
  std::stringstream ss;
  ss << is.rdbuf();
  r.err = ss.str();
  return r;
}

std::string fresh_dir(const std::string& name) {
  const std::string d = test::temp_path(name);
  fs::remove_all(d);
  return d;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

json error_of(const Result& r) {
  const auto pos = r.err.find("{\"error\"");
  return pos == std::string::npos ? json() : json::parse(r.err.substr(pos, r.err.find('\n', pos) - pos));
}

// One small optimization shared by several tests.
const std::string& optimized_run() {
  static const std::string dir = [] {
    const std::string d = fresh_dir("opt-run");
    const Result r = run("optimize --example 1 --load XT --mesh-h 0.5 --set solver.k_target=1e3 --out " + d);
    EXPECT_EQ(r.code, 0) << r.err;
    return d;
  }();
  return dir;
}

}  // namespace

TEST(Cli, AxisymUniformMinimizer) {
  const std::string d = fresh_dir("axisym");
  const Result r = run("axisym --kind uniform-p --n 81 --out " + d);
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["minimizer"].get<double>(), 16.0 / 9.0, 1e-6);
  std::ifstream is(d + "/landscape_uniform-p.csv");
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "param1,param2,g");
  double best_p = 0, best_g = 1e300, p, p2, g;
  char c1, c2;
  while (is >> p >> c1 >> p2 >> c2 >> g)
    if (g < best_g) best_g = g, best_p = p;
  const double step = (j["points"].get<int>() > 1) ? 0.05 : 1.0;
  EXPECT_LE(std::abs(best_p - 16.0 / 9.0), step);
}

TEST(Cli, RunDirectoryContents) {
  const std::string& d = optimized_run();
  for (const char* f : {"config.txt", "mesh.cloakmesh", "trace.csv", "design.csv", "fields.vtk", "summary.json",
                        "manifest.json"})
    EXPECT_TRUE(fs::exists(d + "/" + f)) << f;
  const json m = json::parse(slurp(d + "/manifest.json"));
  EXPECT_TRUE(m.contains("config_hash"));
  EXPECT_TRUE(m["files"].contains("trace.csv"));
}

TEST(Cli, EvaluateReproducesFinalTrace) {
  const std::string& d = optimized_run();
  const json s = json::parse(slurp(d + "/summary.json"));
  const std::string e = fresh_dir("eval");
  const Result r = run("evaluate --design " + d + " --load XT --out " + e);
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["g"]["XT"].get<double>(), s["g"]["XT"].get<double>(), 1e-12);
  // Last trace row, g_XT column.
  std::ifstream is(d + "/trace.csv");
  std::string line, last;
  while (std::getline(is, line))
    if (!line.empty()) last = line;
  std::vector<std::string> cols;
  std::stringstream ss(last);
  for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
  EXPECT_NEAR(j["g"]["XT"].get<double>(), std::stod(cols[6]), 1e-12);
}

TEST(Cli, TableWithNoCloakRow) {
  const std::string d = fresh_dir("table");
  const Result r = run("table --example 1 --mesh-h 0.5 --designs NC --out " + d);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("design,XT,YT,ST,XD,YD,SD,average"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("\nNC,"), std::string::npos) << r.out;
}

TEST(Cli, RefusesToOverwrite) {
  const std::string& d = optimized_run();
  const Result r = run("optimize --example 1 --load XT --mesh-h 0.5 --set solver.k_target=10 --out " + d);
  EXPECT_EQ(r.code, 4);
  EXPECT_EQ(error_of(r)["error"]["kind"], "io");
}

TEST(Cli, ConfigErrors) {
  const Result a = run("nocloak --example 2 --load YT --mesh-h 0.5 --out " + fresh_dir("cfg-a"));
  EXPECT_EQ(a.code, 2);
  const json e = error_of(a);
  EXPECT_EQ(e["error"]["kind"], "config");
  EXPECT_EQ(e["error"]["exit_code"], 2);
  EXPECT_NE(e["error"]["message"].get<std::string>().find("YT"), std::string::npos) << a.err;
  EXPECT_EQ(run("nocloak --example 7 --out " + fresh_dir("cfg-b")).code, 2);
  const Result c = run("nocloak --example 1 --set solver.growth=0.5 --out " + fresh_dir("cfg-c"));
  EXPECT_EQ(c.code, 2);
  EXPECT_NE(c.err.find("growth"), std::string::npos) << c.err;
  EXPECT_EQ(run("frobnicate").code, 2);
}

TEST(Cli, MissingDesignIsIoError) {
  EXPECT_EQ(run("evaluate --design /nonexistent/run --out " + fresh_dir("missing")).code, 4);
}

TEST(Cli, NoCloakReportsRatio) {
  const Result r = run("nocloak --example 1 --load XT --mesh-h 0.5 --out " + fresh_dir("nc"));
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_GT(j["g_nocloak"]["XT"].get<double>(), 0.1);
}

TEST(Cli, MeshCommandWritesValidMesh) {
  const std::string d = fresh_dir("mesh");
  const Result r = run("mesh --example 3 --mesh-h 0.4 --out " + d);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(d + "/mesh.cloakmesh"));
}
