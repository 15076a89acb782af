#include "socva/problem_io.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sys/wait.h>

using namespace socva;
using namespace socva::testing;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(SOCVA_CLI_PATH) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string data(const std::string& name) { return std::string(SOCVA_DATA_DIR) + "/" + name; }

Json run_json(const std::string& args, int want_code = 0) {
  const CliRun r = run("--json " + args);
  EXPECT_EQ(r.code, want_code) << args;
  return Json::parse(r.out);
}

Vec vec_of(const Json& j) { return json_to_vec(j); }

}  // namespace

TEST(Cli, ClassifyExamples) {
  const std::string f = "classify --file " + data("planar_system.json");
  EXPECT_EQ(run_json(f + " --x=0,1")["class"], "BoundaryNonzero");
  EXPECT_EQ(run_json(f + " --x=1,1")["class"], "InteriorQ");
  EXPECT_EQ(run(f + " --x=0,-1").code, 3);
}

TEST(Cli, InputErrors) {
  EXPECT_EQ(run("classify --file /nonexistent.json --x=0,0").code, 2);
  EXPECT_EQ(run("classify --file " + data("planar_system.json") + " --x=0").code, 2);
  EXPECT_EQ(run("no-such-command").code, 2);
  const std::string bad = ::testing::TempDir() + "/malformed.json";
  std::ofstream(bad) << "{\"n\": 2, \"m\": ";
  EXPECT_EQ(run("classify --file " + bad + " --x=0,0").code, 2);
}

TEST(Cli, Multipliers) {
  const std::string f = "multipliers --file " + data("planar_system.json");
  const Json c2 = run_json(f + " --point case2");
  EXPECT_EQ(c2["kind"], "SlaterBody");
  EXPECT_EQ(c2["alternative"], "LMS1");
  const Json c5 = run_json(f + " --point case5");
  ASSERT_EQ(c5["kind"], "Ray");
  const Vec g = vec_of(c5["point"]), want = -v3(kSqrt2, -1, 1);
  EXPECT_LE(1 - g.dot(want) / (g.norm() * want.norm()), 1e-10);
  const Json in = run_json(f + " --x=0.2,1 --x-star=0,0");
  EXPECT_EQ(in["kind"], "Singleton");
  EXPECT_LE(vec_of(in["point"]).norm(), 1e-12);
  EXPECT_EQ(run(f + " --x=0,0 --x-star=0,1").code, 3);
}

TEST(Cli, GraphicalDerivative) {
  const std::string f = "gder --file " + data("planar_system.json");
  const Json c4 = run_json(f + " --point case4 --v=2,0");
  EXPECT_TRUE(c4["critical"].get<bool>());
  const Json c5 = run_json(f + " --point case5 --v=1,1");
  EXPECT_TRUE(c5.contains("closed_form_zero_star"));
  EXPECT_FALSE(run_json(f + " --point case2 --v=0,1")["critical"].get<bool>());
  EXPECT_EQ(run(f + " --point case2").code, 2);
}

TEST(Cli, TangentGraphMembership) {
  const std::string f = "tangent-graph --file " + data("planar_system.json") + " --point case1";
  EXPECT_TRUE(run_json(f + " --v=1,0 --v-star=0,-1")["member"].get<bool>());
  EXPECT_FALSE(run_json(f + " --v=1,0 --v-star=0,1")["member"].get<bool>());
}

TEST(Cli, ConstraintQualifications) {
  const Json j = run_json("check-cq --file " + data("planar_system.json") + " --point case5");
  EXPECT_FALSE(j["rcq"].get<bool>());
  EXPECT_FALSE(j["dual_cq"].get<bool>());
  EXPECT_FALSE(j["srcq"].get<bool>());
}

TEST(Cli, CalmnessVerdicts) {
  const char* want[] = {"NotCalm", "Calm", "NotCalm", "Calm", "Calm"};
  for (int i = 0; i < 5; ++i) {
    const std::string args = "calmness --kappa 1.4142135623730951 --file " + data("variational_system.json") +
                             " --point case" + std::to_string(i + 1);
    const Json j = run_json(args);
    EXPECT_EQ(j["verdict"], want[i]) << i;
    EXPECT_EQ(j["kappa_source"], "user");
    EXPECT_EQ(run("--strict " + args).code, std::string(want[i]) == "NotCalm" ? 1 : 0);
  }
}

TEST(Cli, CalmnessUsesProbedKappa) {
  const Json j = run_json("calmness --file " + data("variational_system.json") + " --point case2");
  EXPECT_EQ(j["verdict"], "Calm");
  EXPECT_NE(j["kappa_source"], "user");
  EXPECT_LE(j["kappa"].get<double>(), kSqrt2 + 0.05);
}

TEST(Cli, ReproduceGoldenSuite) {
  const CliRun ok = run("reproduce-paper");
  EXPECT_EQ(ok.code, 0);
  EXPECT_EQ(ok.out.find("FAIL"), std::string::npos);
  const Json j = run_json("reproduce-paper");
  EXPECT_EQ(j["failed"].get<int>(), 0);
  EXPECT_GT(j["passed"].get<int>(), 0);

  const CliRun bad = run("reproduce-paper --file " + data("perturbed_system.json"));
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("FAIL"), std::string::npos);
}

TEST(Cli, JsonOutputIsDeterministic) {
  for (const std::string args : {"gder --file " + data("planar_system.json") + " --point case2 --v=1,0",
                                 "calmness --file " + data("variational_system.json") + " --point case1",
                                 std::string("reproduce-paper")}) {
    const CliRun a = run("--json " + args), b = run("--json " + args);
    EXPECT_EQ(a.out, b.out) << args;
    EXPECT_FALSE(a.out.empty());
  }
}

TEST(Cli, ProblemFileRoundTrip) {
  const ProblemFile p = load_problem(data("planar_system.json"));
  EXPECT_EQ(p.n, 2);
  EXPECT_EQ(p.m, 2);
  EXPECT_EQ(p.points.size(), 5u);
  const ProblemFile q = parse_problem(Json::parse(dump_json(problem_to_json(p))));
  const Vec x = v2(0.3, -0.7);
  EXPECT_EQ(p.phi.value(x), q.phi.value(x));

  Json doc = problem_to_json(p);
  doc["phi"][0]["H"][0][1] = 1.0;
  std::vector<std::string> warnings = parse_problem(doc).warnings;
  EXPECT_EQ(warnings.size(), 1u);
}
