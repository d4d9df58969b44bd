#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "curvlab/cli.hpp"

using namespace curvlab;
using nlohmann::json;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, WarpedGaussianVerdictsAndExitCodes) {
  const CliRun hcf = run({"classify", "--geometry", "warped_gaussian", "--dim", "4", "--class", "HCf", "--seed", "7",
                       "--count", "32", "--json"});
  EXPECT_EQ(hcf.code, kExitPass);
  const json j = json::parse(hcf.out);
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_EQ(j["report"]["reports"][0]["verdict"], "member");
  EXPECT_EQ(j["report"]["reports"][0]["count"], 32);

  const CliRun ef = run({"classify", "--geometry", "warped_gaussian", "--dim", "4", "--class", "Ef"});
  EXPECT_EQ(ef.code, kExitFail);
  EXPECT_NE(ef.out.find("non-member"), std::string::npos);
}

TEST(Cli, IdenticalInvocationsAreByteIdentical) {
  const std::vector<std::string> args = {"classify", "--geometry", "gaussian_shrinker", "--count", "6", "--seed", "3",
                                         "--json"};
  EXPECT_EQ(run(args).out, run(args).out);
  const std::vector<std::string> tensors = {"tensors", "--geometry", "warped_yf"};
  EXPECT_EQ(run(tensors).out, run(tensors).out);
}

TEST(Cli, TensorDump) {
  const CliRun sphere = run({"tensors", "--geometry", "sphere", "--dim", "3"});
  EXPECT_EQ(sphere.code, kExitPass);
  EXPECT_NE(sphere.out.find("scalar curvature R = 6\n"), std::string::npos);

  const CliRun wg = run({"tensors", "--geometry", "warped_gaussian", "--dim", "4", "--depth", "1", "--json"});
  const json j = json::parse(wg.out);
  EXPECT_EQ(j["report"]["curvature"]["cotton"]["rank"], 3);
  EXPECT_EQ(j["report"]["curvature"]["cotton"]["components"].size(), 64u);
  EXPECT_TRUE(j["report"].contains("potential"));
  EXPECT_FALSE(j["report"]["curvature"].contains("bach"));

  const CliRun at = run({"tensors", "--geometry", "euclidean", "--dim", "2", "--point", "0.1,0.2", "--json"});
  EXPECT_EQ(json::parse(at.out)["report"]["point"], json::array({0.1, 0.2}));
  EXPECT_EQ(run({"tensors", "--geometry", "euclidean", "--dim", "2", "--point", "0.1"}).code, kExitError);
  EXPECT_EQ(run({"tensors", "--geometry", "sphere", "--depth", "4"}).code, kExitError);
}

TEST(Cli, StructuredErrors) {
  const std::string path = testing::TempDir() + "/curvlab_cli_bad.json";
  {
    std::ofstream os(path);
    os << R"js({"dim": 2, "metric": {"kind": "flat"}, "colour": 1})js";
  }
  const CliRun bad = run({"tensors", "--spec", path, "--json"});
  EXPECT_EQ(bad.code, kExitError);
  const json j = json::parse(bad.out);
  EXPECT_EQ(j["error"]["kind"], "spec");
  EXPECT_EQ(j["error"]["path"], "colour");
  std::remove(path.c_str());

  const CliRun text = run({"classify", "--geometry", "nowhere"});
  EXPECT_EQ(text.code, kExitError);
  EXPECT_TRUE(text.out.empty());
  EXPECT_NE(text.err.find("error (input)"), std::string::npos);

  EXPECT_EQ(run({"classify", "--geometry", "sphere", "--spec", "x.json"}).code, kExitError);
  EXPECT_EQ(run({"classify", "--geometry", "sphere", "--bogus"}).code, kExitError);
  EXPECT_EQ(run({"frobnicate"}).code, kExitError);
  EXPECT_EQ(run({"classify", "--geometry", "sphere", "--class", "Zf"}).code, kExitError);
}

TEST(Cli, ObstructionAndConstruct) {
  const CliRun b = run({"obstruction", "--which", "bochner", "--dim", "2", "--json"});
  EXPECT_EQ(b.code, kExitPass);
  const json j = json::parse(b.out)["report"]["bochner"];
  EXPECT_NEAR(j["lhs"].get<double>(), j["rhs"].get<double>(), 1e-9);

  EXPECT_EQ(run({"obstruction", "--which", "nongradient-kw", "--dim", "2", "--nodes", "24"}).code, kExitPass);
  EXPECT_EQ(run({"obstruction", "--which", "signature", "--nodes", "6"}).code, kExitPass);
  EXPECT_EQ(run({"obstruction", "--which", "signature", "--geometry", "sphere", "--dim", "3"}).code, kExitError);
  EXPECT_EQ(run({"obstruction", "--which", "everything"}).code, kExitError);

  EXPECT_EQ(run({"construct", "--example", "gaussian", "--dim", "3", "--nodes", "21"}).code, kExitPass);
  const CliRun periodic = run({"construct", "--example", "periodic", "--json"});
  EXPECT_EQ(periodic.code, kExitFail);
  EXPECT_EQ(json::parse(periodic.out)["report"]["stage"], "recover_f");
}

TEST(Cli, OutputFileAndPlotData) {
  const std::string dir = testing::TempDir();
  const std::string report = dir + "/curvlab_cli_report.json";
  const CliRun r = run({"construct", "--example", "gaussian", "--dim", "3", "--nodes", "11", "--json", "--out", report,
                     "--plot", dir + "/curvlab_cli_plot"});
  EXPECT_EQ(r.code, kExitPass);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(report);
  const json j = json::parse(in);
  EXPECT_EQ(j["report"]["solution"]["t"].size(), 11u);
  std::ifstream plot(dir + "/curvlab_cli_plot_q.dat");
  double t = 0.0, q = 0.0;
  ASSERT_TRUE(plot >> t >> q);
  EXPECT_DOUBLE_EQ(t, -2.0);
  EXPECT_DOUBLE_EQ(q, 4.0);
  for (const char* suffix : {"_q.dat", "_f.dat"}) std::remove((dir + "/curvlab_cli_plot" + suffix).c_str());
  std::remove(report.c_str());
}

TEST(Cli, DefaultClassesAndList) {
  RunConfig c;
  c.command = "classify";
  c.geometry = "euclidean";
  c.dim = 2;
  c.count = 4;
  const CommandResult r = run_command(c);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.report["reports"].size(), 16u);  // LS and LSE classes need n >= 3

  const CliRun list = run({"list", "--json"});
  EXPECT_EQ(list.code, kExitPass);
  EXPECT_EQ(json::parse(list.out)["report"]["classes"].size(), 22u);
}
