#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "mracrl/export.hpp"

using namespace mracrl;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(MRACRL_CLI) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path tmp(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("mracrl_cli_" + name);
}

}  // namespace

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  const auto r = run("bench --no-such-flag");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("--n-envs"), std::string::npos);  // usage printed
  EXPECT_EQ(run("launch").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, RuntimeErrorsExitOne) {
  auto r = run("episode --variant mrac1000");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("error:"), std::string::npos);
  EXPECT_EQ(run("episode --policy mlp:/nonexistent.json").code, 1);
  EXPECT_EQ(run("episode --form cubic").code, 1);
  EXPECT_EQ(run("bench --variants lqr-mrac100 --n-envs 0").code, 1);
}

TEST(Cli, EpisodeJsonExportIsAFullRecord) {
  const auto path = tmp("traj.json");
  const auto r = run("episode --form nonlinear --variant mrac100 --env-seed 3 --export " + path.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto rec = import_record(path, ExportFormat::kJson);
  EXPECT_EQ(rec.size(), 2000u);
  EXPECT_EQ(rec.costs.size(), 200u);
  std::filesystem::remove(path);
}

TEST(Cli, EpisodeOverridesAndPolicyFile) {
  const std::string policy = std::string(MRACRL_SOURCE_DIR) + "/data/policies/linear_lqr_equivalent.json";
  const auto a = run("episode --params 1.25,1.25,2 --setpoints 1,1,1,1 --x0 0.1,0 --record-v");
  ASSERT_EQ(a.code, 0) << a.out;
  EXPECT_NE(a.out.find("m=1.25"), std::string::npos);
  const auto b = run("episode --params 1.25,1.25,2 --setpoints 1,1,1,1 --x0 0.1,0 --policy mlp:" + policy);
  ASSERT_EQ(b.code, 0) << b.out;
  EXPECT_NE(b.out.find("policy=mlp"), std::string::npos);
  EXPECT_EQ(run("episode --setpoints 1,2").code, 1);
}

TEST(Cli, BenchCsvIsDeterministic) {
  const auto p1 = tmp("b1.csv"), p2 = tmp("b2.csv"), p3 = tmp("b3.csv");
  const std::string args = "bench --n-envs 8 --master-seed 7 --variants lqr-direct100,lqr-mrac100 --export ";
  ASSERT_EQ(run(args + p1.string()).code, 0);
  ASSERT_EQ(run(args + p2.string() + " --serial").code, 0);
  EXPECT_EQ(read_file(p1), read_file(p2));
  const auto rows = import_table(p1, ExportFormat::kCsv).rows;
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].name, "lqr-direct100");

  const auto suite = tmp("suite.jsonl");
  ASSERT_EQ(run("bench --n-envs 8 --master-seed 7 --variants lqr-direct100,lqr-mrac100 --save-env-suite " +
                suite.string() + " --export " + p3.string())
                .code,
            0);
  const auto p4 = tmp("b4.csv");
  ASSERT_EQ(run("bench --env-suite " + suite.string() +
                " --master-seed 7 --variants lqr-direct100,lqr-mrac100 --export " + p4.string())
                .code,
            0);
  EXPECT_EQ(read_file(p3), read_file(p4));
  for (const auto& p : {p1, p2, p3, p4, suite}) std::filesystem::remove(p);
}

TEST(Cli, ConfigFile) {
  const auto ini = tmp("run.ini");
  write_file(ini, "[mrac]\npreset = baseline\n[episode]\nguard = 1e4\n");
  // The baseline gains only stay bounded without model mismatch.
  const auto r = run("episode --nominal --config " + ini.string());
  EXPECT_EQ(r.code, 0) << r.out;
  write_file(ini, "[mrac]\nwarp = 9\n");
  EXPECT_EQ(run("episode --config " + ini.string()).code, 1);
  std::filesystem::remove(ini);
}
