#include <gtest/gtest.h>

#include <filesystem>

#include "mracrl/export.hpp"

using namespace mracrl;

namespace {

EpisodeRecord sample_record(bool with_v) {
  const auto form = Form::kNonlinear;
  const auto ref = companion_from_pendulum(PlantParams::nominal(), form);
  const auto env = sample_test_env(3, form);
  EpisodeSettings s;
  if (with_v) s.ideal = ideal_gains(companion_from_pendulum(env.params, form), ref);
  const auto loop = LoopConfig::named("mrac100");
  return run_episode(env, Policy{LqrPolicy(ref, {}, form)}, loop,
                     MracConfig::for_inner_rate(ref, 100.0), PlantState{Vector::Zero(2), 0.0}, s);
}

void expect_same(const EpisodeRecord& a, const EpisodeRecord& b) {
  EXPECT_EQ(a.times, b.times);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.x_r, b.x_r);
  EXPECT_EQ(a.u, b.u);
  EXPECT_EQ(a.u_r, b.u_r);
  EXPECT_EQ(a.e, b.e);
  EXPECT_EQ(a.theta_set, b.theta_set);
  EXPECT_EQ(a.costs, b.costs);
  EXPECT_EQ(a.V, b.V);
  EXPECT_EQ(a.K_hat, b.K_hat);
  EXPECT_EQ(a.k_u_hat, b.k_u_hat);
  EXPECT_EQ(a.summary, b.summary);
}

std::filesystem::path tmp(const char* name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST(ExportRecord, CsvRoundTrip) {
  for (bool with_v : {false, true}) {
    const auto r = sample_record(with_v);
    expect_same(r, record_from_csv(record_to_csv(r)));
  }
}

TEST(ExportRecord, JsonRoundTrip) {
  const auto r = sample_record(true);
  expect_same(r, record_from_json(record_to_json(r)));
}

TEST(ExportRecord, CsvHeaderHasPlottingColumns) {
  const auto csv = record_to_csv(sample_record(false));
  const auto header = csv.substr(0, csv.find('\n'));
  for (const char* col : {"t", "theta", "theta_r", "e_theta", "u", "u_r"}) {
    EXPECT_NE(header.find(col), std::string::npos) << col;
  }
}

TEST(ExportRecord, DirectRecordWithoutGains) {
  const auto ref = companion_from_pendulum(PlantParams::nominal(), Form::kLinear);
  const auto r = run_episode(sample_test_env(1, Form::kLinear), Policy{LqrPolicy(ref)},
                             LoopConfig::named("direct100"), std::nullopt,
                             PlantState{Vector::Zero(2), 0.0});
  expect_same(r, record_from_csv(record_to_csv(r)));
  expect_same(r, record_from_json(record_to_json(r)));
}

TEST(ExportTable, EmptyTableIsHeaderOnly) {
  const auto csv = table_to_csv(BenchmarkTable{});
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1);
  EXPECT_EQ(csv.rfind("variant,", 0), 0u);
  EXPECT_NE(csv.find("deg2"), std::string::npos);
  EXPECT_TRUE(table_rows_from_csv(csv).empty());
}

TEST(ExportTable, RoundTrips) {
  std::vector<BenchVariant> variants{make_variant("lqr-direct10", Form::kLinear),
                                     make_variant("lqr-mrac10", Form::kLinear)};
  BenchmarkSettings s;
  s.episode.guard = 50.0;  // forces a few diverged cells into the table
  const auto t = run_benchmark(5, variants, 2, Form::kLinear, s);
  EXPECT_EQ(table_rows_from_csv(table_to_csv(t)), t.rows);
  EXPECT_TRUE(table_from_json(table_to_json(t)) == t);
}

TEST(ExportFiles, WriteImportAndErrors) {
  const auto r = sample_record(false);
  export_results(r, ExportFormat::kJson, tmp("mracrl_rec.json"));
  expect_same(r, import_record(tmp("mracrl_rec.json"), ExportFormat::kJson));
  export_results(r, format_from_path("x.csv"), tmp("mracrl_rec.csv"));
  expect_same(r, import_record(tmp("mracrl_rec.csv"), ExportFormat::kCsv));
  std::filesystem::remove(tmp("mracrl_rec.json"));
  std::filesystem::remove(tmp("mracrl_rec.csv"));

  try {
    export_results(r, ExportFormat::kCsv, "/nonexistent-dir/out.csv");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/out.csv"), std::string::npos);
  }
  EXPECT_THROW(format_from_path("out.txt"), ArgumentError);
  EXPECT_THROW(format_from_string("xml"), ArgumentError);
}

TEST(ExportParsing, Errors) {
  EXPECT_THROW(record_from_json("{\"schema_version\": 1,"), ParseError);
  EXPECT_THROW(record_from_json(R"({"schema_version": 99, "kind": "episode"})"), SchemaError);
  EXPECT_THROW(record_from_json(R"({"schema_version": 1, "kind": "benchmark"})"), SchemaError);
  EXPECT_THROW(record_from_csv("a,b,c\n1,2,3\n"), SchemaError);
  EXPECT_THROW(table_rows_from_csv("variant,n_envs\nx,1\n"), SchemaError);
}
