#include <gtest/gtest.h>

#include <cmath>

#include "mracrl/benchmark.hpp"

using namespace mracrl;

namespace {

std::vector<BenchVariant> lqr_variants(Form form) {
  std::vector<BenchVariant> v;
  for (const char* name : {"lqr-direct100", "lqr-mrac100", "lqr-direct10", "lqr-mrac10"}) {
    v.push_back(make_variant(name, form));
  }
  return v;
}

}  // namespace

TEST(SampleEnvSuite, DerivedSeeds) {
  const auto envs = sample_env_suite(5, 11, Form::kNonlinear);
  ASSERT_EQ(envs.size(), 5u);
  for (std::size_t i = 0; i < envs.size(); ++i) {
    EXPECT_EQ(envs[i], sample_test_env(derive_seed(11, i), Form::kNonlinear));
  }
}

TEST(MakeVariant, NamesAndErrors) {
  const auto v = make_variant("lqr-mrac10", Form::kLinear);
  EXPECT_EQ(v.name, "lqr-mrac10");
  EXPECT_TRUE(v.loop.mrac_enabled);
  ASSERT_TRUE(v.mrac.has_value());
  EXPECT_EQ(v.mrac->gamma_u, kSlowInnerLoopGains.gamma_u);
  EXPECT_FALSE(make_variant("lqr-direct100", Form::kLinear).mrac.has_value());
  EXPECT_THROW(make_variant("mlp-mrac100", Form::kLinear), ArgumentError);
  EXPECT_THROW(make_variant("pid-mrac100", Form::kLinear), ArgumentError);
  EXPECT_THROW(make_variant("lqr", Form::kLinear), ArgumentError);

  VariantOptions opts;
  opts.mrac_factory = [](const CompanionSystem& ref, double) {
    return MracConfig::defaults(ref);
  };
  EXPECT_EQ(make_variant("lqr-mrac100", Form::kLinear, opts).mrac->gamma_u, 10.0);
}

TEST(RunBenchmark, PairingWithOneEnv) {
  const auto t = run_benchmark(1, lqr_variants(Form::kLinear), 3, Form::kLinear);
  ASSERT_EQ(t.envs.size(), 1u);
  ASSERT_EQ(t.cells.size(), 4u);
  for (const auto& col : t.cells) {
    ASSERT_EQ(col.size(), 1u);
    EXPECT_EQ(col[0].env_index, 0u);
  }
  EXPECT_EQ(t.envs[0], sample_test_env(derive_seed(3, 0), Form::kLinear));
}

TEST(RunBenchmark, NominalEnvMracHasZeroError) {
  std::vector<TestEnv> envs{TestEnv::nominal(sample_schedule(8), Form::kNonlinear)};
  const auto t = run_benchmark_on(envs, lqr_variants(Form::kNonlinear), 0, Form::kNonlinear, {}, true);
  EXPECT_LE(t.rows[1].mean_avg_e_theta_sq_deg, 1e-12);
  EXPECT_LE(t.rows[3].mean_avg_e_theta_sq_deg, 1e-12);
}

TEST(RunBenchmark, ParallelEqualsSerial) {
  for (Form form : {Form::kLinear, Form::kNonlinear}) {
    const auto variants = lqr_variants(form);
    const auto a = run_benchmark(12, variants, 5, form);
    const auto b = run_benchmark_serial(12, variants, 5, form);
    EXPECT_TRUE(a == b);
  }
}

TEST(RunBenchmark, DivergenceIsRecordedPerCell) {
  BenchmarkSettings s;
  s.episode.guard = 2.0;
  const auto t = run_benchmark(4, lqr_variants(Form::kLinear), 1, Form::kLinear, s);
  std::size_t diverged = 0;
  for (const auto& col : t.cells)
    for (const auto& c : col) {
      if (c.diverged) {
        ++diverged;
        EXPECT_NE(c.error.find("divergence"), std::string::npos);
      }
    }
  EXPECT_GT(diverged, 0u);
  for (const auto& r : t.rows) EXPECT_EQ(r.n_ok + r.n_diverged, r.n_envs);
}

TEST(RunBenchmark, Preconditions) {
  EXPECT_THROW(run_benchmark(0, lqr_variants(Form::kLinear), 1, Form::kLinear), ArgumentError);
  auto bad = lqr_variants(Form::kLinear);
  bad[1].mrac.reset();
  EXPECT_THROW(run_benchmark(2, bad, 1, Form::kLinear), ArgumentError);
}

TEST(Summarize, MeanAndStandardError) {
  std::vector<CellResult> cells(4);
  const double costs[] = {1.0, 2.0, 3.0, 100.0};
  for (std::size_t i = 0; i < 4; ++i) {
    cells[i].env_index = i;
    cells[i].metrics.avg_cost = costs[i];
    cells[i].metrics.avg_e_theta_sq_deg = 2.0 * costs[i];
  }
  cells[3].diverged = true;
  const auto s = summarize("x", cells);
  EXPECT_EQ(s.n_envs, 4u);
  EXPECT_EQ(s.n_ok, 3u);
  EXPECT_EQ(s.n_diverged, 1u);
  EXPECT_DOUBLE_EQ(s.mean_avg_cost, 2.0);
  EXPECT_DOUBLE_EQ(s.se_avg_cost, 1.0 / std::sqrt(3.0));  // sample sd 1
  EXPECT_DOUBLE_EQ(s.mean_avg_e_theta_sq_deg, 4.0);
}
