#pragma once

// Paired benchmark sweeps. Every variant runs on the same list of sampled
// test environments. `run_benchmark` fans the (env, variant) cells out with
// OpenMP; `run_benchmark_serial` is the single-threaded reference kept for
// testing. Both reduce in env-index order and produce identical tables.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mracrl/harness.hpp"

namespace mracrl {

struct BenchVariant {
  std::string name;
  std::shared_ptr<const Policy> policy;
  LoopConfig loop;
  /// Set exactly when loop.mrac_enabled.
  std::optional<MracConfig> mrac;
};

struct CellResult {
  std::size_t env_index = 0;
  bool diverged = false;
  std::string error;
  MetricsSummary metrics;
  bool operator==(const CellResult&) const = default;
};

struct VariantSummary {
  std::string name;
  std::size_t n_envs = 0;
  std::size_t n_ok = 0;
  std::size_t n_diverged = 0;
  double mean_avg_cost = 0.0;
  double se_avg_cost = 0.0;
  double mean_total_cost = 0.0;
  double mean_avg_e_theta_sq_deg = 0.0;
  double se_avg_e_theta_sq_deg = 0.0;
  bool operator==(const VariantSummary&) const = default;
};

struct BenchmarkTable {
  Form form = Form::kLinear;
  std::uint64_t master_seed = 0;
  std::vector<TestEnv> envs;
  std::vector<VariantSummary> rows;
  /// cells[v][i]: variant v on envs[i].
  std::vector<std::vector<CellResult>> cells;
  bool operator==(const BenchmarkTable&) const = default;
};

struct BenchmarkSettings {
  EpisodeSettings episode;
  Vector x0 = Vector::Zero(2);
};

/// envs[i] = sample_test_env(derive_seed(master_seed, i), form).
std::vector<TestEnv> sample_env_suite(std::size_t n_envs, std::uint64_t master_seed, Form form);

BenchmarkTable run_benchmark(std::size_t n_envs, const std::vector<BenchVariant>& variants,
                             std::uint64_t master_seed, Form form,
                             const BenchmarkSettings& settings = {});
BenchmarkTable run_benchmark_serial(std::size_t n_envs,
                                    const std::vector<BenchVariant>& variants,
                                    std::uint64_t master_seed, Form form,
                                    const BenchmarkSettings& settings = {});

/// Same sweeps on a caller-provided env list (e.g. a loaded suite).
BenchmarkTable run_benchmark_on(std::vector<TestEnv> envs,
                                const std::vector<BenchVariant>& variants,
                                std::uint64_t master_seed, Form form,
                                const BenchmarkSettings& settings, bool parallel);

/// Mean and standard error over the non-diverged cells.
VariantSummary summarize(const std::string& name, const std::vector<CellResult>& cells);

struct VariantOptions {
  LqrWeights lqr;
  bool literal_feedback = false;
  PlantParams reference = PlantParams::nominal();
  /// Required for "mlp-*" variants.
  std::shared_ptr<const Policy> mlp;
  double integration_rate_hz = 200.0;
  /// MRAC gains for a reference model and inner-loop rate.
  /// Unset means MracConfig::for_inner_rate.
  std::function<MracConfig(const CompanionSystem&, double)> mrac_factory;
};

/// Builds the policy and loop for names like "lqr-mrac100" or "mlp-direct10".
BenchVariant make_variant(const std::string& spec, Form form, const VariantOptions& options = {});

}  // namespace mracrl
