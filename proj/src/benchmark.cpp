#include "mracrl/benchmark.hpp"

#include <cmath>
#include <exception>

namespace mracrl {

namespace {

// Divergence is a per-cell outcome. Anything else is a configuration fault
// and is handed back through `fault` so it can be rethrown outside the
// parallel region.
CellResult run_cell(const TestEnv& env, std::size_t env_index, const BenchVariant& variant,
                    const BenchmarkSettings& settings, std::exception_ptr& fault) {
  CellResult cell;
  cell.env_index = env_index;
  try {
    const auto record = run_episode(env, *variant.policy, variant.loop, variant.mrac,
                                    PlantState{settings.x0, 0.0}, settings.episode);
    cell.metrics = record.summary;
  } catch (const DivergenceError& e) {
    cell.diverged = true;
    cell.error = e.what();
  } catch (const NumericError& e) {
    cell.diverged = true;
    cell.error = e.what();
  } catch (...) {
    fault = std::current_exception();
  }
  return cell;
}

}  // namespace

std::vector<TestEnv> sample_env_suite(std::size_t n_envs, std::uint64_t master_seed, Form form) {
  std::vector<TestEnv> envs;
  envs.reserve(n_envs);
  for (std::size_t i = 0; i < n_envs; ++i) {
    envs.push_back(sample_test_env(derive_seed(master_seed, i), form));
  }
  return envs;
}

VariantSummary summarize(const std::string& name, const std::vector<CellResult>& cells) {
  VariantSummary s;
  s.name = name;
  s.n_envs = cells.size();
  double sum_cost = 0.0, sum_cost2 = 0.0, sum_total = 0.0, sum_e = 0.0, sum_e2 = 0.0;
  for (const auto& c : cells) {
    if (c.diverged) {
      ++s.n_diverged;
      continue;
    }
    ++s.n_ok;
    sum_cost += c.metrics.avg_cost;
    sum_cost2 += c.metrics.avg_cost * c.metrics.avg_cost;
    sum_total += c.metrics.total_cost;
    sum_e += c.metrics.avg_e_theta_sq_deg;
    sum_e2 += c.metrics.avg_e_theta_sq_deg * c.metrics.avg_e_theta_sq_deg;
  }
  if (s.n_ok == 0) return s;
  const double n = static_cast<double>(s.n_ok);
  s.mean_avg_cost = sum_cost / n;
  s.mean_total_cost = sum_total / n;
  s.mean_avg_e_theta_sq_deg = sum_e / n;
  if (s.n_ok > 1) {
    const auto se = [n](double sum, double sum2) {
      const double var = std::max(0.0, (sum2 - sum * sum / n) / (n - 1.0));
      return std::sqrt(var / n);
    };
    s.se_avg_cost = se(sum_cost, sum_cost2);
    s.se_avg_e_theta_sq_deg = se(sum_e, sum_e2);
  }
  return s;
}

BenchmarkTable run_benchmark_on(std::vector<TestEnv> envs,
                                const std::vector<BenchVariant>& variants,
                                std::uint64_t master_seed, Form form,
                                const BenchmarkSettings& settings, bool parallel) {
  for (const auto& env : envs) {
    if (env.form != form) throw ArgumentError("run_benchmark: env form differs from sweep form");
  }
  BenchmarkTable table;
  table.form = form;
  table.master_seed = master_seed;
  table.envs = std::move(envs);
  const auto reference = companion_from_pendulum(settings.episode.reference_params, form);
  for (const auto& v : variants) {
    if (!v.policy) throw ArgumentError("variant '" + v.name + "' has no policy");
    v.loop.validate();
    if (v.loop.mrac_enabled != v.mrac.has_value()) {
      throw ArgumentError("variant '" + v.name + "': MRAC config must be set exactly when enabled");
    }
    if (v.mrac) derive(reference, *v.mrac, settings.episode.tolerances);
  }

  const std::size_t n_envs = table.envs.size();
  const std::size_t n_variants = variants.size();
  table.cells.assign(n_variants, std::vector<CellResult>(n_envs));
  const auto total = static_cast<std::int64_t>(n_envs * n_variants);

  std::vector<std::exception_ptr> faults(static_cast<std::size_t>(total));

  // Each cell writes only its own slot; the reduction below is in index order.
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::int64_t c = 0; c < total; ++c) {
    const auto v = static_cast<std::size_t>(c) / n_envs;
    const auto i = static_cast<std::size_t>(c) % n_envs;
    table.cells[v][i] =
        run_cell(table.envs[i], i, variants[v], settings, faults[static_cast<std::size_t>(c)]);
  }
  for (const auto& f : faults) {
    if (f) std::rethrow_exception(f);
  }

  for (std::size_t v = 0; v < n_variants; ++v) {
    table.rows.push_back(summarize(variants[v].name, table.cells[v]));
  }
  return table;
}

BenchmarkTable run_benchmark(std::size_t n_envs, const std::vector<BenchVariant>& variants,
                             std::uint64_t master_seed, Form form,
                             const BenchmarkSettings& settings) {
  if (n_envs < 1) throw ArgumentError("run_benchmark: n_envs must be >= 1");
  return run_benchmark_on(sample_env_suite(n_envs, master_seed, form), variants, master_seed,
                          form, settings, /*parallel=*/true);
}

BenchmarkTable run_benchmark_serial(std::size_t n_envs,
                                    const std::vector<BenchVariant>& variants,
                                    std::uint64_t master_seed, Form form,
                                    const BenchmarkSettings& settings) {
  if (n_envs < 1) throw ArgumentError("run_benchmark: n_envs must be >= 1");
  return run_benchmark_on(sample_env_suite(n_envs, master_seed, form), variants, master_seed,
                          form, settings, /*parallel=*/false);
}

BenchVariant make_variant(const std::string& spec, Form form, const VariantOptions& options) {
  const auto dash = spec.find('-');
  if (dash == std::string::npos) {
    throw ArgumentError("variant '" + spec + "' must look like <policy>-<loop>, e.g. lqr-mrac100");
  }
  const std::string kind = spec.substr(0, dash);
  BenchVariant v;
  v.name = spec;
  v.loop = LoopConfig::named(spec.substr(dash + 1), options.integration_rate_hz);
  const auto reference = companion_from_pendulum(options.reference, form);
  if (v.loop.mrac_enabled) {
    v.mrac = options.mrac_factory ? options.mrac_factory(reference, v.loop.inner_rate_hz())
                                  : MracConfig::for_inner_rate(reference, v.loop.inner_rate_hz());
  }
  if (kind == "lqr") {
    v.policy = std::make_shared<const Policy>(
        LqrPolicy(reference, options.lqr, form, options.literal_feedback));
  } else if (kind == "mlp") {
    if (!options.mlp) throw ArgumentError("variant '" + spec + "' needs a policy file");
    v.policy = options.mlp;
  } else {
    throw ArgumentError("unknown policy kind '" + kind + "' (expected lqr|mlp)");
  }
  return v;
}

}  // namespace mracrl
