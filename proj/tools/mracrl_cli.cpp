// Command-line front end: single episodes, paired benchmark sweeps, selftest.

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mracrl/benchmark.hpp"
#include "mracrl/config.hpp"
#include "mracrl/export.hpp"
#include "selftest.hpp"

namespace {

using namespace mracrl;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Vector parse_vector(const std::string& s, Eigen::Index n, const char* what) {
  const auto parts = split_list(s);
  if (static_cast<Eigen::Index>(parts.size()) != n) {
    throw ArgumentError(std::string(what) + " needs " + std::to_string(n) +
                        " comma-separated values");
  }
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::size_t used = 0;
    const auto& p = parts[static_cast<std::size_t>(i)];
    v(i) = std::stod(p, &used);
    if (used != p.size()) throw ArgumentError(std::string(what) + ": bad number '" + p + "'");
  }
  return v;
}

ExportFormat resolve_format(const std::string& flag, const std::string& path) {
  return flag.empty() ? format_from_path(path) : format_from_string(flag);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct EpisodeArgs {
  std::string form = "linear";
  std::string policy = "lqr";
  std::string variant = "mrac100";
  std::uint64_t env_seed = 0;
  bool nominal = false;
  std::string params;
  std::string setpoints;
  std::string x0;
  std::string export_path;
  std::string format;
  std::string config;
  bool record_v = false;
};

struct BenchArgs {
  std::size_t n_envs = 200;
  std::uint64_t master_seed = 0;
  std::string variants = "lqr-direct100,lqr-mrac100,lqr-direct10,lqr-mrac10";
  std::string form = "linear";
  std::string export_path;
  std::string format;
  std::string policy_file;
  std::string config;
  std::string env_suite;
  std::string save_env_suite;
  bool serial = false;
};

int run_episode_cmd(const EpisodeArgs& a) {
  const Form form = form_from_string(a.form);
  const RunConfig cfg = a.config.empty() ? RunConfig{} : load_config(a.config);
  const auto reference = companion_from_pendulum(cfg.reference, form);

  std::optional<Policy> policy;
  if (a.policy == "lqr") {
    policy.emplace(LqrPolicy(reference, cfg.lqr, form, cfg.literal_feedback, cfg.tolerances));
  } else if (a.policy.rfind("mlp:", 0) == 0) {
    policy.emplace(mlp_load(a.policy.substr(4)));
  } else {
    throw ArgumentError("--policy must be 'lqr' or 'mlp:<path>'");
  }

  TestEnv env = sample_test_env(a.env_seed, form);
  if (a.nominal) env.params = cfg.reference;
  if (!a.params.empty()) {
    const Vector p = parse_vector(a.params, 3, "--params (m,l,b)");
    env.params = PlantParams{p(0), p(1), p(2), cfg.reference.g};
    env.params.validate();
  }
  if (!a.setpoints.empty()) {
    const Vector s = parse_vector(a.setpoints, kSetpointsPerEpisode, "--setpoints");
    env.schedule.setpoints.assign(s.data(), s.data() + s.size());
    env.schedule.validate();
  }

  const LoopConfig loop = LoopConfig::named(a.variant, cfg.integration_rate_hz);
  std::optional<MracConfig> mrac;
  if (loop.mrac_enabled) mrac = cfg.mrac_config(form, loop.inner_rate_hz());
  EpisodeSettings settings = cfg.episode_settings();
  if (a.record_v && mrac) {
    settings.ideal = ideal_gains(companion_from_pendulum(env.params, form), reference);
  }
  const Vector x0 = a.x0.empty() ? cfg.initial_state() : parse_vector(a.x0, 2, "--x0");

  const auto record = run_episode(env, *policy, loop, mrac, PlantState{x0, 0.0}, settings);
  std::cout << "form=" << to_string(form) << " variant=" << loop.name << " policy=" << policy->kind()
            << " env_seed=" << env.seed << " m=" << fmt(env.params.m) << " l=" << fmt(env.params.l)
            << " b=" << fmt(env.params.b) << "\n"
            << "avg_cost=" << fmt(record.summary.avg_cost)
            << " total_cost=" << fmt(record.summary.total_cost)
            << " avg_e_theta_sq_deg2=" << fmt(record.summary.avg_e_theta_sq_deg)
            << " peak_abs_e_theta_rad=" << fmt(record.summary.peak_abs_e_theta) << "\n";
  if (!a.export_path.empty()) {
    export_results(record, resolve_format(a.format, a.export_path), a.export_path);
    std::cout << "wrote " << a.export_path << "\n";
  }
  return 0;
}

int run_bench_cmd(const BenchArgs& a) {
  const Form form = form_from_string(a.form);
  const RunConfig cfg = a.config.empty() ? RunConfig{} : load_config(a.config);
  VariantOptions options = cfg.variant_options();
  if (!a.policy_file.empty()) {
    options.mlp = std::make_shared<const Policy>(mlp_load(a.policy_file));
  }
  std::vector<BenchVariant> variants;
  for (const auto& name : split_list(a.variants)) variants.push_back(make_variant(name, form, options));
  if (variants.empty()) throw ArgumentError("--variants is empty");

  std::vector<TestEnv> envs;
  if (!a.env_suite.empty()) {
    envs = load_env_suite(a.env_suite);
  } else {
    if (a.n_envs < 1) throw ArgumentError("--n-envs must be >= 1");
    envs = sample_env_suite(a.n_envs, a.master_seed, form);
  }
  if (!a.save_env_suite.empty()) save_env_suite(envs, a.save_env_suite);

  const auto table = run_benchmark_on(std::move(envs), variants, a.master_seed, form,
                                      cfg.benchmark_settings(), !a.serial);
  std::printf("%-16s %6s %6s %6s %14s %12s %18s %14s\n", "variant", "n_envs", "n_ok", "n_div",
              "mean_avg_cost", "se_avg_cost", "mean_e_th2[deg^2]", "se_e_th2");
  for (const auto& r : table.rows) {
    std::printf("%-16s %6zu %6zu %6zu %14.6g %12.4g %18.6g %14.4g\n", r.name.c_str(), r.n_envs,
                r.n_ok, r.n_diverged, r.mean_avg_cost, r.se_avg_cost, r.mean_avg_e_theta_sq_deg,
                r.se_avg_e_theta_sq_deg);
  }
  if (!a.export_path.empty()) {
    export_results(table, resolve_format(a.format, a.export_path), a.export_path);
    std::printf("wrote %s\n", a.export_path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MRAC inner loop under an outer-loop policy on the set-point pendulum task"};
  app.require_subcommand(1);

  EpisodeArgs ep;
  auto* episode = app.add_subcommand("episode", "Run one episode and print its metrics");
  episode->add_option("--form", ep.form, "linear | nonlinear")->capture_default_str();
  episode->add_option("--policy", ep.policy, "lqr | mlp:<path>")->capture_default_str();
  episode->add_option("--variant", ep.variant, "direct100 | mrac100 | direct10 | mrac10")
      ->capture_default_str();
  episode->add_option("--env-seed", ep.env_seed, "Seed of the sampled test environment")
      ->capture_default_str();
  episode->add_flag("--nominal", ep.nominal, "Use the reference plant parameters");
  episode->add_option("--params", ep.params, "True plant m,l,b (overrides the sample)");
  episode->add_option("--setpoints", ep.setpoints, "Four set-points in radians");
  episode->add_option("--x0", ep.x0, "Initial state theta,theta_dot");
  episode->add_option("--export", ep.export_path, "Write the record (.csv or .json)");
  episode->add_option("--format", ep.format, "csv | json (default: from extension)");
  episode->add_option("--config", ep.config, "INI configuration file");
  episode->add_flag("--record-v", ep.record_v, "Record the Lyapunov value (MRAC only)");

  BenchArgs bn;
  auto* bench = app.add_subcommand("bench", "Paired benchmark over sampled test environments");
  bench->add_option("--n-envs", bn.n_envs, "Number of sampled environments")->capture_default_str();
  bench->add_option("--master-seed", bn.master_seed, "Master seed")->capture_default_str();
  bench->add_option("--variants", bn.variants, "Comma-separated <policy>-<loop> names")
      ->capture_default_str();
  bench->add_option("--form", bn.form, "linear | nonlinear")->capture_default_str();
  bench->add_option("--export", bn.export_path, "Write the table (.csv or .json)");
  bench->add_option("--format", bn.format, "csv | json (default: from extension)");
  bench->add_option("--policy-file", bn.policy_file, "Network policy for mlp-* variants");
  bench->add_option("--config", bn.config, "INI configuration file");
  bench->add_option("--env-suite", bn.env_suite, "Load environments from a JSONL suite");
  bench->add_option("--save-env-suite", bn.save_env_suite, "Write the environments as JSONL");
  bench->add_flag("--serial", bn.serial, "Run single-threaded");

  app.add_subcommand("selftest", "Run the invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*episode) return run_episode_cmd(ep);
    if (*bench) return run_bench_cmd(bn);
    const int failures = mracrl::tools::run_selftest(std::cout);
    std::cout << (failures == 0 ? "selftest: all checks passed\n"
                                : "selftest: " + std::to_string(failures) + " check(s) failed\n");
    return failures == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
