#pragma once

// INI-style run configuration. Every key is optional; unset keys keep the
// library defaults. Vectors are comma separated.
//
//   [reference]  m, l, b, g
//   [mrac]       preset (rate|baseline), gamma_x (scalar or list: diagonal
//                of Gamma), gamma_u, q (scalar or list: diagonal of Q),
//                omega, psi, beta_r
// preset=rate picks MracConfig::for_inner_rate for each loop; baseline starts
// from MracConfig::defaults. Other [mrac] keys are applied on top.
//   [lqr]        q1, q2, r, literal_feedback (true|false)
//   [cost]       q1, q2, r
//   [episode]    agent_rate_hz, guard, x0, x0_perturb, x0_seed
//   [tolerance]  lyapunov, care, care_max_iterations, symmetry
//   [loop]       integration_rate_hz

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>

#include "mracrl/benchmark.hpp"
#include "mracrl/harness.hpp"

namespace mracrl {

enum class MracPreset { kRate, kBaseline };

struct MracOverrides {
  MracPreset preset = MracPreset::kRate;
  std::optional<Vector> gamma_x_diag;
  std::optional<double> gamma_u;
  std::optional<Vector> q_diag;
  std::optional<Vector> omega;
  std::optional<Vector> psi;
  std::optional<Vector> beta_r;
};

struct RunConfig {
  PlantParams reference = PlantParams::nominal();
  MracOverrides mrac;
  LqrWeights lqr;
  bool literal_feedback = false;
  CostWeights cost;
  double agent_rate_hz = 10.0;
  double guard = 1e3;
  Vector x0 = Vector::Zero(2);
  /// Half-width of a uniform perturbation added to x0; 0 disables it.
  double x0_perturb = 0.0;
  std::uint64_t x0_seed = 0;
  Tolerances tolerances;
  double integration_rate_hz = 200.0;

  /// Preset for the inner-loop rate, then the [mrac] overrides.
  MracConfig mrac_config(Form form, double inner_rate_hz) const;
  EpisodeSettings episode_settings() const;
  BenchmarkSettings benchmark_settings() const;
  VariantOptions variant_options() const;
  /// x0 plus the optional seeded perturbation.
  Vector initial_state() const;
  void validate() const;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace mracrl
