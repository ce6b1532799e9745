#pragma once

// Inner/outer loop episode runner.
//
// Each outer tick evaluates the policy once. With MRAC enabled the policy
// only ever sees the reference state x_r; the adaptive inner loop runs F1
// ticks per outer tick, each one forming e = x - x_r, computing u from the
// pre-update gains, adapting, then integrating the reference F2 Euler
// substeps and the true plant `plant_substeps` substeps under a held u.
//
// With MRAC disabled the policy drives the true plant directly from x. The
// reference model is still simulated alongside under pi(x_r) so that the
// tracking error measures how far the deployed trajectory strays from the
// simulated one.

#include <optional>
#include <string>
#include <vector>

#include "mracrl/mrac.hpp"
#include "mracrl/plant.hpp"
#include "mracrl/policy.hpp"
#include "mracrl/srip.hpp"

namespace mracrl {

struct LoopConfig {
  std::string name;
  double outer_rate_hz = 10.0;
  int F1 = 10;
  int F2 = 2;
  double delta1 = 0.01;
  double delta2 = 0.005;
  bool mrac_enabled = true;
  int plant_substeps = 2;

  /// Fills delta1 = 1 / (outer_rate * F1), delta2 = delta1 / F2.
  static LoopConfig make(std::string name, double outer_rate_hz, int F1, int F2,
                         bool mrac_enabled, int plant_substeps);

  /// One of direct100, mrac100, direct10, mrac10. Reference and true plant
  /// are both integrated at `integration_rate_hz`.
  static LoopConfig named(const std::string& name, double integration_rate_hz = 200.0);

  double inner_rate_hz() const { return outer_rate_hz * F1; }
  void validate() const;
};

struct MetricsSummary {
  double avg_cost = 0.0;
  double total_cost = 0.0;
  double avg_e_theta_sq_deg = 0.0;  // squared degrees
  double peak_abs_e_theta = 0.0;    // radians
  bool operator==(const MetricsSummary&) const = default;
};

/// Inner-grid series share one length; `costs` lives on the agent grid.
struct EpisodeRecord {
  std::vector<double> times;
  std::vector<Vector> x;
  std::vector<Vector> x_r;
  std::vector<double> u;
  std::vector<double> u_r;
  std::vector<Vector> e;
  std::vector<double> theta_set;
  std::vector<double> costs;
  std::vector<double> V;            // empty unless ideal gains were supplied
  std::vector<Vector> K_hat;        // empty with MRAC disabled
  std::vector<double> k_u_hat;
  MetricsSummary summary;

  std::size_t size() const { return times.size(); }
};

struct EpisodeSettings {
  double agent_rate_hz = 10.0;
  CostWeights cost;
  /// Bound on |u_r|, |u|, ||x_r||, ||x||; exceeding it aborts the episode.
  double guard = 1e3;
  PlantParams reference_params = PlantParams::nominal();
  /// When set (and MRAC is enabled) V(t_k) is recorded at every inner tick.
  std::optional<IdealGains> ideal;
  Tolerances tolerances;
};

/// Runs one episode over the schedule's full duration. `mrac` must be set
/// exactly when `loop.mrac_enabled`.
EpisodeRecord run_episode(const TestEnv& env, const Policy& policy, const LoopConfig& loop,
                          const std::optional<MracConfig>& mrac, const PlantState& x0,
                          const EpisodeSettings& settings = {});

MetricsSummary compute_metrics(const EpisodeRecord& record);

inline constexpr double kRadToDeg = 57.295779513082320876798;

}  // namespace mracrl
