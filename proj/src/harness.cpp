#include "mracrl/harness.hpp"

#include <cmath>

namespace mracrl {

namespace {

int checked_count(double value, const char* what) {
  const double rounded = std::round(value);
  if (rounded < 1.0 || std::abs(value - rounded) > 1e-9 * std::max(1.0, rounded)) {
    throw ArgumentError(std::string(what) + " must be a positive integer, got " +
                        std::to_string(value));
  }
  return static_cast<int>(rounded);
}

void guard_scalar(const char* signal, double value, double bound, double t) {
  if (!std::isfinite(value) || std::abs(value) > bound) throw DivergenceError(signal, t, value);
}

void guard_state(const char* signal, const Vector& x, double bound, double t) {
  const double n = x.norm();
  if (!std::isfinite(n) || n > bound) throw DivergenceError(signal, t, n);
}

Observation observe(const Vector& x, double theta_set) { return {x(0), x(1), theta_set}; }

}  // namespace

LoopConfig LoopConfig::make(std::string name, double outer_rate_hz, int F1, int F2,
                            bool mrac_enabled, int plant_substeps) {
  LoopConfig c;
  c.name = std::move(name);
  c.outer_rate_hz = outer_rate_hz;
  c.F1 = F1;
  c.F2 = F2;
  c.delta1 = 1.0 / (outer_rate_hz * F1);
  c.delta2 = c.delta1 / F2;
  c.mrac_enabled = mrac_enabled;
  c.plant_substeps = plant_substeps;
  c.validate();
  return c;
}

LoopConfig LoopConfig::named(const std::string& name, double integration_rate_hz) {
  const auto substeps = [&](double inner_rate) {
    return checked_count(integration_rate_hz / inner_rate, "integration substeps");
  };
  if (name == "direct100") return make(name, 100.0, 1, substeps(100.0), false, substeps(100.0));
  if (name == "mrac100") return make(name, 10.0, 10, substeps(100.0), true, substeps(100.0));
  if (name == "direct10") return make(name, 10.0, 1, substeps(10.0), false, substeps(10.0));
  if (name == "mrac10") return make(name, 10.0, 1, substeps(10.0), true, substeps(10.0));
  throw ArgumentError("unknown loop variant '" + name +
                      "' (expected direct100|mrac100|direct10|mrac10)");
}

void LoopConfig::validate() const {
  if (!(outer_rate_hz > 0.0)) throw ArgumentError("LoopConfig: outer rate must be positive");
  if (F1 < 1 || F2 < 1 || plant_substeps < 1) {
    throw ArgumentError("LoopConfig: F1, F2 and plant_substeps must be >= 1");
  }
  if (std::abs(delta1 * F1 * outer_rate_hz - 1.0) > 1e-12) {
    throw ArgumentError("LoopConfig: delta1 * F1 * outer_rate must equal 1");
  }
  if (std::abs(delta2 * F2 - delta1) > 1e-12 * delta1) {
    throw ArgumentError("LoopConfig: delta2 * F2 must equal delta1");
  }
}

EpisodeRecord run_episode(const TestEnv& env, const Policy& policy, const LoopConfig& loop,
                          const std::optional<MracConfig>& mrac, const PlantState& x0,
                          const EpisodeSettings& settings) {
  loop.validate();
  env.schedule.validate();
  if (loop.mrac_enabled != mrac.has_value()) {
    throw ArgumentError("run_episode: MRAC config must be given exactly when MRAC is enabled");
  }
  if (mrac && mrac->variant != env.form) {
    throw ArgumentError("run_episode: MRAC variant does not match the environment form");
  }
  const CompanionSystem reference = companion_from_pendulum(settings.reference_params, env.form);
  const CompanionSystem truth = companion_from_pendulum(env.params, env.form);
  if (x0.x.size() != reference.dim()) throw DimensionError("run_episode: x0 has wrong length");

  const double inner_rate = loop.inner_rate_hz();
  const double duration = env.schedule.duration();
  const int n_outer = checked_count(duration * loop.outer_rate_hz, "episode outer ticks");
  const int n_inner = n_outer * loop.F1;
  const int ticks_per_agent_step = checked_count(inner_rate / settings.agent_rate_hz,
                                                 "inner ticks per agent step");

  std::optional<MracController> controller;
  if (mrac) controller.emplace(reference, *mrac, settings.tolerances);
  const bool track_v = controller && settings.ideal.has_value();

  EpisodeRecord rec;
  rec.times.reserve(n_inner);
  rec.x.reserve(n_inner);
  rec.x_r.reserve(n_inner);
  rec.u.reserve(n_inner);
  rec.u_r.reserve(n_inner);
  rec.e.reserve(n_inner);
  rec.theta_set.reserve(n_inner);

  PlantState x{x0.x, x0.t};
  PlantState x_r{x0.x, x0.t};
  const double bound = settings.guard;
  int k = 0;
  for (int j = 0; j < n_outer; ++j) {
    const double t_outer = static_cast<double>(j) / loop.outer_rate_hz;
    const double theta_set = active_setpoint(env.schedule, t_outer);
    const double u_r = policy.act(observe(x_r.x, theta_set));
    guard_scalar("u_r", u_r, bound, t_outer);
    const double u_direct = controller ? 0.0 : policy.act(observe(x.x, theta_set));

    for (int i = 0; i < loop.F1; ++i, ++k) {
      const double t = static_cast<double>(k) / inner_rate;
      const Vector e = x.x - x_r.x;
      double u = u_direct;
      if (controller) {
        if (track_v) {
          rec.V.push_back(lyapunov_value(e, controller->state(), *settings.ideal,
                                         controller->derived(), controller->config()));
        }
        rec.K_hat.push_back(controller->state().K_hat);
        rec.k_u_hat.push_back(controller->state().k_u_hat);
        u = controller->tick(x.x, x_r.x, u_r, loop.delta1).u;
      }
      guard_scalar("u", u, bound, t);

      rec.times.push_back(t);
      rec.x.push_back(x.x);
      rec.x_r.push_back(x_r.x);
      rec.u.push_back(u);
      rec.u_r.push_back(u_r);
      rec.e.push_back(e);
      rec.theta_set.push_back(theta_set);
      if (k % ticks_per_agent_step == 0) {
        rec.costs.push_back(step_cost(x.x(0), x.x(1), u, theta_set, settings.cost));
      }

      x_r = step_plant(reference, x_r, u_r, loop.delta1, loop.F2);
      x = step_plant(truth, x, u, loop.delta1, loop.plant_substeps);
      guard_state("x_r", x_r.x, bound, x_r.t);
      guard_state("x", x.x, bound, x.t);
    }
  }
  rec.summary = compute_metrics(rec);
  return rec;
}

MetricsSummary compute_metrics(const EpisodeRecord& record) {
  MetricsSummary s;
  for (double c : record.costs) s.total_cost += c;
  if (!record.costs.empty()) s.avg_cost = s.total_cost / static_cast<double>(record.costs.size());
  double sum_sq = 0.0;
  for (const auto& e : record.e) {
    const double deg = e(0) * kRadToDeg;
    sum_sq += deg * deg;
    s.peak_abs_e_theta = std::max(s.peak_abs_e_theta, std::abs(e(0)));
  }
  if (!record.e.empty()) s.avg_e_theta_sq_deg = sum_sq / static_cast<double>(record.e.size());
  return s;
}

}  // namespace mracrl
