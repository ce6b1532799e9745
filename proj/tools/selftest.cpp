#include "selftest.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>

#include "mracrl/benchmark.hpp"
#include "mracrl/export.hpp"

namespace mracrl::tools {

namespace {

struct Check {
  std::string name;
  std::function<std::string()> run;  // empty string on success
};

Matrix random_hurwitz(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> normal;
  Matrix A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = normal(rng);
  // Shift by the spectral abscissa bound so every eigenvalue moves left.
  const double shift = A.norm() + 0.5;
  return A - shift * Matrix::Identity(n, n);
}

std::string lyapunov_check() {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + trial % 3;
    const Matrix A = random_hurwitz(rng, n);
    const Matrix Q = Matrix::Identity(n, n);
    const auto sol = solve_lyapunov(A, Q);
    if (lyapunov_residual(A, sol.P, Q) > 1e-10) return "residual too large at trial " + std::to_string(trial);
  }
  return {};
}

std::string care_scalar_check() {
  const auto sol = solve_care(Matrix::Zero(1, 1), Vector::Ones(1), Matrix::Identity(1, 1), 1.0);
  if (std::abs(sol.P(0, 0) - 1.0) > 1e-12 || std::abs(sol.K(0) - 1.0) > 1e-12) {
    return "P=" + std::to_string(sol.P(0, 0)) + " K=" + std::to_string(sol.K(0));
  }
  return {};
}

std::string feedthrough_check() {
  for (Form form : {Form::kLinear, Form::kNonlinear}) {
    const auto reference = companion_from_pendulum(PlantParams::nominal(), form);
    const Policy policy{LqrPolicy(reference, {}, form)};
    const auto loop = LoopConfig::named("mrac100");
    const auto record =
        run_episode(TestEnv::nominal(sample_schedule(3), form), policy, loop,
                    MracConfig::for_inner_rate(reference, loop.inner_rate_hz()),
                    PlantState{Vector::Zero(2), 0.0});
    for (const auto& e : record.e) {
      if (e.norm() > 1e-9) return std::string(to_string(form)) + ": tracking error " + std::to_string(e.norm());
    }
  }
  return {};
}

std::string rate_check() {
  for (const char* name : {"direct100", "mrac100", "direct10", "mrac10"}) {
    const auto loop = LoopConfig::named(name);
    const auto reference = companion_from_pendulum(PlantParams::nominal(), Form::kLinear);
    const Policy policy{LqrPolicy(reference)};
    std::optional<MracConfig> mrac;
    if (loop.mrac_enabled) mrac = MracConfig::for_inner_rate(reference, loop.inner_rate_hz());
    const auto env = TestEnv::nominal(sample_schedule(0), Form::kLinear);
    const auto record = run_episode(env, policy, loop, mrac, PlantState{Vector::Zero(2), 0.0});
    const auto expected = static_cast<std::size_t>(
        std::llround(env.schedule.duration() * loop.outer_rate_hz * loop.F1));
    if (record.size() != expected) return std::string(name) + ": inner tick count mismatch";
    if (record.costs.size() != 200) return std::string(name) + ": cost count != 200";
  }
  return {};
}

std::string lqr_setpoint_check() {
  const auto reference = companion_from_pendulum(PlantParams::nominal(), Form::kLinear);
  const LqrPolicy lqr(reference);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const double th = uniform(rng, -M_PI, M_PI);
    Vector x(2);
    x << th, 0.0;
    const double u = lqr_act(lqr, {th, 0.0, th});
    if (plant_derivative(reference, x, u).norm() > 1e-12) return "nonzero derivative at set-point";
  }
  return {};
}

// Pendulum Euler simulation written from the physical constants, with the
// policy reading the true state at the outer rate.
std::string direct_equivalence_check() {
  for (Form form : {Form::kLinear, Form::kNonlinear}) {
    const auto reference = companion_from_pendulum(PlantParams::nominal(), form);
    const Policy policy{LqrPolicy(reference, {}, form)};
    const auto loop = LoopConfig::named("direct100");
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto env = sample_test_env(seed, form);
      const auto record = run_episode(env, policy, loop, std::nullopt, PlantState{Vector::Zero(2), 0.0});
      const auto& p = env.params;
      const double inertia = p.m * p.l * p.l;
      double th = 0.0, thd = 0.0, worst = 0.0;
      const double h = loop.delta1 / loop.plant_substeps;
      for (std::size_t k = 0; k < record.size(); ++k) {
        worst = std::max({worst, std::abs(th - record.x[k](0)), std::abs(thd - record.x[k](1))});
        const double u = policy.act({th, thd, record.theta_set[k]});
        for (int s = 0; s < loop.plant_substeps; ++s) {
          const double f = form == Form::kLinear ? th : std::sin(th);
          const double acc = (p.g / p.l) * f - (p.b / inertia) * thd + u / inertia;
          th += h * thd;
          thd += h * acc;
        }
      }
      if (worst > 1e-12) return "state deviation " + std::to_string(worst);
    }
  }
  return {};
}

std::string parallel_serial_check() {
  std::vector<BenchVariant> variants;
  for (const char* name : {"lqr-direct100", "lqr-mrac100", "lqr-mrac10"}) {
    variants.push_back(make_variant(name, Form::kLinear));
  }
  const auto a = run_benchmark(6, variants, 42, Form::kLinear);
  const auto b = run_benchmark_serial(6, variants, 42, Form::kLinear);
  if (!(a == b)) return "parallel and serial tables differ";
  if (table_to_csv(a) != table_to_csv(run_benchmark(6, variants, 42, Form::kLinear))) {
    return "repeated runs differ";
  }
  return {};
}

std::string export_roundtrip_check() {
  const auto reference = companion_from_pendulum(PlantParams::nominal(), Form::kLinear);
  const Policy policy{LqrPolicy(reference)};
  const auto loop = LoopConfig::named("mrac100");
  const auto record = run_episode(sample_test_env(9, Form::kLinear), policy, loop,
                                  MracConfig::for_inner_rate(reference, loop.inner_rate_hz()),
                                  PlantState{Vector::Zero(2), 0.0});
  const auto csv = record_from_csv(record_to_csv(record));
  const auto json = record_from_json(record_to_json(record));
  if (csv.x != record.x || csv.u != record.u || csv.costs != record.costs ||
      csv.summary != record.summary) {
    return "CSV round trip lost data";
  }
  if (json.x_r != record.x_r || json.K_hat != record.K_hat || json.summary != record.summary) {
    return "JSON round trip lost data";
  }
  return {};
}

std::string energy_check() {
  const PlantParams p{1.1, 0.9, 0.5, 10.0};
  const auto system = companion_from_pendulum(p, Form::kNonlinear);
  PlantState s{Vector(2), 0.0};
  s.x << 0.3, 0.0;
  // Euler adds O(h^2) energy per step; compare over many steps with a small h.
  double e0 = pendulum_energy(p, s.x);
  for (int i = 0; i < 2000; ++i) s = step_plant(system, s, 0.0, 1e-3, 10);
  const double e1 = pendulum_energy(p, s.x);
  if (e1 > e0) return "energy grew from " + std::to_string(e0) + " to " + std::to_string(e1);
  return {};
}

std::string ideal_gain_check() {
  for (Form form : {Form::kLinear, Form::kNonlinear}) {
    const auto reference = companion_from_pendulum(PlantParams::nominal(), form);
    const auto truth = companion_from_pendulum(PlantParams{1.2, 0.8, 1.7, 10.0}, form);
    const auto ideal = ideal_gains(truth, reference);
    const Vector lhs = truth.alpha() + truth.b_scalar() * truth.lambda_scale() * ideal.K_star;
    if ((lhs - reference.alpha()).norm() > 1e-12) return "matching condition on A fails";
    if (std::abs(truth.b_scalar() * truth.lambda_scale() * ideal.k_u_star - reference.b_scalar()) >
        1e-12) {
      return "matching condition on B fails";
    }
  }
  return {};
}

}  // namespace

int run_selftest(std::ostream& out) {
  const std::vector<Check> checks = {
      {"lyapunov residual on random stable matrices", lyapunov_check},
      {"scalar Riccati P=1 K=1", care_scalar_check},
      {"feedthrough at zero mismatch", feedthrough_check},
      {"inner tick and cost counts", rate_check},
      {"LQR holds the set-point exactly", lqr_setpoint_check},
      {"direct mode matches a minimal simulator", direct_equivalence_check},
      {"ideal gains satisfy the matching conditions", ideal_gain_check},
      {"unforced damped pendulum loses energy", energy_check},
      {"parallel sweep equals serial sweep", parallel_serial_check},
      {"export round trip", export_roundtrip_check},
  };
  int failures = 0;
  for (const auto& c : checks) {
    const auto start = std::chrono::steady_clock::now();
    std::string err;
    try {
      err = c.run();
    } catch (const std::exception& e) {
      err = std::string("threw: ") + e.what();
    }
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (!err.empty()) ++failures;
    out << (err.empty() ? "PASS " : "FAIL ") << c.name << " (" << static_cast<int>(ms) << " ms)"
        << (err.empty() ? "" : ": " + err) << "\n";
  }
  return failures;
}

}  // namespace mracrl::tools
