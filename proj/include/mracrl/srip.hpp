#pragma once

// Set-point-randomized inverted pendulum task: quadratic step cost,
// piecewise-constant set-point schedules and randomized test plants.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "mracrl/plant.hpp"

namespace mracrl {

struct CostWeights {
  double q1 = 1.0;
  double q2 = 0.1;
  double r = 0.001;
  void validate() const;
};

struct SetpointSchedule {
  std::vector<double> setpoints;
  double dwell = 5.0;

  double duration() const { return dwell * static_cast<double>(setpoints.size()); }
  void validate() const;
  bool operator==(const SetpointSchedule&) const = default;
};

struct TestEnv {
  PlantParams params;
  SetpointSchedule schedule;
  std::uint64_t seed = 0;
  Form form = Form::kLinear;

  /// m = l = b = 1, g = 10 with the given schedule.
  static TestEnv nominal(SetpointSchedule schedule, Form form, std::uint64_t seed = 0);
  bool operator==(const TestEnv&) const = default;
};

inline constexpr int kSetpointsPerEpisode = 4;
inline constexpr double kDwellSeconds = 5.0;
inline constexpr double kMassLengthLow = 0.75;
inline constexpr double kMassLengthHigh = 1.25;
inline constexpr double kDampingLow = 0.001;
inline constexpr double kDampingHigh = 2.0;

/// q1 (th - th0)^2 + q2 th'^2 + r u^2 on unwrapped angles.
double step_cost(double theta, double theta_dot, double u, double theta_set,
                 const CostWeights& w = {});

/// Uniform double in [lo, hi) from the top 53 bits of one engine draw.
/// Fixed mapping so sampled suites replay identically across standard libraries.
double uniform(std::mt19937_64& rng, double lo, double hi);

/// Mixes a master seed and an index into an independent stream seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

SetpointSchedule sample_schedule(std::uint64_t seed);
SetpointSchedule sample_schedule(std::mt19937_64& rng);

double active_setpoint(const SetpointSchedule& schedule, double t);

TestEnv sample_test_env(std::uint64_t seed, Form form);

std::string env_to_jsonl(const TestEnv& env);
TestEnv env_from_jsonl(const std::string& line);
void save_env_suite(const std::vector<TestEnv>& envs, const std::filesystem::path& path);
std::vector<TestEnv> load_env_suite(const std::filesystem::path& path);

}  // namespace mracrl
