#include "mracrl/srip.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

namespace mracrl {

using nlohmann::json;

void CostWeights::validate() const {
  if (q1 < 0.0 || q2 < 0.0 || r < 0.0) throw ArgumentError("CostWeights: weights must be >= 0");
}

void SetpointSchedule::validate() const {
  if (setpoints.empty()) throw ArgumentError("SetpointSchedule: no set-points");
  if (!(dwell > 0.0)) throw ArgumentError("SetpointSchedule: dwell must be positive");
  for (double s : setpoints) {
    if (!(std::abs(s) <= std::numbers::pi)) {
      throw ArgumentError("SetpointSchedule: set-point outside [-pi, pi]");
    }
  }
}

TestEnv TestEnv::nominal(SetpointSchedule schedule, Form form, std::uint64_t seed) {
  return TestEnv{PlantParams::nominal(), std::move(schedule), seed, form};
}

double step_cost(double theta, double theta_dot, double u, double theta_set,
                 const CostWeights& w) {
  const double d = theta - theta_set;
  return w.q1 * d * d + w.q2 * theta_dot * theta_dot + w.r * u * u;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 finalizer over a Weyl step.
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SetpointSchedule sample_schedule(std::mt19937_64& rng) {
  SetpointSchedule s;
  s.dwell = kDwellSeconds;
  s.setpoints.reserve(kSetpointsPerEpisode);
  for (int i = 0; i < kSetpointsPerEpisode; ++i) {
    s.setpoints.push_back(uniform(rng, -std::numbers::pi, std::numbers::pi));
  }
  return s;
}

SetpointSchedule sample_schedule(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_schedule(rng);
}

double active_setpoint(const SetpointSchedule& schedule, double t) {
  if (t < 0.0) throw ArgumentError("active_setpoint: negative time");
  const auto last = schedule.setpoints.size() - 1;
  const auto k = static_cast<std::size_t>(std::floor(t / schedule.dwell));
  return schedule.setpoints[std::min(k, last)];
}

TestEnv sample_test_env(std::uint64_t seed, Form form) {
  std::mt19937_64 rng(seed);
  TestEnv env;
  env.seed = seed;
  env.form = form;
  env.params.l = uniform(rng, kMassLengthLow, kMassLengthHigh);
  env.params.m = uniform(rng, kMassLengthLow, kMassLengthHigh);
  env.params.b = uniform(rng, kDampingLow, kDampingHigh);
  env.params.g = 10.0;
  env.schedule = sample_schedule(rng);
  return env;
}

std::string env_to_jsonl(const TestEnv& env) {
  json j;
  j["seed"] = env.seed;
  j["form"] = std::string(to_string(env.form));
  j["params"] = {{"m", env.params.m}, {"l", env.params.l}, {"b", env.params.b},
                 {"g", env.params.g}};
  j["schedule"] = {{"setpoints", env.schedule.setpoints}, {"dwell", env.schedule.dwell}};
  return j.dump();
}

TestEnv env_from_jsonl(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("env suite: ") + e.what(), e.byte);
  }
  try {
    TestEnv env;
    env.seed = j.at("seed").get<std::uint64_t>();
    env.form = form_from_string(j.at("form").get<std::string>());
    const auto& p = j.at("params");
    env.params = {p.at("m").get<double>(), p.at("l").get<double>(), p.at("b").get<double>(),
                  p.at("g").get<double>()};
    env.schedule.setpoints = j.at("schedule").at("setpoints").get<std::vector<double>>();
    env.schedule.dwell = j.at("schedule").at("dwell").get<double>();
    env.params.validate();
    env.schedule.validate();
    return env;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("env suite: ") + e.what());
  }
}

void save_env_suite(const std::vector<TestEnv>& envs, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write env suite " + path.string());
  for (const auto& env : envs) out << env_to_jsonl(env) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<TestEnv> load_env_suite(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open env suite " + path.string());
  std::vector<TestEnv> envs;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) envs.push_back(env_from_jsonl(line));
  }
  return envs;
}

}  // namespace mracrl
