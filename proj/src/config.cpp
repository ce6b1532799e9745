#include "mracrl/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace mracrl {

namespace pt = boost::property_tree;

namespace {

const std::set<std::string> kKnownKeys = {
    "reference.m",         "reference.l",        "reference.b",
    "reference.g",         "mrac.gamma_x",       "mrac.preset",       "mrac.gamma_u",
    "mrac.q",              "mrac.omega",         "mrac.psi",
    "mrac.beta_r",         "lqr.q1",             "lqr.q2",
    "lqr.r",               "lqr.literal_feedback", "cost.q1",
    "cost.q2",             "cost.r",             "episode.agent_rate_hz",
    "episode.guard",       "episode.x0",         "episode.x0_perturb",
    "episode.x0_seed",     "tolerance.lyapunov", "tolerance.care",
    "tolerance.care_max_iterations", "tolerance.symmetry", "loop.integration_rate_hz"};

double to_double(const std::string& key, const std::string& raw) {
  std::string s = boost::trim_copy(raw);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw SchemaError("config: key '" + key + "' expects a number, got '" + raw + "'");
  }
  return v;
}

Vector to_vector(const std::string& key, const std::string& raw) {
  std::vector<std::string> parts;
  boost::split(parts, raw, boost::is_any_of(","));
  Vector v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v(static_cast<Eigen::Index>(i)) = to_double(key, parts[i]);
  return v;
}

bool to_bool(const std::string& key, const std::string& raw) {
  const auto s = boost::to_lower_copy(boost::trim_copy(raw));
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw SchemaError("config: key '" + key + "' expects true|false, got '" + raw + "'");
}

Vector resize_diag(const Vector& given, Eigen::Index n, const char* what) {
  if (given.size() == 1) return Vector::Constant(n, given(0));
  if (given.size() != n) {
    throw DimensionError(std::string("config: ") + what + " needs 1 or " + std::to_string(n) +
                         " entries");
  }
  return given;
}

}  // namespace

MracConfig RunConfig::mrac_config(Form form, double inner_rate_hz) const {
  const auto reference_system = companion_from_pendulum(reference, form);
  MracConfig c = mrac.preset == MracPreset::kRate
                     ? MracConfig::for_inner_rate(reference_system, inner_rate_hz)
                     : MracConfig::defaults(reference_system);
  const auto n = reference_system.dim();
  if (mrac.gamma_x_diag) c.gamma_x = resize_diag(*mrac.gamma_x_diag, n, "gamma_x").asDiagonal();
  if (mrac.gamma_u) c.gamma_u = *mrac.gamma_u;
  if (mrac.q_diag) c.Q = resize_diag(*mrac.q_diag, n, "q").asDiagonal();
  if (mrac.omega) c.omega = resize_diag(*mrac.omega, n, "omega");
  if (mrac.psi) c.psi = resize_diag(*mrac.psi, n, "psi");
  if (mrac.beta_r) c.beta_r = resize_diag(*mrac.beta_r, n, "beta_r");
  c.validate();
  return c;
}

EpisodeSettings RunConfig::episode_settings() const {
  EpisodeSettings s;
  s.agent_rate_hz = agent_rate_hz;
  s.cost = cost;
  s.guard = guard;
  s.reference_params = reference;
  s.tolerances = tolerances;
  return s;
}

BenchmarkSettings RunConfig::benchmark_settings() const {
  BenchmarkSettings s;
  s.episode = episode_settings();
  s.x0 = initial_state();
  return s;
}

VariantOptions RunConfig::variant_options() const {
  VariantOptions o;
  o.lqr = lqr;
  o.literal_feedback = literal_feedback;
  o.reference = reference;
  o.integration_rate_hz = integration_rate_hz;
  o.mrac_factory = [self = *this](const CompanionSystem& ref, double inner_rate_hz) {
    return self.mrac_config(ref.form(), inner_rate_hz);
  };
  return o;
}

Vector RunConfig::initial_state() const {
  Vector x = x0;
  if (x0_perturb > 0.0) {
    std::mt19937_64 rng(x0_seed);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += uniform(rng, -x0_perturb, x0_perturb);
  }
  return x;
}

void RunConfig::validate() const {
  reference.validate();
  cost.validate();
  if (!(agent_rate_hz > 0.0)) throw ArgumentError("config: agent_rate_hz must be positive");
  if (!(guard > 0.0)) throw ArgumentError("config: guard must be positive");
  if (x0.size() != 2 || !all_finite(x0)) throw DimensionError("config: x0 must hold 2 finite values");
  if (x0_perturb < 0.0) throw ArgumentError("config: x0_perturb must be >= 0");
  if (!(integration_rate_hz > 0.0)) throw ArgumentError("config: integration_rate_hz must be positive");
  if (!(lqr.r > 0.0) || lqr.q1 < 0.0 || lqr.q2 < 0.0) throw ArgumentError("config: bad LQR weights");
  if (!(tolerances.lyapunov > 0.0) || !(tolerances.care > 0.0) ||
      tolerances.care_max_iterations < 1 || !(tolerances.symmetry > 0.0)) {
    throw ArgumentError("config: tolerances must be positive");
  }
}

RunConfig parse_config(std::string_view text) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError("config: " + e.message() + " at line " + std::to_string(e.line()), e.line());
  }

  RunConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw SchemaError("config: key '" + section + "' must sit inside a [section]");
    }
    for (const auto& [key, node] : body) {
      const std::string full = section + "." + key;
      if (!kKnownKeys.count(full)) throw SchemaError("config: unknown key '" + full + "'");
      const std::string& v = node.data();
      if (full == "reference.m") c.reference.m = to_double(full, v);
      else if (full == "reference.l") c.reference.l = to_double(full, v);
      else if (full == "reference.b") c.reference.b = to_double(full, v);
      else if (full == "reference.g") c.reference.g = to_double(full, v);
      else if (full == "mrac.preset") {
        const auto p = boost::trim_copy(v);
        if (p == "rate") c.mrac.preset = MracPreset::kRate;
        else if (p == "baseline") c.mrac.preset = MracPreset::kBaseline;
        else throw SchemaError("config: mrac.preset expects rate|baseline, got '" + v + "'");
      }
      else if (full == "mrac.gamma_x") c.mrac.gamma_x_diag = to_vector(full, v);
      else if (full == "mrac.gamma_u") c.mrac.gamma_u = to_double(full, v);
      else if (full == "mrac.q") c.mrac.q_diag = to_vector(full, v);
      else if (full == "mrac.omega") c.mrac.omega = to_vector(full, v);
      else if (full == "mrac.psi") c.mrac.psi = to_vector(full, v);
      else if (full == "mrac.beta_r") c.mrac.beta_r = to_vector(full, v);
      else if (full == "lqr.q1") c.lqr.q1 = to_double(full, v);
      else if (full == "lqr.q2") c.lqr.q2 = to_double(full, v);
      else if (full == "lqr.r") c.lqr.r = to_double(full, v);
      else if (full == "lqr.literal_feedback") c.literal_feedback = to_bool(full, v);
      else if (full == "cost.q1") c.cost.q1 = to_double(full, v);
      else if (full == "cost.q2") c.cost.q2 = to_double(full, v);
      else if (full == "cost.r") c.cost.r = to_double(full, v);
      else if (full == "episode.agent_rate_hz") c.agent_rate_hz = to_double(full, v);
      else if (full == "episode.guard") c.guard = to_double(full, v);
      else if (full == "episode.x0") c.x0 = to_vector(full, v);
      else if (full == "episode.x0_perturb") c.x0_perturb = to_double(full, v);
      else if (full == "episode.x0_seed") c.x0_seed = static_cast<std::uint64_t>(to_double(full, v));
      else if (full == "tolerance.lyapunov") c.tolerances.lyapunov = to_double(full, v);
      else if (full == "tolerance.care") c.tolerances.care = to_double(full, v);
      else if (full == "tolerance.care_max_iterations")
        c.tolerances.care_max_iterations = static_cast<int>(to_double(full, v));
      else if (full == "tolerance.symmetry") c.tolerances.symmetry = to_double(full, v);
      else if (full == "loop.integration_rate_hz") c.integration_rate_hz = to_double(full, v);
    }
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const Error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

}  // namespace mracrl
