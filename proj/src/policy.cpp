#include "mracrl/policy.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mracrl {

using nlohmann::json;

namespace {

Vector state_of(const Observation& obs) {
  Vector x(2);
  x << obs.theta, obs.theta_dot;
  return x;
}

Matrix lqr_state_weight(const LqrWeights& w, Eigen::Index n) {
  Matrix Q = Matrix::Zero(n, n);
  Q(0, 0) = w.q1;
  Q(1, 1) = w.q2;
  return Q;
}

std::string_view field_name(ObservationField f) {
  switch (f) {
    case ObservationField::kTheta: return "theta";
    case ObservationField::kThetaDot: return "theta_dot";
    case ObservationField::kThetaSet: return "theta_set";
    case ObservationField::kThetaError: return "theta_error";
  }
  return "";
}

ObservationField field_from_name(const std::string& s) {
  if (s == "theta") return ObservationField::kTheta;
  if (s == "theta_dot") return ObservationField::kThetaDot;
  if (s == "theta_set") return ObservationField::kThetaSet;
  if (s == "theta_error") return ObservationField::kThetaError;
  throw SchemaError("policy file: unknown observation field '" + s + "'");
}

double field_value(ObservationField f, const Observation& obs) {
  switch (f) {
    case ObservationField::kTheta: return obs.theta;
    case ObservationField::kThetaDot: return obs.theta_dot;
    case ObservationField::kThetaSet: return obs.theta_set;
    case ObservationField::kThetaError: return obs.theta - obs.theta_set;
  }
  return 0.0;
}

template <class T>
T get_field(const json& doc, const char* key) {
  if (!doc.contains(key)) throw SchemaError(std::string("policy file: missing field '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("policy file: field '") + key + "' has the wrong type");
  }
}

}  // namespace

double lqr_feedforward(double theta_set, const CompanionSystem& reference, Form mode) {
  // Last row of x' = 0 at [theta_set, 0, ...]: alpha_1 phi(theta_set) + b u0 = 0.
  return -reference.alpha()(0) * phi(mode, theta_set) / reference.b_scalar();
}

LqrPolicy::LqrPolicy(const CompanionSystem& reference, const LqrWeights& weights,
                     Form feedforward_mode, bool literal_feedback, const Tolerances& tol)
    : reference_(reference), mode_(feedforward_mode), literal_(literal_feedback) {
  if (reference.dim() != 2) throw DimensionError("LqrPolicy: expects a pendulum (n = 2) model");
  if (weights.q1 < 0.0 || weights.q2 < 0.0) throw ArgumentError("LqrPolicy: q1, q2 must be >= 0");
  const CareSolution care = solve_care(reference.a_matrix(), reference.b_column(),
                                       lqr_state_weight(weights, 2), weights.r, tol);
  K_r_ = care.K;
}

double LqrPolicy::act(const Observation& obs) const {
  Vector err = state_of(obs);
  if (!literal_) err(0) -= obs.theta_set;
  return -K_r_.dot(err) + lqr_feedforward(obs.theta_set, reference_, mode_);
}

double lqr_act(const LqrPolicy& policy, const Observation& obs) { return policy.act(obs); }

std::vector<int> MlpPolicy::layer_sizes() const {
  std::vector<int> sizes;
  if (layers.empty()) return sizes;
  sizes.push_back(static_cast<int>(layers.front().weights.cols()));
  for (const auto& layer : layers) sizes.push_back(static_cast<int>(layer.weights.rows()));
  return sizes;
}

void MlpPolicy::validate() const {
  if (layers.empty()) throw SchemaError("policy: no layers");
  if (layers.front().weights.cols() != 3) throw SchemaError("policy: input width must be 3");
  if (layers.back().weights.rows() != 1) throw SchemaError("policy: output width must be 1");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& layer = layers[i];
    if (layer.biases.size() != layer.weights.rows()) {
      throw SchemaError("policy: layer " + std::to_string(i) + " bias length mismatch");
    }
    if (i > 0 && layer.weights.cols() != layers[i - 1].weights.rows()) {
      throw SchemaError("policy: layer " + std::to_string(i) + " input width breaks the chain");
    }
    if (!layer.weights.allFinite() || !layer.biases.allFinite()) {
      throw SchemaError("policy: layer " + std::to_string(i) + " has non-finite parameters");
    }
  }
  if (activations.size() + 1 != layers.size()) {
    throw SchemaError("policy: need one activation per hidden layer");
  }
  if (output_scale && !(*output_scale > 0.0)) throw SchemaError("policy: output_scale must be > 0");
}

MlpPolicy mlp_parse(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("policy file: ") + e.what(), e.byte);
  }
  if (!doc.is_object()) throw SchemaError("policy file: top level must be an object");

  const auto sizes = get_field<std::vector<int>>(doc, "layer_sizes");
  const auto acts = get_field<std::vector<std::string>>(doc, "activations");
  const auto weights = get_field<std::vector<std::vector<double>>>(doc, "weights");
  const auto biases = get_field<std::vector<std::vector<double>>>(doc, "biases");
  if (sizes.size() < 2) throw SchemaError("policy file: layer_sizes needs at least 2 entries");
  const std::size_t n_layers = sizes.size() - 1;
  if (weights.size() != n_layers || biases.size() != n_layers) {
    throw SchemaError("policy file: weights/biases count does not match layer_sizes");
  }

  MlpPolicy p;
  for (std::size_t i = 0; i < n_layers; ++i) {
    const int in = sizes[i];
    const int out = sizes[i + 1];
    if (in < 1 || out < 1) throw SchemaError("policy file: layer sizes must be positive");
    if (weights[i].size() != static_cast<std::size_t>(in) * out) {
      throw SchemaError("policy file: layer " + std::to_string(i) + " expects " +
                        std::to_string(in * out) + " weights, got " +
                        std::to_string(weights[i].size()));
    }
    if (biases[i].size() != static_cast<std::size_t>(out)) {
      throw SchemaError("policy file: layer " + std::to_string(i) + " bias length mismatch");
    }
    MlpLayer layer;
    layer.weights = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                   Eigen::RowMajor>>(weights[i].data(), out, in);
    layer.biases = Eigen::Map<const Vector>(biases[i].data(), out);
    p.layers.push_back(std::move(layer));
  }
  for (const auto& a : acts) {
    if (a == "tanh") {
      p.activations.push_back(Activation::kTanh);
    } else if (a == "relu") {
      p.activations.push_back(Activation::kRelu);
    } else {
      throw SchemaError("policy file: unknown activation '" + a + "'");
    }
  }
  if (doc.contains("output_scale") && !doc.at("output_scale").is_null()) {
    p.output_scale = get_field<double>(doc, "output_scale");
  }
  if (doc.contains("observation_order")) {
    const auto order = get_field<std::vector<std::string>>(doc, "observation_order");
    if (order.size() != 3) throw SchemaError("policy file: observation_order needs 3 names");
    for (std::size_t i = 0; i < 3; ++i) p.observation_order[i] = field_from_name(order[i]);
  }
  p.validate();
  return p;
}

MlpPolicy mlp_load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open policy file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return mlp_parse(buf.str());
}

std::string mlp_to_json(const MlpPolicy& policy) {
  policy.validate();
  json doc;
  doc["layer_sizes"] = policy.layer_sizes();
  json acts = json::array();
  for (auto a : policy.activations) acts.push_back(a == Activation::kTanh ? "tanh" : "relu");
  doc["activations"] = acts;
  json weights = json::array();
  json biases = json::array();
  for (const auto& layer : policy.layers) {
    std::vector<double> w;
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) w.push_back(layer.weights(r, c));
    }
    weights.push_back(w);
    biases.push_back(std::vector<double>(layer.biases.data(),
                                         layer.biases.data() + layer.biases.size()));
  }
  doc["weights"] = weights;
  doc["biases"] = biases;
  if (policy.output_scale) doc["output_scale"] = *policy.output_scale;
  json order = json::array();
  for (auto f : policy.observation_order) order.push_back(std::string(field_name(f)));
  doc["observation_order"] = order;
  return doc.dump(2);
}

void mlp_save(const MlpPolicy& policy, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write policy file " + path.string());
  out << mlp_to_json(policy) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

double mlp_act(const MlpPolicy& policy, const Observation& obs) {
  Vector a(3);
  for (int i = 0; i < 3; ++i) a(i) = field_value(policy.observation_order[i], obs);
  const std::size_t last = policy.layers.size() - 1;
  for (std::size_t i = 0; i < policy.layers.size(); ++i) {
    const auto& layer = policy.layers[i];
    a = layer.weights * a + layer.biases;
    if (i < last) {
      if (policy.activations[i] == Activation::kTanh) {
        a = a.array().tanh();
      } else {
        a = a.cwiseMax(0.0);
      }
    }
    if (!a.allFinite()) {
      throw NumericError("mlp_act: non-finite activation in layer " + std::to_string(i));
    }
  }
  double u = a(0);
  if (policy.output_scale) u = *policy.output_scale * std::tanh(u);
  return u;
}

double Policy::act(const Observation& obs) const {
  return std::visit(
      [&](const auto& p) {
        if constexpr (std::is_same_v<std::decay_t<decltype(p)>, LqrPolicy>) {
          return p.act(obs);
        } else {
          return mlp_act(p, obs);
        }
      },
      impl_);
}

std::string_view Policy::kind() const { return lqr() ? "lqr" : "mlp"; }

}  // namespace mracrl
