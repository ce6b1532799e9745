#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mracrl/num_core.hpp"
#include "mracrl/plant.hpp"

namespace mracrl {

/// Augmented observation fed to the outer loop, always built in this order.
struct Observation {
  double theta = 0.0;
  double theta_dot = 0.0;
  double theta_set = 0.0;
};

struct LqrWeights {
  double q1 = 1.0;
  double q2 = 0.1;
  double r = 0.001;
};

/// Set-point LQR: u = -K_r (x - [theta_set, 0]) + u0(theta_set).
/// With `literal_feedback` the shift is dropped: u = -K_r x + u0(theta_set).
class LqrPolicy {
 public:
  LqrPolicy(const CompanionSystem& reference, const LqrWeights& weights = {},
            Form feedforward_mode = Form::kLinear, bool literal_feedback = false,
            const Tolerances& tol = {});

  double act(const Observation& obs) const;

  const Vector& gain() const { return K_r_; }
  const CompanionSystem& reference() const { return reference_; }
  Form feedforward_mode() const { return mode_; }
  bool literal_feedback() const { return literal_; }

 private:
  CompanionSystem reference_;
  Vector K_r_;
  Form mode_;
  bool literal_;
};

/// Steady-state torque holding [theta_set, 0] on the reference model.
double lqr_feedforward(double theta_set, const CompanionSystem& reference, Form mode);

double lqr_act(const LqrPolicy& policy, const Observation& obs);

enum class Activation { kTanh, kRelu };

/// Names accepted in the policy file's `observation_order`.
/// `theta_error` is theta - theta_set.
enum class ObservationField { kTheta, kThetaDot, kThetaSet, kThetaError };

struct MlpLayer {
  Matrix weights;  // out x in
  Vector biases;
};

struct MlpPolicy {
  std::vector<MlpLayer> layers;
  std::vector<Activation> activations;  // one per hidden layer
  std::optional<double> output_scale;
  std::array<ObservationField, 3> observation_order{
      ObservationField::kTheta, ObservationField::kThetaDot, ObservationField::kThetaSet};

  std::vector<int> layer_sizes() const;
  /// Checks the dimension chain; throws SchemaError.
  void validate() const;
};

/// Parses a policy document. Malformed JSON -> ParseError (with byte offset);
/// valid JSON with wrong shape or fields -> SchemaError.
MlpPolicy mlp_parse(std::string_view text);
MlpPolicy mlp_load(const std::filesystem::path& path);
std::string mlp_to_json(const MlpPolicy& policy);
void mlp_save(const MlpPolicy& policy, const std::filesystem::path& path);

double mlp_act(const MlpPolicy& policy, const Observation& obs);

/// Outer-loop policy pi: Observation -> reference torque.
class Policy {
 public:
  Policy(LqrPolicy p) : impl_(std::move(p)) {}
  Policy(MlpPolicy p) : impl_(std::move(p)) {}

  double act(const Observation& obs) const;
  std::string_view kind() const;

  const LqrPolicy* lqr() const { return std::get_if<LqrPolicy>(&impl_); }
  const MlpPolicy* mlp() const { return std::get_if<MlpPolicy>(&impl_); }

 private:
  std::variant<LqrPolicy, MlpPolicy> impl_;
};

}  // namespace mracrl
