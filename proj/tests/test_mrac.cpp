#include <gtest/gtest.h>

#include <random>

#include "mracrl/mrac.hpp"

using namespace mracrl;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

MracConfig config_with(const Vector& omega, const Vector& psi, Form form = Form::kLinear) {
  const auto n = omega.size();
  MracConfig c;
  c.omega = omega;
  c.psi = psi;
  c.beta_r = -Vector::Ones(n);
  c.gamma_x = 10.0 * Matrix::Identity(n, n);
  c.gamma_u = 10.0;
  c.Q = Matrix::Identity(n, n);
  c.variant = form;
  return c;
}

}  // namespace

TEST(BuildD, Examples) {
  Matrix D = build_D(vec({10, -1}), config_with(vec({2, 2}), vec({0, 0})));
  EXPECT_EQ(D, Matrix(vec({2, 0}).asDiagonal()));
  D = build_D(vec({-3, -1}), config_with(vec({5, 5}), vec({0, -1})));
  EXPECT_EQ(D, Matrix(vec({0, -1}).asDiagonal()));
  D = build_D(vec({1, 1}), config_with(vec({1.5, 2}), vec({-4, -4})));
  EXPECT_EQ(D, Matrix(vec({1.5, 2}).asDiagonal()));
  EXPECT_THROW(build_D(vec({0, -1}), config_with(vec({2, 2}), vec({0, 0}))),
               DegenerateParameterError);
}

TEST(BuildD, ShiftedRowIsStrictlyNegative) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> coef(-20.0, 20.0), om(1.01, 5.0), ps(-5.0, 0.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector alpha = vec({coef(rng), coef(rng), coef(rng)});
    const auto c = config_with(vec({om(rng), om(rng), om(rng)}), vec({ps(rng), ps(rng), ps(rng)}));
    const Vector shifted = alpha - build_D(alpha, c) * alpha;
    EXPECT_TRUE((shifted.array() < 0.0).all());
  }
}

TEST(MracConfig, Validation) {
  auto c = config_with(vec({2, 2}), vec({0, 0}));
  EXPECT_NO_THROW(c.validate());
  c.omega(0) = 1.0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = config_with(vec({2, 2}), vec({0.1, 0}));
  EXPECT_THROW(c.validate(), ArgumentError);
  c = config_with(vec({2, 2}), vec({0, 0}));
  c.gamma_u = 0.0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = config_with(vec({2, 2}), vec({0, 0}));
  c.Q(0, 1) = 3.0;
  c.Q(1, 0) = 3.0;
  EXPECT_THROW(c.validate(), ArgumentError);
}

TEST(MracConfig, Defaults) {
  const auto ref = companion_from_pendulum(PlantParams::nominal(), Form::kNonlinear);
  const auto c = MracConfig::defaults(ref);
  EXPECT_EQ(c.omega, vec({2, 2}));
  EXPECT_EQ(c.psi, vec({0, 0}));
  EXPECT_EQ(c.beta_r, vec({-10, -1}));
  EXPECT_EQ(c.gamma_x, Matrix(10.0 * Matrix::Identity(2, 2)));
  EXPECT_EQ(c.gamma_u, 10.0);
  EXPECT_EQ(c.Q, Matrix(Matrix::Identity(2, 2)));
  EXPECT_EQ(c.variant, Form::kNonlinear);
}

TEST(MracConfig, RatePresetsShareAH) {
  for (double rate : {10.0, 100.0}) {
    const auto lin = companion_from_pendulum(PlantParams::nominal(), Form::kLinear);
    const auto nl = companion_from_pendulum(PlantParams::nominal(), Form::kNonlinear);
    const auto dl = derive(lin, MracConfig::for_inner_rate(lin, rate));
    const auto dn = derive(nl, MracConfig::for_inner_rate(nl, rate));
    EXPECT_LE((dl.A_H - dn.A_H).norm(), 1e-12);
    EXPECT_TRUE(is_hurwitz(dl.A_H));
  }
  const auto lin = companion_from_pendulum(PlantParams::nominal(), Form::kLinear);
  EXPECT_EQ(MracConfig::for_inner_rate(lin, 100.0).gamma_u, kFastInnerLoopGains.gamma_u);
  EXPECT_EQ(MracConfig::for_inner_rate(lin, 10.0).gamma_u, kSlowInnerLoopGains.gamma_u);
}

TEST(DeriveLinear, Examples) {
  auto c = config_with(vec({2, 2}), vec({0, 0}));
  const auto d = derive_linear(vec({10, -1}), 1.0, c);
  Matrix expected(2, 2);
  expected << 0, 1, -10, -1;
  EXPECT_EQ(d.A_H, expected);
  EXPECT_EQ(d.d_alpha, vec({20, 0}));
  EXPECT_EQ(d.h, vec({0, 1}));
  EXPECT_LE(lyapunov_residual(d.A_H, d.P, c.Q), 1e-10);

  const auto stable = derive_linear(vec({-1, -1}), 1.0, c);
  Matrix Ar(2, 2);
  Ar << 0, 1, -1, -1;
  EXPECT_EQ(stable.A_H, Ar);
}

TEST(DeriveNonlinear, Examples) {
  auto c = config_with(vec({2, 2}), vec({0, 0}), Form::kNonlinear);
  c.beta_r = vec({-10, -1});
  const auto d = derive_nonlinear(vec({10, -1}), 1.0, c);
  Matrix expected(2, 2);
  expected << 0, 1, -10, -1;
  EXPECT_EQ(d.A_H, expected);

  // beta = [-1, -3, -3]: s^3 + 3 s^2 + 3 s + 1 = (s + 1)^3.
  auto c3 = config_with(vec({2, 2, 2}), vec({0, 0, 0}), Form::kNonlinear);
  c3.beta_r = vec({-1, -3, -3});
  const auto d3 = derive_nonlinear(vec({1, 2, 3}), 1.0, c3);
  EXPECT_EQ(d3.A_H.row(2), vec({-1, -3, -3}).transpose());
  EXPECT_TRUE(is_hurwitz(d3.A_H));

  // beta = [-1, -1, -1] gives s^3 + s^2 + s + 1, which has roots on the
  // imaginary axis; negativity alone does not make A_H Hurwitz for n = 3.
  c3.beta_r = vec({-1, -1, -1});
  EXPECT_THROW(derive_nonlinear(vec({1, 2, 3}), 1.0, c3), ConstructionError);

  c.beta_r = vec({-10, 0});
  EXPECT_THROW(derive_nonlinear(vec({10, -1}), 1.0, c), Error);
}

TEST(Xi, LinearExamples) {
  const auto d = derive_linear(vec({10, -1}), 1.0, config_with(vec({2, 2}), vec({0, 0})));
  EXPECT_DOUBLE_EQ(xi_linear(0.7, Vector::Zero(2), d), 0.7);
  EXPECT_DOUBLE_EQ(xi_linear(0.0, vec({0.1, 0}), d), -2.0);
  EXPECT_DOUBLE_EQ(xi_linear(1.0, vec({0.1, 0.5}), d), -1.0);
}

TEST(Xi, NonlinearExamples) {
  auto c = config_with(vec({2, 2}), vec({0, 0}), Form::kNonlinear);
  c.beta_r = vec({-10, -1});
  const auto d = derive_nonlinear(vec({10, -1}), 1.0, c);
  const Vector z = vec({0.3, 0.2});
  EXPECT_DOUBLE_EQ(xi_nonlinear(0.4, Vector::Zero(2), z, z, d), 0.4);
  EXPECT_DOUBLE_EQ(xi_nonlinear(0.0, vec({0.1, 0}), vec({0.1, 0}), vec({0, 0}), d), -2.0);
  const auto d2 = derive_nonlinear(vec({10, -1}), 2.0, c);
  EXPECT_DOUBLE_EQ(xi_nonlinear(0.0, vec({0.1, 0}), vec({0.1, 0}), vec({0, 0}), d2), -1.0);
}

TEST(Control, Examples) {
  EXPECT_DOUBLE_EQ(control(AdaptiveState::initial(2), vec({3, 4}), 0.6), 0.6);
  EXPECT_DOUBLE_EQ(control({vec({1, 0}), 0.0}, vec({0.3, 7}), 5.0), 0.3);
  EXPECT_NEAR(control({vec({0.5, -0.2}), 1.1}, vec({0.2, 1}), -2.0), -2.3, 1e-15);
}

TEST(AdaptStep, Examples) {
  auto c = config_with(vec({2, 2}), vec({0, 0}));
  c.gamma_x = Matrix::Identity(2, 2);
  c.gamma_u = 1.0;
  MracDerived d;
  d.P = Matrix::Identity(2, 2);
  d.PB = vec({0, 1});
  const AdaptiveState s0{vec({0.2, -0.1}), 1.3};

  const auto same = adapt_step(s0, vec({1, 0}), Vector::Zero(2), 2.0, d, c, 0.01);
  EXPECT_EQ(same.K_hat, s0.K_hat);
  EXPECT_EQ(same.k_u_hat, s0.k_u_hat);

  const auto s1 = adapt_step(s0, vec({1, 0}), vec({0, 0.5}), 2.0, d, c, 0.01);
  EXPECT_NEAR(s0.K_hat(0) - s1.K_hat(0), 0.005, 1e-15);
  EXPECT_NEAR(s0.K_hat(1) - s1.K_hat(1), 0.0, 1e-15);
  EXPECT_NEAR(s0.k_u_hat - s1.k_u_hat, 0.01, 1e-15);

  c.gamma_x *= 2.0;
  const auto s2 = adapt_step(s0, vec({1, 0}), vec({0, 0.5}), 2.0, d, c, 0.01);
  EXPECT_NEAR(s0.K_hat(0) - s2.K_hat(0), 0.01, 1e-15);
  EXPECT_NEAR(s0.k_u_hat - s2.k_u_hat, 0.01, 1e-15);

  EXPECT_THROW(adapt_step(s0, vec({1, 0}), vec({0, 0.5}), 2.0, d, c, 0.0), ArgumentError);
  EXPECT_THROW(adapt_step(s0, vec({1e308, 0}), vec({0, 1e308}), 2.0, d, c, 1.0), NumericError);
}

TEST(LyapunovValue, Examples) {
  auto c = config_with(vec({2, 2}), vec({0, 0}));
  c.gamma_x = Matrix::Identity(2, 2);
  c.gamma_u = 1.0;
  MracDerived d;
  d.P = Matrix::Identity(2, 2);
  const IdealGains ideal{vec({0.3, -0.4}), 0.8, 1.0};
  EXPECT_DOUBLE_EQ(lyapunov_value(Vector::Zero(2), {ideal.K_star, ideal.k_u_star}, ideal, d, c), 0.0);
  EXPECT_DOUBLE_EQ(lyapunov_value(vec({1, 0}), {ideal.K_star, ideal.k_u_star}, ideal, d, c), 1.0);
  const IdealGains lam2{vec({0, 0}), 1.0, 2.0};
  EXPECT_DOUBLE_EQ(lyapunov_value(Vector::Zero(2), {vec({1, 0}), 2.0}, lam2, d, c), 4.0);
}

TEST(IdealGains, Examples) {
  const auto ref = companion_from_pendulum(PlantParams::nominal(), Form::kLinear);
  auto g = ideal_gains(ref, ref);
  EXPECT_DOUBLE_EQ(g.lambda_true, 1.0);
  EXPECT_DOUBLE_EQ(g.k_u_star, 1.0);
  EXPECT_EQ(g.K_star, Vector::Zero(2));

  g = ideal_gains(companion_from_pendulum({2.0, 1.0, 1.0, 10.0}, Form::kLinear), ref);
  EXPECT_DOUBLE_EQ(g.lambda_true, 0.5);
  EXPECT_DOUBLE_EQ(g.k_u_star, 2.0);
  EXPECT_NEAR(g.K_star(0), 0.0, 1e-15);
  EXPECT_NEAR(g.K_star(1), -1.0, 1e-15);

  g = ideal_gains(companion_from_pendulum({1.0, 1.25, 1.0, 10.0}, Form::kLinear), ref);
  EXPECT_NEAR(g.lambda_true, 0.64, 1e-15);
  EXPECT_NEAR(g.k_u_star, 1.5625, 1e-14);
  EXPECT_NEAR(g.K_star(0), 3.125, 1e-14);
  EXPECT_NEAR(g.K_star(1), -0.5625, 1e-14);

  EXPECT_THROW(ideal_gains(companion_from_pendulum(PlantParams::nominal(), Form::kNonlinear), ref),
               ArgumentError);
}

TEST(Controller, FeedthroughAtInitialization) {
  const auto ref = companion_from_pendulum(PlantParams::nominal(), Form::kLinear);
  MracController ctl(ref, MracConfig::for_inner_rate(ref, 100.0));
  const auto out = ctl.tick(vec({0.3, 0.1}), vec({0.3, 0.1}), 1.7, 0.01);
  EXPECT_DOUBLE_EQ(out.u, 1.7);
  EXPECT_EQ(ctl.state().K_hat, Vector::Zero(2));
  EXPECT_EQ(ctl.state().k_u_hat, 1.0);
}

TEST(Controller, ControlUsesPreUpdateGains) {
  const auto ref = companion_from_pendulum(PlantParams::nominal(), Form::kLinear);
  MracController ctl(ref, MracConfig::for_inner_rate(ref, 100.0));
  const Vector x = vec({0.2, 0.0}), xr = vec({0.1, 0.0});
  const double expected_xi = xi_linear(0.5, x - xr, ctl.derived());
  const auto out = ctl.tick(x, xr, 0.5, 0.01);
  EXPECT_DOUBLE_EQ(out.xi, expected_xi);
  EXPECT_DOUBLE_EQ(out.u, expected_xi);  // K_hat = 0, k_u_hat = 1 before the update
  EXPECT_NE(ctl.state().k_u_hat, 1.0);
}

TEST(Controller, LinearInGains) {
  auto c = config_with(vec({2, 2}), vec({0, 0}));
  MracDerived d;
  d.PB = vec({0.3, 0.7});
  const AdaptiveState zero{Vector::Zero(2), 0.0};
  const auto a = adapt_step(zero, vec({1, 2}), vec({0.1, -0.2}), 0.4, d, c, 0.01);
  c.gamma_x *= 3.0;
  c.gamma_u *= 3.0;
  const auto b = adapt_step(zero, vec({1, 2}), vec({0.1, -0.2}), 0.4, d, c, 0.01);
  EXPECT_LE((b.K_hat - 3.0 * a.K_hat).norm(), 1e-15);
  EXPECT_NEAR(b.k_u_hat, 3.0 * a.k_u_hat, 1e-15);
  EXPECT_NEAR(control({vec({2, 4}), 6.0}, vec({1, 1}), 1.0),
              2.0 * control({vec({1, 2}), 3.0}, vec({1, 1}), 1.0), 1e-15);
}
