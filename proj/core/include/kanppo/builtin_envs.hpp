#ifndef KANPPO_BUILTIN_ENVS_HPP_
#define KANPPO_BUILTIN_ENVS_HPP_

#include <memory>
#include <string>

#include "kanppo/env.hpp"

namespace kanppo {

// Frictionless point-mass pendulum, m = l = 1, gravity 9.81, angle measured
// from the hanging position so theta = 0 is the rest state the reward
// targets:
//   theta_ddot = -(gravity/l) sin(theta) + u/(m l^2)
// integrated with semi-implicit Euler (velocity first). Torque is bounded
// to +-2, angular velocity clamped to +-8. Reward per step is
// -(wrap(theta)^2 + 0.1*theta_dot^2 + 0.001*u^2); episodes truncate at the
// horizon and never terminate. Observation is [cos(theta), sin(theta),
// theta_dot]; resets draw theta ~ U[-pi, pi), theta_dot ~ U[-1, 1).
class PendulumEnv : public Env {
 public:
  explicit PendulumEnv(double dt = 0.05, int horizon = 200);
  const EnvSpec& spec() const override { return spec_; }
  Vec reset(Rng& rng) override;
  StepResult step(std::span<const double> action) override;

  double theta() const { return theta_; }
  double theta_dot() const { return theta_dot_; }
  void set_state(double theta, double theta_dot);
  // 0.5*l^2*theta_dot^2 + gravity*l*(1 - cos(theta)) with m = 1.
  double energy() const;

 private:
  Vec observation() const;
  EnvSpec spec_;
  double dt_;
  int horizon_;
  double theta_ = 0.0;
  double theta_dot_ = 0.0;
  int steps_ = 0;
  bool active_ = false;
};

// Cart-pole with continuous force input and the classic pole-balancing
// dynamics (cart mass 1.0, pole mass 0.1, half-length 0.5, gravity 9.8),
// semi-implicit Euler. +1 reward per step; terminates when |theta| > 12 deg
// or |x| > 2.4, truncates at the horizon. Observation is
// [x, x_dot, theta, theta_dot]; resets draw all four ~ U[-0.05, 0.05).
class CartPoleEnv : public Env {
 public:
  explicit CartPoleEnv(double dt = 0.02, int horizon = 500);
  const EnvSpec& spec() const override { return spec_; }
  Vec reset(Rng& rng) override;
  StepResult step(std::span<const double> action) override;

  void set_state(double x, double x_dot, double theta, double theta_dot);

 private:
  EnvSpec spec_;
  double dt_;
  int horizon_;
  double x_ = 0.0, x_dot_ = 0.0, theta_ = 0.0, theta_dot_ = 0.0;
  int steps_ = 0;
  bool active_ = false;
};

// Discrete-time LQR: x' = A x + B u, reward -(x^T Q x + u^T R u), horizon
// 100 with truncation only. The fixed system is a dt = 0.1 double
// integrator — A = [[1, 0.1], [0, 1]], B = [0.005, 0.1]^T (controllable),
// Q = I, R = 0.1. Resets draw x ~ U[-init_scale, init_scale)^2;
// init_scale = 0 pins the initial state to (0.8, -0.5) for deterministic
// evaluation.
class LqrEnv : public Env {
 public:
  explicit LqrEnv(int horizon = 100, double init_scale = 1.0);
  const EnvSpec& spec() const override { return spec_; }
  Vec reset(Rng& rng) override;
  StepResult step(std::span<const double> action) override;

  static const Matrix& dynamics_a();
  static const Matrix& dynamics_b();
  static const Matrix& cost_q();
  static double cost_r();

  const Vec& state() const { return x_; }
  void set_state(Vec x);

 private:
  EnvSpec spec_;
  int horizon_;
  double init_scale_;
  Vec x_{0.0, 0.0};
  int steps_ = 0;
  bool active_ = false;
};

// Built-in names: "pendulum", "cartpole", "lqr", "lqr_fixed" (deterministic
// initial state). Throws std::invalid_argument on anything else.
std::unique_ptr<Env> make_builtin_env(const std::string& name);
bool is_builtin_env(const std::string& name);

}  // namespace kanppo

#endif  // KANPPO_BUILTIN_ENVS_HPP_
