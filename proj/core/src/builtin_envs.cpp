#include "kanppo/builtin_envs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kanppo {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double theta) {
  // Into [-pi, pi).
  double w = std::fmod(theta + kPi, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  return w - kPi;
}

double clip_action(std::span<const double> action, const EnvSpec& spec, int d,
                   const char* env_name) {
  if (static_cast<int>(action.size()) != spec.act_dim) {
    throw std::invalid_argument(std::string(env_name) + ": action length mismatch");
  }
  return std::clamp(action[d], spec.action_low[d], spec.action_high[d]);
}

void require_active(bool active, const char* env_name) {
  if (!active) {
    throw std::logic_error(std::string(env_name) +
                           ": step on a finished or unreset episode; call reset first");
  }
}

}  // namespace

// ---------- PendulumEnv ----------

namespace {
constexpr double kPendulumGravity = 9.81;
constexpr double kPendulumMaxTorque = 2.0;
constexpr double kPendulumMaxSpeed = 8.0;
}  // namespace

PendulumEnv::PendulumEnv(double dt, int horizon) : dt_(dt), horizon_(horizon) {
  spec_.name = "pendulum";
  spec_.obs_dim = 3;
  spec_.act_dim = 1;
  spec_.action_low = {-kPendulumMaxTorque};
  spec_.action_high = {kPendulumMaxTorque};
  spec_.max_episode_steps = horizon;
}

Vec PendulumEnv::observation() const { return {std::cos(theta_), std::sin(theta_), theta_dot_}; }

Vec PendulumEnv::reset(Rng& rng) {
  theta_ = rng.uniform(-kPi, kPi);
  theta_dot_ = rng.uniform(-1.0, 1.0);
  steps_ = 0;
  active_ = true;
  return observation();
}

void PendulumEnv::set_state(double theta, double theta_dot) {
  theta_ = theta;
  theta_dot_ = theta_dot;
  steps_ = 0;
  active_ = true;
}

double PendulumEnv::energy() const {
  return 0.5 * theta_dot_ * theta_dot_ + kPendulumGravity * (1.0 - std::cos(theta_));
}

StepResult PendulumEnv::step(std::span<const double> action) {
  require_active(active_, "pendulum");
  const double u = clip_action(action, spec_, 0, "pendulum");

  const double theta_w = wrap_angle(theta_);
  const double reward = -(theta_w * theta_w + 0.1 * theta_dot_ * theta_dot_ + 0.001 * u * u);

  // Semi-implicit Euler: velocity update first, then position.
  theta_dot_ += dt_ * (-kPendulumGravity * std::sin(theta_) + u);
  theta_dot_ = std::clamp(theta_dot_, -kPendulumMaxSpeed, kPendulumMaxSpeed);
  theta_ += dt_ * theta_dot_;

  steps_ += 1;
  StepResult r;
  r.obs = observation();
  r.reward = reward;
  r.truncated = steps_ >= horizon_;
  if (r.done()) active_ = false;
  return r;
}

// ---------- CartPoleEnv ----------

namespace {
constexpr double kCartMass = 1.0;
constexpr double kPoleMass = 0.1;
constexpr double kPoleHalfLength = 0.5;
constexpr double kCartGravity = 9.8;
constexpr double kMaxForce = 10.0;
constexpr double kThetaLimit = 12.0 * kPi / 180.0;
constexpr double kXLimit = 2.4;
}  // namespace

CartPoleEnv::CartPoleEnv(double dt, int horizon) : dt_(dt), horizon_(horizon) {
  spec_.name = "cartpole";
  spec_.obs_dim = 4;
  spec_.act_dim = 1;
  spec_.action_low = {-kMaxForce};
  spec_.action_high = {kMaxForce};
  spec_.max_episode_steps = horizon;
}

Vec CartPoleEnv::reset(Rng& rng) {
  x_ = rng.uniform(-0.05, 0.05);
  x_dot_ = rng.uniform(-0.05, 0.05);
  theta_ = rng.uniform(-0.05, 0.05);
  theta_dot_ = rng.uniform(-0.05, 0.05);
  steps_ = 0;
  active_ = true;
  return {x_, x_dot_, theta_, theta_dot_};
}

void CartPoleEnv::set_state(double x, double x_dot, double theta, double theta_dot) {
  x_ = x;
  x_dot_ = x_dot;
  theta_ = theta;
  theta_dot_ = theta_dot;
  steps_ = 0;
  active_ = true;
}

StepResult CartPoleEnv::step(std::span<const double> action) {
  require_active(active_, "cartpole");
  const double force = clip_action(action, spec_, 0, "cartpole");

  const double total_mass = kCartMass + kPoleMass;
  const double pml = kPoleMass * kPoleHalfLength;
  const double cos_t = std::cos(theta_);
  const double sin_t = std::sin(theta_);
  const double temp = (force + pml * theta_dot_ * theta_dot_ * sin_t) / total_mass;
  const double theta_acc = (kCartGravity * sin_t - cos_t * temp) /
                           (kPoleHalfLength * (4.0 / 3.0 - kPoleMass * cos_t * cos_t / total_mass));
  const double x_acc = temp - pml * theta_acc * cos_t / total_mass;

  theta_dot_ += dt_ * theta_acc;
  x_dot_ += dt_ * x_acc;
  theta_ += dt_ * theta_dot_;
  x_ += dt_ * x_dot_;

  steps_ += 1;
  StepResult r;
  r.obs = {x_, x_dot_, theta_, theta_dot_};
  r.reward = 1.0;
  r.terminated = std::abs(theta_) > kThetaLimit || std::abs(x_) > kXLimit;
  r.truncated = !r.terminated && steps_ >= horizon_;
  if (r.done()) active_ = false;
  return r;
}

// ---------- LqrEnv ----------

const Matrix& LqrEnv::dynamics_a() {
  static const Matrix a(2, 2, Vec{1.0, 0.1, 0.0, 1.0});
  return a;
}
const Matrix& LqrEnv::dynamics_b() {
  static const Matrix b(2, 1, Vec{0.005, 0.1});
  return b;
}
const Matrix& LqrEnv::cost_q() {
  static const Matrix q(2, 2, Vec{1.0, 0.0, 0.0, 1.0});
  return q;
}
double LqrEnv::cost_r() { return 0.1; }

LqrEnv::LqrEnv(int horizon, double init_scale) : horizon_(horizon), init_scale_(init_scale) {
  spec_.name = init_scale > 0.0 ? "lqr" : "lqr_fixed";
  spec_.obs_dim = 2;
  spec_.act_dim = 1;
  spec_.action_low = {-10.0};
  spec_.action_high = {10.0};
  spec_.max_episode_steps = horizon;
}

Vec LqrEnv::reset(Rng& rng) {
  if (init_scale_ > 0.0) {
    x_ = {rng.uniform(-init_scale_, init_scale_), rng.uniform(-init_scale_, init_scale_)};
  } else {
    x_ = {0.8, -0.5};
  }
  steps_ = 0;
  active_ = true;
  return x_;
}

void LqrEnv::set_state(Vec x) {
  if (x.size() != 2) throw std::invalid_argument("LqrEnv::set_state: state must have length 2");
  x_ = std::move(x);
  steps_ = 0;
  active_ = true;
}

StepResult LqrEnv::step(std::span<const double> action) {
  require_active(active_, "lqr");
  const double u = clip_action(action, spec_, 0, "lqr");

  const Matrix& a = dynamics_a();
  const Matrix& b = dynamics_b();
  const Matrix& q = cost_q();
  double cost = cost_r() * u * u;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) cost += x_[i] * q.at(i, j) * x_[j];
  }

  Vec next = matvec(a, x_);
  for (int i = 0; i < 2; ++i) next[i] += b.at(i, 0) * u;
  x_ = std::move(next);

  steps_ += 1;
  StepResult r;
  r.obs = x_;
  r.reward = -cost;
  r.truncated = steps_ >= horizon_;
  if (r.done()) active_ = false;
  return r;
}

std::unique_ptr<Env> make_builtin_env(const std::string& name) {
  if (name == "pendulum") return std::make_unique<PendulumEnv>();
  if (name == "cartpole") return std::make_unique<CartPoleEnv>();
  if (name == "lqr") return std::make_unique<LqrEnv>();
  if (name == "lqr_fixed") return std::make_unique<LqrEnv>(100, 0.0);
  throw std::invalid_argument("make_builtin_env: unknown environment '" + name +
                              "' (built-ins: pendulum, cartpole, lqr, lqr_fixed)");
}

bool is_builtin_env(const std::string& name) {
  return name == "pendulum" || name == "cartpole" || name == "lqr" || name == "lqr_fixed";
}

}  // namespace kanppo
