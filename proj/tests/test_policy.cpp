#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "kanppo/experiment.hpp"
#include "kanppo/policy.hpp"
#include "oracles.hpp"

using namespace kanppo;

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

ActorCritic small_ac(uint64_t seed, double kan_sigma = 0.1) {
  Rng rng(seed);
  SplineConfig spline;
  return build_actor_critic(ArchKind::kFullKan, 3, 2, spline, kan_sigma, rng);
}

Vec random_obs(Rng& rng, int n) {
  Vec v(n);
  for (auto& x : v) x = rng.uniform(-0.9, 0.9);
  return v;
}

}  // namespace

TEST_CASE("act_stochastic: tiny std collapses onto the mean") {
  ActorCritic ac = small_ac(1);
  for (auto& ls : ac.log_std()) ls = std::log(1e-9);
  Rng rng(2);
  const Vec obs = random_obs(rng, 3);
  const Vec mean = ac.act_deterministic(obs);
  for (int trial = 0; trial < 50; ++trial) {
    const ActionSample s = ac.act_stochastic(obs, rng);
    for (int d = 0; d < 2; ++d) CHECK(std::abs(s.action[d] - mean[d]) < 1e-7);
  }
}

TEST_CASE("zero actor: mean zero and the closed-form Gaussian log-density") {
  ActorCritic ac = small_ac(3, 0.0);  // sigma 0 -> zero KAN
  ac.log_std() = {0.3, -0.7};
  Rng rng(4);
  const Vec obs = random_obs(rng, 3);
  CHECK(ac.act_deterministic(obs) == Vec{0.0, 0.0});
  const ActionSample s = ac.act_stochastic(obs, rng);
  double want = 0.0;
  for (int d = 0; d < 2; ++d) {
    const double sd = std::exp(ac.log_std()[d]);
    want += -0.5 * kLogTwoPi - ac.log_std()[d] - s.action[d] * s.action[d] / (2.0 * sd * sd);
  }
  CHECK(s.log_prob == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("act_stochastic: empirical mean/std of 1e5 samples within 2%") {
  ActorCritic ac = small_ac(5);
  ac.log_std() = {std::log(0.8), std::log(1.3)};
  Rng rng(6);
  const Vec obs = random_obs(rng, 3);
  const Vec mean = ac.act_deterministic(obs);
  const int n = 100000;
  Vec sum(2, 0.0), sum_sq(2, 0.0);
  for (int i = 0; i < n; ++i) {
    const ActionSample s = ac.act_stochastic(obs, rng);
    for (int d = 0; d < 2; ++d) {
      sum[d] += s.action[d];
      sum_sq[d] += s.action[d] * s.action[d];
    }
  }
  for (int d = 0; d < 2; ++d) {
    const double emp_mean = sum[d] / n;
    const double emp_std = std::sqrt(sum_sq[d] / n - emp_mean * emp_mean);
    const double want_std = std::exp(ac.log_std()[d]);
    CHECK(std::abs(emp_mean - mean[d]) < 0.02 * std::max(1.0, std::abs(mean[d])));
    CHECK(std::abs(emp_std - want_std) / want_std < 0.02);
  }
}

TEST_CASE("act_deterministic equals the stochastic mean and ignores log_std") {
  ActorCritic ac = small_ac(7);
  Rng rng(8);
  const Vec obs = random_obs(rng, 3);
  const Vec before = ac.act_deterministic(obs);
  ac.log_std() = {2.0, -3.0};
  const Vec after = ac.act_deterministic(obs);
  for (int d = 0; d < 2; ++d) CHECK(before[d] == after[d]);
}

TEST_CASE("entropy: closed form, sigma=1, act_dim=2 gives 2 * 0.5*log(2*pi*e)") {
  ActorCritic ac = small_ac(9);
  ac.log_std() = {0.0, 0.0};
  CHECK(ac.entropy() == doctest::Approx(kLogTwoPi + 1.0).epsilon(1e-12));
  CHECK(ac.entropy() == doctest::Approx(2.8379).epsilon(1e-4));
}

TEST_CASE("entropy decreases monotonically in -log_std") {
  ActorCritic ac = small_ac(10);
  double prev = -1e300;
  for (double ls = -3.0; ls <= 3.0; ls += 0.25) {
    ac.log_std() = {ls, ls};
    CHECK(ac.entropy() > prev);
    prev = ac.entropy();
  }
}

TEST_CASE("log_prob at the mean is the density peak value") {
  ActorCritic ac = small_ac(11);
  ac.log_std() = {0.2, -0.4};
  Rng rng(12);
  const Vec obs = random_obs(rng, 3);
  const Vec mean = ac.act_deterministic(obs);
  const EvalResult r = ac.evaluate_actions(std::vector<Vec>{obs}, std::vector<Vec>{mean});
  double want = 0.0;
  for (int d = 0; d < 2; ++d) want += -0.5 * kLogTwoPi - ac.log_std()[d];
  CHECK(r.log_probs[0] == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("exp(log_prob) integrates to one (importance-sampled)") {
  ActorCritic ac = small_ac(13);
  ac.log_std() = {std::log(0.7), std::log(1.1)};
  Rng rng(14);
  const Vec obs = random_obs(rng, 3);
  const Vec mean = ac.act_deterministic(obs);
  // Proposal q = N(mean, (2 sd)^2) per dimension; E_q[p/q] = 1.
  const int n = 100000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    Vec a(2);
    double log_q = 0.0;
    for (int d = 0; d < 2; ++d) {
      const double qsd = 2.0 * std::exp(ac.log_std()[d]);
      a[d] = rng.gaussian(mean[d], qsd);
      const double z = (a[d] - mean[d]) / qsd;
      log_q += -0.5 * kLogTwoPi - std::log(qsd) - 0.5 * z * z;
    }
    const EvalResult r = ac.evaluate_actions(std::vector<Vec>{obs}, std::vector<Vec>{a});
    acc += std::exp(r.log_probs[0] - log_q);
  }
  CHECK(std::abs(acc / n - 1.0) < 0.02);
}

TEST_CASE("ratio identity: unchanged parameters reproduce stored log probs exactly") {
  for (const ArchKind arch : {ArchKind::kFullKan, ArchKind::kMlpA2C2}) {
    Rng rng(15 + static_cast<int>(arch));
    SplineConfig spline;
    ActorCritic ac = build_actor_critic(arch, 4, 2, spline, 0.1, rng);
    std::vector<Vec> obs_batch;
    std::vector<Vec> act_batch;
    Vec stored;
    for (int i = 0; i < 32; ++i) {
      const Vec obs = random_obs(rng, 4);
      const ActionSample s = ac.act_stochastic(obs, rng);
      obs_batch.push_back(obs);
      act_batch.push_back(s.action);
      stored.push_back(s.log_prob);
    }
    const EvalResult r = ac.evaluate_actions(obs_batch, act_batch);
    for (int i = 0; i < 32; ++i) {
      CHECK(r.log_probs[i] == stored[i]);  // bitwise
      CHECK(std::exp(r.log_probs[i] - stored[i]) == 1.0);
    }
  }
}

TEST_CASE("gradient of mean log_prob w.r.t. actor params matches finite differences") {
  Rng rng(17);
  SplineConfig spline;
  ActorCritic ac = build_actor_critic(ArchKind::kFullKan, 3, 2, spline, 0.2, rng);
  ac.log_std() = {0.1, -0.2};
  std::vector<Vec> obs_batch;
  std::vector<Vec> act_batch;
  for (int i = 0; i < 8; ++i) {
    const Vec obs = random_obs(rng, 3);
    obs_batch.push_back(obs);
    act_batch.push_back(ac.act_stochastic(obs, rng).action);
  }
  const Network& actor = ac.actor();
  Vec params = actor.params();

  const auto mean_logp = [&]() {
    const_cast<Network&>(actor).set_params(params);
    const EvalResult r = ac.evaluate_actions(obs_batch, act_batch);
    double s = 0.0;
    for (double lp : r.log_probs) s += lp;
    return s / static_cast<double>(r.log_probs.size());
  };

  // Analytic gradient via the backward path.
  const_cast<Network&>(actor).set_params(params);
  GradBuffer grads(actor.param_count());
  for (size_t i = 0; i < obs_batch.size(); ++i) {
    ForwardCache cache;
    const Vec mean = actor.forward(obs_batch[i], &cache);
    Vec gy(2);
    for (int d = 0; d < 2; ++d) {
      const double sd2 = std::exp(2.0 * ac.log_std()[d]);
      gy[d] = (act_batch[i][d] - mean[d]) / sd2 / static_cast<double>(obs_batch.size());
    }
    actor.backward(cache, gy, grads);
  }

  double max_err = 0.0;
  for (size_t i = 0; i < params.size(); ++i) {
    const double fd = oracles::central_difference(mean_logp, params[i], 1e-6);
    max_err = std::max(max_err, oracles::rel_error(grads.grads[i], fd));
  }
  const_cast<Network&>(actor).set_params(params);
  CHECK(max_err < 1e-5);
}
