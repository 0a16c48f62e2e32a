#include <doctest.h>

#include <cmath>
#include <limits>

#include "kanppo/experiment.hpp"
#include "kanppo/losses.hpp"
#include "oracles.hpp"

using namespace kanppo;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Minibatch frozen_minibatch(ActorCritic& ac, Rng& rng, int n, bool perturb_old) {
  Minibatch mb;
  const Vec params = ac.params();
  Vec old_params = params;
  if (perturb_old) {
    for (auto& p : old_params) p += rng.uniform(-0.05, 0.05);
  }
  for (int i = 0; i < n; ++i) {
    Vec obs(ac.obs_dim());
    for (auto& v : obs) v = rng.uniform(-0.9, 0.9);
    const ActionSample s = ac.act_stochastic(obs, rng);
    mb.obs.push_back(obs);
    mb.actions.push_back(s.action);
    mb.advantages.push_back(rng.uniform(-2.0, 2.0));
    mb.value_targets.push_back(rng.uniform(-1.0, 1.0));
    if (perturb_old) {
      ac.set_params(old_params);
      const EvalResult r = ac.evaluate_actions(std::vector<Vec>{obs}, std::vector<Vec>{s.action});
      mb.old_log_probs.push_back(r.log_probs[0]);
      ac.set_params(params);
    } else {
      mb.old_log_probs.push_back(s.log_prob);
    }
  }
  return mb;
}

}  // namespace

TEST_CASE("clipped_surrogate: ratio 1 returns the negated mean advantage") {
  const Vec ratio(8, 1.0);
  Vec adv{1.0, -2.0, 0.5, 3.0, -1.5, 0.0, 2.5, -0.5};
  double mean = 0.0;
  for (double a : adv) mean += a;
  mean /= 8.0;
  CHECK(clipped_surrogate(ratio, adv, 0.2) == doctest::Approx(-mean).epsilon(1e-15));
}

TEST_CASE("clipped_surrogate: the four sign/side unit cases") {
  // r=1.5, A=+2: clip binds above -> 1.2*2 = 2.4
  CHECK(clipped_surrogate(Vec{1.5}, Vec{2.0}, 0.2) == doctest::Approx(-2.4).epsilon(1e-15));
  // r=0.5, A=-1: min(-0.5, -0.8) = -0.8 (clipped side)
  CHECK(clipped_surrogate(Vec{0.5}, Vec{-1.0}, 0.2) == doctest::Approx(0.8).epsilon(1e-15));
  // r=1.5, A=-1: min(-1.5, -1.2) = -1.5 (unclipped side)
  CHECK(clipped_surrogate(Vec{1.5}, Vec{-1.0}, 0.2) == doctest::Approx(1.5).epsilon(1e-15));
  // r=0.5, A=+2: min(1.0, 1.6) = 1.0 (unclipped side)
  CHECK(clipped_surrogate(Vec{0.5}, Vec{2.0}, 0.2) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("clipped_surrogate: infinite eps equals the unclipped surrogate exactly") {
  Rng rng(1);
  Vec ratio(64), adv(64);
  for (int i = 0; i < 64; ++i) {
    ratio[i] = rng.uniform(0.01, 3.0);
    adv[i] = rng.uniform(-2.0, 2.0);
  }
  double unclipped = 0.0;
  for (int i = 0; i < 64; ++i) unclipped += ratio[i] * adv[i];
  unclipped /= 64.0;
  CHECK(clipped_surrogate(ratio, adv, kInf) == -unclipped);
}

TEST_CASE("clipped_surrogate: length mismatch throws") {
  CHECK_THROWS_AS(clipped_surrogate(Vec{1.0, 2.0}, Vec{1.0}, 0.2), std::invalid_argument);
}

TEST_CASE("combined_loss: c1 = c2 = 0 reduces to the policy loss") {
  CHECK(combined_loss(1.25, 99.0, 42.0, 0.0, 0.0) == 1.25);
  CHECK(combined_loss(1.0, 2.0, 3.0, 0.5, 0.1) == doctest::Approx(1.0 + 1.0 - 0.3));
}

TEST_CASE("ppo_loss: perfect critic has zero value loss") {
  Rng rng(2);
  SplineConfig spline;
  ActorCritic ac = build_actor_critic(ArchKind::kFullKan, 3, 2, spline, 0.1, rng);
  Minibatch mb = frozen_minibatch(ac, rng, 16, false);
  for (size_t i = 0; i < mb.obs.size(); ++i) {
    mb.value_targets[i] = ac.value(mb.obs[i]);
  }
  const LossStats stats = ppo_loss(ac, mb, 0.2, 0.5, 0.0);
  CHECK(stats.value_loss == 0.0);
}

TEST_CASE("ppo_loss: first-pass ratios are exactly 1, objective equals mean advantage") {
  Rng rng(3);
  SplineConfig spline;
  ActorCritic ac = build_actor_critic(ArchKind::kMlpA2C2, 4, 2, spline, 0.1, rng);
  const Minibatch mb = frozen_minibatch(ac, rng, 64, false);
  const LossStats stats = ppo_loss(ac, mb, 0.2, 0.0, 0.0);
  double mean_adv = 0.0;
  for (double a : mb.advantages) mean_adv += a;
  mean_adv /= static_cast<double>(mb.advantages.size());
  CHECK(std::abs(stats.policy_loss - (-mean_adv)) < 1e-12);
}

TEST_CASE("ppo_loss_grad matches finite differences of the combined loss") {
  Rng rng(4);
  SplineConfig spline;
  for (const ArchKind arch : {ArchKind::kFullKan, ArchKind::kMlpA1C2}) {
    ActorCritic ac = build_actor_critic(arch, 3, 2, spline, 0.2, rng);
    const Minibatch mb = frozen_minibatch(ac, rng, 16, true);
    const double clip_eps = 0.2, c1 = 0.5, c2 = 0.01;

    Vec params = ac.params();
    Vec grads(params.size(), 0.0);
    ppo_loss_grad(ac, mb, clip_eps, c1, c2, grads);

    const auto loss = [&]() {
      ac.set_params(params);
      return ppo_loss(ac, mb, clip_eps, c1, c2).total;
    };
    double max_err = 0.0;
    for (size_t i = 0; i < params.size(); ++i) {
      const double fd = oracles::central_difference(loss, params[i], 1e-6);
      max_err = std::max(max_err, oracles::rel_error(grads[i], fd));
    }
    ac.set_params(params);
    CHECK(max_err < 1e-5);
  }
}
