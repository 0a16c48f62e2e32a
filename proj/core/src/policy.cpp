#include "kanppo/policy.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "kanppo/errors.hpp"

namespace kanppo {

namespace {
constexpr double kLogTwoPi = 1.8378770664093454836;  // log(2*pi)
}

ActorCritic::ActorCritic(Network actor, Network critic)
    : actor_(std::move(actor)), critic_(std::move(critic)) {
  if (critic_.out_dim() != 1) throw std::invalid_argument("ActorCritic: critic must output 1 value");
  if (actor_.in_dim() != critic_.in_dim()) {
    throw std::invalid_argument("ActorCritic: actor and critic input dims differ");
  }
  log_std_.assign(actor_.out_dim(), 0.0);
}

size_t ActorCritic::total_param_count() const {
  return actor_.param_count() + critic_.param_count() + log_std_.size();
}

void ActorCritic::get_params(std::span<double> out) const {
  actor_.get_params(out.subspan(0, actor_.param_count()));
  critic_.get_params(out.subspan(actor_.param_count(), critic_.param_count()));
  std::copy(log_std_.begin(), log_std_.end(),
            out.begin() + actor_.param_count() + critic_.param_count());
}

void ActorCritic::set_params(std::span<const double> in) {
  if (in.size() != total_param_count()) {
    throw std::invalid_argument("ActorCritic::set_params: length mismatch");
  }
  actor_.set_params(in.subspan(0, actor_.param_count()));
  critic_.set_params(in.subspan(actor_.param_count(), critic_.param_count()));
  std::copy(in.begin() + actor_.param_count() + critic_.param_count(), in.end(),
            log_std_.begin());
}

Vec ActorCritic::params() const {
  Vec p(total_param_count());
  get_params(p);
  return p;
}

double ActorCritic::log_prob_of(std::span<const double> mean,
                                std::span<const double> action) const {
  double lp = 0.0;
  for (size_t d = 0; d < log_std_.size(); ++d) {
    const double sd = std::exp(log_std_[d]);
    const double z = (action[d] - mean[d]) / sd;
    lp += -0.5 * kLogTwoPi - log_std_[d] - 0.5 * z * z;
  }
  return lp;
}

ActionSample ActorCritic::act_stochastic(std::span<const double> obs, Rng& rng) const {
  const Vec mean = actor_.forward(obs);
  const double v = critic_.forward(obs)[0];
  for (double m : mean) {
    if (!std::isfinite(m)) throw RunAbort("actor produced a non-finite action mean");
  }
  if (!std::isfinite(v)) throw RunAbort("critic produced a non-finite value");
  ActionSample s;
  s.action.resize(mean.size());
  for (size_t d = 0; d < mean.size(); ++d) {
    s.action[d] = rng.gaussian(mean[d], std::exp(log_std_[d]));
  }
  s.log_prob = log_prob_of(mean, s.action);
  s.value = v;
  return s;
}

Vec ActorCritic::act_deterministic(std::span<const double> obs) const {
  Vec mean = actor_.forward(obs);
  for (double m : mean) {
    if (!std::isfinite(m)) throw RunAbort("actor produced a non-finite action mean");
  }
  return mean;
}

double ActorCritic::value(std::span<const double> obs) const { return critic_.forward(obs)[0]; }

EvalResult ActorCritic::evaluate_actions(std::span<const Vec> obs_batch,
                                         std::span<const Vec> act_batch) const {
  if (obs_batch.size() != act_batch.size()) {
    std::ostringstream msg;
    msg << "evaluate_actions: " << obs_batch.size() << " observations vs " << act_batch.size()
        << " actions";
    throw std::invalid_argument(msg.str());
  }
  EvalResult r;
  r.log_probs.reserve(obs_batch.size());
  r.entropies.reserve(obs_batch.size());
  r.values.reserve(obs_batch.size());
  const double ent = entropy();
  for (size_t n = 0; n < obs_batch.size(); ++n) {
    const Vec mean = actor_.forward(obs_batch[n]);
    r.log_probs.push_back(log_prob_of(mean, act_batch[n]));
    r.entropies.push_back(ent);
    r.values.push_back(critic_.forward(obs_batch[n])[0]);
  }
  return r;
}

double ActorCritic::entropy() const {
  double e = 0.0;
  for (double ls : log_std_) e += 0.5 * (kLogTwoPi + 1.0) + ls;
  return e;
}

}  // namespace kanppo
