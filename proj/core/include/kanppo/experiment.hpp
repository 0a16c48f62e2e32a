#ifndef KANPPO_EXPERIMENT_HPP_
#define KANPPO_EXPERIMENT_HPP_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "kanppo/env.hpp"
#include "kanppo/policy.hpp"
#include "kanppo/ppo.hpp"
#include "kanppo/spline.hpp"

namespace kanppo {

// The four evaluated configurations: hidden widths are 64 throughout,
// KAN trunks have no hidden layers.
enum class ArchKind {
  kMlpA2C2,            // actor 2x64 hidden, critic 2x64 hidden
  kMlpA1C2,            // actor 1x64 hidden, critic 2x64 hidden
  kKanActorMlpCritic,  // KAN actor, MLP critic (2x64)
  kFullKan,            // KAN actor and KAN critic
};

ArchKind parse_arch(const std::string& name);  // throws ConfigError
std::string arch_name(ArchKind arch);

// Declarative description of a training run; JSON round-trippable.
// Defaults reproduce the evaluated hyperparameters (lr 3e-4, clip 0.2,
// 10 epochs, batch 64, gamma 0.99, lambda 0.95, 1 env, seeds 0-4).
struct ExperimentConfig {
  std::string env = "pendulum";  // built-in name, or "bridge:<command line>"
  std::string arch = "full_kan";
  SplineConfig spline;  // k=2, g=3 on [-1, 1]
  PpoConfig ppo;
  int num_envs = 1;  // single-environment training only
  std::vector<uint64_t> seeds = {0, 1, 2, 3, 4};
  std::string out_dir = "runs";
  int checkpoint_every = 0;  // updates between checkpoints; 0 = final only
  double kan_init_sigma = 0.1;
  int bridge_timeout_ms = 10000;

  // Strict parse: unknown or mistyped fields raise ConfigError naming the field.
  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_json_file(const std::string& path);
  std::string to_json_text() const;

  void validate() const;
};

std::unique_ptr<Env> make_env(const ExperimentConfig& cfg);

// Builds and initializes the actor-critic for an architecture. rng seeds
// the parameter draw; MLP actors use a small-gain output layer.
ActorCritic build_actor_critic(ArchKind arch, int obs_dim, int act_dim,
                               const SplineConfig& spline, double kan_sigma, Rng& rng);

size_t count_actor_params(ArchKind arch, int obs_dim, int act_dim, const SplineConfig& spline);
size_t count_critic_params(ArchKind arch, int obs_dim, const SplineConfig& spline);

// Cross-environment audit over the six benchmark tasks. Averages are
// rounded half-up per network and the combined figure is the sum of the
// two rounded averages, matching the tables' presentation.
struct ParamReport {
  struct Row {
    std::string env;
    int obs_dim = 0;
    int act_dim = 0;
    size_t actor = 0;
    size_t critic = 0;
    size_t total = 0;
  };
  std::vector<Row> rows;
  long actor_avg = 0;
  long critic_avg = 0;
  long combined_avg = 0;
};

ParamReport param_report_all_envs(ArchKind arch, const SplineConfig& spline);
long round_half_up(double x);

// CSV log schema (stable order, one header line).
std::string run_record_csv_header();
std::string run_record_csv_row(const RunRecord& rec);

struct SeedRunResult {
  uint64_t seed = 0;
  std::vector<RunRecord> records;
  std::string csv_path;
  std::string checkpoint_path;
};

// Trains every seed sequentially, writing <out>/seed_<s>.csv, a final
// <out>/seed_<s>.ckpt, and a merged <out>/curve.csv with per-update
// mean/std/min/max of the episodic return across seeds. KANPPO_OUT
// overrides the output directory. `progress` may be null.
std::vector<SeedRunResult> run_experiment(const ExperimentConfig& cfg, std::ostream* progress);

std::string resolve_out_dir(const std::string& configured);

}  // namespace kanppo

#endif  // KANPPO_EXPERIMENT_HPP_
