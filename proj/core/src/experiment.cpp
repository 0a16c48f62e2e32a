#include "kanppo/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

#include "kanppo/bridge.hpp"
#include "kanppo/builtin_envs.hpp"
#include "kanppo/checkpoint.hpp"
#include "kanppo/errors.hpp"

namespace kanppo {

using nlohmann::json;

ArchKind parse_arch(const std::string& name) {
  if (name == "mlp_a2_c2") return ArchKind::kMlpA2C2;
  if (name == "mlp_a1_c2") return ArchKind::kMlpA1C2;
  if (name == "kan_actor_mlp_critic") return ArchKind::kKanActorMlpCritic;
  if (name == "full_kan") return ArchKind::kFullKan;
  throw ConfigError("arch: unknown architecture '" + name +
                    "' (expected mlp_a2_c2, mlp_a1_c2, kan_actor_mlp_critic, full_kan)");
}

std::string arch_name(ArchKind arch) {
  switch (arch) {
    case ArchKind::kMlpA2C2: return "mlp_a2_c2";
    case ArchKind::kMlpA1C2: return "mlp_a1_c2";
    case ArchKind::kKanActorMlpCritic: return "kan_actor_mlp_critic";
    case ArchKind::kFullKan: return "full_kan";
  }
  return "unknown";
}

// ---------- config parsing ----------

namespace {

constexpr int kHiddenWidth = 64;

void require_known_keys(const json& j, const std::set<std::string>& known,
                        const std::string& scope) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.contains(it.key())) {
      throw ConfigError("config: unknown field '" + scope + it.key() + "'");
    }
  }
}

template <typename T>
void read_field(const json& j, const char* key, T& out, const std::string& scope) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: field '" + scope + key + "' has the wrong type");
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ConfigError("config: not a JSON object");
  }
  require_known_keys(j, {"env", "arch", "spline", "ppo", "num_envs", "seeds", "out_dir",
                         "checkpoint_every", "kan_init_sigma", "bridge_timeout_ms"},
                     "");
  ExperimentConfig cfg;
  read_field(j, "env", cfg.env, "");
  read_field(j, "arch", cfg.arch, "");
  read_field(j, "num_envs", cfg.num_envs, "");
  read_field(j, "seeds", cfg.seeds, "");
  read_field(j, "out_dir", cfg.out_dir, "");
  read_field(j, "checkpoint_every", cfg.checkpoint_every, "");
  read_field(j, "kan_init_sigma", cfg.kan_init_sigma, "");
  read_field(j, "bridge_timeout_ms", cfg.bridge_timeout_ms, "");
  if (j.contains("spline")) {
    const json& s = j["spline"];
    if (!s.is_object()) throw ConfigError("config: field 'spline' must be an object");
    require_known_keys(s, {"k", "g", "range_min", "range_max"}, "spline.");
    read_field(s, "k", cfg.spline.order_k, "spline.");
    read_field(s, "g", cfg.spline.grid_g, "spline.");
    read_field(s, "range_min", cfg.spline.range_min, "spline.");
    read_field(s, "range_max", cfg.spline.range_max, "spline.");
  }
  if (j.contains("ppo")) {
    const json& p = j["ppo"];
    if (!p.is_object()) throw ConfigError("config: field 'ppo' must be an object");
    require_known_keys(p,
                       {"lr", "clip_eps", "epochs", "minibatch", "gamma", "lambda", "rollout_T",
                        "c1", "c2", "max_grad_norm", "total_steps", "adv_norm", "obs_norm",
                        "log_timing"},
                       "ppo.");
    read_field(p, "lr", cfg.ppo.lr, "ppo.");
    read_field(p, "clip_eps", cfg.ppo.clip_eps, "ppo.");
    read_field(p, "epochs", cfg.ppo.epochs, "ppo.");
    read_field(p, "minibatch", cfg.ppo.minibatch, "ppo.");
    read_field(p, "gamma", cfg.ppo.gamma, "ppo.");
    read_field(p, "lambda", cfg.ppo.lambda, "ppo.");
    read_field(p, "rollout_T", cfg.ppo.rollout_T, "ppo.");
    read_field(p, "c1", cfg.ppo.c1, "ppo.");
    read_field(p, "c2", cfg.ppo.c2, "ppo.");
    read_field(p, "max_grad_norm", cfg.ppo.max_grad_norm, "ppo.");
    read_field(p, "total_steps", cfg.ppo.total_steps, "ppo.");
    read_field(p, "adv_norm", cfg.ppo.adv_norm, "ppo.");
    read_field(p, "obs_norm", cfg.ppo.obs_norm, "ppo.");
    read_field(p, "log_timing", cfg.ppo.log_timing, "ppo.");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return from_json_text(text);
}

std::string ExperimentConfig::to_json_text() const {
  json j;
  j["env"] = env;
  j["arch"] = arch;
  j["spline"] = {{"k", spline.order_k},
                 {"g", spline.grid_g},
                 {"range_min", spline.range_min},
                 {"range_max", spline.range_max}};
  j["ppo"] = {{"lr", ppo.lr},
              {"clip_eps", ppo.clip_eps},
              {"epochs", ppo.epochs},
              {"minibatch", ppo.minibatch},
              {"gamma", ppo.gamma},
              {"lambda", ppo.lambda},
              {"rollout_T", ppo.rollout_T},
              {"c1", ppo.c1},
              {"c2", ppo.c2},
              {"max_grad_norm", ppo.max_grad_norm},
              {"total_steps", ppo.total_steps},
              {"adv_norm", ppo.adv_norm},
              {"obs_norm", ppo.obs_norm},
              {"log_timing", ppo.log_timing}};
  j["num_envs"] = num_envs;
  j["seeds"] = seeds;
  j["out_dir"] = out_dir;
  j["checkpoint_every"] = checkpoint_every;
  j["kan_init_sigma"] = kan_init_sigma;
  j["bridge_timeout_ms"] = bridge_timeout_ms;
  return j.dump(2) + "\n";
}

void ExperimentConfig::validate() const {
  parse_arch(arch);
  try {
    spline.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: spline: ") + e.what());
  }
  ppo.validate();
  if (num_envs != 1) throw ConfigError("config: num_envs must be 1 (single-environment training)");
  if (seeds.empty()) throw ConfigError("config: seeds must not be empty");
  if (checkpoint_every < 0) throw ConfigError("config: checkpoint_every must be >= 0");
  if (kan_init_sigma < 0.0) throw ConfigError("config: kan_init_sigma must be >= 0");
  if (bridge_timeout_ms < 1) throw ConfigError("config: bridge_timeout_ms must be >= 1");
  if (!env.starts_with("bridge:") && !is_builtin_env(env)) {
    throw ConfigError("config: env '" + env +
                      "' is neither a built-in (pendulum, cartpole, lqr, lqr_fixed) nor a "
                      "'bridge:<command>'");
  }
}

std::unique_ptr<Env> make_env(const ExperimentConfig& cfg) {
  if (cfg.env.starts_with("bridge:")) {
    return bridge_env(cfg.env.substr(7), cfg.bridge_timeout_ms);
  }
  return make_builtin_env(cfg.env);
}

// ---------- architectures ----------

ActorCritic build_actor_critic(ArchKind arch, int obs_dim, int act_dim,
                               const SplineConfig& spline, double kan_sigma, Rng& rng) {
  Network actor;
  Network critic;
  switch (arch) {
    case ArchKind::kMlpA2C2:
      actor = Network::mlp({obs_dim, kHiddenWidth, kHiddenWidth, act_dim});
      critic = Network::mlp({obs_dim, kHiddenWidth, kHiddenWidth, 1});
      break;
    case ArchKind::kMlpA1C2:
      actor = Network::mlp({obs_dim, kHiddenWidth, act_dim});
      critic = Network::mlp({obs_dim, kHiddenWidth, kHiddenWidth, 1});
      break;
    case ArchKind::kKanActorMlpCritic:
      actor = Network::kan({obs_dim, act_dim}, spline);
      critic = Network::mlp({obs_dim, kHiddenWidth, kHiddenWidth, 1});
      break;
    case ArchKind::kFullKan:
      actor = Network::kan({obs_dim, act_dim}, spline);
      critic = Network::kan({obs_dim, 1}, spline);
      break;
  }
  // Small-gain actor head keeps the initial policy near zero mean.
  InitScheme actor_scheme{kan_sigma, 1.0, 0.01};
  InitScheme critic_scheme{kan_sigma, 1.0, 1.0};
  Rng actor_rng = rng.split(10);
  Rng critic_rng = rng.split(11);
  init_params(actor, actor_rng, actor_scheme);
  init_params(critic, critic_rng, critic_scheme);
  return ActorCritic(std::move(actor), std::move(critic));
}

size_t count_actor_params(ArchKind arch, int obs_dim, int act_dim, const SplineConfig& spline) {
  switch (arch) {
    case ArchKind::kMlpA2C2:
      return count_params(Network::mlp({obs_dim, kHiddenWidth, kHiddenWidth, act_dim}));
    case ArchKind::kMlpA1C2:
      return count_params(Network::mlp({obs_dim, kHiddenWidth, act_dim}));
    case ArchKind::kKanActorMlpCritic:
    case ArchKind::kFullKan:
      return count_params(Network::kan({obs_dim, act_dim}, spline));
  }
  return 0;
}

size_t count_critic_params(ArchKind arch, int obs_dim, const SplineConfig& spline) {
  switch (arch) {
    case ArchKind::kMlpA2C2:
    case ArchKind::kMlpA1C2:
    case ArchKind::kKanActorMlpCritic:
      return count_params(Network::mlp({obs_dim, kHiddenWidth, kHiddenWidth, 1}));
    case ArchKind::kFullKan:
      return count_params(Network::kan({obs_dim, 1}, spline));
  }
  return 0;
}

long round_half_up(double x) { return static_cast<long>(std::floor(x + 0.5)); }

ParamReport param_report_all_envs(ArchKind arch, const SplineConfig& spline) {
  ParamReport report;
  double actor_sum = 0.0;
  double critic_sum = 0.0;
  for (const std::string& name : paper_env_names()) {
    const auto [obs_dim, act_dim] = paper_env_dims(name);
    ParamReport::Row row;
    row.env = name;
    row.obs_dim = obs_dim;
    row.act_dim = act_dim;
    row.actor = count_actor_params(arch, obs_dim, act_dim, spline);
    row.critic = count_critic_params(arch, obs_dim, spline);
    row.total = row.actor + row.critic;
    actor_sum += static_cast<double>(row.actor);
    critic_sum += static_cast<double>(row.critic);
    report.rows.push_back(std::move(row));
  }
  const double n = static_cast<double>(report.rows.size());
  report.actor_avg = round_half_up(actor_sum / n);
  report.critic_avg = round_half_up(critic_sum / n);
  // The tables' combined figure sums the two per-network rounded averages.
  report.combined_avg = report.actor_avg + report.critic_avg;
  return report;
}

// ---------- CSV ----------

std::string run_record_csv_header() {
  return "seed,steps,update,mean_return,policy_loss,value_loss,entropy,wall_ms";
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

std::string run_record_csv_row(const RunRecord& rec) {
  std::string row;
  row += std::to_string(rec.seed);
  row += ',';
  row += std::to_string(rec.steps);
  row += ',';
  row += std::to_string(rec.update);
  row += ',';
  row += fmt_double(rec.mean_return);
  row += ',';
  row += fmt_double(rec.policy_loss);
  row += ',';
  row += fmt_double(rec.value_loss);
  row += ',';
  row += fmt_double(rec.entropy);
  row += ',';
  row += std::to_string(rec.wall_ms);
  return row;
}

std::string resolve_out_dir(const std::string& configured) {
  const char* override_dir = std::getenv("KANPPO_OUT");
  if (override_dir != nullptr && override_dir[0] != '\0') return override_dir;
  return configured;
}

// ---------- orchestration ----------

std::vector<SeedRunResult> run_experiment(const ExperimentConfig& cfg, std::ostream* progress) {
  cfg.validate();
  const ArchKind arch = parse_arch(cfg.arch);
  const std::string out_dir = resolve_out_dir(cfg.out_dir);
  std::filesystem::create_directories(out_dir);

  std::vector<SeedRunResult> results;
  for (const uint64_t seed : cfg.seeds) {
    auto env = make_env(cfg);
    Rng init_rng = Rng(seed).split(0);
    ActorCritic ac = build_actor_critic(arch, env->spec().obs_dim, env->spec().act_dim,
                                        cfg.spline, cfg.kan_init_sigma, init_rng);
    Trainer trainer(ac, *env, cfg.ppo, seed);

    SeedRunResult result;
    result.seed = seed;
    result.csv_path = out_dir + "/seed_" + std::to_string(seed) + ".csv";
    result.checkpoint_path = out_dir + "/seed_" + std::to_string(seed) + ".ckpt";

    std::ofstream csv(result.csv_path, std::ios::trunc);
    if (!csv) throw ConfigError("train: cannot open '" + result.csv_path + "' for writing");
    csv << run_record_csv_header() << "\n";

    const auto sink = [&](const RunRecord& rec) {
      result.records.push_back(rec);
      csv << run_record_csv_row(rec) << "\n";
    };
    const auto hook = [&](int update) {
      if (cfg.checkpoint_every > 0 && (update + 1) % cfg.checkpoint_every == 0) {
        save_checkpoint(out_dir + "/seed_" + std::to_string(seed) + "_u" +
                            std::to_string(update) + ".ckpt",
                        ac, trainer.obs_norm());
      }
    };

    try {
      trainer.train(sink, hook);
    } catch (const RunAbort&) {
      // Trainer restored the last finite parameters; keep them for diagnosis.
      save_checkpoint(out_dir + "/seed_" + std::to_string(seed) + ".abort.ckpt", ac,
                      trainer.obs_norm());
      throw;
    }
    save_checkpoint(result.checkpoint_path, ac, trainer.obs_norm());
    if (progress) {
      *progress << "seed " << seed << ": " << result.records.size() << " updates, final return "
                << (result.records.empty() ? 0.0 : result.records.back().mean_return) << "\n";
    }
    results.push_back(std::move(result));
  }

  // Merged curve: per-update mean/std/min/max of episodic return across seeds.
  if (!results.empty()) {
    std::ofstream curve(out_dir + "/curve.csv", std::ios::trunc);
    if (!curve) throw ConfigError("train: cannot open curve.csv for writing");
    curve << "update,steps,return_mean,return_std,return_min,return_max\n";
    const size_t n_updates = results.front().records.size();
    for (size_t u = 0; u < n_updates; ++u) {
      double sum = 0.0;
      double lo = results.front().records[u].mean_return;
      double hi = lo;
      for (const auto& r : results) {
        const double v = r.records[u].mean_return;
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      const double mean = sum / static_cast<double>(results.size());
      double var = 0.0;
      for (const auto& r : results) {
        const double v = r.records[u].mean_return;
        var += (v - mean) * (v - mean);
      }
      var /= static_cast<double>(results.size());
      curve << results.front().records[u].update << ',' << results.front().records[u].steps << ','
            << fmt_double(mean) << ',' << fmt_double(std::sqrt(var)) << ',' << fmt_double(lo)
            << ',' << fmt_double(hi) << "\n";
    }
  }
  return results;
}

}  // namespace kanppo
