#ifndef KANPPO_BRIDGE_HPP_
#define KANPPO_BRIDGE_HPP_

#include <cstdint>
#include <memory>
#include <string>

#include "kanppo/env.hpp"

namespace kanppo {

// Attaches an external environment as a child process speaking
// line-delimited JSON on stdin/stdout:
//
//   handshake (child's first line):
//     {"obs_dim":N, "act_dim":M, "action_low":[...], "action_high":[...]}
//   requests:
//     {"id":n, "op":"reset"}        {"id":n, "op":"step", "action":[...]}
//   replies:
//     {"id":n, "obs":[...], "reward":r, "terminated":b, "truncated":b}
//
// Exactly one request is in flight at a time; ids increase by one and the
// reply id must match. A malformed line, mismatched id, dead child, or
// per-message timeout raises RunAbort naming the offending line.
class BridgeEnv : public Env {
 public:
  // command is run via /bin/sh -c. expected_obs_dim/act_dim (when > 0) are
  // validated against the handshake.
  explicit BridgeEnv(const std::string& command, int timeout_ms = 10000,
                     int expected_obs_dim = 0, int expected_act_dim = 0);
  ~BridgeEnv() override;

  BridgeEnv(const BridgeEnv&) = delete;
  BridgeEnv& operator=(const BridgeEnv&) = delete;

  const EnvSpec& spec() const override { return spec_; }
  Vec reset(Rng& rng) override;
  StepResult step(std::span<const double> action) override;

  uint64_t messages_exchanged() const { return next_id_; }

 private:
  std::string roundtrip_line(const std::string& request);
  std::string read_line();
  void write_line(const std::string& line);
  StepResult parse_reply(const std::string& line, uint64_t expect_id);

  EnvSpec spec_;
  int timeout_ms_;
  int to_child_ = -1;
  int from_child_ = -1;
  long pid_ = -1;
  uint64_t next_id_ = 0;
  std::string readbuf_;
  bool episode_active_ = false;
};

std::unique_ptr<Env> bridge_env(const std::string& command, int timeout_ms = 10000,
                                int expected_obs_dim = 0, int expected_act_dim = 0);

}  // namespace kanppo

#endif  // KANPPO_BRIDGE_HPP_
