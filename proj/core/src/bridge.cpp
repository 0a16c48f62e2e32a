#include "kanppo/bridge.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kanppo/errors.hpp"

namespace kanppo {

using nlohmann::json;

namespace {

json parse_json_line(const std::string& line, const char* what) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw RunAbort(std::string("bridge: malformed ") + what + " line: " + line);
  }
  return j;
}

Vec to_vec(const json& j, const char* field, const std::string& line) {
  if (!j.contains(field) || !j[field].is_array()) {
    throw RunAbort(std::string("bridge: reply missing array field '") + field + "': " + line);
  }
  Vec v;
  for (const auto& e : j[field]) {
    if (!e.is_number()) {
      throw RunAbort(std::string("bridge: non-numeric entry in '") + field + "': " + line);
    }
    v.push_back(e.get<double>());
  }
  return v;
}

}  // namespace

BridgeEnv::BridgeEnv(const std::string& command, int timeout_ms, int expected_obs_dim,
                     int expected_act_dim)
    : timeout_ms_(timeout_ms) {
  int parent_to_child[2];
  int child_to_parent[2];
  if (pipe(parent_to_child) != 0 || pipe(child_to_parent) != 0) {
    throw RunAbort("bridge: pipe() failed: " + std::string(std::strerror(errno)));
  }
  const pid_t pid = fork();
  if (pid < 0) throw RunAbort("bridge: fork() failed: " + std::string(std::strerror(errno)));
  if (pid == 0) {
    dup2(parent_to_child[0], STDIN_FILENO);
    dup2(child_to_parent[1], STDOUT_FILENO);
    close(parent_to_child[0]);
    close(parent_to_child[1]);
    close(child_to_parent[0]);
    close(child_to_parent[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  pid_ = pid;
  close(parent_to_child[0]);
  close(child_to_parent[1]);
  to_child_ = parent_to_child[1];
  from_child_ = child_to_parent[0];

  const std::string line = read_line();
  const json hs = parse_json_line(line, "handshake");
  if (!hs.contains("obs_dim") || !hs.contains("act_dim")) {
    throw RunAbort("bridge: handshake missing obs_dim/act_dim: " + line);
  }
  spec_.name = "bridge";
  spec_.obs_dim = hs["obs_dim"].get<int>();
  spec_.act_dim = hs["act_dim"].get<int>();
  spec_.action_low = hs.contains("action_low") ? to_vec(hs, "action_low", line)
                                               : Vec(spec_.act_dim, -1e9);
  spec_.action_high = hs.contains("action_high") ? to_vec(hs, "action_high", line)
                                                 : Vec(spec_.act_dim, 1e9);
  if (spec_.obs_dim < 1 || spec_.act_dim < 1 ||
      static_cast<int>(spec_.action_low.size()) != spec_.act_dim ||
      static_cast<int>(spec_.action_high.size()) != spec_.act_dim) {
    throw RunAbort("bridge: inconsistent handshake: " + line);
  }
  if (expected_obs_dim > 0 && spec_.obs_dim != expected_obs_dim) {
    std::ostringstream msg;
    msg << "bridge: child advertises obs_dim " << spec_.obs_dim << ", expected "
        << expected_obs_dim;
    throw RunAbort(msg.str());
  }
  if (expected_act_dim > 0 && spec_.act_dim != expected_act_dim) {
    std::ostringstream msg;
    msg << "bridge: child advertises act_dim " << spec_.act_dim << ", expected "
        << expected_act_dim;
    throw RunAbort(msg.str());
  }
}

BridgeEnv::~BridgeEnv() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  if (pid_ > 0) {
    int status = 0;
    // Give the child a moment to exit on EOF, then force it.
    for (int i = 0; i < 50; ++i) {
      if (waitpid(static_cast<pid_t>(pid_), &status, WNOHANG) != 0) return;
      usleep(10000);
    }
    kill(static_cast<pid_t>(pid_), SIGKILL);
    waitpid(static_cast<pid_t>(pid_), &status, 0);
  }
}

void BridgeEnv::write_line(const std::string& line) {
  std::string out = line;
  out.push_back('\n');
  size_t written = 0;
  while (written < out.size()) {
    const ssize_t n = write(to_child_, out.data() + written, out.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw RunAbort("bridge: write to child failed (child exited?): " +
                     std::string(std::strerror(errno)));
    }
    written += static_cast<size_t>(n);
  }
}

std::string BridgeEnv::read_line() {
  for (;;) {
    const size_t nl = readbuf_.find('\n');
    if (nl != std::string::npos) {
      std::string line = readbuf_.substr(0, nl);
      readbuf_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    struct pollfd pfd{from_child_, POLLIN, 0};
    const int pr = poll(&pfd, 1, timeout_ms_);
    if (pr == 0) {
      std::ostringstream msg;
      msg << "bridge: timed out after " << timeout_ms_ << " ms waiting for the child";
      throw RunAbort(msg.str());
    }
    if (pr < 0) {
      if (errno == EINTR) continue;
      throw RunAbort("bridge: poll failed: " + std::string(std::strerror(errno)));
    }
    char buf[4096];
    const ssize_t n = read(from_child_, buf, sizeof(buf));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw RunAbort("bridge: read from child failed: " + std::string(std::strerror(errno)));
    }
    if (n == 0) throw RunAbort("bridge: child closed its output (exited?)");
    readbuf_.append(buf, static_cast<size_t>(n));
  }
}

std::string BridgeEnv::roundtrip_line(const std::string& request) {
  write_line(request);
  return read_line();
}

StepResult BridgeEnv::parse_reply(const std::string& line, uint64_t expect_id) {
  const json j = parse_json_line(line, "reply");
  if (!j.contains("id") || !j["id"].is_number_unsigned()) {
    throw RunAbort("bridge: reply missing id: " + line);
  }
  if (j["id"].get<uint64_t>() != expect_id) {
    std::ostringstream msg;
    msg << "bridge: reply id " << j["id"].get<uint64_t>() << " does not match request id "
        << expect_id << ": " << line;
    throw RunAbort(msg.str());
  }
  StepResult r;
  r.obs = to_vec(j, "obs", line);
  if (static_cast<int>(r.obs.size()) != spec_.obs_dim) {
    throw RunAbort("bridge: obs length does not match handshake obs_dim: " + line);
  }
  if (!j.contains("reward") || !j["reward"].is_number()) {
    throw RunAbort("bridge: reply missing reward: " + line);
  }
  r.reward = j["reward"].get<double>();
  if (!j.contains("terminated") || !j["terminated"].is_boolean() || !j.contains("truncated") ||
      !j["truncated"].is_boolean()) {
    throw RunAbort("bridge: reply missing terminated/truncated flags: " + line);
  }
  r.terminated = j["terminated"].get<bool>();
  r.truncated = j["truncated"].get<bool>();
  return r;
}

Vec BridgeEnv::reset(Rng&) {
  const uint64_t id = next_id_++;
  json req{{"id", id}, {"op", "reset"}};
  const StepResult r = parse_reply(roundtrip_line(req.dump()), id);
  episode_active_ = true;
  return r.obs;
}

StepResult BridgeEnv::step(std::span<const double> action) {
  if (!episode_active_) {
    throw std::logic_error("bridge: step on a finished or unreset episode; call reset first");
  }
  if (static_cast<int>(action.size()) != spec_.act_dim) {
    throw std::invalid_argument("bridge: action length mismatch");
  }
  Vec clipped(action.begin(), action.end());
  for (int d = 0; d < spec_.act_dim; ++d) {
    clipped[d] = std::clamp(clipped[d], spec_.action_low[d], spec_.action_high[d]);
  }
  const uint64_t id = next_id_++;
  json req{{"id", id}, {"op", "step"}, {"action", clipped}};
  StepResult r = parse_reply(roundtrip_line(req.dump()), id);
  if (r.done()) episode_active_ = false;
  return r;
}

std::unique_ptr<Env> bridge_env(const std::string& command, int timeout_ms, int expected_obs_dim,
                                int expected_act_dim) {
  return std::make_unique<BridgeEnv>(command, timeout_ms, expected_obs_dim, expected_act_dim);
}

}  // namespace kanppo
