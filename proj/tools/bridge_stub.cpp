// Deterministic child process for the environment bridge protocol.
// Emits the handshake line, then answers reset/step requests forever.
// Episodes run a fixed horizon with obs derived from the step counter,
// reward 1.0 per step, truncation at the horizon, no termination.

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>

#include <nlohmann/json.hpp>

using nlohmann::json;

int main(int argc, char** argv) {
  int obs_dim = 3;
  int act_dim = 1;
  int horizon = 10;
  double reward = 1.0;
  for (int i = 1; i < argc; ++i) {
    auto next_int = [&](int& out) {
      if (i + 1 >= argc) {
        std::fprintf(stderr, "bridge_stub: %s needs a value\n", argv[i]);
        std::exit(2);
      }
      out = std::atoi(argv[++i]);
    };
    if (std::strcmp(argv[i], "--obs") == 0) {
      next_int(obs_dim);
    } else if (std::strcmp(argv[i], "--act") == 0) {
      next_int(act_dim);
    } else if (std::strcmp(argv[i], "--horizon") == 0) {
      next_int(horizon);
    } else if (std::strcmp(argv[i], "--reward") == 0) {
      if (i + 1 >= argc) return 2;
      reward = std::atof(argv[++i]);
    } else {
      std::fprintf(stderr, "bridge_stub: unknown flag %s\n", argv[i]);
      return 2;
    }
  }

  json handshake;
  handshake["obs_dim"] = obs_dim;
  handshake["act_dim"] = act_dim;
  handshake["action_low"] = std::vector<double>(act_dim, -1.0);
  handshake["action_high"] = std::vector<double>(act_dim, 1.0);
  std::cout << handshake.dump() << "\n" << std::flush;

  int t = 0;
  std::string line;
  while (std::getline(std::cin, line)) {
    json req = json::parse(line, nullptr, false);
    if (req.is_discarded() || !req.contains("id") || !req.contains("op")) {
      std::fprintf(stderr, "bridge_stub: bad request: %s\n", line.c_str());
      return 1;
    }
    const std::string op = req["op"].get<std::string>();
    if (op == "reset") {
      t = 0;
    } else if (op == "step") {
      t += 1;
    } else {
      std::fprintf(stderr, "bridge_stub: unknown op '%s'\n", op.c_str());
      return 1;
    }

    std::vector<double> obs(obs_dim);
    for (int d = 0; d < obs_dim; ++d) obs[d] = 0.1 * t + 0.01 * d;
    const bool truncated = (op == "step") && t >= horizon;

    json reply;
    reply["id"] = req["id"];
    reply["obs"] = obs;
    reply["reward"] = op == "reset" ? 0.0 : reward;
    reply["terminated"] = false;
    reply["truncated"] = truncated;
    std::cout << reply.dump() << "\n" << std::flush;
  }
  return 0;
}
