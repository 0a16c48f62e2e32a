#include "kanppo/env.hpp"

#include <array>
#include <stdexcept>

namespace kanppo {

namespace {

const std::array<std::string, 6> kPaperEnvs = {
    "HalfCheetah-v4", "Walker2d-v4",    "Hopper-v4",
    "InvertedPendulum-v4", "Swimmer-v4", "Pusher-v4",
};

}  // namespace

std::pair<int, int> paper_env_dims(const std::string& name) {
  if (name == "HalfCheetah-v4") return {17, 6};
  if (name == "Walker2d-v4") return {17, 6};
  if (name == "Hopper-v4") return {11, 3};
  if (name == "InvertedPendulum-v4") return {4, 1};
  if (name == "Swimmer-v4") return {8, 2};
  if (name == "Pusher-v4") return {23, 7};
  throw std::invalid_argument("paper_env_dims: unknown environment '" + name + "'");
}

std::span<const std::string> paper_env_names() {
  return std::span<const std::string>(kPaperEnvs.data(), kPaperEnvs.size());
}

}  // namespace kanppo
