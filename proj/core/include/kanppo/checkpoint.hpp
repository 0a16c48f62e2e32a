#ifndef KANPPO_CHECKPOINT_HPP_
#define KANPPO_CHECKPOINT_HPP_

#include <string>

#include "kanppo/obs_norm.hpp"
#include "kanppo/policy.hpp"

namespace kanppo {

// Versioned little-endian binary checkpoint: both network layouts, all
// flattened parameters, log_std, and the observation-normalizer state.
// Round-trips are bit-exact.
struct LoadedCheckpoint {
  ActorCritic ac;
  RunningNorm obs_norm;
};

void save_checkpoint(const std::string& path, const ActorCritic& ac, const RunningNorm& norm);

// Throws ConfigError on a missing file, bad magic, or unsupported version.
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace kanppo

#endif  // KANPPO_CHECKPOINT_HPP_
