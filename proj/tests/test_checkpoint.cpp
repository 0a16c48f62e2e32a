#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "kanppo/checkpoint.hpp"
#include "kanppo/errors.hpp"
#include "kanppo/experiment.hpp"

using namespace kanppo;

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("checkpoint round-trip is bit-exact for every architecture") {
  SplineConfig spline;
  for (const ArchKind arch : {ArchKind::kMlpA2C2, ArchKind::kMlpA1C2,
                              ArchKind::kKanActorMlpCritic, ArchKind::kFullKan}) {
    Rng rng(1234 + static_cast<int>(arch));
    ActorCritic ac = build_actor_critic(arch, 5, 2, spline, 0.1, rng);
    ac.log_std() = {0.25, -0.5};
    RunningNorm norm(5, true, 5.0);
    for (int i = 0; i < 37; ++i) {
      Vec obs(5);
      for (auto& v : obs) v = rng.uniform(-3.0, 3.0);
      norm.update(obs);
    }

    const std::string path = temp_path("kanppo_ckpt_test.bin");
    save_checkpoint(path, ac, norm);
    LoadedCheckpoint loaded = load_checkpoint(path);

    const Vec p0 = ac.params();
    const Vec p1 = loaded.ac.params();
    REQUIRE(p0.size() == p1.size());
    CHECK(std::memcmp(p0.data(), p1.data(), p0.size() * sizeof(double)) == 0);
    CHECK(loaded.ac.actor().kind() == ac.actor().kind());
    CHECK(loaded.obs_norm.count() == norm.count());
    CHECK(std::memcmp(loaded.obs_norm.mean().data(), norm.mean().data(),
                      norm.mean().size() * sizeof(double)) == 0);
    CHECK(std::memcmp(loaded.obs_norm.m2().data(), norm.m2().data(),
                      norm.m2().size() * sizeof(double)) == 0);

    // Saving the loaded copy reproduces the file byte for byte.
    const std::string path2 = temp_path("kanppo_ckpt_test2.bin");
    save_checkpoint(path2, loaded.ac, loaded.obs_norm);
    std::ifstream f1(path, std::ios::binary);
    std::ifstream f2(path2, std::ios::binary);
    const std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    const std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(b1 == b2);
    std::remove(path.c_str());
    std::remove(path2.c_str());
  }
}

TEST_CASE("checkpoint: missing file and bad magic raise ConfigError") {
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/path.ckpt"), ConfigError);
  const std::string path = temp_path("kanppo_ckpt_garbage.bin");
  std::ofstream os(path, std::ios::binary);
  os << "not a checkpoint at all";
  os.close();
  CHECK_THROWS_AS(load_checkpoint(path), ConfigError);
  std::remove(path.c_str());
}
