#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "kanppo/rng.hpp"

using namespace kanppo;

TEST_CASE("identical seed gives identical streams") {
  Rng a(123);
  Rng b(123);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("stream for a seed is byte-identical across two processes") {
  constexpr int kDraws = 256;
  int fds[2];
  REQUIRE(pipe(fds) == 0);
  const pid_t pid = fork();
  REQUIRE(pid >= 0);
  if (pid == 0) {
    close(fds[0]);
    Rng rng(20240615);
    for (int i = 0; i < kDraws; ++i) {
      const uint64_t v = rng.next_u64();
      ssize_t unused = write(fds[1], &v, sizeof(v));
      (void)unused;
    }
    close(fds[1]);
    _exit(0);
  }
  close(fds[1]);
  Rng rng(20240615);
  for (int i = 0; i < kDraws; ++i) {
    uint64_t got = 0;
    size_t off = 0;
    while (off < sizeof(got)) {
      const ssize_t n = read(fds[0], reinterpret_cast<char*>(&got) + off, sizeof(got) - off);
      REQUIRE(n > 0);
      off += static_cast<size_t>(n);
    }
    CHECK(got == rng.next_u64());
  }
  close(fds[0]);
  int status = 0;
  waitpid(pid, &status, 0);
  CHECK(WIFEXITED(status));
}

TEST_CASE("split: equal tags reproduce, regardless of parent consumption") {
  Rng parent(55);
  Rng child1 = parent.split(7);
  parent.next_u64();
  parent.next_u64();
  Rng child2 = parent.split(7);
  for (int i = 0; i < 100; ++i) CHECK(child1.next_u64() == child2.next_u64());
}

TEST_CASE("split: distinct tags give decorrelated streams") {
  Rng parent(55);
  Rng a = parent.split(1);
  Rng b = parent.split(2);
  const int n = 20000;
  double sum_ab = 0.0, sum_a = 0.0, sum_b = 0.0, sum_a2 = 0.0, sum_b2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = a.uniform();
    const double y = b.uniform();
    sum_a += x;
    sum_b += y;
    sum_ab += x * y;
    sum_a2 += x * x;
    sum_b2 += y * y;
  }
  const double cov = sum_ab / n - (sum_a / n) * (sum_b / n);
  const double var_a = sum_a2 / n - (sum_a / n) * (sum_a / n);
  const double var_b = sum_b2 / n - (sum_b / n) * (sum_b / n);
  const double corr = cov / std::sqrt(var_a * var_b);
  CHECK(std::abs(corr) < 0.03);
}

TEST_CASE("uniform stays in [0, 1)") {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("gaussian: law of large numbers over 1e6 draws") {
  Rng rng(99);
  const int n = 1000000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.gaussian(0.0, 1.0);
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("gaussian: degenerate std limit hugs the mean") {
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    CHECK(std::abs(rng.gaussian(5.0, 1e-12) - 5.0) < 1e-9);
  }
}

TEST_CASE("gaussian: std <= 0 is an error") {
  Rng rng(5);
  CHECK_THROWS_AS(rng.gaussian(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(rng.gaussian(0.0, -1.0), std::invalid_argument);
}

TEST_CASE("gaussian: fixed seed replays the same draw sequence") {
  Rng a(17);
  Rng b(17);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.gaussian(1.0, 2.0) == b.gaussian(1.0, 2.0));
  }
}

TEST_CASE("no NaN from finite inputs") {
  Rng rng(6);
  for (int i = 0; i < 10000; ++i) {
    CHECK(std::isfinite(rng.gaussian(0.0, 1.0)));
    CHECK(std::isfinite(rng.uniform(-1e12, 1e12)));
  }
}

TEST_CASE("next_below stays in range and covers it") {
  Rng rng(8);
  std::vector<int> seen(10, 0);
  for (int i = 0; i < 10000; ++i) {
    const uint64_t v = rng.next_below(10);
    REQUIRE(v < 10);
    seen[v] += 1;
  }
  for (int c : seen) CHECK(c > 800);
}
