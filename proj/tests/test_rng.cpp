#include <doctest.h>

#include <cmath>
#include <set>

#include "sepdemix/rng.hpp"

using namespace sepdemix;

TEST_CASE("philox known-answer vectors") {
  // Reference vectors for the 10-round 4x32 configuration.
  const auto zero = detail::philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(zero[0] == 0x6627e8d5u);
  CHECK(zero[1] == 0xe169c58du);
  CHECK(zero[2] == 0xbc57ac4cu);
  CHECK(zero[3] == 0x9b00dbd8u);

  const auto ones = detail::philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                       {0xffffffffu, 0xffffffffu});
  CHECK(ones[0] == 0x408f276du);
  CHECK(ones[1] == 0x41c83b0eu);
  CHECK(ones[2] == 0xa20bc7c6u);
  CHECK(ones[3] == 0x6d5451fdu);
}

TEST_CASE("streams are deterministic and independent") {
  RngStream a(42);
  RngStream b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  // deriving a child never perturbs the parent
  RngStream c(42);
  RngStream d(42);
  (void)c.derive("extra").next_u64();
  for (int i = 0; i < 10; ++i) CHECK(c.next_u64() == d.next_u64());

  // distinct tags and indices give distinct streams
  RngStream root(7);
  std::set<std::uint64_t> firsts;
  for (std::uint64_t i = 0; i < 32; ++i) firsts.insert(root.derive("tag", i).next_u64());
  firsts.insert(root.derive("other").next_u64());
  CHECK(firsts.size() == 33);
}

TEST_CASE("normal and complex normal moments") {
  RngStream rng(123);
  const int n = 200000;
  double sum = 0, sum_sq = 0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum_sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(std::abs(sum_sq / n - 1.0) < 0.02);

  double cvar = 0;
  for (int i = 0; i < n; ++i) cvar += std::norm(rng.cnormal());
  CHECK(std::abs(cvar / n - 1.0) < 0.02);
}

TEST_CASE("uniform stays in [0,1)") {
  RngStream rng(9);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}
