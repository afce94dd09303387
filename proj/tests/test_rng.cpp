#include "cltlab/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace cltlab;

TEST_CASE("philox4x32-10 known-answer vectors") {
  using C = Philox4x32::Counter;
  using K = Philox4x32::Key;
  CHECK(Philox4x32::encrypt(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::encrypt(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::encrypt(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("same seed gives the same stream, children differ") {
  Rng a(RandomSeed{42, 0}), b(RandomSeed{42, 0}), c(RandomSeed{42, 1});
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs = differs || x != c.next_u64();
  }
  CHECK(differs);

  const RandomSeed root{7, 0};
  std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    const RandomSeed s = root.child(t);
    seen.insert({s.seed, s.stream_id});
    CHECK(s == root.child(t));
  }
  CHECK(seen.size() == 1000);
}

TEST_CASE("variates have the right range and moments") {
  Rng rng(RandomSeed{1, 0});
  const int m = 1000000;
  double s1 = 0, s2 = 0, e1 = 0, umin = 1, umax = 0;
  for (int i = 0; i < m; ++i) {
    const double u = rng.uniform();
    umin = std::min(umin, u);
    umax = std::max(umax, u);
    const double z = rng.normal();
    s1 += z;
    s2 += z * z;
    e1 += rng.exponential();
  }
  CHECK(umin >= 0.0);
  CHECK(umax < 1.0);
  CHECK(std::abs(s1 / m) < 5.0 / std::sqrt(m));
  CHECK(std::abs(s2 / m - 1.0) < 5.0 * std::sqrt(2.0 / m));
  CHECK(std::abs(e1 / m - 1.0) < 5.0 / std::sqrt(m));
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform_open();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}
