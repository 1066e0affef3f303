#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "stablim/rng.hpp"

using namespace stablim;

TEST_CASE("philox4x32-10 matches the Random123 known-answer vectors") {
  using C = std::array<std::uint32_t, 4>;
  using K = std::array<std::uint32_t, 2>;
  CHECK(philox4x32(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("derived seeds are deterministic and distinct") {
  CHECK(derive_seed(42, 7) == derive_seed(42, 7));
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 4; ++s)
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(s, i));
  CHECK(seen.size() == 4000);
}

TEST_CASE("a stream position always yields the same draws") {
  IndexedStream a(9, streams::primary, 123), b(9, streams::primary, 123);
  for (int i = 0; i < 50; ++i) CHECK(a.next_u64() == b.next_u64());
  IndexedStream c(9, streams::secondary, 123);
  IndexedStream d(9, streams::primary, 123);
  CHECK(c.next_u64() != d.next_u64());
}

TEST_CASE("uniforms stay inside the open unit interval with the right moments") {
  double sum = 0.0, sum2 = 0.0;
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    IndexedStream r(1, streams::primary, static_cast<std::uint64_t>(i));
    const double u = r.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  const double m = sum / n;
  CHECK(std::abs(m - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(sum2 / n - m * m - 1.0 / 12.0) < 2e-3);
}

TEST_CASE("normal, exponential and gamma draws have the right means and variances") {
  constexpr int n = 200000;
  double zs = 0, zs2 = 0, es = 0, g1 = 0, g2 = 0;
  for (int i = 0; i < n; ++i) {
    IndexedStream r(2, streams::primary, static_cast<std::uint64_t>(i));
    const double z = r.normal();
    zs += z;
    zs2 += z * z;
    es += r.exponential();
    g1 += r.gamma(0.5);
    g2 += r.gamma(2.5);
  }
  const double se = 1.0 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(zs / n) < 5.0 * se);
  CHECK(std::abs(zs2 / n - 1.0) < 5.0 * std::sqrt(2.0) * se);
  CHECK(std::abs(es / n - 1.0) < 5.0 * se);
  CHECK(std::abs(g1 / n - 0.5) < 5.0 * std::sqrt(0.5) * se);
  CHECK(std::abs(g2 / n - 2.5) < 5.0 * std::sqrt(2.5) * se);
}
