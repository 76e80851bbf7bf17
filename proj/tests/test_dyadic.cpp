#include <catch2/catch_amalgamated.hpp>

#include "qtalloc/dyadic.hpp"

using qtalloc::Dyadic;

TEST_CASE("dyadic construction and normalization") {
  CHECK(Dyadic::unit(0) == Dyadic::one());
  CHECK(Dyadic::unit(2).to_double() == 1.0 / 16.0);
  CHECK(Dyadic(4, 1) == Dyadic(std::int64_t{1}));  // 4/4 normalizes to 1
  CHECK(Dyadic(8, 2) == Dyadic(2, 1));
  CHECK(Dyadic(0, 5) == Dyadic::zero());
  CHECK(Dyadic(3, 2).str() == "3/4^2");
  CHECK(Dyadic(std::int64_t{7}).str() == "7");
}

TEST_CASE("dyadic arithmetic is exact") {
  // 1 - 4^-1 = 3/4
  CHECK(Dyadic::one() - Dyadic::unit(1) == Dyadic(3, 1));
  // 1 - 4^-2 = 15/16
  CHECK(Dyadic::one() - Dyadic::unit(2) == Dyadic(15, 2));
  // four quarter pixels make a whole
  Dyadic sum;
  for (int i = 0; i < 4; ++i) sum += Dyadic::unit(1);
  CHECK(sum == Dyadic::one());
  // 3/16 is 3 * 4^-2
  CHECK(Dyadic::unit(2).times(3) == Dyadic(3, 2));
  CHECK((Dyadic(3, 2) + Dyadic(3, 2)) == Dyadic(6, 2));
  CHECK((Dyadic(6, 2) - Dyadic(3, 2)) == Dyadic(3, 2));
}

TEST_CASE("dyadic comparison across exponents") {
  CHECK(Dyadic::unit(1) > Dyadic::unit(2));
  CHECK(Dyadic(3, 2) < Dyadic::unit(1));   // 3/16 < 1/4
  CHECK(Dyadic(3, 1) > Dyadic(11, 2));     // 12/16 > 11/16
  CHECK(Dyadic(1, 3) == Dyadic(4, 4));
  CHECK(-Dyadic::unit(1) < Dyadic::zero());
}

TEST_CASE("scaling by powers of four") {
  // relative volume: (3/16) * 4^1 = 3/4
  CHECK(Dyadic(3, 2).scaled_pow4(1) == Dyadic(3, 1));
  CHECK(Dyadic(3, 2).scaled_pow4(2) == Dyadic(std::int64_t{3}));
  CHECK(Dyadic(3, 2).scaled_pow4(3) == Dyadic(std::int64_t{12}));
  CHECK(Dyadic::one().scaled_pow4(-3) == Dyadic::unit(3));
  CHECK(Dyadic::zero().scaled_pow4(5) == Dyadic::zero());
}

TEST_CASE("random add/sub agrees with long double within exactness range") {
  // property: dyadic arithmetic matches a wide float reference on values
  // drawn from the volumes that actually occur (layers up to 12)
  std::uint64_t x = 12345;
  auto rnd = [&] {
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    return x * 2685821657736338717ull;
  };
  Dyadic acc;
  long double ref = 0.0L;
  for (int step = 0; step < 3000; ++step) {
    int layer = static_cast<int>(rnd() % 12);
    if (rnd() % 2 == 0) {
      acc += Dyadic::unit(layer);
      ref += std::pow(0.25L, layer);
    } else {
      acc -= Dyadic::unit(layer);
      ref -= std::pow(0.25L, layer);
    }
    REQUIRE(std::abs(static_cast<long double>(acc.to_double()) - ref) < 1e-15L);
  }
}
