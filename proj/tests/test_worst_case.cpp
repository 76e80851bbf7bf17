#include <catch2/catch_amalgamated.hpp>

#include "qtalloc/worst_case.hpp"
#include "qtalloc/zorder.hpp"

using namespace qtalloc;

TEST_CASE("worst case structure: capacity, height, census") {
  for (int i = 1; i <= 3; ++i) {
    Configuration c = build_worst_case(i);
    const int s = 2 * i;
    CHECK(c.capacity() == Dyadic::unit(i));       // 4^i * 4^-s = 4^-i
    CHECK(c.height() == s + 1);
    CHECK(c.module_count() ==
          (std::uint64_t{1} << (2 * i)) * 3 * static_cast<std::uint64_t>(s - i));
    CHECK(!first_empty_pixel(c, i));              // nothing big enough without moves
    CHECK(first_empty_pixel(c, s));               // one empty s-pixel per i-pixel
    c.validate();
  }
}

TEST_CASE("worst case i=1 details") {
  Configuration c = build_worst_case(1);
  // each 1-pixel holds three 2-squares, quadrant 3 stays empty
  for (int a = 0; a < 4; ++a) {
    for (int q = 0; q < 3; ++q)
      CHECK(c.classify(PixelPath().child(a).child(q)).kind == PixelKind::Occupied);
    CHECK(c.classify(PixelPath().child(a).child(3)).kind == PixelKind::FreeEmpty);
  }
}

TEST_CASE("every 3-pixel of the i=3 construction keeps capacity 4^-6") {
  Configuration c = build_worst_case(3);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int d = 0; d < 4; ++d)
        CHECK(c.capacity(PixelPath().child(a).child(b).child(d)) == Dyadic::unit(6));
}

TEST_CASE("measured lower-bound costs match the formulas exactly") {
  // i=1: volume 3/16, moves 3; i=2: 3/32, 15; i=3: 9/256, 63
  const Dyadic expected_vol[] = {Dyadic(3, 2), Dyadic(6, 3), Dyadic(9, 4)};
  const std::uint64_t expected_moves[] = {3, 15, 63};
  for (int i = 1; i <= 3; ++i) {
    WorstCaseReport rep = verify_lower_bound(i);
    CHECK(rep.total_matches);
    CHECK(rep.moves_match);
    CHECK(rep.ledger.total_volume == expected_vol[i - 1]);
    CHECK(rep.ledger.moves == expected_moves[i - 1]);
    // the bound is tight: measured equals cost_bounds(i, 2i)
    CHECK(rep.ledger.total_volume == rep.bounds.total_volume);
    CHECK(rep.ledger.moves == rep.bounds.moves);
    // relative volume 3/4 * i
    CHECK(rep.ledger.relative_volume() == Dyadic(3 * i, 1));
  }
}

TEST_CASE("worst case guards") {
  CHECK_THROWS_AS(build_worst_case(0), PreconditionViolated);
  CHECK_THROWS_AS(build_worst_case(5, 8), DepthExceeded);
}
