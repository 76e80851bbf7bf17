#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "qtalloc/first_fit.hpp"
#include "qtalloc/requests.hpp"

using namespace qtalloc;

namespace {

PixelPath path(const char* s) { return PixelPath::from_string(s); }

int max_empty_per_layer(const Configuration& c) {
  std::map<int, int> count;
  int worst = 0;
  for (const auto& p : c.maximally_empty_pixels()) worst = std::max(worst, ++count[p.layer()]);
  return worst;
}

// valid aligned sequence driver: inserts pick a random feasible layer,
// deletes pick a random live module
struct FFDriver {
  Configuration cfg;
  std::vector<std::pair<module_id, int>> live;
  module_id next = 1;
  XorShift64Star rng;

  explicit FFDriver(std::uint64_t seed) : rng(seed) {}

  bool step(double p_insert, int max_layer) {
    if (rng.next_unit() < p_insert || live.empty()) {
      const int layer = static_cast<int>(rng.next() % static_cast<std::uint64_t>(max_layer + 1));
      if (cfg.capacity() < Dyadic::unit(layer)) return false;  // keep the sequence valid
      auto before = cfg.placements();
      auto p = ff_insert(cfg, next, layer);
      REQUIRE(p);  // Lemma 7: compact + capacity implies an empty pixel
      // zero cost: nothing else moved
      for (const auto& [id, at] : before) REQUIRE(*cfg.place_of(id) == at);
      live.emplace_back(next++, layer);
    } else {
      const std::size_t i = static_cast<std::size_t>(rng.next() % live.size());
      CostLedger ledger;
      ff_delete(cfg, live[i].first, ledger);
      live.erase(live.begin() + static_cast<std::ptrdiff_t>(i));
    }
    return true;
  }

  void check_all() {
    cfg.validate();
    REQUIRE(invariant_check(cfg));
    REQUIRE(cfg.is_compact());
    REQUIRE(max_empty_per_layer(cfg) <= 3);
  }
};

}  // namespace

TEST_CASE("ff_insert goes to the z-least empty pixel at zero cost") {
  Configuration c;
  auto p = ff_insert(c, 1, 2);
  REQUIRE(p);
  CHECK(p->str() == "00");
  auto q = ff_insert(c, 2, 2);
  REQUIRE(q);
  CHECK(q->str() == "01");
  auto r = ff_insert(c, 3, 1);
  REQUIRE(r);
  CHECK(r->str() == "1");
  CHECK(invariant_check(c));
  CHECK(c.is_compact());
}

TEST_CASE("ff_insert signals a collision when no empty pixel exists") {
  Configuration c;
  REQUIRE(ff_insert(c, 1, 0));
  CHECK(!ff_insert(c, 2, 3));
  Configuration d;
  for (int q = 0; q < 4; ++q) REQUIRE(ff_insert(d, static_cast<module_id>(q + 1), 1));
  CHECK(!ff_insert(d, 9, 2));  // cap(T) = 0 < 4^-2
}

TEST_CASE("invariant_check spots an occupied pixel after an empty one") {
  Configuration c;
  c.assign(path("0"), 1);
  c.assign(path("2"), 2);  // quadrant 1 is an empty 1-pixel before an occupied one
  CHECK(!invariant_check(c));
  Configuration d;
  d.assign(path("0"), 1);
  d.assign(path("1"), 2);
  CHECK(invariant_check(d));
  CHECK(invariant_check(Configuration()));
}

TEST_CASE("ff_delete of the z-last square does not move anything") {
  Configuration c;
  REQUIRE(ff_insert(c, 1, 1));
  REQUIRE(ff_insert(c, 2, 1));
  CostLedger ledger;
  ff_delete(c, 2, ledger);
  CHECK(ledger.moves == 0);
  CHECK(c.place_of(1)->str() == "0");
  CHECK_THROWS_AS(ff_delete(c, 42, ledger), UnknownModule);
}

TEST_CASE("deletion compaction chain relocates in reverse z-order") {
  // Deleting X frees a 3-pixel; the reverse-z scan skips everything too big,
  // square G fits and its departure uncovers a 2-pixel; square I fills that
  // and uncovers a 1-pixel; square J finishes the chain: exactly 3 moves.
  Configuration c;
  c.assign(path("00"), 10);   // A
  c.assign(path("01"), 11);   // B
  c.assign(path("02"), 12);   // C
  c.assign(path("030"), 13);  // D
  c.assign(path("031"), 14);  // E
  c.assign(path("032"), 99);  // X, deleted below
  c.assign(path("033"), 15);  // F
  c.assign(path("100"), 20);  // G: z-last 3-square, empty siblings
  c.assign(path("11"), 21);   // H
  c.assign(path("12"), 22);   // K
  c.assign(path("13"), 23);   // L
  c.assign(path("20"), 30);   // I: z-last 2-square, empty siblings
  c.assign(path("3"), 40);    // J: z-last 1-square
  c.validate();
  REQUIRE(invariant_check(c));
  REQUIRE(c.is_compact());

  CostLedger ledger;
  ff_delete(c, 99, ledger);

  REQUIRE(ledger.moves == 3);
  CHECK(ledger.trace[0].id == 20);
  CHECK(ledger.trace[0].from.str() == "100");
  CHECK(ledger.trace[0].to.str() == "032");
  CHECK(ledger.trace[1].id == 30);
  CHECK(ledger.trace[1].from.str() == "20");
  CHECK(ledger.trace[1].to.str() == "10");
  CHECK(ledger.trace[2].id == 40);
  CHECK(ledger.trace[2].from.str() == "3");
  CHECK(ledger.trace[2].to.str() == "2");
  CHECK(invariant_check(c));
  CHECK(c.is_compact());
  c.validate();
}

TEST_CASE("random valid aligned sequences keep every first-fit property") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    FFDriver d(seed);
    for (int step = 0; step < 120; ++step) {
      d.step(0.65, 4);
      d.check_all();
    }
  }
}

TEST_CASE("insert-only valid sequences always succeed at zero cost") {
  // Lemma 7 + Theorem 6: under a valid aligned sequence ff_insert never
  // collides, in any order of layers
  XorShift64Star rng(77);
  for (int round = 0; round < 30; ++round) {
    Configuration c;
    module_id next = 1;
    for (;;) {
      const int layer = static_cast<int>(rng.next() % 4);
      if (c.capacity() < Dyadic::unit(layer)) break;
      REQUIRE(ff_insert(c, next++, layer));
    }
    REQUIRE(invariant_check(c));
    REQUIRE(c.is_compact());
  }
}

TEST_CASE("invariant implies first empty pixel follows all occupied ones") {
  FFDriver d(5150);
  for (int step = 0; step < 150; ++step) d.step(0.6, 3);
  const Configuration& c = d.cfg;
  REQUIRE(invariant_check(c));
  for (int j = 0; j <= 3; ++j) {
    auto emp = first_empty_pixel(c, j);
    auto occ = last_occupied_at_layer(c, j);
    if (emp && occ) CHECK(z_relation(*occ, *emp) == ZRel::before);
  }
}
