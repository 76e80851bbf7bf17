#include <catch2/catch_amalgamated.hpp>

#include "qtalloc/configuration.hpp"
#include "qtalloc/requests.hpp"

using namespace qtalloc;

namespace {
PixelPath path(const char* s) { return PixelPath::from_string(s); }
}  // namespace

TEST_CASE("classification of the empty configuration") {
  Configuration c;
  PixelState s = c.classify(PixelPath());
  CHECK(s.kind == PixelKind::FreeEmpty);
  CHECK(s.maximally_empty);
  CHECK(c.capacity() == Dyadic::one());
  CHECK(c.height() == 0);
  CHECK(c.is_compact());
}

TEST_CASE("classification around a single 1-square") {
  // one 1-square at quadrant 0: root is fractional and open
  Configuration c;
  c.assign(path("0"), 7);
  PixelState root = c.classify(PixelPath());
  CHECK(root.kind == PixelKind::FreeFractional);
  CHECK(root.open);
  CHECK(c.classify(path("0")).kind == PixelKind::Occupied);
  CHECK(c.classify(path("02")).kind == PixelKind::Blocked);  // child of occupied
  PixelState sib = c.classify(path("1"));
  CHECK(sib.kind == PixelKind::FreeEmpty);
  CHECK(sib.maximally_empty);
  PixelState deep = c.classify(path("13"));
  CHECK(deep.kind == PixelKind::FreeEmpty);
  CHECK(!deep.maximally_empty);  // parent is empty
  CHECK(c.capacity() == Dyadic(3, 1));
  CHECK(c.height() == 2);
}

TEST_CASE("capacity recursion") {
  Configuration c;
  CHECK(c.capacity(PixelPath()) == Dyadic::one());
  c.assign(path("2"), 1);
  CHECK(c.capacity() == Dyadic(3, 1));  // 1 - 4^-1
  CHECK(c.capacity(path("2")) == Dyadic::zero());
  CHECK(c.capacity(path("23")) == Dyadic::zero());  // blocked
  CHECK(c.capacity(path("1")) == Dyadic::unit(1));
  CHECK(c.capacity(path("13")) == Dyadic::unit(2));  // inside an empty region
  Configuration f;
  f.assign(path("00"), 1);
  CHECK(f.capacity() == Dyadic(15, 2));  // 2-square: 1 - 4^-2
}

TEST_CASE("maximally empty pixels: order and Lemma 1 sum") {
  Configuration c;
  c.assign(path("0"), 1);
  auto pixels = c.maximally_empty_pixels();
  REQUIRE(pixels.size() == 3);
  CHECK(pixels[0].str() == "1");
  CHECK(pixels[1].str() == "2");
  CHECK(pixels[2].str() == "3");

  c.assign(path("10"), 2);
  c.assign(path("322"), 3);
  pixels = c.maximally_empty_pixels();
  // capacity-descending, z within a layer
  Dyadic sum;
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    sum += Dyadic::unit(pixels[i].layer());
    if (i > 0) CHECK(pixels[i - 1].layer() <= pixels[i].layer());
  }
  CHECK(sum == c.capacity());
  c.validate();
}

TEST_CASE("assign preconditions") {
  Configuration c;
  c.assign(PixelPath(), 1);
  CHECK(c.capacity() == Dyadic::zero());
  CHECK(c.height() == 1);
  CHECK_THROWS_AS(c.assign(path("1"), 2), PixelNotEmpty);  // blocked below the root square

  Configuration d;
  d.assign(path("0"), 1);
  CHECK_THROWS_AS(d.assign(path("02"), 2), PixelNotEmpty);
  CHECK_THROWS_AS(d.assign(PixelPath(), 2), PixelNotEmpty);  // fractional root
  CHECK_THROWS_AS(d.assign(path("1"), 1), PreconditionViolated);  // duplicate id
}

TEST_CASE("assign/unassign round trip restores structural equality") {
  Configuration c;
  c.assign(path("1"), 1);
  c.assign(path("23"), 2);
  Configuration before(c);
  c.assign(path("301"), 3);
  c.unassign(3);
  CHECK(c == before);
  c.validate();
  CHECK_THROWS_AS(c.unassign(99), UnknownModule);
}

TEST_CASE("deleting one of four sibling squares leaves the parent open") {
  Configuration c;
  for (int q = 0; q < 4; ++q) c.assign(PixelPath().child(0).child(q), static_cast<module_id>(q + 1));
  c.unassign(2);
  PixelState s = c.classify(path("0"));
  CHECK(s.kind == PixelKind::FreeFractional);
  CHECK(s.open);
  c.validate();
}

TEST_CASE("move_square transfers the assignment and bills the ledger") {
  Configuration c;
  c.assign(path("0"), 1);
  CostLedger ledger;
  c.move_square(path("0"), path("2"), ledger);
  CHECK(ledger.moves == 1);
  CHECK(ledger.total_volume == Dyadic::unit(1));
  CHECK(c.place_of(1)->str() == "2");
  CHECK(c.classify(path("0")).kind == PixelKind::FreeEmpty);

  c.assign(path("0"), 2);
  CHECK_THROWS_AS(c.move_square(path("2"), path("0"), ledger), DestinationNotEmpty);
  CHECK_THROWS_AS(c.move_square(path("2"), path("10"), ledger), LayerMismatch);

  // two sequential legal moves are additive
  c.move_square(path("2"), path("3"), ledger);
  CHECK(ledger.moves == 2);
  CHECK(ledger.total_volume == Dyadic(2, 1));
  c.validate();
}

TEST_CASE("compactness counts open pixels per layer") {
  Configuration c;
  CHECK(c.is_compact());
  // two fractional 1-pixels, each with an empty child
  c.assign(path("00"), 1);
  c.assign(path("10"), 2);
  CHECK(!c.is_compact());
  c.unassign(2);
  CHECK(c.is_compact());
}

TEST_CASE("height follows the deepest square") {
  Configuration c;
  CHECK(c.height() == 0);
  c.assign(PixelPath(), 1);
  CHECK(c.height() == 1);
  c.unassign(1);
  c.assign(path("123"), 2);
  CHECK(c.height() == 4);
}

TEST_CASE("serialization round trip") {
  Configuration c;
  c.assign(path("1"), 4);
  c.assign(path("03"), 9);
  const std::string text = c.serialize();
  CHECK(text == "((EEEO:9)O:4EE)");
  Configuration back = Configuration::parse(text);
  CHECK(back == c);
  back.validate();

  CHECK(Configuration::parse("E").capacity() == Dyadic::one());
  CHECK(Configuration::parse("O:1").height() == 1);
  // four empty children normalize to a single empty leaf
  CHECK(Configuration::parse("(EEEE)") == Configuration());
  CHECK_THROWS_AS(Configuration::parse("(EEE)"), ParseError);
  CHECK_THROWS_AS(Configuration::parse("(EEEO:1)X"), ParseError);
  CHECK_THROWS_AS(Configuration::parse("(EEEO:1"), ParseError);
  CHECK_THROWS_AS(Configuration::parse("(O:1EEO:1)"), ParseError);
}

TEST_CASE("depth limit is enforced") {
  Configuration c(2);
  CHECK_THROWS_AS(c.assign(path("000"), 1), DepthExceeded);
  c.assign(path("00"), 1);
  CHECK_THROWS_AS(Configuration::parse("(((EEEO:1)EEE)EEE)", 2), DepthExceeded);
}

TEST_CASE("random operation soup keeps every structural invariant") {
  // capacity caches, canonical form, Lemma 1, Observation 1, index
  // consistency; validate() checks them all after every operation
  XorShift64Star rng(99);
  Configuration c;
  std::vector<module_id> live;
  module_id next = 1;
  for (int step = 0; step < 4000; ++step) {
    const double coin = rng.next_unit();
    if (coin < 0.55) {
      // random empty pixel at a random layer, if one exists
      const int layer = static_cast<int>(rng.next() % 5);
      auto pixels = c.maximally_empty_pixels();
      std::vector<PixelPath> sized;
      for (const auto& p : pixels)
        if (p.layer() <= layer) sized.push_back(p.first_descendant_at(layer));
      if (sized.empty()) continue;
      const auto& target = sized[rng.next() % sized.size()];
      c.assign(target, next);
      live.push_back(next++);
    } else if (!live.empty()) {
      const std::size_t i = static_cast<std::size_t>(rng.next() % live.size());
      c.unassign(live[i]);
      live.erase(live.begin() + static_cast<std::ptrdiff_t>(i));
    }
    c.validate();
  }
  // round trip at the end
  Configuration back = Configuration::parse(c.serialize());
  CHECK(back == c);
}
