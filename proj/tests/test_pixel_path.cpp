#include <catch2/catch_amalgamated.hpp>

#include "qtalloc/pixel_path.hpp"

using qtalloc::PixelPath;

TEST_CASE("path layering and volume") {
  PixelPath root;
  CHECK(root.layer() == 0);
  CHECK(root.volume() == qtalloc::Dyadic::one());
  PixelPath p = root.child(0).child(3).child(2);
  CHECK(p.layer() == 3);
  CHECK(p.volume() == qtalloc::Dyadic::unit(3));
  CHECK(p.quadrant(0) == 0);
  CHECK(p.quadrant(1) == 3);
  CHECK(p.quadrant(2) == 2);
  CHECK(p.parent().layer() == 2);
}

TEST_CASE("ancestry") {
  PixelPath a = PixelPath().child(1);
  PixelPath b = a.child(2).child(0);
  CHECK(a.is_ancestor_of(b));
  CHECK(!b.is_ancestor_of(a));
  CHECK(!a.is_ancestor_of(a));
  CHECK(a.contains_or_equals(a));
  CHECK(PixelPath().is_ancestor_of(a));
  CHECK(!a.is_ancestor_of(PixelPath().child(2)));
}

TEST_CASE("string round trip") {
  PixelPath p = PixelPath::from_string("032");
  CHECK(p.layer() == 3);
  CHECK(p.str() == "032");
  CHECK(PixelPath::from_string("-").layer() == 0);
  CHECK(PixelPath().str() == "-");
  CHECK_THROWS_AS(PixelPath::from_string("04"), qtalloc::ParseError);
}

TEST_CASE("first descendant extends with zeros") {
  PixelPath p = PixelPath().child(2);
  CHECK(p.first_descendant_at(3).str() == "200");
  CHECK(p.first_descendant_at(1) == p);
}
