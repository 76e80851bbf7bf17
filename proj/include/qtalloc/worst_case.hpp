#pragma once

#include <cstdint>

#include "qtalloc/configuration.hpp"
#include "qtalloc/defrag.hpp"
#include "qtalloc/errors.hpp"

namespace qtalloc {

// The tight lower-bound instance for inserting an i-square, with s = 2i:
// every i-pixel holds three k-squares for each i < k <= s, nested so that
// each fractional pixel keeps exactly one free slot, ending in a single
// empty s-pixel. cap(T) = 4^i * 4^-s = 4^-i, just enough for the insertion,
// and every reallocation cascades all the way down.
inline Configuration build_worst_case(int i, int max_depth = kDefaultMaxDepth) {
  if (i < 1) throw PreconditionViolated("worst case needs i >= 1");
  if (2 * i > max_depth) throw DepthExceeded("worst case for this i exceeds the depth limit");
  Configuration c(max_depth);
  const int s = 2 * i;
  module_id next = 1;
  // all 4^i i-pixels, in z-order
  for (std::uint64_t cell = 0; cell < (std::uint64_t{1} << (2 * i)); ++cell) {
    PixelPath p;
    for (int d = 0; d < i; ++d)
      p = p.child(static_cast<int>((cell >> (2 * (i - 1 - d))) & 3));
    // quadrants 0,1,2 take the k-squares, quadrant 3 recurses
    for (int k = i + 1; k <= s; ++k) {
      for (int q = 0; q < 3; ++q) c.assign(p.child(q), next++);
      p = p.child(3);
    }
  }
  return c;
}

struct WorstCaseReport {
  int insert_layer = 0;
  int smallest_layer = 0;
  CostLedger ledger;
  Dyadic expected_total;          // 3/4 * 4^-i * i
  std::uint64_t expected_moves;   // 4^i - 1
  CostBounds bounds;              // cost_bounds(i, 2i); the bound is tight here
  bool total_matches = false;
  bool moves_match = false;
};

// Inserts an i-square into the worst case and checks that the measured
// ledger meets the matching lower bounds exactly.
inline WorstCaseReport verify_lower_bound(int i, int max_depth = kDefaultMaxDepth) {
  WorstCaseReport rep;
  rep.insert_layer = i;
  rep.smallest_layer = 2 * i;
  Configuration c = build_worst_case(i, max_depth);
  insert_with_defrag(c, 1'000'000'000ull, i, rep.ledger);
  rep.expected_total = Dyadic(3 * i, i + 1);
  rep.expected_moves = (std::uint64_t{1} << (2 * i)) - 1;
  rep.bounds = cost_bounds(i, 2 * i);
  rep.total_matches = rep.ledger.total_volume == rep.expected_total;
  rep.moves_match = rep.ledger.moves == rep.expected_moves;
  return rep;
}

}  // namespace qtalloc
