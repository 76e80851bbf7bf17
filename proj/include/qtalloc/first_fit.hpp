#pragma once

#include <cassert>
#include <optional>
#include <vector>

#include "qtalloc/configuration.hpp"
#include "qtalloc/cost.hpp"
#include "qtalloc/errors.hpp"
#include "qtalloc/zorder.hpp"

namespace qtalloc {

// First Fit: insertions go to the z-least empty pixel of their layer and
// never reallocate anything; deletions compact the configuration so that
// the invariant below keeps holding:
//
//   for every empty i-pixel p there is no occupied i-pixel q with z(q) > z(p)
//
// Under that invariant the configuration is compact, and an insertion fits
// at zero cost exactly when the remaining capacity suffices.

inline std::optional<PixelPath> ff_insert(Configuration& c, module_id id, int layer) {
  if (layer < 0 || layer > c.max_depth()) return std::nullopt;
  auto p = first_empty_pixel(c, layer);
  if (!p) return std::nullopt;
  c.assign(*p, id);
  return p;
}

// Checks the invariant layer by layer: the z-last occupied pixel must not
// come after the z-first empty pixel.
inline bool invariant_check(const Configuration& c) {
  const int h = c.height();
  for (int j = 0; j < h; ++j) {
    auto occ = last_occupied_at_layer(c, j);
    if (!occ) continue;
    auto emp = first_empty_pixel(c, j);
    if (!emp) continue;
    if (z_relation(*occ, *emp) == ZRel::after) return false;
  }
  return true;
}

namespace detail {

// z-least empty pixel of the given layer inside the subtree at `within`.
inline std::optional<PixelPath> first_empty_within(const Configuration& c, const PixelPath& within,
                                                   int layer) {
  const Configuration::Node* n = node_at(c, within);
  if (n == nullptr) return std::nullopt;
  return first_empty_rec(*n, within, layer, {});
}

// Ordered insert of a fresh maximally empty pixel: pixels now lying inside
// it leave the set, and the set stays sorted by z. The procedure's removal
// line only names children of the new pixel; deeper descendants can appear
// when a collapse cascades, so removal covers all of them.
inline void pending_add(std::vector<PixelPath>& pending, const PixelPath& p) {
  std::erase_if(pending, [&](const PixelPath& q) { return p.contains_or_equals(q); });
  auto it = pending.begin();
  while (it != pending.end() && z_relation(*it, p) == ZRel::before) ++it;
  pending.insert(it, p);
}

}  // namespace detail

// Deletes a square and runs the compaction procedure: starting from the
// maximally empty pixel uncovered by the deletion, squares are scanned in
// reverse z-order and pulled forward into the earliest hole they fit; each
// relocation uncovers a new maximally empty pixel that is queued up in turn.
inline void ff_delete(Configuration& c, module_id id, CostLedger& ledger) {
  auto place = c.place_of(id);
  if (!place) throw UnknownModule("ff_delete of unknown module");
  ledger.request_volume = Dyadic::unit(place->layer());
  const PixelPath freed = c.unassign(id);

  std::vector<PixelPath> pending;
  pending.push_back(c.maximally_empty_containing(freed));

#ifndef NDEBUG
  std::optional<PixelPath> prev_a;
#endif
  while (!pending.empty()) {
    const PixelPath a = pending.front();
    pending.erase(pending.begin());
#ifndef NDEBUG
    // Popped holes advance strictly in z-order; that is what bounds the
    // procedure (Theorem-style termination argument).
    if (prev_a) assert(z_relation(a, *prev_a) == ZRel::after);
    prev_a = a;
    {
      PixelState s = c.classify(a);
      assert(s.kind == PixelKind::FreeEmpty && s.maximally_empty);
    }
#endif
    std::optional<PixelPath> b = last_occupied(c);
    while (b && !a.contains_or_equals(*b) && z_relation(*b, a) == ZRel::after) {
      const PixelPath cursor = *b;
      if (cursor.layer() >= a.layer()) {
        // The square fits if `a` still has an empty descendant of its size;
        // `a` keeps filling up during this loop.
        if (auto dest = detail::first_empty_within(c, a, cursor.layer())) {
          c.move_square(cursor, *dest, ledger);
          const PixelPath uncovered = c.maximally_empty_containing(cursor);
          detail::pending_add(pending, uncovered);
        }
      }
      b = prev_occupied(c, cursor);
    }
  }
}

}  // namespace qtalloc
