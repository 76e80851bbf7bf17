#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <optional>
#include <vector>

#include "qtalloc/configuration.hpp"
#include "qtalloc/cost.hpp"
#include "qtalloc/errors.hpp"
#include "qtalloc/zorder.hpp"

namespace qtalloc {

struct CostBounds {
  Dyadic total_volume;
  std::uint64_t moves;
  Dyadic relative_volume;
};

// Worst-case reallocation cost of inserting an i-square when the smallest
// assigned square sits at layer s:
//   total volume <= 3/4 * 4^-i * min{s-i, i}
//   moves        <= 4^min{s-i, i} - 1
//   relative     <= 3/4 * min{s-i, i}
// For s <= i the insertion is free and all bounds are zero.
inline CostBounds cost_bounds(int insert_layer, int smallest_layer) {
  const int m = std::max(0, std::min(smallest_layer - insert_layer, insert_layer));
  CostBounds b;
  b.total_volume = Dyadic(3 * m, insert_layer + 1);
  b.moves = (std::uint64_t{1} << (2 * m)) - 1;
  b.relative_volume = Dyadic(3 * m, 1);
  return b;
}

namespace detail {

inline void collect_squares(const Configuration::Node& n, const PixelPath& at,
                            std::vector<PixelPath>& out) {
  if (n.occupied()) {
    out.push_back(at);
    return;
  }
  if (!n.internal()) return;
  for (int q = 0; q < 4; ++q)
    collect_squares(*n.child[static_cast<std::size_t>(q)], at.child(q), out);
}

// Squares assigned inside the subtree at p, in z-order (pre-order).
inline std::vector<PixelPath> squares_within(const Configuration& c, const PixelPath& p) {
  std::vector<PixelPath> out;
  const Configuration::Node* n = node_at(c, p);
  if (n != nullptr) collect_squares(*n, p, out);
  return out;
}

inline PixelPath graft(const PixelPath& new_root, const PixelPath& old_path, int old_root_layer) {
  PixelPath r = new_root;
  for (int d = old_root_layer; d < old_path.layer(); ++d) r = r.child(old_path.quadrant(d));
  return r;
}

// Moves every square under `from` to the corresponding position under the
// empty pixel `to`, square by square in pre-order. Relative positions are
// preserved, so each individual destination is empty at move time.
inline void relocate_subtree(Configuration& c, const PixelPath& from, const PixelPath& to,
                             CostLedger& ledger) {
  assert(from.layer() == to.layer());
  for (const PixelPath& sq : squares_within(c, from))
    c.move_square(sq, graft(to, sq, from.layer()), ledger);
}

// Fractional pixel at the given layer with the largest remaining capacity,
// z-least on ties, skipping the excluded subtrees.
inline void best_fractional_rec(const Configuration::Node& n, const PixelPath& at, int layer,
                                std::span<const PixelPath> excluded, Dyadic& best_cap,
                                std::optional<PixelPath>& best) {
  if (n.occupied() || n.cap.is_zero() || !n.internal()) return;
  if (under_any(at, excluded)) return;
  if (at.layer() == layer) {
    if (n.cap > best_cap) {
      best_cap = n.cap;
      best = at;
    }
    return;
  }
  for (int q = 0; q < 4; ++q)
    best_fractional_rec(*n.child[static_cast<std::size_t>(q)], at.child(q), layer, excluded,
                        best_cap, best);
}

inline std::optional<PixelPath> best_fractional_pixel(const Configuration& c, int layer,
                                                      std::span<const PixelPath> excluded) {
  Dyadic best_cap;
  std::optional<PixelPath> best;
  best_fractional_rec(c.root_node(), PixelPath::root(), layer, excluded, best_cap, best);
  return best;
}

bool empty_out(Configuration& c, const PixelPath& target, std::vector<PixelPath>& forbidden,
               CostLedger& ledger);

// Finds or creates room for the square at `sq` outside the forbidden
// subtrees and moves it there. Cascades into deeper layers when no empty
// pixel of the right size exists.
inline bool relocate_square_out(Configuration& c, const PixelPath& sq,
                                std::vector<PixelPath>& forbidden, CostLedger& ledger) {
  const int layer = sq.layer();
  if (auto dest = first_empty_pixel(c, layer, forbidden)) {
    c.move_square(sq, *dest, ledger);
    return true;
  }
  auto sub = best_fractional_pixel(c, layer, forbidden);
  if (!sub) return false;
  forbidden.push_back(*sub);
  const bool ok = empty_out(c, *sub, forbidden, ledger);
  forbidden.pop_back();
  if (!ok) return false;
  c.move_square(sq, *sub, ledger);
  return true;
}

inline bool empty_out(Configuration& c, const PixelPath& target, std::vector<PixelPath>& forbidden,
                      CostLedger& ledger) {
  // Largest squares first: their relocation may have to empty a subtarget,
  // which must not contain squares this cascade parked earlier.
  std::vector<PixelPath> squares = squares_within(c, target);
  std::stable_sort(squares.begin(), squares.end(),
                   [](const PixelPath& a, const PixelPath& b) { return a.layer() < b.layer(); });
  for (const PixelPath& sq : squares)
    if (!relocate_square_out(c, sq, forbidden, ledger)) return false;
  return true;
}

}  // namespace detail

// Combines four maximally empty j-pixels into an empty (j-1)-pixel: the
// donor's non-empty sibling subtrees are relocated into the other pixels,
// leaving the donor's parent empty. All maximally empty i-pixels with
// i < j-1 survive untouched.
inline PixelPath merge_four(Configuration& c, const std::array<PixelPath, 4>& pixels,
                            CostLedger& ledger) {
  const int j = pixels[0].layer();
  if (j < 1) throw PreconditionViolated("merge_four needs pixels below the root");
  for (const auto& p : pixels)
    if (p.layer() != j) throw PreconditionViolated("merge_four pixels must share a layer");
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = a + 1; b < 4; ++b)
      if (pixels[a].contains_or_equals(pixels[b]) || pixels[b].contains_or_equals(pixels[a]))
        throw PreconditionViolated("merge_four pixels must be disjoint");

  // Four empty siblings have already collapsed into their parent.
  const bool same_parent = pixels[1].parent() == pixels[0].parent() &&
                           pixels[2].parent() == pixels[0].parent() &&
                           pixels[3].parent() == pixels[0].parent();
  if (same_parent && c.classify(pixels[0].parent()).kind == PixelKind::FreeEmpty)
    return pixels[0].parent();

  for (const auto& p : pixels) {
    PixelState s = c.classify(p);
    if (s.kind != PixelKind::FreeEmpty || !s.maximally_empty)
      throw PreconditionViolated("merge_four pixel is not maximally empty");
  }

  // Donor: the pixel whose parent carries the least assigned volume, i.e.
  // the parent with the largest remaining capacity; ties break by z-order.
  std::size_t donor = 0;
  Dyadic donor_cap = c.capacity(pixels[0].parent());
  for (std::size_t i = 1; i < 4; ++i) {
    Dyadic pc = c.capacity(pixels[i].parent());
    if (pc > donor_cap ||
        (pc == donor_cap && z_relation(pixels[i], pixels[donor]) == ZRel::before)) {
      donor_cap = pc;
      donor = i;
    }
  }
  const PixelPath q = pixels[donor].parent();

  std::vector<PixelPath> receivers;
  for (std::size_t i = 0; i < 4; ++i)
    if (!q.contains_or_equals(pixels[i])) receivers.push_back(pixels[i]);
  std::sort(receivers.begin(), receivers.end(),
            [](const PixelPath& a, const PixelPath& b) { return z_relation(a, b) == ZRel::before; });

  std::vector<PixelPath> movers;
  for (int qq = 0; qq < 4; ++qq) {
    PixelPath child = q.child(qq);
    if (c.classify(child).kind != PixelKind::FreeEmpty) movers.push_back(child);
  }
  assert(movers.size() <= receivers.size());
  for (std::size_t i = 0; i < movers.size(); ++i)
    detail::relocate_subtree(c, movers[i], receivers[i], ledger);

  assert(c.classify(q).kind == PixelKind::FreeEmpty);
  return q;
}

// Transforms the configuration so that an empty pixel of the requested layer
// exists, whenever cap(T) >= 4^-layer allows it at all. Returns the pixel,
// or nothing when the capacity is insufficient.
//
// Take the shortest descending-capacity prefix of the maximally empty pixels
// whose capacities sum to at least 4^-layer. While it holds four or more
// pixels, its last four share a layer; merging them shortens the prefix and
// preserves the sum, until a single pixel of capacity exactly 4^-layer is
// left. The prefix is re-derived from the configuration after every merge,
// which keeps every entry maximally empty even when a merge collapses
// further empty siblings.
inline std::optional<PixelPath> make_empty_pixel(Configuration& c, int layer, CostLedger& ledger) {
  if (layer < 0 || layer > c.max_depth())
    throw DepthExceeded("requested pixel layer outside configured depth");
  const Dyadic want = Dyadic::unit(layer);
  if (c.capacity() < want) return std::nullopt;
  for (;;) {
    if (auto existing = first_empty_pixel(c, layer)) return existing;
    std::vector<PixelPath> s = c.maximally_empty_pixels();
    Dyadic sum;
    std::size_t k = 0;
    while (k < s.size() && sum < want) sum += Dyadic::unit(s[k++].layer());
    assert(sum >= want);
    assert(k >= 4);  // k == 1 would mean an empty pixel of the layer already existed
    const int merge_layer = s[k - 1].layer();
    assert(s[k - 2].layer() == merge_layer && s[k - 3].layer() == merge_layer &&
           s[k - 4].layer() == merge_layer);
    merge_four(c, {s[k - 4], s[k - 3], s[k - 2], s[k - 1]}, ledger);
  }
}

// Fulfills an insertion with reallocation. The target pixel is the free
// pixel of the requested layer with the largest remaining capacity (z-least
// on ties); its content is moved out with cascading relocations. If the
// cascade cannot finish (no proof guarantees it always can), the attempt is
// rolled back and the merge-based construction above takes over, which
// succeeds whenever cap(T) >= 4^-layer.
inline std::optional<PixelPath> insert_with_defrag(Configuration& c, module_id id, int layer,
                                                   CostLedger& ledger) {
  if (layer < 0 || layer > c.max_depth())
    throw DepthExceeded("requested layer outside configured depth");
  ledger.request_volume = Dyadic::unit(layer);
  if (c.capacity() < Dyadic::unit(layer)) return std::nullopt;
  if (auto direct = first_empty_pixel(c, layer)) {
    c.assign(*direct, id);
    return direct;
  }

  Configuration snapshot(c);
  CostLedger attempt;
  std::vector<PixelPath> forbidden;
  auto target = detail::best_fractional_pixel(c, layer, forbidden);
  bool ok = target.has_value();
  if (ok) {
    forbidden.push_back(*target);
    ok = detail::empty_out(c, *target, forbidden, attempt);
  }
  if (ok) {
    ledger.moves += attempt.moves;
    ledger.total_volume += attempt.total_volume;
    ledger.trace.insert(ledger.trace.end(), attempt.trace.begin(), attempt.trace.end());
    c.assign(*target, id);
    return target;
  }

  c = std::move(snapshot);
  auto made = make_empty_pixel(c, layer, ledger);
  assert(made.has_value());
  c.assign(*made, id);
  return made;
}

}  // namespace qtalloc
