#pragma once

#include <compare>
#include <optional>
#include <span>

#include "qtalloc/configuration.hpp"
#include "qtalloc/errors.hpp"
#include "qtalloc/pixel_path.hpp"

namespace qtalloc {

// z-order over quadtree pixels. Sibling index order is the z pattern, so two
// disjoint pixels compare by the first quadrant index where their paths
// differ. The order is partial: comparing nested pixels is rejected. It is
// total on same-layer pixels, on occupied pixels, and on maximally empty
// pixels, which are the three uses below.

enum class ZRel : std::uint8_t { before, after, nested };

inline ZRel z_relation(const PixelPath& a, const PixelPath& b) noexcept {
  const int n = a.layer() < b.layer() ? a.layer() : b.layer();
  for (int i = 0; i < n; ++i) {
    if (a.quadrant(i) < b.quadrant(i)) return ZRel::before;
    if (a.quadrant(i) > b.quadrant(i)) return ZRel::after;
  }
  return ZRel::nested;
}

inline std::strong_ordering z_compare(const PixelPath& a, const PixelPath& b) {
  switch (z_relation(a, b)) {
    case ZRel::before:
      return std::strong_ordering::less;
    case ZRel::after:
      return std::strong_ordering::greater;
    default:
      if (a.layer() == b.layer()) return std::strong_ordering::equal;
      throw NestedPixels("z-order is undefined for nested pixels");
  }
}

namespace detail {

inline const Configuration::Node* node_at(const Configuration& c, const PixelPath& p) {
  const Configuration::Node* n = &c.root_node();
  for (int d = 0; d < p.layer(); ++d) {
    if (!n->internal()) return nullptr;
    n = n->child[p.quadrant(d)].get();
  }
  return n;
}

inline bool under_any(const PixelPath& p, std::span<const PixelPath> roots) {
  for (const auto& r : roots)
    if (r.contains_or_equals(p)) return true;
  return false;
}

inline std::optional<PixelPath> first_empty_rec(const Configuration::Node& n, const PixelPath& at,
                                                int layer, std::span<const PixelPath> excluded) {
  if (under_any(at, excluded)) return std::nullopt;
  if (n.occupied() || n.cap.is_zero()) return std::nullopt;
  if (n.empty_leaf()) {
    // z-least layer-j descendant of an empty region; it must dodge the
    // excluded subtrees, which can start below this leaf.
    if (excluded.empty()) return at.first_descendant_at(layer);
    if (at.layer() == layer) return at;
    for (int q = 0; q < 4; ++q) {
      auto r = first_empty_rec(n, at.child(q), layer, excluded);
      if (r) return r;
    }
    return std::nullopt;
  }
  if (at.layer() == layer) return std::nullopt;  // fractional j-pixel is not empty
  for (int q = 0; q < 4; ++q) {
    auto r = first_empty_rec(*n.child[static_cast<std::size_t>(q)], at.child(q), layer, excluded);
    if (r) return r;
  }
  return std::nullopt;
}

inline std::optional<PixelPath> last_occupied_rec(const Configuration::Node& n, const PixelPath& at) {
  if (n.occupied()) return at;
  if (!n.internal()) return std::nullopt;
  for (int q = 3; q >= 0; --q) {
    auto r = last_occupied_rec(*n.child[static_cast<std::size_t>(q)], at.child(q));
    if (r) return r;
  }
  return std::nullopt;
}

// Last occupied pixel strictly before `cursor` in z-order. Occupied pixels
// nested with the cursor are skipped (the cursor pixel itself may just have
// been vacated; its region is never re-occupied during a scan).
inline std::optional<PixelPath> prev_occupied_rec(const Configuration::Node& n, const PixelPath& at,
                                                  const PixelPath& cursor) {
  if (n.occupied()) {
    return z_relation(at, cursor) == ZRel::before ? std::optional<PixelPath>(at) : std::nullopt;
  }
  if (!n.internal()) return std::nullopt;
  if (z_relation(at, cursor) == ZRel::after) return std::nullopt;  // whole subtree after cursor
  for (int q = 3; q >= 0; --q) {
    auto r = prev_occupied_rec(*n.child[static_cast<std::size_t>(q)], at.child(q), cursor);
    if (r) return r;
  }
  return std::nullopt;
}

inline std::optional<PixelPath> last_occupied_at_rec(const Configuration::Node& n, const PixelPath& at,
                                                     int layer) {
  if (n.occupied()) return at.layer() == layer ? std::optional<PixelPath>(at) : std::nullopt;
  if (!n.internal() || at.layer() >= layer) return std::nullopt;
  for (int q = 3; q >= 0; --q) {
    auto r = last_occupied_at_rec(*n.child[static_cast<std::size_t>(q)], at.child(q), layer);
    if (r) return r;
  }
  return std::nullopt;
}

}  // namespace detail

// The z-least empty pixel at the given layer, or nothing if none exists.
inline std::optional<PixelPath> first_empty_pixel(const Configuration& c, int layer) {
  if (layer < 0 || layer > c.max_depth()) return std::nullopt;
  return detail::first_empty_rec(c.root_node(), PixelPath::root(), layer, {});
}

// Same, skipping everything inside the excluded subtrees.
inline std::optional<PixelPath> first_empty_pixel(const Configuration& c, int layer,
                                                  std::span<const PixelPath> excluded_subtrees) {
  if (layer < 0 || layer > c.max_depth()) return std::nullopt;
  return detail::first_empty_rec(c.root_node(), PixelPath::root(), layer, excluded_subtrees);
}

inline std::optional<PixelPath> last_occupied(const Configuration& c) {
  return detail::last_occupied_rec(c.root_node(), PixelPath::root());
}

inline std::optional<PixelPath> prev_occupied(const Configuration& c, const PixelPath& cursor) {
  return detail::prev_occupied_rec(c.root_node(), PixelPath::root(), cursor);
}

inline std::optional<PixelPath> last_occupied_at_layer(const Configuration& c, int layer) {
  return detail::last_occupied_at_rec(c.root_node(), PixelPath::root(), layer);
}

}  // namespace qtalloc
