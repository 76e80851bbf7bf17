#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "qtalloc/configuration.hpp"
#include "qtalloc/errors.hpp"
#include "qtalloc/zorder.hpp"

namespace qtalloc {

// Test-support brute force: exhaustive enumeration of small configurations
// and breadth-first search over single-square moves. Everything here stays
// independent of the reallocation engine it is used to check.

inline constexpr int kOracleMaxDepth = 3;
inline constexpr int kOracleMaxSquares = 6;

namespace detail {

// Enumerates the states of the subtree rooted at `at` (empty / occupied /
// subdivided with at least one square below), invoking `k` for each. The
// shared configuration is mutated in place and restored on backtrack.
template <typename K>
void oracle_subtree(Configuration& c, const PixelPath& at, int depth_left, int& used,
                    int max_squares, module_id& next_id, K&& k) {
  k();  // empty
  if (used < max_squares) {
    const module_id id = next_id++;
    c.assign(at, id);
    ++used;
    k();  // occupied
    --used;
    c.unassign(id);
    --next_id;
  }
  if (depth_left > 0 && used < max_squares) {
    auto children = [&](auto& self, int q, int used_at_entry) -> void {
      if (q == 4) {
        if (used > used_at_entry) k();  // all-empty children would not be canonical
        return;
      }
      oracle_subtree(c, at.child(q), depth_left - 1, used, max_squares, next_id,
                     [&] { self(self, q + 1, used_at_entry); });
    };
    children(children, 0, used);
  }
}

}  // namespace detail

// Streams every canonical configuration with at most `max_squares` squares
// and depth at most `max_depth`, exactly once, ids numbered in pre-order.
// The visited configuration is mutable scratch: copy it if you keep it.
template <typename Visit>
void enumerate_small_configs(int max_depth, int max_squares, Visit&& visit) {
  if (max_depth < 0 || max_depth > kOracleMaxDepth || max_squares < 0 ||
      max_squares > kOracleMaxSquares)
    throw LimitsTooLarge("enumeration limits beyond exhaustive range");
  Configuration c(max_depth);
  int used = 0;
  module_id next_id = 1;
  detail::oracle_subtree(c, PixelPath::root(), max_depth, used, max_squares, next_id,
                         [&] { visit(c); });
}

// Canonical serialization with module ids erased: squares of equal size are
// interchangeable under moves, so this is the BFS state key.
inline std::string erased_serialization(const Configuration::Node& n) {
  if (n.occupied()) return "O";
  if (!n.internal()) return "E";
  std::string s = "(";
  for (const auto& c : n.child) s += erased_serialization(*c);
  s += ')';
  return s;
}

inline std::string erased_serialization(const Configuration& c) {
  return erased_serialization(c.root_node());
}

namespace detail {

inline void all_empty_pixels_at(const Configuration::Node& n, const PixelPath& at, int layer,
                                std::vector<PixelPath>& out) {
  if (n.occupied()) return;
  if (n.empty_leaf()) {
    if (at.layer() == layer) {
      out.push_back(at);
    } else if (at.layer() < layer) {
      for (int q = 0; q < 4; ++q) all_empty_pixels_at(n, at.child(q), layer, out);
    }
    return;
  }
  if (at.layer() >= layer) return;
  for (int q = 0; q < 4; ++q)
    all_empty_pixels_at(*n.child[static_cast<std::size_t>(q)], at.child(q), layer, out);
}

}  // namespace detail

// Minimum number of single-square moves to reach a configuration with an
// empty pixel of the requested layer, or nothing if no reachable
// configuration has one. Plain breadth-first search over the move graph.
inline std::optional<int> brute_force_empty_pixel(const Configuration& start, int layer,
                                                  std::size_t state_budget = 200000) {
  if (first_empty_pixel(start, layer)) return 0;
  std::unordered_set<std::string> seen;
  std::deque<std::pair<Configuration, int>> queue;
  seen.insert(erased_serialization(start));
  queue.emplace_back(start, 0);
  while (!queue.empty()) {
    auto [cfg, dist] = std::move(queue.front());
    queue.pop_front();
    // every occupied square x every empty pixel of its layer
    std::vector<std::pair<module_id, PixelPath>> squares;
    for (const auto& [id, at] : cfg.placements()) squares.emplace_back(id, at);
    for (const auto& [id, from] : squares) {
      std::vector<PixelPath> dests;
      detail::all_empty_pixels_at(cfg.root_node(), PixelPath::root(), from.layer(), dests);
      for (const PixelPath& to : dests) {
        Configuration next(cfg);
        CostLedger scratch;
        next.move_square(from, to, scratch);
        std::string key = erased_serialization(next);
        if (!seen.insert(std::move(key)).second) continue;
        if (first_empty_pixel(next, layer)) return dist + 1;
        if (seen.size() > state_budget)
          throw SearchBudgetExceeded("move-graph search exceeded its state budget");
        queue.emplace_back(std::move(next), dist + 1);
      }
    }
  }
  return std::nullopt;
}

}  // namespace qtalloc
