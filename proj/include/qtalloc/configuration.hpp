#pragma once

#include <array>
#include <cassert>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qtalloc/cost.hpp"
#include "qtalloc/dyadic.hpp"
#include "qtalloc/errors.hpp"
#include "qtalloc/pixel_path.hpp"

namespace qtalloc {

enum class PixelKind : std::uint8_t { Occupied, Blocked, FreeEmpty, FreeFractional };

struct PixelState {
  PixelKind kind;
  bool maximally_empty = false;  // FreeEmpty whose parent is not empty
  bool open = false;             // FreeFractional with a maximally empty child
};

// A quadtree configuration: the assignment of j-squares to j-pixels.
//
// The tree is kept in canonical form: an internal node never has four empty
// children (they collapse into one empty leaf), so the maximally empty
// pixels are exactly the empty leaves and structural equality is meaningful.
// Every node caches its remaining capacity; mutations update the caches
// along the touched path only.
//
// Single-writer: concurrent reads are fine only while nobody mutates.
class Configuration {
 public:
  struct Node {
    Dyadic cap;
    std::optional<module_id> occupant;
    std::array<std::unique_ptr<Node>, 4> child;

    bool internal() const { return static_cast<bool>(child[0]); }
    bool occupied() const { return occupant.has_value(); }
    bool empty_leaf() const { return !internal() && !occupied(); }
  };

  explicit Configuration(int max_depth = kDefaultMaxDepth) : max_depth_(max_depth) {
    if (max_depth < 0 || max_depth > kMaxPathDepth)
      throw DepthExceeded("configuration depth limit out of range");
    root_.cap = Dyadic::one();
  }

  Configuration(const Configuration& o) : max_depth_(o.max_depth_), index_(o.index_), layer_count_(o.layer_count_) {
    clone_into(root_, o.root_);
  }
  Configuration& operator=(const Configuration& o) {
    if (this != &o) {
      Configuration tmp(o);
      *this = std::move(tmp);
    }
    return *this;
  }
  Configuration(Configuration&&) noexcept = default;
  Configuration& operator=(Configuration&&) noexcept = default;

  int max_depth() const { return max_depth_; }
  const Node& root_node() const { return root_; }

  Dyadic capacity() const { return root_.cap; }
  Dyadic assigned_volume() const { return Dyadic::one() - root_.cap; }

  std::size_t module_count() const { return index_.size(); }

  // Height per the definition: 0 for the empty configuration, otherwise
  // 1 + the deepest layer holding a square.
  int height() const {
    for (int j = static_cast<int>(layer_count_.size()) - 1; j >= 0; --j)
      if (layer_count_[static_cast<std::size_t>(j)] > 0) return j + 1;
    return 0;
  }

  // Layer of the smallest currently assigned square, if any.
  std::optional<int> smallest_square_layer() const {
    for (int j = static_cast<int>(layer_count_.size()) - 1; j >= 0; --j)
      if (layer_count_[static_cast<std::size_t>(j)] > 0) return j;
    return std::nullopt;
  }

  std::optional<PixelPath> place_of(module_id id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::unordered_map<module_id, PixelPath>& placements() const { return index_; }

  // Total classification; paths below a leaf are classified through it.
  PixelState classify(const PixelPath& p) const {
    const Node* n = &root_;
    for (int d = 0;; ++d) {
      if (n->occupied()) return {d == p.layer() ? PixelKind::Occupied : PixelKind::Blocked};
      if (!n->internal()) {
        PixelState s{PixelKind::FreeEmpty};
        s.maximally_empty = (d == p.layer());  // canonical: empty leaf's parent is internal
        return s;
      }
      if (d == p.layer()) {
        PixelState s{PixelKind::FreeFractional};
        for (const auto& c : n->child)
          if (c->empty_leaf()) s.open = true;
        return s;
      }
      n = n->child[p.quadrant(d)].get();
    }
  }

  Dyadic capacity(const PixelPath& p) const {
    const Node* n = &root_;
    for (int d = 0;; ++d) {
      if (n->occupied()) return Dyadic::zero();
      if (d == p.layer()) return n->cap;
      if (!n->internal()) return Dyadic::unit(p.layer());  // inside an empty region
      n = n->child[p.quadrant(d)].get();
    }
  }

  // All maximally empty pixels, sorted by capacity descending and by
  // z-order ascending within a layer. By Observation 1 they are pairwise
  // disjoint, and by Lemma 1 their capacities sum to capacity().
  std::vector<PixelPath> maximally_empty_pixels() const {
    std::vector<std::vector<PixelPath>> per_layer(static_cast<std::size_t>(max_depth_) + 1);
    collect_empty_leaves(root_, PixelPath::root(), per_layer);
    std::vector<PixelPath> out;
    for (auto& bucket : per_layer)
      for (auto& p : bucket) out.push_back(p);
    return out;
  }

  // Places a square at p. p must be a free empty pixel.
  void assign(const PixelPath& p, module_id id) {
    if (p.layer() > max_depth_) throw DepthExceeded("assignment below depth limit");
    if (index_.contains(id)) throw PreconditionViolated("module id already placed");
    if (classify(p).kind != PixelKind::FreeEmpty)
      throw PixelNotEmpty("assign target is not an empty pixel");
    place_unchecked(p, id);
  }

  // Removes a square and restores canonical form.
  PixelPath unassign(module_id id) {
    auto it = index_.find(id);
    if (it == index_.end()) throw UnknownModule("unassign of unknown module");
    PixelPath p = it->second;
    remove_unchecked(p);
    index_.erase(it);
    layer_count_[static_cast<std::size_t>(p.layer())]--;
    return p;
  }

  // Reallocates one square; the destination must be an empty pixel of the
  // same layer. Exactly one square moves at a time.
  void move_square(const PixelPath& from, const PixelPath& to, CostLedger& ledger) {
    const Node* src = find_node(from);
    if (src == nullptr || !src->occupied())
      throw PreconditionViolated("move source is not an occupied pixel");
    if (to.layer() != from.layer()) throw LayerMismatch("move changes square layer");
    if (classify(to).kind != PixelKind::FreeEmpty)
      throw DestinationNotEmpty("move destination is not an empty pixel");
    module_id id = *src->occupant;
    remove_unchecked(from);
    place_raw(to, id);
    index_[id] = to;
    ledger.record(id, from, to);
  }

  // At most one open j-pixel per layer j.
  bool is_compact() const {
    std::array<std::uint32_t, kMaxPathDepth + 1> open_count{};
    count_open(root_, 0, open_count);
    for (auto c : open_count)
      if (c > 1) return false;
    return true;
  }

  // The maximally empty pixel containing p; p must classify as FreeEmpty.
  PixelPath maximally_empty_containing(const PixelPath& p) const {
    const Node* n = &root_;
    PixelPath here;
    for (int d = 0;; ++d) {
      if (n->empty_leaf()) return here;
      assert(!n->occupied());
      assert(d < p.layer());
      n = n->child[p.quadrant(d)].get();
      here = here.child(p.quadrant(d));
    }
  }

  // Pre-order text form: 'E' empty leaf, 'O:<id>' occupied leaf,
  // '(' four children ')'.
  std::string serialize() const {
    std::string out;
    serialize_node(root_, out);
    return out;
  }

  static Configuration parse(const std::string& text, int max_depth = kDefaultMaxDepth) {
    Configuration c(max_depth);
    std::size_t pos = 0;
    c.parse_node(c.root_, 0, text, pos);
    skip_ws(text, pos);
    if (pos != text.size()) throw ParseError("trailing characters after configuration");
    c.rebuild_caches();
    return c;
  }

  friend bool operator==(const Configuration& a, const Configuration& b) {
    return nodes_equal(a.root_, b.root_);
  }

  // Exhaustive structural self-check, used by tests and checked-mode runs:
  // capacity caches, canonical form, index agreement, and the Lemma 1 /
  // Observation 1 properties.
  void validate() const {
    Dyadic recomputed = validate_node(root_, 0);
    if (!(recomputed == root_.cap)) throw Error("capacity cache mismatch at root");
    std::size_t seen = 0;
    validate_index(root_, PixelPath::root(), seen);
    if (seen != index_.size()) throw Error("index holds entries not present in tree");
    // Lemma 1: maximally empty capacities sum to cap(T); Observation 1:
    // maximally empty pixels are pairwise disjoint.
    Dyadic sum;
    auto pixels = maximally_empty_pixels();
    for (const auto& p : pixels) sum += Dyadic::unit(p.layer());
    if (!(sum == root_.cap)) throw Error("maximally empty capacities do not sum to cap(T)");
    for (std::size_t i = 0; i < pixels.size(); ++i)
      for (std::size_t j = i + 1; j < pixels.size(); ++j)
        if (pixels[i].contains_or_equals(pixels[j]) || pixels[j].contains_or_equals(pixels[i]))
          throw Error("maximally empty pixels are not disjoint");
    std::array<std::uint32_t, kMaxPathDepth + 1> counts{};
    count_layers(root_, 0, counts);
    for (int j = 0; j <= kMaxPathDepth; ++j) {
      std::uint32_t expect = j < static_cast<int>(layer_count_.size())
                                 ? layer_count_[static_cast<std::size_t>(j)]
                                 : 0;
      if (counts[static_cast<std::size_t>(j)] != expect) throw Error("layer counters out of sync");
    }
  }

 private:
  static void clone_into(Node& dst, const Node& src) {
    dst.cap = src.cap;
    dst.occupant = src.occupant;
    if (src.internal()) {
      for (int q = 0; q < 4; ++q) {
        dst.child[static_cast<std::size_t>(q)] = std::make_unique<Node>();
        clone_into(*dst.child[static_cast<std::size_t>(q)], *src.child[static_cast<std::size_t>(q)]);
      }
    }
  }

  const Node* find_node(const PixelPath& p) const {
    const Node* n = &root_;
    for (int d = 0; d < p.layer(); ++d) {
      if (!n->internal()) return nullptr;
      n = n->child[p.quadrant(d)].get();
    }
    return n;
  }

  void place_unchecked(const PixelPath& p, module_id id) {
    place_raw(p, id);
    index_.emplace(id, p);
    layer_count_[static_cast<std::size_t>(p.layer())]++;
  }

  // Assumes the target classifies FreeEmpty. Splits empty leaves on the way
  // down and subtracts the placed volume from every ancestor cache.
  void place_raw(const PixelPath& p, module_id id) {
    const Dyadic vol = Dyadic::unit(p.layer());
    Node* n = &root_;
    for (int d = 0; d < p.layer(); ++d) {
      if (!n->internal()) split_empty_leaf(*n, d);
      n->cap -= vol;
      n = n->child[p.quadrant(d)].get();
    }
    assert(n->empty_leaf());
    n->occupant = id;
    n->cap = Dyadic::zero();
  }

  // Removes the square at p and collapses any run of four empty siblings.
  void remove_unchecked(const PixelPath& p) {
    remove_rec(root_, 0, p);
  }

  void remove_rec(Node& n, int depth, const PixelPath& p) {
    if (depth == p.layer()) {
      assert(n.occupied());
      n.occupant.reset();
      n.cap = Dyadic::unit(depth);
      return;
    }
    Node& c = *n.child[p.quadrant(depth)];
    remove_rec(c, depth + 1, p);
    n.cap += Dyadic::unit(p.layer());
    bool all_empty = true;
    for (const auto& ch : n.child)
      if (!ch->empty_leaf()) all_empty = false;
    if (all_empty) {
      for (auto& ch : n.child) ch.reset();
      assert(n.cap == Dyadic::unit(depth));
    }
  }

  static void split_empty_leaf(Node& n, int depth) {
    assert(n.empty_leaf());
    for (int q = 0; q < 4; ++q) {
      n.child[static_cast<std::size_t>(q)] = std::make_unique<Node>();
      n.child[static_cast<std::size_t>(q)]->cap = Dyadic::unit(depth + 1);
    }
  }

  void collect_empty_leaves(const Node& n, const PixelPath& at,
                            std::vector<std::vector<PixelPath>>& per_layer) const {
    if (n.empty_leaf()) {
      per_layer[static_cast<std::size_t>(at.layer())].push_back(at);
      return;
    }
    if (!n.internal()) return;
    if (n.cap.is_zero()) return;  // nothing empty below
    for (int q = 0; q < 4; ++q)
      collect_empty_leaves(*n.child[static_cast<std::size_t>(q)], at.child(q), per_layer);
  }

  static void count_open(const Node& n, int depth, std::array<std::uint32_t, kMaxPathDepth + 1>& open_count) {
    if (!n.internal()) return;
    for (const auto& c : n.child)
      if (c->empty_leaf()) {
        open_count[static_cast<std::size_t>(depth)]++;
        break;
      }
    for (const auto& c : n.child) count_open(*c, depth + 1, open_count);
  }

  static void count_layers(const Node& n, int depth, std::array<std::uint32_t, kMaxPathDepth + 1>& counts) {
    if (n.occupied()) {
      counts[static_cast<std::size_t>(depth)]++;
      return;
    }
    if (n.internal())
      for (const auto& c : n.child) count_layers(*c, depth + 1, counts);
  }

  static void serialize_node(const Node& n, std::string& out) {
    if (n.occupied()) {
      out += "O:";
      out += std::to_string(*n.occupant);
      return;
    }
    if (!n.internal()) {
      out += 'E';
      return;
    }
    out += '(';
    for (const auto& c : n.child) serialize_node(*c, out);
    out += ')';
  }

  static void skip_ws(const std::string& s, std::size_t& pos) {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\n' || s[pos] == '\t' || s[pos] == '\r')) ++pos;
  }

  void parse_node(Node& n, int depth, const std::string& s, std::size_t& pos) {
    skip_ws(s, pos);
    if (pos >= s.size()) throw ParseError("unexpected end of configuration text");
    char c = s[pos];
    if (c == 'E') {
      ++pos;
      return;
    }
    if (c == 'O') {
      ++pos;
      if (pos >= s.size() || s[pos] != ':') throw ParseError("expected ':' after 'O'");
      ++pos;
      std::size_t start = pos;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
      if (pos == start) throw ParseError("expected module id after 'O:'");
      module_id id = std::stoull(s.substr(start, pos - start));
      if (index_.contains(id)) throw ParseError("duplicate module id in configuration");
      n.occupant = id;
      index_.emplace(id, PixelPath());  // path fixed up in rebuild_caches
      return;
    }
    if (c == '(') {
      if (depth >= max_depth_) throw DepthExceeded("configuration deeper than depth limit");
      ++pos;
      for (int q = 0; q < 4; ++q) {
        n.child[static_cast<std::size_t>(q)] = std::make_unique<Node>();
        parse_node(*n.child[static_cast<std::size_t>(q)], depth + 1, s, pos);
      }
      skip_ws(s, pos);
      if (pos >= s.size() || s[pos] != ')') throw ParseError("expected ')'");
      ++pos;
      // canonical form: collapse four empty children
      bool all_empty = true;
      for (const auto& ch : n.child)
        if (!ch->empty_leaf()) all_empty = false;
      if (all_empty)
        for (auto& ch : n.child) ch.reset();
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "' in configuration");
  }

  void rebuild_caches() {
    layer_count_.fill(0);
    index_.clear();
    rebuild_rec(root_, PixelPath::root());
  }

  Dyadic rebuild_rec(Node& n, const PixelPath& at) {
    if (n.occupied()) {
      index_[*n.occupant] = at;
      layer_count_[static_cast<std::size_t>(at.layer())]++;
      n.cap = Dyadic::zero();
      return n.cap;
    }
    if (!n.internal()) {
      n.cap = Dyadic::unit(at.layer());
      return n.cap;
    }
    Dyadic sum;
    for (int q = 0; q < 4; ++q) sum += rebuild_rec(*n.child[static_cast<std::size_t>(q)], at.child(q));
    n.cap = sum;
    return sum;
  }

  Dyadic validate_node(const Node& n, int depth) const {
    if (n.occupied()) {
      if (n.internal()) throw Error("occupied node has children");
      if (!n.cap.is_zero()) throw Error("occupied node with nonzero cached capacity");
      if (depth > max_depth_) throw Error("square below the depth limit");
      return Dyadic::zero();
    }
    if (!n.internal()) {
      if (!(n.cap == Dyadic::unit(depth))) throw Error("empty leaf capacity cache wrong");
      return n.cap;
    }
    bool all_empty = true;
    Dyadic sum;
    for (const auto& c : n.child) {
      if (!c) throw Error("internal node missing a child");
      sum += validate_node(*c, depth + 1);
      if (!c->empty_leaf()) all_empty = false;
    }
    if (all_empty) throw Error("four empty siblings not collapsed (canonical form)");
    if (!(sum == n.cap)) throw Error("capacity cache mismatch");
    return sum;
  }

  void validate_index(const Node& n, const PixelPath& at, std::size_t& seen) const {
    if (n.occupied()) {
      auto it = index_.find(*n.occupant);
      if (it == index_.end() || !(it->second == at)) throw Error("index does not match tree");
      ++seen;
      return;
    }
    if (n.internal())
      for (int q = 0; q < 4; ++q) validate_index(*n.child[static_cast<std::size_t>(q)], at.child(q), seen);
  }

  static bool nodes_equal(const Node& a, const Node& b) {
    if (a.occupant != b.occupant) return false;
    if (a.internal() != b.internal()) return false;
    if (!a.internal()) return true;
    for (int q = 0; q < 4; ++q)
      if (!nodes_equal(*a.child[static_cast<std::size_t>(q)], *b.child[static_cast<std::size_t>(q)])) return false;
    return true;
  }

  Node root_;
  int max_depth_;
  std::unordered_map<module_id, PixelPath> index_;
  std::array<std::uint32_t, kMaxPathDepth + 1> layer_count_{};
};

}  // namespace qtalloc
