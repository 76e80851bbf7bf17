#pragma once

#include <array>
#include <cassert>
#include <compare>
#include <cstdint>
#include <string>

#include "qtalloc/dyadic.hpp"
#include "qtalloc/errors.hpp"

namespace qtalloc {

using module_id = std::uint64_t;

// Hard ceiling on path length; the per-configuration depth limit
// (kDefaultMaxDepth, runtime-configurable) must stay below it.
inline constexpr int kMaxPathDepth = 32;
inline constexpr int kDefaultMaxDepth = 24;

// Address of a quadtree node as a sequence of quadrant indices in {0,1,2,3}.
// The root has the empty path; a pixel at layer j has side 2^-j and volume
// 4^-j. Quadrant index order is the z-order of siblings, with the geometric
// reading 0=NW, 1=NE, 2=SW, 3=SE.
class PixelPath {
 public:
  constexpr PixelPath() = default;

  static PixelPath root() { return PixelPath(); }

  int layer() const { return size_; }
  bool is_root() const { return size_ == 0; }

  std::uint8_t quadrant(int i) const {
    assert(i >= 0 && i < size_);
    return digits_[static_cast<std::size_t>(i)];
  }

  Dyadic volume() const { return Dyadic::unit(layer()); }

  PixelPath child(int quadrant) const {
    assert(quadrant >= 0 && quadrant < 4);
    if (size_ >= kMaxPathDepth) throw DepthExceeded("pixel path exceeds maximum depth");
    PixelPath r = *this;
    r.digits_[static_cast<std::size_t>(r.size_++)] = static_cast<std::uint8_t>(quadrant);
    return r;
  }

  PixelPath parent() const {
    assert(size_ > 0);
    PixelPath r = *this;
    --r.size_;
    return r;
  }

  // z-least descendant at the given (deeper or equal) layer.
  PixelPath first_descendant_at(int layer) const {
    assert(layer >= size_);
    if (layer > kMaxPathDepth) throw DepthExceeded("pixel path exceeds maximum depth");
    PixelPath r = *this;
    while (r.size_ < layer) r.digits_[static_cast<std::size_t>(r.size_++)] = 0;
    return r;
  }

  // True if *this is a strict ancestor of p.
  bool is_ancestor_of(const PixelPath& p) const {
    if (size_ >= p.size_) return false;
    for (int i = 0; i < size_; ++i)
      if (digits_[static_cast<std::size_t>(i)] != p.digits_[static_cast<std::size_t>(i)]) return false;
    return true;
  }

  bool contains_or_equals(const PixelPath& p) const { return *this == p || is_ancestor_of(p); }

  friend bool operator==(const PixelPath& a, const PixelPath& b) {
    if (a.size_ != b.size_) return false;
    for (int i = 0; i < a.size_; ++i)
      if (a.digits_[static_cast<std::size_t>(i)] != b.digits_[static_cast<std::size_t>(i)]) return false;
    return true;
  }

  std::string str() const {
    if (size_ == 0) return "-";
    std::string s;
    s.reserve(static_cast<std::size_t>(size_));
    for (int i = 0; i < size_; ++i)
      s.push_back(static_cast<char>('0' + digits_[static_cast<std::size_t>(i)]));
    return s;
  }

  static PixelPath from_string(const std::string& s) {
    PixelPath p;
    if (s == "-" || s == "") return p;
    for (char c : s) {
      if (c < '0' || c > '3') throw ParseError("pixel path digit out of range: " + s);
      p = p.child(c - '0');
    }
    return p;
  }

 private:
  std::array<std::uint8_t, kMaxPathDepth> digits_{};
  std::int8_t size_ = 0;
};

}  // namespace qtalloc
