#pragma once

#include <cassert>
#include <cmath>
#include <compare>
#include <cstdint>
#include <string>

namespace qtalloc {

// Exact volume arithmetic on values of the form mant / 4^exp.
//
// Every aligned-square volume is a power of 1/4, so sums, differences and
// the worst-case bounds (3/16, 3/32, ...) stay representable. Comparisons
// are exact; there is no epsilon anywhere in the bound checks.
class Dyadic {
 public:
  constexpr Dyadic() = default;
  constexpr explicit Dyadic(std::int64_t integer) : mant_(integer) {}
  constexpr Dyadic(std::int64_t mant, int exp) : mant_(mant), exp_(exp) {
    assert(exp >= 0);
    normalize();
  }

  // 4^-layer, the volume of a pixel at the given layer.
  static constexpr Dyadic unit(int layer) { return Dyadic(1, layer); }
  static constexpr Dyadic zero() { return Dyadic(); }
  static constexpr Dyadic one() { return Dyadic(std::int64_t{1}); }

  constexpr std::int64_t mantissa() const { return mant_; }
  constexpr int exponent() const { return exp_; }
  constexpr bool is_zero() const { return mant_ == 0; }
  constexpr bool is_negative() const { return mant_ < 0; }

  constexpr Dyadic operator-() const {
    Dyadic r;
    r.mant_ = -mant_;
    r.exp_ = exp_;
    return r;
  }

  constexpr Dyadic& operator+=(const Dyadic& o) {
    const int e = exp_ > o.exp_ ? exp_ : o.exp_;
    mant_ = shifted(mant_, e - exp_) + shifted(o.mant_, e - o.exp_);
    exp_ = e;
    normalize();
    return *this;
  }
  constexpr Dyadic& operator-=(const Dyadic& o) { return *this += -o; }

  friend constexpr Dyadic operator+(Dyadic a, const Dyadic& b) { return a += b; }
  friend constexpr Dyadic operator-(Dyadic a, const Dyadic& b) { return a -= b; }

  // value * n
  constexpr Dyadic times(std::int64_t n) const {
    Dyadic r;
    assert(n == 0 || will_fit(mant_, n));
    r.mant_ = mant_ * n;
    r.exp_ = exp_;
    r.normalize();
    return r;
  }

  // value * 4^k (k may be negative).
  constexpr Dyadic scaled_pow4(int k) const {
    Dyadic r = *this;
    if (r.mant_ == 0) return r;
    if (k <= 0) {
      r.exp_ += -k;
      return r;
    }
    int up = k;
    while (up > r.exp_) {
      assert(will_fit(r.mant_, 4));
      r.mant_ *= 4;
      --up;
    }
    r.exp_ -= up;
    r.normalize();
    return r;
  }

  friend constexpr bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.mant_ == b.mant_ && a.exp_ == b.exp_;
  }
  friend constexpr std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
    const int e = a.exp_ > b.exp_ ? a.exp_ : b.exp_;
    const __int128 x = wide(a.mant_) << (2 * (e - a.exp_));
    const __int128 y = wide(b.mant_) << (2 * (e - b.exp_));
    if (x < y) return std::strong_ordering::less;
    if (x > y) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  double to_double() const { return std::ldexp(static_cast<double>(mant_), -2 * exp_); }

  // "3/16" style rendering with a power-of-four denominator.
  std::string str() const {
    if (exp_ == 0) return std::to_string(mant_);
    return std::to_string(mant_) + "/4^" + std::to_string(exp_);
  }

 private:
  static constexpr __int128 wide(std::int64_t v) { return static_cast<__int128>(v); }

  static constexpr bool will_fit(std::int64_t m, std::int64_t f) {
    const __int128 p = wide(m) * f;
    return p <= INT64_MAX && p >= INT64_MIN;
  }

  static constexpr std::int64_t shifted(std::int64_t m, int quarter_steps) {
    __int128 v = wide(m);
    while (quarter_steps-- > 0) {
      v *= 4;
      assert(v <= INT64_MAX && v >= INT64_MIN);
    }
    return static_cast<std::int64_t>(v);
  }

  constexpr void normalize() {
    if (mant_ == 0) {
      exp_ = 0;
      return;
    }
    while (exp_ > 0 && mant_ % 4 == 0) {
      mant_ /= 4;
      --exp_;
    }
  }

  std::int64_t mant_ = 0;
  int exp_ = 0;  // denominator is 4^exp_
};

}  // namespace qtalloc
