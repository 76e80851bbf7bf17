#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "qtalloc/configuration.hpp"
#include "qtalloc/errors.hpp"

namespace qtalloc {

enum class ShapeKind : std::uint8_t { aligned_square, general_square, rectangle };

// A requested module: an axis-aligned rectangle with sides in (0, 1].
// Placement only ever sees the padded layer; the true area feeds the
// underallocation accounting.
struct ModuleShape {
  double width = 0.0;
  double height = 0.0;

  static ModuleShape square(double side) { return {side, side}; }
  static ModuleShape rect(double w, double h) { return {w, h}; }

  double area() const { return width * height; }
  double longer_side() const { return width > height ? width : height; }
  double shorter_side() const { return width < height ? width : height; }
  bool is_square() const { return width == height; }

  ShapeKind kind() const {
    if (!is_square()) return ShapeKind::rectangle;
    int e;
    return std::frexp(width, &e) == 0.5 ? ShapeKind::aligned_square : ShapeKind::general_square;
  }
};

// Layer of the aligned square a side in (0, 1] is padded to: sides in
// (2^-(i+1), 2^-i] map to layer i. Powers of two are their own layer. The
// comparison is exact via the binary exponent; no logarithm is involved.
inline int pad_square(double side) {
  if (!(side > 0.0) || side > 1.0 || !std::isfinite(side))
    throw PreconditionViolated("side length must lie in (0, 1]");
  int e;
  const double m = std::frexp(side, &e);  // side = m * 2^e with m in [0.5, 1)
  return m == 0.5 ? 1 - e : -e;
}

// A rectangle of aspect ratio at most k is padded like a square of its
// longer side.
inline int pad_rectangle(double w, double h, double aspect_bound) {
  if (!(w > 0.0) || w > 1.0 || !(h > 0.0) || h > 1.0)
    throw PreconditionViolated("rectangle sides must lie in (0, 1]");
  const double longer = w > h ? w : h;
  const double shorter = w < h ? w : h;
  if (longer > aspect_bound * shorter)
    throw AspectRatioExceeded("rectangle aspect ratio exceeds the configured bound");
  return pad_square(longer);
}

inline int pad_shape(const ModuleShape& s, double aspect_bound) {
  return pad_rectangle(s.width, s.height, aspect_bound);
}

struct UnderallocationReport {
  Dyadic allocated_pixel_volume;
  double module_area = 0.0;
  double factor = 1.0;  // u = allocated volume / true area, 1 when nothing is placed
};

// u over the currently placed modules. Padding guarantees u <= 4 for squares
// and u <= 4k for rectangles of aspect ratio at most k.
inline UnderallocationReport underallocation(const Configuration& c,
                                             const std::vector<std::pair<module_id, ModuleShape>>& placed) {
  UnderallocationReport r;
  for (const auto& [id, shape] : placed) {
    auto at = c.place_of(id);
    if (!at) throw UnknownModule("underallocation over a module that is not placed");
    r.allocated_pixel_volume += Dyadic::unit(at->layer());
    r.module_area += shape.area();
  }
  r.factor = r.module_area > 0.0 ? r.allocated_pixel_volume.to_double() / r.module_area : 1.0;
  return r;
}

}  // namespace qtalloc
