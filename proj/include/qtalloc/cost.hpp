#pragma once

#include <cstdint>
#include <vector>

#include "qtalloc/dyadic.hpp"
#include "qtalloc/pixel_path.hpp"

namespace qtalloc {

struct MoveRecord {
  module_id id;
  PixelPath from;
  PixelPath to;
};

// Accumulated reallocation cost of a single request: c_move is the number
// of squares moved, c_total the sum of their volumes, and c_vol the moved
// volume relative to the request's own volume.
struct CostLedger {
  std::uint64_t moves = 0;
  Dyadic total_volume;
  Dyadic request_volume;  // volume of the triggering request, 4^-i
  std::vector<MoveRecord> trace;

  void record(module_id id, const PixelPath& from, const PixelPath& to) {
    ++moves;
    total_volume += from.volume();
    trace.push_back({id, from, to});
  }

  // c_vol = c_total / |vol(request)|; defined only for request_volume > 0,
  // which is always a single pixel volume 4^-i here.
  Dyadic relative_volume() const {
    if (request_volume.is_zero()) return Dyadic::zero();
    assert(request_volume.mantissa() == 1);
    return total_volume.scaled_pow4(request_volume.exponent());
  }
};

}  // namespace qtalloc
