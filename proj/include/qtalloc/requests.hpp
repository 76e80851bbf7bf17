#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qtalloc/dyadic.hpp"
#include "qtalloc/errors.hpp"
#include "qtalloc/pixel_path.hpp"
#include "qtalloc/shapes.hpp"

namespace qtalloc {

// Portable deterministic generator: xorshift64* seeded through splitmix64.
// Update equations (documented in the README so sequences can be reproduced
// in any language):
//   x ^= x >> 12;  x ^= x << 25;  x ^= x >> 27;  output = x * 2685821657736338717
struct XorShift64Star {
  std::uint64_t state;

  explicit XorShift64Star(std::uint64_t seed) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    state = z != 0 ? z : 0x9E3779B97F4A7C15ull;
  }

  std::uint64_t next() {
    std::uint64_t x = state;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state = x;
    return x * 2685821657736338717ull;
  }

  // Uniform in [0, 1), 53 bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in (0, bound], never zero.
  double next_side(double bound) {
    return bound * static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(next_unit() * static_cast<double>(n));
  }
};

enum class Op : std::uint8_t { insert, remove };

inline const char* op_name(Op op) { return op == Op::insert ? "insert" : "delete"; }

struct Request {
  Op op = Op::insert;
  module_id id = 0;
  ModuleShape shape;  // meaningful for insertions only
};

struct RequestSequence {
  std::vector<Request> items;
};

// Signed request volume: +v for an insert, -v for a delete. Placement
// feasibility is what validity is used for here, so v is the padded pixel
// volume 4^-layer; the raw w*h area only enters the underallocation metric.
// Deletes must carry the shape of the module they remove.
inline Dyadic request_volume(const Request& r) {
  const Dyadic v = Dyadic::unit(pad_square(r.shape.longer_side()));
  return r.op == Op::insert ? v : -v;
}

struct ValidityReport {
  bool valid = true;
  std::optional<std::size_t> first_violation;  // 0-based request index
};

// Prefix volume sums must never exceed the unit square. Deleting an id that
// is not live makes the sequence malformed, as does reusing an id.
inline ValidityReport validate_sequence(const RequestSequence& seq) {
  ValidityReport rep;
  Dyadic volume;
  std::vector<std::pair<module_id, int>> live;  // id -> padded layer
  std::vector<module_id> ever;
  for (std::size_t i = 0; i < seq.items.size(); ++i) {
    const Request& r = seq.items[i];
    if (r.op == Op::insert) {
      for (module_id id : ever)
        if (id == r.id) throw MalformedSequence("insert reuses a module id");
      ever.push_back(r.id);
      int layer = pad_square(r.shape.longer_side());
      live.emplace_back(r.id, layer);
      volume += Dyadic::unit(layer);
    } else {
      bool found = false;
      for (auto it = live.begin(); it != live.end(); ++it) {
        if (it->first == r.id) {
          volume -= Dyadic::unit(it->second);
          live.erase(it);
          found = true;
          break;
        }
      }
      if (!found) throw MalformedSequence("delete of an id that is not live");
    }
    if (rep.valid && volume > Dyadic::one()) {
      rep.valid = false;
      rep.first_violation = i;
    }
  }
  return rep;
}

inline bool is_valid(const RequestSequence& seq) { return validate_sequence(seq).valid; }

// Aligned: every request's shape is a square whose side is a power of two,
// i.e. every |vol| is a power of 1/4.
inline bool is_aligned(const RequestSequence& seq) {
  for (const Request& r : seq.items) {
    if (r.op != Op::insert) continue;
    if (r.shape.kind() != ShapeKind::aligned_square) return false;
  }
  return true;
}

enum class Strategy : std::uint8_t { first_fit, defrag_insert };

inline const char* strategy_name(Strategy s) {
  return s == Strategy::first_fit ? "first-fit" : "defrag-insert";
}

inline Strategy strategy_from_name(const std::string& s) {
  if (s == "first-fit") return Strategy::first_fit;
  if (s == "defrag-insert") return Strategy::defrag_insert;
  throw ParseError("unknown strategy: " + s);
}

struct ScenarioConfig {
  std::uint64_t seed = 1;
  int n_requests = 1000;
  double p_insert = 0.7;
  double b = 1.0;  // side-length bound, in (0, 1]
  double k = 1.0;  // aspect-ratio bound, >= 1
  Strategy strategy = Strategy::first_fit;
};

// Random workload: a coin picks insert (probability p_insert) or delete;
// insert draws width uniform in (0, b], a ratio uniform in [1, k], applies
// a random orientation, and clamps the longer side back to b. Deletes pick
// uniformly among live modules; a delete with nothing live becomes an
// insert. Draw order per request: coin, then width/ratio/orientation for
// inserts or the victim index for deletes.
inline RequestSequence generate(const ScenarioConfig& sc) {
  if (!(sc.p_insert > 0.0) || !(sc.p_insert < 1.0))
    throw PreconditionViolated("p_insert must lie in (0, 1)");
  if (!(sc.b > 0.0) || sc.b > 1.0) throw PreconditionViolated("b must lie in (0, 1]");
  if (sc.k < 1.0) throw PreconditionViolated("k must be at least 1");
  XorShift64Star rng(sc.seed);
  RequestSequence seq;
  seq.items.reserve(static_cast<std::size_t>(sc.n_requests));
  std::vector<std::pair<module_id, ModuleShape>> live;  // insertion order
  module_id next_id = 1;
  for (int i = 0; i < sc.n_requests; ++i) {
    bool insert = rng.next_unit() < sc.p_insert;
    if (!insert && live.empty()) insert = true;  // resample a dead delete as insert
    Request r;
    if (insert) {
      const double w = rng.next_side(sc.b);
      const double ratio = 1.0 + (sc.k - 1.0) * rng.next_unit();
      double longer = w * ratio;
      if (longer > sc.b) longer = sc.b;
      const bool swap = rng.next_unit() < 0.5;
      r.op = Op::insert;
      r.id = next_id++;
      r.shape = swap ? ModuleShape::rect(longer, w) : ModuleShape::rect(w, longer);
      live.emplace_back(r.id, r.shape);
    } else {
      const std::uint64_t idx = rng.next_below(live.size());
      r.op = Op::remove;
      r.id = live[static_cast<std::size_t>(idx)].first;
      r.shape = live[static_cast<std::size_t>(idx)].second;
      live.erase(live.begin() + static_cast<std::ptrdiff_t>(idx));
    }
    seq.items.push_back(r);
  }
  return seq;
}

// Shortest round-trip decimal rendering; identical input bits give
// identical text, which the byte-exact golden files rely on.
inline std::string num_str(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

inline std::string num_str(std::uint64_t v) { return std::to_string(v); }

// --- scenario files: flat "key = value" lines, '#' comments -------------

inline ScenarioConfig load_scenario(std::istream& in) {
  ScenarioConfig sc;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (eq == std::string::npos)
      throw ParseError("scenario line " + std::to_string(lineno) + ": expected key = value");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "seed")
        sc.seed = std::stoull(value);
      else if (key == "n_requests")
        sc.n_requests = std::stoi(value);
      else if (key == "p_insert")
        sc.p_insert = std::stod(value);
      else if (key == "b")
        sc.b = std::stod(value);
      else if (key == "k")
        sc.k = std::stod(value);
      else if (key == "strategy")
        sc.strategy = strategy_from_name(value);
      else
        throw ParseError("scenario line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw ParseError("scenario line " + std::to_string(lineno) + ": bad value for '" + key + "'");
    }
  }
  return sc;
}

inline void save_scenario(const ScenarioConfig& sc, std::ostream& out) {
  out << "seed = " << sc.seed << "\n";
  out << "n_requests = " << sc.n_requests << "\n";
  out << "p_insert = " << num_str(sc.p_insert) << "\n";
  out << "b = " << num_str(sc.b) << "\n";
  out << "k = " << num_str(sc.k) << "\n";
  out << "strategy = " << strategy_name(sc.strategy) << "\n";
}

// --- sequence CSV: index,op,id,width,height ------------------------------

inline void write_sequence_csv(const RequestSequence& seq, std::ostream& out) {
  out << "index,op,id,width,height\n";
  for (std::size_t i = 0; i < seq.items.size(); ++i) {
    const Request& r = seq.items[i];
    out << (i + 1) << ',' << op_name(r.op) << ',' << r.id << ','
        << num_str(r.shape.width) << ',' << num_str(r.shape.height) << '\n';
  }
}

inline RequestSequence read_sequence_csv(std::istream& in) {
  RequestSequence seq;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("sequence CSV is empty");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    while (cells.size() < 5) cells.emplace_back();
    if (cells.size() != 5)
      throw ParseError("sequence CSV line " + std::to_string(lineno) + ": expected 5 columns");
    Request r;
    if (cells[1] == "insert")
      r.op = Op::insert;
    else if (cells[1] == "delete")
      r.op = Op::remove;
    else
      throw ParseError("sequence CSV line " + std::to_string(lineno) + ": bad op");
    try {
      r.id = std::stoull(cells[2]);
      if (!cells[3].empty()) r.shape.width = std::stod(cells[3]);
      if (!cells[4].empty()) r.shape.height = std::stod(cells[4]);
    } catch (const std::exception&) {
      throw ParseError("sequence CSV line " + std::to_string(lineno) + ": bad number");
    }
    seq.items.push_back(r);
  }
  return seq;
}

}  // namespace qtalloc
