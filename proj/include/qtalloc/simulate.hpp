#pragma once

#include <algorithm>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "qtalloc/configuration.hpp"
#include "qtalloc/defrag.hpp"
#include "qtalloc/first_fit.hpp"
#include "qtalloc/requests.hpp"
#include "qtalloc/shapes.hpp"

namespace qtalloc {

enum class Outcome : std::uint8_t { placed, collision, deleted };

inline const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::placed:
      return "placed";
    case Outcome::collision:
      return "collision";
    default:
      return "deleted";
  }
}

struct SeriesRow {
  int index = 0;  // 1-based request index
  Op op = Op::insert;
  int layer = 0;  // padded layer of the request
  Outcome outcome = Outcome::placed;
  std::size_t live_count = 0;
  double live_area = 0.0;
  Dyadic alloc_volume;
  double u = 1.0;       // underallocation factor, in [1, 4k]
  double u_mean = 1.0;  // running mean of u over rows so far
  std::uint64_t moves = 0;
  Dyadic total_volume;
  double rel_volume = 0.0;
};

struct TimeSeries {
  std::vector<SeriesRow> rows;
};

struct SummaryStats {
  std::uint64_t collisions = 0;
  double final_u = 1.0;
  double mean_u = 1.0;
  std::uint64_t max_moves = 0;
  double max_total_volume = 0.0;
  double max_rel_volume = 0.0;
};

struct RunResult {
  TimeSeries series;
  SummaryStats summary;
};

// Drives a request sequence against the chosen strategy. Collisions (an
// insert the strategy cannot place, including requests padded below the
// depth limit) are counted and skipped, leaving the configuration
// unchanged. In checked mode the full structural self-check plus the
// strategy's invariants run after every request.
inline RunResult drive(const RequestSequence& seq, const ScenarioConfig& sc, bool checked) {
  RunResult out;
  Configuration cfg;
  std::map<module_id, ModuleShape> live;
  double u_sum = 0.0;
  for (std::size_t i = 0; i < seq.items.size(); ++i) {
    const Request& r = seq.items[i];
    SeriesRow row;
    row.index = static_cast<int>(i) + 1;
    row.op = r.op;
    CostLedger ledger;
    if (r.op == Op::insert) {
      const int layer = pad_shape(r.shape, sc.k);
      row.layer = layer;
      bool placed = false;
      if (layer <= cfg.max_depth()) {
        if (sc.strategy == Strategy::first_fit)
          placed = ff_insert(cfg, r.id, layer).has_value();
        else
          placed = insert_with_defrag(cfg, r.id, layer, ledger).has_value();
      }
      if (placed) {
        live.emplace(r.id, r.shape);
        row.outcome = Outcome::placed;
      } else {
        row.outcome = Outcome::collision;
        ++out.summary.collisions;
      }
    } else {
      auto it = live.find(r.id);
      if (it == live.end()) throw MalformedSequence("delete of a module that is not live");
      row.layer = cfg.place_of(r.id)->layer();
      if (sc.strategy == Strategy::first_fit)
        ff_delete(cfg, r.id, ledger);
      else
        cfg.unassign(r.id);
      live.erase(it);
      row.outcome = Outcome::deleted;
    }
    row.live_count = live.size();
    double area = 0.0;
    for (const auto& [id, shape] : live) area += shape.area();
    row.live_area = area;
    row.alloc_volume = cfg.assigned_volume();
    row.u = area > 0.0 ? row.alloc_volume.to_double() / area : 1.0;
    u_sum += row.u;
    row.u_mean = u_sum / static_cast<double>(i + 1);
    row.moves = ledger.moves;
    row.total_volume = ledger.total_volume;
    row.rel_volume = ledger.relative_volume().to_double();
    out.series.rows.push_back(row);

    out.summary.max_moves = std::max(out.summary.max_moves, row.moves);
    out.summary.max_total_volume = std::max(out.summary.max_total_volume, row.total_volume.to_double());
    out.summary.max_rel_volume = std::max(out.summary.max_rel_volume, row.rel_volume);
    out.summary.final_u = row.u;
    out.summary.mean_u = row.u_mean;

    if (checked) {
      cfg.validate();
      if (sc.strategy == Strategy::first_fit) {
        if (!invariant_check(cfg)) throw Error("first-fit invariant violated");
        if (!cfg.is_compact()) throw Error("first-fit configuration not compact");
        std::array<int, kMaxPathDepth + 1> per_layer{};
        for (const auto& p : cfg.maximally_empty_pixels())
          if (++per_layer[static_cast<std::size_t>(p.layer())] > 3)
            throw Error("more than three maximally empty pixels in a layer");
      }
    }
  }
  return out;
}

inline RunResult run(const ScenarioConfig& sc, bool checked) {
  return drive(generate(sc), sc, checked);
}

// Default checked mode: on at desk scale, opt-in beyond.
inline bool default_checked(const ScenarioConfig& sc) { return sc.n_requests <= 1000; }

inline const char* kSeriesCsvHeader =
    "request_index,op,layer,outcome,live_count,live_area,alloc_volume,u,u_mean,moves,"
    "total_volume,rel_volume";

inline void export_csv(const TimeSeries& series, std::ostream& out) {
  if (series.rows.empty()) throw IoFailure("refusing to export an empty series");
  out << kSeriesCsvHeader << '\n';
  for (const SeriesRow& r : series.rows) {
    out << r.index << ',' << op_name(r.op) << ',' << r.layer << ',' << outcome_name(r.outcome)
        << ',' << r.live_count << ',' << num_str(r.live_area) << ','
        << num_str(r.alloc_volume.to_double()) << ',' << num_str(r.u) << ',' << num_str(r.u_mean)
        << ',' << r.moves << ',' << num_str(r.total_volume.to_double()) << ','
        << num_str(r.rel_volume) << '\n';
  }
}

inline void write_summary(const SummaryStats& s, std::ostream& out) {
  out << "collisions: " << s.collisions << '\n';
  out << "final_u: " << num_str(s.final_u) << '\n';
  out << "mean_u: " << num_str(s.mean_u) << '\n';
  out << "max_moves: " << s.max_moves << '\n';
  out << "max_total_volume: " << num_str(s.max_total_volume) << '\n';
  out << "max_rel_volume: " << num_str(s.max_rel_volume) << '\n';
}

namespace detail {

inline std::string fixed2(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
  return std::string(buf, p);
}

}  // namespace detail

// u per request (red) and its running mean (green) against the request
// index, with a horizontal reference line at the worst-case factor 4k.
inline void export_plot(const TimeSeries& series, double aspect_bound, std::ostream& out) {
  if (series.rows.empty()) throw IoFailure("refusing to plot an empty series");
  const double w = 840.0, h = 560.0;
  const double ml = 70.0, mr = 25.0, mt = 30.0, mb = 55.0;
  const double pw = w - ml - mr, ph = h - mt - mb;
  const double worst = 4.0 * aspect_bound;
  double umax = worst;
  for (const SeriesRow& r : series.rows) umax = std::max(umax, std::max(r.u, r.u_mean));
  umax *= 1.08;
  const double n = static_cast<double>(series.rows.size());
  auto X = [&](double i) { return ml + pw * i / n; };
  auto Y = [&](double u) { return mt + ph * (1.0 - u / umax); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
  out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
      << mt + ph << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
      << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double i = n * t / 4.0;
    out << "<text x=\"" << detail::fixed2(X(i)) << "\" y=\"" << mt + ph + 20
        << "\" font-size=\"12\" text-anchor=\"middle\">" << static_cast<int>(i) << "</text>\n";
  }
  for (int t = 0; t <= 4; ++t) {
    const double u = umax * t / 4.0;
    out << "<text x=\"" << ml - 8 << "\" y=\"" << detail::fixed2(Y(u) + 4)
        << "\" font-size=\"12\" text-anchor=\"end\">" << detail::fixed2(u) << "</text>\n";
  }
  out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << h - 12
      << "\" font-size=\"13\" text-anchor=\"middle\">request index</text>\n";
  out << "<text x=\"18\" y=\"" << mt + ph / 2
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << mt + ph / 2
      << ")\">underallocation factor u</text>\n";
  // 4k reference
  out << "<line x1=\"" << ml << "\" y1=\"" << detail::fixed2(Y(worst)) << "\" x2=\"" << ml + pw
      << "\" y2=\"" << detail::fixed2(Y(worst))
      << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
  out << "<text x=\"" << ml + pw - 4 << "\" y=\"" << detail::fixed2(Y(worst) - 6)
      << "\" font-size=\"12\" text-anchor=\"end\" fill=\"gray\">4k = " << detail::fixed2(worst)
      << "</text>\n";
  auto polyline = [&](const char* color, auto&& value) {
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.4\" points=\"";
    for (std::size_t i = 0; i < series.rows.size(); ++i) {
      if (i) out << ' ';
      out << detail::fixed2(X(static_cast<double>(i + 1))) << ','
          << detail::fixed2(Y(value(series.rows[i])));
    }
    out << "\"/>\n";
  };
  polyline("red", [](const SeriesRow& r) { return r.u; });
  polyline("green", [](const SeriesRow& r) { return r.u_mean; });
  out << "<text x=\"" << ml + 10 << "\" y=\"" << mt + 16
      << "\" font-size=\"12\" fill=\"red\">u</text>\n";
  out << "<text x=\"" << ml + 30 << "\" y=\"" << mt + 16
      << "\" font-size=\"12\" fill=\"green\">mean u</text>\n";
  out << "</svg>\n";
}

}  // namespace qtalloc
