#include "nvx/spectra.hpp"

#include "nvx/error.hpp"
#include "nvx/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

namespace nvx {

namespace {

struct LineKey {
  Orientation o;
  Branch br;
  double mi_u;
  double mi_l;

  friend bool operator<(const LineKey& a, const LineKey& b) {
    if (a.o != b.o) return a.o < b.o;
    if (a.br != b.br) return a.br < b.br;
    if (a.mi_u != b.mi_u) return a.mi_u > b.mi_u;  // +I first
    return a.mi_l > b.mi_l;
  }
  friend bool operator==(const LineKey& a, const LineKey& b) {
    return a.o == b.o && a.br == b.br && a.mi_u == b.mi_u && a.mi_l == b.mi_l;
  }
};

LineKey key_of(const TransitionLine& l) {
  return {l.orientation, l.branch, l.mi_upper, l.mi_lower};
}

std::string key_string(const LineKey& k, Isotope iso) {
  std::string s = std::string(name(k.o)) + "." + name(k.br);
  if (nuclear_dim(iso) > 1) {
    s += ".mI=" + fmt(k.mi_u);
    if (k.mi_u != k.mi_l) s += "/" + fmt(k.mi_l);
  }
  return s;
}

std::optional<double> line_freq(const OdmrScan& scan, const LineKey& key,
                                double b_perp) {
  FieldPoint fp{scan.b_par_mt, b_perp, scan.background_mt};
  for (const TransitionLine& l :
       transition_lines(key.o, fp, scan.constants, scan.iso)) {
    if (l.branch == key.br && std::abs(l.mi_upper - key.mi_u) < 1e-9 &&
        std::abs(l.mi_lower - key.mi_l) < 1e-9)
      return l.freq_mhz;
  }
  return std::nullopt;
}

}  // namespace

const char* name(Branch b) { return b == Branch::plus ? "plus" : "minus"; }

std::vector<TransitionLine> transition_lines(Orientation o,
                                             const FieldPoint& fp,
                                             const PhysicalConstants& c,
                                             Isotope iso) {
  const EigenSystem es =
      eigensystem(single_nv_hamiltonian(o, resolve_field(fp), c, iso));
  const int n = static_cast<int>(es.values.size());

  std::vector<TransitionLine> lines;
  for (int lo = 0; lo < n; ++lo) {
    const LevelLabel ll = nv_level_label(es, lo, iso);
    if (ll.ms != 0.0) continue;
    for (int up = 0; up < n; ++up) {
      const LevelLabel ul = nv_level_label(es, up, iso);
      if (ul.ms == 0.0) continue;
      const bool ambiguous = ll.ambiguous || ul.ambiguous;
      if (ul.mi != ll.mi && !ambiguous) continue;
      TransitionLine line;
      line.orientation = o;
      line.branch = ul.ms > 0.0 ? Branch::plus : Branch::minus;
      line.mi_upper = ul.mi;
      line.mi_lower = ll.mi;
      line.freq_mhz = es.values[up] - es.values[lo];
      line.field = fp;
      line.ambiguous = ambiguous;
      if (line.freq_mhz <= 0.0)
        throw NumericError("non-positive transition frequency");
      lines.push_back(line);
    }
  }
  std::sort(lines.begin(), lines.end(),
            [](const TransitionLine& a, const TransitionLine& b) {
              return key_of(a) < key_of(b);
            });
  return lines;
}

OdmrScan odmr_map(const std::vector<Orientation>& orientations,
                  double b_par_mt, const std::vector<double>& b_perp_grid_mt,
                  const PhysicalConstants& c, Isotope iso,
                  const Vec3& background_mt) {
  OdmrScan scan;
  scan.b_par_mt = b_par_mt;
  scan.background_mt = background_mt;
  scan.b_perp_grid_mt = b_perp_grid_mt;
  scan.orientations = orientations;
  scan.constants = c;
  scan.iso = iso;
  scan.rows.reserve(b_perp_grid_mt.size());
  for (double bp : b_perp_grid_mt) {
    std::vector<TransitionLine> row;
    for (Orientation o : orientations) {
      FieldPoint fp{b_par_mt, bp, background_mt};
      auto lines = transition_lines(o, fp, c, iso);
      row.insert(row.end(), lines.begin(), lines.end());
    }
    scan.rows.push_back(std::move(row));
  }
  return scan;
}

std::vector<DegeneracyEvent> find_degeneracies(const OdmrScan& scan,
                                               double gap_tolerance_mhz) {
  if (gap_tolerance_mhz <= 0.0)
    throw ValidationError("gap tolerance must be positive");
  const auto& grid = scan.b_perp_grid_mt;
  const int npts = static_cast<int>(grid.size());
  if (npts < 3) throw ValidationError("degeneracy search needs >= 3 grid points");

  // Per-key frequency series over the grid.
  std::map<LineKey, std::vector<std::optional<double>>> series;
  for (int i = 0; i < npts; ++i)
    for (const TransitionLine& l : scan.rows[i]) {
      auto& v = series[key_of(l)];
      v.resize(npts);
      v[i] = l.freq_mhz;
    }
  for (auto& [k, v] : series) v.resize(npts);

  struct RawEvent {
    double b, gap, freq;
    int pair_id;
  };
  std::vector<RawEvent> raw;
  std::vector<std::pair<LineKey, LineKey>> pair_keys;

  auto gap_at = [&](const LineKey& k1, const LineKey& k2,
                    double b) -> std::optional<double> {
    auto f1 = line_freq(scan, k1, b);
    auto f2 = line_freq(scan, k2, b);
    if (!f1 || !f2) return std::nullopt;
    return *f1 - *f2;
  };

  auto record = [&](const LineKey& k1, const LineKey& k2, double b,
                    double gap) {
    auto f = line_freq(scan, k1, b);
    if (!f) f = line_freq(scan, k2, b);
    if (!f) return;
    int id = -1;
    for (std::size_t p = 0; p < pair_keys.size(); ++p)
      if (pair_keys[p].first == k1 && pair_keys[p].second == k2)
        id = static_cast<int>(p);
    if (id < 0) {
      id = static_cast<int>(pair_keys.size());
      pair_keys.emplace_back(k1, k2);
    }
    for (const RawEvent& e : raw)
      if (e.pair_id == id && std::abs(e.b - b) < 1e-3) return;  // duplicate
    raw.push_back({b, gap, *f, id});
  };

  for (auto it1 = series.begin(); it1 != series.end(); ++it1) {
    for (auto it2 = std::next(it1); it2 != series.end(); ++it2) {
      const LineKey& k1 = it1->first;
      const LineKey& k2 = it2->first;
      const auto& f1 = it1->second;
      const auto& f2 = it2->second;

      std::vector<std::optional<double>> d(npts);
      for (int i = 0; i < npts; ++i)
        if (f1[i] && f2[i]) d[i] = *f1[i] - *f2[i];

      for (int i = 0; i + 1 < npts; ++i) {
        if (!d[i] || !d[i + 1]) continue;
        const double d0 = *d[i], d1 = *d[i + 1];
        if (d0 == 0.0 || d0 * d1 < 0.0) {
          // Bisect the sign change against the continuous model.
          double lo = grid[i], hi = grid[i + 1];
          double glo = d0;
          for (int iter = 0; iter < 60 && hi - lo > 1e-4; ++iter) {
            const double mid = 0.5 * (lo + hi);
            auto gm = gap_at(k1, k2, mid);
            if (!gm) break;
            if (glo == 0.0 || glo * *gm <= 0.0) {
              hi = mid;
            } else {
              lo = mid;
              glo = *gm;
            }
          }
          const double b = 0.5 * (lo + hi);
          auto g = gap_at(k1, k2, b);
          const double gap = g ? std::abs(*g) : std::abs(d0);
          if (gap <= gap_tolerance_mhz) record(k1, k2, b, gap);
        }
      }

      // Closest approaches without a sign change.
      for (int i = 1; i + 1 < npts; ++i) {
        if (!d[i - 1] || !d[i] || !d[i + 1]) continue;
        const double a0 = std::abs(*d[i - 1]);
        const double a1 = std::abs(*d[i]);
        const double a2 = std::abs(*d[i + 1]);
        if (a1 > a0 || a1 > a2) continue;
        if (*d[i - 1] * *d[i + 1] < 0.0) continue;  // handled as sign change
        if (a1 > 5.0 * gap_tolerance_mhz) continue;
        // Golden-section minimum of |f1 - f2| on [grid[i-1], grid[i+1]].
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        double lo = grid[i - 1], hi = grid[i + 1];
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        auto eval = [&](double b) {
          auto g = gap_at(k1, k2, b);
          return g ? std::abs(*g) : std::numeric_limits<double>::infinity();
        };
        double v1 = eval(x1), v2 = eval(x2);
        for (int iter = 0; iter < 80 && hi - lo > 1e-4; ++iter) {
          if (v1 <= v2) {
            hi = x2;
            x2 = x1;
            v2 = v1;
            x1 = hi - gr * (hi - lo);
            v1 = eval(x1);
          } else {
            lo = x1;
            x1 = x2;
            v1 = v2;
            x2 = lo + gr * (hi - lo);
            v2 = eval(x2);
          }
        }
        const double b = 0.5 * (lo + hi);
        const double gap = std::min(eval(b), std::min(v1, v2));
        if (gap <= gap_tolerance_mhz) record(k1, k2, b, gap);
      }
    }
  }

  // Merge raw events that coincide in field and frequency.
  std::sort(raw.begin(), raw.end(),
            [](const RawEvent& a, const RawEvent& b) { return a.b < b.b; });
  struct Cluster {
    double b, gap, freq;
    std::vector<int> pairs;
  };
  std::vector<Cluster> clusters;
  for (const RawEvent& e : raw) {
    Cluster* home = nullptr;
    for (Cluster& c : clusters)
      if (std::abs(e.b - c.b) <= 0.005 && std::abs(e.freq - c.freq) <= 10.0) {
        home = &c;
        break;
      }
    if (!home) {
      clusters.push_back({e.b, e.gap, e.freq, {e.pair_id}});
    } else {
      home->pairs.push_back(e.pair_id);
      if (e.gap < home->gap) {
        home->gap = e.gap;
        home->b = e.b;
        home->freq = e.freq;
      }
    }
  }

  std::vector<DegeneracyEvent> events;
  for (const Cluster& c : clusters) {
    DegeneracyEvent ev;
    ev.b_perp_mt = c.b;
    ev.min_gap_mhz = c.gap;
    ev.freq_mhz = c.freq;
    std::vector<int> ids = c.pairs;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    ev.multiplicity = static_cast<int>(ids.size());
    for (int id : ids)
      ev.participants.push_back(key_string(pair_keys[id].first, scan.iso) +
                                "&" +
                                key_string(pair_keys[id].second, scan.iso));
    events.push_back(std::move(ev));
  }
  std::sort(events.begin(), events.end(),
            [](const DegeneracyEvent& a, const DegeneracyEvent& b) {
              return a.b_perp_mt < b.b_perp_mt;
            });
  return events;
}

double hyperfine_spacing_mt(double a_n_mhz, double alpha_rad,
                            const PhysicalConstants& c) {
  if (std::abs(alpha_rad) >= std::acos(-1.0) / 2.0)
    throw ValidationError("grazing angle: scanned axis has no projection");
  return std::abs(a_n_mhz) / (c.gamma_e_mhz_per_mt * std::cos(alpha_rad));
}

}  // namespace nvx
