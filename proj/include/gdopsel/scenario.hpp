#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gdopsel/errors.hpp"
#include "gdopsel/geometry.hpp"
#include "gdopsel/rng.hpp"

namespace gdopsel {

struct BaseStation {
  int id = 0;  ///< 1-based; id 1 is the station nearest to the UE
  Point2 position;
  std::uint32_t cell_id = 0;  ///< physical-layer cell identity, seeds the PRS sequence
};

/// One deployment drop: stations, the UE, scatterers, the per-station LOS
/// map and the region everything lives in. Generators keep ids contiguous
/// from 1 and sorted by distance to the UE; subset() views relax that.
struct Scenario {
  std::vector<BaseStation> bss;  ///< ascending id
  Point2 ue;
  std::vector<Point2> scatterers;
  std::map<int, bool> los;  ///< bs id -> LOS flag
  Rect bounds;

  const BaseStation& bs(int id) const {
    for (const auto& b : bss)
      if (b.id == id) return b;
    throw lookup_error("scenario: unknown bs id " + std::to_string(id));
  }

  bool is_los(int id) const {
    auto it = los.find(id);
    if (it == los.end()) throw lookup_error("scenario: no LOS flag for bs id " + std::to_string(id));
    return it->second;
  }

  std::vector<int> ids() const {
    std::vector<int> out;
    out.reserve(bss.size());
    for (const auto& b : bss) out.push_back(b.id);
    return out;
  }

  std::vector<int> los_ids() const {
    std::vector<int> out;
    for (const auto& b : bss)
      if (is_los(b.id)) out.push_back(b.id);
    return out;
  }

  std::vector<int> nlos_ids() const {
    std::vector<int> out;
    for (const auto& b : bss)
      if (!is_los(b.id)) out.push_back(b.id);
    return out;
  }

  int n_los() const { return int(los_ids().size()); }
  int n_nlos() const { return int(bss.size()) - n_los(); }

  /// Same drop restricted to the given station ids (original ids retained).
  Scenario subset(const std::vector<int>& keep_ids) const {
    Scenario out;
    out.ue = ue;
    out.scatterers = scatterers;
    out.bounds = bounds;
    for (int id : keep_ids) {
      out.bss.push_back(bs(id));
      out.los[id] = is_los(id);
    }
    std::sort(out.bss.begin(), out.bss.end(),
              [](const BaseStation& a, const BaseStation& b) { return a.id < b.id; });
    return out;
  }
};

inline constexpr Rect kUmiBounds{0.0, 0.0, 600.0, 600.0};
inline constexpr Rect kIooBounds{0.0, 0.0, 120.0, 50.0};
inline constexpr int kMaxPlacementAttempts = 10000;

/// How LOS stations are chosen each drop.
///   nearest  blocking grows with distance: the n_los closest stations are
///            LOS (keeps the UE "surrounded" by its LOS set)
///   uniform  n_los station ids drawn uniformly at random
enum class LosModel { nearest, uniform };

namespace detail {

/// Renumber stations so id 1 is nearest to the UE and ids ascend with
/// distance (ties broken by the original placement index), then flag LOS
/// per the chosen model.
inline Scenario assemble_scenario(const std::vector<Point2>& bs_pos, Point2 ue,
                                  std::vector<Point2> scatterers, Rect bounds, int n_los,
                                  LosModel model, Rng& rng) {
  const int m = int(bs_pos.size());
  std::vector<int> order(m);
  for (int i = 0; i < m; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double da = distance(bs_pos[a], ue);
    const double db = distance(bs_pos[b], ue);
    if (da != db) return da < db;
    return a < b;
  });

  Scenario sc;
  sc.ue = ue;
  sc.scatterers = std::move(scatterers);
  sc.bounds = bounds;
  for (int rank = 0; rank < m; ++rank) {
    const int orig = order[rank];
    BaseStation b;
    b.id = rank + 1;
    b.position = bs_pos[orig];
    b.cell_id = std::uint32_t(orig);
    sc.bss.push_back(b);
    sc.los[b.id] = false;
  }

  if (model == LosModel::nearest) {
    for (int id = 1; id <= n_los; ++id) sc.los[id] = true;
  } else {
    for (int idx : sample_indices(rng, m, n_los)) sc.los[idx + 1] = true;
  }
  return sc;
}

}  // namespace detail

/// Random urban-microcell drop: m stations placed by rejection sampling with
/// a pairwise Chebyshev spacing of at least min_spacing, UE and scatterers
/// uniform in bounds, exactly n_los stations flagged LOS per the model.
inline Scenario gen_umi(std::uint64_t seed, int m, double min_spacing, Rect bounds,
                        int n_scatterers, int n_los, LosModel los_model = LosModel::nearest) {
  if (m < 4) throw std::invalid_argument("gen_umi: need at least 4 base stations");
  if (n_los < 1 || n_los > m) throw std::invalid_argument("gen_umi: n_los must be in [1, m]");
  if (n_scatterers < 0) throw std::invalid_argument("gen_umi: n_scatterers must be >= 0");
  if (!(bounds.width() > 0.0) || !(bounds.height() > 0.0))
    throw std::invalid_argument("gen_umi: empty bounds");

  Rng rng(seed);
  std::vector<Point2> pos;
  pos.reserve(m);
  for (int i = 0; i < m; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxPlacementAttempts; ++attempt) {
      const Point2 p{rng.uniform(bounds.min_x, bounds.max_x),
                     rng.uniform(bounds.min_y, bounds.max_y)};
      bool ok = true;
      for (const Point2& q : pos)
        if (chebyshev_distance(p, q) < min_spacing) {
          ok = false;
          break;
        }
      if (ok) {
        pos.push_back(p);
        placed = true;
        break;
      }
    }
    if (!placed)
      throw placement_error("gen_umi: station " + std::to_string(i + 1) + " not placeable after " +
                            std::to_string(kMaxPlacementAttempts) +
                            " attempts; bounds too tight for the requested spacing");
  }

  const Point2 ue{rng.uniform(bounds.min_x, bounds.max_x), rng.uniform(bounds.min_y, bounds.max_y)};
  std::vector<Point2> scat;
  scat.reserve(n_scatterers);
  for (int i = 0; i < n_scatterers; ++i)
    scat.push_back({rng.uniform(bounds.min_x, bounds.max_x), rng.uniform(bounds.min_y, bounds.max_y)});

  return detail::assemble_scenario(pos, ue, std::move(scat), bounds, n_los, los_model, rng);
}

/// Fixed indoor-open-office drop: 12 stations on the standard 120 m x 50 m
/// hall grid (x in {10,...,110} step 20, y in {15, 35}), UE and scatterers
/// uniform, n_los stations flagged LOS per the model.
inline Scenario gen_ioo(std::uint64_t seed, int n_scatterers, int n_los,
                        LosModel los_model = LosModel::nearest) {
  if (n_los < 1 || n_los > 12) throw std::invalid_argument("gen_ioo: n_los must be in [1, 12]");
  if (n_scatterers < 0) throw std::invalid_argument("gen_ioo: n_scatterers must be >= 0");

  std::vector<Point2> pos;
  for (int xi = 0; xi < 6; ++xi)
    for (int yi = 0; yi < 2; ++yi) pos.push_back({10.0 + 20.0 * xi, 15.0 + 20.0 * yi});

  const Rect bounds = kIooBounds;
  Rng rng(seed);
  const Point2 ue{rng.uniform(bounds.min_x, bounds.max_x), rng.uniform(bounds.min_y, bounds.max_y)};
  std::vector<Point2> scat;
  scat.reserve(n_scatterers);
  for (int i = 0; i < n_scatterers; ++i)
    scat.push_back({rng.uniform(bounds.min_x, bounds.max_x), rng.uniform(bounds.min_y, bounds.max_y)});

  return detail::assemble_scenario(pos, ue, std::move(scat), bounds, n_los, los_model, rng);
}

// --- plain-text serialization -------------------------------------------
//
// gdopsel-scenario v1
// bounds <min_x> <min_y> <max_x> <max_y>
// ue <x> <y>
// bs <id> <x> <y> <cell_id> <los 0|1>     (one line per station)
// scatterer <x> <y>                       (one line per scatterer)
//
// '#' starts a comment; doubles are printed with 17 significant digits so a
// round trip is bit exact.

namespace detail {
inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace detail

inline void write_scenario(const Scenario& sc, std::ostream& os) {
  using detail::fmt_g17;
  os << "gdopsel-scenario v1\n";
  os << "bounds " << fmt_g17(sc.bounds.min_x) << ' ' << fmt_g17(sc.bounds.min_y) << ' '
     << fmt_g17(sc.bounds.max_x) << ' ' << fmt_g17(sc.bounds.max_y) << '\n';
  os << "ue " << fmt_g17(sc.ue.x) << ' ' << fmt_g17(sc.ue.y) << '\n';
  for (const auto& b : sc.bss)
    os << "bs " << b.id << ' ' << fmt_g17(b.position.x) << ' ' << fmt_g17(b.position.y) << ' '
       << b.cell_id << ' ' << (sc.is_los(b.id) ? 1 : 0) << '\n';
  for (const auto& s : sc.scatterers)
    os << "scatterer " << fmt_g17(s.x) << ' ' << fmt_g17(s.y) << '\n';
}

inline void write_scenario(const Scenario& sc, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw io_error("write_scenario: cannot open " + path);
  write_scenario(sc, os);
  if (!os) throw io_error("write_scenario: write failed for " + path);
}

inline Scenario read_scenario(std::istream& is) {
  Scenario sc;
  bool have_header = false, have_bounds = false, have_ue = false;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (!have_header) {
      std::string version;
      ls >> version;
      if (tag != "gdopsel-scenario" || version != "v1")
        throw io_error("read_scenario: bad header line: " + line);
      have_header = true;
      continue;
    }
    if (tag == "bounds") {
      ls >> sc.bounds.min_x >> sc.bounds.min_y >> sc.bounds.max_x >> sc.bounds.max_y;
      have_bounds = bool(ls);
    } else if (tag == "ue") {
      ls >> sc.ue.x >> sc.ue.y;
      have_ue = bool(ls);
    } else if (tag == "bs") {
      BaseStation b;
      int los = 0;
      ls >> b.id >> b.position.x >> b.position.y >> b.cell_id >> los;
      if (!ls) throw io_error("read_scenario: bad bs line: " + line);
      if (sc.los.count(b.id)) throw io_error("read_scenario: duplicate bs id " + std::to_string(b.id));
      sc.bss.push_back(b);
      sc.los[b.id] = (los != 0);
      continue;
    } else if (tag == "scatterer") {
      Point2 s;
      ls >> s.x >> s.y;
      if (!ls) throw io_error("read_scenario: bad scatterer line: " + line);
      sc.scatterers.push_back(s);
      continue;
    } else {
      throw io_error("read_scenario: unknown tag '" + tag + "'");
    }
    if (!ls) throw io_error("read_scenario: bad line: " + line);
  }
  if (!have_header || !have_bounds || !have_ue || sc.bss.empty())
    throw io_error("read_scenario: incomplete scenario file");
  std::sort(sc.bss.begin(), sc.bss.end(),
            [](const BaseStation& a, const BaseStation& b) { return a.id < b.id; });
  return sc;
}

inline Scenario read_scenario(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw io_error("read_scenario: cannot open " + path);
  return read_scenario(is);
}

inline std::string to_string(const Scenario& sc) {
  std::ostringstream os;
  write_scenario(sc, os);
  return os.str();
}

}  // namespace gdopsel
