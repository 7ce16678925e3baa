#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <ostream>
#include <string>
#include <vector>

#include "gdopsel/errors.hpp"
#include "gdopsel/geometry.hpp"
#include "gdopsel/rng.hpp"
#include "gdopsel/scenario.hpp"

namespace gdopsel {

inline constexpr double kSpeedOfLightMps = 299792458.0;

enum class ToaBackend { abstract_model, signal };

struct ToaEntry {
  int bs_id = 0;
  double toa_s = 0.0;
};

/// Per-station PRS arrival times. Entries ascend by station id; stations a
/// backend failed to detect are simply absent.
struct ToaSet {
  ToaBackend backend = ToaBackend::abstract_model;
  std::vector<ToaEntry> entries;

  bool has(int bs_id) const {
    for (const auto& e : entries)
      if (e.bs_id == bs_id) return true;
    return false;
  }

  double toa_s(int bs_id) const {
    for (const auto& e : entries)
      if (e.bs_id == bs_id) return e.toa_s;
    throw lookup_error("toa set: no entry for bs id " + std::to_string(bs_id));
  }

  double range_m(int bs_id) const { return kSpeedOfLightMps * toa_s(bs_id); }

  /// FNV-1a over the raw entry bytes; used to assert that every strategy in
  /// a trial consumed the identical measurement set.
  std::uint64_t hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const void* p, std::size_t n) {
      const auto* b = static_cast<const unsigned char*>(p);
      for (std::size_t i = 0; i < n; ++i) {
        h ^= b[i];
        h *= 1099511628211ULL;
      }
    };
    for (const auto& e : entries) {
      mix(&e.bs_id, sizeof e.bs_id);
      mix(&e.toa_s, sizeof e.toa_s);
    }
    return h;
  }

  void to_csv(std::ostream& os) const {
    os << "bs_id,toa_s,range_m\n";
    char buf[96];
    for (const auto& e : entries) {
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", e.bs_id, e.toa_s,
                    kSpeedOfLightMps * e.toa_s);
      os << buf;
    }
  }
};

/// Abstract ranging-error model: zero-mean Gaussian on LOS ranges plus a
/// positive exponential excess range on NLOS ones.
struct NoiseModel {
  double sigma_tdoa_m = 0.3;      ///< std of the LOS ranging error
  double nlos_bias_mean_m = 2.0;  ///< mean of the NLOS excess range
};

/// Draw one arrival time per station: c*t_i = d_i + n_i (+ b_i for NLOS),
/// n_i ~ N(0, sigma) clamped at -3 sigma, b_i >= 0 exponential. Errors are
/// independent across stations.
inline ToaSet simulate_toa_abstract(const Scenario& sc, const NoiseModel& noise,
                                    std::uint64_t seed) {
  if (noise.sigma_tdoa_m < 0.0)
    throw std::invalid_argument("simulate_toa_abstract: sigma_tdoa must be >= 0");
  if (noise.nlos_bias_mean_m < 0.0)
    throw std::invalid_argument("simulate_toa_abstract: nlos_bias_mean must be >= 0");

  Rng rng(seed);
  ToaSet out;
  out.backend = ToaBackend::abstract_model;
  out.entries.reserve(sc.bss.size());
  for (const auto& b : sc.bss) {
    const double d = distance(b.position, sc.ue);
    double err = 0.0;
    if (noise.sigma_tdoa_m > 0.0)
      err = std::max(noise.sigma_tdoa_m * rng.normal(), -3.0 * noise.sigma_tdoa_m);
    if (!sc.is_los(b.id)) err += rng.exponential(noise.nlos_bias_mean_m);
    out.entries.push_back({b.id, (d + err) / kSpeedOfLightMps});
  }
  return out;
}

struct TdoaEntry {
  int bs_id = 0;
  double range_diff_m = 0.0;  ///< c (t_i - t_ref)
};

/// Reference-relative range differences; entries ascend by station id and
/// exclude the reference itself.
struct TdoaVector {
  int reference_id = 0;
  std::vector<TdoaEntry> entries;

  double value(int bs_id) const {
    for (const auto& e : entries)
      if (e.bs_id == bs_id) return e.range_diff_m;
    throw lookup_error("tdoa vector: no entry for bs id " + std::to_string(bs_id));
  }

  /// Reference id followed by the entry ids.
  std::vector<int> used_ids() const {
    std::vector<int> out{reference_id};
    for (const auto& e : entries) out.push_back(e.bs_id);
    return out;
  }

  void to_csv(std::ostream& os) const {
    os << "bs_id,range_diff_m\n";
    char buf[64];
    for (const auto& e : entries) {
      std::snprintf(buf, sizeof buf, "%d,%.17g\n", e.bs_id, e.range_diff_m);
      os << buf;
    }
  }
};

inline TdoaVector tdoa_from_toa(const ToaSet& toas, int reference_id,
                                const std::vector<int>& used_ids) {
  if (used_ids.size() < 2)
    throw std::invalid_argument("tdoa_from_toa: need at least two stations");
  if (std::find(used_ids.begin(), used_ids.end(), reference_id) == used_ids.end())
    throw std::invalid_argument("tdoa_from_toa: reference id not in used set");

  const double t_ref = toas.toa_s(reference_id);
  std::vector<int> ids = used_ids;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  TdoaVector out;
  out.reference_id = reference_id;
  for (int id : ids) {
    if (id == reference_id) continue;
    out.entries.push_back({id, kSpeedOfLightMps * (toas.toa_s(id) - t_ref)});
  }
  return out;
}

/// Station id -> position lookup detached from any particular Scenario, so
/// synthetic geometries can drive the solver directly.
class PositionTable {
 public:
  PositionTable() = default;

  static PositionTable from_scenario(const Scenario& sc) {
    PositionTable t;
    for (const auto& b : sc.bss) t.add(b.id, b.position);
    return t;
  }

  void add(int id, Point2 p) { items_.push_back({id, p}); }

  const Point2& at(int id) const {
    for (const auto& [i, p] : items_)
      if (i == id) return p;
    throw lookup_error("position table: unknown bs id " + std::to_string(id));
  }

  bool has(int id) const {
    for (const auto& [i, p] : items_)
      if (i == id) return true;
    return false;
  }

  std::size_t size() const { return items_.size(); }

 private:
  std::vector<std::pair<int, Point2>> items_;
};

inline constexpr double kSingularDistance = 1e-9;

/// Per-measurement error of the TDOA model at candidate position x:
/// component i is r_i - (d_i(x) - d_ref(x)), in entry order.
inline std::vector<double> range_residuals(const Point2& x, const TdoaVector& tdoa,
                                           const PositionTable& positions) {
  const double d_ref = distance(x, positions.at(tdoa.reference_id));
  if (d_ref < kSingularDistance)
    throw singularity_error("range_residuals: x coincides with the reference station");
  std::vector<double> out;
  out.reserve(tdoa.entries.size());
  for (const auto& e : tdoa.entries) {
    const double d_i = distance(x, positions.at(e.bs_id));
    if (d_i < kSingularDistance)
      throw singularity_error("range_residuals: x coincides with station " +
                              std::to_string(e.bs_id));
    out.push_back(e.range_diff_m - (d_i - d_ref));
  }
  return out;
}

inline std::vector<double> range_residuals(const Point2& x, const TdoaVector& tdoa,
                                           const Scenario& sc) {
  return range_residuals(x, tdoa, PositionTable::from_scenario(sc));
}

}  // namespace gdopsel
