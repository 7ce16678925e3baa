#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "gdopsel/errors.hpp"
#include "gdopsel/geometry.hpp"
#include "gdopsel/measurement.hpp"
#include "gdopsel/prs.hpp"
#include "gdopsel/scenario.hpp"

namespace gdopsel {

struct ChannelConfig {
  double reflection_coeff = 0.3;  ///< amplitude loss per scatterer bounce
};

struct Path {
  double delay_s = 0.0;
  std::complex<double> gain;      ///< free-space amplitude with carrier phase
  double departure_az_rad = 0.0;  ///< global frame, at the station
  double arrival_az_rad = 0.0;    ///< global frame, at the UE
  bool los = false;
};

struct PathSet {
  int bs_id = 0;
  std::vector<Path> paths;  ///< LOS first when present, then scatterer paths in scenario order
};

/// Geometric multipath between one station and the UE: a direct path when
/// the station is flagged LOS plus one single-bounce path per scatterer
/// (mirror-like, constant reflection loss). Amplitudes follow free space
/// over the total unfolded length; phases are deterministic in the path
/// length at the carrier.
inline PathSet build_paths(const BaseStation& bs, const Scenario& sc, const PrsConfig& prs,
                           const ChannelConfig& ch = {}) {
  const double lambda = kSpeedOfLightMps / prs.carrier_hz;
  const double d = distance(bs.position, sc.ue);
  if (d < 1e-6) throw singularity_error("build_paths: UE coincides with the station");

  auto path_gain = [&](double length, double reflect) {
    const double amp = reflect * lambda / (4.0 * kPi * length);
    const double phase = -kTwoPi * prs.carrier_hz * (length / kSpeedOfLightMps);
    return std::polar(amp, phase);
  };

  PathSet out;
  out.bs_id = bs.id;
  if (sc.is_los(bs.id)) {
    Path p;
    p.delay_s = d / kSpeedOfLightMps;
    p.gain = path_gain(d, 1.0);
    p.departure_az_rad = azimuth(bs.position, sc.ue);
    p.arrival_az_rad = azimuth(sc.ue, bs.position);
    p.los = true;
    out.paths.push_back(p);
  }
  for (const Point2& s : sc.scatterers) {
    const double d1 = distance(bs.position, s);
    const double d2 = distance(s, sc.ue);
    if (d1 < 1e-6 || d2 < 1e-6) continue;  // degenerate bounce, skip
    Path p;
    p.delay_s = (d1 + d2) / kSpeedOfLightMps;
    p.gain = path_gain(d1 + d2, ch.reflection_coeff);
    p.departure_az_rad = azimuth(bs.position, s);
    p.arrival_az_rad = azimuth(sc.ue, s);
    p.los = false;
    out.paths.push_back(p);
  }
  return out;
}

}  // namespace gdopsel
