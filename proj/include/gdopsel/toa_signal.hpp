#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gdopsel/channel.hpp"
#include "gdopsel/errors.hpp"
#include "gdopsel/fft.hpp"
#include "gdopsel/measurement.hpp"
#include "gdopsel/ofdm.hpp"
#include "gdopsel/prs.hpp"
#include "gdopsel/rng.hpp"
#include "gdopsel/scenario.hpp"
#include "gdopsel/ura.hpp"

namespace gdopsel {

struct SweepConfig {
  UraConfig tx{8, 8, 0.5, 16};
  UraConfig rx{4, 4, 0.5, 8};
  double first_peak_threshold = 0.5;   ///< first-arrival rule: earliest peak >= this * global max
  double pair_power_floor_rel = 1e-6;  ///< pairs below best * this are excluded from the min-ToA set
  double detect_power_abs = 0.0;       ///< all pairs below this absolute floor -> detection failure
  std::optional<double> snr_db;        ///< per-pair receiver SNR; disengaged = noiseless
  ChannelConfig channel{};
};

struct BeamPairMeasurement {
  int tx_beam = 0;
  int rx_beam = 0;
  double power = 0.0;      ///< mean received sample power over the waveform span
  double toa_s = 0.0;      ///< first-arrival estimate with parabolic refinement
  double toa_raw_s = 0.0;  ///< integer-lag estimate
  bool usable = false;
};

struct BeamSweepReport {
  int bs_id = 0;
  std::vector<BeamPairMeasurement> pairs;  ///< tx-major order
  std::size_t best_pair_index = 0;         ///< highest received power
  double selected_toa_s = 0.0;             ///< min over usable pairs
  double selected_toa_raw_s = 0.0;
};

namespace detail {

/// First local maximum of |c| at or above threshold * global max within
/// [0, max_lag]; the global maximum itself always qualifies.
inline std::size_t first_peak_index(const std::vector<std::complex<double>>& c,
                                    std::size_t max_lag, double threshold) {
  std::size_t gmax_i = 0;
  double gmax = 0.0;
  for (std::size_t i = 0; i <= max_lag; ++i) {
    const double m = std::abs(c[i]);
    if (m > gmax) {
      gmax = m;
      gmax_i = i;
    }
  }
  const double th = threshold * gmax;
  for (std::size_t i = 1; i < max_lag; ++i) {
    const double m = std::abs(c[i]);
    if (m >= th && m >= std::abs(c[i - 1]) && m >= std::abs(c[i + 1])) return i;
  }
  return gmax_i;
}

/// Three-point parabolic offset of the peak at i, clamped to half a sample.
inline double parabolic_offset(const std::vector<std::complex<double>>& c, std::size_t i) {
  if (i == 0 || i + 1 >= c.size()) return 0.0;
  const double y0 = std::abs(c[i - 1]);
  const double y1 = std::abs(c[i]);
  const double y2 = std::abs(c[i + 1]);
  const double denom = y0 - 2.0 * y1 + y2;
  if (!(denom < 0.0)) return 0.0;
  return std::clamp(0.5 * (y0 - y2) / denom, -0.5, 0.5);
}

}  // namespace detail

/// Sweep every (tx beam, rx beam) pair of one station: the PRS waveform runs
/// through the beamformed multipath channel; the receiver correlates against
/// a local copy of the clean waveform and takes the earliest strong peak.
/// Arrays are aimed along the line between station and UE, so the LOS
/// direction sits inside both codebook sectors.
///
/// Throws detection_error when no beam pair clears the detection floor (for
/// instance an NLOS station with no scatterers).
inline BeamSweepReport sweep_and_estimate_toa(const BaseStation& bs, const Scenario& sc,
                                              const PrsConfig& prs, const SweepConfig& cfg,
                                              std::uint64_t noise_seed = 0) {
  prs.validate();
  cfg.tx.validate();
  cfg.rx.validate();

  const PathSet ps = build_paths(bs, sc, prs, cfg.channel);
  if (ps.paths.empty())
    throw detection_error("sweep: bs " + std::to_string(bs.id) + " has no propagation paths");

  // Clean reference waveform for this station's cell id.
  PrsConfig bs_prs = prs;
  bs_prs.cell_id = bs.cell_id;
  const auto x = ofdm_modulate(gen_prs_grid(bs_prs), bs_prs);
  const std::size_t n_wave = x.size();
  const double fs = prs.sample_rate_hz();

  double max_delay = 0.0;
  for (const auto& p : ps.paths) max_delay = std::max(max_delay, p.delay_s);
  const std::size_t delay_span = std::size_t(std::ceil(max_delay * fs)) + 64;
  const std::size_t L = next_pow2(n_wave + delay_span);

  std::vector<std::complex<double>> X(L, {0.0, 0.0});
  std::copy(x.begin(), x.end(), X.begin());
  fft_inplace(X, false);

  // Exact band-limited fractional delay per path, applied on the whole
  // padded stream (signed-bin phase ramp).
  const std::size_t n_paths = ps.paths.size();
  std::vector<std::vector<std::complex<double>>> delayed(n_paths);
  for (std::size_t p = 0; p < n_paths; ++p) {
    const double delay_samples = ps.paths[p].delay_s * fs;
    auto& d = delayed[p];
    d.resize(L);
    for (std::size_t k = 0; k < L; ++k) {
      const double f_signed = (k < L / 2) ? double(k) : double(k) - double(L);
      d[k] = X[k] * std::polar(1.0, -kTwoPi * f_signed * delay_samples / double(L));
    }
  }

  // Per-beam array factors for each path, both link ends aimed at the peer.
  const double bore_tx = azimuth(bs.position, sc.ue);
  const double bore_rx = azimuth(sc.ue, bs.position);
  const auto tx_beams = beam_codebook(cfg.tx);
  const auto rx_beams = beam_codebook(cfg.rx);
  std::vector<std::vector<std::complex<double>>> t_factor(tx_beams.size()),
      r_factor(rx_beams.size());
  {
    std::vector<std::vector<std::complex<double>>> a_t, a_r;
    for (const auto& p : ps.paths) {
      a_t.push_back(steering_vector(cfg.tx, wrap_angle(p.departure_az_rad - bore_tx)));
      a_r.push_back(steering_vector(cfg.rx, wrap_angle(p.arrival_az_rad - bore_rx)));
    }
    for (std::size_t m = 0; m < tx_beams.size(); ++m)
      for (std::size_t p = 0; p < n_paths; ++p)
        t_factor[m].push_back(beam_response(tx_beams[m], a_t[p]));
    for (std::size_t l = 0; l < rx_beams.size(); ++l)
      for (std::size_t p = 0; p < n_paths; ++p)
        r_factor[l].push_back(beam_response(rx_beams[l], a_r[p]));
  }

  const std::size_t max_lag = L - n_wave;
  BeamSweepReport report;
  report.bs_id = bs.id;
  report.pairs.reserve(tx_beams.size() * rx_beams.size());

  std::vector<std::complex<double>> y(L);
  Rng noise_rng(noise_seed);
  for (std::size_t m = 0; m < tx_beams.size(); ++m) {
    for (std::size_t l = 0; l < rx_beams.size(); ++l) {
      std::fill(y.begin(), y.end(), std::complex<double>{0.0, 0.0});
      for (std::size_t p = 0; p < n_paths; ++p) {
        const std::complex<double> h = ps.paths[p].gain * t_factor[m][p] * r_factor[l][p];
        const auto& d = delayed[p];
        for (std::size_t k = 0; k < L; ++k) y[k] += h * d[k];
      }

      if (cfg.snr_db) {
        double clean = 0.0;
        for (const auto& z : y) clean += std::norm(z);
        // Frequency-domain white noise equivalent to time-domain noise of
        // variance clean_power * 10^(-snr/10): per-bin variance scales by L.
        const double sigma2 = (clean / (double(L) * double(n_wave))) *
                              std::pow(10.0, -*cfg.snr_db / 10.0) * double(L);
        const double s = std::sqrt(sigma2 / 2.0);
        for (auto& z : y) z += std::complex<double>{s * noise_rng.normal(), s * noise_rng.normal()};
      }

      double energy = 0.0;
      for (const auto& z : y) energy += std::norm(z);
      const double power = energy / (double(L) * double(n_wave));

      std::vector<std::complex<double>> corr(L);
      for (std::size_t k = 0; k < L; ++k) corr[k] = y[k] * std::conj(X[k]);
      fft_inplace(corr, true);

      BeamPairMeasurement meas;
      meas.tx_beam = int(m);
      meas.rx_beam = int(l);
      meas.power = power;
      if (power > 0.0) {
        const std::size_t i = detail::first_peak_index(corr, max_lag, cfg.first_peak_threshold);
        meas.toa_raw_s = double(i) / fs;
        meas.toa_s = (double(i) + detail::parabolic_offset(corr, i)) / fs;
      }
      report.pairs.push_back(meas);
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < report.pairs.size(); ++i)
    if (report.pairs[i].power > report.pairs[best].power) best = i;
  report.best_pair_index = best;
  const double best_power = report.pairs[best].power;
  if (!(best_power > cfg.detect_power_abs) || !(best_power > 0.0))
    throw detection_error("sweep: bs " + std::to_string(bs.id) +
                          " below the detection floor on every beam pair");

  bool any = false;
  for (auto& p : report.pairs) {
    p.usable = p.power >= cfg.detect_power_abs && p.power >= best_power * cfg.pair_power_floor_rel;
    if (!p.usable) continue;
    if (!any || p.toa_s < report.selected_toa_s) report.selected_toa_s = p.toa_s;
    if (!any || p.toa_raw_s < report.selected_toa_raw_s) report.selected_toa_raw_s = p.toa_raw_s;
    any = true;
  }
  return report;
}

/// Signal-level ToA backend: one beam sweep per station; stations that fail
/// detection are left out of the set (downstream policy decides exclusion).
inline ToaSet simulate_toa_signal(const Scenario& sc, const PrsConfig& prs,
                                  const SweepConfig& cfg, std::uint64_t seed) {
  ToaSet out;
  out.backend = ToaBackend::signal;
  for (const auto& b : sc.bss) {
    try {
      const BeamSweepReport rep =
          sweep_and_estimate_toa(b, sc, prs, cfg, derive_seed(seed, std::uint64_t(b.id)));
      out.entries.push_back({b.id, rep.selected_toa_s});
    } catch (const detection_error&) {
      // missing entry; harness policy excludes the station for this trial
    }
  }
  return out;
}

}  // namespace gdopsel
