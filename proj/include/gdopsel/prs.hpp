#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gdopsel/fft.hpp"
#include "gdopsel/geometry.hpp"
#include "gdopsel/rng.hpp"

namespace gdopsel {

/// Downlink positioning-reference-signal configuration. Defaults follow a
/// 28 GHz / 120 kHz / 56-PRB deployment with a comb-12 pattern over 12
/// symbols.
struct PrsConfig {
  double carrier_hz = 28e9;
  double scs_hz = 120e3;
  int n_prb = 56;
  int comb_size = 12;   ///< one of 2, 4, 6, 12
  int n_symbols = 12;   ///< one of 2, 4, 6, 12
  int fft_size = 1024;  ///< power of two, >= 12 * n_prb
  std::uint32_t cell_id = 0;

  int n_subcarriers() const { return 12 * n_prb; }
  int cp_len() const { return fft_size * 9 / 128; }  // ~7% normal cyclic prefix
  int samples_per_symbol() const { return fft_size + cp_len(); }
  double sample_rate_hz() const { return double(fft_size) * scs_hz; }
  double sample_period_s() const { return 1.0 / sample_rate_hz(); }

  void validate() const {
    auto allowed = [](int v) { return v == 2 || v == 4 || v == 6 || v == 12; };
    if (!allowed(comb_size)) throw std::invalid_argument("prs: comb size must be 2, 4, 6 or 12");
    if (!allowed(n_symbols)) throw std::invalid_argument("prs: symbol count must be 2, 4, 6 or 12");
    if (n_symbols < comb_size)
      throw std::invalid_argument(
          "prs: invalid comb/symbol combination; need n_symbols >= comb_size so the staggered "
          "offsets cover every comb position");
    if (n_prb < 24 || n_prb > 272)
      throw std::invalid_argument("prs: n_prb must be in [24, 272]");
    if (!is_pow2(std::size_t(fft_size)) || fft_size < n_subcarriers())
      throw std::invalid_argument("prs: fft_size must be a power of two >= 12*n_prb");
    if (!(carrier_hz > 0.0) || !(scs_hz > 0.0))
      throw std::invalid_argument("prs: carrier and subcarrier spacing must be positive");
  }
};

/// Frequency-time resource grid, [symbol][subcarrier].
using ResourceGrid = std::vector<std::vector<std::complex<double>>>;

/// Comb-patterned PRS grid: symbol s occupies subcarriers k with
/// k mod comb == s mod comb (staggered offsets, dense over a full sweep of
/// symbols), each occupied element a pseudo-random unit QPSK value seeded by
/// the cell id.
inline ResourceGrid gen_prs_grid(const PrsConfig& cfg) {
  cfg.validate();
  constexpr std::uint64_t kPrsSeedSalt = 0x5052532d717073ULL;
  Rng rng(derive_seed(cfg.cell_id, kPrsSeedSalt));
  const double amp = 0.70710678118654752440;  // 1/sqrt(2)

  ResourceGrid grid(cfg.n_symbols,
                    std::vector<std::complex<double>>(cfg.n_subcarriers(), {0.0, 0.0}));
  for (int s = 0; s < cfg.n_symbols; ++s) {
    const int offset = s % cfg.comb_size;
    for (int k = offset; k < cfg.n_subcarriers(); k += cfg.comb_size) {
      const int q = rng.uniform_int(0, 3);
      const double re = (q & 1) ? -amp : amp;
      const double im = (q & 2) ? -amp : amp;
      grid[s][k] = {re, im};
    }
  }
  return grid;
}

}  // namespace gdopsel
