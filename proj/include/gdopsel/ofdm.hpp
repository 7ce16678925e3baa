#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "gdopsel/errors.hpp"
#include "gdopsel/fft.hpp"
#include "gdopsel/prs.hpp"

namespace gdopsel {

namespace detail {
/// Grid subcarrier index -> FFT bin, occupied band centred on DC.
inline std::size_t subcarrier_bin(int k, const PrsConfig& cfg) {
  const int rel = k - cfg.n_subcarriers() / 2;
  return std::size_t((rel % cfg.fft_size + cfg.fft_size) % cfg.fft_size);
}
}  // namespace detail

/// Unitary OFDM modulation with cyclic prefix; output length is
/// n_symbols * (fft_size + cp_len) at fft_size * scs samples per second.
inline std::vector<std::complex<double>> ofdm_modulate(const ResourceGrid& grid,
                                                       const PrsConfig& cfg) {
  cfg.validate();
  if (int(grid.size()) != cfg.n_symbols)
    throw std::invalid_argument("ofdm_modulate: grid symbol count mismatch");

  const std::size_t n = std::size_t(cfg.fft_size);
  const int cp = cfg.cp_len();
  const double scale = std::sqrt(double(n));  // unitary overall: ifft carries 1/N

  std::vector<std::complex<double>> out;
  out.reserve(grid.size() * std::size_t(cfg.samples_per_symbol()));
  std::vector<std::complex<double>> bins(n);
  for (const auto& symbol : grid) {
    if (int(symbol.size()) != cfg.n_subcarriers())
      throw std::invalid_argument("ofdm_modulate: grid subcarrier count mismatch");
    std::fill(bins.begin(), bins.end(), std::complex<double>{0.0, 0.0});
    for (int k = 0; k < cfg.n_subcarriers(); ++k) bins[detail::subcarrier_bin(k, cfg)] = symbol[k];
    fft_inplace(bins, true);
    for (auto& z : bins) z *= scale;
    for (int i = 0; i < cp; ++i) out.push_back(bins[n - std::size_t(cp) + std::size_t(i)]);
    out.insert(out.end(), bins.begin(), bins.end());
  }
  return out;
}

/// Inverse of ofdm_modulate (cyclic prefixes dropped).
inline ResourceGrid ofdm_demodulate(const std::vector<std::complex<double>>& samples,
                                    const PrsConfig& cfg) {
  cfg.validate();
  const std::size_t per_symbol = std::size_t(cfg.samples_per_symbol());
  if (samples.size() != per_symbol * std::size_t(cfg.n_symbols))
    throw std::invalid_argument("ofdm_demodulate: sample count mismatch");

  const std::size_t n = std::size_t(cfg.fft_size);
  const double scale = 1.0 / std::sqrt(double(n));
  ResourceGrid grid(cfg.n_symbols,
                    std::vector<std::complex<double>>(cfg.n_subcarriers(), {0.0, 0.0}));
  std::vector<std::complex<double>> bins(n);
  for (int s = 0; s < cfg.n_symbols; ++s) {
    const std::size_t start = std::size_t(s) * per_symbol + std::size_t(cfg.cp_len());
    std::copy(samples.begin() + start, samples.begin() + start + n, bins.begin());
    fft_inplace(bins, false);
    for (int k = 0; k < cfg.n_subcarriers(); ++k)
      grid[s][std::size_t(k)] = bins[detail::subcarrier_bin(k, cfg)] * scale;
  }
  return grid;
}

// --- waveform fixtures ----------------------------------------------------
//
// <path>       interleaved little-endian float32 (re, im) pairs
// <path>.meta  two text lines: "sample_rate_hz <v>" and "n_samples <n>"

inline void write_waveform(const std::vector<std::complex<double>>& x, double sample_rate_hz,
                           const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw io_error("write_waveform: cannot open " + path);
  for (const auto& z : x) {
    const float re = float(z.real());
    const float im = float(z.imag());
    os.write(reinterpret_cast<const char*>(&re), sizeof re);
    os.write(reinterpret_cast<const char*>(&im), sizeof im);
  }
  if (!os) throw io_error("write_waveform: write failed for " + path);

  std::ofstream meta(path + ".meta");
  if (!meta) throw io_error("write_waveform: cannot open " + path + ".meta");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", sample_rate_hz);
  meta << "sample_rate_hz " << buf << "\n";
  meta << "n_samples " << x.size() << "\n";
}

inline std::vector<std::complex<double>> read_waveform(const std::string& path,
                                                       double* sample_rate_hz = nullptr) {
  std::ifstream meta(path + ".meta");
  if (!meta) throw io_error("read_waveform: cannot open " + path + ".meta");
  std::string tag;
  double rate = 0.0;
  std::size_t n = 0;
  meta >> tag >> rate;
  if (tag != "sample_rate_hz") throw io_error("read_waveform: bad sidecar " + path + ".meta");
  meta >> tag >> n;
  if (tag != "n_samples" || !meta) throw io_error("read_waveform: bad sidecar " + path + ".meta");

  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("read_waveform: cannot open " + path);
  std::vector<std::complex<double>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    float re = 0.0f, im = 0.0f;
    is.read(reinterpret_cast<char*>(&re), sizeof re);
    is.read(reinterpret_cast<char*>(&im), sizeof im);
    if (!is) throw io_error("read_waveform: truncated file " + path);
    out.push_back({double(re), double(im)});
  }
  if (sample_rate_hz) *sample_rate_hz = rate;
  return out;
}

}  // namespace gdopsel
