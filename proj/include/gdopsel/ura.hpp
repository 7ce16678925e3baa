#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "gdopsel/geometry.hpp"

namespace gdopsel {

/// Uniform rectangular array with an azimuth-steered codebook. Steering is
/// azimuth-only (broadside elevation): phases vary along the column axis.
struct UraConfig {
  int rows = 8;
  int cols = 8;
  double spacing_wl = 0.5;  ///< element spacing in wavelengths
  int codebook_size = 16;

  int n_elements() const { return rows * cols; }

  void validate() const {
    if (rows < 1 || cols < 1) throw std::invalid_argument("ura: rows and cols must be >= 1");
    if (codebook_size < 1) throw std::invalid_argument("ura: codebook_size must be >= 1");
    if (!(spacing_wl > 0.0)) throw std::invalid_argument("ura: spacing must be positive");
  }
};

inline constexpr double kSectorHalfRad = 60.0 * kPi / 180.0;

/// Array response for a ray at the given azimuth; unit-magnitude entries.
inline std::vector<std::complex<double>> steering_vector(const UraConfig& cfg,
                                                         double azimuth_rad) {
  cfg.validate();
  std::vector<std::complex<double>> a;
  a.reserve(std::size_t(cfg.n_elements()));
  const double step = kTwoPi * cfg.spacing_wl * std::sin(azimuth_rad);
  for (int r = 0; r < cfg.rows; ++r)
    for (int c = 0; c < cfg.cols; ++c) a.push_back(std::polar(1.0, step * double(c)));
  return a;
}

/// Beam azimuths: equispaced over [-60 deg, +60 deg], endpoints included.
inline std::vector<double> codebook_azimuths(const UraConfig& cfg) {
  cfg.validate();
  std::vector<double> az;
  az.reserve(std::size_t(cfg.codebook_size));
  if (cfg.codebook_size == 1) {
    az.push_back(0.0);
    return az;
  }
  for (int m = 0; m < cfg.codebook_size; ++m)
    az.push_back(-kSectorHalfRad + 2.0 * kSectorHalfRad * double(m) / double(cfg.codebook_size - 1));
  return az;
}

/// Unit-norm steering weights for every codebook azimuth.
inline std::vector<std::vector<std::complex<double>>> beam_codebook(const UraConfig& cfg) {
  std::vector<std::vector<std::complex<double>>> beams;
  const double inv_sqrt_n = 1.0 / std::sqrt(double(cfg.n_elements()));
  for (double az : codebook_azimuths(cfg)) {
    auto w = steering_vector(cfg, az);
    for (auto& z : w) z *= inv_sqrt_n;
    beams.push_back(std::move(w));
  }
  return beams;
}

/// w^H a: complex array factor of weights w for a ray with response a.
inline std::complex<double> beam_response(const std::vector<std::complex<double>>& w,
                                          const std::vector<std::complex<double>>& a) {
  if (w.size() != a.size()) throw std::invalid_argument("beam_response: size mismatch");
  std::complex<double> s{0.0, 0.0};
  for (std::size_t i = 0; i < w.size(); ++i) s += std::conj(w[i]) * a[i];
  return s;
}

}  // namespace gdopsel
