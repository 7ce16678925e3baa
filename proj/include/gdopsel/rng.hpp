#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace gdopsel {

/// SplitMix64 step, used for seed scrambling.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Well-mixed seed for an independent child stream keyed by (seed, salt).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t s = salt;
  std::uint64_t mixed = splitmix64(s);
  s = seed ^ mixed;
  return splitmix64(s);
}

/// Deterministic random stream. Distributions are implemented here rather
/// than with std:: distribution objects so that sequences are identical on
/// every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t s = seed;
    engine_.seed(splitmix64(s));
  }

  std::uint64_t seed() const { return seed_; }

  /// Independent child stream keyed by (this stream's seed, salt).
  Rng derive(std::uint64_t salt) const { return Rng(derive_seed(seed_, salt)); }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi) {
    const std::uint64_t span = std::uint64_t(hi - lo) + 1;
    return lo + int((unsigned __int128)(next_u64()) * span >> 64);
  }

  /// Standard normal (Box-Muller, cached spare).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Exponential with the given mean; mean <= 0 yields exactly 0.
  double exponential(double mean) {
    if (mean <= 0.0) return 0.0;
    return -mean * std::log1p(-uniform());
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// k distinct indices from {0,...,n-1}, in draw order (partial Fisher-Yates).
inline std::vector<int> sample_indices(Rng& rng, int n, int k) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int i = 0; i < k; ++i) {
    const int j = rng.uniform_int(i, n - 1);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace gdopsel
