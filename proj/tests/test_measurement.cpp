#include <catch2/catch.hpp>

#include <cmath>
#include <sstream>

#include "gdopsel/measurement.hpp"
#include "gdopsel/rng.hpp"
#include "gdopsel/scenario.hpp"

using namespace gdopsel;

namespace {

Scenario make_scenario(const std::vector<Point2>& bs, Point2 ue, const std::vector<bool>& los) {
  Scenario sc;
  sc.ue = ue;
  sc.bounds = {-1e4, -1e4, 1e4, 1e4};
  for (std::size_t i = 0; i < bs.size(); ++i) {
    sc.bss.push_back({int(i) + 1, bs[i], std::uint32_t(i)});
    sc.los[int(i) + 1] = los[i];
  }
  return sc;
}

}  // namespace

TEST_CASE("zero-noise LOS arrival times are exact ranges") {
  const Scenario sc = make_scenario({{100, 0}, {0, 200}, {-50, -50}, {300, 40}}, {10, 20},
                                    {true, true, true, true});
  const ToaSet toas = simulate_toa_abstract(sc, {0.0, 2.0}, 123);
  for (const auto& b : sc.bss) {
    const double d = distance(b.position, sc.ue);
    CHECK(toas.range_m(b.id) == Approx(d).margin(1e-9));
  }
}

TEST_CASE("LOS error empirics converge to (0, sigma^2)") {
  const Scenario sc = make_scenario({{100, 0}}, {0, 0}, {true});
  const NoiseModel noise{0.3, 2.0};
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const ToaSet t = simulate_toa_abstract(sc, noise, 1000 + std::uint64_t(i));
    const double e = t.range_m(1) - 100.0;
    CHECK(e >= -3.0 * noise.sigma_tdoa_m - 1e-9);  // sanity bound of the model
    sum += e;
    sum2 += e * e;
  }
  const double mean = sum / n;
  const double stddev = std::sqrt(sum2 / n - mean * mean);
  CHECK(std::abs(mean) < 0.01);
  CHECK(stddev == Approx(0.3).epsilon(0.02));
}

TEST_CASE("NLOS bias empirics converge to the configured mean") {
  const Scenario sc = make_scenario({{100, 0}}, {0, 0}, {false});
  const NoiseModel noise{1e-12, 2.0};
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const ToaSet t = simulate_toa_abstract(sc, noise, 5000 + std::uint64_t(i));
    const double excess = t.range_m(1) - 100.0;
    CHECK(excess >= -1e-6);
    sum += excess;
  }
  CHECK(sum / n == Approx(2.0).epsilon(0.02));
}

TEST_CASE("tdoa_from_toa basics") {
  ToaSet toas;
  toas.entries = {{1, 5e-7}, {2, 5e-7}, {3, 5e-7}, {4, 5e-7}};
  const TdoaVector all_equal = tdoa_from_toa(toas, 1, {1, 2, 3, 4});
  REQUIRE(all_equal.entries.size() == 3);
  for (const auto& e : all_equal.entries) CHECK(e.range_diff_m == 0.0);

  // noiseless geometry: r_{i,1} = d_i - d_1
  const Scenario sc = make_scenario({{0, 30}, {40, 0}, {-40, 0}, {100, 100}}, {0, 0},
                                    {true, true, true, true});
  const ToaSet clean = simulate_toa_abstract(sc, {0.0, 0.0}, 9);
  const TdoaVector tdoa = tdoa_from_toa(clean, 1, {1, 2, 3, 4});
  CHECK(tdoa.value(2) == Approx(40.0 - 30.0).margin(1e-9));
  CHECK(tdoa.value(3) == Approx(40.0 - 30.0).margin(1e-9));
  CHECK(tdoa.value(4) == Approx(std::sqrt(2e4) - 30.0).margin(1e-9));

  CHECK_THROWS_AS(tdoa_from_toa(toas, 9, {9, 1, 2}), lookup_error);
  CHECK_THROWS_AS(tdoa_from_toa(toas, 3, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(tdoa_from_toa(toas, 1, {1}), std::invalid_argument);
}

TEST_CASE("tdoa antisymmetry and reference-change consistency") {
  Rng rng(77);
  for (int rep = 0; rep < 50; ++rep) {
    ToaSet toas;
    for (int id = 1; id <= 5; ++id) toas.entries.push_back({id, rng.uniform(1e-7, 3e-6)});
    const std::vector<int> ids{1, 2, 3, 4, 5};

    for (int i = 2; i <= 5; ++i) {
      const double r_i1 = tdoa_from_toa(toas, 1, ids).value(i);
      const double r_1i = tdoa_from_toa(toas, i, ids).value(1);
      CHECK(r_i1 + r_1i == 0.0);  // antisymmetry is exact
    }
    // r_{i,j} = r_{i,1} - r_{j,1}
    const TdoaVector ref1 = tdoa_from_toa(toas, 1, ids);
    for (int j = 2; j <= 5; ++j) {
      const TdoaVector refj = tdoa_from_toa(toas, j, ids);
      for (int i = 2; i <= 5; ++i) {
        if (i == j) continue;
        CHECK(refj.value(i) == Approx(ref1.value(i) - ref1.value(j)).margin(1e-9));
      }
    }
  }
}

TEST_CASE("range residuals") {
  // hand-built integer geometry: ref at (0,3), stations at (+-4,0), truth at origin
  const Scenario sc = make_scenario({{0, 3}, {4, 0}, {-4, 0}}, {0, 0}, {true, true, true});
  const ToaSet clean = simulate_toa_abstract(sc, {0.0, 0.0}, 1);
  const TdoaVector tdoa = tdoa_from_toa(clean, 1, {1, 2, 3});

  SECTION("zero at the true position") {
    for (double r : range_residuals({0, 0}, tdoa, sc)) CHECK(std::abs(r) < 1e-9);
  }
  SECTION("hand-computed value away from the truth") {
    // at x=(0,-1): d_ref=4, d_2=d_3=sqrt(17); residual = 1 - (sqrt(17) - 4)
    const auto res = range_residuals({0, -1}, tdoa, sc);
    REQUIRE(res.size() == 2);
    CHECK(res[0] == Approx(5.0 - std::sqrt(17.0)).margin(1e-9));
    CHECK(res[1] == Approx(5.0 - std::sqrt(17.0)).margin(1e-9));
  }
  SECTION("noisy residual at the truth equals the injected error differences") {
    const ToaSet noisy = simulate_toa_abstract(sc, {0.5, 0.0}, 42);
    const TdoaVector nt = tdoa_from_toa(noisy, 1, {1, 2, 3});
    const auto res = range_residuals({0, 0}, nt, sc);
    // eps_i recovered from the toas themselves
    const double e1 = noisy.range_m(1) - 3.0;
    const double e2 = noisy.range_m(2) - 4.0;
    const double e3 = noisy.range_m(3) - 4.0;
    CHECK(res[0] == Approx(e2 - e1).margin(1e-9));
    CHECK(res[1] == Approx(e3 - e1).margin(1e-9));
  }
  SECTION("singularity at a station position") {
    CHECK_THROWS_AS(range_residuals({4, 0}, tdoa, sc), singularity_error);
  }
}

TEST_CASE("toa csv export and hash") {
  ToaSet toas;
  toas.entries = {{1, 1e-6}, {2, 2e-6}};
  std::ostringstream os;
  toas.to_csv(os);
  CHECK(os.str().rfind("bs_id,toa_s,range_m\n", 0) == 0);
  const auto h1 = toas.hash();
  toas.entries[1].toa_s = 2.0000001e-6;
  CHECK(toas.hash() != h1);

  TdoaVector t;
  t.reference_id = 1;
  t.entries = {{2, 12.5}};
  std::ostringstream os2;
  t.to_csv(os2);
  CHECK(os2.str() == "bs_id,range_diff_m\n2,12.5\n");
}
