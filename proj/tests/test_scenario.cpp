#include <catch2/catch.hpp>

#include <cmath>
#include <set>
#include <sstream>

#include "gdopsel/rng.hpp"
#include "gdopsel/scenario.hpp"

using namespace gdopsel;

TEST_CASE("distance basics") {
  CHECK(distance({0, 0}, {3, 4}) == 5.0);
  CHECK(distance({12.5, -7.0}, {12.5, -7.0}) == 0.0);

  Rng rng(42);
  for (int i = 0; i < 200; ++i) {
    const Point2 a{rng.uniform(-1e3, 1e3), rng.uniform(-1e3, 1e3)};
    const Point2 b{rng.uniform(-1e3, 1e3), rng.uniform(-1e3, 1e3)};
    // independent scalar recomputation
    const double direct = std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y));
    CHECK(distance(a, b) == Approx(direct).epsilon(1e-12));
    CHECK(distance(a, b) == distance(b, a));
    const Point2 c{rng.uniform(-1e3, 1e3), rng.uniform(-1e3, 1e3)};
    CHECK(distance(a, c) <= distance(a, b) + distance(b, c) + 1e-9);
  }
}

TEST_CASE("los models") {
  SECTION("nearest: the n_los closest stations carry the flag") {
    const Scenario sc = gen_ioo(5, 0, 5, LosModel::nearest);
    CHECK(sc.los_ids() == std::vector<int>{1, 2, 3, 4, 5});
  }
  SECTION("uniform: count right, membership varies across seeds") {
    bool differs = false;
    const auto first = gen_ioo(0, 0, 5, LosModel::uniform).los_ids();
    for (std::uint64_t seed = 1; seed < 10; ++seed) {
      const Scenario sc = gen_ioo(seed, 0, 5, LosModel::uniform);
      CHECK(sc.n_los() == 5);
      if (sc.los_ids() != first) differs = true;
    }
    CHECK(differs);
  }
}

TEST_CASE("gen_umi honours the per-axis spacing rule") {
  const Scenario sc = gen_umi(7, 7, 100.0, kUmiBounds, 5, 4);
  REQUIRE(sc.bss.size() == 7);
  REQUIRE(sc.scatterers.size() == 5);
  CHECK(sc.n_los() == 4);
  CHECK(sc.n_nlos() == 3);

  for (std::size_t i = 0; i < sc.bss.size(); ++i) {
    CHECK(sc.bounds.contains(sc.bss[i].position));
    for (std::size_t j = i + 1; j < sc.bss.size(); ++j)
      CHECK(chebyshev_distance(sc.bss[i].position, sc.bss[j].position) >= 100.0);
  }
  CHECK(sc.bounds.contains(sc.ue));

  // ids ascend with distance to the UE; id 1 attains the minimum
  for (std::size_t i = 0; i + 1 < sc.bss.size(); ++i) {
    CHECK(sc.bss[i].id == int(i) + 1);
    CHECK(distance(sc.bss[i].position, sc.ue) <= distance(sc.bss[i + 1].position, sc.ue));
  }
}

TEST_CASE("gen_umi with zero spacing accepts any draw") {
  const Scenario sc = gen_umi(3, 4, 0.0, kUmiBounds, 0, 1);
  REQUIRE(sc.bss.size() == 4);
  for (std::size_t i = 0; i + 1 < sc.bss.size(); ++i)
    CHECK(distance(sc.bss[i].position, sc.ue) <= distance(sc.bss[i + 1].position, sc.ue));
}

TEST_CASE("gen_umi determinism and property sweep") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Scenario a = gen_umi(seed, 7, 100.0, kUmiBounds, 5, 4);
    const Scenario b = gen_umi(seed, 7, 100.0, kUmiBounds, 5, 4);
    CHECK(to_string(a) == to_string(b));

    double min_gap = 1e300;
    for (std::size_t i = 0; i < a.bss.size(); ++i)
      for (std::size_t j = i + 1; j < a.bss.size(); ++j)
        min_gap = std::min(min_gap, chebyshev_distance(a.bss[i].position, a.bss[j].position));
    CHECK(min_gap >= 100.0);
  }
}

TEST_CASE("gen_umi errors") {
  CHECK_THROWS_AS(gen_umi(1, 3, 0.0, kUmiBounds, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_umi(1, 7, 100.0, kUmiBounds, 5, 0), std::invalid_argument);
  CHECK_THROWS_AS(gen_umi(1, 7, 100.0, kUmiBounds, 5, 8), std::invalid_argument);
  // spacing wider than the bounds can never be satisfied
  CHECK_THROWS_AS(gen_umi(1, 7, 700.0, kUmiBounds, 5, 4), placement_error);
}

TEST_CASE("gen_ioo uses the fixed office grid") {
  const Scenario sc = gen_ioo(1, 5, 5);
  REQUIRE(sc.bss.size() == 12);
  CHECK(sc.n_los() == 5);

  std::set<std::pair<double, double>> got;
  for (const auto& b : sc.bss) got.insert({b.position.x, b.position.y});
  std::set<std::pair<double, double>> want;
  for (int xi = 0; xi < 6; ++xi)
    for (int yi = 0; yi < 2; ++yi) want.insert({10.0 + 20.0 * xi, 15.0 + 20.0 * yi});
  CHECK(got == want);

  // grid pitch: nearest pair 20 m apart, nonzero axis gaps >= 20 m
  double min_pair = 1e300, min_axis = 1e300;
  for (std::size_t i = 0; i < sc.bss.size(); ++i)
    for (std::size_t j = i + 1; j < sc.bss.size(); ++j) {
      min_pair = std::min(min_pair, distance(sc.bss[i].position, sc.bss[j].position));
      const double dx = std::abs(sc.bss[i].position.x - sc.bss[j].position.x);
      const double dy = std::abs(sc.bss[i].position.y - sc.bss[j].position.y);
      if (dx > 0) min_axis = std::min(min_axis, dx);
      if (dy > 0) min_axis = std::min(min_axis, dy);
    }
  CHECK(min_pair == 20.0);
  CHECK(min_axis == 20.0);

  for (std::size_t i = 0; i + 1 < sc.bss.size(); ++i)
    CHECK(distance(sc.bss[i].position, sc.ue) <= distance(sc.bss[i + 1].position, sc.ue));
}

TEST_CASE("gen_ioo all-LOS and seed behaviour") {
  const Scenario sc = gen_ioo(9, 5, 12);
  for (const auto& b : sc.bss) CHECK(sc.is_los(b.id));

  const Scenario a = gen_ioo(1, 5, 6);
  const Scenario b = gen_ioo(2, 5, 6);
  std::set<std::pair<double, double>> pa, pb;
  for (const auto& s : a.bss) pa.insert({s.position.x, s.position.y});
  for (const auto& s : b.bss) pb.insert({s.position.x, s.position.y});
  CHECK(pa == pb);             // grid is fixed
  CHECK(a.ue != b.ue);         // drop differs
  CHECK_THROWS_AS(gen_ioo(1, 5, 0), std::invalid_argument);
  CHECK_THROWS_AS(gen_ioo(1, 5, 13), std::invalid_argument);
}

TEST_CASE("scenario file round trip is exact") {
  const Scenario sc = gen_umi(11, 7, 100.0, kUmiBounds, 5, 4);
  const std::string text = to_string(sc);
  std::istringstream is(text);
  const Scenario back = read_scenario(is);
  CHECK(to_string(back) == text);

  std::istringstream bad("not-a-scenario v1\n");
  CHECK_THROWS_AS(read_scenario(bad), io_error);
  std::istringstream truncated("gdopsel-scenario v1\nbounds 0 0 1 1\n");
  CHECK_THROWS_AS(read_scenario(truncated), io_error);
}

TEST_CASE("scenario helpers") {
  const Scenario sc = gen_ioo(4, 3, 4);
  CHECK(sc.los_ids().size() + sc.nlos_ids().size() == 12);
  CHECK_THROWS_AS(sc.bs(99), lookup_error);
  CHECK_THROWS_AS(sc.is_los(99), lookup_error);

  const auto keep = std::vector<int>{sc.bss[0].id, sc.bss[4].id, sc.bss[7].id};
  const Scenario sub = sc.subset(keep);
  REQUIRE(sub.bss.size() == 3);
  for (int id : keep) {
    CHECK(sub.bs(id).position == sc.bs(id).position);
    CHECK(sub.is_los(id) == sc.is_los(id));
  }
  CHECK(sub.ue == sc.ue);
}
