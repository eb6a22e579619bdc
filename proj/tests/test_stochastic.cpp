#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hypercone/stochastic.hpp"
#include "oracles.hpp"

using namespace hypercone;

namespace {
const std::vector<double> kHalf{0.5, 0.5};
Multicone oracle_arc() { return Multicone({{1.19, 0.44}}); }
}  // namespace

TEST_CASE("sampler and generator") {
  SplitMix64 a(99), b(99);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  // Reference output of the SplitMix64 step for seed 0.
  SplitMix64 z(0);
  CHECK(z.next() == 0xE220A8397B1DCDAFULL);
  const DiscreteSampler s({0.2, 0.3, 0.5});
  SplitMix64 rng(1);
  std::vector<int> counts(3, 0);
  for (int i = 0; i < 100000; ++i) ++counts[s(rng)];
  CHECK(counts[0] / 1e5 == doctest::Approx(0.2).epsilon(0.03));
  CHECK(counts[2] / 1e5 == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("entropy") {
  CHECK(entropy({0.5, 0.5}) == doctest::Approx(std::log(2.0)));
  CHECK(entropy({1.0}) == 0.0);
  CHECK(entropy({0.9, 0.1}) == doctest::Approx(0.325083).epsilon(1e-6));
  CHECK_THROWS_AS(entropy({0.5, 0.6}), Error);
  CHECK_THROWS_AS(entropy({1.0, 0.0}), Error);
}

TEST_CASE("lyapunov_random") {
  const IfsSystem d({"1"}, {Mat2::diag(2, 0.5)});
  CHECK(lyapunov_random(d, {1.0}, 1000, 3).value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  const auto tri = oracle::triangular();
  const auto e = lyapunov_random(tri, kHalf, 100000, 42);
  CHECK(e.value == doctest::Approx(std::log(2.0)).epsilon(0.02));
  CHECK(e.se > 0.0);
  const IfsSystem rot({"1", "2"}, {Mat2::rotation(0.3), Mat2::rotation(1.3)});
  CHECK(std::fabs(lyapunov_random(rot, kHalf, 10000, 5).value) <= 1e-9);
  CHECK_THROWS_AS(lyapunov_random(tri, kHalf, 0, 1), Error);
  CHECK_THROWS_AS(lyapunov_random(tri, {1.0}, 10, 1), Error);
}

TEST_CASE("product order does not change the exponent") {
  const Mat2 a{2, 1, 1, 1};
  const Mat2 b{1, 0.5, 0.3, 1.15};
  const IfsSystem sys({"1", "2"}, {a, b});
  const auto r = lyapunov_random(sys, {0.3, 0.7}, 100000, 8, ProductOrder::Right);
  const auto l = lyapunov_random(sys, {0.3, 0.7}, 100000, 8, ProductOrder::Left);
  CHECK(std::fabs(r.value - l.value) <= 3 * std::hypot(r.se, l.se));
}

TEST_CASE("lyapunov_ifs") {
  const IfsSystem d({"1"}, {Mat2::diag(0.5, 2)});
  CHECK(lyapunov_ifs(d, {1.0}, Multicone({{1.2, 0.74}}), 1000, 100, 1).value ==
        doctest::Approx(2 * std::log(2.0)).epsilon(1e-9));
  const auto tri = oracle::triangular();
  const auto phi = lyapunov_ifs(tri, kHalf, oracle_arc(), 100000, 1000, 42);
  CHECK(phi.value == doctest::Approx(2 * std::log(2.0)).epsilon(0.02));
  const auto a = lyapunov_random(tri, kHalf, 100000, 42);
  CHECK(std::fabs(phi.value - 2 * a.value) <= 3 * std::hypot(phi.se, 2 * a.se));
  const IfsSystem rot({"1"}, {Mat2::rotation(0.3)});
  CHECK_THROWS_AS(lyapunov_ifs(rot, {1.0}, Multicone({{0.1, 0.5}}), 100, 10, 1), Error);
}

TEST_CASE("positivity on hyperbolic systems") {
  const Mat2 a{2, 1, 1, 1};
  const Mat2 r = Mat2::rotation(0.6);
  const IfsSystem sys({"1", "2"}, {a, r * a * r.inverse()});
  CHECK(lyapunov_random(sys, kHalf, 20000, 4).value > 0.0);
}

TEST_CASE("furstenberg_sample") {
  const auto tri = oracle::triangular();
  const auto s = furstenberg_sample(tri, kHalf, 20000, 1000, 7);
  CHECK(s.points.size() == 20000);
  CHECK_FALSE(s.warning);
  for (const auto& x : s.points) {
    CHECK(x.theta >= std::atan(3.0) - 1e-9);
    CHECK(x.theta <= kPi / 2 + 1e-9);
  }
  const auto again = furstenberg_sample(tri, kHalf, 20000, 1000, 7);
  CHECK(again.points == s.points);
  CHECK(again.symbol_stream_hash == s.symbol_stream_hash);
  const auto other = furstenberg_sample(tri, kHalf, 20000, 1000, 8);
  CHECK(other.symbol_stream_hash != s.symbol_stream_hash);

  const IfsSystem single({"1"}, {Mat2::diag(0.5, 2)});
  const auto one = furstenberg_sample(single, {1.0}, 100, 100, 1);
  CHECK(one.warning);
  CHECK(std::fabs(one.points.back().theta - kPi / 2) <= 1e-12);
}

TEST_CASE("stationarity_residual") {
  const IfsSystem single({"1"}, {Mat2::diag(0.5, 2)});
  StationarySample point;
  point.points = {{kPi / 2}};
  CHECK(stationarity_residual(point, single, {1.0}) == doctest::Approx(0.0).epsilon(1e-12));

  const auto tri = oracle::triangular();
  const auto s = furstenberg_sample(tri, kHalf, 100000, 1000, 3);
  CHECK(stationarity_residual(s, tri, kHalf) <= 0.02);

  StationarySample grid;
  for (int i = 0; i < 4096; ++i) grid.points.push_back({kPi * (i + 0.5) / 4096});
  CHECK(stationarity_residual(grid, tri, kHalf) > 0.1);
  CHECK_THROWS_AS(stationarity_residual(StationarySample{}, tri, kHalf), Error);
}

TEST_CASE("stationarity residual shrinks like steps^-1/2") {
  const auto tri = oracle::triangular();
  // Averaged over seeds so the ratio is not dominated by one chain.
  auto mean_residual = [&](std::uint64_t steps) {
    double sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      sum += stationarity_residual(furstenberg_sample(tri, kHalf, steps, 1000, seed), tri, kHalf);
    }
    return sum / 8;
  };
  const double r1 = mean_residual(10000), r4 = mean_residual(40000);
  MESSAGE("residual ratio " << r1 / r4);
  CHECK(r1 / r4 >= 1.5);
  CHECK(r1 / r4 <= 3.0);
}

TEST_CASE("furstenberg_dimension") {
  const auto tri = oracle::triangular();
  const auto f = furstenberg_dimension(tri, kHalf, oracle_arc(), 100000, 42);
  CHECK(f.dimension == doctest::Approx(0.5).epsilon(0.03));
  REQUIRE(f.dimension_phi);
  CHECK(*f.dimension_phi == doctest::Approx(0.5).epsilon(0.03));
  CHECK_FALSE(f.disagreement);

  const std::vector<double> skew{0.99, 0.01};
  const IfsSystem tri_skew({"1", "2"}, {tri.matrix(0), tri.matrix(1)});
  const auto g = furstenberg_dimension(tri_skew, skew, std::nullopt, 100000, 42);
  CHECK(g.entropy == doctest::Approx(0.0560).epsilon(0.001));
  CHECK(g.dimension == doctest::Approx(0.0404).epsilon(0.02));
  CHECK_FALSE(g.dimension_phi);

  const Mat2 weak = Mat2::diag(1.05, 1 / 1.05);
  const IfsSystem many({"1", "2", "3"}, {weak, weak, weak});
  CHECK(furstenberg_dimension(many, {1.0 / 3, 1.0 / 3, 1.0 / 3}, std::nullopt, 1000, 1).dimension ==
        1.0);
  const IfsSystem rot({"1"}, {Mat2::rotation(0.4)});
  CHECK_THROWS_AS(furstenberg_dimension(rot, {1.0}, std::nullopt, 1000, 1), Error);
}
