#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hypercone/thermo.hpp"
#include "hypercone/words.hpp"
#include "oracles.hpp"

using namespace hypercone;

namespace {
Multicone oracle_arc() { return Multicone({{1.19, 0.44}}); }
const Multicone kAroundHalfPi({{1.2, 0.74}});
}  // namespace

TEST_CASE("derivative_range is exact against dense sampling") {
  SplitMix64 rng(41);
  for (int i = 0; i < 200; ++i) {
    const Mat2 m = oracle::random_sl2(rng, 3.0);
    const Arc arc{kPi * rng.uniform(), 0.1 + 2.0 * rng.uniform()};
    const auto r = derivative_range(ScaledMat2::from(m), arc);
    double lo = 1e300, hi = 0;
    for (int k = 0; k <= 20000; ++k) {
      const double d = project_derivative(m, ProjPoint::reduce(arc.start + arc.length * k / 20000));
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    CHECK(std::exp(r.log_sup) >= hi * (1 - 1e-12));
    CHECK(std::exp(r.log_sup) <= hi * (1 + 1e-4));
    CHECK(std::exp(r.log_inf) <= lo * (1 + 1e-12));
    CHECK(std::exp(r.log_inf) >= lo * (1 - 1e-4));
  }
}

TEST_CASE("word_geometry examples") {
  const IfsSystem id({"1"}, {Mat2::identity()});
  const Multicone u({{0.3, 0.4}, {1.5, 0.6}});
  const auto g = word_geometry(id, u, {});
  REQUIRE(g.image_arc_lengths.size() == 2);
  CHECK(g.image_arc_lengths[0] == doctest::Approx(0.4));
  CHECK(g.image_arc_lengths[1] == doctest::Approx(0.6));
  CHECK(g.sup_derivative == doctest::Approx(1.0));
  CHECK(g.inf_derivative == doctest::Approx(1.0));

  // Chart oracle: theta-derivative = slope of f in x times psi-distortion
  // (1 + x^2) / (1 + f(x)^2), with slope 1/4 for the first letter.
  const auto tri = oracle::triangular();
  const Multicone w = oracle_arc();
  const auto g1 = word_geometry(tri, w, {0});
  double hi = 0, lo = 1e300;
  const Arc arc = w.arcs()[0];
  for (int k = 0; k <= 4000; ++k) {
    const double theta = arc.start + arc.length * k / 4000;
    const double x = std::cos(theta) / std::sin(theta);
    const double fx = x / 4;
    const double d = 0.25 * (1 + x * x) / (1 + fx * fx);
    hi = std::max(hi, d);
    lo = std::min(lo, d);
  }
  CHECK(g1.sup_derivative == doctest::Approx(hi).epsilon(1e-6));
  CHECK(g1.inf_derivative == doctest::Approx(lo).epsilon(1e-6));
}

TEST_CASE("pressure_estimate") {
  const auto tri = oracle::triangular();
  const Multicone u = oracle_arc();
  CHECK(pressure_estimate(tri, u, 0.0, 7) == doctest::Approx(std::log(2.0)));
  CHECK(std::fabs(pressure_estimate(tri, u, 0.5, 12)) <= 0.1);
  double prev = 1e300;
  for (int k = 0; k <= 20; ++k) {
    const double p = pressure_estimate(tri, u, 0.1 * k, 8);
    CHECK(p < prev);
    prev = p;
  }
  const IfsSystem single({"1"}, {Mat2::diag(0.5, 2)});
  const double slack = std::log(1 / std::pow(std::sin(1.2), 2));
  for (int n : {4, 8, 16}) {
    for (double t : {0.5, 1.0, 2.0}) {
      const double p = pressure_estimate(single, kAroundHalfPi, t, n);
      CHECK(p <= -t * std::log(4.0) + t * slack / n + 1e-12);
      CHECK(p >= -t * std::log(4.0) - 1e-12);
    }
  }
  CHECK_THROWS_AS(pressure_estimate(tri, u, -1.0, 4), Error);
  CHECK_THROWS_AS(pressure_estimate(IfsSystem({"1"}, {Mat2::rotation(0.2)}), u, 1.0, 4), Error);
}

TEST_CASE("solve_dn") {
  const Mat2 a = Mat2::diag(0.5, 2);
  const IfsSystem twins({"1", "2"}, {a, a});
  const int n = 4;
  const Mat2 an{std::pow(0.5, n), 0, 0, std::pow(2.0, n)};
  const double ell = oracle::quadrature_arc_length(an, 1.2, 0.74);
  CHECK(solve_dn(twins, kAroundHalfPi, n) ==
        doctest::Approx(n * std::log(2.0) / std::log(1 / ell)).epsilon(1e-9));

  const auto tri = oracle::triangular();
  const Multicone u = oracle_arc();
  double prev_err = 1.0;
  for (int k : {6, 8, 10, 12}) {
    const double err = std::fabs(solve_dn(tri, u, k) - 0.5);
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err <= 0.08);

  try {
    solve_dn(IfsSystem({"1"}, {a}), kAroundHalfPi, 3);
    FAIL("expected degenerate");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Degenerate);
  }
  const Mat2 weak = Mat2::diag(1 / 1.01, 1.01);
  try {
    solve_dn(IfsSystem({"1", "2"}, {weak, weak}), Multicone({{0.3, 2.5}}), 1);
    FAIL("expected lengths-too-large");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::LengthsTooLarge);
  }
}

TEST_CASE("zeta_critical_exponent") {
  CHECK(zeta_critical_exponent(IfsSystem({"1"}, {Mat2::diag(2, 0.5)}), 6) == 0.0);
  CHECK(zeta_critical_exponent(oracle::triangular(), 12) == doctest::Approx(1.0).epsilon(0.1));
  const Mat2 a = Mat2::diag(1.7, 1 / 1.7);
  const IfsSystem copies({"1", "2", "3"}, {a, a, a});
  CHECK(zeta_critical_exponent(copies, 5) ==
        doctest::Approx(std::log(3.0) / std::log(1.7)).epsilon(1e-10));
  const auto tri = oracle::triangular();
  CHECK(std::fabs(2 * solve_dn(tri, oracle_arc(), 12) - zeta_critical_exponent(tri, 12)) <= 0.1);
  CHECK_THROWS_AS(
      zeta_critical_exponent(IfsSystem({"1", "2"}, {Mat2::rotation(0.1), Mat2::rotation(0.2)}), 3),
      Error);
}

TEST_CASE("bounded_distortion") {
  const IfsSystem rot({"1", "2"}, {Mat2::rotation(0.4), Mat2::rotation(1.1)});
  CHECK(bounded_distortion(rot, Multicone({{0.2, 0.5}}), 5) == doctest::Approx(1.0));
  // Single diagonal map: ratio of ||A v||^2 extremes over the arc.
  const Mat2 a = Mat2::diag(0.5, 2);
  const IfsSystem single({"1"}, {a});
  const double c1 = bounded_distortion(single, kAroundHalfPi, 1);
  auto sq = [&](double t) { return 0.25 * std::cos(t) * std::cos(t) + 4 * std::sin(t) * std::sin(t); };
  CHECK(c1 == doctest::Approx(sq(kPi / 2) / sq(1.2)).epsilon(1e-9));
  const auto tri = oracle::triangular();
  const double c8 = bounded_distortion(tri, oracle_arc(), 8);
  const double c12 = bounded_distortion(tri, oracle_arc(), 12);
  CHECK(c12 >= c8);
  CHECK(c12 <= 1.05 * c8);
}

TEST_CASE("bounded distortion inequality on enumerated words") {
  const auto tri = oracle::triangular();
  const Multicone u = oracle_arc();
  const auto rep = attractor_dimension(tri, u, 10);
  REQUIRE(rep.n0);
  const double cd = rep.constants.c_distortion;
  for_each_word(tri, 10, {}, [&](const Word& w, const ScaledMat2& p) {
    if (static_cast<int>(w.size()) < *rep.n0) return;
    const auto r = derivative_range(p, u);
    const double inv2 = -2 * p.log_scale;
    CHECK(inv2 <= r.log_inf + 1e-12);
    CHECK(r.log_inf <= r.log_sup);
    CHECK(r.log_sup <= std::log(cd) + inv2 + 1e-12);
  });
}

TEST_CASE("attractor_dimension on the oracle system") {
  const auto tri = oracle::triangular();
  const Multicone u = oracle_arc();
  for (int n : {6, 8, 10, 12}) {
    const auto rep = attractor_dimension(tri, u, n);
    REQUIRE(rep.d_n);
    REQUIRE(rep.bracket);
    const double gap = rep.s_estimate - *rep.d_n;
    CHECK(rep.bracket->first <= gap);
    CHECK(gap <= rep.bracket->second);
    CHECK(rep.dim_estimate == doctest::Approx(std::min(1.0, rep.s_a_estimate / 2)));
    CHECK(rep.constants.lambda > 1.0);
    CHECK(rep.constants.r1 > 0.0);
  }
  const auto rep = attractor_dimension(tri, u, 12);
  CHECK(std::fabs(rep.dim_estimate - 0.5) <= 0.08);
  CHECK(std::fabs(*rep.dim_dn_estimate - 0.5) <= 0.08);
  CHECK(rep.pressure_samples.size() == 17);
}

TEST_CASE("attractor_dimension edge cases") {
  const IfsSystem single({"1"}, {Mat2::diag(0.5, 2)});
  const auto r0 = attractor_dimension(single, kAroundHalfPi, 6);
  CHECK(r0.dim_estimate == 0.0);
  CHECK_FALSE(r0.d_n);
  const Mat2 weak = Mat2::diag(1 / 1.2, 1.2);
  const IfsSystem many({"1", "2", "3", "4", "5", "6", "7", "8"},
                       {weak, weak, weak, weak, weak, weak, weak, weak});
  const auto r1 = attractor_dimension(many, kAroundHalfPi, 5);
  CHECK(r1.s_a_estimate >= 2.0);
  CHECK(r1.dim_estimate == 1.0);
  CHECK_THROWS_AS(attractor_dimension(IfsSystem({"1"}, {Mat2::rotation(0.3)}), kAroundHalfPi, 4),
                  Error);
}

TEST_CASE("d_n sums above the root vanish") {
  const auto tri = oracle::triangular();
  const Multicone u = oracle_arc();
  const double d = solve_dn(tri, u, 12);
  double prev = 1e300;
  for (int n = 2; n <= 12; n += 2) {
    double sum = 0.0;
    for_each_word_of_length(tri, n, {}, [&](const Word& w, const ScaledMat2&) {
      const auto g = word_geometry(tri, u, w);
      sum += std::pow(g.image_arc_lengths[0], d + 0.1);
    });
    CHECK(sum < prev);
    prev = sum;
  }
  CHECK(prev < 0.5);
}

TEST_CASE("attractor_sample") {
  const auto tri = oracle::triangular();
  const auto pts = attractor_sample(tri, oracle_arc(), 10);
  REQUIRE(pts.size() == 1024);
  const double lo = std::atan(3.0);
  for (const auto& p : pts) {
    CHECK(p.theta >= lo - 1e-6);
    CHECK(p.theta <= kPi / 2 + 1e-6);
  }
  const IfsSystem single({"1"}, {Mat2::diag(0.5, 2)});
  const auto one = attractor_sample(single, kAroundHalfPi, 8);
  REQUIRE(one.size() == 1);
  CHECK(std::fabs(one[0].theta - kPi / 2) <= kPi * std::pow(4.0, -8) * 10);
  CHECK_THROWS_AS(attractor_sample(IfsSystem({"1"}, {Mat2::rotation(0.3)}), kAroundHalfPi, 3),
                  Error);
}

TEST_CASE("box_counting") {
  std::vector<double> scales;
  for (int k = 4; k <= 10; ++k) scales.push_back(std::ldexp(1.0, -k));
  CHECK(box_counting({{1.0}}, scales) == 0.0);
  std::vector<ProjPoint> grid;
  for (int i = 0; i < 4096; ++i) grid.push_back({kPi * (i + 0.5) / 4096});
  CHECK(box_counting(grid, scales) == doctest::Approx(1.0).epsilon(0.05));
  const auto tri = oracle::triangular();
  std::vector<double> fine;
  for (int k = 4; k <= 16; ++k) fine.push_back(std::ldexp(1.0, -k));
  const double slope = box_counting(attractor_sample(tri, oracle_arc(), 12), fine);
  MESSAGE("box-counting slope " << slope);
  CHECK(std::fabs(slope - 0.5) <= 0.1);
  CHECK_THROWS_AS(box_counting({}, scales), Error);
  CHECK_THROWS_AS(box_counting(grid, {0.1}), Error);
  CHECK_THROWS_AS(box_counting(grid, {0.1, 0.1}), Error);
}
