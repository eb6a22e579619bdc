#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hypercone/cone_nd.hpp"
#include "hypercone/error.hpp"
#include "hypercone/ifs_core.hpp"
#include "hypercone/rng.hpp"
#include "oracles.hpp"

using namespace hypercone;

namespace {

Mat random_positive(SplitMix64& rng, int size) {
  Mat m(size, size);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) m(i, j) = 0.1 + rng.uniform();
  return m;
}

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec vec1(double a) {
  Vec v(1);
  v << a;
  return v;
}

// Interior point of the orthant section: positive coordinates in R^d.
Vec random_inside(SplitMix64& rng, int d) {
  Vec x(d);
  for (int i = 0; i < d; ++i) x(i) = 0.02 + 5.0 * rng.uniform();
  return x;
}

// Hilbert distance on the segment (a, b) by the cross-ratio formula.
double segment_hilbert(double x, double y, double a, double b) {
  return std::fabs(std::log(((y - a) * (b - x)) / ((x - a) * (b - y))));
}

}  // namespace

TEST_CASE("cone basis validation") {
  CHECK_THROWS_AS(SimplicialCone(Mat::Zero(3, 3)), Error);
  Mat dep(2, 2);
  dep << 1, 2, 2, 4;
  CHECK_THROWS_AS(SimplicialCone{dep}, Error);
  CHECK_THROWS_AS(SimplicialCone(Mat::Identity(2, 3)), Error);
  CHECK_THROWS_AS(SimplicialCone(Mat::Identity(1, 1)), Error);
  CHECK(SimplicialCone::orthant(3).d() == 3);
}

TEST_CASE("strict_invariance_cone examples") {
  const auto orth = SimplicialCone::orthant(2);
  Mat pos(3, 3);
  pos << 1, 2, 1, 1, 1, 3, 2, 1, 1;
  const auto r = strict_invariance_cone(pos, orth);
  CHECK(r.invariant);
  CHECK(std::isfinite(r.hilbert_diameter));
  CHECK(r.birkhoff_coefficient == doctest::Approx(std::tanh(r.hilbert_diameter / 4)));
  CHECK(r.birkhoff_coefficient < 1.0);
  CHECK((r.coordinates - pos).norm() < 1e-14);

  const auto id = strict_invariance_cone(Mat::Identity(3, 3), orth);
  CHECK_FALSE(id.invariant);
  CHECK(std::isinf(id.hilbert_diameter));
  CHECK(id.birkhoff_coefficient == 1.0);

  Mat sing = Mat::Ones(3, 3);
  CHECK_THROWS_AS(strict_invariance_cone(sing, orth), Error);
  CHECK_THROWS_AS(strict_invariance_cone(Mat::Identity(2, 2), orth), Error);

  // Image vertices in a non-standard basis.
  Mat basis(2, 2);
  basis << 1, -1, 1, 1;
  const SimplicialCone seg(basis);
  Mat a(2, 2);
  a << 2, 0.5, 0.5, 2;  // maps (1,1) to itself and squeezes (-1,1) inward
  const auto s = strict_invariance_cone(a, seg);
  CHECK_FALSE(s.invariant);  // (1,1) is an eigenvector on the boundary
}

TEST_CASE("claim: positive combinations keep independence") {
  SplitMix64 rng(17);
  for (int rep = 0; rep < 500; ++rep) {
    Mat y(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) y(i, j) = 2 * rng.uniform() - 1;
    if (std::fabs(y.determinant()) < 1e-3) continue;
    Vec a(3);
    for (int k = 0; k < 3; ++k) a(k) = 3 * rng.uniform();
    const Vec w = y * a;
    Mat shifted = y;
    for (int j = 0; j < 3; ++j) shifted.col(j) += w;
    // det(Y + w 1^T) = det(Y)(1 + sum a_k)
    CHECK(shifted.determinant() == doctest::Approx(y.determinant() * (1 + a.sum())).epsilon(1e-9));
    CHECK(std::fabs(shifted.determinant()) > 0.0);
  }
}

TEST_CASE("cross_section_map examples") {
  const Vec x = vec2(0.3, -1.2);
  CHECK((cross_section_map(Mat::Identity(3, 3), x) - x).norm() == 0.0);

  // All-ones plus identity at the origin: A(0,0,1) = (1,1,2).
  Mat a = Mat::Ones(3, 3) + Mat::Identity(3, 3);
  const Vec y = cross_section_map(a, vec2(0, 0));
  CHECK(y(0) == doctest::Approx(0.5));
  CHECK(y(1) == doctest::Approx(0.5));

  Mat h(2, 2);
  h << 1, 0, 1, -1;
  CHECK_THROWS_AS(cross_section_map(h, vec1(1.0)), Error);

  SplitMix64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const Mat2 m = oracle::random_sl2(rng);
    Mat e(2, 2);
    e << m.a, m.b, m.c, m.d;
    const double t = 0.2 + 2.7 * rng.uniform();
    const ProjPoint p{t};
    const double xc = cot_chart(p);
    const double via_cone = cross_section_map(e, vec1(xc))(0);
    CHECK(via_cone == doctest::Approx(mobius_act(m, xc)).epsilon(1e-9));
    const double via_angle = cot_chart(project_act(m, p));
    if (std::fabs(via_angle) < 1e6) CHECK(via_cone == doctest::Approx(via_angle).epsilon(1e-8));
  }
}

TEST_CASE("cross_section_map composes") {
  SplitMix64 rng(5);
  for (int i = 0; i < 300; ++i) {
    const Mat a = random_positive(rng, 3), b = random_positive(rng, 3);
    const Vec x = random_inside(rng, 2);
    const Vec lhs = cross_section_map(a * b, x);
    const Vec rhs = cross_section_map(a, cross_section_map(b, x));
    CHECK((lhs - rhs).norm() <= 1e-9 * (1 + lhs.norm()));
  }
}

TEST_CASE("hilbert_metric") {
  const auto orth = SimplicialCone::orthant(2);
  const Vec x = vec2(0.5, 2.0), y = vec2(3.0, 0.1);
  CHECK(hilbert_metric(orth, x, x) == 0.0);
  CHECK(hilbert_metric(orth, x, y) == hilbert_metric(orth, y, x));
  CHECK(hilbert_metric(orth, x, y) > 0.0);
  CHECK_THROWS_AS(hilbert_metric(orth, vec2(0.0, 1.0), y), Error);
  CHECK_THROWS_AS(hilbert_metric(orth, vec2(-1.0, 1.0), y), Error);

  // d = 1 quadrant: section is (0, inf), distance |log(x / y)|.
  const auto quad = SimplicialCone::orthant(1);
  CHECK(hilbert_metric(quad, vec1(0.5), vec1(4.0)) == doctest::Approx(std::log(8.0)));

  // d = 1 segment cone: section (-1, 1) with the cross-ratio formula.
  Mat basis(2, 2);
  basis << 1, -1, 1, 1;
  const SimplicialCone seg(basis);
  SplitMix64 rng(9);
  for (int i = 0; i < 200; ++i) {
    const double u = 1.98 * rng.uniform() - 0.99, v = 1.98 * rng.uniform() - 0.99;
    CHECK(hilbert_metric(seg, vec1(u), vec1(v)) == doctest::Approx(segment_hilbert(u, v, -1, 1)).epsilon(1e-10));
  }
  CHECK(seg.barycenter()(0) == doctest::Approx(0.0));

  // Triangle inequality.
  for (int i = 0; i < 2000; ++i) {
    const Vec p = random_inside(rng, 2), q = random_inside(rng, 2), r = random_inside(rng, 2);
    CHECK(hilbert_metric(orth, p, r) <= hilbert_metric(orth, p, q) + hilbert_metric(orth, q, r) + 1e-9);
  }
}

TEST_CASE("Birkhoff contraction on random positive pairs") {
  const auto orth = SimplicialCone::orthant(2);
  SplitMix64 rng(23);
  int violations = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const Mat a = random_positive(rng, 3);
    const auto r = strict_invariance_cone(a, orth);
    REQUIRE(r.invariant);
    for (int k = 0; k < 5; ++k) {
      const Vec x = random_inside(rng, 2), y = random_inside(rng, 2);
      const double before = hilbert_metric(orth, x, y);
      const double after = hilbert_metric(orth, cross_section_map(a, x), cross_section_map(a, y));
      if (after > r.birkhoff_coefficient * before + 1e-12) ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("cone_contraction_estimate") {
  // Single positive 2x2 matrix: |f_{A^k}'| decays like (lambda_2 / lambda_1)^k.
  Mat a(2, 2);
  a << 2, 1, 1, 1;
  const auto quad = SimplicialCone::orthant(1);
  const auto one = cone_contraction_estimate({a}, quad, 10, 50, 1);
  const double ratio = (3 - std::sqrt(5.0)) / (3 + std::sqrt(5.0));
  CHECK(one.contracting);
  CHECK(one.gamma == doctest::Approx(ratio).epsilon(0.02));
  // On x >= 0 the chart derivative peaks at x = 0 (theta = pi/2); transport
  // project_derivative through x = cot(theta): f' = phi'(theta) sin^2(theta) / sin^2(phi theta).
  Mat2 m = Mat2::identity();
  for (int k = 1; k <= 10; ++k) {
    m = m * Mat2{2, 1, 1, 1};
    const ProjPoint top{kPi / 2};
    const double s = std::sin(project_act(m, top).theta);
    const double sup = project_derivative(m, top) / (s * s);
    const double got = one.max_derivative[static_cast<std::size_t>(k - 1)];
    CHECK(got <= sup * (1 + 1e-4));
    CHECK(got > 0.0);
  }

  SplitMix64 rng(29);
  const Mat b = random_positive(rng, 3), c = random_positive(rng, 3);
  const auto orth = SimplicialCone::orthant(2);
  const auto two = cone_contraction_estimate({b, c}, orth, 6, 20, 7);
  CHECK(two.contracting);
  CHECK(two.gamma <= two.max_birkhoff + 0.05);
  CHECK(two.c > 0.0);

  CHECK_THROWS_AS(cone_contraction_estimate({b, Mat::Identity(3, 3)}, orth, 3, 5, 1), Error);
  try {
    cone_contraction_estimate({Mat::Identity(3, 3)}, orth, 3, 5, 1);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvarianceViolation);
  }
}
