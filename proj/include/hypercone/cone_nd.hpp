#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hypercone/config.hpp"

namespace hypercone {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Cone spanned by the columns v_1..v_{d+1} of an invertible basis matrix.
/// Cross-section points x in R^d stand for the ray through (x, 1).
class SimplicialCone {
 public:
  explicit SimplicialCone(Mat basis);
  static SimplicialCone orthant(int d);

  const Mat& basis() const { return basis_; }
  int d() const { return static_cast<int>(basis_.rows()) - 1; }
  /// Coordinates of v in the basis {v_j}.
  Vec coordinates(const Vec& v) const { return lu_.solve(v); }
  Mat coordinates(const Mat& m) const { return lu_.solve(m); }
  /// Cone coordinates of the cross-section point x, i.e. of (x, 1).
  Vec barycentric(const Vec& x) const;
  /// Cross-section point of the central ray sum_j v_j / ||v_j||.
  Vec barycenter() const;
  /// Cross-section point of the ray V xi; throws Horizon when it misses the section.
  Vec section_point(const Vec& xi) const;

 private:
  Mat basis_;
  Eigen::FullPivLU<Mat> lu_;
};

struct ConeMapReport {
  bool invariant = false;
  /// Column j holds the coordinates of A v_j in the basis.
  Mat coordinates;
  /// Hilbert diameter of the image simplex; +infinity unless strictly inside.
  double hilbert_diameter = 0.0;
  /// tanh(diameter / 4), 1 when the diameter is infinite.
  double birkhoff_coefficient = 1.0;
};

ConeMapReport strict_invariance_cone(const Mat& a, const SimplicialCone& cone,
                                     const Tolerances& tol = {});

/// f_A(x) = P_d(A(x,1) / A(x,1)_{d+1}).
Vec cross_section_map(const Mat& a, const Vec& x);

/// log(max_i xi_i/eta_i * max_i eta_i/xi_i) on cone coordinates of x and y.
double hilbert_metric(const SimplicialCone& cone, const Vec& x, const Vec& y);

struct ConeContraction {
  double c = 0.0;
  double gamma = 0.0;
  /// max over |w| = k and samples of ||f_w'(x)||, k = 1..n.
  std::vector<double> max_derivative;
  double max_birkhoff = 0.0;
  bool contracting = false;  // gamma < 1
};

/// Fits max ||f_w'|| <= C gamma^|w| over words up to length n.
ConeContraction cone_contraction_estimate(const std::vector<Mat>& system, const SimplicialCone& cone,
                                          int n, int sample_count, std::uint64_t seed,
                                          const Budget& budget = {});

}  // namespace hypercone
