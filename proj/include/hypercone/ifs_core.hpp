#pragma once

#include <array>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "hypercone/config.hpp"
#include "hypercone/error.hpp"

namespace hypercone {

inline constexpr double kPi = std::numbers::pi;

/// Real 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 rotation(double alpha);
  static constexpr Mat2 diag(double x, double y) { return {x, 0.0, 0.0, y}; }

  double det() const { return a * d - b * c; }
  double trace() const { return a + d; }
  bool finite() const;
  Mat2 transpose() const { return {a, c, b, d}; }
  /// Throws Singular when det == 0.
  Mat2 inverse() const;
  std::array<double, 2> apply(double x, double y) const {
    return {a * x + b * y, c * x + d * y};
  }

  friend Mat2 operator*(const Mat2& l, const Mat2& r) {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d,
            l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
  }
  friend Mat2 operator-(const Mat2& l, const Mat2& r) {
    return {l.a - r.a, l.b - r.b, l.c - r.c, l.d - r.d};
  }
  friend Mat2 operator*(double s, const Mat2& m) {
    return {s * m.a, s * m.b, s * m.c, s * m.d};
  }
  friend bool operator==(const Mat2&, const Mat2&) = default;
};

/// A point of the projective line, stored as an angle in [0, pi).
struct ProjPoint {
  double theta = 0.0;

  /// Reduces any finite angle into [0, pi) with a single correction step.
  static ProjPoint reduce(double angle);
  friend bool operator==(const ProjPoint&, const ProjPoint&) = default;
};

/// Arc distance on R / pi Z.
double proj_distance(ProjPoint x, ProjPoint y);

enum class MatrixClass { Hyperbolic, Parabolic, Elliptic };
const char* to_string(MatrixClass c);

/// Largest singular value, closed form.
double operator_norm(const Mat2& m);
/// Smallest singular value, closed form.
double min_singular_value(const Mat2& m);

/// Angle t_A of the unit eigenvector of A^T A for its smallest eigenvalue.
/// Throws AxisUndefined when ||A|| <= 1 + axis_tol (e.g. rotations).
ProjPoint contraction_axis(const Mat2& m, const Tolerances& tol = {});
/// Angle of the eigenvector of A^T A for its largest eigenvalue (no check).
ProjPoint expansion_axis(const Mat2& m);

ProjPoint project_act(const Mat2& m, ProjPoint x);
/// |phi_A'(theta)| = |det A| / ||A v(theta)||^2, which is ||A v||^{-2} on SL2.
double project_derivative(const Mat2& m, ProjPoint x);

/// Extended-real Moebius image; +infinity stands for the point at infinity.
double mobius_act(const Mat2& m, double x);
/// Chart psi(theta) = cos(theta) / sin(theta), with psi(0) = infinity.
double cot_chart(ProjPoint x);
ProjPoint cot_chart_inverse(double x);

MatrixClass classify(const Mat2& m, const Tolerances& tol = {});

/// Attracting fixed point of phi_A (eigenvector of the eigenvalue of largest
/// modulus).  Empty for elliptic and parabolic matrices.
std::optional<ProjPoint> attracting_fixed_point(const Mat2& m,
                                                const Tolerances& tol = {});

/// exp(log_scale) * m with ||m|| = 1.  Long products of SL2 matrices are kept
/// in this form so that nothing overflows; the determinant of the represented
/// matrix is det_sign (the factors are normalized to |det| = 1).
struct ScaledMat2 {
  Mat2 m = Mat2::identity();
  double log_scale = 0.0;
  int det_sign = 1;

  static ScaledMat2 from(const Mat2& a);
  double log_norm() const { return log_scale; }
  double norm() const;
  double trace() const;
  /// exp(log_scale) * m, throws Overflow above the cap.
  Mat2 dense(const Tolerances& tol = {}) const;

  friend ScaledMat2 operator*(const ScaledMat2& l, const ScaledMat2& r);
};

/// log |phi_A'(theta)| for the represented (unit-determinant) matrix.
double log_project_derivative(const ScaledMat2& a, ProjPoint x);

using Word = std::vector<std::size_t>;

/// Labelled family of SL2 matrices with optional probability weights.
/// General GL2 input is normalized to A / sqrt|det A| on construction; the
/// original determinants are retained for reporting.
class IfsSystem {
 public:
  IfsSystem(std::vector<std::string> labels, const std::vector<Mat2>& matrices,
            std::optional<std::vector<double>> weights = std::nullopt,
            const Tolerances& tol = {});

  std::size_t size() const { return matrices_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Mat2>& matrices() const { return matrices_; }
  const Mat2& matrix(std::size_t i) const { return matrices_.at(i); }
  const std::vector<double>& original_determinants() const { return dets_; }
  const std::optional<std::vector<double>>& weights() const { return weights_; }
  const Tolerances& tolerances() const { return tol_; }

  std::size_t index_of(const std::string& label) const;
  /// Parses a word.  Single-character labels may be concatenated ("121");
  /// otherwise symbols are separated by spaces or commas.
  Word parse_word(const std::string& text) const;
  std::string format_word(const Word& w) const;

 private:
  std::vector<std::string> labels_;
  std::vector<Mat2> matrices_;
  std::vector<double> dets_;
  std::optional<std::vector<double>> weights_;
  Tolerances tol_;
};

/// Validates a probability vector (positive entries summing to 1 +- 1e-12).
void check_probability_vector(const std::vector<double>& p);

/// A_{w1} ... A_{wn}; identity for the empty word.
Mat2 word_product(const IfsSystem& system, const Word& w);
ScaledMat2 word_product_scaled(const IfsSystem& system, const Word& w);

}  // namespace hypercone
