#include "hypercone/cone_nd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hypercone/error.hpp"
#include "hypercone/rng.hpp"
#include "hypercone/words.hpp"

namespace hypercone {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double hilbert_from_coords(const Vec& xi, const Vec& eta) {
  double up = 0.0, down = 0.0;
  for (Eigen::Index i = 0; i < xi.size(); ++i) {
    up = std::max(up, xi(i) / eta(i));
    down = std::max(down, eta(i) / xi(i));
  }
  return std::max(0.0, std::log(up * down));
}

void require_square(const Mat& a, Eigen::Index size, const char* what) {
  if (a.rows() != size || a.cols() != size) {
    throw Error(ErrorKind::InvalidInput, std::string(what) + ": matrix has the wrong size");
  }
  if (!a.allFinite()) throw Error(ErrorKind::InvalidInput, std::string(what) + ": non-finite entries");
}

}  // namespace

SimplicialCone::SimplicialCone(Mat basis) : basis_(std::move(basis)) {
  if (basis_.rows() < 2 || basis_.rows() != basis_.cols()) {
    throw Error(ErrorKind::InvalidInput, "cone basis must be a square matrix of size >= 2");
  }
  if (!basis_.allFinite()) throw Error(ErrorKind::InvalidInput, "cone basis has non-finite entries");
  double scale = 1.0;
  for (Eigen::Index j = 0; j < basis_.cols(); ++j) scale *= basis_.col(j).norm();
  if (!(std::fabs(basis_.determinant()) > 1e-12 * scale)) {
    throw Error(ErrorKind::Singular, "cone basis vectors are linearly dependent");
  }
  lu_.compute(basis_);
}

SimplicialCone SimplicialCone::orthant(int d) {
  if (d < 1) throw Error(ErrorKind::InvalidInput, "orthant needs d >= 1");
  return SimplicialCone(Mat::Identity(d + 1, d + 1));
}

Vec SimplicialCone::barycentric(const Vec& x) const {
  if (x.size() != d()) throw Error(ErrorKind::InvalidInput, "cross-section point has the wrong size");
  Vec h(d() + 1);
  h.head(d()) = x;
  h(d()) = 1.0;
  return coordinates(h);
}

Vec SimplicialCone::section_point(const Vec& xi) const {
  const Vec v = basis_ * xi;
  if (!(std::fabs(v(d())) > 1e-14 * v.norm())) {
    throw Error(ErrorKind::Horizon, "ray does not meet the cross-section");
  }
  return v.head(d()) / v(d());
}

Vec SimplicialCone::barycenter() const {
  Vec xi(d() + 1);
  for (Eigen::Index j = 0; j < xi.size(); ++j) xi(j) = 1.0 / basis_.col(j).norm();
  const Vec v = basis_ * xi;
  if (!(v(d()) > 0.0)) {
    throw Error(ErrorKind::Precondition, "cone is not contained in the halfspace x_{d+1} > 0");
  }
  return v.head(d()) / v(d());
}

ConeMapReport strict_invariance_cone(const Mat& a, const SimplicialCone& cone,
                                     const Tolerances& tol) {
  require_square(a, cone.d() + 1, "strict_invariance_cone");
  Eigen::FullPivLU<Mat> lu(a);
  if (!lu.isInvertible()) throw Error(ErrorKind::Singular, "strict_invariance_cone: A is singular");
  ConeMapReport r;
  r.coordinates = cone.coordinates(Mat(a * cone.basis()));
  const Mat& c = r.coordinates;
  r.invariant = true;
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    const double row_scale = c.row(i).cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      if (!(c(i, j) > tol.strictness_tol * row_scale)) r.invariant = false;
    }
  }
  if (!r.invariant) {
    r.hilbert_diameter = kInf;
    r.birkhoff_coefficient = 1.0;
    return r;
  }
  double diam = 0.0;
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    for (Eigen::Index k = j + 1; k < c.cols(); ++k) {
      diam = std::max(diam, hilbert_from_coords(c.col(j), c.col(k)));
    }
  }
  r.hilbert_diameter = diam;
  r.birkhoff_coefficient = std::tanh(diam / 4.0);
  return r;
}

Vec cross_section_map(const Mat& a, const Vec& x) {
  const Eigen::Index d = x.size();
  require_square(a, d + 1, "cross_section_map");
  Vec h(d + 1);
  h.head(d) = x;
  h(d) = 1.0;
  const Vec y = a * h;
  if (!(std::fabs(y(d)) > 1e-14 * y.norm())) {
    throw Error(ErrorKind::Horizon, "cross_section_map: A(x,1) has vanishing last coordinate");
  }
  return y.head(d) / y(d);
}

double hilbert_metric(const SimplicialCone& cone, const Vec& x, const Vec& y) {
  const Vec xi = cone.barycentric(x), eta = cone.barycentric(y);
  // Rays on the far side of the section have all-negative coordinates.
  const double sx = xi.sum() < 0 ? -1.0 : 1.0, sy = eta.sum() < 0 ? -1.0 : 1.0;
  if (!((sx * xi).minCoeff() > 0.0) || !((sy * eta).minCoeff() > 0.0)) {
    throw Error(ErrorKind::Boundary, "hilbert_metric: point is not inside the cone");
  }
  return hilbert_from_coords(sx * xi, sy * eta);
}

ConeContraction cone_contraction_estimate(const std::vector<Mat>& system, const SimplicialCone& cone,
                                          int n, int sample_count, std::uint64_t seed,
                                          const Budget& budget) {
  if (system.empty()) throw Error(ErrorKind::InvalidInput, "cone_contraction_estimate: no matrices");
  if (n < 1 || sample_count < 1) {
    throw Error(ErrorKind::InvalidInput, "cone_contraction_estimate: n and sample_count must be >= 1");
  }
  ConeContraction out;
  for (const auto& a : system) {
    const auto rep = strict_invariance_cone(a, cone);
    if (!rep.invariant) {
      throw Error(ErrorKind::InvarianceViolation, "a matrix does not map the cone strictly inside");
    }
    out.max_birkhoff = std::max(out.max_birkhoff, rep.birkhoff_coefficient);
  }
  require_budget(system.size(), n, budget, "cone word enumeration");

  const int d = cone.d();
  SplitMix64 rng(seed);
  std::vector<Vec> samples;
  for (int s = 0; s < sample_count; ++s) {
    Vec xi(d + 1);
    for (int k = 0; k <= d; ++k) xi(k) = 0.05 + rng.uniform();
    samples.push_back(cone.section_point(xi));
  }

  out.max_derivative.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<Mat> stack{Mat::Identity(d + 1, d + 1)};
  int depth = 0;
  auto jacobian_norm = [&](const Mat& a, const Vec& x) {
    const Vec fx = cross_section_map(a, x);
    Mat jac(d, d);
    for (int i = 0; i < d; ++i) {
      const double h = 1e-6 * std::max(1.0, std::fabs(x(i)));
      Vec xp = x;
      xp(i) += h;
      jac.col(i) = (cross_section_map(a, xp) - fx) / h;
    }
    return d == 1 ? std::fabs(jac(0, 0)) : Eigen::JacobiSVD<Mat>(jac).singularValues()(0);
  };
  auto recurse = [&](auto&& self) -> void {
    for (const auto& a : system) {
      Mat p = stack.back() * a;
      p /= p.cwiseAbs().maxCoeff();  // projective maps ignore scale
      stack.push_back(p);
      ++depth;
      double& slot = out.max_derivative[static_cast<std::size_t>(depth - 1)];
      for (const auto& x : samples) slot = std::max(slot, jacobian_norm(p, x));
      if (depth < n) self(self);
      --depth;
      stack.pop_back();
    }
  };
  recurse(recurse);

  // Least-squares slope of log max ||f_w'|| against |w|.
  if (n == 1) {
    out.gamma = out.max_derivative[0];
  } else {
    double mk = 0.0, ml = 0.0;
    for (int k = 1; k <= n; ++k) {
      mk += k;
      ml += std::log(out.max_derivative[static_cast<std::size_t>(k - 1)]);
    }
    mk /= n;
    ml /= n;
    double sxx = 0.0, sxy = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double l = std::log(out.max_derivative[static_cast<std::size_t>(k - 1)]);
      sxx += (k - mk) * (k - mk);
      sxy += (k - mk) * (l - ml);
    }
    out.gamma = std::exp(sxy / sxx);
  }
  out.c = 0.0;
  for (int k = 1; k <= n; ++k) {
    out.c = std::max(out.c, out.max_derivative[static_cast<std::size_t>(k - 1)] / std::pow(out.gamma, k));
  }
  out.contracting = out.gamma < 1.0;
  return out;
}

}  // namespace hypercone
