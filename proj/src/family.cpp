#include "hypercone/family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hypercone/error.hpp"
#include "hypercone/words.hpp"

namespace hypercone {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_grid(const MatrixFamily& f, const std::vector<double>& grid) {
  if (grid.empty()) throw Error(ErrorKind::InvalidInput, "t grid is empty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!std::isfinite(grid[k]) || grid[k] < f.t_lo || grid[k] > f.t_hi) {
      throw Error(ErrorKind::InvalidInput, "t grid leaves the parameter interval");
    }
    if (k > 0 && !(grid[k] > grid[k - 1])) {
      throw Error(ErrorKind::InvalidInput, "t grid must be strictly increasing");
    }
  }
}

// A_{i,t} without the interval check, so difference stencils may step past the ends.
std::vector<Mat> member_at(const MatrixFamily& f, double t) {
  const Mat& v = f.cone.basis();
  const Eigen::FullPivLU<Mat> lu(v);
  // (A V + t w 1^T) V^-1 = A + t w (1^T V^-1), exact at t = 0.
  const Eigen::RowVectorXd ones_vinv = Eigen::RowVectorXd::Ones(v.cols()) * lu.inverse();
  std::vector<Mat> out;
  out.reserve(f.base.size());
  for (std::size_t i = 0; i < f.base.size(); ++i) {
    out.push_back(f.base[i] + t * f.directions[i] * ones_vinv);
    if (!strict_invariance_cone(out.back(), f.cone).invariant) {
      throw Error(ErrorKind::InvarianceViolation,
                  "member " + f.labels[i] + " at t = " + std::to_string(t) + " is not strictly invariant");
    }
  }
  return out;
}

// Product of the word repeated periodically up to `depth` letters, renormalized.
Mat periodic_product(const std::vector<Mat>& sys, const Word& w, int depth) {
  const auto size = sys[0].rows();
  Mat p = Mat::Identity(size, size);
  for (int k = 0; k < depth; ++k) {
    p = p * sys[w[static_cast<std::size_t>(k) % w.size()]];
    p /= p.cwiseAbs().maxCoeff();
  }
  return p;
}

void check_word(const Word& w, std::size_t alphabet) {
  if (w.empty()) throw Error(ErrorKind::InvalidInput, "word is empty");
  for (auto s : w) {
    if (s >= alphabet) throw Error(ErrorKind::UnknownLabel, "word uses a symbol outside the alphabet");
  }
}

}  // namespace

MatrixFamily make_family(std::vector<std::string> labels, std::vector<Mat> base, SimplicialCone cone,
                         std::optional<std::vector<Vec>> directions, double t_lo, double t_hi) {
  if (base.empty()) throw Error(ErrorKind::InvalidInput, "family needs at least one matrix");
  if (labels.size() != base.size()) throw Error(ErrorKind::InvalidInput, "labels and matrices differ in count");
  if (!std::isfinite(t_lo) || !std::isfinite(t_hi) || !(t_lo <= t_hi)) {
    throw Error(ErrorKind::InvalidInput, "t_range must be finite with lo <= hi");
  }
  const auto size = cone.basis().rows();
  for (const auto& a : base) {
    if (a.rows() != size || a.cols() != size || !a.allFinite()) {
      throw Error(ErrorKind::InvalidInput, "family matrices must match the cone dimension");
    }
  }
  std::vector<Vec> dirs;
  if (directions) {
    dirs = std::move(*directions);
    if (dirs.size() != base.size()) throw Error(ErrorKind::InvalidInput, "one direction per matrix required");
  } else {
    for (const auto& a : base) dirs.push_back((a * cone.basis()).rowwise().sum());
  }
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (dirs[i].size() != size || !dirs[i].allFinite()) {
      throw Error(ErrorKind::InvalidInput, "direction vector has the wrong size");
    }
    if (!strict_invariance_cone(base[i], cone).invariant) {
      throw Error(ErrorKind::InvarianceViolation, "base matrix " + labels[i] + " is not strictly invariant");
    }
    const Mat img = base[i] * cone.basis();
    const Eigen::FullPivLU<Mat> lu(img);
    if (!lu.isInvertible()) throw Error(ErrorKind::Singular, "base matrix " + labels[i] + " is singular");
    const Vec c = lu.solve(dirs[i]);
    if (!(c.minCoeff() > 1e-12 * c.cwiseAbs().maxCoeff())) {
      throw Error(ErrorKind::InvalidInput,
                  "direction for " + labels[i] + " is not strictly inside the image cone");
    }
    for (std::size_t j = 0; j < i; ++j) {
      const double cos = dirs[i].dot(dirs[j]) / (dirs[i].norm() * dirs[j].norm());
      if (std::fabs(cos) > 1.0 - 1e-12) {
        throw Error(ErrorKind::InvalidInput, "directions " + labels[j] + " and " + labels[i] + " are parallel");
      }
    }
  }
  return MatrixFamily{std::move(labels), std::move(base), std::move(cone), std::move(dirs), t_lo, t_hi};
}

std::vector<Mat> family_member(const MatrixFamily& family, double t) {
  if (!(t >= family.t_lo && t <= family.t_hi)) {
    throw Error(ErrorKind::InvalidInput, "t outside the family's parameter interval");
  }
  return member_at(family, t);
}

NaturalProjection natural_projection_point(const std::vector<Mat>& system, const SimplicialCone& cone,
                                           const Word& word, int depth, const Vec& x0) {
  if (system.empty()) throw Error(ErrorKind::InvalidInput, "natural_projection_point: empty system");
  if (depth < 0) throw Error(ErrorKind::InvalidInput, "depth must be >= 0");
  if (x0.size() != cone.d()) throw Error(ErrorKind::InvalidInput, "base point has the wrong size");
  check_word(word, system.size());
  for (const auto& a : system) {
    if (!strict_invariance_cone(a, cone).invariant) {
      throw Error(ErrorKind::InvarianceViolation, "natural_projection_point: system is not strictly invariant");
    }
  }
  NaturalProjection out;
  if (depth == 0) {
    out.point = x0;
    return out;
  }
  const Mat prev = periodic_product(system, word, depth - 1);
  const Mat last = system[word[static_cast<std::size_t>(depth - 1) % word.size()]];
  out.point = cross_section_map(prev * last, x0);
  out.last_step = (out.point - cross_section_map(prev, x0)).norm();
  return out;
}

DeltaCurve delta_curve(const MatrixFamily& family, const Word& i, const Word& j,
                       const std::vector<double>& t_grid, int depth) {
  check_word(i, family.base.size());
  check_word(j, family.base.size());
  if (i.size() != j.size()) throw Error(ErrorKind::InvalidInput, "delta_curve: words differ in length");
  if (i[0] == j[0]) throw Error(ErrorKind::Precondition, "delta_curve: words must differ in the first symbol");
  if (depth < 1) throw Error(ErrorKind::InvalidInput, "delta_curve: depth must be >= 1");
  require_grid(family, t_grid);
  const Vec x0 = family.cone.barycenter();
  DeltaCurve out{i, j, t_grid, {}, depth};
  for (double t : t_grid) {
    const auto sys = family_member(family, t);
    out.values.push_back(natural_projection_point(sys, family.cone, i, depth, x0).point -
                         natural_projection_point(sys, family.cone, j, depth, x0).point);
  }
  return out;
}

int default_depth(const MatrixFamily& family, double t, int min_depth) {
  const auto sys = family_member(family, t);
  const auto est = cone_contraction_estimate(sys, family.cone, 4, 16, 0);
  if (!est.contracting) {
    throw Error(ErrorKind::Precondition, "family member does not contract; cannot pick a depth");
  }
  const double need = std::log(1e-10 / std::max(est.c, 1.0)) / std::log(est.gamma);
  return std::clamp(static_cast<int>(std::ceil(need)), std::max(min_depth, 1), 400);
}

std::vector<double> central_weights(int p) {
  if (p < 0) throw Error(ErrorKind::InvalidInput, "derivative order must be >= 0");
  const int r = (p + 1) / 2;
  const int count = 2 * r + 1;
  std::vector<double> nodes(static_cast<std::size_t>(count));
  for (int m = 0; m < count; ++m) nodes[static_cast<std::size_t>(m)] = m - r;
  // Fornberg's recursion; c[m][nu] holds weights for derivative m on the first nodes.
  std::vector<std::vector<double>> c(static_cast<std::size_t>(p + 1),
                                     std::vector<double>(static_cast<std::size_t>(count), 0.0));
  c[0][0] = 1.0;
  double c1 = 1.0;
  for (int n = 1; n < count; ++n) {
    const double xn = nodes[static_cast<std::size_t>(n)];
    double c2 = 1.0;
    for (int nu = 0; nu < n; ++nu) {
      const double c3 = xn - nodes[static_cast<std::size_t>(nu)];
      c2 *= c3;
      for (int m = std::min(n, p); m >= 0; --m) {
        const auto um = static_cast<std::size_t>(m), unu = static_cast<std::size_t>(nu);
        if (nu == n - 1) {
          const double prev = m > 0 ? c[um - 1][unu] : 0.0;
          c[um][static_cast<std::size_t>(n)] = c1 * (m * prev - nodes[unu] * c[um][unu]) / c2;
        }
        c[um][unu] = (xn * c[um][unu] - (m > 0 ? m * c[um - 1][unu] : 0.0)) / c3;
      }
    }
    c1 = c2;
  }
  return c[static_cast<std::size_t>(p)];
}

TransversalityProbe transversality_probe(const MatrixFamily& family, int n, int k,
                                         const std::vector<double>& t_grid, double h, int depth,
                                         const Budget& budget) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "transversality_probe: n must be >= 1");
  if (k < 0) throw Error(ErrorKind::InvalidInput, "transversality_probe: k must be >= 0");
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorKind::InvalidInput, "transversality_probe: h must be > 0");
  require_grid(family, t_grid);
  require_budget(family.base.size(), n, budget, "transversality words");

  TransversalityProbe out;
  if (h < 1e-4) out.warning = "step h below 1e-4; differences are dominated by rounding";
  out.depth = depth > 0 ? std::max(depth, n) : default_depth(family, t_grid[t_grid.size() / 2], n);

  const auto words = all_words(family.base.size(), n);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < words.size(); ++a)
    for (std::size_t b = a + 1; b < words.size(); ++b)
      if (words[a][0] != words[b][0]) pairs.emplace_back(a, b);
  if (static_cast<double>(pairs.size()) * static_cast<double>(t_grid.size()) >
      64.0 * static_cast<double>(budget.enumeration_cap)) {
    throw Error(ErrorKind::Budget, "transversality_probe: pairs x grid exceeds the budget");
  }
  out.c_hat = kInf;
  if (pairs.empty()) {
    out.warning = "no pairs with distinct first symbols";
    return out;
  }

  const int r = (k + 1) / 2;
  std::vector<std::vector<double>> weights;
  for (int p = 0; p <= k; ++p) weights.push_back(central_weights(p));
  const Vec x0 = family.cone.barycenter();

  for (double t : t_grid) {
    // values[s][w]: F_w at t + (s - r) h
    std::vector<std::vector<Vec>> values;
    for (int s = -r; s <= r; ++s) {
      const auto sys = member_at(family, t + s * h);
      std::vector<Vec> row;
      row.reserve(words.size());
      for (const auto& w : words) row.push_back(cross_section_map(periodic_product(sys, w, out.depth), x0));
      values.push_back(std::move(row));
    }
    for (const auto& [a, b] : pairs) {
      double best = 0.0;
      for (int p = 0; p <= k; ++p) {
        const auto& wts = weights[static_cast<std::size_t>(p)];
        const int rp = (p + 1) / 2;
        Vec acc = Vec::Zero(x0.size());
        for (int m = -rp; m <= rp; ++m) {
          const auto s = static_cast<std::size_t>(m + r);
          acc += wts[static_cast<std::size_t>(m + rp)] * (values[s][a] - values[s][b]);
        }
        best = std::max(best, acc.norm() / std::pow(h, p));
      }
      if (best < out.c_hat) {
        out.c_hat = best;
        out.worst_t = t;
        out.witness = WordPair{words[a], words[b]};
      }
    }
  }
  return out;
}

std::vector<ScanRow> family_scan(const MatrixFamily& family, const std::vector<double>& t_grid, int n,
                                 const SeparationOptions& opt, const Budget& budget) {
  require_grid(family, t_grid);
  std::vector<ScanRow> rows;
  for (double t : t_grid) {
    const auto prof = separation_profile(family_member(family, t), n, opt, budget);
    rows.push_back({t, prof.c_n, prof.min_gap_strong});
  }
  return rows;
}

}  // namespace hypercone
