#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hypercone/cone_nd.hpp"
#include "hypercone/config.hpp"
#include "hypercone/ifs_core.hpp"
#include "hypercone/separation.hpp"

namespace hypercone {

/// A_{i,t} v_j = A_i v_j + t w_i for every basis ray v_j of the cone.
struct MatrixFamily {
  std::vector<std::string> labels;
  std::vector<Mat> base;
  SimplicialCone cone;
  std::vector<Vec> directions;
  double t_lo = 0.0;
  double t_hi = 1.0;
};

/// Validates the base system and the directions.  Missing directions default
/// to w_i = sum_j A_i v_j.  Each w_i must have strictly positive coordinates in
/// the basis {A_i v_j}, and no two directions may be parallel.
MatrixFamily make_family(std::vector<std::string> labels, std::vector<Mat> base, SimplicialCone cone,
                         std::optional<std::vector<Vec>> directions, double t_lo, double t_hi);

/// Matrices A_{i,t}; throws InvarianceViolation when one fails strict invariance.
std::vector<Mat> family_member(const MatrixFamily& family, double t);

struct NaturalProjection {
  Vec point;
  /// ||F_depth - F_{depth-1}||, 0 at depth 0.
  double last_step = 0.0;
};

/// f_{i_1} o ... o f_{i_depth}(x0), the word repeated periodically up to depth.
NaturalProjection natural_projection_point(const std::vector<Mat>& system, const SimplicialCone& cone,
                                           const Word& word, int depth, const Vec& x0);

struct DeltaCurve {
  Word i;
  Word j;
  std::vector<double> t;
  std::vector<Vec> values;
  int depth = 0;
};

/// Delta_{i,j}(t) = F_i(t) - F_j(t) with base point the cross-section barycenter.
DeltaCurve delta_curve(const MatrixFamily& family, const Word& i, const Word& j,
                       const std::vector<double>& t_grid, int depth);

/// Depth at which C gamma^depth < 1e-10, from cone_contraction_estimate at t.
int default_depth(const MatrixFamily& family, double t, int min_depth = 1);

/// Central finite-difference weights for the p-th derivative on offsets
/// -r..r with r = ceil(p/2) (width 2 ceil(p/2) + 1).
std::vector<double> central_weights(int p);

struct TransversalityProbe {
  double c_hat = 0.0;
  double worst_t = 0.0;
  std::optional<WordPair> witness;
  int depth = 0;
  std::optional<std::string> warning;
};

/// min over grid t and pairs i, j in Lambda^n with i_1 != j_1 of
/// max_{p <= k} ||Delta^{(p)}(t)||.  depth 0 picks default_depth.
TransversalityProbe transversality_probe(const MatrixFamily& family, int n, int k,
                                         const std::vector<double>& t_grid, double h = 1e-3,
                                         int depth = 0, const Budget& budget = {});

struct ScanRow {
  double t = 0.0;
  std::optional<double> c_n;
  double min_gap = 0.0;
};

std::vector<ScanRow> family_scan(const MatrixFamily& family, const std::vector<double>& t_grid, int n,
                                 const SeparationOptions& opt = {}, const Budget& budget = {});

}  // namespace hypercone
