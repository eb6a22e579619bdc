#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hypercone/config.hpp"
#include "hypercone/ifs_core.hpp"
#include "hypercone/multicone.hpp"

namespace hypercone {

/// Exact extremes of log |phi_A'| over a closed arc.  ||A v(theta)||^2 is a
/// shifted cosine in 2 theta, so the extremes sit at the endpoints or at the
/// contraction/expansion axes when those fall inside the arc.
struct DerivativeRange {
  double log_sup = 0.0;
  double log_inf = 0.0;
};
DerivativeRange derivative_range(const ScaledMat2& a, const Arc& arc);
DerivativeRange derivative_range(const ScaledMat2& a, const Multicone& u);

struct WordGeometry {
  Word word;
  /// |phi_w(U_k)| per component of U, radians.
  std::vector<double> image_arc_lengths;
  double sup_derivative = 0.0;
  double inf_derivative = 0.0;
};

WordGeometry word_geometry(const IfsSystem& system, const Multicone& u, const Word& w);

/// (1/n) log sum_{|w| = n} (sup_U |phi_w'|)^t.
double pressure_estimate(const IfsSystem& system, const Multicone& u, double t, int n,
                         const Budget& budget = {});

/// Zero of the finite-level pressure t -> pressure_estimate(t, n).
double bowen_root(const IfsSystem& system, const Multicone& u, int n, const Budget& budget = {});

/// Root d_n of sum_{|w| = n} |U_w|^d = 1.
double solve_dn(const IfsSystem& system, const Multicone& u, int n, const Budget& budget = {});

/// Root t of (1/n) log sum_{|w| = n} ||A_w||^{-t} = 0, the level-n proxy for
/// the critical exponent s_A.
double zeta_critical_exponent(const IfsSystem& system, int n, const Budget& budget = {});

/// max over words |w| <= n of sup_U |phi_w'| / inf_U |phi_w'|.
double bounded_distortion(const IfsSystem& system, const Multicone& u, int n,
                          const Budget& budget = {});

struct DimensionConstants {
  double r1 = 0.0;          // min_i inf_U |phi_i'|
  double lambda = 0.0;      // ||A_w|| >= c lambda^n
  double c = 0.0;
  double c_hyp = 0.0;       // C'' with sup_U |phi_w'| <= C'' lambda^{-2|w|}
  double c_distortion = 0.0;  // C'
};

struct DimensionReport {
  int n = 0;
  std::optional<double> d_n;
  std::optional<double> q_n;
  double s_estimate = 0.0;    // zero of the level-n pressure
  double s_a_estimate = 0.0;  // level-n critical exponent
  double dim_estimate = 0.0;  // min(1, s_A / 2)
  std::optional<double> dim_dn_estimate;  // min(1, d_n + bracket midpoint)
  /// Bracket for s_estimate - d_n.
  std::optional<std::pair<double, double>> bracket;
  DimensionConstants constants;
  double total_length = 0.0;  // |U|
  double margin = 0.0;
  /// First level from which every contraction axis stays eps away from the
  /// closure of U (eps = margin / 2), if reached by level n.
  std::optional<int> n0;
  std::vector<std::pair<double, double>> pressure_samples;  // (t, P_n(t))
  std::vector<std::string> notes;
};

DimensionReport attractor_dimension(const IfsSystem& system, const Multicone& u, int n,
                                    const Budget& budget = {});

/// phi_w(x0) for all |w| = depth in lexicographic order, x0 = U.center().
std::vector<ProjPoint> attractor_sample(const IfsSystem& system, const Multicone& u, int depth,
                                        const Budget& budget = {});

/// Least-squares slope of log N(delta) against log(1/delta), where N counts
/// occupied delta-bins of [0, pi).
double box_counting(const std::vector<ProjPoint>& points, const std::vector<double>& scales);

}  // namespace hypercone
