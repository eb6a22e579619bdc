#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hypercone/config.hpp"
#include "hypercone/ifs_core.hpp"

namespace hypercone {

struct WordPair {
  Word first;
  Word second;
  friend bool operator==(const WordPair&, const WordPair&) = default;
};

struct SeparationOptions {
  double collision_tol = 1e-10;
  /// All pairs are compared when the number of words is at most this.
  std::size_t exact_limit = 4096;
  /// Otherwise: sort by a random projection and compare within this window.
  int window = 64;
  std::uint64_t seed = 0x5eed;
  /// At most this many colliding pairs are listed; collision_count is the total seen.
  std::size_t collision_list_cap = 1024;
};

/// Gaps are operator-norm distances between length-n products; +infinity
/// when no pair qualifies.
struct SeparationProfile {
  int n = 0;
  std::size_t words = 0;
  double min_gap_strong = 0.0;
  double min_gap_weak = 0.0;
  std::optional<double> c_n;  // min_gap_strong^{1/n}
  std::optional<WordPair> witness;
  std::optional<WordPair> witness_weak;
  std::vector<WordPair> collisions;
  std::uint64_t collision_count = 0;
  /// false when the projection-window search was used.
  bool exact = true;
};

SeparationProfile separation_profile(const IfsSystem& system, int n,
                                     const SeparationOptions& opt = {},
                                     const Budget& budget = {});
/// Same for arbitrary square matrices (no normalization applied).
SeparationProfile separation_profile(const std::vector<Eigen::MatrixXd>& letters, int n,
                                     const SeparationOptions& opt = {},
                                     const Budget& budget = {});

/// Largest singular value of a general square matrix.
double spectral_norm(const Eigen::MatrixXd& m);

enum class SeparationChart { Angle, Cot };

struct IfsSeparation {
  double gap = 0.0;  // +infinity when no admissible pair exists
  std::optional<WordPair> witness;
  std::uint64_t admissible_pairs = 0;
  std::optional<std::string> note;
};

/// min over words i, j of length n with i_1 != j_1 and phi_i != phi_j of
/// max_{x in J} dist(phi_i x, phi_j x).  Angle: arc distance mod pi.
/// Cot: |cot(phi_i x) - cot(phi_j x)| in the Moebius chart.
IfsSeparation ifs_separation(const IfsSystem& system, const std::vector<ProjPoint>& j_points,
                             int n, SeparationChart chart = SeparationChart::Angle,
                             const Budget& budget = {});

struct RateFit {
  double c_fit = 0.0;
  std::vector<SeparationProfile> per_n;
};

RateFit exponential_rate_fit(const IfsSystem& system, const std::vector<int>& n_list,
                             const SeparationOptions& opt = {}, const Budget& budget = {});

struct ClaimCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds() const { return lhs <= rhs; }
};

/// lhs = ||Ax/||Ax|| - Bx/||Bx|||,  rhs = ||A^-1|| (1 + ||B|| ||B^-1||) ||A - B||.
ClaimCheck claim_inequality_check(const Mat2& a, const Mat2& b, std::array<double, 2> x);

}  // namespace hypercone
