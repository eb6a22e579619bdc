#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hypercone/config.hpp"
#include "hypercone/ifs_core.hpp"

namespace hypercone {

/// Open arc (start, start + length) on R / pi Z; may wrap past pi.
struct Arc {
  double start = 0.0;
  double length = 0.0;

  double end() const { return start + length; }
  ProjPoint midpoint() const { return ProjPoint::reduce(start + 0.5 * length); }
  /// Closed-arc membership.
  bool contains(ProjPoint x, double tol = 0.0) const;
};

/// Finite union of open arcs with pairwise disjoint closures and total length
/// below pi.  Arcs are kept sorted by start angle.
class Multicone {
 public:
  explicit Multicone(std::vector<Arc> arcs, double tol = 1e-12);

  const std::vector<Arc>& arcs() const { return arcs_; }
  std::size_t size() const { return arcs_.size(); }
  double total_length() const;
  bool contains(ProjPoint x) const;
  /// Index of the longest component (first one on ties).
  std::size_t widest() const;
  /// Midpoint of the longest component; the default base point for orbits.
  ProjPoint center() const { return arcs_[widest()].midpoint(); }

 private:
  std::vector<Arc> arcs_;
};

/// Union of arbitrary arcs.  Arcs whose closures touch are merged; empty when
/// the union is not a proper subset of the projective line.
std::optional<Multicone> merge_arcs(std::vector<Arc> arcs, double tol = 1e-12);

/// Every component grown by `eps` on both sides, then merged.
std::optional<Multicone> dilate(const Multicone& u, double eps);

/// Image of an arc under phi_A; orientation-reversing maps swap endpoints.
Arc arc_image(const Mat2& a, const Arc& arc);
Arc arc_image(const ScaledMat2& a, const Arc& arc);

/// Clearance of a closed arc inside an open one, negative if not contained.
double clearance(const Arc& inner, const Arc& outer);

struct ImageArc {
  std::size_t label = 0;
  std::size_t component = 0;
  Arc image;
  std::optional<std::size_t> container;
  double clearance = 0.0;
};

enum class Verdict { Verified, Refuted };

struct InvarianceCertificate {
  Verdict verdict = Verdict::Refuted;
  double margin = 0.0;
  std::vector<ImageArc> images;
  /// (label, component) of the first image that escapes, when refuted.
  std::optional<std::pair<std::size_t, std::size_t>> offending;

  bool verified() const { return verdict == Verdict::Verified; }
};

InvarianceCertificate verify_strict_invariance(const IfsSystem& system, const Multicone& u);

struct EllipticSearch {
  std::optional<Word> elliptic;
  /// First word with | |tr| - 2 | <= class_tol (boundary case, e.g. A A^{-1}).
  std::optional<Word> parabolic;
  int searched_len = 0;

  bool obstructed() const { return elliptic || parabolic; }
};

/// Shortest word (lexicographic among equals) with |tr A_w| < 2 - class_tol.
/// Not finding one is not a proof of hyperbolicity.
EllipticSearch elliptic_certificate(const IfsSystem& system, int max_len,
                                    const Budget& budget = {});

struct MulticoneSearchParams {
  int grid = 4096;
  int depth = 30;
  int gap_factor = 4;
  double epsilon = 1e-3;
  int retries = 5;
  double min_margin = 1e-9;
  int elliptic_max_len = 8;
  int closure_iterations = 64;
  std::uint64_t seed = 0x5eed;
};

struct MulticoneSearchResult {
  std::optional<Multicone> multicone;
  std::optional<InvarianceCertificate> certificate;
  EllipticSearch obstruction;
  int attempts = 0;
  std::string diagnostic;
};

/// Heuristic search; any multicone it returns has been re-verified.
MulticoneSearchResult find_multicone(const IfsSystem& system,
                                     const MulticoneSearchParams& params = {},
                                     const Budget& budget = {});

struct HyperbolicityConstants {
  double c = 0.0;
  double lambda = 0.0;
  /// min_{|w| = n} ||A_w|| for n = 1..n_max.
  std::vector<double> min_norms;
  bool invariance_verified = false;
  /// Set when lambda <= 1 or the multicone failed verification.
  std::optional<std::string> warning;
};

/// Fits ||A_w|| >= c lambda^n over all words up to n_max.
HyperbolicityConstants hyperbolicity_constants(const IfsSystem& system, const Multicone& u,
                                               int n_max, const Budget& budget = {});

}  // namespace hypercone
