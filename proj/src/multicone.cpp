#include "hypercone/multicone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hypercone/rng.hpp"
#include "hypercone/words.hpp"

namespace hypercone {

bool Arc::contains(ProjPoint x, double tol) const {
  const double offset = ProjPoint::reduce(x.theta - start).theta;
  return offset <= length + tol || offset >= kPi - tol;
}

Multicone::Multicone(std::vector<Arc> arcs, double tol) {
  if (arcs.empty()) throw Error(ErrorKind::InvalidInput, "multicone needs at least one arc");
  for (auto& a : arcs) {
    if (!std::isfinite(a.start) || !std::isfinite(a.length)) {
      throw Error(ErrorKind::InvalidInput, "multicone arc has non-finite start or length");
    }
    if (!(a.length > 0.0) || !(a.length < kPi)) {
      throw Error(ErrorKind::InvalidInput, "multicone arc length must lie in (0, pi)");
    }
    a.start = ProjPoint::reduce(a.start).theta;
  }
  std::sort(arcs.begin(), arcs.end(), [](const Arc& l, const Arc& r) { return l.start < r.start; });
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const Arc& cur = arcs[i];
    const double next_start = i + 1 < arcs.size() ? arcs[i + 1].start : arcs.front().start + kPi;
    if (!(cur.end() + tol < next_start)) {
      throw Error(ErrorKind::InvalidInput, "multicone arcs must have pairwise disjoint closures");
    }
  }
  arcs_ = std::move(arcs);
  if (!(total_length() < kPi)) {
    throw Error(ErrorKind::InvalidInput, "multicone must be a proper subset of the projective line");
  }
}

double Multicone::total_length() const {
  double sum = 0.0;
  for (const auto& a : arcs_) sum += a.length;
  return sum;
}

bool Multicone::contains(ProjPoint x) const {
  return std::any_of(arcs_.begin(), arcs_.end(), [&](const Arc& a) {
    const double offset = ProjPoint::reduce(x.theta - a.start).theta;
    return offset > 0.0 && offset < a.length;
  });
}

std::size_t Multicone::widest() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < arcs_.size(); ++i) {
    if (arcs_[i].length > arcs_[best].length) best = i;
  }
  return best;
}

std::optional<Multicone> merge_arcs(std::vector<Arc> arcs, double tol) {
  if (arcs.empty()) return std::nullopt;
  for (auto& a : arcs) {
    if (!(a.length < kPi)) return std::nullopt;
    a.start = ProjPoint::reduce(a.start).theta;
  }
  std::sort(arcs.begin(), arcs.end(), [](const Arc& l, const Arc& r) { return l.start < r.start; });
  std::vector<std::pair<double, double>> runs;  // [lo, hi] with lo in [0, pi)
  for (const auto& a : arcs) {
    if (!runs.empty() && a.start <= runs.back().second + tol) {
      runs.back().second = std::max(runs.back().second, a.end());
    } else {
      runs.emplace_back(a.start, a.end());
    }
  }
  // Runs that spill past pi may swallow runs at the start of the circle.
  while (runs.size() > 1 && runs.front().first + kPi <= runs.back().second + tol) {
    runs.back().second = std::max(runs.back().second, runs.front().second + kPi);
    runs.erase(runs.begin());
  }
  double total = 0.0;
  std::vector<Arc> out;
  for (const auto& [lo, hi] : runs) {
    if (!(hi - lo < kPi - tol)) return std::nullopt;
    out.push_back({lo, hi - lo});
    total += hi - lo;
  }
  if (!(total < kPi - tol)) return std::nullopt;
  try {
    return Multicone(std::move(out), tol);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::optional<Multicone> dilate(const Multicone& u, double eps) {
  std::vector<Arc> grown;
  for (const auto& a : u.arcs()) grown.push_back({a.start - eps, a.length + 2.0 * eps});
  return merge_arcs(std::move(grown));
}

namespace {

// Unsigned angle between A v(t1) and A v(t2), accurate for tiny images:
// the sine is formed as a product (det * sin) rather than by cancellation.
double image_angle(const Mat2& m, double log_scale, double t1, double t2, double len) {
  const auto [x1, y1] = m.apply(std::cos(t1), std::sin(t1));
  const auto [x2, y2] = m.apply(std::cos(t2), std::sin(t2));
  const double n1 = std::hypot(x1, y1), n2 = std::hypot(x2, y2);
  const double cross = std::exp(-2.0 * log_scale) * std::sin(len) / (n1 * n2);
  const double dot = (x1 * x2 + y1 * y2) / (n1 * n2);
  return std::atan2(cross, dot);
}

Arc image_of(const Mat2& m, double log_scale, int det_sign, const Arc& arc) {
  const ProjPoint p = project_act(m, {arc.start});
  const ProjPoint q = project_act(m, ProjPoint::reduce(arc.end()));
  const double len = image_angle(m, log_scale, arc.start, arc.end(), arc.length);
  return {det_sign >= 0 ? p.theta : q.theta, len};
}

}  // namespace

Arc arc_image(const Mat2& a, const Arc& arc) {
  return arc_image(ScaledMat2::from((1.0 / std::sqrt(std::fabs(a.det()))) * a), arc);
}

Arc arc_image(const ScaledMat2& a, const Arc& arc) {
  return image_of(a.m, a.log_scale, a.det_sign, arc);
}

double clearance(const Arc& inner, const Arc& outer) {
  const double offset = ProjPoint::reduce(inner.start - outer.start).theta;
  const double slack = outer.length - offset - inner.length;
  return std::min(offset, slack);
}

InvarianceCertificate verify_strict_invariance(const IfsSystem& system, const Multicone& u) {
  InvarianceCertificate cert;
  cert.margin = std::numeric_limits<double>::infinity();
  bool ok = true;
  for (std::size_t i = 0; i < system.size(); ++i) {
    const ScaledMat2 a = ScaledMat2::from(system.matrix(i));
    for (std::size_t k = 0; k < u.size(); ++k) {
      ImageArc img{i, k, arc_image(a, u.arcs()[k]), std::nullopt, -kPi};
      for (std::size_t j = 0; j < u.size(); ++j) {
        const double cl = clearance(img.image, u.arcs()[j]);
        if (cl > img.clearance) {
          img.clearance = cl;
          if (cl > 0.0) img.container = j;
        }
      }
      if (!img.container) {
        if (ok) cert.offending = std::make_pair(i, k);
        ok = false;
      }
      cert.margin = std::min(cert.margin, std::max(0.0, img.clearance));
      cert.images.push_back(img);
    }
  }
  cert.verdict = ok ? Verdict::Verified : Verdict::Refuted;
  if (!ok) cert.margin = 0.0;
  return cert;
}

EllipticSearch elliptic_certificate(const IfsSystem& system, int max_len, const Budget& budget) {
  if (max_len < 1) throw Error(ErrorKind::InvalidInput, "elliptic_certificate needs max_len >= 1");
  int len = max_len;
  while (len > 1 && word_tree_size(system.size(), len) > budget.enumeration_cap) --len;
  EllipticSearch out;
  out.searched_len = len;
  const auto& tol = system.tolerances();
  for_each_word(system, len, budget, [&](const Word& w, const ScaledMat2& p) {
    if (p.det_sign <= 0) return;  // orientation-reversing: real eigenvalues
    const double t = std::fabs(p.trace());
    if (t < 2.0 - tol.class_tol) {
      if (!out.elliptic || w.size() < out.elliptic->size()) out.elliptic = w;
    } else if (std::fabs(t - 2.0) <= tol.class_tol) {
      if (!out.parabolic || w.size() < out.parabolic->size()) out.parabolic = w;
    }
  });
  return out;
}

namespace {

std::optional<Multicone> seed_multicone(const IfsSystem& system, const MulticoneSearchParams& prm,
                                        int depth, double eps) {
  const int grid = prm.grid;
  const double h = kPi / grid;
  std::vector<double> rep(static_cast<std::size_t>(grid), std::numeric_limits<double>::quiet_NaN());
  std::vector<int> occupied;
  auto add = [&](ProjPoint x) {
    int b = static_cast<int>(x.theta / h);
    b = std::clamp(b, 0, grid - 1);
    if (std::isnan(rep[static_cast<std::size_t>(b)])) {
      rep[static_cast<std::size_t>(b)] = x.theta;
      occupied.push_back(b);
      return true;
    }
    return false;
  };

  // Grid points pushed along pseudo-random words settle onto the attractor.
  for (int k = 0; k < grid; ++k) {
    SplitMix64 rng(SplitMix64::mix(prm.seed + static_cast<std::uint64_t>(k)));
    ProjPoint x{(k + 0.5) * h};
    for (int s = 0; s < depth; ++s) {
      const auto i = static_cast<std::size_t>(rng.next() % system.size());
      x = project_act(system.matrix(i), x);
    }
    add(x);
  }
  for (const auto& m : system.matrices()) {
    if (auto fp = attracting_fixed_point(m, system.tolerances())) add(*fp);
  }
  // Forward closure S <- S u Phi(S) on the quantized grid.
  std::size_t done = 0;
  for (int it = 0; it < prm.closure_iterations * grid && done < occupied.size(); ++it) {
    const std::size_t end = occupied.size();
    for (; done < end; ++done) {
      const double x = rep[static_cast<std::size_t>(occupied[done])];
      for (const auto& m : system.matrices()) add(project_act(m, {x}));
    }
  }

  std::sort(occupied.begin(), occupied.end());
  std::vector<Arc> arcs;
  std::size_t lo = 0;
  for (std::size_t j = 1; j <= occupied.size(); ++j) {
    if (j == occupied.size() || occupied[j] - occupied[j - 1] > prm.gap_factor) {
      const double a = occupied[lo] * h;
      const double b = (occupied[j - 1] + 1) * h;
      arcs.push_back({a - eps, (b - a) + 2.0 * eps});
      lo = j;
    }
  }
  return merge_arcs(std::move(arcs), h * prm.gap_factor);
}

}  // namespace

MulticoneSearchResult find_multicone(const IfsSystem& system, const MulticoneSearchParams& prm,
                                     const Budget& budget) {
  if (prm.grid < 8 || prm.depth < 0 || prm.retries < 1 || !(prm.epsilon > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "invalid multicone search parameters");
  }
  MulticoneSearchResult res;
  res.obstruction = elliptic_certificate(system, std::max(1, prm.elliptic_max_len), budget);
  if (res.obstruction.elliptic) {
    res.diagnostic = "elliptic word " + system.format_word(*res.obstruction.elliptic) +
                     " in the semigroup: no strictly invariant multicone exists";
    return res;
  }
  if (res.obstruction.parabolic) {
    res.diagnostic = "parabolic word " + system.format_word(*res.obstruction.parabolic) +
                     " (|tr| = 2) in the semigroup: products are not uniformly hyperbolic";
    return res;
  }

  for (int attempt = 0; attempt < prm.retries; ++attempt) {
    res.attempts = attempt + 1;
    const double eps = prm.epsilon / std::pow(2.0, attempt);
    const int depth = prm.depth + 10 * attempt;
    auto u = seed_multicone(system, prm, depth, eps);
    for (int it = 0; u && it < prm.closure_iterations; ++it) {
      auto cert = verify_strict_invariance(system, *u);
      if (cert.verified() && cert.margin >= prm.min_margin) {
        res.multicone = std::move(u);
        res.certificate = std::move(cert);
        std::ostringstream os;
        os << "verified after " << res.attempts << " attempt(s), margin " << res.certificate->margin;
        res.diagnostic = os.str();
        return res;
      }
      std::vector<Arc> grown = u->arcs();
      for (const auto& img : cert.images) {
        grown.push_back({img.image.start - eps, img.image.length + 2.0 * eps});
      }
      u = merge_arcs(std::move(grown));
    }
  }
  std::ostringstream os;
  os << "no strictly invariant multicone found after " << res.attempts
     << " attempt(s); none elliptic up to length " << res.obstruction.searched_len
     << " (inconclusive)";
  res.diagnostic = os.str();
  return res;
}

HyperbolicityConstants hyperbolicity_constants(const IfsSystem& system, const Multicone& u,
                                               int n_max, const Budget& budget) {
  if (n_max < 1) throw Error(ErrorKind::InvalidInput, "hyperbolicity_constants needs n_max >= 1");
  HyperbolicityConstants out;
  out.invariance_verified = verify_strict_invariance(system, u).verified();
  std::vector<double> min_log(static_cast<std::size_t>(n_max), std::numeric_limits<double>::infinity());
  for_each_word(system, n_max, budget, [&](const Word& w, const ScaledMat2& p) {
    auto& slot = min_log[w.size() - 1];
    slot = std::min(slot, p.log_scale);
  });
  const int from = (n_max + 1) / 2;
  double log_lambda = std::numeric_limits<double>::infinity();
  for (int n = from; n <= n_max; ++n) {
    log_lambda = std::min(log_lambda, min_log[static_cast<std::size_t>(n - 1)] / n);
  }
  double log_c = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= n_max; ++n) {
    log_c = std::min(log_c, min_log[static_cast<std::size_t>(n - 1)] - n * log_lambda);
  }
  out.lambda = std::exp(log_lambda);
  out.c = std::exp(log_c);
  for (double l : min_log) out.min_norms.push_back(std::exp(l));
  if (!(out.lambda > 1.0)) {
    out.warning = "fitted lambda <= 1: products are not uniformly hyperbolic at this depth";
  } else if (!out.invariance_verified) {
    out.warning = "multicone is not strictly invariant; constants are descriptive only";
  }
  return out;
}

}  // namespace hypercone
