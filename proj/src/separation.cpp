#include "hypercone/separation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hypercone/rng.hpp"
#include "hypercone/words.hpp"

namespace hypercone {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Products {
  std::vector<Word> words;
  std::vector<Eigen::MatrixXd> mats;
};

Products enumerate_products(const std::vector<Eigen::MatrixXd>& letters, int n,
                            const Budget& budget) {
  require_budget(letters.size(), n, budget, "product enumeration");
  Products out;
  Word w;
  std::vector<Eigen::MatrixXd> stack{Eigen::MatrixXd::Identity(letters[0].rows(), letters[0].cols())};
  auto recurse = [&](auto&& self) -> void {
    if (static_cast<int>(w.size()) == n) {
      if (!stack.back().allFinite() || stack.back().cwiseAbs().maxCoeff() > Tolerances{}.overflow_cap) {
        throw Error(ErrorKind::Overflow, "product entries exceed the overflow cap; lower n");
      }
      out.words.push_back(w);
      out.mats.push_back(stack.back());
      return;
    }
    for (std::size_t i = 0; i < letters.size(); ++i) {
      w.push_back(i);
      stack.push_back(stack.back() * letters[i]);
      self(self);
      stack.pop_back();
      w.pop_back();
    }
  };
  recurse(recurse);
  return out;
}

double distance(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  return spectral_norm(x - y);
}

class PairTracker {
 public:
  PairTracker(const Products& p, const SeparationOptions& opt, SeparationProfile& prof)
      : p_(p), opt_(opt), prof_(prof) {}

  void offer(std::size_t i, std::size_t j) {
    const double d = distance(p_.mats[i], p_.mats[j]);
    if (d < prof_.min_gap_strong) {
      prof_.min_gap_strong = d;
      prof_.witness = WordPair{p_.words[i], p_.words[j]};
    }
    if (d <= opt_.collision_tol) {
      ++prof_.collision_count;
      if (prof_.collisions.size() < opt_.collision_list_cap) {
        prof_.collisions.push_back({p_.words[i], p_.words[j]});
      }
    } else {
      offer_weak(i, j, d);
    }
  }

  void offer_weak(std::size_t i, std::size_t j, double d) {
    if (d < prof_.min_gap_weak) {
      prof_.min_gap_weak = d;
      prof_.witness_weak = WordPair{p_.words[i], p_.words[j]};
    }
  }

 private:
  const Products& p_;
  const SeparationOptions& opt_;
  SeparationProfile& prof_;
};

// Canonical order for reported pairs: lexicographically smaller word first.
void canonical(std::optional<WordPair>& wp) {
  if (wp && wp->second < wp->first) std::swap(wp->first, wp->second);
}

}  // namespace

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.rows() == 2 && m.cols() == 2) return operator_norm(Mat2{m(0, 0), m(0, 1), m(1, 0), m(1, 1)});
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

SeparationProfile separation_profile(const IfsSystem& system, int n, const SeparationOptions& opt,
                                     const Budget& budget) {
  std::vector<Eigen::MatrixXd> letters;
  for (const auto& m : system.matrices()) {
    Eigen::MatrixXd e(2, 2);
    e << m.a, m.b, m.c, m.d;
    letters.push_back(e);
  }
  return separation_profile(letters, n, opt, budget);
}

SeparationProfile separation_profile(const std::vector<Eigen::MatrixXd>& letters, int n,
                                     const SeparationOptions& opt, const Budget& budget) {
  if (letters.empty()) throw Error(ErrorKind::InvalidInput, "separation_profile: no matrices");
  if (n < 1) throw Error(ErrorKind::InvalidInput, "separation_profile: n must be >= 1");
  for (const auto& m : letters) {
    if (m.rows() != m.cols() || m.rows() != letters[0].rows() || m.rows() == 0) {
      throw Error(ErrorKind::InvalidInput, "separation_profile: matrices must be square, same size");
    }
  }
  if (opt.window < 1) throw Error(ErrorKind::InvalidInput, "separation window must be >= 1");
  const Products p = enumerate_products(letters, n, budget);
  SeparationProfile prof;
  prof.n = n;
  prof.words = p.words.size();
  prof.min_gap_strong = kInf;
  prof.min_gap_weak = kInf;
  PairTracker track(p, opt, prof);
  const std::size_t count = p.words.size();

  if (count <= opt.exact_limit) {
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = i + 1; j < count; ++j) track.offer(i, j);
    }
  } else {
    prof.exact = false;
    const Eigen::Index dim = p.mats[0].size();
    SplitMix64 rng(opt.seed);
    Eigen::VectorXd dir(dim);
    for (Eigen::Index k = 0; k < dim; ++k) dir(k) = 2.0 * rng.uniform() - 1.0;
    dir.normalize();
    std::vector<double> key(count);
    for (std::size_t i = 0; i < count; ++i) {
      key[i] = Eigen::Map<const Eigen::VectorXd>(p.mats[i].data(), dim).dot(dir);
    }
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return key[l] < key[r]; });
    const auto w = static_cast<std::size_t>(opt.window);
    for (std::size_t a = 0; a < count; ++a) {
      for (std::size_t b = a + 1; b < count && b <= a + w; ++b) track.offer(order[a], order[b]);
    }
    // Collapse near-duplicates so that long runs of equal products do not
    // crowd distinct neighbours out of the window.
    std::vector<std::size_t> reps;
    for (std::size_t idx : order) {
      bool dup = false;
      for (std::size_t r = reps.size(); r > 0 && r + w > reps.size(); --r) {
        if (distance(p.mats[reps[r - 1]], p.mats[idx]) <= opt.collision_tol) {
          dup = true;
          break;
        }
      }
      if (!dup) reps.push_back(idx);
    }
    for (std::size_t a = 0; a < reps.size(); ++a) {
      for (std::size_t b = a + 1; b < reps.size() && b <= a + w; ++b) {
        const double d = distance(p.mats[reps[a]], p.mats[reps[b]]);
        if (d > opt.collision_tol) track.offer_weak(reps[a], reps[b], d);
      }
    }
  }
  canonical(prof.witness);
  canonical(prof.witness_weak);
  if (std::isfinite(prof.min_gap_strong)) prof.c_n = std::pow(prof.min_gap_strong, 1.0 / n);
  return prof;
}

IfsSeparation ifs_separation(const IfsSystem& system, const std::vector<ProjPoint>& j_points, int n,
                             SeparationChart chart, const Budget& budget) {
  if (j_points.empty()) throw Error(ErrorKind::InvalidInput, "ifs_separation: J is empty");
  if (n < 1) throw Error(ErrorKind::InvalidInput, "ifs_separation: n must be >= 1");
  const double tol = system.tolerances().collision_tol;
  const std::size_t nj = j_points.size();
  const ProjPoint probes[3] = {{0.0}, {kPi / 3}, {2 * kPi / 3}};

  std::vector<Word> words;
  std::vector<std::size_t> first;
  std::vector<double> image;  // nj values per word
  std::vector<double> probe;  // 3 angles per word
  for_each_word_of_length(system, n, budget, [&](const Word& w, const ScaledMat2& p) {
    words.push_back(w);
    first.push_back(w[0]);
    for (const auto& x : j_points) {
      const ProjPoint y = project_act(p.m, x);
      image.push_back(chart == SeparationChart::Angle ? y.theta : cot_chart(y));
    }
    for (const auto& x : probes) probe.push_back(project_act(p.m, x).theta);
  });

  auto gap = [&](std::size_t a, std::size_t b) {
    double g = 0.0;
    for (std::size_t k = 0; k < nj; ++k) {
      const double u = image[a * nj + k], v = image[b * nj + k];
      const double d = chart == SeparationChart::Angle ? proj_distance({u}, {v})
                       : (std::isinf(u) || std::isinf(v)) ? (u == v ? 0.0 : kInf)
                                                          : std::fabs(u - v);
      g = std::max(g, d);
    }
    return g;
  };
  auto equivalent = [&](std::size_t a, std::size_t b) {
    for (int k = 0; k < 3; ++k) {
      if (proj_distance({probe[a * 3 + k]}, {probe[b * 3 + k]}) > tol) return false;
    }
    return true;
  };

  IfsSeparation out;
  out.gap = kInf;
  const std::size_t count = words.size();
  const double pairs = 0.5 * static_cast<double>(count) * static_cast<double>(count);
  if (pairs > 64.0 * static_cast<double>(budget.enumeration_cap)) {
    throw Error(ErrorKind::Budget, "ifs_separation: pair count exceeds 64 x enumeration cap");
  }
  for (std::size_t a = 0; a < count; ++a) {
    for (std::size_t b = a + 1; b < count; ++b) {
      if (first[a] == first[b] || equivalent(a, b)) continue;
      ++out.admissible_pairs;
      const double g = gap(a, b);
      if (g < out.gap) {
        out.gap = g;
        out.witness = WordPair{words[a], words[b]};
      }
    }
  }
  if (out.admissible_pairs == 0) out.note = "no admissible pairs";
  return out;
}

RateFit exponential_rate_fit(const IfsSystem& system, const std::vector<int>& n_list,
                             const SeparationOptions& opt, const Budget& budget) {
  if (n_list.empty()) throw Error(ErrorKind::InvalidInput, "exponential_rate_fit: empty n list");
  for (std::size_t k = 1; k < n_list.size(); ++k) {
    if (n_list[k] <= n_list[k - 1]) {
      throw Error(ErrorKind::InvalidInput, "exponential_rate_fit: n list must be increasing");
    }
  }
  RateFit fit;
  fit.c_fit = kInf;
  for (int n : n_list) {
    fit.per_n.push_back(separation_profile(system, n, opt, budget));
    const auto& prof = fit.per_n.back();
    if (prof.c_n) fit.c_fit = std::min(fit.c_fit, *prof.c_n);
  }
  return fit;
}

ClaimCheck claim_inequality_check(const Mat2& a, const Mat2& b, std::array<double, 2> x) {
  if (a.det() == 0.0 || b.det() == 0.0) {
    throw Error(ErrorKind::Singular, "claim_inequality_check needs invertible matrices");
  }
  if (std::fabs(std::hypot(x[0], x[1]) - 1.0) > 1e-9) {
    throw Error(ErrorKind::InvalidInput, "claim_inequality_check needs a unit vector");
  }
  const auto [ax, ay] = a.apply(x[0], x[1]);
  const auto [bx, by] = b.apply(x[0], x[1]);
  const double na = std::hypot(ax, ay), nb = std::hypot(bx, by);
  ClaimCheck c;
  c.lhs = std::hypot(ax / na - bx / nb, ay / na - by / nb);
  c.rhs = operator_norm(a.inverse()) * (1.0 + operator_norm(b) * operator_norm(b.inverse())) *
          operator_norm(a - b);
  return c;
}

}  // namespace hypercone
