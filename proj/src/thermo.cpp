#include "hypercone/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "hypercone/words.hpp"

namespace hypercone {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& xs, double scale) {
  double peak = kNegInf;
  for (double x : xs) peak = std::max(peak, scale * x);
  if (!std::isfinite(peak)) return peak;
  double sum = 0.0;
  for (double x : xs) sum += std::exp(scale * x - peak);
  return peak + std::log(sum);
}

// Root of a strictly decreasing f with f(0) > 0: grow the bracket, then bisect.
double decreasing_root(const std::function<double(double)>& f, const char* what) {
  double lo = 0.0, hi = 1.0;
  while (f(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) {
      throw Error(ErrorKind::Degenerate, std::string(what) + ": no root below 1e6");
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void require_verified(const IfsSystem& system, const Multicone& u, const char* what) {
  if (!verify_strict_invariance(system, u).verified()) {
    throw Error(ErrorKind::Precondition,
                std::string(what) + " requires a strictly invariant multicone");
  }
}

void require_level(int n, const char* what) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, std::string(what) + ": n must be >= 1");
}

double log_image_length(const ScaledMat2& p, const Multicone& u) {
  double total = 0.0;
  for (const auto& arc : u.arcs()) total += arc_image(p, arc).length;
  if (!(total > 0.0)) {
    throw Error(ErrorKind::Overflow, "image arc below double resolution; lower n");
  }
  return std::log(total);
}

struct Level {
  std::vector<double> log_sup;
  std::vector<double> log_len;
  std::vector<double> log_norm;
};

Level collect_level(const IfsSystem& system, const Multicone& u, int n, const Budget& budget,
                    bool lengths) {
  Level lv;
  for_each_word_of_length(system, n, budget, [&](const Word&, const ScaledMat2& p) {
    lv.log_sup.push_back(derivative_range(p, u).log_sup);
    lv.log_norm.push_back(p.log_scale);
    if (lengths) lv.log_len.push_back(log_image_length(p, u));
  });
  return lv;
}

double pressure_root(const std::vector<double>& log_sup, int n) {
  if (log_sup.size() == 1) return 0.0;
  return decreasing_root([&](double t) { return log_sum_exp(log_sup, t) / n; }, "pressure root");
}

double dn_root(const std::vector<double>& log_len) {
  if (log_len.size() < 2) {
    throw Error(ErrorKind::Degenerate, "d_n needs at least two words: a single arc has no root");
  }
  for (double l : log_len) {
    if (!(l < 0.0)) {
      throw Error(ErrorKind::LengthsTooLarge,
                  "some |U_w| >= 1 radian at this level; raise n until all image arcs are short");
    }
  }
  return decreasing_root([&](double d) { return log_sum_exp(log_len, d); }, "d_n");
}

double zeta_root(const std::vector<double>& log_norm, int n) {
  if (log_norm.size() == 1) return 0.0;
  if (std::all_of(log_norm.begin(), log_norm.end(), [](double x) { return x <= 0.0; })) {
    throw Error(ErrorKind::Degenerate, "all ||A_w|| <= 1: critical exponent undefined");
  }
  return decreasing_root([&](double t) { return log_sum_exp(log_norm, -t) / n; },
                         "critical exponent");
}

}  // namespace

DerivativeRange derivative_range(const ScaledMat2& a, const Arc& arc) {
  const double at_start = log_project_derivative(a, {arc.start});
  const double at_end = log_project_derivative(a, ProjPoint::reduce(arc.end()));
  DerivativeRange r{std::max(at_start, at_end), std::min(at_start, at_end)};
  const ProjPoint expand = expansion_axis(a.m);
  const ProjPoint contract = ProjPoint::reduce(expand.theta + 0.5 * kPi);
  // On the unit-determinant representative ||m|| = 1 and sigma_min(m) = e^{-2 ls}.
  if (arc.contains(contract)) r.log_sup = 2.0 * a.log_scale;
  if (arc.contains(expand)) r.log_inf = -2.0 * a.log_scale;
  return r;
}

DerivativeRange derivative_range(const ScaledMat2& a, const Multicone& u) {
  DerivativeRange r{kNegInf, std::numeric_limits<double>::infinity()};
  for (const auto& arc : u.arcs()) {
    const auto part = derivative_range(a, arc);
    r.log_sup = std::max(r.log_sup, part.log_sup);
    r.log_inf = std::min(r.log_inf, part.log_inf);
  }
  return r;
}

WordGeometry word_geometry(const IfsSystem& system, const Multicone& u, const Word& w) {
  const ScaledMat2 p = word_product_scaled(system, w);
  WordGeometry g;
  g.word = w;
  for (const auto& arc : u.arcs()) {
    const double len = arc_image(p, arc).length;
    if (!(len > 0.0)) {
      throw Error(ErrorKind::Overflow, "image arc below double resolution; shorten the word");
    }
    g.image_arc_lengths.push_back(len);
  }
  const auto r = derivative_range(p, u);
  g.sup_derivative = std::exp(r.log_sup);
  g.inf_derivative = std::exp(r.log_inf);
  return g;
}

double pressure_estimate(const IfsSystem& system, const Multicone& u, double t, int n,
                         const Budget& budget) {
  require_level(n, "pressure_estimate");
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw Error(ErrorKind::InvalidInput, "pressure_estimate: t must be finite and >= 0");
  }
  require_verified(system, u, "pressure_estimate");
  const Level lv = collect_level(system, u, n, budget, false);
  return log_sum_exp(lv.log_sup, t) / n;
}

double bowen_root(const IfsSystem& system, const Multicone& u, int n, const Budget& budget) {
  require_level(n, "bowen_root");
  require_verified(system, u, "bowen_root");
  return pressure_root(collect_level(system, u, n, budget, false).log_sup, n);
}

double solve_dn(const IfsSystem& system, const Multicone& u, int n, const Budget& budget) {
  require_level(n, "solve_dn");
  require_verified(system, u, "solve_dn");
  return dn_root(collect_level(system, u, n, budget, true).log_len);
}

double zeta_critical_exponent(const IfsSystem& system, int n, const Budget& budget) {
  require_level(n, "zeta_critical_exponent");
  std::vector<double> log_norm;
  for_each_word_of_length(system, n, budget,
                          [&](const Word&, const ScaledMat2& p) { log_norm.push_back(p.log_scale); });
  return zeta_root(log_norm, n);
}

double bounded_distortion(const IfsSystem& system, const Multicone& u, int n,
                          const Budget& budget) {
  require_level(n, "bounded_distortion");
  double worst = 0.0;
  for_each_word(system, n, budget, [&](const Word&, const ScaledMat2& p) {
    const auto r = derivative_range(p, u);
    worst = std::max(worst, r.log_sup - r.log_inf);
  });
  return std::exp(worst);
}

DimensionReport attractor_dimension(const IfsSystem& system, const Multicone& u, int n,
                                    const Budget& budget) {
  require_level(n, "attractor_dimension");
  const auto cert = verify_strict_invariance(system, u);
  if (!cert.verified()) {
    throw Error(ErrorKind::Precondition,
                "attractor_dimension requires a strictly invariant multicone");
  }
  const auto hyp = hyperbolicity_constants(system, u, n, budget);

  DimensionReport rep;
  rep.n = n;
  rep.total_length = u.total_length();
  rep.margin = cert.margin;
  rep.constants.lambda = hyp.lambda;
  rep.constants.c = hyp.c;
  if (hyp.warning) rep.notes.push_back(*hyp.warning);

  const double log_lambda = std::log(hyp.lambda);
  const double eps = 0.5 * cert.margin;
  double log_r1 = std::numeric_limits<double>::infinity();
  double log_chyp = kNegInf;
  double log_distortion = 0.0;
  std::vector<char> level_ok(static_cast<std::size_t>(n) + 1, 1);
  Level top;

  for_each_word(system, n, budget, [&](const Word& w, const ScaledMat2& p) {
    const int k = static_cast<int>(w.size());
    const auto r = derivative_range(p, u);
    if (k == 1) log_r1 = std::min(log_r1, r.log_inf);
    log_chyp = std::max(log_chyp, r.log_sup + 2.0 * k * log_lambda);
    log_distortion = std::max(log_distortion, r.log_sup - r.log_inf);
    if (level_ok[k]) {
      bool ok = p.log_scale > system.tolerances().axis_tol;
      if (ok) {
        const ProjPoint t = ProjPoint::reduce(expansion_axis(p.m).theta + 0.5 * kPi);
        ok = std::none_of(u.arcs().begin(), u.arcs().end(), [&](const Arc& a) {
          return Arc{a.start - eps, a.length + 2.0 * eps}.contains(t);
        });
      }
      if (!ok) level_ok[k] = 0;
    }
    if (k == n) {
      top.log_sup.push_back(r.log_sup);
      top.log_norm.push_back(p.log_scale);
      top.log_len.push_back(log_image_length(p, u));
    }
  });

  rep.constants.r1 = std::exp(log_r1);
  rep.constants.c_hyp = std::exp(log_chyp);
  rep.constants.c_distortion = std::exp(log_distortion);
  for (int k = n; k >= 1 && level_ok[k]; --k) rep.n0 = k;

  rep.s_estimate = pressure_root(top.log_sup, n);
  rep.s_a_estimate = zeta_root(top.log_norm, n);
  rep.dim_estimate = std::clamp(0.5 * rep.s_a_estimate, 0.0, 1.0);
  for (int i = 0; i <= 16; ++i) {
    const double t = 0.125 * i;
    rep.pressure_samples.emplace_back(t, log_sum_exp(top.log_sup, t) / n);
  }

  try {
    rep.d_n = dn_root(top.log_len);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Degenerate && e.kind() != ErrorKind::LengthsTooLarge) throw;
    rep.notes.push_back(std::string("d_n unavailable: ") + e.what());
    return rep;
  }
  rep.q_n = log_sum_exp(top.log_len, rep.s_estimate) / n;

  // |U_w| lies between r1^n |U| and C'' lambda^{-2n} |U|, hence
  // s - d_n = Q_n / x for some x between the two normalized logs below.
  const double log_u = std::log(rep.total_length);
  const double e_lo = log_r1 + log_u / n;
  const double e_hi = (log_chyp + log_u) / n - 2.0 * log_lambda;
  if (hyp.lambda > 1.0 && rep.constants.r1 > 0.0 && e_lo < 0.0 && e_hi < 0.0) {
    const double a = *rep.q_n / e_lo, b = *rep.q_n / e_hi;
    rep.bracket = std::make_pair(std::min(a, b), std::max(a, b));
    const double mid = 0.5 * (rep.bracket->first + rep.bracket->second);
    rep.dim_dn_estimate = std::clamp(*rep.d_n + mid, 0.0, 1.0);
  } else {
    rep.notes.push_back("bracket unavailable: constants invalid at this level (need lambda > 1, "
                        "r1 > 0 and C'' lambda^{-2n} |U| < 1)");
    rep.dim_dn_estimate = std::clamp(*rep.d_n, 0.0, 1.0);
  }
  return rep;
}

std::vector<ProjPoint> attractor_sample(const IfsSystem& system, const Multicone& u, int depth,
                                        const Budget& budget) {
  require_level(depth, "attractor_sample");
  require_verified(system, u, "attractor_sample");
  const ProjPoint x0 = u.center();
  std::vector<ProjPoint> out;
  for_each_word_of_length(system, depth, budget, [&](const Word&, const ScaledMat2& p) {
    out.push_back(project_act(p.m, x0));
  });
  return out;
}

double box_counting(const std::vector<ProjPoint>& points, const std::vector<double>& scales) {
  if (points.empty()) throw Error(ErrorKind::InvalidInput, "box_counting: no points");
  if (scales.size() < 2) throw Error(ErrorKind::InvalidInput, "box_counting: need >= 2 scales");
  std::vector<double> xs, ys;
  for (double delta : scales) {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
      throw Error(ErrorKind::InvalidInput, "box_counting: scales must be positive");
    }
    std::set<long long> bins;
    for (const auto& p : points) bins.insert(static_cast<long long>(std::floor(p.theta / delta)));
    xs.push_back(-std::log(delta));
    ys.push_back(std::log(static_cast<double>(bins.size())));
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::Degenerate, "box_counting: scales are not distinct");
  return sxy / sxx;
}

}  // namespace hypercone
