#include "hypercone/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hypercone/rng.hpp"

namespace hypercone {

DiscreteSampler::DiscreteSampler(const std::vector<double>& p) {
  check_probability_vector(p);
  double acc = 0.0;
  for (double x : p) {
    acc += x;
    cdf_.push_back(acc);
  }
}

std::size_t DiscreteSampler::operator()(SplitMix64& rng) const {
  const double u = rng.uniform() * cdf_.back();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return std::min(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
}

namespace {

constexpr int kBatches = 32;

void check_weights(const IfsSystem& system, const std::vector<double>& p) {
  check_probability_vector(p);
  if (p.size() != system.size()) {
    throw Error(ErrorKind::InvalidInput, "probability vector length does not match the system");
  }
}

void check_steps(std::uint64_t steps) {
  if (steps < 1) throw Error(ErrorKind::InvalidInput, "steps must be >= 1");
}

// Accumulates per-step increments into 32 contiguous batches.
class BatchMeans {
 public:
  explicit BatchMeans(std::uint64_t steps) : steps_(steps), sums_(kBatches, 0.0) {}

  void add(double x) {
    total_ += x;
    if (steps_ >= 2 * kBatches) {
      const auto b = std::min<std::uint64_t>(seen_ * kBatches / steps_, kBatches - 1);
      sums_[b] += x;
    }
    ++seen_;
  }

  Estimate finish() const {
    Estimate e{total_ / static_cast<double>(steps_), std::numeric_limits<double>::quiet_NaN()};
    if (steps_ < 2 * kBatches) return e;
    std::vector<double> means;
    for (int b = 0; b < kBatches; ++b) {
      const std::uint64_t lo = (static_cast<std::uint64_t>(b) * steps_ + kBatches - 1) / kBatches;
      const std::uint64_t hi = (static_cast<std::uint64_t>(b + 1) * steps_ + kBatches - 1) / kBatches;
      means.push_back(sums_[static_cast<std::size_t>(b)] / static_cast<double>(hi - lo));
    }
    double mean = 0.0;
    for (double m : means) mean += m;
    mean /= kBatches;
    double var = 0.0;
    for (double m : means) var += (m - mean) * (m - mean);
    var /= kBatches - 1;
    e.se = std::sqrt(var / kBatches);
    return e;
  }

 private:
  std::uint64_t steps_;
  std::uint64_t seen_ = 0;
  double total_ = 0.0;
  std::vector<double> sums_;
};

ProjPoint chain_start(const IfsSystem& system) {
  if (auto fp = attracting_fixed_point(system.matrix(0), system.tolerances())) return *fp;
  return {0.25 * kPi};
}

}  // namespace

double entropy(const std::vector<double>& p) {
  check_probability_vector(p);
  double h = 0.0;
  for (double x : p) h -= x * std::log(x);
  return h;
}

Estimate lyapunov_random(const IfsSystem& system, const std::vector<double>& p,
                         std::uint64_t steps, std::uint64_t seed, ProductOrder order) {
  check_weights(system, p);
  check_steps(steps);
  const DiscreteSampler draw(p);
  SplitMix64 rng(seed);
  BatchMeans acc(steps);
  Mat2 m = Mat2::identity();
  for (std::uint64_t k = 0; k < steps; ++k) {
    const Mat2& a = system.matrix(draw(rng));
    m = order == ProductOrder::Right ? m * a : a * m;
    const double n = operator_norm(m);
    m = (1.0 / n) * m;
    acc.add(std::log(n));
  }
  return acc.finish();
}

Estimate lyapunov_ifs(const IfsSystem& system, const std::vector<double>& p, const Multicone& u,
                      std::uint64_t steps, std::uint64_t burn_in, std::uint64_t seed) {
  check_weights(system, p);
  check_steps(steps);
  if (!verify_strict_invariance(system, u).verified()) {
    throw Error(ErrorKind::Precondition, "lyapunov_ifs requires a strictly invariant multicone");
  }
  const DiscreteSampler draw(p);
  SplitMix64 rng(seed);
  ProjPoint x = u.center();
  for (std::uint64_t k = 0; k < burn_in; ++k) x = project_act(system.matrix(draw(rng)), x);
  BatchMeans acc(steps);
  for (std::uint64_t k = 0; k < steps; ++k) {
    const Mat2& a = system.matrix(draw(rng));
    acc.add(-std::log(project_derivative(a, x)));
    x = project_act(a, x);
  }
  return acc.finish();
}

StationarySample furstenberg_sample(const IfsSystem& system, const std::vector<double>& p,
                                    std::uint64_t steps, std::uint64_t burn_in,
                                    std::uint64_t seed) {
  check_weights(system, p);
  check_steps(steps);
  StationarySample s;
  s.seed = seed;
  s.burn_in = burn_in;

  std::vector<ProjPoint> fixed;
  for (const auto& m : system.matrices()) {
    const auto fp = attracting_fixed_point(m, system.tolerances());
    if (!fp) continue;
    const bool fresh = std::none_of(fixed.begin(), fixed.end(), [&](ProjPoint q) {
      return proj_distance(q, *fp) <= system.tolerances().collision_tol;
    });
    if (fresh) fixed.push_back(*fp);
  }
  if (fixed.size() < 2) {
    s.warning = "fewer than two distinct attracting fixed points: irreducibility not indicated";
  }

  const DiscreteSampler draw(p);
  SplitMix64 rng(seed);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto mix_symbol = [&](std::uint64_t sym) {
    for (int byte = 0; byte < 8; ++byte) {
      hash ^= (sym >> (8 * byte)) & 0xFFu;
      hash *= 0x100000001b3ULL;
    }
  };
  ProjPoint x = chain_start(system);
  s.points.reserve(steps);
  for (std::uint64_t k = 0; k < burn_in + steps; ++k) {
    const std::size_t i = draw(rng);
    mix_symbol(i);
    x = project_act(system.matrix(i), x);
    if (k >= burn_in) s.points.push_back(x);
  }
  s.symbol_stream_hash = hash;
  return s;
}

double stationarity_residual(const StationarySample& sample, const IfsSystem& system,
                             const std::vector<double>& p) {
  check_weights(system, p);
  if (sample.points.empty()) throw Error(ErrorKind::InvalidInput, "sample is empty");
  const double n = static_cast<double>(sample.points.size());
  // (theta, signed weight): +1/n for the sample, -p_i/n for each pushed point.
  std::vector<std::pair<double, double>> events;
  events.reserve(sample.points.size() * (system.size() + 1));
  for (const auto& x : sample.points) {
    events.emplace_back(x.theta, 1.0 / n);
    for (std::size_t i = 0; i < system.size(); ++i) {
      events.emplace_back(project_act(system.matrix(i), x).theta, -p[i] / n);
    }
  }
  std::sort(events.begin(), events.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });
  double diff = 0.0, worst = 0.0;
  for (std::size_t k = 0; k < events.size(); ++k) {
    diff += events[k].second;
    if (k + 1 == events.size() || events[k + 1].first != events[k].first) {
      worst = std::max(worst, std::fabs(diff));
    }
  }
  return worst;
}

FurstenbergDimension furstenberg_dimension(const IfsSystem& system, const std::vector<double>& p,
                                           const std::optional<Multicone>& u, std::uint64_t steps,
                                           std::uint64_t seed, std::uint64_t burn_in) {
  FurstenbergDimension out;
  out.entropy = entropy(p);
  out.chi_a = lyapunov_random(system, p, steps, seed);
  // Isometries accumulate rounding of order 1e-16 per step, not growth.
  if (!(out.chi_a.value > 1e-12)) {
    throw Error(ErrorKind::Degenerate, "Lyapunov exponent estimate is not positive");
  }
  out.dimension = std::min(1.0, out.entropy / (2.0 * out.chi_a.value));
  if (u && verify_strict_invariance(system, *u).verified()) {
    out.chi_phi = lyapunov_ifs(system, p, *u, steps, burn_in, seed);
    if (out.chi_phi->value > 0.0) {
      out.dimension_phi = std::min(1.0, out.entropy / out.chi_phi->value);
      const double ref = std::max(out.dimension, *out.dimension_phi);
      out.disagreement = ref > 0.0 && std::fabs(out.dimension - *out.dimension_phi) > 0.05 * ref;
      if (out.disagreement) out.notes.push_back("chi_A and chi_Phi variants disagree by more than 5%");
    } else {
      out.notes.push_back("chi_Phi estimate is not positive; variant skipped");
    }
  } else {
    out.notes.push_back("no verified multicone: chi_Phi variant skipped");
  }
  return out;
}

}  // namespace hypercone
