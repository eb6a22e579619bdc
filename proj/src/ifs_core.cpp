#include "hypercone/ifs_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>
#include <sstream>

#include "hypercone/words.hpp"

namespace hypercone {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::UnknownLabel: return "unknown-label";
    case ErrorKind::Overflow: return "overflow";
    case ErrorKind::DeterminantDrift: return "determinant-drift";
    case ErrorKind::AxisUndefined: return "axis-undefined";
    case ErrorKind::Budget: return "budget";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::LengthsTooLarge: return "lengths-too-large";
    case ErrorKind::Singular: return "singular";
    case ErrorKind::Horizon: return "horizon";
    case ErrorKind::Boundary: return "boundary";
    case ErrorKind::InvarianceViolation: return "invariance-violation";
  }
  return "unknown";
}

Budget budget_from_env() {
  Budget b;
  if (const char* env = std::getenv("HYPERCONE_BUDGET"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || v == 0) {
      throw Error(ErrorKind::InvalidInput,
                  std::string("HYPERCONE_BUDGET must be a positive integer, got '") + env + "'");
    }
    b.enumeration_cap = v;
  }
  return b;
}

Mat2 Mat2::rotation(double alpha) {
  const double c = std::cos(alpha), s = std::sin(alpha);
  return {c, -s, s, c};
}

bool Mat2::finite() const {
  return std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d);
}

Mat2 Mat2::inverse() const {
  const double det_ = det();
  if (det_ == 0.0) throw Error(ErrorKind::Singular, "matrix is singular");
  return {d / det_, -b / det_, -c / det_, a / det_};
}

ProjPoint ProjPoint::reduce(double angle) {
  double r = std::fmod(angle, kPi);
  if (r < 0.0) r += kPi;
  if (r >= kPi) r -= kPi;
  return {r};
}

double proj_distance(ProjPoint x, ProjPoint y) {
  const double d = std::fabs(x.theta - y.theta);
  return std::min(d, kPi - d);
}

const char* to_string(MatrixClass c) {
  switch (c) {
    case MatrixClass::Hyperbolic: return "hyperbolic";
    case MatrixClass::Parabolic: return "parabolic";
    case MatrixClass::Elliptic: return "elliptic";
  }
  return "unknown";
}

namespace {

// Half-sums whose sum and difference give the two singular values.
std::pair<double, double> singular_halves(const Mat2& m) {
  const double p = std::hypot(m.a + m.d, m.b - m.c);
  const double q = std::hypot(m.a - m.d, m.b + m.c);
  return {p, q};
}

double max_abs_entry(const Mat2& m) {
  return std::max({std::fabs(m.a), std::fabs(m.b), std::fabs(m.c), std::fabs(m.d)});
}

// Angle of the top eigenvector of A^T A.
double expansion_angle(const Mat2& m) {
  const double s = max_abs_entry(m);
  const Mat2 n = s > 0.0 ? (1.0 / s) * m : m;
  const double p = n.a * n.a + n.c * n.c;
  const double q = n.a * n.b + n.c * n.d;
  const double r = n.b * n.b + n.d * n.d;
  return 0.5 * std::atan2(2.0 * q, p - r);
}

}  // namespace

double operator_norm(const Mat2& m) {
  const auto [p, q] = singular_halves(m);
  return 0.5 * (p + q);
}

double min_singular_value(const Mat2& m) {
  const auto [p, q] = singular_halves(m);
  return 0.5 * std::fabs(p - q);
}

ProjPoint expansion_axis(const Mat2& m) { return ProjPoint::reduce(expansion_angle(m)); }

ProjPoint contraction_axis(const Mat2& m, const Tolerances& tol) {
  const double n = operator_norm(m);
  if (!(n > 1.0 + tol.axis_tol)) {
    std::ostringstream os;
    os << "contraction axis undefined: ||A|| = " << n << " <= 1 + axis_tol";
    throw Error(ErrorKind::AxisUndefined, os.str());
  }
  return ProjPoint::reduce(expansion_angle(m) + 0.5 * kPi);
}

ProjPoint project_act(const Mat2& m, ProjPoint x) {
  const auto [u, w] = m.apply(std::cos(x.theta), std::sin(x.theta));
  return ProjPoint::reduce(std::atan2(w, u));
}

double project_derivative(const Mat2& m, ProjPoint x) {
  const auto [u, w] = m.apply(std::cos(x.theta), std::sin(x.theta));
  return std::fabs(m.det()) / (u * u + w * w);
}

double mobius_act(const Mat2& m, double x) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (std::isinf(x)) return m.c == 0.0 ? inf : m.a / m.c;
  const double den = m.c * x + m.d;
  if (den == 0.0) return inf;
  return (m.a * x + m.b) / den;
}

double cot_chart(ProjPoint x) {
  if (x.theta == 0.0) return std::numeric_limits<double>::infinity();
  return std::cos(x.theta) / std::sin(x.theta);
}

ProjPoint cot_chart_inverse(double x) {
  if (std::isinf(x)) return {0.0};
  return ProjPoint::reduce(std::atan2(1.0, x));
}

MatrixClass classify(const Mat2& m, const Tolerances& tol) {
  const double t = std::fabs(m.trace());
  if (std::fabs(t - 2.0) <= tol.class_tol) return MatrixClass::Parabolic;
  return t < 2.0 ? MatrixClass::Elliptic : MatrixClass::Hyperbolic;
}

std::optional<ProjPoint> attracting_fixed_point(const Mat2& m, const Tolerances& tol) {
  const double det = m.det();
  if (det == 0.0 || !m.finite()) return std::nullopt;
  const Mat2 n = (1.0 / std::sqrt(std::fabs(det))) * m;
  const double tr = n.trace();
  const double disc = tr * tr - 4.0 * n.det();
  if (det > 0.0 && classify(n, tol) != MatrixClass::Hyperbolic) return std::nullopt;
  if (disc <= 0.0) return std::nullopt;
  const double lam = 0.5 * (tr + std::copysign(std::sqrt(disc), tr));
  // Two candidate eigenvectors; keep the better conditioned one.
  const double x1 = n.b, y1 = lam - n.a;
  const double x2 = lam - n.d, y2 = n.c;
  if (std::hypot(x1, y1) >= std::hypot(x2, y2)) return ProjPoint::reduce(std::atan2(y1, x1));
  return ProjPoint::reduce(std::atan2(y2, x2));
}

ScaledMat2 ScaledMat2::from(const Mat2& a) {
  const double n = operator_norm(a);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorKind::InvalidInput, "cannot scale a zero or non-finite matrix");
  }
  const double det = a.det();
  return {(1.0 / n) * a, std::log(n), det > 0.0 ? 1 : (det < 0.0 ? -1 : 0)};
}

double ScaledMat2::norm() const { return std::exp(log_scale); }

double ScaledMat2::trace() const { return std::exp(log_scale) * m.trace(); }

Mat2 ScaledMat2::dense(const Tolerances& tol) const {
  if (log_scale > std::log(tol.overflow_cap)) {
    throw Error(ErrorKind::Overflow, "product norm exceeds overflow cap; use scaled products");
  }
  return std::exp(log_scale) * m;
}

ScaledMat2 operator*(const ScaledMat2& l, const ScaledMat2& r) {
  const Mat2 p = l.m * r.m;
  const double n = operator_norm(p);
  return {(1.0 / n) * p, l.log_scale + r.log_scale + std::log(n), l.det_sign * r.det_sign};
}

double log_project_derivative(const ScaledMat2& a, ProjPoint x) {
  const auto [u, w] = a.m.apply(std::cos(x.theta), std::sin(x.theta));
  return -2.0 * a.log_scale - std::log(u * u + w * w);
}

void check_probability_vector(const std::vector<double>& p) {
  if (p.empty()) throw Error(ErrorKind::InvalidInput, "probability vector is empty");
  double sum = 0.0;
  for (double x : p) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw Error(ErrorKind::InvalidInput, "probability vector entries must be positive");
    }
    sum += x;
  }
  if (std::fabs(sum - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "probability vector sums to " << sum << ", expected 1";
    throw Error(ErrorKind::InvalidInput, os.str());
  }
}

IfsSystem::IfsSystem(std::vector<std::string> labels, const std::vector<Mat2>& matrices,
                     std::optional<std::vector<double>> weights, const Tolerances& tol)
    : labels_(std::move(labels)), weights_(std::move(weights)), tol_(tol) {
  if (matrices.empty()) throw Error(ErrorKind::InvalidInput, "system needs at least one matrix");
  if (labels_.size() != matrices.size()) {
    throw Error(ErrorKind::InvalidInput, "label count does not match matrix count");
  }
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    if (l.empty()) throw Error(ErrorKind::InvalidInput, "labels must be non-empty");
    if (!seen.insert(l).second) throw Error(ErrorKind::InvalidInput, "duplicate label '" + l + "'");
  }
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    const Mat2& m = matrices[i];
    if (!m.finite()) throw Error(ErrorKind::InvalidInput, "matrix '" + labels_[i] + "' has non-finite entries");
    const double det = m.det();
    if (det == 0.0) throw Error(ErrorKind::InvalidInput, "matrix '" + labels_[i] + "' is singular");
    const Mat2 n = (1.0 / std::sqrt(std::fabs(det))) * m;
    if (std::fabs(std::fabs(n.det()) - 1.0) > tol_.det_tol) {
      throw Error(ErrorKind::DeterminantDrift, "matrix '" + labels_[i] + "' could not be normalized to |det| = 1");
    }
    dets_.push_back(det);
    matrices_.push_back(n);
  }
  if (weights_) {
    if (weights_->size() != matrices_.size()) {
      throw Error(ErrorKind::InvalidInput, "weight count does not match matrix count");
    }
    check_probability_vector(*weights_);
  }
}

std::size_t IfsSystem::index_of(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw Error(ErrorKind::UnknownLabel, "unknown label '" + label + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

namespace {
bool single_char_labels(const std::vector<std::string>& labels) {
  return std::all_of(labels.begin(), labels.end(), [](const std::string& l) { return l.size() == 1; });
}
}  // namespace

Word IfsSystem::parse_word(const std::string& text) const {
  Word w;
  const bool has_sep = text.find_first_of(" ,") != std::string::npos;
  if (single_char_labels(labels_) && !has_sep) {
    for (char ch : text) w.push_back(index_of(std::string(1, ch)));
    return w;
  }
  std::string token;
  auto flush = [&] {
    if (!token.empty()) w.push_back(index_of(token));
    token.clear();
  };
  for (char ch : text) {
    if (ch == ' ' || ch == ',') flush();
    else token.push_back(ch);
  }
  flush();
  return w;
}

std::string IfsSystem::format_word(const Word& w) const {
  const bool compact = single_char_labels(labels_);
  std::string out;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w[k] >= labels_.size()) throw Error(ErrorKind::UnknownLabel, "symbol index out of range");
    if (!compact && k > 0) out.push_back(' ');
    out += labels_[w[k]];
  }
  return out;
}

Mat2 word_product(const IfsSystem& system, const Word& w) {
  Mat2 p = Mat2::identity();
  int sign = 1;
  const auto& tol = system.tolerances();
  for (std::size_t s : w) {
    if (s >= system.size()) throw Error(ErrorKind::UnknownLabel, "symbol index out of range");
    const Mat2& a = system.matrix(s);
    p = p * a;
    sign *= a.det() > 0.0 ? 1 : -1;
    if (!(max_abs_entry(p) <= tol.overflow_cap)) {
      throw Error(ErrorKind::Overflow, "product entry exceeds overflow cap; use scaled products");
    }
  }
  // The cancellation in ad - bc scales with |ad| + |bc|.
  const double scale = std::max(1.0, std::fabs(p.a * p.d) + std::fabs(p.b * p.c));
  if (std::fabs(p.det() - sign) > system.tolerances().det_tol * scale) {
    throw Error(ErrorKind::DeterminantDrift, "determinant of product drifted beyond det_tol");
  }
  return p;
}

ScaledMat2 word_product_scaled(const IfsSystem& system, const Word& w) {
  ScaledMat2 p;
  for (std::size_t s : w) {
    if (s >= system.size()) throw Error(ErrorKind::UnknownLabel, "symbol index out of range");
    p = p * ScaledMat2::from(system.matrix(s));
  }
  return p;
}

std::uint64_t word_tree_size(std::size_t alphabet, int depth) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 0, level = 1;
  for (int k = 1; k <= depth; ++k) {
    if (alphabet != 0 && level > kMax / alphabet) return kMax;
    level *= alphabet;
    if (total > kMax - level) return kMax;
    total += level;
  }
  return total;
}

void require_budget(std::size_t alphabet, int depth, const Budget& budget, const std::string& what) {
  const std::uint64_t nodes = word_tree_size(alphabet, depth);
  if (nodes > budget.enumeration_cap) {
    std::ostringstream os;
    os << what << ": " << nodes << " word nodes at depth " << depth << " over " << alphabet
       << " labels exceeds the enumeration cap " << budget.enumeration_cap;
    throw Error(ErrorKind::Budget, os.str());
  }
}

std::vector<Word> all_words(std::size_t alphabet, int n) {
  std::vector<Word> out;
  if (n < 0 || alphabet == 0) return out;
  Word w(static_cast<std::size_t>(n), 0);
  while (true) {
    out.push_back(w);
    int k = n - 1;
    while (k >= 0 && w[static_cast<std::size_t>(k)] + 1 == alphabet) {
      w[static_cast<std::size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
    ++w[static_cast<std::size_t>(k)];
  }
  return out;
}

}  // namespace hypercone
