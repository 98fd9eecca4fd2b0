#ifndef THERMO_MARKOV_MODEL_HPP
#define THERMO_MARKOV_MODEL_HPP

// Countable-Markov, piecewise-affine expanding maps of (0,1] and their
// finite truncations.
//
// Symbols are 1-based in every public signature (branch 1 is the branch
// containing points close to 1 for the built-in family). Dense state indices
// inside TruncatedSubsystem rows are 0-based.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "thermo/errors.hpp"

namespace thermo {

/// Absolute tolerance on interval endpoints in Markov-image checks.
inline constexpr double kMarkovTolerance = 1e-9;
/// Relative distance to a partition endpoint that aborts an orbit.
inline constexpr double kEndpointTolerance = 1e-12;

struct Interval {
  double left = 0.0;
  double right = 0.0;

  [[nodiscard]] double length() const { return right - left; }
};

/// One affine, orientation-preserving branch: x -> offset + slope * (x - left).
struct BranchSpec {
  std::size_t index = 0;
  Interval interval;
  double slope_magnitude = 0.0;
  double log_slope = 0.0;
  double image_offset = 0.0;

  [[nodiscard]] Interval image() const {
    return {image_offset, image_offset + slope_magnitude * interval.length()};
  }
  [[nodiscard]] double apply(double x) const {
    return image_offset + slope_magnitude * (x - interval.left);
  }
};

enum class FamilyTag { StratmannVogt, Custom };

/// Branches n >= from_index are copies of branch from_index - 1 scaled by
/// ratio^(n - from_index + 1) towards 0, with the same slope.
struct TailRule {
  std::size_t from_index = 0;
  double ratio = 0.0;
};

enum class TransitionRule {
  Image,     // j allowed after i iff X_j lies in the image of X_i
  Full,      // every transition allowed
  Explicit,  // user-supplied finite matrix
  Sv         // closed-form rule of the built-in family
};

namespace detail {

inline bool interval_inside(const Interval& inner, const Interval& outer) {
  // Tolerance scales with the magnitude of the endpoints so that deep tail
  // branches (which shrink geometrically) are compared at their own scale.
  const double scale = std::max(std::abs(inner.right), 1e-300);
  const double tol = kMarkovTolerance * std::min(1.0, scale);
  return inner.left >= outer.left - tol && inner.right <= outer.right + tol;
}

inline bool near(double x, double endpoint) {
  return std::abs(x - endpoint) <= kEndpointTolerance * std::max(std::abs(endpoint), 1e-300);
}

}  // namespace detail

/// A position on (0,1] stored as ratio^scale * mantissa so that orbits that
/// drift into the geometric tail keep full relative precision. Models without
/// a tail rule always use scale 0.
struct OrbitPoint {
  std::int64_t scale = 0;
  double mantissa = 0.0;
};

class MarkovMapModel {
 public:
  /// The dissipative family F_lambda: X_n = (lambda^n, lambda^(n-1)),
  /// slope 1/(1-lambda) on X_1 and 1/(lambda(1-lambda)) on X_n, n >= 2.
  static MarkovMapModel stratmann_vogt(double lambda) {
    if (!(lambda > 0.5 && lambda < 1.0)) {
      std::ostringstream os;
      os << "lambda must lie in (1/2, 1), got " << lambda;
      throw DomainError(os.str());
    }
    MarkovMapModel m;
    m.family_ = FamilyTag::StratmannVogt;
    m.lambda_ = lambda;
    m.rule_ = TransitionRule::Sv;
    m.tail_ = TailRule{3, lambda};
    m.head_ = {sv_branch(lambda, 1), sv_branch(lambda, 2)};
    m.expansion_floor_ = 1.0 / (1.0 - lambda);
    std::ostringstream os;
    os.precision(17);
    os << "sv:" << lambda;
    m.signature_ = os.str();
    return m;
  }

  /// A user-described model. Throws DomainError listing every violated
  /// invariant (see markov_violations).
  static MarkovMapModel custom(std::vector<BranchSpec> head, std::optional<TailRule> tail,
                               TransitionRule rule,
                               std::vector<std::vector<bool>> explicit_matrix = {}) {
    MarkovMapModel m = custom_unchecked(std::move(head), tail, rule, std::move(explicit_matrix));
    auto violations = m.markov_violations();
    if (!violations.empty()) {
      std::string msg = "invalid map model:";
      for (const auto& v : violations) msg += "\n  " + v;
      throw DomainError(msg);
    }
    return m;
  }

  /// Structural construction without the Markov-image check. Used by config
  /// validation, which reports violations instead of throwing.
  static MarkovMapModel custom_unchecked(std::vector<BranchSpec> head,
                                         std::optional<TailRule> tail, TransitionRule rule,
                                         std::vector<std::vector<bool>> explicit_matrix = {}) {
    if (head.empty()) throw DomainError("a custom model needs at least one branch");
    std::sort(head.begin(), head.end(),
              [](const BranchSpec& a, const BranchSpec& b) { return a.index < b.index; });
    for (std::size_t k = 0; k < head.size(); ++k) {
      if (head[k].index != k + 1) {
        throw DomainError("branch indices must be 1..n without gaps (missing index " +
                          std::to_string(k + 1) + ")");
      }
      if (!(head[k].slope_magnitude > 0.0)) {
        throw DomainError("branch " + std::to_string(k + 1) + " has non-positive slope");
      }
      head[k].log_slope = std::log(head[k].slope_magnitude);
    }
    if (tail) {
      if (!(tail->ratio > 0.0 && tail->ratio < 1.0)) {
        throw DomainError("tail ratio must lie in (0, 1)");
      }
      if (tail->from_index < 2 || tail->from_index != head.size() + 1) {
        throw DomainError("tail from_index must equal the number of listed branches + 1");
      }
      if (rule == TransitionRule::Explicit) {
        throw DomainError("an explicit transition matrix cannot describe an infinite alphabet");
      }
    }
    if (rule == TransitionRule::Explicit) {
      if (explicit_matrix.size() != head.size()) {
        throw DomainError("explicit transition matrix must be " + std::to_string(head.size()) +
                          "x" + std::to_string(head.size()));
      }
      for (const auto& row : explicit_matrix) {
        if (row.size() != head.size()) {
          throw DomainError("explicit transition matrix rows must have " +
                            std::to_string(head.size()) + " entries");
        }
      }
    }
    if (rule == TransitionRule::Sv) throw DomainError("the sv transition rule is reserved");

    MarkovMapModel m;
    m.family_ = FamilyTag::Custom;
    m.rule_ = rule;
    m.tail_ = tail;
    m.head_ = std::move(head);
    m.explicit_ = std::move(explicit_matrix);
    double floor = m.head_.front().slope_magnitude;
    for (const auto& b : m.head_) floor = std::min(floor, b.slope_magnitude);
    m.expansion_floor_ = floor;

    std::ostringstream os;
    os.precision(17);
    os << "custom";
    for (const auto& b : m.head_) {
      os << "|" << b.interval.left << "," << b.interval.right << "," << b.slope_magnitude << ","
         << b.image_offset;
    }
    if (tail) os << "|tail:" << tail->from_index << "," << tail->ratio;
    os << "|rule:" << static_cast<int>(rule);
    for (const auto& row : m.explicit_) {
      os << "|";
      for (bool b : row) os << (b ? '1' : '0');
    }
    m.signature_ = os.str();
    return m;
  }

  [[nodiscard]] FamilyTag family() const { return family_; }
  [[nodiscard]] std::optional<double> sv_lambda() const {
    if (family_ == FamilyTag::StratmannVogt) return lambda_;
    return std::nullopt;
  }
  [[nodiscard]] TransitionRule rule() const { return rule_; }
  [[nodiscard]] const std::optional<TailRule>& tail() const { return tail_; }
  [[nodiscard]] double expansion_floor() const { return expansion_floor_; }
  /// Identity used to reject mixing potentials bound to different maps.
  [[nodiscard]] const std::string& signature() const { return signature_; }

  /// Number of branches, or nullopt for a countably infinite alphabet.
  [[nodiscard]] std::optional<std::size_t> alphabet_size() const {
    if (tail_) return std::nullopt;
    return head_.size();
  }

  /// Branch data generated on demand; the infinite alphabet is never stored.
  [[nodiscard]] BranchSpec branch(std::size_t index) const {
    if (index == 0) throw DomainError("branch indices start at 1");
    if (family_ == FamilyTag::StratmannVogt) return sv_branch(lambda_, index);
    if (index <= head_.size()) return head_[index - 1];
    if (!tail_) {
      throw DomainError("branch " + std::to_string(index) + " exceeds the alphabet size " +
                        std::to_string(head_.size()));
    }
    const BranchSpec& base = head_.back();
    const double scale = std::pow(tail_->ratio, static_cast<double>(index - head_.size()));
    BranchSpec b = base;
    b.index = index;
    b.interval = {base.interval.left * scale, base.interval.right * scale};
    b.image_offset = base.image_offset * scale;
    return b;
  }

  [[nodiscard]] bool transition(std::size_t i, std::size_t j) const {
    if (i == 0 || j == 0) throw DomainError("symbols start at 1");
    switch (rule_) {
      case TransitionRule::Sv:
        return i == 1 || j + 1 >= i;
      case TransitionRule::Full:
        check_symbol(i);
        check_symbol(j);
        return true;
      case TransitionRule::Explicit:
        check_symbol(i);
        check_symbol(j);
        return explicit_[i - 1][j - 1];
      case TransitionRule::Image:
        return detail::interval_inside(branch(j).interval, branch(i).image());
    }
    return false;
  }

  /// Invariant violations over branches 1..max_index (all branches for a
  /// finite alphabet; the first from_index + 62 for a tail model when
  /// max_index is 0).
  [[nodiscard]] std::vector<std::string> markov_violations(std::size_t max_index = 0) const;

  /// Branch containing the point; throws BoundaryError on endpoints and gaps.
  [[nodiscard]] std::size_t locate(const OrbitPoint& p) const;
  /// One application of the map in scaled coordinates.
  [[nodiscard]] std::pair<OrbitPoint, std::size_t> step(const OrbitPoint& p) const;
  /// Canonical scaled representation of ratio^scale * mantissa.
  [[nodiscard]] OrbitPoint normalize(OrbitPoint p) const;
  [[nodiscard]] OrbitPoint from_value(double x) const { return normalize({0, x}); }
  [[nodiscard]] double to_value(const OrbitPoint& p) const {
    if (p.scale == 0 || !tail_) return p.mantissa;
    return std::pow(tail_->ratio, static_cast<double>(p.scale)) * p.mantissa;
  }

 private:
  MarkovMapModel() = default;

  static BranchSpec sv_branch(double lambda, std::size_t n) {
    BranchSpec b;
    b.index = n;
    b.interval = {std::pow(lambda, static_cast<double>(n)),
                  std::pow(lambda, static_cast<double>(n - 1))};
    b.slope_magnitude = n == 1 ? 1.0 / (1.0 - lambda) : 1.0 / (lambda * (1.0 - lambda));
    b.log_slope = n == 1 ? -std::log1p(-lambda) : -std::log(lambda) - std::log1p(-lambda);
    b.image_offset = 0.0;
    return b;
  }

  void check_symbol(std::size_t s) const {
    if (!tail_ && s > head_.size()) {
      throw DomainError("symbol " + std::to_string(s) + " exceeds the alphabet size " +
                        std::to_string(head_.size()));
    }
  }

  // Start of the region (0, tail_top) tiled by the scaled tail copies.
  [[nodiscard]] double tail_top() const { return head_.back().interval.right; }

  FamilyTag family_ = FamilyTag::Custom;
  double lambda_ = 0.0;
  TransitionRule rule_ = TransitionRule::Image;
  std::optional<TailRule> tail_;
  std::vector<BranchSpec> head_;
  std::vector<std::vector<bool>> explicit_;
  double expansion_floor_ = 1.0;
  std::string signature_;
};

inline std::vector<std::string> MarkovMapModel::markov_violations(std::size_t max_index) const {
  std::vector<std::string> out;
  std::size_t count = max_index;
  if (count == 0) count = tail_ ? tail_->from_index + 62 : head_.size();
  if (!tail_) count = std::min(count, head_.size());

  std::vector<BranchSpec> bs;
  bs.reserve(count);
  for (std::size_t i = 1; i <= count; ++i) bs.push_back(branch(i));

  const double tol = kMarkovTolerance;
  for (const auto& b : bs) {
    const std::string name = "branch " + std::to_string(b.index);
    if (!(b.interval.right > b.interval.left)) out.push_back(name + ": empty interval");
    if (b.interval.left < -tol || b.interval.right > 1.0 + tol) {
      out.push_back(name + ": interval outside (0,1]");
    }
    if (!(b.slope_magnitude > 1.0)) out.push_back(name + ": slope must exceed 1");
    const Interval img = b.image();
    if (img.left < -tol || img.right > 1.0 + tol) out.push_back(name + ": image outside (0,1]");
  }

  // Pairwise disjoint interiors.
  std::vector<std::size_t> order(bs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return bs[a].interval.left < bs[b].interval.left;
  });
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    for (std::size_t l = k + 1; l < order.size(); ++l) {
      const auto& a = bs[order[k]];
      const auto& b = bs[order[l]];
      if (b.interval.left >= a.interval.right - tol * std::min(1.0, a.interval.right)) break;
      out.push_back("branches " + std::to_string(a.index) + " and " + std::to_string(b.index) +
                    " have overlapping interiors");
    }
  }

  if (tail_) {
    for (std::size_t k = 0; k + 1 < head_.size(); ++k) {
      if (head_[k].interval.left < tail_top() - tol) {
        out.push_back("branch " + std::to_string(k + 1) +
                      " lies inside the region tiled by the tail");
      }
    }
  }

  double lowest = 1.0;
  for (const auto& b : bs) lowest = std::min(lowest, b.interval.left);

  std::vector<bool> column_hit(bs.size(), false);
  for (const auto& bi : bs) {
    const std::string name = "branch " + std::to_string(bi.index);
    const Interval img = bi.image();
    std::vector<Interval> parts;
    for (const auto& bj : bs) {
      if (!transition(bi.index, bj.index)) continue;
      column_hit[bj.index - 1] = true;
      if (!detail::interval_inside(bj.interval, img)) {
        out.push_back(name + ": allowed successor " + std::to_string(bj.index) +
                      " is not inside its image");
      }
      parts.push_back(bj.interval);
    }
    if (parts.empty()) {
      out.push_back(name + ": no allowed successor");
      continue;
    }
    std::sort(parts.begin(), parts.end(),
              [](const Interval& a, const Interval& b) { return a.left < b.left; });
    Interval merged = parts.front();
    bool gap = false;
    for (std::size_t k = 1; k < parts.size(); ++k) {
      if (parts[k].left > merged.right + tol * std::min(1.0, merged.right)) gap = true;
      merged.right = std::max(merged.right, parts[k].right);
    }
    const bool top_ok = std::abs(merged.right - img.right) <= tol;
    // Below the smallest materialised branch the tail is not enumerated.
    const double floor = tail_ ? std::max(img.left, lowest) : img.left;
    const bool bottom_ok = merged.left <= floor + tol;
    if (gap || !top_ok || !bottom_ok) {
      std::ostringstream os;
      os.precision(12);
      os << name << ": image (" << img.left << ", " << img.right
         << ") is not the union of its allowed successors";
      out.push_back(os.str());
    }
  }
  for (std::size_t j = 0; j < column_hit.size(); ++j) {
    if (!column_hit[j]) {
      out.push_back("branch " + std::to_string(j + 1) + ": not reachable from any branch");
    }
  }
  return out;
}

inline OrbitPoint MarkovMapModel::normalize(OrbitPoint p) const {
  if (!tail_) return {0, p.mantissa};
  const double r = tail_->ratio;
  const double top = tail_top();
  while (p.scale > 0 && p.mantissa >= top) {
    p.mantissa *= r;
    --p.scale;
  }
  if (p.scale == 0 && p.mantissa >= top) return p;
  if (p.mantissa <= 0.0) return p;
  if (p.mantissa < r * top) {
    const double jumps = std::floor(std::log(p.mantissa / top) / std::log(r));
    if (jumps > 0) {
      p.mantissa *= std::pow(r, -jumps);
      p.scale += static_cast<std::int64_t>(jumps);
    }
    while (p.mantissa < r * top) {
      p.mantissa /= r;
      ++p.scale;
    }
    while (p.mantissa >= top && p.scale > 0) {
      p.mantissa *= r;
      --p.scale;
    }
  }
  return p;
}

inline std::size_t MarkovMapModel::locate(const OrbitPoint& raw) const {
  const OrbitPoint p = normalize(raw);
  const double x = p.mantissa;
  if (p.scale == 0) {
    if (!(x > 0.0) || x > 1.0) throw BoundaryError("point outside (0,1]");
    for (const auto& b : head_) {
      if (detail::near(x, b.interval.left) || detail::near(x, b.interval.right)) {
        std::ostringstream os;
        os.precision(17);
        os << "point " << x << " is an endpoint of branch " << b.index;
        throw BoundaryError(os.str());
      }
      if (x > b.interval.left && x < b.interval.right) return b.index;
    }
    if (!tail_ || x >= tail_top()) {
      std::ostringstream os;
      os.precision(17);
      os << "point " << x << " lies in no branch";
      throw BoundaryError(os.str());
    }
  }
  // Tail region: mantissa lives in the window of the base branch.
  const BranchSpec& base = head_.back();
  if (detail::near(x, base.interval.left) || detail::near(x, base.interval.right)) {
    throw BoundaryError("orbit point is a tail branch endpoint");
  }
  if (x > base.interval.left && x < base.interval.right) {
    return head_.size() + static_cast<std::size_t>(p.scale);
  }
  throw BoundaryError("orbit point lies in a gap between tail branches");
}

inline std::pair<OrbitPoint, std::size_t> MarkovMapModel::step(const OrbitPoint& raw) const {
  const OrbitPoint p = normalize(raw);
  const std::size_t n = locate(p);
  if (p.scale == 0 && n <= head_.size()) {
    const BranchSpec& b = head_[n - 1];
    return {normalize({0, b.apply(p.mantissa)}), n};
  }
  const BranchSpec& base = head_.back();
  return {normalize({p.scale, base.apply(p.mantissa)}), n};
}

/// Branch containing x and its affine image.
inline std::pair<double, std::size_t> apply_map(const MarkovMapModel& model, double x) {
  if (!(x > 0.0) || x > 1.0) throw BoundaryError("point outside (0,1]");
  const auto [image, branch] = model.step(model.from_value(x));
  return {model.to_value(image), branch};
}

/// Run-length compressed row of a boolean matrix: columns [begin, end), 0-based.
struct ColumnRun {
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// The sub-shift on symbols {1..N} with the induced transition matrix.
class TruncatedSubsystem {
 public:
  TruncatedSubsystem(std::vector<std::vector<ColumnRun>> rows, std::size_t depth = 1)
      : rows_(std::move(rows)), depth_(depth) {}

  static TruncatedSubsystem from_dense(const std::vector<std::vector<bool>>& matrix) {
    std::vector<std::vector<ColumnRun>> rows(matrix.size());
    for (std::size_t i = 0; i < matrix.size(); ++i) {
      if (matrix[i].size() != matrix.size()) throw DomainError("transition matrix must be square");
      std::size_t j = 0;
      while (j < matrix[i].size()) {
        if (!matrix[i][j]) {
          ++j;
          continue;
        }
        std::size_t k = j;
        while (k < matrix[i].size() && matrix[i][k]) ++k;
        rows[i].push_back({j, k});
        j = k;
      }
    }
    return TruncatedSubsystem(std::move(rows));
  }

  [[nodiscard]] std::size_t size() const { return rows_.size(); }
  [[nodiscard]] std::size_t depth() const { return depth_; }
  [[nodiscard]] const std::vector<std::vector<ColumnRun>>& rows() const { return rows_; }

  /// Matrix entry for 1-based symbols.
  [[nodiscard]] bool allows(std::size_t i, std::size_t j) const {
    if (i == 0 || j == 0 || i > size() || j > size()) return false;
    for (const auto& r : rows_[i - 1]) {
      if (j - 1 >= r.begin && j - 1 < r.end) return true;
    }
    return false;
  }

  [[nodiscard]] std::vector<std::vector<bool>> dense() const {
    std::vector<std::vector<bool>> m(size(), std::vector<bool>(size(), false));
    for (std::size_t i = 0; i < size(); ++i) {
      for (const auto& r : rows_[i]) {
        for (std::size_t j = r.begin; j < r.end; ++j) m[i][j] = true;
      }
    }
    return m;
  }

  [[nodiscard]] std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& row : rows_) {
      for (const auto& r : row) n += r.end - r.begin;
    }
    return n;
  }

 private:
  std::vector<std::vector<ColumnRun>> rows_;
  std::size_t depth_ = 1;
};

/// Irreducible and aperiodic, i.e. some power (at most the Wielandt bound
/// (N-1)^2 + 1 <= N^2) of the matrix is strictly positive.
inline bool is_primitive(const TruncatedSubsystem& sub) {
  const std::size_t n = sub.size();
  if (n == 0) return false;
  constexpr std::size_t kUnseen = static_cast<std::size_t>(-1);

  // Forward BFS levels from state 0.
  std::vector<std::size_t> level(n, kUnseen);
  std::queue<std::size_t> q;
  level[0] = 0;
  q.push(0);
  while (!q.empty()) {
    const std::size_t u = q.front();
    q.pop();
    for (const auto& r : sub.rows()[u]) {
      for (std::size_t v = r.begin; v < r.end; ++v) {
        if (level[v] == kUnseen) {
          level[v] = level[u] + 1;
          q.push(v);
        }
      }
    }
  }
  if (std::find(level.begin(), level.end(), kUnseen) != level.end()) return false;

  // Backward reachability to state 0.
  std::vector<std::vector<std::size_t>> reverse(n);
  for (std::size_t u = 0; u < n; ++u) {
    for (const auto& r : sub.rows()[u]) {
      for (std::size_t v = r.begin; v < r.end; ++v) reverse[v].push_back(u);
    }
  }
  std::vector<bool> seen(n, false);
  seen[0] = true;
  q.push(0);
  while (!q.empty()) {
    const std::size_t u = q.front();
    q.pop();
    for (std::size_t v : reverse[u]) {
      if (!seen[v]) {
        seen[v] = true;
        q.push(v);
      }
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) return false;

  // Period = gcd of level[u] + 1 - level[v] over all edges.
  std::size_t period = 0;
  for (std::size_t u = 0; u < n; ++u) {
    for (const auto& r : sub.rows()[u]) {
      for (std::size_t v = r.begin; v < r.end; ++v) {
        const auto diff = static_cast<std::int64_t>(level[u]) + 1 - static_cast<std::int64_t>(level[v]);
        period = std::gcd(period, static_cast<std::size_t>(diff < 0 ? -diff : diff));
        if (period == 1) return true;
      }
    }
  }
  return period == 1;
}

/// Transition structure of the model restricted to symbols {1..N}.
/// Throws MixingError when the induced matrix is not primitive.
inline TruncatedSubsystem truncate(const MarkovMapModel& model, std::size_t N) {
  if (N < 2) throw PreconditionError("truncation level must be at least 2");
  if (auto size = model.alphabet_size(); size && N > *size) {
    throw DomainError("truncation level " + std::to_string(N) + " exceeds the alphabet size " +
                      std::to_string(*size));
  }
  std::vector<std::vector<ColumnRun>> rows(N);
  if (model.rule() == TransitionRule::Sv) {
    rows[0].push_back({0, N});
    for (std::size_t n = 2; n <= N; ++n) rows[n - 1].push_back({n - 2, N});
  } else {
    std::vector<BranchSpec> bs;
    bs.reserve(N);
    for (std::size_t i = 1; i <= N; ++i) bs.push_back(model.branch(i));
    for (std::size_t i = 1; i <= N; ++i) {
      const Interval img = bs[i - 1].image();
      std::size_t j = 1;
      while (j <= N) {
        const bool on = model.rule() == TransitionRule::Image
                            ? detail::interval_inside(bs[j - 1].interval, img)
                            : model.transition(i, j);
        if (!on) {
          ++j;
          continue;
        }
        std::size_t k = j;
        while (k <= N && (model.rule() == TransitionRule::Image
                              ? detail::interval_inside(bs[k - 1].interval, img)
                              : model.transition(i, k))) {
          ++k;
        }
        rows[i - 1].push_back({j - 1, k - 1});
        j = k;
      }
    }
  }
  TruncatedSubsystem sub(std::move(rows));
  if (!is_primitive(sub)) {
    throw MixingError("the " + std::to_string(N) + "-symbol truncation is not primitive");
  }
  return sub;
}

}  // namespace thermo

#endif  // THERMO_MARKOV_MODEL_HPP
