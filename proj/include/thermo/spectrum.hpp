#ifndef THERMO_SPECTRUM_HPP
#define THERMO_SPECTRUM_HPP

// Multifractal spectra through pressure: the value V(alpha) as the smallest
// delta with inf_q P(q(phi - alpha psi) - delta log|T'|) <= 0, Bowen roots,
// and the closed forms of the built-in family.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "thermo/errors.hpp"
#include "thermo/markov_model.hpp"
#include "thermo/parallel.hpp"
#include "thermo/potential.hpp"
#include "thermo/pressure.hpp"

namespace thermo {

enum class SpectrumSource { Variational, ClosedForm, EscapeValue };

inline const char* to_string(SpectrumSource s) {
  switch (s) {
    case SpectrumSource::Variational:
      return "VARIATIONAL";
    case SpectrumSource::ClosedForm:
      return "CLOSED_FORM";
    case SpectrumSource::EscapeValue:
      return "ESCAPE_VALUE";
  }
  return "?";
}

struct SpectrumPoint {
  double alpha = 0.0;
  double dimension = 0.0;
  std::optional<double> q_star;
  std::size_t delta_iterations = 0;
  SpectrumSource source = SpectrumSource::Variational;
  /// Final delta bracket (variational points only).
  double bracket_low = 0.0;
  double bracket_high = 0.0;
  std::size_t truncation = 0;
  double tolerance = 0.0;
  /// The bounded-psi-average hypothesis is assumed, not checked, when psi is
  /// not constant.
  bool hypothesis_unverified = false;
};

struct Discontinuity {
  double alpha = 0.0;
  double left_limit = 0.0;
  double value = 0.0;
};

struct SpectrumCurve {
  std::vector<SpectrumPoint> points;
  double alpha_min = 0.0;
  double alpha_max = 0.0;
  std::vector<Discontinuity> discontinuities;
};

struct AlphaBounds {
  double min = 0.0;
  double max = 0.0;
  bool exact = false;
};

namespace detail {

inline void require_positive_floor(const Potential& psi) {
  if (!psi.positivity_floor()) {
    throw DomainError("psi must carry a positivity floor (bounded away from zero)");
  }
}

inline void require_same_model(const MarkovMapModel& model,
                               std::initializer_list<const Potential*> ps) {
  for (const Potential* p : ps) {
    if (!p->model_signature().empty() && p->model_signature() != model.signature()) {
      throw CompositionError("potential is bound to a different map");
    }
  }
}

inline bool is_unit_constant(const Potential& p) {
  return p.constant() && *p.constant() == 1.0;
}

// Range-min assignment over columns with point queries; each node stores
// the best (value, source) pair pushed onto it.
class RangeMin {
 public:
  explicit RangeMin(std::size_t n) : n_(n), size_(1) {
    while (size_ < n_) size_ *= 2;
    tree_.assign(2 * size_, {kInf, 0});
  }
  void reset() { std::fill(tree_.begin(), tree_.end(), Entry{kInf, 0}); }
  void update(std::size_t lo, std::size_t hi, double value, std::size_t source) {
    for (lo += size_, hi += size_; lo < hi; lo /= 2, hi /= 2) {
      if (lo & 1) put(lo++, value, source);
      if (hi & 1) put(--hi, value, source);
    }
  }
  [[nodiscard]] std::pair<double, std::size_t> query(std::size_t i) const {
    Entry best{kInf, 0};
    for (i += size_; i > 0; i /= 2) {
      if (tree_[i].value < best.value) best = tree_[i];
    }
    return {best.value, best.source};
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  struct Entry {
    double value;
    std::size_t source;
  };
  void put(std::size_t node, double value, std::size_t source) {
    if (value < tree_[node].value) tree_[node] = {value, source};
  }
  std::size_t n_, size_;
  std::vector<Entry> tree_;
};

// Does some cycle have negative total node cost? Bellman-Ford from a virtual
// source with range relaxations; a cycle in the predecessor graph certifies
// a negative cycle.
inline bool has_negative_cycle(const TransferGraph& g, std::span<const double> cost) {
  const std::size_t n = g.size();
  double scale = 1.0;
  for (double c : cost) scale = std::max(scale, std::abs(c));
  const double eps = 1e-12 * scale;
  std::vector<double> dist(n, 0.0);
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> pred(n, kNone);
  std::vector<std::uint8_t> mark(n);
  RangeMin tree(n);
  for (std::size_t round = 0; round <= n; ++round) {
    tree.reset();
    for (std::size_t u = 0; u < n; ++u) {
      for (const auto& r : g.rows[u]) tree.update(r.begin, r.end, dist[u] + cost[u], u);
    }
    bool changed = false;
    for (std::size_t v = 0; v < n; ++v) {
      const auto [d, u] = tree.query(v);
      if (d < dist[v] - eps) {
        dist[v] = d;
        pred[v] = u;
        changed = true;
      }
    }
    if (!changed) return false;
    // Walk predecessor chains looking for a cycle.
    std::fill(mark.begin(), mark.end(), 0);
    for (std::size_t s = 0; s < n; ++s) {
      if (mark[s]) continue;
      std::size_t v = s;
      while (v != kNone && mark[v] == 0) {
        mark[v] = 1;
        v = pred[v];
      }
      if (v != kNone && mark[v] == 1) return true;
      for (v = s; v != kNone && mark[v] == 1; v = pred[v]) mark[v] = 2;
    }
  }
  return true;
}

// min over cycles of sum(num) / sum(den), den > 0, by bisection on the
// negative-cycle test (Lawler).
inline double min_cycle_ratio(const TransferGraph& g, std::span<const double> num,
                              std::span<const double> den) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t s = 0; s < g.size(); ++s) {
    lo = std::min(lo, num[s] / den[s]);
    hi = std::max(hi, num[s] / den[s]);
  }
  std::vector<double> cost(g.size());
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    for (std::size_t s = 0; s < g.size(); ++s) cost[s] = num[s] - mid * den[s];
    if (has_negative_cycle(g, cost)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Extremes of the quotients S_p phi / S_p psi over periodic orbits of the
/// N-truncation (minimum and maximum cycle ratio). For the built-in family
/// with phi = log|T'| and psi = 1 the endpoints -log(1-lambda) and
/// -log(lambda(1-lambda)) are returned exactly.
inline AlphaBounds alpha_bounds(const MarkovMapModel& model, const Potential& phi,
                                const Potential& psi, std::size_t N) {
  detail::require_positive_floor(psi);
  detail::require_same_model(model, {&phi, &psi});
  if (N < 2) throw PreconditionError("truncation level must be at least 2");
  if (auto lam = model.sv_lambda();
      lam && phi.kind() == PotentialKind::LogDerivative && detail::is_unit_constant(psi)) {
    return {-std::log1p(-*lam), -std::log(*lam) - std::log1p(-*lam), true};
  }
  const TruncatedSubsystem sub = truncate(model, N);
  const TransferGraph g = recode(sub, std::max(phi.depth(), psi.depth()));
  auto num = state_values(g, phi);
  const auto den = state_values(g, psi);
  const double lo = detail::min_cycle_ratio(g, num, den);
  for (auto& v : num) v = -v;
  const double hi = -detail::min_cycle_ratio(g, num, den);
  return {lo, hi, false};
}

namespace detail {

// P_N(q (phi - alpha psi) - delta logT) on a fixed truncation, with the last
// root kept as a hint for the next evaluation.
class PressureFamily {
 public:
  PressureFamily(const MarkovMapModel& model, const Potential& phi, const Potential& psi,
                 double alpha, std::size_t N)
      : graph_(recode(truncate(model, N), std::max(phi.depth(), psi.depth()))) {
    const Potential logT = builtin_log_derivative(model);
    const auto p = state_values(graph_, phi);
    const auto s = state_values(graph_, psi);
    log_t_ = state_values(graph_, logT);
    gap_.resize(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) gap_[k] = p[k] - alpha * s[k];
    weights_.resize(p.size());
  }

  double operator()(double q, double delta) {
    for (std::size_t k = 0; k < gap_.size(); ++k) weights_[k] = q * gap_[k] - delta * log_t_[k];
    ++evaluations_;
    const double v = perron_log_root(graph_, weights_, kPerronTolerance, &hint_).log_root;
    if (!std::isfinite(v)) hint_ = std::numeric_limits<double>::quiet_NaN();
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  }

  [[nodiscard]] bool flat() const {
    return std::all_of(gap_.begin(), gap_.end(), [](double v) { return v == 0.0; });
  }
  [[nodiscard]] std::size_t evaluations() const { return evaluations_; }

 private:
  TransferGraph graph_;
  std::vector<double> gap_, log_t_, weights_;
  double hint_ = std::numeric_limits<double>::quiet_NaN();
  std::size_t evaluations_ = 0;
};

inline constexpr double kMaxAbsQ = 1e6;

// Convex minimisation in q: expand a bracket from q = 0 until the function
// turns upward, then Brent's golden-section/parabolic search to tolerance.
inline std::pair<double, double> minimise_over_q(PressureFamily& f, double delta, double tol) {
  if (f.flat()) {
    const double v = f(0.0, delta);
    return {v, 0.0};
  }
  auto g = [&](double q) { return f(q, delta); };
  double a = 0.0, fa = g(a);
  double step = 1.0;
  double b = step, fb = g(b);
  if (fb > fa) {
    step = -1.0;
    b = step;
    fb = g(b);
    if (fb >= fa) {
      // Minimum inside [-1, 1].
      const auto r = boost::math::tools::brent_find_minima(
          g, -1.0, 1.0, std::max(8, static_cast<int>(std::ceil(-std::log2(tol))) + 2));
      return {r.second, r.first};
    }
  }
  // Walk downhill, doubling the step, until the value rises.
  double c = b + 2.0 * step, fc = g(c);
  while (fc < fb) {
    if (std::abs(c) > kMaxAbsQ) {
      throw UnboundedError("pressure keeps decreasing in q; alpha is at or beyond the spectrum edge");
    }
    a = b;
    fa = fb;
    b = c;
    fb = fc;
    step *= 2.0;
    c = b + 2.0 * step;
    fc = g(c);
  }
  const double lo = std::min(a, c), hi = std::max(a, c);
  const int bits = std::max(8, static_cast<int>(std::ceil(std::log2((hi - lo) / tol))) + 2);
  boost::uintmax_t max_iter = 200;
  const auto r = boost::math::tools::brent_find_minima(g, lo, hi, std::min(bits, 52), max_iter);
  return {r.second, r.first};
}

inline void check_interior(const AlphaBounds& bounds, double alpha) {
  const double margin = 1e-9 * std::max(1.0, std::abs(alpha));
  if (!(alpha > bounds.min + margin && alpha < bounds.max - margin)) {
    throw DomainError("alpha must lie strictly inside (alpha_min, alpha_max) = (" +
                      std::to_string(bounds.min) + ", " + std::to_string(bounds.max) + ")");
  }
}

}  // namespace detail

struct InfPressure {
  double value = 0.0;
  double q_star = 0.0;
};

/// inf over q of P_N(q (phi - alpha psi) - delta log|T'|) and its minimiser,
/// to q-tolerance tol. Throws UnboundedError when no minimum exists for
/// |q| <= 1e6.
inline InfPressure inf_pressure_over_q(const MarkovMapModel& model, const Potential& phi,
                                       const Potential& psi, double alpha, double delta,
                                       std::size_t N, double tol) {
  detail::require_positive_floor(psi);
  detail::require_same_model(model, {&phi, &psi});
  if (!(delta >= 0.0 && delta <= 1.0)) throw DomainError("delta must lie in [0, 1]");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  detail::PressureFamily family(model, phi, psi, alpha, N);
  const auto [value, q] = detail::minimise_over_q(family, delta, tol);
  return {value, q};
}

/// V(alpha) on the N-truncation: the threshold delta in [0,1] where
/// inf_q P_N(q(phi - alpha psi) - delta log|T'|) changes sign, bracketed to
/// width tol. The inner infimum decreases strictly in delta, which is
/// checked on every evaluated pair.
inline SpectrumPoint variational_dimension(const MarkovMapModel& model, const Potential& phi,
                                           const Potential& psi, double alpha, std::size_t N,
                                           double tol) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  const AlphaBounds bounds = alpha_bounds(model, phi, psi, N);
  detail::check_interior(bounds, alpha);

  detail::PressureFamily family(model, phi, psi, alpha, N);
  const double q_tol = std::max(1e-9, std::min(1e-4, tol));
  std::vector<std::pair<double, double>> seen;
  double last_q = 0.0;
  auto inner = [&](double delta) {
    const auto [v, q] = detail::minimise_over_q(family, delta, q_tol);
    seen.emplace_back(delta, v);
    last_q = q;
    return v;
  };

  SpectrumPoint out;
  out.alpha = alpha;
  out.source = SpectrumSource::Variational;
  out.truncation = N;
  out.tolerance = tol;
  out.hypothesis_unverified = !psi.constant().has_value();

  const double at0 = inner(0.0);
  const double at1 = inner(1.0);
  if (at0 <= 0.0) {
    out.dimension = 0.0;
    out.bracket_low = out.bracket_high = 0.0;
  } else if (at1 >= 0.0) {
    out.dimension = 1.0;
    out.bracket_low = out.bracket_high = 1.0;
  } else {
    boost::uintmax_t max_iter = 200;
    auto stop = [tol](double a, double b) { return std::abs(b - a) <= tol; };
    const auto [lo, hi] =
        boost::math::tools::toms748_solve(inner, 0.0, 1.0, at0, at1, stop, max_iter);
    out.delta_iterations = static_cast<std::size_t>(max_iter);
    out.bracket_low = lo;
    out.bracket_high = hi;
    out.dimension = 0.5 * (lo + hi);
  }
  inner(out.dimension);
  out.q_star = last_q;

  std::sort(seen.begin(), seen.end());
  for (std::size_t k = 1; k < seen.size(); ++k) {
    if (seen[k].first > seen[k - 1].first &&
        seen[k].second > seen[k - 1].second + 1e-9 * std::max(1.0, std::abs(seen[k - 1].second))) {
      throw Error("inf-pressure is not decreasing in delta");
    }
  }
  return out;
}

struct BowenResult {
  double value = 0.0;
  std::vector<std::pair<std::size_t, double>> per_level;
  bool converged = false;
};

/// Root s_N of P_N(-s log|T'|) = 0 in [0,1] on each level of the doubling
/// schedule. Each level searches above the previous level's lower bracket,
/// so the sequence is nondecreasing like the truncation pressures.
inline BowenResult bowen_dimension(const MarkovMapModel& model, std::size_t n_max, double tol) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  if (n_max < 2) throw PreconditionError("N_max must be at least 2");
  const Potential logT = builtin_log_derivative(model);
  const auto levels = truncation_schedule(n_max, model.alphabet_size());
  BowenResult out;
  double floor_s = 0.0;
  bool first = true;
  for (std::size_t N : levels) {
    TransferGraph g;
    try {
      g = recode(truncate(model, N), 1);
    } catch (const MixingError&) {
      continue;
    }
    const auto lt = state_values(g, logT);
    std::vector<double> w(lt.size());
    double hint = std::numeric_limits<double>::quiet_NaN();
    auto pressure = [&](double s) {
      for (std::size_t k = 0; k < lt.size(); ++k) w[k] = -s * lt[k];
      return perron_log_root(g, w, kPerronTolerance, &hint).log_root;
    };
    if (first) {
      if (pressure(0.0) <= 0.0) {
        throw DegenerateError("P_N(0) <= 0: no positive-entropy subsystem at N = " +
                              std::to_string(N));
      }
      first = false;
    }
    double lo = floor_s, hi = 1.0;
    if (pressure(hi) >= 0.0) {
      lo = hi;
    } else {
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (pressure(mid) > 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
    }
    floor_s = lo;
    out.per_level.emplace_back(N, 0.5 * (lo + hi));
  }
  if (out.per_level.empty()) throw MixingError("no truncation level is primitive");
  out.value = out.per_level.back().second;
  const auto alphabet = model.alphabet_size();
  if (alphabet && out.per_level.back().first == *alphabet) {
    out.converged = true;
  } else if (out.per_level.size() >= 2) {
    out.converged = out.value - out.per_level[out.per_level.size() - 2].second < tol;
  }
  return out;
}

/// alpha_t = -log(1-lambda) - lambda^t log(lambda) / (1 - lambda^t).
inline double sv_alpha_t(double lambda, double t) {
  const double lt = std::pow(lambda, t);
  return -std::log1p(-lambda) - lt * std::log(lambda) / (1.0 - lt);
}

/// The Lyapunov spectrum of the built-in family at alpha_t, t > t_c:
/// dimension = P(-t log|F'|) / alpha_t + t.
inline SpectrumPoint lyapunov_closed_form(double lambda, double t) {
  const double tc = sv_critical_t(lambda);
  if (!(t > tc)) throw DomainError("the closed-form spectrum needs t > " + std::to_string(tc));
  SpectrumPoint p;
  p.alpha = sv_alpha_t(lambda, t);
  p.dimension = closed_form_pressure_sv(lambda, t) / p.alpha + t;
  p.source = SpectrumSource::ClosedForm;
  return p;
}

/// The t > t_c with alpha_t = alpha, for alpha in (alpha_m, alpha_M).
inline double sv_t_for_alpha(double lambda, double alpha) {
  const double tc = sv_critical_t(lambda);
  const double am = -std::log1p(-lambda);
  const double aM = am - std::log(lambda);
  if (!(alpha > am && alpha < aM)) throw DomainError("alpha must lie strictly inside (alpha_m, alpha_M)");
  auto f = [&](double t) { return sv_alpha_t(lambda, t) - alpha; };
  double lo = tc, hi = tc + 1.0;
  while (f(hi) > 0.0) {
    lo = hi;
    hi = tc + 2.0 * (hi - tc);
    if (hi > 1e6) throw DomainError("alpha is too close to alpha_m");
  }
  boost::uintmax_t max_iter = 200;
  auto stop = [](double a, double b) { return std::abs(b - a) <= 1e-14 * std::max(1.0, std::abs(a)); };
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, stop, max_iter);
  return 0.5 * (a + b);
}

/// -log 4 / log(lambda (1 - lambda)).
inline double sv_hyperbolic_dimension(double lambda) {
  sv_critical_t(lambda);
  return -std::log(4.0) / (std::log(lambda) + std::log1p(-lambda));
}

struct DerivativeCheck {
  double finite_difference = 0.0;
  double minus_alpha_t = 0.0;
};

/// Central difference of t -> P(-t log|F'|) against -alpha_t.
inline DerivativeCheck derivative_identity_check(double lambda, double t, double h) {
  if (!(h > 0.0)) throw DomainError("step must be positive");
  if (!(t - h > sv_critical_t(lambda))) {
    throw DomainError("difference stencil leaves the closed-form range");
  }
  const double fd =
      (closed_form_pressure_sv(lambda, t + h) - closed_form_pressure_sv(lambda, t - h)) / (2.0 * h);
  return {fd, -sv_alpha_t(lambda, t)};
}

struct SpectrumOptions {
  std::size_t truncation = 512;
  double tol = 1e-6;
  std::size_t threads = 1;
};

/// The full Birkhoff spectrum of phi (psi = 1) for the built-in family. Off
/// the tail limit a the values come from the pressure characterisation; at a
/// the escaping set has full dimension and the value 1 is returned. Grid
/// points at the spectrum endpoints other than a are omitted.
inline SpectrumCurve full_birkhoff_spectrum_sv(double lambda, const Potential& phi,
                                               std::span<const double> grid,
                                               const SpectrumOptions& opts = {}) {
  const MarkovMapModel model = MarkovMapModel::stratmann_vogt(lambda);
  if (!phi.tail_limit()) throw DomainError("phi must declare its tail limit");
  if (phi.depth() != 1) throw DomainError("phi must be a depth-1 potential");
  const double a = *phi.tail_limit();
  const Potential one = constant_potential(1.0, 1.0);
  const AlphaBounds bounds = alpha_bounds(model, phi, one, opts.truncation);

  SpectrumCurve curve;
  curve.alpha_min = bounds.min;
  curve.alpha_max = bounds.max;

  std::vector<double> alphas(grid.begin(), grid.end());
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());
  const double margin = 1e-9 * std::max(1.0, std::abs(bounds.max));
  for (double alpha : alphas) {
    if (alpha < bounds.min - margin || alpha > bounds.max + margin) {
      throw DomainError("grid point " + std::to_string(alpha) + " lies outside [alpha_min, alpha_max]");
    }
  }
  std::vector<std::optional<SpectrumPoint>> slots(alphas.size());
  parallel_for(alphas.size(), opts.threads, [&](std::size_t k) {
    const double alpha = alphas[k];
    if (std::abs(alpha - a) <= 1e-12 * std::max(1.0, std::abs(a))) {
      SpectrumPoint p;
      p.alpha = alpha;
      p.dimension = 1.0;
      p.source = SpectrumSource::EscapeValue;
      p.truncation = opts.truncation;
      p.tolerance = opts.tol;
      slots[k] = p;
      return;
    }
    if (alpha <= bounds.min + margin || alpha >= bounds.max - margin) return;
    slots[k] = variational_dimension(model, phi, one, alpha, opts.truncation, opts.tol);
  });
  for (auto& s : slots) {
    if (s) curve.points.push_back(*s);
  }

  for (std::size_t k = 0; k < curve.points.size(); ++k) {
    if (curve.points[k].source != SpectrumSource::EscapeValue) continue;
    double left = -1.0;
    if (k > 0 && curve.points[k - 1].source == SpectrumSource::Variational) {
      left = std::max(left, curve.points[k - 1].dimension);
    }
    if (k + 1 < curve.points.size() && curve.points[k + 1].source == SpectrumSource::Variational) {
      left = std::max(left, curve.points[k + 1].dimension);
    }
    if (left >= 0.0 && std::abs(curve.points[k].dimension - left) > 10.0 * opts.tol) {
      curve.discontinuities.push_back({curve.points[k].alpha, left, curve.points[k].dimension});
    }
  }
  return curve;
}

}  // namespace thermo

#endif  // THERMO_SPECTRUM_HPP
