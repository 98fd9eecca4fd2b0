#ifndef THERMO_PRESSURE_HPP
#define THERMO_PRESSURE_HPP

// Pressure of locally constant potentials: log Perron roots of finite
// truncations, periodic-orbit sums, the monotone truncation scheme for
// countable alphabets, and the closed form for the built-in family.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "thermo/errors.hpp"
#include "thermo/markov_model.hpp"
#include "thermo/parallel.hpp"
#include "thermo/potential.hpp"

namespace thermo {

/// Relative tolerance on the Perron root used by the truncation scheme.
inline constexpr double kPerronTolerance = 1e-12;

/// A truncated subsystem recoded to its higher-block presentation: states are
/// admissible words of length depth, state u -> v iff v continues u by one
/// symbol. For depth 1 the states are the symbols themselves.
struct TransferGraph {
  std::size_t depth = 1;
  std::vector<Word> words;
  std::vector<std::vector<ColumnRun>> rows;

  [[nodiscard]] std::size_t size() const { return words.size(); }
};

inline TransferGraph recode(const TruncatedSubsystem& sub, std::size_t depth) {
  TransferGraph g;
  g.depth = std::max<std::size_t>(1, depth);
  const std::size_t n = sub.size();
  if (g.depth == 1) {
    g.words.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) g.words.push_back({i});
    g.rows = sub.rows();
    return g;
  }
  const auto dense = sub.dense();
  // Lexicographic enumeration of admissible words.
  std::vector<Word> frontier;
  for (std::size_t i = 1; i <= n; ++i) frontier.push_back({i});
  for (std::size_t len = 1; len < g.depth; ++len) {
    std::vector<Word> next;
    for (const auto& w : frontier) {
      for (std::size_t j = 1; j <= n; ++j) {
        if (!dense[w.back() - 1][j - 1]) continue;
        Word x = w;
        x.push_back(j);
        next.push_back(std::move(x));
      }
    }
    frontier = std::move(next);
  }
  g.words = std::move(frontier);
  // Words sharing a (depth-1)-prefix form one contiguous block.
  std::map<Word, ColumnRun> blocks;
  for (std::size_t s = 0; s < g.words.size(); ++s) {
    Word prefix(g.words[s].begin(), g.words[s].end() - 1);
    auto [it, fresh] = blocks.try_emplace(prefix, ColumnRun{s, s + 1});
    if (!fresh) it->second.end = s + 1;
  }
  g.rows.resize(g.words.size());
  for (std::size_t s = 0; s < g.words.size(); ++s) {
    Word suffix(g.words[s].begin() + 1, g.words[s].end());
    if (auto it = blocks.find(suffix); it != blocks.end()) g.rows[s].push_back(it->second);
  }
  return g;
}

/// Potential values on the states of a transfer graph.
inline std::vector<double> state_values(const TransferGraph& g, const Potential& p) {
  if (p.depth() > g.depth) throw DomainError("potential is deeper than the recoded graph");
  std::vector<double> out(g.size());
  for (std::size_t s = 0; s < g.size(); ++s) out[s] = p(g.words[s]);
  return out;
}

struct PerronRoot {
  double log_root = 0.0;
  /// Collatz-Wielandt bracket on the root, in log scale.
  double log_lower = 0.0;
  double log_upper = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

namespace detail {

// Largest i - j over the nonzero entries (i, j) of the graph's matrix.
inline std::size_t lower_bandwidth(const TransferGraph& g) {
  std::size_t b = 0;
  for (std::size_t s = 0; s < g.size(); ++s) {
    for (const auto& r : g.rows[s]) {
      if (r.begin < s) b = std::max(b, s - r.begin);
    }
  }
  return b;
}

struct PivotTest {
  bool above_root = false;     // every pivot positive: shift > Perron root
  bool last_defined = false;   // pivots 1..n-1 positive
  double last_pivot = 0.0;
};

// Gaussian elimination (no pivoting, restricted to the lower band) of
// shift I - A. For an irreducible nonnegative A this Z-matrix is a
// nonsingular M-matrix iff shift exceeds the Perron root iff all pivots are
// positive. Elimination of M-matrices is componentwise stable, and the
// Perron root is well conditioned under componentwise relative
// perturbations, so the sign test stays reliable to a few ulps even when the
// Perron vector spans hundreds of orders of magnitude.
inline PivotTest shifted_pivots(const TransferGraph& g, std::span<const double> e, double shift,
                                std::size_t band, std::vector<double>& m) {
  const std::size_t n = g.size();
  m.assign(n * n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    double* row = m.data() + s * n;
    for (const auto& r : g.rows[s]) {
      for (std::size_t t = r.begin; t < r.end; ++t) row[t] = -e[s];
    }
    row[s] += shift;
  }
  PivotTest out;
  for (std::size_t k = 0; k < n; ++k) {
    const double* pivot_row = m.data() + k * n;
    const double pivot = pivot_row[k];
    if (k + 1 == n) {
      out.last_defined = true;
      out.last_pivot = pivot;
      out.above_root = pivot > 0.0;
      return out;
    }
    if (!(pivot > 0.0)) return out;
    const std::size_t last = std::min(n - 1, k + band);
    for (std::size_t i = k + 1; i <= last; ++i) {
      double* row = m.data() + i * n;
      if (row[k] == 0.0) continue;
      const double f = row[k] / pivot;
      row[k] = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) row[j] -= f * pivot_row[j];
    }
  }
  return out;
}

}  // namespace detail

/// log of the spectral radius of A(u,v) = [u -> v] exp(w_u) for an
/// irreducible graph. The root is bracketed by the row-sum bounds and the
/// bracket is closed with the M-matrix pivot test above, using regula falsi
/// (Illinois variant) on the last pivot where it is defined and bisection
/// otherwise, until the bracket is narrower than tol relative to the root.
/// `hint`, when given, is a guess of the log root used to seed a narrow
/// bracket; it receives the result.
inline PerronRoot perron_log_root(const TransferGraph& g, std::span<const double> log_weights,
                                  double tol, double* hint = nullptr,
                                  std::size_t max_iterations = 400) {
  const std::size_t n = g.size();
  if (log_weights.size() != n) throw DomainError("weight vector does not match the graph");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  double top = -std::numeric_limits<double>::infinity();
  for (double w : log_weights) top = std::max(top, w);
  PerronRoot out;
  if (!std::isfinite(top)) {
    out.log_root = out.log_lower = out.log_upper = top;
    return out;
  }

  std::vector<double> e(n);
  for (std::size_t s = 0; s < n; ++s) e[s] = std::exp(log_weights[s] - top);
  const std::size_t band = detail::lower_bandwidth(g);
  std::vector<double> m;

  // Collatz-Wielandt with the all-ones vector: row sums bound the root.
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    double count = 0.0;
    for (const auto& r : g.rows[s]) count += static_cast<double>(r.end - r.begin);
    lo = std::min(lo, e[s] * count);
    hi = std::max(hi, e[s] * count);
  }
  detail::PivotTest at_lo, at_hi;
  bool lo_known = false, hi_known = false;
  if (hint && std::isfinite(*hint)) {
    const double guess = std::exp(*hint - top);
    for (double width = 1e-6; width < 1.0; width *= 100.0) {
      const double a = std::max(lo, guess * (1.0 - width));
      const double b = std::min(hi, guess * (1.0 + width));
      auto ta = detail::shifted_pivots(g, e, a, band, m);
      auto tb = detail::shifted_pivots(g, e, b, band, m);
      out.iterations += 2;
      if (!ta.above_root && tb.above_root) {
        lo = a;
        hi = b;
        at_lo = ta;
        at_hi = tb;
        lo_known = hi_known = true;
        break;
      }
      if (tb.above_root) {
        hi = b;
        at_hi = tb;
        hi_known = true;
      }
      if (!ta.above_root) {
        lo = a;
        at_lo = ta;
        lo_known = true;
      }
    }
  }
  if (hi <= lo) {
    out.converged = true;
  } else {
    // The upper row-sum bound is attained only for constant row sums, in
    // which case the root equals it; nudge so the pivot test is strict.
    if (!hi_known) {
      hi *= 1.0 + 4 * std::numeric_limits<double>::epsilon();
      at_hi = detail::shifted_pivots(g, e, hi, band, m);
      ++out.iterations;
      if (!at_hi.above_root) {
        lo = hi;
        out.converged = true;
      }
    }
    if (!lo_known && !out.converged) {
      at_lo = detail::shifted_pivots(g, e, lo, band, m);
      ++out.iterations;
      if (at_lo.above_root) {
        hi = lo;
        out.converged = true;
      }
    }
  }
  int stale_side = 0;  // Illinois bookkeeping: which end kept its value
  double f_lo = at_lo.last_pivot, f_hi = at_hi.last_pivot;
  while (!out.converged && out.iterations < max_iterations) {
    if (hi - lo <= tol * hi) {
      out.converged = true;
      break;
    }
    double mid = 0.5 * (lo + hi);
    if (at_lo.last_defined && at_hi.last_defined && f_lo < 0.0 && f_hi > 0.0) {
      const double cand = lo - f_lo * (hi - lo) / (f_hi - f_lo);
      if (cand > lo && cand < hi) mid = cand;
    }
    // Keep strictly inside and never closer than tol/4 to an end, so the
    // bracket shrinks even when the secant step stalls.
    const double guard = 0.25 * tol * hi;
    mid = std::clamp(mid, lo + guard, hi - guard);
    const auto t = detail::shifted_pivots(g, e, mid, band, m);
    ++out.iterations;
    if (t.above_root) {
      hi = mid;
      at_hi = t;
      f_hi = t.last_pivot;
      if (stale_side == -1) f_lo *= 0.5;
      stale_side = -1;
    } else {
      lo = mid;
      at_lo = t;
      f_lo = t.last_pivot;
      if (stale_side == 1) f_hi *= 0.5;
      stale_side = 1;
    }
  }
  out.log_lower = std::log(lo) + top;
  out.log_upper = std::log(hi) + top;
  out.log_root = std::log(0.5 * (lo + hi)) + top;
  if (hint) *hint = out.log_root;
  return out;
}

/// Pressure of p on a primitive finite subsystem: log of the Perron root of
/// the weighted transition matrix (after recoding to the potential's depth).
inline double perron_pressure(const TruncatedSubsystem& sub, const Potential& p, double tol) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  if (!is_primitive(sub)) throw MixingError("subsystem is not primitive");
  const TransferGraph g = recode(sub, std::max(sub.depth(), p.depth()));
  const auto w = state_values(g, p);
  const PerronRoot r = perron_log_root(g, w, tol);
  if (!r.converged) throw DegenerateError("Perron bracket did not converge");
  return r.log_root;
}

/// Hard caps for periodic-orbit sums.
inline constexpr std::size_t kOrbitSumMaxAlphabet = 12;
inline constexpr std::size_t kOrbitSumMaxPeriod = 30;

/// (1/n) log Z_n, where Z_n sums exp(S_n p) over the period-n points of the
/// subsystem whose coding starts with base_symbol. Orbits are summed by
/// extending admissible prefixes one symbol at a time, merging prefixes that
/// end in the same (depth)-window, so the count is exact without listing the
/// exponentially many words one by one.
inline double orbit_sum_pressure(const TruncatedSubsystem& sub, const Potential& p,
                                 std::size_t n, std::size_t base_symbol) {
  if (n == 0) throw PreconditionError("period must be at least 1");
  if (base_symbol == 0 || base_symbol > sub.size()) {
    throw PreconditionError("base symbol outside the alphabet");
  }
  if (sub.size() > kOrbitSumMaxAlphabet || n > kOrbitSumMaxPeriod) {
    throw WorkLimitError("orbit sums are capped at alphabet " +
                         std::to_string(kOrbitSumMaxAlphabet) + " and period " +
                         std::to_string(kOrbitSumMaxPeriod));
  }
  const TransferGraph g = recode(sub, std::max(sub.depth(), p.depth()));
  if (std::pow(static_cast<double>(g.size()), 2.0) > 1e7) {
    throw WorkLimitError("recoded state space too large for orbit sums");
  }
  const auto w = state_values(g, p);

  // Closed walks of length n in the higher-block graph starting at a state
  // whose word begins with the base symbol are exactly those period-n points.
  const double neg_inf = -std::numeric_limits<double>::infinity();
  double log_z = neg_inf;
  std::vector<double> x(g.size()), y(g.size());
  for (std::size_t start = 0; start < g.size(); ++start) {
    if (g.words[start].front() != base_symbol) continue;
    std::fill(x.begin(), x.end(), 0.0);
    x[start] = 1.0;
    double log_scale = 0.0;
    bool alive = true;
    for (std::size_t k = 0; k < n && alive; ++k) {
      std::fill(y.begin(), y.end(), 0.0);
      double peak = 0.0;
      for (std::size_t s = 0; s < g.size(); ++s) {
        if (x[s] == 0.0) continue;
        const double m = x[s] * std::exp(w[s]);
        for (const auto& r : g.rows[s]) {
          for (std::size_t t = r.begin; t < r.end; ++t) y[t] += m;
        }
      }
      for (double v : y) peak = std::max(peak, v);
      if (peak == 0.0) {
        alive = false;
        break;
      }
      for (auto& v : y) v /= peak;
      log_scale += std::log(peak);
      std::swap(x, y);
    }
    if (!alive || x[start] == 0.0) continue;
    const double term = log_scale + std::log(x[start]);
    log_z = log_z == neg_inf ? term
                             : std::max(log_z, term) + std::log1p(std::exp(-std::abs(log_z - term)));
  }
  if (log_z == neg_inf) {
    throw EmptySumError("no period-" + std::to_string(n) + " orbit through symbol " +
                        std::to_string(base_symbol));
  }
  return log_z / static_cast<double>(n);
}

enum class PressureMethod { Perron, OrbitSum, ClosedForm };

inline const char* to_string(PressureMethod m) {
  switch (m) {
    case PressureMethod::Perron:
      return "PERRON";
    case PressureMethod::OrbitSum:
      return "ORBIT_SUM";
    case PressureMethod::ClosedForm:
      return "CLOSED_FORM";
  }
  return "?";
}

struct PressureResult {
  double value = 0.0;
  std::size_t truncation_used = 0;
  std::vector<std::pair<std::size_t, double>> per_level;
  bool converged = false;
  PressureMethod method = PressureMethod::Perron;
};

/// Truncation levels 2, 4, 8, ... up to n_max (n_max itself is appended when
/// it is not a power of two), clipped to a finite alphabet.
inline std::vector<std::size_t> truncation_schedule(std::size_t n_max,
                                                    std::optional<std::size_t> alphabet) {
  if (alphabet) n_max = std::min(n_max, *alphabet);
  std::vector<std::size_t> levels;
  for (std::size_t N = 2; N <= n_max; N *= 2) levels.push_back(N);
  if (levels.empty() || levels.back() != n_max) levels.push_back(n_max);
  return levels;
}

/// Gurevich pressure by the increasing-subsystem scheme: P_N on the
/// N-symbol truncations for the doubling schedule. P_N increases to the
/// pressure; when the sequence has not settled the last value is a lower
/// bound and converged is false.
inline PressureResult gurevich_pressure(const MarkovMapModel& model, const Potential& p,
                                        double tol, std::size_t n_max, std::size_t threads = 1) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  if (n_max < 2) throw PreconditionError("N_max must be at least 2");
  if (!p.model_signature().empty() && p.model_signature() != model.signature()) {
    throw CompositionError("potential is bound to a different map");
  }
  const auto levels = truncation_schedule(n_max, model.alphabet_size());
  std::vector<std::optional<double>> values(levels.size());
  parallel_for(levels.size(), threads, [&](std::size_t k) {
    try {
      const TruncatedSubsystem sub = truncate(model, levels[k]);
      const TransferGraph g = recode(sub, p.depth());
      const auto w = state_values(g, p);
      values[k] = perron_log_root(g, w, kPerronTolerance).log_root;
    } catch (const MixingError&) {
      values[k].reset();
    }
  });

  PressureResult out;
  out.method = PressureMethod::Perron;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (values[k]) out.per_level.emplace_back(levels[k], *values[k]);
  }
  if (out.per_level.empty()) throw MixingError("no truncation level is primitive");
  for (std::size_t k = 1; k < out.per_level.size(); ++k) {
    const double prev = out.per_level[k - 1].second;
    const double cur = out.per_level[k].second;
    if (cur < prev - 1e-9 * std::max(1.0, std::abs(prev))) {
      throw Error("truncation pressures decreased between levels " +
                  std::to_string(out.per_level[k - 1].first) + " and " +
                  std::to_string(out.per_level[k].first));
    }
  }
  out.value = out.per_level.back().second;
  out.truncation_used = out.per_level.back().first;
  const auto alphabet = model.alphabet_size();
  if (alphabet && out.truncation_used == *alphabet) {
    out.converged = true;
  } else if (out.per_level.size() >= 2) {
    out.converged = std::abs(out.value - out.per_level[out.per_level.size() - 2].second) < tol;
  }
  return out;
}

/// -log 2 / log lambda: lower end of the range where the closed form holds.
inline double sv_critical_t(double lambda) {
  if (!(lambda > 0.5 && lambda < 1.0)) throw DomainError("lambda must lie in (1/2, 1)");
  return -std::log(2.0) / std::log(lambda);
}

/// P(-t log|F'|) = t log(1-lambda) - log(1-lambda^t), valid for t >= t_c.
inline double closed_form_pressure_sv(double lambda, double t) {
  const double tc = sv_critical_t(lambda);
  if (t < tc) {
    throw DomainError("closed-form pressure needs t >= " + std::to_string(tc));
  }
  return t * std::log1p(-lambda) - std::log1p(-std::pow(lambda, t));
}

}  // namespace thermo

#endif  // THERMO_PRESSURE_HPP
