#ifndef THERMO_EMPIRICS_HPP
#define THERMO_EMPIRICS_HPP

// Orbit simulation and sampling cross-checks: itineraries, Birkhoff
// quotients, finite-horizon escape classification and box counts of
// windowed level sets. Sampled statistics are deterministic given the seed
// and do not depend on the worker count.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "thermo/errors.hpp"
#include "thermo/markov_model.hpp"
#include "thermo/parallel.hpp"
#include "thermo/potential.hpp"

namespace thermo {

/// splitmix64 run as a counter-based generator: draw k of stream s under
/// seed is a pure function of (seed, s, k).
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  std::uint64_t next() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform on (0, 1].
  double uniform() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

enum class OrbitClass { RecurrentWindow, Escaping, BoundaryAbort };

inline const char* to_string(OrbitClass c) {
  switch (c) {
    case OrbitClass::RecurrentWindow:
      return "RECURRENT_WINDOW";
    case OrbitClass::Escaping:
      return "ESCAPING";
    case OrbitClass::BoundaryAbort:
      return "BOUNDARY_ABORT";
  }
  return "?";
}

inline constexpr std::size_t kEscapeThreshold = 5;

struct OrbitRecord {
  double start = 0.0;
  std::vector<std::size_t> itinerary;
  /// points[k] is T^k(start); one more entry than the itinerary.
  std::vector<OrbitPoint> points;
  /// Per-step values phi(T^k x), psi(T^k x), log|T'(T^k x)|. For depth-1
  /// potentials; deeper potentials are evaluated from the itinerary.
  std::vector<double> phi_values;
  std::vector<double> psi_values;
  std::vector<double> log_t_values;
  OrbitClass classification = OrbitClass::RecurrentWindow;
  std::string abort_reason;

  [[nodiscard]] std::size_t steps() const { return itinerary.size(); }

  /// Sum of values[begin, end).
  static double sum(const std::vector<double>& values, std::size_t begin, std::size_t end) {
    if (begin > end || end > values.size()) throw DomainError("sum range exceeds the record");
    double s = 0.0;
    for (std::size_t k = begin; k < end; ++k) s += values[k];
    return s;
  }
};

namespace detail {

inline OrbitClass classify_itinerary(const std::vector<std::size_t>& it, std::size_t threshold) {
  const std::size_t n = it.size();
  const std::size_t quarter = std::max<std::size_t>(1, n / 4);
  if (n == 0) return OrbitClass::RecurrentWindow;
  const std::size_t first = *std::min_element(it.begin(), it.begin() + static_cast<std::ptrdiff_t>(quarter));
  const std::size_t last = *std::min_element(it.end() - static_cast<std::ptrdiff_t>(quarter), it.end());
  return (last > first && last >= threshold) ? OrbitClass::Escaping : OrbitClass::RecurrentWindow;
}

inline void require_depth_one(const Potential& p, const char* name) {
  if (p.depth() != 1) throw DomainError(std::string(name) + " must be a depth-1 potential here");
}

}  // namespace detail

/// Iterates the map up to n times from start. Endpoint hits stop the orbit
/// and are recorded as BOUNDARY_ABORT.
inline OrbitRecord simulate_orbit(const MarkovMapModel& model, OrbitPoint start, std::size_t n,
                                  const Potential& phi, const Potential& psi,
                                  std::size_t threshold = kEscapeThreshold) {
  if (n < 1) throw PreconditionError("orbit length must be at least 1");
  OrbitRecord rec;
  rec.start = model.to_value(start);
  if (!(rec.start > 0.0) || rec.start > 1.0) throw DomainError("start point must lie in (0, 1]");
  const bool depth_one = phi.depth() == 1 && psi.depth() == 1;
  rec.itinerary.reserve(n);
  rec.points.reserve(n + 1);
  OrbitPoint x = model.normalize(start);
  rec.points.push_back(x);
  for (std::size_t k = 0; k < n; ++k) {
    try {
      const auto [image, branch] = model.step(x);
      rec.itinerary.push_back(branch);
      rec.log_t_values.push_back(model.branch(branch).log_slope);
      if (depth_one) {
        rec.phi_values.push_back(phi.value(branch));
        rec.psi_values.push_back(psi.value(branch));
      }
      x = image;
      rec.points.push_back(x);
    } catch (const BoundaryError& e) {
      rec.classification = OrbitClass::BoundaryAbort;
      rec.abort_reason = e.what();
      return rec;
    }
  }
  rec.classification = detail::classify_itinerary(rec.itinerary, threshold);
  return rec;
}

inline OrbitRecord simulate_orbit(const MarkovMapModel& model, double x0, std::size_t n,
                                  const Potential& phi, const Potential& psi) {
  if (!(x0 > 0.0) || x0 > 1.0) throw DomainError("start point must lie in (0, 1]");
  return simulate_orbit(model, model.from_value(x0), n, phi, psi);
}

/// With phi = log|T'| and psi = 1.
inline OrbitRecord simulate_orbit(const MarkovMapModel& model, double x0, std::size_t n) {
  return simulate_orbit(model, x0, n, builtin_log_derivative(model), constant_potential(1.0, 1.0));
}

/// S_w phi / S_w psi over the last w positions of the orbit at which a full
/// depth-k word is known (the last k-1 positions are dropped for deeper
/// potentials).
inline double birkhoff_quotient(const OrbitRecord& rec, const Potential& phi, const Potential& psi,
                                std::size_t window) {
  const std::size_t depth = std::max(phi.depth(), psi.depth());
  if (window == 0) throw DomainError("window must be positive");
  if (rec.steps() + 1 < depth || window > rec.steps() + 1 - depth) {
    throw DomainError("window of " + std::to_string(window) + " exceeds the " +
                      std::to_string(rec.steps()) + "-step record");
  }
  const std::size_t end = rec.steps() + 1 - depth;
  double num = 0.0, den = 0.0;
  for (std::size_t k = end - window; k < end; ++k) {
    const std::span<const std::size_t> w(rec.itinerary.data() + k, depth);
    num += phi(w);
    den += psi(w);
  }
  if (!(den > 0.0)) throw DomainError("psi sum over the window is not positive");
  return num / den;
}

struct OrbitSummary {
  double start = 0.0;
  OrbitClass classification = OrbitClass::RecurrentWindow;
  std::size_t steps = 0;
  /// Average of log|T'| over the final quarter.
  double avg_log_t_tail = std::numeric_limits<double>::quiet_NaN();
  /// S_n phi / S_n psi over the whole orbit.
  double quotient = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

// Streaming version of simulate_orbit for depth-1 potentials: no per-step
// storage.
inline OrbitSummary run_orbit(const MarkovMapModel& model, double x0, std::size_t n,
                              const Potential& phi, const Potential& psi, std::size_t threshold) {
  OrbitSummary out;
  out.start = x0;
  const std::size_t quarter = std::max<std::size_t>(1, n / 4);
  std::size_t first_min = std::numeric_limits<std::size_t>::max();
  std::size_t last_min = first_min;
  double s_phi = 0.0, s_psi = 0.0, tail_log_t = 0.0;
  OrbitPoint x = model.from_value(x0);
  try {
    for (std::size_t k = 0; k < n; ++k) {
      const auto [image, branch] = model.step(x);
      if (k < quarter) first_min = std::min(first_min, branch);
      if (k >= n - quarter) {
        last_min = std::min(last_min, branch);
        tail_log_t += model.branch(branch).log_slope;
      }
      s_phi += phi.value(branch);
      s_psi += psi.value(branch);
      x = image;
      ++out.steps;
    }
  } catch (const BoundaryError&) {
    out.classification = OrbitClass::BoundaryAbort;
    return out;
  }
  out.classification = (last_min > first_min && last_min >= threshold) ? OrbitClass::Escaping
                                                                       : OrbitClass::RecurrentWindow;
  out.avg_log_t_tail = tail_log_t / static_cast<double>(quarter);
  out.quotient = s_phi / s_psi;
  return out;
}

inline void require_samples(std::size_t samples) {
  if (samples < 1000) throw PreconditionError("at least 1000 samples are required");
}

}  // namespace detail

/// Per-orbit summaries of `samples` uniform start points; start k is drawn
/// from stream k.
inline std::vector<OrbitSummary> sample_orbits(const MarkovMapModel& model, const Potential& phi,
                                               const Potential& psi, std::size_t samples,
                                               std::size_t n, std::uint64_t seed,
                                               std::size_t threads = 1,
                                               std::size_t threshold = kEscapeThreshold) {
  if (n < 1) throw PreconditionError("orbit length must be at least 1");
  detail::require_depth_one(phi, "phi");
  detail::require_depth_one(psi, "psi");
  std::vector<OrbitSummary> out(samples);
  parallel_for(samples, threads, [&](std::size_t k) {
    StreamRng rng(seed, k);
    out[k] = detail::run_orbit(model, rng.uniform(), n, phi, psi, threshold);
  });
  return out;
}

struct EscapeStatistics {
  std::size_t samples = 0;
  std::size_t horizon = 0;
  std::size_t escaping = 0;
  std::size_t recurrent = 0;
  std::size_t aborted = 0;
  double escaping_fraction = 0.0;
  /// Mean final-quarter average of log|T'| among escapers (NaN if none).
  double mean_tail_log_t = std::numeric_limits<double>::quiet_NaN();
};

inline EscapeStatistics summarize_escape(const std::vector<OrbitSummary>& orbits, std::size_t n) {
  EscapeStatistics s;
  s.samples = orbits.size();
  s.horizon = n;
  double tail = 0.0;
  for (const auto& o : orbits) {
    switch (o.classification) {
      case OrbitClass::Escaping:
        ++s.escaping;
        tail += o.avg_log_t_tail;
        break;
      case OrbitClass::RecurrentWindow:
        ++s.recurrent;
        break;
      case OrbitClass::BoundaryAbort:
        ++s.aborted;
        break;
    }
  }
  s.escaping_fraction = s.samples ? static_cast<double>(s.escaping) / static_cast<double>(s.samples) : 0.0;
  if (s.escaping) s.mean_tail_log_t = tail / static_cast<double>(s.escaping);
  return s;
}

inline EscapeStatistics escape_statistics(const MarkovMapModel& model, std::size_t samples,
                                          std::size_t n, std::uint64_t seed,
                                          std::size_t threads = 1) {
  detail::require_samples(samples);
  const Potential logT = builtin_log_derivative(model);
  const auto orbits =
      sample_orbits(model, logT, constant_potential(1.0, 1.0), samples, n, seed, threads);
  return summarize_escape(orbits, n);
}

/// Fraction of uniform starts with |S_n phi / S_n psi - alpha| < eps, for
/// each horizon n. The same starts are used at every horizon.
inline std::vector<double> level_set_retention(const MarkovMapModel& model, const Potential& phi,
                                               const Potential& psi, double alpha, double eps,
                                               std::size_t samples,
                                               const std::vector<std::size_t>& horizons,
                                               std::uint64_t seed, std::size_t threads = 1) {
  detail::require_samples(samples);
  if (!(eps > 0.0)) throw DomainError("window half-width must be positive");
  std::vector<double> out;
  for (std::size_t n : horizons) {
    const auto orbits = sample_orbits(model, phi, psi, samples, n, seed, threads);
    std::size_t kept = 0;
    for (const auto& o : orbits) {
      if (o.classification != OrbitClass::BoundaryAbort && std::abs(o.quotient - alpha) < eps) ++kept;
    }
    out.push_back(static_cast<double>(kept) / static_cast<double>(samples));
  }
  return out;
}

struct BoxCountEstimate {
  /// Least-squares slope of log(count) against log(1/size). A biased upper
  /// level estimate; never a certified dimension.
  double slope = 0.0;
  double band_low = 0.0;
  double band_high = 0.0;
  std::size_t retained = 0;
  std::vector<std::size_t> counts;
};

namespace detail {

inline double box_slope(const std::vector<double>& pts, const std::vector<double>& sizes,
                        std::vector<std::size_t>* counts) {
  std::vector<double> xs, ys;
  for (double h : sizes) {
    std::set<std::int64_t> boxes;
    for (double x : pts) boxes.insert(static_cast<std::int64_t>(std::floor(x / h)));
    if (counts) counts->push_back(boxes.size());
    xs.push_back(-std::log(h));
    ys.push_back(std::log(static_cast<double>(boxes.size())));
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  return sxy / sxx;
}

}  // namespace detail

inline constexpr std::size_t kMinRetained = 50;
inline constexpr std::size_t kBootstrapRounds = 200;

/// Samples uniform starts, keeps those whose horizon-n quotient lies within
/// eps_window of alpha and box-counts them at each grid size. The band is
/// the 2.5%..97.5% range of bootstrap slopes.
inline BoxCountEstimate box_count_level_set(const MarkovMapModel& model, const Potential& phi,
                                            const Potential& psi, double alpha, double eps_window,
                                            std::size_t samples, std::size_t n,
                                            const std::vector<double>& grid_levels,
                                            std::uint64_t seed, std::size_t threads = 1) {
  detail::require_samples(samples);
  if (!(eps_window > 0.0)) throw DomainError("window half-width must be positive");
  if (grid_levels.size() < 2) throw DomainError("at least two box sizes are needed");
  for (std::size_t k = 0; k < grid_levels.size(); ++k) {
    if (!(grid_levels[k] > 0.0) || (k > 0 && !(grid_levels[k] < grid_levels[k - 1]))) {
      throw DomainError("box sizes must be positive and strictly decreasing");
    }
  }
  const auto orbits = sample_orbits(model, phi, psi, samples, n, seed, threads);
  std::vector<double> pts;
  for (const auto& o : orbits) {
    if (o.classification != OrbitClass::BoundaryAbort && std::abs(o.quotient - alpha) < eps_window) {
      pts.push_back(o.start);
    }
  }
  if (pts.size() < kMinRetained) {
    throw InsufficientSampleError("only " + std::to_string(pts.size()) +
                                  " sampled points fell in the level-set window");
  }
  BoxCountEstimate out;
  out.retained = pts.size();
  out.slope = detail::box_slope(pts, grid_levels, &out.counts);

  // Bootstrap streams are numbered after the sampling streams.
  std::vector<double> slopes(kBootstrapRounds);
  parallel_for(kBootstrapRounds, threads, [&](std::size_t b) {
    StreamRng rng(seed, samples + b);
    std::vector<double> resample(pts.size());
    for (auto& x : resample) x = pts[rng.below(pts.size())];
    slopes[b] = detail::box_slope(resample, grid_levels, nullptr);
  });
  std::sort(slopes.begin(), slopes.end());
  out.band_low = slopes[kBootstrapRounds * 25 / 1000];
  out.band_high = slopes[kBootstrapRounds * 975 / 1000 - 1];
  return out;
}

}  // namespace thermo

#endif  // THERMO_EMPIRICS_HPP
