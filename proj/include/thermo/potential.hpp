#ifndef THERMO_POTENTIAL_HPP
#define THERMO_POTENTIAL_HPP

// Locally constant potentials: a depth-k potential is a function of the first
// k symbols of the coding.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "thermo/errors.hpp"
#include "thermo/markov_model.hpp"

namespace thermo {

using Word = std::vector<std::size_t>;

enum class PotentialKind { LogDerivative, Table, Combined, Custom };

class Potential {
 public:
  using Evaluator = std::function<double(std::span<const std::size_t>)>;

  Potential(std::size_t depth, Evaluator eval, PotentialKind kind = PotentialKind::Custom,
            std::optional<double> tail_limit = std::nullopt,
            std::optional<double> positivity_floor = std::nullopt,
            std::string model_signature = {})
      : depth_(depth),
        eval_(std::move(eval)),
        kind_(kind),
        tail_limit_(tail_limit),
        positivity_floor_(positivity_floor),
        model_signature_(std::move(model_signature)) {
    if (depth_ == 0) throw DomainError("potential depth must be positive");
    if (positivity_floor_ && !(*positivity_floor_ > 0.0)) {
      throw DomainError("positivity floor must be strictly positive");
    }
  }

  /// Value on a word; only the first depth() symbols are read.
  [[nodiscard]] double operator()(std::span<const std::size_t> word) const {
    if (word.size() < depth_) {
      throw DomainError("word of length " + std::to_string(word.size()) +
                        " is shorter than the potential depth " + std::to_string(depth_));
    }
    return eval_(word.first(depth_));
  }

  [[nodiscard]] double value(std::size_t symbol) const {
    if (depth_ != 1) throw DomainError("value(symbol) needs a depth-1 potential");
    const std::size_t w[1] = {symbol};
    return eval_(std::span<const std::size_t>(w, 1));
  }

  [[nodiscard]] std::size_t depth() const { return depth_; }
  [[nodiscard]] PotentialKind kind() const { return kind_; }
  [[nodiscard]] std::optional<double> tail_limit() const { return tail_limit_; }
  [[nodiscard]] std::optional<double> positivity_floor() const { return positivity_floor_; }
  /// Signature of the map the values were derived from; empty when the
  /// potential is defined symbolically and fits any model.
  [[nodiscard]] const std::string& model_signature() const { return model_signature_; }

  /// Set when the potential is a known constant (tables without overrides).
  [[nodiscard]] std::optional<double> constant() const { return constant_; }

  Potential with_constant(double c) const {
    Potential p = *this;
    p.constant_ = c;
    return p;
  }

 private:
  std::size_t depth_;
  Evaluator eval_;
  PotentialKind kind_;
  std::optional<double> tail_limit_;
  std::optional<double> positivity_floor_;
  std::string model_signature_;
  std::optional<double> constant_;
};

/// log|T'| as a depth-1 potential. Its floor is log of the expansion constant.
inline Potential builtin_log_derivative(const MarkovMapModel& model) {
  std::optional<double> tail;
  if (auto lam = model.sv_lambda()) {
    const double head = -std::log1p(-*lam);
    const double rest = -std::log(*lam) - std::log1p(-*lam);
    tail = rest;
    return Potential(
        1, [head, rest](std::span<const std::size_t> w) { return w[0] == 1 ? head : rest; },
        PotentialKind::LogDerivative, tail, std::log(model.expansion_floor()),
        model.signature());
  }
  if (model.tail()) tail = model.branch(model.tail()->from_index).log_slope;
  return Potential(
      1, [model](std::span<const std::size_t> w) { return model.branch(w[0]).log_slope; },
      PotentialKind::LogDerivative, tail, std::log(model.expansion_floor()), model.signature());
}

/// Potential equal to fallback everywhere except on listed words.
/// All override keys must have length depth.
inline Potential table_potential(std::size_t depth, double fallback,
                                 std::map<Word, double> overrides,
                                 std::optional<double> positivity_floor = std::nullopt) {
  for (const auto& [word, v] : overrides) {
    if (word.size() != depth) throw DomainError("override word length differs from the depth");
    for (std::size_t s : word) {
      if (s == 0) throw DomainError("symbols in override words start at 1");
    }
  }
  if (positivity_floor) {
    if (fallback < *positivity_floor) {
      throw DomainError("default value lies below the positivity floor");
    }
    for (const auto& [word, v] : overrides) {
      if (v < *positivity_floor) throw DomainError("override value lies below the positivity floor");
    }
  }
  const bool is_constant = overrides.empty();
  Potential p(
      depth,
      [fallback, table = std::move(overrides)](std::span<const std::size_t> w) {
        if (table.empty()) return fallback;
        auto it = table.find(Word(w.begin(), w.end()));
        return it == table.end() ? fallback : it->second;
      },
      PotentialKind::Table, fallback, positivity_floor);
  return is_constant ? p.with_constant(fallback) : p;
}

/// Depth-1 potential equal to a off finitely many overridden symbols; its
/// tail limit is a.
inline Potential builtin_tail_potential(double a, const std::map<std::size_t, double>& overrides = {},
                                        std::optional<double> positivity_floor = std::nullopt) {
  std::map<Word, double> table;
  for (const auto& [s, v] : overrides) table.emplace(Word{s}, v);
  return table_potential(1, a, std::move(table), positivity_floor);
}

inline Potential constant_potential(double c, std::optional<double> positivity_floor = std::nullopt) {
  return builtin_tail_potential(c, {}, positivity_floor);
}

/// q * (phi - alpha * psi) - delta * logT, pointwise on words.
inline Potential combine(double q, const Potential& phi, double alpha, const Potential& psi,
                         double delta, const Potential& logT) {
  std::string sig;
  for (const Potential* p : {&phi, &psi, &logT}) {
    if (p->model_signature().empty()) continue;
    if (sig.empty()) {
      sig = p->model_signature();
    } else if (sig != p->model_signature()) {
      throw CompositionError("potentials are bound to different maps");
    }
  }
  const std::size_t depth = std::max({phi.depth(), psi.depth(), logT.depth()});
  std::optional<double> tail;
  if (phi.tail_limit() && psi.tail_limit() && logT.tail_limit()) {
    tail = q * (*phi.tail_limit() - alpha * *psi.tail_limit()) - delta * *logT.tail_limit();
  }
  return Potential(
      depth,
      [=](std::span<const std::size_t> w) {
        return q * (phi(w) - alpha * psi(w)) - delta * logT(w);
      },
      PotentialKind::Combined, tail, std::nullopt, sig);
}

struct VariationBound {
  double value = 0.0;
  /// True when only finitely many symbols of an infinite alphabet were seen.
  bool range_limited = false;
};

/// Upper bound for var_m: the largest oscillation of p over words sharing
/// their first m symbols. Zero for m >= depth since the potential is
/// constant on depth-cylinders; m = 0 gives sup - inf over all words.
/// Words range over {1..alphabet} (or {1..materialize} for an infinite
/// alphabet, flagged as range-limited).
inline VariationBound variation_bound(const Potential& p, std::size_t m,
                                      std::optional<std::size_t> alphabet = std::nullopt,
                                      std::size_t materialize = 64) {
  if (m >= p.depth()) return {0.0, false};
  std::size_t symbols = alphabet ? *alphabet : materialize;
  // Keep the enumeration around 2e5 words.
  while (symbols > 2 && std::pow(static_cast<double>(symbols), static_cast<double>(p.depth())) > 2e5) {
    --symbols;
  }
  const bool limited = !alphabet || symbols < *alphabet;

  std::map<Word, std::pair<double, double>> range;
  Word w(p.depth(), 1);
  while (true) {
    const double v = p(w);
    Word prefix(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(m));
    auto [it, fresh] = range.try_emplace(prefix, v, v);
    if (!fresh) {
      it->second.first = std::min(it->second.first, v);
      it->second.second = std::max(it->second.second, v);
    }
    std::size_t k = p.depth();
    while (k > 0 && w[k - 1] == symbols) {
      w[k - 1] = 1;
      --k;
    }
    if (k == 0) break;
    ++w[k - 1];
  }
  double out = 0.0;
  for (const auto& [prefix, mm] : range) out = std::max(out, mm.second - mm.first);
  return {out, limited};
}

}  // namespace thermo

#endif  // THERMO_POTENTIAL_HPP
