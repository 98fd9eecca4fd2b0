#ifndef THERMO_IO_HPP
#define THERMO_IO_HPP

// JSON configs for maps and potentials, config validation, and the CSV/JSON
// result formats.
//
// Map config, either the built-in family
//   {"family": "sv", "lambda": 0.9}
// or a custom model
//   {"branches": [{"index": 1, "left": 0.5, "right": 1, "slope": 2, "offset": 0}, ...],
//    "tail": {"from_index": 3, "ratio": 0.5},
//    "transitions": "image" | "full" | [[1,0],[1,1]]}
// Potential config
//   {"depth": 1, "default": 0.5, "overrides": {"1": 2.0, "2,1": 3.0}, "positivity_floor": 0.1}

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "thermo/empirics.hpp"
#include "thermo/errors.hpp"
#include "thermo/markov_model.hpp"
#include "thermo/potential.hpp"
#include "thermo/pressure.hpp"
#include "thermo/spectrum.hpp"

namespace thermo {

using json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::size_t line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t k = 0; k < std::min(byte, text.size()); ++k) {
    if (text[k] == '\n') ++line;
  }
  return line;
}

inline json parse_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ":" + std::to_string(line_of(text, e.byte)) + ": malformed JSON (" +
                     e.what() + ")");
  }
}

// Field accessors that name the offending field.
inline const json& field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + "." + key + ": missing field");
  return *it;
}

inline double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where + ": expected a number, got " + std::string(v.type_name()));
  return v.get<double>();
}

inline std::size_t count(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ParseError(where + ": expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

inline void reject_unknown(const json& obj, std::initializer_list<const char*> known,
                           const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw ParseError(where + "." + it.key() + ": unknown field");
  }
}

struct ParsedMap {
  std::optional<double> sv_lambda;
  std::vector<BranchSpec> head;
  std::optional<TailRule> tail;
  TransitionRule rule = TransitionRule::Image;
  std::vector<std::vector<bool>> matrix;
};

inline ParsedMap parse_map_fields(const json& j, const std::string& where) {
  ParsedMap out;
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  if (j.contains("family")) {
    reject_unknown(j, {"family", "lambda"}, where);
    const json& fam = j["family"];
    if (!fam.is_string() || fam.get<std::string>() != "sv") {
      throw ParseError(where + ".family: only \"sv\" is a built-in family");
    }
    out.sv_lambda = number(field(j, "lambda", where), where + ".lambda");
    return out;
  }
  reject_unknown(j, {"branches", "tail", "transitions"}, where);
  const json& branches = field(j, "branches", where);
  if (!branches.is_array() || branches.empty()) {
    throw ParseError(where + ".branches: expected a non-empty array");
  }
  for (std::size_t k = 0; k < branches.size(); ++k) {
    const std::string w = where + ".branches[" + std::to_string(k) + "]";
    const json& b = branches[k];
    if (!b.is_object()) throw ParseError(w + ": expected an object");
    reject_unknown(b, {"index", "left", "right", "slope", "offset"}, w);
    BranchSpec spec;
    spec.index = count(field(b, "index", w), w + ".index");
    spec.interval.left = number(field(b, "left", w), w + ".left");
    spec.interval.right = number(field(b, "right", w), w + ".right");
    spec.slope_magnitude = number(field(b, "slope", w), w + ".slope");
    if (b.contains("offset")) spec.image_offset = number(b["offset"], w + ".offset");
    if (!(spec.interval.left < spec.interval.right)) throw ParseError(w + ": left must be below right");
    out.head.push_back(spec);
  }
  if (j.contains("tail")) {
    const json& t = j["tail"];
    const std::string w = where + ".tail";
    if (!t.is_object()) throw ParseError(w + ": expected an object");
    reject_unknown(t, {"from_index", "ratio"}, w);
    out.tail = TailRule{count(field(t, "from_index", w), w + ".from_index"),
                        number(field(t, "ratio", w), w + ".ratio")};
  }
  if (j.contains("transitions")) {
    const json& t = j["transitions"];
    const std::string w = where + ".transitions";
    if (t.is_string()) {
      const auto name = t.get<std::string>();
      if (name == "image") {
        out.rule = TransitionRule::Image;
      } else if (name == "full") {
        out.rule = TransitionRule::Full;
      } else {
        throw ParseError(w + ": unknown rule \"" + name + "\" (expected image, full or a matrix)");
      }
    } else if (t.is_array()) {
      out.rule = TransitionRule::Explicit;
      for (std::size_t r = 0; r < t.size(); ++r) {
        if (!t[r].is_array()) throw ParseError(w + "[" + std::to_string(r) + "]: expected an array");
        std::vector<bool> row;
        for (std::size_t c = 0; c < t[r].size(); ++c) {
          const json& e = t[r][c];
          const std::string we = w + "[" + std::to_string(r) + "][" + std::to_string(c) + "]";
          if (e.is_boolean()) {
            row.push_back(e.get<bool>());
          } else if (e.is_number_integer() && (e.get<int>() == 0 || e.get<int>() == 1)) {
            row.push_back(e.get<int>() == 1);
          } else {
            throw ParseError(we + ": expected 0 or 1");
          }
        }
        out.matrix.push_back(std::move(row));
      }
    } else {
      throw ParseError(w + ": expected a rule name or a 0/1 matrix");
    }
  }
  return out;
}

inline MarkovMapModel build_map(const ParsedMap& p, bool checked) {
  if (p.sv_lambda) return MarkovMapModel::stratmann_vogt(*p.sv_lambda);
  return checked ? MarkovMapModel::custom(p.head, p.tail, p.rule, p.matrix)
                 : MarkovMapModel::custom_unchecked(p.head, p.tail, p.rule, p.matrix);
}

struct ParsedPotential {
  std::size_t depth = 1;
  double fallback = 0.0;
  std::map<Word, double> overrides;
  std::optional<double> floor;
};

inline Word parse_word(const std::string& key, const std::string& where) {
  Word w;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t used = 0;
    long long v = -1;
    try {
      v = std::stoll(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != part.size() || v < 1) {
      throw ParseError(where + ": override key \"" + key + "\" is not a comma-separated list of symbols >= 1");
    }
    w.push_back(static_cast<std::size_t>(v));
  }
  if (w.empty()) throw ParseError(where + ": empty override key");
  return w;
}

inline ParsedPotential parse_potential_fields(const json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  reject_unknown(j, {"depth", "default", "overrides", "positivity_floor"}, where);
  ParsedPotential out;
  if (j.contains("depth")) out.depth = count(j["depth"], where + ".depth");
  if (out.depth == 0) throw ParseError(where + ".depth: must be at least 1");
  out.fallback = number(field(j, "default", where), where + ".default");
  if (j.contains("overrides")) {
    const json& o = j["overrides"];
    if (!o.is_object()) throw ParseError(where + ".overrides: expected an object");
    for (auto it = o.begin(); it != o.end(); ++it) {
      const std::string w = where + ".overrides[\"" + it.key() + "\"]";
      Word word = parse_word(it.key(), w);
      if (word.size() != out.depth) {
        throw ParseError(w + ": key has " + std::to_string(word.size()) + " symbols but depth is " +
                         std::to_string(out.depth));
      }
      out.overrides[word] = number(it.value(), w);
    }
  }
  if (j.contains("positivity_floor") && !j["positivity_floor"].is_null()) {
    out.floor = number(j["positivity_floor"], where + ".positivity_floor");
  }
  return out;
}

inline std::vector<std::string> potential_violations(const ParsedPotential& p) {
  std::vector<std::string> out;
  if (p.floor) {
    if (!(*p.floor > 0.0)) out.push_back("positivity_floor must be strictly positive");
    if (p.fallback < *p.floor) {
      out.push_back("default value " + std::to_string(p.fallback) + " lies below positivity_floor");
    }
    for (const auto& [w, v] : p.overrides) {
      std::string key;
      for (std::size_t s : w) key += (key.empty() ? "" : ",") + std::to_string(s);
      if (v < *p.floor) {
        out.push_back("override \"" + key + "\" = " + std::to_string(v) + " lies below positivity_floor");
      }
    }
  }
  return out;
}

}  // namespace detail

inline MarkovMapModel parse_map_config(const json& j, const std::string& origin = "map") {
  return detail::build_map(detail::parse_map_fields(j, origin), true);
}

inline MarkovMapModel load_map_config(const std::string& path) {
  return parse_map_config(detail::parse_text(detail::read_file(path), path), path);
}

inline Potential parse_potential_config(const json& j, const std::string& origin = "potential") {
  const auto p = detail::parse_potential_fields(j, origin);
  const auto bad = detail::potential_violations(p);
  if (!bad.empty()) throw DomainError(origin + ": " + bad.front());
  return table_potential(p.depth, p.fallback, p.overrides, p.floor);
}

inline Potential load_potential_config(const std::string& path) {
  return parse_potential_config(detail::parse_text(detail::read_file(path), path), path);
}

struct ValidationReport {
  std::string kind;  // "map", "potential" or "bundle"
  std::vector<std::string> violations;
  [[nodiscard]] bool ok() const { return violations.empty(); }
};

/// Schema and Markov-image checks on a config file; nothing is computed.
/// A file may hold a map, a potential, or {"map": ..., "potential": ...}.
/// Unreadable files throw; malformed JSON is reported as a violation.
inline ValidationReport validate_config_text(const std::string& text, const std::string& origin) {
  ValidationReport report;
  json j;
  try {
    j = detail::parse_text(text, origin);
  } catch (const ParseError& e) {
    report.kind = "unknown";
    report.violations.push_back(e.what());
    return report;
  }
  auto check_map = [&](const json& m, const std::string& where) {
    try {
      const auto parsed = detail::parse_map_fields(m, where);
      const MarkovMapModel model = detail::build_map(parsed, false);
      for (const auto& v : model.markov_violations()) report.violations.push_back(where + ": " + v);
    } catch (const Error& e) {
      report.violations.push_back(e.what());
    }
  };
  auto check_potential = [&](const json& p, const std::string& where) {
    try {
      const auto parsed = detail::parse_potential_fields(p, where);
      for (const auto& v : detail::potential_violations(parsed)) {
        report.violations.push_back(where + ": " + v);
      }
    } catch (const Error& e) {
      report.violations.push_back(e.what());
    }
  };
  if (j.is_object() && (j.contains("map") || j.contains("potential"))) {
    report.kind = "bundle";
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key() != "map" && it.key() != "potential") {
        report.violations.push_back(origin + "." + it.key() + ": unknown field");
      }
    }
    if (j.contains("map")) check_map(j["map"], origin + ".map");
    if (j.contains("potential")) check_potential(j["potential"], origin + ".potential");
  } else if (j.is_object() && (j.contains("branches") || j.contains("family"))) {
    report.kind = "map";
    check_map(j, origin);
  } else if (j.is_object() && j.contains("default")) {
    report.kind = "potential";
    check_potential(j, origin);
  } else {
    report.kind = "unknown";
    report.violations.push_back(origin + ": neither a map (branches/family) nor a potential (default)");
  }
  return report;
}

inline ValidationReport validate_config(const std::string& path) {
  return validate_config_text(detail::read_file(path), path);
}

// ---- output ----

/// Shortest round-trip text for a double.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::string text;
  for (int p = 6; p <= 17; ++p) {
    std::ostringstream t;
    t.imbue(std::locale::classic());
    t << std::setprecision(p) << v;
    text = t.str();
    if (std::stod(text) == v) break;
  }
  return text;
}

inline json to_json(const PressureResult& r) {
  json levels = json::array();
  for (const auto& [n, v] : r.per_level) levels.push_back(json::array({n, v}));
  return json{{"value", r.value},
              {"method", to_string(r.method)},
              {"per_level", levels},
              {"converged", r.converged},
              {"truncation_used", r.truncation_used}};
}

inline json to_json(const EscapeStatistics& s) {
  json out{{"samples", s.samples},
           {"horizon", s.horizon},
           {"escaping", s.escaping},
           {"recurrent_window", s.recurrent},
           {"boundary_abort", s.aborted},
           {"escaping_fraction", s.escaping_fraction}};
  if (std::isnan(s.mean_tail_log_t)) {
    out["mean_tail_log_t"] = nullptr;
  } else {
    out["mean_tail_log_t"] = s.mean_tail_log_t;
  }
  return out;
}

inline json to_json(const SpectrumPoint& p) {
  json out{{"alpha", p.alpha}, {"dimension", p.dimension}, {"source", to_string(p.source)}};
  out["q_star"] = p.q_star ? json(*p.q_star) : json(nullptr);
  out["delta_iterations"] = p.delta_iterations;
  if (p.source == SpectrumSource::Variational) {
    out["bracket"] = json::array({p.bracket_low, p.bracket_high});
    out["N"] = p.truncation;
    out["tol"] = p.tolerance;
    out["hypothesis_unverified"] = p.hypothesis_unverified;
  }
  return out;
}

inline json to_json(const SpectrumCurve& c) {
  json pts = json::array();
  for (const auto& p : c.points) pts.push_back(to_json(p));
  json jumps = json::array();
  for (const auto& d : c.discontinuities) {
    jumps.push_back(json{{"alpha", d.alpha}, {"left_limit", d.left_limit}, {"value", d.value}});
  }
  return json{{"alpha_min", c.alpha_min}, {"alpha_max", c.alpha_max}, {"points", pts},
              {"discontinuities", jumps}};
}

/// Header lines carrying the run's provenance, each prefixed with "# ".
inline void write_csv_preamble(std::ostream& os, const json& provenance) {
  os << "# " << provenance.dump() << "\n";
}

/// alpha,dimension,source,q_star,N,tol with discontinuities as "#" footer lines.
inline void write_spectrum_csv(std::ostream& os, const SpectrumCurve& c) {
  os << "alpha,dimension,source,q_star,N,tol\n";
  for (const auto& p : c.points) {
    os << fmt(p.alpha) << "," << fmt(p.dimension) << "," << to_string(p.source) << ","
       << (p.q_star ? fmt(*p.q_star) : "") << ","
       << (p.truncation ? std::to_string(p.truncation) : "") << ","
       << (p.tolerance > 0.0 ? fmt(p.tolerance) : "") << "\n";
  }
  for (const auto& d : c.discontinuities) {
    os << "# discontinuity alpha=" << fmt(d.alpha) << " left_limit=" << fmt(d.left_limit)
       << " value=" << fmt(d.value) << "\n";
  }
}

inline void write_orbit_csv(std::ostream& os, const std::vector<OrbitSummary>& orbits) {
  os << "start,classification,steps,avg_logT_tail,quotient\n";
  for (const auto& o : orbits) {
    os << fmt(o.start) << "," << to_string(o.classification) << "," << o.steps << ","
       << fmt(o.avg_log_t_tail) << "," << fmt(o.quotient) << "\n";
  }
}

inline void write_levels_csv(std::ostream& os, const PressureResult& r) {
  os << "N,P_N\n";
  for (const auto& [n, v] : r.per_level) os << n << "," << fmt(v) << "\n";
}

}  // namespace thermo

#endif  // THERMO_IO_HPP
