// thermo: command-line front end for the pressure, spectrum and orbit tools.
//
// Exit status: 0 success, 2 domain or input error, 3 non-convergence
// (results are still written), 64 usage error.

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "thermo.hpp"

using namespace thermo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitUsage = 64;

struct Common {
  std::string format;
  std::string out;
  std::size_t threads = default_threads();
  bool stamp = false;
};

void add_common(CLI::App* cmd, Common& c, const std::string& default_format) {
  c.format = default_format;
  cmd->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--out", c.out, "Output path (default: stdout)");
  cmd->add_option("--threads", c.threads, "Worker threads (default: THERMO_THREADS or 1)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_flag("--stamp", c.stamp, "Add a timestamp to the provenance header");
}

std::string now_utc() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

json provenance(const std::string& command, const Common& c, json config) {
  config["format"] = c.format;
  config["threads"] = c.threads;
  json p{{"tool", "thermo"}, {"version", kToolVersion}, {"command", command}, {"config", config}};
  if (c.stamp) p["timestamp"] = now_utc();
  return p;
}

// Writes to --out or stdout.
void emit(const Common& c, const std::function<void(std::ostream&)>& body) {
  if (c.out.empty()) {
    body(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw DomainError("cannot open output file " + c.out);
  body(f);
}

void emit_json(const Common& c, const json& prov, const json& result) {
  emit(c, [&](std::ostream& os) { os << json{{"provenance", prov}, {"result", result}}.dump(2) << "\n"; });
}

MarkovMapModel resolve_map(const std::string& spec) {
  if (spec.rfind("sv:", 0) == 0) {
    std::size_t used = 0;
    double lambda = 0.0;
    try {
      lambda = std::stod(spec.substr(3), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != spec.size() - 3) throw ParseError("--map: cannot read lambda in \"" + spec + "\"");
    return MarkovMapModel::stratmann_vogt(lambda);
  }
  return load_map_config(spec);
}

struct ResolvedPotential {
  Potential potential;
  std::optional<double> neg_t;  // set for neg-t-logT:t
};

double parse_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ParseError(what + ": cannot read a number from \"" + text + "\"");
  return v;
}

// Built-in names: log-derivative, neg-t-logT:t, constant:c, tail:a. Anything
// else is read as a potential config path.
ResolvedPotential resolve_potential(const std::string& spec, const MarkovMapModel& model) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (spec == "log-derivative") return {builtin_log_derivative(model), std::nullopt};
  if (name == "neg-t-logT" && colon != std::string::npos) {
    const double t = parse_number(arg, "--potential");
    const Potential logT = builtin_log_derivative(model);
    std::optional<double> tail;
    if (logT.tail_limit()) tail = -t * *logT.tail_limit();
    Potential p(
        1, [logT, t](std::span<const std::size_t> w) { return -t * logT(w); }, PotentialKind::Custom,
        tail, std::nullopt, model.signature());
    return {p, t};
  }
  if (name == "constant" && colon != std::string::npos) {
    const double c = parse_number(arg, "--potential");
    return {c > 0.0 ? constant_potential(c, c) : constant_potential(c), std::nullopt};
  }
  if (name == "tail" && colon != std::string::npos) {
    return {builtin_tail_potential(parse_number(arg, "--potential")), std::nullopt};
  }
  return {load_potential_config(spec), std::nullopt};
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(parse_number(part, what));
  return out;
}

// Interior grid of `points` values strictly inside (lo, hi).
std::vector<double> interior_grid(double lo, double hi, std::size_t points) {
  std::vector<double> out;
  for (std::size_t k = 1; k <= points; ++k) {
    out.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points + 1));
  }
  return out;
}

// ---- subcommands ----

struct PressureArgs {
  Common common;
  std::string map = "sv:0.9";
  std::string potential = "neg-t-logT:1";
  std::size_t nmax = 1024;
  double tol = 1e-8;
  std::string method = "perron";
  std::size_t period = 20;
  std::size_t base = 1;
};

int run_pressure(const PressureArgs& a) {
  const MarkovMapModel model = resolve_map(a.map);
  const ResolvedPotential rp = resolve_potential(a.potential, model);
  json config{{"map", a.map}, {"potential", a.potential}, {"nmax", a.nmax}, {"tol", a.tol},
              {"method", a.method}};
  PressureResult r;
  if (a.method == "perron") {
    r = gurevich_pressure(model, rp.potential, a.tol, a.nmax, a.common.threads);
  } else if (a.method == "closed-form") {
    if (!model.sv_lambda() || !rp.neg_t) {
      throw DomainError("the closed form needs --map sv:lambda and --potential neg-t-logT:t");
    }
    r.value = closed_form_pressure_sv(*model.sv_lambda(), *rp.neg_t);
    r.method = PressureMethod::ClosedForm;
    r.converged = true;
  } else {
    config["period"] = a.period;
    config["base"] = a.base;
    const auto alphabet = model.alphabet_size();
    if (!alphabet) throw DomainError("orbit sums need a finite alphabet");
    const TruncatedSubsystem sub = truncate(model, *alphabet);
    r.value = orbit_sum_pressure(sub, rp.potential, a.period, a.base);
    r.method = PressureMethod::OrbitSum;
    r.truncation_used = *alphabet;
    r.converged = true;
  }
  const json prov = provenance("pressure", a.common, config);
  if (a.common.format == "json") {
    emit_json(a.common, prov, to_json(r));
  } else {
    emit(a.common, [&](std::ostream& os) {
      write_csv_preamble(os, prov);
      os << "# value=" << fmt(r.value) << " method=" << to_string(r.method)
         << " converged=" << (r.converged ? "true" : "false") << "\n";
      write_levels_csv(os, r);
    });
  }
  return r.converged ? kExitOk : kExitNoConvergence;
}

struct DimensionArgs {
  Common common;
  std::string kind = "hyperbolic";
  std::optional<double> lambda;
  std::string map;
  std::size_t nmax = 2048;
  double tol = 1e-6;
};

int run_dimension(const DimensionArgs& a) {
  if (a.lambda && !a.map.empty()) throw DomainError("give either --lambda or --map, not both");
  std::string map_spec = a.map;
  if (a.lambda) {
    std::ostringstream os;
    os.precision(17);
    os << "sv:" << *a.lambda;
    map_spec = os.str();
  }
  if (map_spec.empty()) throw DomainError("--lambda or --map is required");
  const MarkovMapModel model = resolve_map(map_spec);
  const BowenResult r = bowen_dimension(model, a.nmax, a.tol);
  json config{{"kind", a.kind}, {"map", map_spec}, {"nmax", a.nmax}, {"tol", a.tol}};
  json levels = json::array();
  for (const auto& [n, s] : r.per_level) levels.push_back(json::array({n, s}));
  json result{{"value", r.value}, {"per_level", levels}, {"converged", r.converged}};
  if (auto lam = model.sv_lambda()) result["closed_form"] = sv_hyperbolic_dimension(*lam);
  const json prov = provenance("dimension", a.common, config);
  if (a.common.format == "json") {
    emit_json(a.common, prov, result);
  } else {
    emit(a.common, [&](std::ostream& os) {
      write_csv_preamble(os, prov);
      os << "# value=" << fmt(r.value) << " converged=" << (r.converged ? "true" : "false") << "\n";
      os << "N,s_N\n";
      for (const auto& [n, s] : r.per_level) os << n << "," << fmt(s) << "\n";
    });
  }
  return r.converged ? kExitOk : kExitNoConvergence;
}

void emit_curve(const Common& c, const json& prov, const SpectrumCurve& curve) {
  if (c.format == "json") {
    emit_json(c, prov, to_json(curve));
  } else {
    emit(c, [&](std::ostream& os) {
      write_csv_preamble(os, prov);
      write_spectrum_csv(os, curve);
    });
  }
}

struct SpectrumArgs {
  Common common;
  double lambda = 0.9;
  std::string potential = "log-derivative";
  std::string alphas;
  std::size_t points = 20;
  std::size_t truncation = 512;
  double tol = 1e-6;
  std::string method = "variational";
};

int run_spectrum_lyapunov(const SpectrumArgs& a) {
  const MarkovMapModel model = MarkovMapModel::stratmann_vogt(a.lambda);
  const Potential phi = builtin_log_derivative(model);
  const Potential one = constant_potential(1.0, 1.0);
  const AlphaBounds b = alpha_bounds(model, phi, one, a.truncation);
  const auto grid = a.alphas.empty() ? interior_grid(b.min, b.max, a.points) : parse_list(a.alphas, "--alphas");
  json config{{"lambda", a.lambda}, {"method", a.method}, {"N", a.truncation}, {"tol", a.tol}};
  if (a.alphas.empty()) {
    config["points"] = a.points;
  } else {
    config["alphas"] = a.alphas;
  }
  SpectrumCurve curve;
  curve.alpha_min = b.min;
  curve.alpha_max = b.max;
  std::vector<double> sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<SpectrumPoint> pts(sorted.size());
  parallel_for(sorted.size(), a.common.threads, [&](std::size_t k) {
    if (a.method == "closed-form") {
      pts[k] = lyapunov_closed_form(a.lambda, sv_t_for_alpha(a.lambda, sorted[k]));
      pts[k].alpha = sorted[k];
    } else {
      pts[k] = variational_dimension(model, phi, one, sorted[k], a.truncation, a.tol);
    }
  });
  curve.points = std::move(pts);
  emit_curve(a.common, provenance("spectrum-lyapunov", a.common, config), curve);
  return kExitOk;
}

int run_spectrum_birkhoff(const SpectrumArgs& a) {
  const MarkovMapModel model = MarkovMapModel::stratmann_vogt(a.lambda);
  const ResolvedPotential rp = resolve_potential(a.potential, model);
  const Potential one = constant_potential(1.0, 1.0);
  std::vector<double> grid;
  if (a.alphas.empty()) {
    const AlphaBounds b = alpha_bounds(model, rp.potential, one, a.truncation);
    grid = interior_grid(b.min, b.max, a.points);
    if (auto tail = rp.potential.tail_limit(); tail && *tail >= b.min && *tail <= b.max) {
      grid.push_back(*tail);
    }
  } else {
    grid = parse_list(a.alphas, "--alphas");
  }
  json config{{"lambda", a.lambda}, {"potential", a.potential}, {"N", a.truncation}, {"tol", a.tol}};
  if (a.alphas.empty()) {
    config["points"] = a.points;
  } else {
    config["alphas"] = a.alphas;
  }
  SpectrumOptions opts;
  opts.truncation = a.truncation;
  opts.tol = a.tol;
  opts.threads = a.common.threads;
  const SpectrumCurve curve = full_birkhoff_spectrum_sv(a.lambda, rp.potential, grid, opts);
  emit_curve(a.common, provenance("spectrum-birkhoff", a.common, config), curve);
  return kExitOk;
}

struct SimulateArgs {
  Common common;
  std::string map = "sv:0.9";
  std::string phi = "log-derivative";
  std::string psi = "constant:1";
  std::optional<double> x0;
  std::size_t steps = 100;
  std::size_t samples = 0;
  std::uint64_t seed = 1;
};

int run_simulate(const SimulateArgs& a) {
  const MarkovMapModel model = resolve_map(a.map);
  const Potential phi = resolve_potential(a.phi, model).potential;
  const Potential psi = resolve_potential(a.psi, model).potential;
  json config{{"map", a.map}, {"phi", a.phi}, {"psi", a.psi}, {"steps", a.steps}};
  if (a.x0) {
    config["x0"] = *a.x0;
    const OrbitRecord rec = simulate_orbit(model, *a.x0, a.steps, phi, psi);
    const json prov = provenance("simulate", a.common, config);
    std::vector<double> phis, psis;
    for (std::size_t k = 0; k < rec.steps(); ++k) {
      const std::span<const std::size_t> w(rec.itinerary.data() + k, 1);
      phis.push_back(phi.depth() == 1 ? phi(w) : std::nan(""));
      psis.push_back(psi.depth() == 1 ? psi(w) : std::nan(""));
    }
    if (a.common.format == "json") {
      json it = rec.itinerary;
      json result{{"start", rec.start},
                  {"steps", rec.steps()},
                  {"classification", to_string(rec.classification)},
                  {"itinerary", it},
                  {"sum_phi", OrbitRecord::sum(phis, 0, phis.size())},
                  {"sum_psi", OrbitRecord::sum(psis, 0, psis.size())},
                  {"sum_logT", OrbitRecord::sum(rec.log_t_values, 0, rec.steps())},
                  {"final_point", model.to_value(rec.points.back())}};
      if (!rec.abort_reason.empty()) result["abort_reason"] = rec.abort_reason;
      emit_json(a.common, prov, result);
    } else {
      emit(a.common, [&](std::ostream& os) {
        write_csv_preamble(os, prov);
        os << "# classification=" << to_string(rec.classification) << "\n";
        os << "step,branch,point,S_phi,S_psi,S_logT\n";
        double sp = 0.0, ss = 0.0, sl = 0.0;
        for (std::size_t k = 0; k < rec.steps(); ++k) {
          sp += phis[k];
          ss += psis[k];
          sl += rec.log_t_values[k];
          os << k << "," << rec.itinerary[k] << "," << fmt(model.to_value(rec.points[k])) << ","
             << fmt(sp) << "," << fmt(ss) << "," << fmt(sl) << "\n";
        }
      });
    }
    return kExitOk;
  }
  if (a.samples == 0) throw DomainError("give --x0 for one orbit or --samples for sampled orbits");
  config["samples"] = a.samples;
  config["seed"] = a.seed;
  const auto orbits = sample_orbits(model, phi, psi, a.samples, a.steps, a.seed, a.common.threads);
  const json prov = provenance("simulate", a.common, config);
  if (a.common.format == "json") {
    json list = json::array();
    for (const auto& o : orbits) {
      list.push_back(json{{"start", o.start},
                          {"classification", to_string(o.classification)},
                          {"steps", o.steps},
                          {"avg_logT_tail", std::isnan(o.avg_log_t_tail) ? json(nullptr) : json(o.avg_log_t_tail)},
                          {"quotient", std::isnan(o.quotient) ? json(nullptr) : json(o.quotient)}});
    }
    emit_json(a.common, prov, list);
  } else {
    emit(a.common, [&](std::ostream& os) {
      write_csv_preamble(os, prov);
      write_orbit_csv(os, orbits);
    });
  }
  return kExitOk;
}

struct EscapeArgs {
  Common common;
  std::string map = "sv:0.9";
  std::size_t samples = 10000;
  std::size_t horizon = 10000;
  std::uint64_t seed = 1;
};

int run_escape(const EscapeArgs& a) {
  const MarkovMapModel model = resolve_map(a.map);
  json config{{"map", a.map}, {"samples", a.samples}, {"horizon", a.horizon}, {"seed", a.seed}};
  const json prov = provenance("escape", a.common, config);
  if (a.samples < 1000) throw PreconditionError("at least 1000 samples are required");
  const Potential logT = builtin_log_derivative(model);
  const auto orbits = sample_orbits(model, logT, constant_potential(1.0, 1.0), a.samples, a.horizon,
                                    a.seed, a.common.threads);
  const EscapeStatistics s = summarize_escape(orbits, a.horizon);
  if (a.common.format == "json") {
    emit_json(a.common, prov, to_json(s));
  } else {
    emit(a.common, [&](std::ostream& os) {
      write_csv_preamble(os, prov);
      os << "# " << to_json(s).dump() << "\n";
      write_orbit_csv(os, orbits);
    });
  }
  return kExitOk;
}

struct FigureArgs {
  Common common;
  double lambda = 0.9;
  std::size_t points = 200;
  double t_max = 40.0;
};

// t grid over (t_c, t_max]: geometric in t - t_c for the first half, linear
// beyond t_c + 1.
std::vector<double> figure_t_grid(double tc, double t_max, std::size_t points) {
  std::vector<double> ts;
  const std::size_t near = points / 2;
  const double d_lo = 1e-6, d_hi = std::min(1.0, 0.5 * (t_max - tc));
  for (std::size_t k = 0; k < near; ++k) {
    const double f = near == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(near - 1);
    ts.push_back(tc + d_lo * std::pow(d_hi / d_lo, f));
  }
  const std::size_t far = points - near;
  for (std::size_t k = 1; k <= far; ++k) {
    ts.push_back(tc + d_hi + (t_max - tc - d_hi) * static_cast<double>(k) / static_cast<double>(far));
  }
  return ts;
}

int run_figure1(const FigureArgs& a) {
  const double tc = sv_critical_t(a.lambda);
  if (a.points < 2) throw DomainError("--points must be at least 2");
  if (!(a.t_max > tc + 1e-3)) throw DomainError("--tmax must exceed t_c");
  json config{{"lambda", a.lambda}, {"points", a.points}, {"tmax", a.t_max}};
  SpectrumCurve curve;
  curve.alpha_min = -std::log1p(-a.lambda);
  curve.alpha_max = curve.alpha_min - std::log(a.lambda);
  for (double t : figure_t_grid(tc, a.t_max, a.points)) curve.points.push_back(lyapunov_closed_form(a.lambda, t));
  std::sort(curve.points.begin(), curve.points.end(),
            [](const SpectrumPoint& x, const SpectrumPoint& y) { return x.alpha < y.alpha; });
  curve.points.erase(std::unique(curve.points.begin(), curve.points.end(),
                                 [](const SpectrumPoint& x, const SpectrumPoint& y) { return x.alpha == y.alpha; }),
                     curve.points.end());
  SpectrumPoint top;
  top.alpha = curve.alpha_max;
  top.dimension = 1.0;
  top.source = SpectrumSource::EscapeValue;
  const double left = sv_hyperbolic_dimension(a.lambda);
  if (!curve.points.empty() && curve.points.back().alpha >= top.alpha) curve.points.pop_back();
  curve.points.push_back(top);
  curve.discontinuities.push_back({top.alpha, left, 1.0});
  emit_curve(a.common, provenance("figure1", a.common, config), curve);
  return kExitOk;
}

struct ValidateArgs {
  Common common;
  std::string path;
};

int run_validate(const ValidateArgs& a) {
  const ValidationReport r = validate_config(a.path);
  const json prov = provenance("validate", a.common, json{{"path", a.path}});
  if (a.common.format == "json") {
    emit_json(a.common, prov, json{{"kind", r.kind}, {"valid", r.ok()}, {"violations", r.violations}});
  } else {
    emit(a.common, [&](std::ostream& os) {
      write_csv_preamble(os, prov);
      os << "violation\n";
      for (const auto& v : r.violations) os << json(v).dump() << "\n";
    });
  }
  return r.ok() ? kExitOk : kExitDomain;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermodynamic formalism for expanding Markov interval maps"};
  app.set_version_flag("--version", std::string("thermo ") + kToolVersion);
  app.require_subcommand(1);
  std::function<int()> action;

  PressureArgs pa;
  auto* pressure = app.add_subcommand("pressure", "Gurevich pressure by truncation");
  add_common(pressure, pa.common, "json");
  pressure->add_option("--map", pa.map, "sv:LAMBDA or a map config path")->capture_default_str();
  pressure->add_option("--potential", pa.potential,
                       "log-derivative, neg-t-logT:T, constant:C, tail:A or a potential config path")
      ->capture_default_str();
  pressure->add_option("--nmax", pa.nmax, "Largest truncation level")->capture_default_str();
  pressure->add_option("--tol", pa.tol, "Convergence tolerance")->capture_default_str();
  pressure->add_option("--method", pa.method, "Pressure route")
      ->check(CLI::IsMember({"perron", "orbit-sum", "closed-form"}))
      ->capture_default_str();
  pressure->add_option("--period", pa.period, "Orbit-sum period")->capture_default_str();
  pressure->add_option("--base", pa.base, "Orbit-sum base symbol")->capture_default_str();
  pressure->callback([&] { action = [&] { return run_pressure(pa); }; });

  DimensionArgs da;
  auto* dimension = app.add_subcommand("dimension", "Bowen root of P(-s log|T'|) = 0");
  add_common(dimension, da.common, "json");
  dimension->add_option("kind", da.kind, "Dimension kind")
      ->check(CLI::IsMember({"hyperbolic"}))
      ->capture_default_str();
  dimension->add_option("--lambda", da.lambda, "Built-in family parameter");
  dimension->add_option("--map", da.map, "sv:LAMBDA or a map config path");
  dimension->add_option("--nmax", da.nmax, "Largest truncation level")->capture_default_str();
  dimension->add_option("--tol", da.tol, "Root tolerance")->capture_default_str();
  dimension->callback([&] { action = [&] { return run_dimension(da); }; });

  SpectrumArgs la;
  auto* lyap = app.add_subcommand("spectrum-lyapunov", "Lyapunov spectrum of the built-in family");
  add_common(lyap, la.common, "csv");
  lyap->add_option("--lambda", la.lambda, "Family parameter")->capture_default_str();
  lyap->add_option("--alphas", la.alphas, "Comma-separated alpha grid");
  lyap->add_option("--points", la.points, "Interior grid size when --alphas is absent")->capture_default_str();
  lyap->add_option("--N", la.truncation, "Truncation level")->capture_default_str();
  lyap->add_option("--tol", la.tol, "Dimension tolerance")->capture_default_str();
  lyap->add_option("--method", la.method, "Value source")
      ->check(CLI::IsMember({"variational", "closed-form"}))
      ->capture_default_str();
  lyap->callback([&] { action = [&] { return run_spectrum_lyapunov(la); }; });

  SpectrumArgs ba;
  auto* birk = app.add_subcommand("spectrum-birkhoff", "Full Birkhoff spectrum of the built-in family");
  add_common(birk, ba.common, "csv");
  birk->add_option("--lambda", ba.lambda, "Family parameter")->capture_default_str();
  birk->add_option("--potential", ba.potential, "Depth-1 potential with a tail limit")->capture_default_str();
  birk->add_option("--alphas", ba.alphas, "Comma-separated alpha grid");
  birk->add_option("--points", ba.points, "Interior grid size when --alphas is absent")->capture_default_str();
  birk->add_option("--N", ba.truncation, "Truncation level")->capture_default_str();
  birk->add_option("--tol", ba.tol, "Dimension tolerance")->capture_default_str();
  birk->callback([&] { action = [&] { return run_spectrum_birkhoff(ba); }; });

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Iterate orbits and record itineraries");
  add_common(simulate, sa.common, "csv");
  simulate->add_option("--map", sa.map, "sv:LAMBDA or a map config path")->capture_default_str();
  simulate->add_option("--phi", sa.phi, "Numerator potential")->capture_default_str();
  simulate->add_option("--psi", sa.psi, "Denominator potential")->capture_default_str();
  simulate->add_option("--x0", sa.x0, "Start point in (0,1]");
  simulate->add_option("--steps", sa.steps, "Number of map applications")->capture_default_str();
  simulate->add_option("--samples", sa.samples, "Number of uniform random starts");
  simulate->add_option("--seed", sa.seed, "Random seed")->capture_default_str();
  simulate->callback([&] { action = [&] { return run_simulate(sa); }; });

  EscapeArgs ea;
  auto* escape = app.add_subcommand("escape", "Finite-horizon escape statistics");
  add_common(escape, ea.common, "json");
  escape->add_option("--map", ea.map, "sv:LAMBDA or a map config path")->capture_default_str();
  escape->add_option("--samples", ea.samples, "Number of uniform random starts")->capture_default_str();
  escape->add_option("--horizon", ea.horizon, "Orbit length")->capture_default_str();
  escape->add_option("--seed", ea.seed, "Random seed")->capture_default_str();
  escape->callback([&] { action = [&] { return run_escape(ea); }; });

  FigureArgs fa;
  auto* figure = app.add_subcommand("figure1", "Lyapunov spectrum curve with the value 1 at alpha_M");
  add_common(figure, fa.common, "csv");
  figure->add_option("--lambda", fa.lambda, "Family parameter")->capture_default_str();
  figure->add_option("--points", fa.points, "Number of t samples")->capture_default_str();
  figure->add_option("--tmax", fa.t_max, "Largest t")->capture_default_str();
  figure->callback([&] { action = [&] { return run_figure1(fa); }; });

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Check a map or potential config");
  add_common(validate, va.common, "json");
  validate->add_option("path", va.path, "Config file")->required();
  validate->callback([&] { action = [&] { return run_validate(va); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    return action();
  } catch (const thermo::Error& e) {
    std::cerr << "thermo: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "thermo: " << e.what() << "\n";
    return kExitDomain;
  }
}
