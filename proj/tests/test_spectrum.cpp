#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "thermo/spectrum.hpp"

using namespace thermo;

namespace {

MarkovMapModel full_shift(double slope1 = 2.0, double slope2 = 2.0) {
  const double cut = 1.0 / slope1;
  BranchSpec a{1, {0.0, cut}, slope1, 0.0, 0.0};
  BranchSpec b{2, {cut, 1.0}, slope2, 0.0, 0.0};
  return MarkovMapModel::custom({a, b}, std::nullopt, TransitionRule::Full);
}

struct Lyap {
  MarkovMapModel model;
  Potential phi;
  Potential one;
  explicit Lyap(double lam)
      : model(MarkovMapModel::stratmann_vogt(lam)),
        phi(builtin_log_derivative(model)),
        one(constant_potential(1.0, 1.0)) {}
};

}  // namespace

TEST(AlphaBounds, SvLyapunovExact) {
  Lyap l(0.9);
  const auto b = alpha_bounds(l.model, l.phi, l.one, 64);
  EXPECT_TRUE(b.exact);
  EXPECT_NEAR(b.min, 2.302585092994046, 1e-12);
  EXPECT_NEAR(b.max, 2.4079456086518722, 1e-12);
}

TEST(AlphaBounds, CycleSearchAgreesWithExactSvEndpoints) {
  // A table copy of log|T'| is not recognised as the log-derivative, so the
  // general cycle-ratio search runs.
  const double lam = 0.75;
  Lyap l(lam);
  const auto copy = builtin_tail_potential(*l.phi.tail_limit(), {{1, l.phi.value(1)}});
  const auto b = alpha_bounds(l.model, copy, l.one, 32);
  EXPECT_FALSE(b.exact);
  EXPECT_NEAR(b.min, static_cast<double>(oracle::sv_alpha_min(lam)), 1e-9);
  EXPECT_NEAR(b.max, static_cast<double>(oracle::sv_alpha_max(lam)), 1e-9);
}

TEST(AlphaBounds, EqualPotentialsGiveOne) {
  Lyap l(0.8);
  const auto b = alpha_bounds(l.model, l.one, l.one, 16);
  EXPECT_NEAR(b.min, 1.0, 1e-12);
  EXPECT_NEAR(b.max, 1.0, 1e-12);
  const auto psi = builtin_tail_potential(2.0, {{1, 3.0}, {3, 0.5}}, 0.5);
  const auto c = alpha_bounds(l.model, psi, psi, 16);
  EXPECT_NEAR(c.min, 1.0, 1e-12);
  EXPECT_NEAR(c.max, 1.0, 1e-12);
}

TEST(AlphaBounds, IndicatorOnFullShift) {
  const auto m = full_shift();
  const auto phi = builtin_tail_potential(1.0, {{1, 0.0}});
  const auto b = alpha_bounds(m, phi, constant_potential(1.0, 1.0), 2);
  EXPECT_NEAR(b.min, 0.0, 1e-12);
  EXPECT_NEAR(b.max, 1.0, 1e-12);
}

TEST(AlphaBounds, MatchesCycleEnumeration) {
  const auto m = MarkovMapModel::stratmann_vogt(0.7);
  const std::size_t n = 6;
  const std::vector<double> num{0.3, -1.2, 2.0, 0.7, -0.4, 1.1};
  const std::vector<double> den{1.0, 2.5, 0.5, 1.5, 1.0, 3.0};
  std::map<std::size_t, double> po, so;
  for (std::size_t k = 0; k < n; ++k) {
    po[k + 1] = num[k];
    so[k + 1] = den[k];
  }
  const auto phi = builtin_tail_potential(0.0, po);
  const auto psi = builtin_tail_potential(1.0, so, 0.5);
  const auto b = alpha_bounds(m, phi, psi, n);
  const auto [lo, hi] = oracle::cycle_ratio_range(oracle::sv_matrix(n), {num.begin(), num.end()},
                                                  {den.begin(), den.end()});
  EXPECT_NEAR(b.min, static_cast<double>(lo), 1e-10);
  EXPECT_NEAR(b.max, static_cast<double>(hi), 1e-10);
}

TEST(AlphaBounds, PsiNeedsFloor) {
  Lyap l(0.9);
  EXPECT_THROW(alpha_bounds(l.model, l.phi, constant_potential(1.0), 16), DomainError);
  EXPECT_THROW(alpha_bounds(l.model, l.phi, l.one, 1), PreconditionError);
}

TEST(InfPressure, VanishesAtTheCriticalDelta) {
  Lyap l(0.9);
  const auto cf = lyapunov_closed_form(0.9, 7.0);
  const auto r = inf_pressure_over_q(l.model, l.phi, l.one, cf.alpha, cf.dimension, 512, 1e-8);
  EXPECT_NEAR(r.value, 0.0, 1e-6);
  // q(logT - alpha) - delta logT = -(delta - q) logT - q alpha is smallest
  // where alpha_(delta - q) = alpha, i.e. at q = delta - t.
  EXPECT_NEAR(r.q_star, cf.dimension - 7.0, 1e-3);
}

TEST(InfPressure, PositiveAtDeltaZero) {
  Lyap l(0.9);
  const auto r = inf_pressure_over_q(l.model, l.phi, l.one, 2.36, 0.0, 128, 1e-6);
  EXPECT_GT(r.value, 0.0);
}

TEST(InfPressure, FlatWhenPhiEqualsAlphaPsi) {
  Lyap l(0.9);
  const auto r = inf_pressure_over_q(l.model, l.one, l.one, 1.0, 0.4, 64, 1e-6);
  const auto logT = l.phi;
  const auto zero = constant_potential(0.0);
  const auto direct = gurevich_pressure(l.model, combine(0.0, zero, 0.0, zero, 0.4, logT), 1e-9, 64);
  EXPECT_NEAR(r.value, direct.value, 1e-10);
}

TEST(InfPressure, BeyondTheEdgeIsUnbounded) {
  const auto m = full_shift();
  const auto phi = builtin_tail_potential(1.0, {{1, 0.0}});
  EXPECT_THROW(inf_pressure_over_q(m, phi, constant_potential(1.0, 1.0), 1.5, 0.5, 2, 1e-6),
               UnboundedError);
}

TEST(Variational, MatchesClosedFormAtT7) {
  Lyap l(0.9);
  const auto cf = lyapunov_closed_form(0.9, 7.0);
  EXPECT_NEAR(cf.alpha, 2.399180, 1e-6);
  const auto p = variational_dimension(l.model, l.phi, l.one, cf.alpha, 512, 1e-6);
  EXPECT_EQ(p.source, SpectrumSource::Variational);
  EXPECT_NEAR(p.dimension, static_cast<double>(oracle::sv_lyapunov_dimension(0.9L, 7.0L)), 1e-3);
  EXPECT_NEAR(p.dimension, 0.5531, 1e-3);
  EXPECT_LE(p.bracket_high - p.bracket_low, 1e-6);
  EXPECT_GE(p.dimension, p.bracket_low);
  EXPECT_LE(p.dimension, p.bracket_high);
  ASSERT_TRUE(p.q_star);
  EXPECT_FALSE(p.hypothesis_unverified);
}

TEST(Variational, SmallNearAlphaMin) {
  Lyap l(0.9);
  const auto a20 = lyapunov_closed_form(0.9, 20.0).alpha;
  const auto a30 = lyapunov_closed_form(0.9, 30.0).alpha;
  const auto p20 = variational_dimension(l.model, l.phi, l.one, a20, 256, 1e-6);
  const auto p30 = variational_dimension(l.model, l.phi, l.one, a30, 256, 1e-6);
  EXPECT_LT(p30.dimension, 0.1);
  EXPECT_LT(p30.dimension, p20.dimension);
}

TEST(Variational, DegenerateSpectrumIsDomainError) {
  Lyap l(0.9);
  EXPECT_THROW(variational_dimension(l.model, l.one, l.one, 1.0, 64, 1e-6), DomainError);
  EXPECT_THROW(variational_dimension(l.model, l.phi, l.one, 2.5, 64, 1e-6), DomainError);
  EXPECT_THROW(variational_dimension(l.model, l.phi, l.one, 2.35, 64, 0.0), DomainError);
}

TEST(Variational, NondecreasingInTruncation) {
  Lyap l(0.75);
  const double a = lyapunov_closed_form(0.75, 4.0).alpha;
  double last = -1.0;
  for (std::size_t n : {16u, 64u, 256u}) {
    const double d = variational_dimension(l.model, l.phi, l.one, a, n, 1e-7).dimension;
    EXPECT_GE(d, last - 2e-7);
    last = d;
  }
}

TEST(Variational, NonConstantPsiIsFlagged) {
  Lyap l(0.9);
  const auto psi = builtin_tail_potential(1.0, {{1, 2.0}}, 0.5);
  const auto b = alpha_bounds(l.model, l.phi, psi, 64);
  const auto p = variational_dimension(l.model, l.phi, psi, 0.5 * (b.min + b.max), 64, 1e-5);
  EXPECT_TRUE(p.hypothesis_unverified);
}

TEST(Variational, BelowBowenDimension) {
  Lyap l(0.9);
  const auto bowen = bowen_dimension(l.model, 256, 1e-8);
  for (double t : {7.0, 9.0, 15.0}) {
    const double a = lyapunov_closed_form(0.9, t).alpha;
    EXPECT_LE(variational_dimension(l.model, l.phi, l.one, a, 256, 1e-6).dimension, bowen.value + 2e-6);
  }
}

TEST(Bowen, SvTargets) {
  for (double lam : {0.75, 0.9}) {
    const auto r = bowen_dimension(MarkovMapModel::stratmann_vogt(lam), 1024, 1e-9);
    EXPECT_NEAR(r.value, static_cast<double>(oracle::sv_hyperbolic_dimension(lam)), 1e-4) << lam;
    for (std::size_t k = 1; k < r.per_level.size(); ++k) {
      EXPECT_GE(r.per_level[k].second, r.per_level[k - 1].second);
    }
  }
  EXPECT_NEAR(static_cast<double>(oracle::sv_hyperbolic_dimension(0.9L)), 0.575717, 1e-6);
  EXPECT_NEAR(static_cast<double>(oracle::sv_hyperbolic_dimension(0.75L)), 0.828145, 1e-6);
}

TEST(Bowen, FullShiftWithSlopeTwo) {
  const auto r = bowen_dimension(full_shift(), 1024, 1e-12);
  EXPECT_NEAR(r.value, 1.0, 1e-12);
  EXPECT_TRUE(r.converged);
}

TEST(Bowen, RejectsBadTolerance) {
  EXPECT_THROW(bowen_dimension(full_shift(), 16, 0.0), DomainError);
}

TEST(LyapunovClosedForm, Values) {
  const auto p = lyapunov_closed_form(0.9, 7.0);
  EXPECT_EQ(p.source, SpectrumSource::ClosedForm);
  EXPECT_NEAR(p.alpha, static_cast<double>(oracle::sv_alpha_t(0.9L, 7.0L)), 1e-12);
  EXPECT_NEAR(p.dimension, static_cast<double>(oracle::sv_lyapunov_dimension(0.9L, 7.0L)), 1e-12);
  EXPECT_NEAR(p.dimension, 0.5531, 1e-4);
}

TEST(LyapunovClosedForm, LeftLimitIsHyperbolicDimension) {
  for (double lam : {0.6, 0.75, 0.9}) {
    const auto p = lyapunov_closed_form(lam, sv_critical_t(lam) + 1e-6);
    EXPECT_NEAR(p.alpha, static_cast<double>(oracle::sv_alpha_max(lam)), 1e-6);
    EXPECT_NEAR(p.dimension, static_cast<double>(oracle::sv_hyperbolic_dimension(lam)), 1e-6);
  }
}

TEST(LyapunovClosedForm, LargeT) {
  const auto p = lyapunov_closed_form(0.9, 40.0);
  EXPECT_NEAR(p.alpha, static_cast<double>(oracle::sv_alpha_t(0.9L, 40.0L)), 1e-12);
  EXPECT_NEAR(p.dimension, static_cast<double>(oracle::sv_lyapunov_dimension(0.9L, 40.0L)), 1e-12);
  // alpha_t - alpha_m ~ lambda^t |log lambda|, so the curve reaches alpha_m
  // to within 1e-3 and dimension 0.02 only around t = 60.
  const auto far = lyapunov_closed_form(0.9, 60.0);
  EXPECT_LT(far.alpha - 2.302585092994046, 1e-3);
  EXPECT_LT(far.dimension, 0.02);
  EXPECT_THROW(lyapunov_closed_form(0.9, 6.0), DomainError);
  EXPECT_THROW(lyapunov_closed_form(0.9, sv_critical_t(0.9)), DomainError);
}

TEST(LyapunovClosedForm, AlphaInversion) {
  for (double t : {6.7, 7.0, 12.0, 30.0}) {
    EXPECT_NEAR(sv_t_for_alpha(0.9, sv_alpha_t(0.9, t)), t, 1e-8 * t);
  }
}

TEST(DerivativeIdentity, Cases) {
  for (auto [lam, t] : {std::pair{0.9, 8.0}, std::pair{0.75, 5.0}}) {
    const auto c = derivative_identity_check(lam, t, 1e-4);
    EXPECT_NEAR(c.finite_difference, c.minus_alpha_t, 1e-6);
    EXPECT_NEAR(c.minus_alpha_t, -static_cast<double>(oracle::sv_alpha_t(lam, t)), 1e-12);
  }
}

TEST(DerivativeIdentity, SecondOrder) {
  const auto a = derivative_identity_check(0.9, 8.0, 2e-2);
  const auto b = derivative_identity_check(0.9, 8.0, 1e-2);
  const double ea = std::abs(a.finite_difference - a.minus_alpha_t);
  const double eb = std::abs(b.finite_difference - b.minus_alpha_t);
  EXPECT_NEAR(ea / eb, 4.0, 0.2);
}

TEST(DerivativeIdentity, StencilMustStayInRange) {
  EXPECT_THROW(derivative_identity_check(0.9, 6.6, 0.1), DomainError);
  EXPECT_THROW(derivative_identity_check(0.9, 8.0, 0.0), DomainError);
}

TEST(FullBirkhoff, LyapunovCaseHasJumpAtAlphaMax) {
  const double lam = 0.9;
  Lyap l(lam);
  const double aM = static_cast<double>(oracle::sv_alpha_max(lam));
  std::vector<double> grid{lyapunov_closed_form(lam, 7.0).alpha, lyapunov_closed_form(lam, 6.6).alpha, aM};
  SpectrumOptions opts;
  opts.truncation = 512;
  opts.tol = 1e-6;
  const auto c = full_birkhoff_spectrum_sv(lam, l.phi, grid, opts);
  ASSERT_EQ(c.points.size(), 3u);
  EXPECT_EQ(c.points.back().source, SpectrumSource::EscapeValue);
  EXPECT_EQ(c.points.back().dimension, 1.0);
  ASSERT_EQ(c.discontinuities.size(), 1u);
  EXPECT_NEAR(c.discontinuities[0].value - c.discontinuities[0].left_limit, 1.0 - 0.575717, 2e-3);
  for (std::size_t k = 1; k < c.points.size(); ++k) EXPECT_LT(c.points[k - 1].alpha, c.points[k].alpha);
}

TEST(FullBirkhoff, BoundedByBowenOffTheTailLimit) {
  const double lam = 0.9;
  Lyap l(lam);
  const auto bowen = bowen_dimension(l.model, 256, 1e-8);
  std::vector<double> grid;
  for (int k = 1; k <= 6; ++k) grid.push_back(2.3026 + 0.105 * k / 7.0);
  SpectrumOptions opts;
  opts.truncation = 256;
  const auto c = full_birkhoff_spectrum_sv(lam, l.phi, grid, opts);
  for (const auto& p : c.points) {
    if (p.source == SpectrumSource::Variational) EXPECT_LE(p.dimension, bowen.value + opts.tol);
  }
}

TEST(FullBirkhoff, InteriorTailLimitGivesSingleJump) {
  // phi = 2.35 off symbols 1 and 2; the spectrum spans [2.31, 2.40] and the
  // tail limit 2.35 is interior.
  const double lam = 0.9;
  const auto phi = builtin_tail_potential(2.35, {{1, 2.31}, {2, 2.40}});
  std::vector<double> grid;
  for (int k = 1; k <= 17; ++k) grid.push_back(2.31 + 0.09 * k / 18.0);
  grid.push_back(2.35);
  SpectrumOptions opts;
  opts.truncation = 128;
  opts.tol = 1e-6;
  const auto c = full_birkhoff_spectrum_sv(lam, phi, grid, opts);
  EXPECT_NEAR(c.alpha_min, 2.31, 1e-9);
  EXPECT_NEAR(c.alpha_max, 2.40, 1e-9);
  ASSERT_EQ(c.discontinuities.size(), 1u);
  EXPECT_NEAR(c.discontinuities[0].alpha, 2.35, 1e-12);
  // Away from a the variational values vary continuously: neighbouring
  // grid steps change the dimension by far less than the jump.
  const double jump = c.discontinuities[0].value - c.discontinuities[0].left_limit;
  for (std::size_t k = 1; k < c.points.size(); ++k) {
    const auto& a = c.points[k - 1];
    const auto& b = c.points[k];
    if (a.source == SpectrumSource::Variational && b.source == SpectrumSource::Variational) {
      EXPECT_LT(std::abs(a.dimension - b.dimension), 0.5 * jump);
    }
  }
}

TEST(FullBirkhoff, ThreadCountDoesNotChangeCurve) {
  Lyap l(0.75);
  std::vector<double> grid{1.40, 1.45, 1.50, 1.55, 1.60, 1.65};
  SpectrumOptions one, four;
  one.truncation = four.truncation = 64;
  four.threads = 4;
  const auto a = full_birkhoff_spectrum_sv(0.75, l.phi, grid, one);
  const auto b = full_birkhoff_spectrum_sv(0.75, l.phi, grid, four);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t k = 0; k < a.points.size(); ++k) {
    EXPECT_EQ(a.points[k].alpha, b.points[k].alpha);
    EXPECT_EQ(a.points[k].dimension, b.points[k].dimension);
  }
}

TEST(FullBirkhoff, GridOutsideRangeIsRejected) {
  Lyap l(0.9);
  std::vector<double> grid{2.0};
  EXPECT_THROW(full_birkhoff_spectrum_sv(0.9, l.phi, grid), DomainError);
}
