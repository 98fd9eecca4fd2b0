#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "thermo/potential.hpp"

using namespace thermo;

namespace {
double at(const Potential& p, Word w) { return p(w); }
}  // namespace

TEST(LogDerivative, SvValues) {
  const auto m = MarkovMapModel::stratmann_vogt(0.9);
  const auto p = builtin_log_derivative(m);
  EXPECT_EQ(p.depth(), 1u);
  EXPECT_NEAR(p.value(1), 2.302585092994046, 1e-12);
  for (std::size_t n : {2u, 3u, 17u, 1000u}) EXPECT_NEAR(p.value(n), 2.4079456086518722, 1e-12);
  ASSERT_TRUE(p.tail_limit());
  EXPECT_NEAR(*p.tail_limit(), 2.4079456086518722, 1e-12);
  ASSERT_TRUE(p.positivity_floor());
  EXPECT_NEAR(*p.positivity_floor(), std::log(10.0), 1e-12);
}

TEST(LogDerivative, SlopesAreEqualBeyondBranchOne) {
  for (double lam : {0.55, 0.7, 0.95}) {
    const auto p = builtin_log_derivative(MarkovMapModel::stratmann_vogt(lam));
    EXPECT_EQ(p.value(2), p.value(7));
  }
}

TEST(LogDerivative, TailConvergesOnMaterializedSymbols) {
  const auto p = builtin_log_derivative(MarkovMapModel::stratmann_vogt(0.7));
  for (std::size_t n = 2; n < 200; n += 13) EXPECT_NEAR(p.value(n), *p.tail_limit(), 1e-12);
}

TEST(TailPotential, ZeroWithoutOverrides) {
  const auto p = builtin_tail_potential(0.0);
  for (std::size_t s = 1; s < 10; ++s) EXPECT_EQ(p.value(s), 0.0);
}

TEST(TailPotential, OverrideOnFirstSymbol) {
  const auto p = builtin_tail_potential(1.0, {{1, 5.0}});
  EXPECT_EQ(p.value(1), 5.0);
  for (std::size_t s = 2; s < 10; ++s) EXPECT_EQ(p.value(s), 1.0);
}

TEST(TailPotential, TailLimitIsDeclaredValue) {
  const auto p = builtin_tail_potential(2.5, {{1, 0.1}, {2, 0.2}, {3, 0.3}});
  ASSERT_TRUE(p.tail_limit());
  EXPECT_EQ(*p.tail_limit(), 2.5);
  EXPECT_EQ(p.value(4), 2.5);
}

TEST(TailPotential, FloorRejectsSmallerValues) {
  EXPECT_THROW(builtin_tail_potential(1.0, {{2, -0.5}}, 0.1), DomainError);
  EXPECT_THROW(constant_potential(1.0, 0.0), DomainError);
}

TEST(Combine, NegatedLogDerivative) {
  const auto m = MarkovMapModel::stratmann_vogt(0.9);
  const auto logT = builtin_log_derivative(m);
  const auto zero = constant_potential(0.0);
  const auto p = combine(0.0, zero, 0.0, zero, 1.0, logT);
  for (std::size_t s = 1; s < 6; ++s) EXPECT_EQ(p.value(s), -logT.value(s));
}

TEST(Combine, IdentityCoefficients) {
  const auto m = MarkovMapModel::stratmann_vogt(0.9);
  const auto phi = builtin_tail_potential(3.0, {{1, -1.0}});
  const auto psi = builtin_tail_potential(7.0, {{2, 11.0}});
  const auto p = combine(1.0, phi, 0.0, psi, 0.0, builtin_log_derivative(m));
  for (std::size_t s = 1; s < 6; ++s) EXPECT_EQ(p.value(s), phi.value(s));
}

TEST(Combine, EqualConstantsCancel) {
  const auto m = MarkovMapModel::stratmann_vogt(0.9);
  const auto one = constant_potential(1.0, 1.0);
  const auto p = combine(3.0, one, 1.0, one, 0.0, builtin_log_derivative(m));
  for (std::size_t s = 1; s < 6; ++s) EXPECT_EQ(p.value(s), 0.0);
}

TEST(Combine, DepthIsTheMaximum) {
  const auto m = MarkovMapModel::stratmann_vogt(0.9);
  const auto deep = table_potential(3, 0.0, {{{1, 2, 3}, 1.0}});
  const auto p = combine(1.0, deep, 0.0, constant_potential(1.0, 1.0), 0.0, builtin_log_derivative(m));
  EXPECT_EQ(p.depth(), 3u);
  EXPECT_EQ(at(p, {1, 2, 3}), 1.0);
  EXPECT_EQ(at(p, {1, 2, 4}), 0.0);
}

TEST(Combine, LinearInCoefficients) {
  const auto m = MarkovMapModel::stratmann_vogt(0.8);
  const auto logT = builtin_log_derivative(m);
  const auto phi = table_potential(2, 0.25, {{{1, 1}, -2.0}, {{2, 1}, 4.0}});
  const auto psi = builtin_tail_potential(1.5, {{1, 0.5}}, 0.5);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double q1 = u(rng), q2 = u(rng), a = u(rng), d = u(rng);
    const auto p1 = combine(q1, phi, a, psi, d, logT);
    const auto p2 = combine(q2, phi, a, psi, 0.0, logT);
    const auto p12 = combine(q1 + q2, phi, a, psi, d, logT);
    for (Word w : {Word{1, 1}, Word{2, 1}, Word{3, 2}, Word{1, 5}}) {
      EXPECT_NEAR(p12(w), p1(w) + p2(w), 1e-12);
    }
  }
}

TEST(Combine, DifferentMapsAreRejected) {
  const auto a = builtin_log_derivative(MarkovMapModel::stratmann_vogt(0.9));
  const auto b = builtin_log_derivative(MarkovMapModel::stratmann_vogt(0.8));
  EXPECT_THROW(combine(1.0, a, 0.0, constant_potential(1.0, 1.0), 1.0, b), CompositionError);
}

TEST(Potential, DepthCoherence) {
  const auto p = table_potential(2, 0.0, {{{1, 2}, 3.0}});
  EXPECT_EQ(at(p, {1, 2, 7, 7}), at(p, {1, 2, 1}));
  EXPECT_THROW(at(p, {1}), DomainError);
}

TEST(Variation, BeyondDepthIsZero) {
  const auto p = builtin_log_derivative(MarkovMapModel::stratmann_vogt(0.9));
  EXPECT_EQ(variation_bound(p, 2).value, 0.0);
  EXPECT_EQ(variation_bound(table_potential(2, 0.0, {{{1, 2}, 3.0}}), 5).value, 0.0);
}

TEST(Variation, GlobalOscillationOfSvLogDerivative) {
  const double lam = 0.9;
  const auto p = builtin_log_derivative(MarkovMapModel::stratmann_vogt(lam));
  const auto v = variation_bound(p, 0);
  EXPECT_NEAR(v.value, -std::log(lam), 1e-12);
  EXPECT_TRUE(v.range_limited);
}

TEST(Variation, DepthOneIsConstantOnOneCylinders) {
  const auto p = builtin_log_derivative(MarkovMapModel::stratmann_vogt(0.9));
  EXPECT_EQ(variation_bound(p, 1).value, 0.0);
}

TEST(Variation, ConstantPotential) {
  const auto c = constant_potential(4.0);
  for (std::size_t m : {0u, 1u, 2u, 6u}) EXPECT_EQ(variation_bound(c, m, 5).value, 0.0);
}

TEST(Variation, DepthTwoTable) {
  const auto p = table_potential(2, 0.0, {{{1, 2}, 3.0}, {{2, 2}, -1.0}});
  EXPECT_EQ(variation_bound(p, 1, 3).value, 3.0);
  EXPECT_FALSE(variation_bound(p, 1, 3).range_limited);
  EXPECT_EQ(variation_bound(p, 0, 3).value, 4.0);
}
