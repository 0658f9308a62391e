#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "musielak/degiorgi.hpp"
#include "musielak/errors.hpp"

using namespace musielak;

namespace {

FieldPtr constant(int N, double p, double q, double mu) {
  return std::make_shared<ExponentField>(ExponentField::constant(N, p, q, mu));
}

std::shared_ptr<const GridDomain> line(std::size_t n) {
  return std::make_shared<GridDomain>(GridDomain::unit_box(1, n));
}

// plain forward iteration, no logs
std::vector<double> brute_force(double Z0, const RecursionParams& p, std::size_t n_max) {
  std::vector<double> z{Z0};
  for (std::size_t n = 0; n < n_max; ++n) {
    const double Z = z.back();
    z.push_back(p.K * std::pow(p.b, double(n)) * (std::pow(Z, 1 + p.mu1) + std::pow(Z, 1 + p.mu2)));
  }
  return z;
}

RecursionParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0, 1);
  RecursionParams p;
  p.K = std::pow(10.0, 2 * U(rng) - 1);
  p.b = 1.05 + 9 * U(rng);
  p.mu1 = 0.05 + 2 * U(rng);
  p.mu2 = p.mu1 * (1 + 2 * U(rng));
  return p;
}

}  // namespace

TEST(Recursion, ThresholdHandValues) {
  auto t = recursion_thresholds({1, 2, 1, 1});
  EXPECT_NEAR(t.T1, 0.25, 1e-15);
  EXPECT_NEAR(t.T2, 0.25, 1e-15);
  EXPECT_NEAR(recursion_thresholds({0.5, 2, 1, 1}).T1, 0.5, 1e-15);
  // mu1 = mu2: the two terms of the second bound are the same number
  auto u = recursion_thresholds({3.0, 5.0, 0.7, 0.7});
  EXPECT_NEAR(u.T2, std::pow(6.0, -1 / 0.7) * std::pow(5.0, -1 / 0.49), 1e-15);
  EXPECT_NEAR(u.T1, std::min(1.0, u.T2), 1e-15);
  EXPECT_THROW(recursion_thresholds({1, 1, 1, 1}), DomainError);
  EXPECT_THROW(recursion_thresholds({1, 2, 1, 0.5}), DomainError);
  EXPECT_THROW(recursion_thresholds({0, 2, 1, 1}), DomainError);
}

TEST(Recursion, HandIteration) {
  auto tr = iterate_recursion(0.25, {1, 2, 1, 1}, 10);
  EXPECT_NEAR(tr.Z[1], 0.125, 1e-15);
  EXPECT_NEAR(tr.Z[2], 0.0625, 1e-15);
  EXPECT_TRUE(tr.admissible);
  EXPECT_EQ(tr.n0, 0u);
  EXPECT_TRUE(tr.envelope_ok);
  EXPECT_TRUE(tr.decays());

  auto z = iterate_recursion(0.0, {1, 2, 1, 1}, 5);
  for (double v : z.Z) EXPECT_EQ(v, 0.0);
  EXPECT_TRUE(z.decays());

  auto d = iterate_recursion(4.0, {1, 2, 1, 1}, 50);
  EXPECT_TRUE(d.divergent);
  EXPECT_FALSE(d.decays());
  EXPECT_EQ(d.Z.back(), kSentinel);
  EXPECT_THROW(iterate_recursion(1.0, {1, 2, 1, 1}, 0), DomainError);
}

TEST(Recursion, MatchesBruteForce) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0, 1);
  for (int k = 0; k < 300; ++k) {
    auto p = random_params(rng);
    const double Z0 = std::pow(10.0, 3 * U(rng) - 2);
    auto tr = iterate_recursion(Z0, p, 30);
    auto bf = brute_force(Z0, p, 30);
    for (std::size_t n = 0; n < tr.Z.size(); ++n) {
      if (tr.divergent && n + 1 == tr.Z.size()) break;
      if (bf[n] < 1e-250 || bf[n] > 1e250) break;
      EXPECT_NEAR(tr.Z[n], bf[n], 1e-11 * bf[n]) << k << " " << n;
    }
  }
}

TEST(Recursion, SeedsBelowEitherThresholdDecay) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 1000; ++k) {
    auto p = random_params(rng);
    auto t = recursion_thresholds(p);
    for (double lt : {t.log_T1, t.log_T2}) {
      if (std::exp(lt) == 0) continue;  // seed underflows
      auto tr = iterate_recursion(0.99 * std::exp(lt), p, 200);
      EXPECT_TRUE(tr.admissible);
      ASSERT_TRUE(tr.n0.has_value());
      EXPECT_TRUE(tr.envelope_ok) << p.K << " " << p.b << " " << p.mu1 << " " << p.mu2;
      EXPECT_FALSE(tr.divergent);
    }
  }
}

TEST(Recursion, LargeSeedsFlagged) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> U(0, 1);
  for (int k = 0; k < 300; ++k) {
    RecursionParams p;
    p.K = 1 + 9 * U(rng);
    p.b = 2 + 8 * U(rng);
    p.mu1 = p.mu2 = 0.1 + 2 * U(rng);
    auto t = recursion_thresholds(p);
    auto tr = iterate_recursion(10 * t.best(), p, 200);
    EXPECT_FALSE(tr.decays()) << p.K << " " << p.b << " " << p.mu1;
  }
}

TEST(Recursion, FitRecoversConstants) {
  RecursionParams p{0.7, 3.0, 0.5, 1.2};
  auto tr = iterate_recursion(1e-3, p, 6);
  auto f = fit_recursion(tr.Z, 0.5, 1.2);
  EXPECT_NEAR(f.K, 0.7, 1e-9);
  EXPECT_NEAR(f.b, 3.0, 1e-9);
  EXPECT_THROW(fit_recursion({1.0, 0.0}, 1, 1), NumericalError);
}

TEST(LevelSet, Line) {
  auto d = line(1001);
  auto u = GridFunction::from_function(d, [](const GridDomain::Point& x) { return x[0]; });
  auto a = level_set(u, 0.5);
  EXPECT_NEAR(a.measure, 0.5, d->max_spacing());
  EXPECT_EQ(a.boundary_nodes.size(), 1u);
  EXPECT_EQ(a.boundary_measure, 1.0);
  auto e = level_set(u, 1.0);
  EXPECT_TRUE(e.nodes.empty());
  EXPECT_EQ(e.measure, 0.0);
  EXPECT_NEAR(level_set(u, -1.0).measure, 1.0, 1e-14);
}

TEST(KappaSequence, Values) {
  EXPECT_EQ(kappa_sequence(3.0, 0), 3.0);
  EXPECT_EQ(kappa_sequence(3.0, 1), 4.5);
  double prev = 0;
  for (std::size_t n = 0; n < 60; ++n) {
    const double k = kappa_sequence(1.0, n);
    EXPECT_GE(k, prev);
    EXPECT_LE(2 - k, std::ldexp(1.0, -static_cast<int>(n)));
    prev = k;
  }
  EXPECT_THROW(kappa_sequence(0.0, 1), DomainError);
}

namespace {

TruncationSpec sub_spec(FieldPtr f, double r, double s, double l = 0, double h = 0) {
  TruncationSpec t;
  t.field = std::move(f);
  t.r = {r}, t.s = {s};
  if (l > 0) t.l = {l}, t.h = {h};
  return t;
}

}  // namespace

TEST(TruncationEnergy, EmptyLevelSets) {
  auto d = line(101);
  auto u = GridFunction::from_function(d, [](const GridDomain::Point& x) { return x[0] * (1 - x[0]); });
  auto spec = sub_spec(constant(3, 1.5, 1.8, 1.0), 2.0, 2.5);
  for (std::size_t n = 0; n < 5; ++n) EXPECT_EQ(truncation_energy(u, spec, Regime::SubcriticalD, 0.3, n).X, 0.0);
}

TEST(TruncationEnergy, StepFunction) {
  // u = 2 kappa on nodes 30..60, zero elsewhere
  auto d = line(101);
  std::vector<double> v(101, 0.0);
  const double k = 0.8;
  for (int i = 30; i <= 60; ++i) v[i] = 2 * k;
  GridFunction u(d, v);
  const double r = 2.0, s = 2.5;
  auto e = truncation_energy(u, sub_spec(constant(3, 1.5, 1.8, 1.0), r, s), Regime::SubcriticalD, k, 0);
  const double m = e.level.measure;
  EXPECT_NEAR(m, 31 * 0.01, 1e-14);
  EXPECT_NEAR(e.Z, m * (std::pow(k, r) + std::pow(k, s)), 1e-14);
  EXPECT_EQ(e.Y, 0.0);
}

TEST(TruncationEnergy, Errors) {
  auto d = line(11);
  GridFunction u(d);
  auto f = constant(3, 1.5, 1.8, 1.0);
  TruncationSpec none;
  none.field = f;
  EXPECT_THROW(truncation_energy(u, none, Regime::SubcriticalD, 1, 0), HypothesisError);
  EXPECT_THROW(truncation_energy(u, sub_spec(f, 2.0, 2.5), Regime::SubcriticalN, 1, 0), HypothesisError);
  // r outside (p, p*)
  EXPECT_THROW(truncation_energy(u, sub_spec(f, 3.5, 2.5), Regime::SubcriticalD, 1, 0), HypothesisError);
  EXPECT_NO_THROW(truncation_energy(u, none, Regime::CriticalN, 1, 0));
}

TEST(TruncationEnergy, InvariantsOnRandomFunctions) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> U(0, 1);
  auto d = std::make_shared<GridDomain>(GridDomain::unit_box(2, 17));
  auto f = constant(3, 1.5, 1.8, 0.7);
  const auto spec = TruncationSpec::midpoint(f);
  for (int k = 0; k < 40; ++k) {
    std::vector<double> v(d->size());
    const double amp = std::pow(10.0, 2 * U(rng) - 1);
    for (auto& x : v) x = amp * (2 * U(rng) - 1);
    GridFunction u(d, v);
    for (Regime r : {Regime::SubcriticalD, Regime::SubcriticalN, Regime::CriticalD, Regime::CriticalN}) {
      const double ks = amp * (0.05 + 0.5 * U(rng));
      auto run = run_kappa(u, spec, r, ks, 30);
      EXPECT_TRUE(run.invariants.ok()) << to_string(r) << " " << run.invariants.min_measure_slack << " "
                                       << run.invariants.min_est_u_slack;
      for (std::size_t n = 0; n + 1 < run.steps.size(); ++n) {
        EXPECT_LE(run.steps[n + 1].Z, run.steps[n].Z);
        EXPECT_LE(run.steps[n + 1].Y, run.steps[n].Y);
      }
    }
  }
}

TEST(KappaStar, HandValues) {
  BoundConstants c;
  c.C13 = 0.25, c.b = 2, c.mu1 = c.mu2 = 1, c.delta1 = c.delta2 = 1;
  EXPECT_NEAR(kappa_star_dirichlet(1.0, c).value, 2.0, 1e-14);
  auto z = kappa_star_dirichlet(0.0, c);
  EXPECT_EQ(z.value, 0.0);
  EXPECT_TRUE(z.degenerate);
  EXPECT_THROW(kappa_star_dirichlet(-1.0, c), DomainError);
}

namespace {

BoundConstants random_constants(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0, 1);
  BoundConstants c;
  c.C13 = std::pow(10.0, 4 * U(rng) - 2);
  c.b = 1.01 + std::pow(10.0, 3 * U(rng));
  c.mu1 = 0.01 + 3 * U(rng);
  c.mu2 = c.mu1 * (1 + 5 * U(rng));
  c.delta1 = 0.01 + 3 * U(rng);
  c.delta2 = c.delta1 * (1 + 5 * U(rng));
  return c;
}

}  // namespace

TEST(KappaStar, MonotoneInModular) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 200; ++k) {
    auto c = random_constants(rng);
    double prev = 0;
    for (double I = 1e-6; I < 1e6; I *= 3.7) {
      const double v = kappa_star_dirichlet(I, c).value;
      EXPECT_GE(v, prev);
      prev = v;
    }
  }
}

TEST(KappaStar, SatisfiesBothConditions) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(0, 1);
  for (int k = 0; k < 1000; ++k) {
    auto c = random_constants(rng);
    const double I = std::pow(10.0, 8 * U(rng) - 4);
    const double ks = kappa_star_dirichlet(I, c).value;
    auto cond = kappa_conditions(ks, I, c);
    EXPECT_TRUE(cond.ok()) << cond.slack1 << " " << cond.slack2;
  }
}

TEST(KappaStar, SeedBecomesAdmissible) {
  // with K = C13 (k^{-mu1} + k^{-mu2}) and exponents delta, int Psi is below the second threshold
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> U(0, 1);
  for (int k = 0; k < 500; ++k) {
    auto c = random_constants(rng);
    const double I = std::pow(10.0, 4 * U(rng) - 2);
    const double ks = kappa_star_dirichlet(I, c).value;
    if (!std::isfinite(ks) || ks == 0) continue;
    RecursionParams p{c.C13 * (std::pow(ks, -c.mu1) + std::pow(ks, -c.mu2)), c.b, c.delta1, c.delta2};
    if (!(p.K > 0) || !std::isfinite(p.K)) continue;
    auto t = recursion_thresholds(p);
    EXPECT_LE(std::log(I), t.log_T2 * (1 - 1e-12) + 1e-12 * (1 + std::abs(t.log_T2)));
  }
}

TEST(RecursionConstants, HandCase) {
  auto f = constant(3, 1.5, 1.8, 1.0);
  auto c = derive_recursion_constants(*f, 2.0, 2.0, 3.0, 3.0);
  // gamma1 = 1/3, gamma2 = 1, eps = 1/2, D = 11/2
  EXPECT_NEAR(c.mu1, 2.0 / 11, 1e-14);
  EXPECT_NEAR(c.mu2, 4 + 2.0 / 11, 1e-14);
  EXPECT_NEAR(c.b, std::exp2(10 + 2.0 / 11), 1e-9);
  EXPECT_NEAR(c.delta1, 1.0 / 3 + 1.0 / 11, 1e-14);
  EXPECT_NEAR(c.delta2, 1 + 1.0 / 11, 1e-14);
  EXPECT_NEAR(c.tau1, c.delta1 / c.mu2, 1e-14);
  EXPECT_NO_THROW(c.validate());
  EXPECT_THROW(derive_recursion_constants(*f, 1.4, 2.0, 3.0, 3.0), HypothesisError);
  EXPECT_THROW(derive_recursion_constants(*f, 2.0, 3.0, 3.0, 3.0), HypothesisError);
}

TEST(BoundEstimate, Values) {
  BoundConstants c;
  EXPECT_EQ(bound_estimate(0.0, std::nullopt, c, Regime::SubcriticalD), 0.0);
  EXPECT_EQ(bound_estimate(3.0, std::nullopt, c, Regime::SubcriticalD), 3.0);
  c.C = 2, c.tau1 = 0.5, c.tau2 = 2;
  EXPECT_NEAR(bound_estimate(0.25, std::nullopt, c, Regime::CriticalD), 2 * 0.5, 1e-15);
  EXPECT_NEAR(bound_estimate(3.0, std::nullopt, c, Regime::CriticalD), 2 * 9.0, 1e-13);
  EXPECT_THROW(bound_estimate(1.0, std::nullopt, c, Regime::SubcriticalN), HypothesisError);
  EXPECT_NEAR(bound_estimate(1.0, 2.0, c, Regime::SubcriticalN), 18.0, 1e-13);
}

TEST(BoundEstimate, DirichletDefaultsDominateTwoKappa) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> U(0, 1);
  for (int k = 0; k < 500; ++k) {
    auto c = random_constants(rng);
    const double lo = 1.2 + 2 * U(rng), hi = lo + 3 * U(rng);
    auto bc = dirichlet_bound_constants(c, lo, hi);
    const double n = std::pow(10.0, 2 * U(rng) - 1);
    // any modular allowed by the norm
    const double I = std::max(std::pow(n, lo), std::pow(n, hi)) * U(rng);
    if (I == 0) continue;
    const double two_k = 2 * kappa_star_dirichlet(I, c).value;
    if (!std::isfinite(two_k)) continue;
    EXPECT_GE(bound_estimate(n, std::nullopt, bc, Regime::SubcriticalD), two_k * (1 - 1e-12));
  }
}

TEST(EmpiricalIteration, LargeKappaTrivial) {
  auto d = line(201);
  auto u = GridFunction::from_function(d, [](const GridDomain::Point& x) { return std::sin(M_PI * x[0]); });
  auto spec = TruncationSpec::midpoint(constant(3, 1.5, 1.8, 1.0));
  for (double ks : {1.01, 2.0, 10.0}) {
    auto run = run_kappa(u, spec, Regime::SubcriticalD, ks, 20);
    for (auto& s : run.steps) EXPECT_EQ(s.X, 0.0);
    EXPECT_TRUE(run.decays);
  }
}

TEST(EmpiricalIteration, FindsKappaAndBoundsMax) {
  auto d = line(401);
  auto u = GridFunction::from_function(d, [](const GridDomain::Point& x) { return 3 * x[0] * (1 - x[0]); });
  auto spec = TruncationSpec::midpoint(constant(3, 1.5, 1.8, 1.0));
  for (Regime r : {Regime::SubcriticalD, Regime::CriticalD, Regime::SubcriticalN, Regime::CriticalN}) {
    auto two = empirical_iteration_two_sided(u, spec, r);
    ASSERT_TRUE(two.upper.chosen.has_value()) << to_string(r);
    EXPECT_TRUE(two.pass());
    EXPECT_LE(u.max(), 2 * two.upper.chosen->kappa_star + 1e-12);
    // the next grid value down does not decay: the choice is tight to one grid step
    EXPECT_GE(2 * two.upper.chosen->kappa_star * 1.13, u.max());
    EXPECT_TRUE(two.upper.chosen->invariants.ok());
    EXPECT_LE(two.upper.candidates_tried, 12u);
  }
}

TEST(EmpiricalIteration, NoCandidate) {
  auto d = line(101);
  auto u = GridFunction::from_function(d, [](const GridDomain::Point& x) { return 5 * x[0] * (1 - x[0]); });
  auto spec = TruncationSpec::midpoint(constant(3, 1.5, 1.8, 1.0));
  auto rep = empirical_iteration(u, spec, Regime::SubcriticalD, {0.01, 0.1});
  EXPECT_FALSE(rep.chosen.has_value());
  EXPECT_FALSE(rep.diagnostics.empty());
}
