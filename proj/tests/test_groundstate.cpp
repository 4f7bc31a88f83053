#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "shadowgpe/groundstate.hpp"
#include "shadowgpe/observables.hpp"
#include "shadowgpe/spatialop.hpp"

using namespace shadowgpe;

namespace {

GroundStateParams harmonic_params(double kappa0 = 0.0, double omega = 0.0) {
  GroundStateParams p;
  p.potential = PotentialSpec::harmonic(1, 1);
  p.kappa0 = kappa0;
  p.omega = omega;
  return p;
}

}  // namespace

TEST(GroundState, ZeroFieldHasZeroEnergy) {
  const Grid g = build_grid({{-2, 2}, {-2, 2}}, {11, 11});
  EXPECT_EQ(energy0(g, ComplexField(g.size()), harmonic_params(10, 0.5)), 0.0);
}

TEST(GroundState, HarmonicOscillator) {
  const Grid g = build_grid({{-6, 6}, {-6, 6}}, {121, 121});
  const auto res = ground_state(g, harmonic_params());
  ASSERT_TRUE(res.converged);
  EXPECT_NEAR(res.energy, 1.0, 0.01);
  EXPECT_NEAR(mass(g, res.u), 1.0, 1e-12);
  // Gaussian profile: compare against exp(-r^2/2)/sqrt(pi), up to a global phase.
  const auto exact = eval_on_grid(g, [](const Point& p) {
    return cplx(std::exp(-0.5 * (p[0] * p[0] + p[1] * p[1])) / std::sqrt(M_PI));
  });
  const cplx phase = inner(g, exact, res.u);
  ComplexField diff = res.u;
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= exact[i] * phase / std::abs(phase);
  EXPECT_LT(mass(g, diff), 1e-2);
}

TEST(GroundState, GradientMatchesFiniteDifferences) {
  const Grid g = build_grid({{-3, 3}, {-3, 3}}, {13, 13});
  const GroundStateProblem prob(g, harmonic_params(25.0, 0.7));
  std::mt19937 gen(5);
  std::normal_distribution<double> d;
  ComplexField v(g.size()), dv(g.size());
  for (auto& z : v) z = {d(gen), d(gen)};
  for (auto& z : dv) z = {d(gen), d(gen)};
  const auto grad = prob.gradient(v);
  double analytic = 0;
  for (std::size_t i = 0; i < v.size(); ++i) analytic += (std::conj(dv[i]) * grad[i]).real();
  const double eps = 1e-6;
  ComplexField vp = v, vm = v;
  for (std::size_t i = 0; i < v.size(); ++i) {
    vp[i] += eps * dv[i];
    vm[i] -= eps * dv[i];
  }
  const double fd = (prob.energy(vp) - prob.energy(vm)) / (2 * eps);
  EXPECT_NEAR(fd, analytic, 1e-6 * std::abs(analytic));
}

TEST(GroundState, RotationTermIsReal) {
  const Grid g = build_grid({{-3, 3}, {-3, 3}}, {17, 17});
  const GroundStateProblem prob(g, harmonic_params(10.0, 0.8));
  ComplexField v = eval_on_grid(g, [](const Point& p) { return cplx(p[0] + 0.3, p[1] * p[0]) * std::exp(-p[0] * p[0]); });
  const cplx r = prob.rotation_term(v);
  EXPECT_NEAR(r.imag(), 0.0, 1e-12 * (1 + std::abs(r)));
}

TEST(GroundState, FlowIsMonotoneAndNormalized) {
  const Grid g = build_grid({{-6, 6}, {-6, 6}}, {41, 41});
  auto p = harmonic_params(50.0, 0.0);
  p.energy_tol = 1e-9;
  const auto res = ground_state(g, p);
  ASSERT_TRUE(res.converged);
  ASSERT_GE(res.energy_history.size(), 2u);
  for (std::size_t i = 1; i < res.energy_history.size(); ++i)
    EXPECT_LE(res.energy_history[i], res.energy_history[i - 1] + 1e-12);
  EXPECT_NEAR(mass(g, res.u), 1.0, 1e-12);
  EXPECT_NEAR(res.energy, energy0(g, res.u, p), 1e-12);
}

TEST(GroundState, StationaryUnderFurtherFlow) {
  const Grid g = build_grid({{-6, 6}, {-6, 6}}, {41, 41});
  auto p = harmonic_params(20.0, 0.0);
  const GroundStateProblem prob(g, p);
  const auto res = prob.solve();
  ASSERT_TRUE(res.converged);
  const auto next = prob.flow_step(res.u, p.sigma);
  EXPECT_NEAR(prob.energy(next), res.energy, 1e-8);
}

TEST(GroundState, SeedIsNormalized) {
  const Grid g = build_grid({{-6, 6}, {-6, 6}}, {31, 31});
  const GroundStateProblem prob(g, harmonic_params(100.0, 0.8));
  EXPECT_NEAR(mass(g, prob.seed()), 1.0, 1e-12);
}

TEST(Vortices, SyntheticFields) {
  const Grid g = build_grid({{-6, 6}, {-6, 6}}, {61, 61});
  const auto plain = eval_on_grid(g, [](const Point& p) { return cplx(std::exp(-0.1 * (p[0] * p[0] + p[1] * p[1]))); });
  EXPECT_EQ(count_vortices(g, plain), 0);
  const auto one = eval_on_grid(g, [](const Point& p) {
    return cplx(p[0] - 0.13, p[1] - 0.07) * std::exp(-0.1 * (p[0] * p[0] + p[1] * p[1]));
  });
  EXPECT_EQ(count_vortices(g, one), 1);
  const auto two = eval_on_grid(g, [](const Point& p) {
    return cplx(p[0] - 1.51, p[1] - 0.07) * cplx(p[0] + 1.49, p[1] + 0.03) *
           std::exp(-0.1 * (p[0] * p[0] + p[1] * p[1]));
  });
  EXPECT_EQ(count_vortices(g, two), 2);
}

TEST(Vortices, RotatingCondensateHasVortices) {
  const Grid g = build_grid({{-6, 6}, {-6, 6}}, {61, 61});
  GroundStateParams p = harmonic_params(100.0, 0.8);
  p.energy_tol = 1e-8;
  const auto res = ground_state(g, p);
  EXPECT_GE(count_vortices(g, res.u), 1);
  // Stirring lowers the energy below the non-rotating state of the same interaction.
  const auto still = ground_state(g, harmonic_params(100.0, 0.0));
  EXPECT_LT(res.energy, still.energy);
}
