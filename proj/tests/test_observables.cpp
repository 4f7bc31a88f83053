#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "shadowgpe/observables.hpp"
#include "shadowgpe/spatialop.hpp"

using namespace shadowgpe;

namespace {

ComplexField random_field(std::size_t n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> d;
  ComplexField f(n);
  for (auto& z : f) z = {d(gen), d(gen)};
  return f;
}

}  // namespace

TEST(Mass, ZeroAndSingleNode) {
  const Grid g = build_grid({{0, 1}}, {3});
  EXPECT_EQ(mass(g, ComplexField(1)), 0.0);
  EXPECT_DOUBLE_EQ(mass(g, ComplexField{1.0}), std::sqrt(0.5));
  EXPECT_THROW(mass(g, ComplexField(2)), std::invalid_argument);
}

TEST(GradientSq, MatchesLaplacianForm) {
  const Grid g = build_grid({{-1, 1}, {0, 3}}, {11, 17});
  const auto L = laplacian(g);
  const auto u = random_field(g.size(), 7);
  const double lhs = gradient_sq(g, u);
  const double rhs = -inner(g, L.apply(u), u).real();
  EXPECT_NEAR(lhs, rhs, 1e-12 * std::abs(rhs));
}

TEST(Energy, Zero) {
  const Grid g = build_grid({{-1, 1}, {-1, 1}}, {7, 7});
  const RealField v(g.size(), 3.0);
  EXPECT_EQ(energy(g, ComplexField(g.size()), v, 10.0), 0.0);
}

TEST(Energy, DirichletEigenfunction) {
  const Grid g = build_grid({{0, std::numbers::pi}}, {65});
  ComplexField psi = eval_on_grid(g, [](const Point& p) { return cplx(std::sin(p[0])); });
  const double m = mass(g, psi);
  for (auto& z : psi) z /= m;
  const RealField v(g.size(), 0.0);
  // Discrete eigenvalue of -Lap_h for sin(x): (4/h^2) sin^2(h/2).
  const double h = g.spacing(0);
  const double lambda_h = 4.0 / (h * h) * std::pow(std::sin(h / 2), 2);
  const double e = energy(g, psi, v, 0.0);
  EXPECT_NEAR(e, 0.5 * lambda_h, 1e-12);
  EXPECT_NEAR(e, 0.5, 1e-3);
}

TEST(Energy, PotentialAndInteractionTerms) {
  const Grid g = build_grid({{0, 1}}, {3});
  const RealField v{2.0};
  const ComplexField psi{cplx(0, 2)};
  // w = 0.5; gradient edges (0 - 2i)/h and (2i - 0)/h with h = 0.5 -> 2 * 0.5 * 16 = 16.
  const double expect = 0.5 * 16.0 + 0.5 * 2.0 * 4.0 + 0.5 * 3.0 / 2.0 * 16.0;
  EXPECT_NEAR(energy(g, psi, v, 3.0), expect, 1e-13);
}

TEST(Eta, ZeroForEqualFields) {
  const Grid g = build_grid({{-1, 1}, {-1, 1}}, {9, 9});
  const auto u = random_field(g.size(), 1);
  const RealField v(g.size(), 1.0);
  EXPECT_EQ(eta(g, u, u, v, 5.0), 0.0);
  const auto w = random_field(g.size(), 2);
  EXPECT_NEAR(eta(g, u, w, v, 5.0), std::abs(energy(g, u, v, 5.0) - energy(g, w, v, 5.0)), 1e-12);
}

TEST(ErrorNorms, EqualFields) {
  const Grid g = build_grid({{0, 1}}, {9});
  const auto u = random_field(g.size(), 3);
  const auto e = error_norms(g, u, u);
  EXPECT_EQ(e.l2, 0.0);
  EXPECT_EQ(e.h1, 0.0);
}

TEST(ErrorNorms, SingleNodeBump) {
  const Grid g = build_grid({{0, 2}}, {5});  // h = 0.5, three interior nodes
  const ComplexField ref(3);
  const ComplexField psi{0.0, 1.0, 0.0};
  const auto e = error_norms(g, psi, ref);
  EXPECT_NEAR(e.l2, std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(e.h1, std::sqrt(4.5), 1e-14);
  EXPECT_THROW(error_norms(g, psi, ComplexField(2)), std::invalid_argument);
}

TEST(ExtendedEnergy, ReducesToEnergyAtRest) {
  const Grid g = build_grid({{-2, 2}, {-2, 2}}, {15, 15});
  const auto u = random_field(g.size(), 4);
  const RealField v = eval_real_on_grid(g, harmonic_trap(2, 1));
  for (double mu : {0.0, 0.3, 7.0}) {
    const ExtendedEnergyParams p{mu, 40.0};
    EXPECT_NEAR(extended_energy(g, u, u, u, 0.01, p, v, 10.0), energy(g, u, v, 10.0), 1e-10);
  }
  const ComplexField z(g.size());
  EXPECT_EQ(extended_energy(g, z, z, z, 0.01, {1.0, 3.0}, v, 10.0), 0.0);
}

TEST(ExtendedEnergy, HandComputedSingleNode) {
  const Grid g = build_grid({{0, 1}}, {3});  // w = h = 0.5
  const RealField v{1.5};
  const ComplexField psi{2.0}, phi{1.0}, prev{0.5};
  const double tau = 0.1, mu = 0.2, omega = 3.0, kappa = 4.0;
  const double w = 0.5, h = 0.5;
  const double grad = 0.5 * 2.0 * w * std::pow(1.0 / h, 2);  // two boundary edges of phi
  const double kinetic = mu / 2 * std::pow((1.0 - 0.5) / tau, 2) * w;
  const double pot = 1.5 * 4.0 * w;
  const double spring = mu * omega * omega / 2 * 1.0 * w;
  const double inter = 0.5 * kappa * 1.0 * 9.0 * w;
  EXPECT_NEAR(extended_energy(g, psi, phi, prev, tau, {mu, omega}, v, kappa), grad + kinetic + pot + spring + inter,
              1e-12);
  EXPECT_THROW(extended_energy(g, psi, phi, prev, 0.0, {mu, omega}, v, kappa), std::invalid_argument);
}
