#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace biax;
using namespace biax::testing;

TEST(Grid, RejectsOddOrTinySizes) {
  EXPECT_THROW(make_grid(7, 8, 1.0, 1.0), ValidationError);
  EXPECT_THROW(make_grid(8, 6, 1.0, 1.0), ValidationError);
  EXPECT_THROW(make_grid(9, 9, 1.0, 1.0), ValidationError);
  EXPECT_NO_THROW(make_grid(8, 8, 1.0, 1.0));
}

TEST(Grid, WavenumberOrdering) {
  const auto g = make_grid(8, 12, 2.0, 3.0);
  const double dkx = kTwoPi / 2.0, dky = kTwoPi / 3.0;
  // first row: i = 0..nx/2
  for (int i = 0; i <= 4; ++i) EXPECT_DOUBLE_EQ(g->kx(i), i * dkx);
  // ky over rows j: 0..ny/2, then -ny/2+1..-1
  const int expect[12] = {0, 1, 2, 3, 4, 5, 6, -5, -4, -3, -2, -1};
  for (int j = 0; j < 12; ++j) EXPECT_DOUBLE_EQ(g->ky(static_cast<std::size_t>(j) * g->nx_half()), expect[j] * dky);
}

TEST(Ddx, ConstantHasZeroDerivative) {
  const auto g = square_grid(32);
  const ScalarField c = sample(g, [](double, double) { return 3.7; });
  EXPECT_LE(max_abs(ddx(c, 1).values), 1e-13);
  EXPECT_LE(max_abs(ddx(c, 2).values), 1e-13);
}

TEST(Ddx, SineMode) {
  const double lx = 3.0;
  const auto g = make_grid(32, 16, lx, 2.0);
  const double k = kTwoPi / lx;
  const ScalarField f = sample(g, [&](double x, double) { return std::sin(k * x); });
  const ScalarField want = sample(g, [&](double x, double) { return k * std::cos(k * x); });
  EXPECT_LE(max_diff(ddx(f, 1).values, want.values) / k, 1e-12);
  EXPECT_LE(max_abs(ddx(f, 2).values), 1e-12);
}

TEST(Ddx, MixedPartialsCommute) {
  const auto g = square_grid(48);
  const ScalarField f = random_scalar(g, 1);
  const ScalarField xy = ddx(ddx(f, 1), 2), yx = ddx(ddx(f, 2), 1);
  // oracle: multiply by -kx ky directly
  Spectrum h = g->forward(f.values);
  for (std::size_t s = 0; s < h.size(); ++s) h[s] *= -g->kx(s) * g->ky(s) * g->mask(s);
  const auto oracle = g->inverse(h);
  const double scale = max_abs(oracle);
  EXPECT_LE(max_diff(xy.values, yx.values) / scale, 1e-12);
  EXPECT_LE(max_diff(xy.values, oracle) / scale, 1e-12);
}

TEST(Ddx, NyquistDerivativeIsZeroed) {
  const auto g = square_grid(16);
  const ScalarField f = sample(g, [&](double x, double) { return std::cos(8.0 * x); });
  EXPECT_LE(max_abs(ddx(f, 1).values), 1e-12);
}

TEST(Curl3, ConstantAndSineMode) {
  const auto g = square_grid(32);
  Vec3Field u(g);
  for (auto& c : u.c) std::fill(c.begin(), c.end(), 2.0);
  const Vec3Field cu = curl3(u);
  for (const auto& c : cu.c) EXPECT_LE(max_abs(c), 1e-13);

  Vec3Field s(g);
  s.c[2] = sample(g, [](double x, double) { return std::sin(x); }).values;
  const Vec3Field cs = curl3(s);
  const ScalarField want = sample(g, [](double x, double) { return -std::cos(x); });
  EXPECT_LE(max_abs(cs.c[0]), 1e-13);
  EXPECT_LE(max_diff(cs.c[1], want.values), 1e-12);
  EXPECT_LE(max_abs(cs.c[2]), 1e-13);
}

TEST(Curl3, DivergenceOfCurlVanishes) {
  const auto g = square_grid(48);
  const Vec3Field u = random_vec3(g, 5);
  EXPECT_LE(max_abs(div3(curl3(u)).values), 1e-10);
}

TEST(Leray, FixesDivergenceFreeFields) {
  const auto g = square_grid(32);
  std::mt19937_64 rng(3);
  const VelocityField v = random_smooth_velocity(g, rng, 3, 1.0);
  EXPECT_LE(max_diff(leray_project(v), v), 1e-12);
}

TEST(Leray, KillsGradients) {
  const auto g = square_grid(32);
  const ScalarField phi = random_scalar(g, 4);
  VelocityField w(g);
  w.c[0] = ddx(phi, 1).values;
  w.c[1] = ddx(phi, 2).values;
  const VelocityField P = leray_project(w);
  EXPECT_LE(std::max(max_abs(P.c[0]), max_abs(P.c[1])), 1e-12);
}

TEST(Leray, IdempotentDivergenceFreeMeanPreservingContraction) {
  const auto g = square_grid(48);
  VelocityField w = random_planar(g, 8);
  for (auto& x : w.c[0]) x += 0.7;  // nonzero mean
  const VelocityField P = leray_project(w), PP = leray_project(P);
  const double nw = l2_norm(w);
  EXPECT_LE(l2_norm(P) - nw, 1e-12 * nw);
  double d = 0.0;
  for (int a = 0; a < 2; ++a)
    for (std::size_t k = 0; k < P.size(); ++k) d += (PP.c[a][k] - P.c[a][k]) * (PP.c[a][k] - P.c[a][k]);
  EXPECT_LE(std::sqrt(d * g->cell_area()), 1e-12 * nw);
  EXPECT_LE(spectral_l2_norm(divergence(P)), 1e-10 * nw);
  EXPECT_NEAR(mean(ScalarField(g, P.c[0])), mean(ScalarField(g, w.c[0])), 1e-13);
  EXPECT_NEAR(mean(ScalarField(g, P.c[1])), mean(ScalarField(g, w.c[1])), 1e-13);
}

TEST(Mollify, SymbolShape) {
  EXPECT_EQ(mollifier_symbol(0.0), 1.0);
  EXPECT_EQ(mollifier_symbol(1.0), 1.0);
  EXPECT_NEAR(mollifier_symbol(1.5), 0.5, 1e-15);
  EXPECT_EQ(mollifier_symbol(2.0), 0.0);
  EXPECT_EQ(mollifier_symbol(5.0), 0.0);
  double prev = 1.0;
  for (double r = 0.0; r < 2.5; r += 0.01) {
    EXPECT_LE(mollifier_symbol(r), prev + 1e-15);
    prev = mollifier_symbol(r);
  }
}

TEST(Mollify, IdentityOnResolvedBand) {
  const auto g = square_grid(32);
  const ScalarField f = random_scalar(g, 11, 12);
  EXPECT_LE(max_diff(mollify(f, g->max_wavenumber()).values, f.values), 1e-12);
}

TEST(Mollify, KillsModesBeyondTwiceCutoff) {
  const auto g = square_grid(32);
  const ScalarField f = sample(g, [](double x, double y) { return std::cos(6.0 * x) * std::sin(3.0 * y); });
  const double kmod = std::sqrt(36.0 + 9.0);
  EXPECT_LE(max_abs(mollify(f, kmod / 3.0).values), 1e-13);
}

TEST(Mollify, LinearSelfAdjointContraction) {
  const auto g = square_grid(32);
  const ScalarField f = random_scalar(g, 12, 10), h = random_scalar(g, 13, 10);
  const double cut = 4.0;
  const ScalarField Jf = mollify(f, cut), Jh = mollify(h, cut);
  EXPECT_LE(l2_norm(Jf), l2_norm(f) * (1.0 + 1e-14));
  EXPECT_NEAR(inner(Jf, h), inner(f, Jh), 1e-12 * l2_norm(f) * l2_norm(h));
  ScalarField sum(g);
  for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = 2.0 * f[k] - 3.0 * h[k];
  const ScalarField Js = mollify(sum, cut);
  for (std::size_t k = 0; k < sum.size(); ++k) EXPECT_NEAR(Js[k], 2.0 * Jf[k] - 3.0 * Jh[k], 1e-12);
  EXPECT_THROW(mollify(f, 0.0), Error);
}

TEST(InvertLaplacian, ZeroAndEigenfunction) {
  const double lx = 3.0;
  const auto g = make_grid(32, 32, lx, lx);
  const ScalarField z(g);
  EXPECT_LE(max_abs(invert_laplacian(z).values), 0.0);
  const double k = kTwoPi / lx;
  const ScalarField f = sample(g, [&](double x, double) { return std::sin(k * x); });
  const ScalarField want = sample(g, [&](double x, double) { return -std::sin(k * x) / (k * k); });
  EXPECT_LE(max_diff(invert_laplacian(f).values, want.values), 1e-12);
}

TEST(InvertLaplacian, RoundTripRecoversZeroMeanPart) {
  const auto g = square_grid(32);
  ScalarField f = random_scalar(g, 14, 6);
  for (auto& x : f.values) x += 1.25;
  const ScalarField lu = laplacian(invert_laplacian(f));
  const double m = mean(f);
  double worst = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) worst = std::max(worst, std::abs(lu[k] - (f[k] - m)));
  EXPECT_LE(worst, 1e-10);
  EXPECT_NEAR(mean(invert_laplacian(f)), 0.0, 1e-13);
}

TEST(Parseval, GridAndSpectralNormsAgree) {
  const auto g = make_grid(32, 48, 2.0, 5.0);
  const ScalarField f = random_scalar(g, 15, 8);
  EXPECT_NEAR(spectral_l2_norm(f), l2_norm(f), 1e-12 * l2_norm(f));
}

TEST(Reductions, FiniteChecks) {
  const auto g = square_grid(8);
  ScalarField f(g);
  EXPECT_TRUE(all_finite(f.values));
  f[3] = std::nan("");
  EXPECT_FALSE(all_finite(f.values));
}
