#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "biax/biax.hpp"

namespace biax::testing {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline GridPtr square_grid(int n, double l = kTwoPi) { return make_grid(n, n, l, l); }

inline ScalarField sample(const GridPtr& g, const std::function<double(double, double)>& f) {
  ScalarField s(g);
  for (int j = 0; j < g->ny(); ++j)
    for (int i = 0; i < g->nx(); ++i) s[g->index(i, j)] = f(g->x(i), g->y(j));
  return s;
}

inline ScalarField random_scalar(const GridPtr& g, std::uint64_t seed, int band = 3, double amp = 1.0) {
  std::mt19937_64 rng(seed);
  return random_smooth_scalar(g, rng, band, amp);
}

inline Vec3Field random_vec3(const GridPtr& g, std::uint64_t seed, int band = 3) {
  std::mt19937_64 rng(seed);
  Vec3Field u(g);
  for (auto& c : u.c) c = random_smooth_scalar(g, rng, band, 1.0).values;
  return u;
}

inline VelocityField random_planar(const GridPtr& g, std::uint64_t seed, int band = 3) {
  std::mt19937_64 rng(seed);
  VelocityField w(g);
  for (auto& c : w.c) c = random_smooth_scalar(g, rng, band, 1.0).values;
  return w;
}

/// Random smooth frame plus divergence-free velocity.
inline SimState random_state(const GridPtr& g, std::uint64_t seed, int band = 3, double frame_amp = 0.5,
                             double vel_amp = 0.3) {
  std::mt19937_64 rng(seed);
  SimState s;
  s.p = random_smooth_frame(g, rng, band, frame_amp);
  s.v = vel_amp > 0.0 ? random_smooth_velocity(g, rng, band, vel_amp) : VelocityField(g);
  return s;
}

inline double max_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

inline double max_diff(const FrameField& a, const FrameField& b) {
  double m = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int c = 0; c < 3; ++c) m = std::max(m, max_diff(a.n[i].c[c], b.n[i].c[c]));
  return m;
}

inline double max_diff(const VelocityField& a, const VelocityField& b) {
  return std::max(max_diff(a.c[0], b.c[0]), max_diff(a.c[1], b.c[1]));
}

inline Mat3 random_mat(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Mat3 m{};
  for (auto& row : m)
    for (auto& x : row) x = nd(rng);
  return m;
}

inline Frame random_frame(std::mt19937_64& rng) { return rotate_frame(Frame{}, random_rotation_vector(rng)); }

inline ElasticCoefficients anisotropic_coefficients() {
  return derive_coefficients({1.3, 1.1, 1.7, 2.0, 1.5, 1.9, 2.3, 1.2, 2.6, 1.4, 2.9, 1.8});
}

}  // namespace biax::testing
