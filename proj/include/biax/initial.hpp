#pragma once

// Initial-condition library. Frames are built by rotating a reference frame
// by a smooth rotation-vector field, so they are orthonormal to roundoff.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "biax/errors.hpp"
#include "biax/frame.hpp"
#include "biax/grid.hpp"
#include "biax/integrator.hpp"

namespace biax {

struct InitialSpec {
  std::string frame = "uniform";  // uniform | twist | biaxial_bump | random_smooth
  double frame_amplitude = 0.5;
  int frame_mode = 1;
  double frame_width = 0.5;
  std::string velocity = "zero";  // zero | taylor_green | random_smooth
  double velocity_amplitude = 0.1;
  int band = 3;
  std::uint64_t seed = 42;
};

/// Smooth random periodic scalar: sum over modes 0 < |m| <= band of Gaussian
/// coefficients, scaled so the rms is about `amplitude`.
inline ScalarField random_smooth_scalar(const GridPtr& g, std::mt19937_64& rng, int band, double amplitude) {
  std::normal_distribution<double> nd(0.0, 1.0);
  struct Mode {
    int mx, my;
    double a, b;
  };
  std::vector<Mode> modes;
  for (int mx = 0; mx <= band; ++mx)
    for (int my = -band; my <= band; ++my) {
      if (mx * mx + my * my == 0 || mx * mx + my * my > band * band) continue;
      if (mx == 0 && my < 0) continue;
      const double a = nd(rng), b = nd(rng);
      modes.push_back({mx, my, a, b});
    }
  const double scale = modes.empty() ? 0.0 : amplitude * std::sqrt(2.0 / static_cast<double>(modes.size()));
  ScalarField f(g);
  const double tx = 2.0 * std::numbers::pi / g->lx(), ty = 2.0 * std::numbers::pi / g->ly();
  for (int j = 0; j < g->ny(); ++j)
    for (int i = 0; i < g->nx(); ++i) {
      double s = 0.0;
      for (const auto& m : modes) {
        const double ph = m.mx * tx * g->x(i) + m.my * ty * g->y(j);
        s += m.a * std::cos(ph) + m.b * std::sin(ph);
      }
      f[g->index(i, j)] = scale * s;
    }
  return f;
}

inline Vec3 random_rotation_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  return {nd(rng), nd(rng), nd(rng)};
}

/// Frame field R(theta(x)) applied to a reference frame.
inline FrameField frame_from_rotation(const GridPtr& g, const Frame& ref, const std::function<Vec3(double, double)>& theta) {
  FrameField p(g);
  for (int j = 0; j < g->ny(); ++j)
    for (int i = 0; i < g->nx(); ++i) p.set(g->index(i, j), rotate_frame(ref, theta(g->x(i), g->y(j))));
  return p;
}

inline FrameField random_smooth_frame(const GridPtr& g, std::mt19937_64& rng, int band, double amplitude) {
  const Frame ref = rotate_frame(Frame{}, random_rotation_vector(rng));
  std::array<ScalarField, 3> th{random_smooth_scalar(g, rng, band, amplitude), random_smooth_scalar(g, rng, band, amplitude),
                                random_smooth_scalar(g, rng, band, amplitude)};
  FrameField p(g);
  for (std::size_t k = 0; k < p.size(); ++k) p.set(k, rotate_frame(ref, {th[0][k], th[1][k], th[2][k]}));
  return p;
}

/// Divergence-free, dealiased velocity from a random streamfunction; rms about `amplitude`.
inline VelocityField random_smooth_velocity(const GridPtr& g, std::mt19937_64& rng, int band, double amplitude) {
  const ScalarField psi = random_smooth_scalar(g, rng, band, 1.0);
  VelocityField v(g);
  v.c[0] = ddx(psi, 2).values;
  v.c[1] = ddx(psi, 1).values;
  for (auto& x : v.c[1]) x = -x;
  const double rms = std::sqrt(inner(v, v) / g->area());
  if (rms > 0.0)
    for (auto& c : v.c)
      for (auto& x : c) x *= amplitude / rms;
  return leray_project(dealias(v));
}

inline FrameDirection random_smooth_direction(const GridPtr& g, std::mt19937_64& rng, int band) {
  FrameDirection d{Vec3Field(g), Vec3Field(g), Vec3Field(g)};
  for (auto& f : d)
    for (auto& c : f.c) c = random_smooth_scalar(g, rng, band, 1.0).values;
  return d;
}

inline SimState make_initial(const InitialSpec& spec, const GridPtr& g) {
  SimState s;
  s.p = FrameField(g);
  s.v = VelocityField(g);
  std::mt19937_64 rng(spec.seed);
  const double lx = g->lx(), ly = g->ly();
  const double two_pi = 2.0 * std::numbers::pi;

  if (spec.frame == "uniform") {
    s.p = uniform_frame_field(g);
  } else if (spec.frame == "twist") {
    const double amp = spec.frame_amplitude;
    const int m = spec.frame_mode;
    s.p = frame_from_rotation(g, Frame{}, [&](double x, double) {
      return Vec3{0.0, 0.0, amp * std::sin(m * two_pi * x / lx)};
    });
  } else if (spec.frame == "biaxial_bump") {
    if (!(spec.frame_width > 0.0)) throw SpecError("biaxial_bump: width must be positive");
    const double amp = spec.frame_amplitude, w = spec.frame_width;
    const Vec3 axis = (1.0 / std::sqrt(3.0)) * Vec3{1.0, 1.0, 1.0};
    s.p = frame_from_rotation(g, Frame{}, [&](double x, double y) {
      // periodic surrogate of the squared distance to the domain centre
      const double sx = (lx / std::numbers::pi) * std::sin(std::numbers::pi * (x - 0.5 * lx) / lx);
      const double sy = (ly / std::numbers::pi) * std::sin(std::numbers::pi * (y - 0.5 * ly) / ly);
      return (amp * std::exp(-(sx * sx + sy * sy) / (2.0 * w * w))) * axis;
    });
  } else if (spec.frame == "random_smooth") {
    s.p = random_smooth_frame(g, rng, spec.band, spec.frame_amplitude);
  } else {
    throw SpecError("unknown frame preset '" + spec.frame + "'");
  }

  if (spec.velocity == "zero") {
  } else if (spec.velocity == "taylor_green") {
    const double kx = two_pi / lx, ky = two_pi / ly, kb = std::sqrt(kx * ky);
    const double a = spec.velocity_amplitude;
    for (int j = 0; j < g->ny(); ++j)
      for (int i = 0; i < g->nx(); ++i) {
        const double x = g->x(i), y = g->y(j);
        s.v.c[0][g->index(i, j)] = a * (ky / kb) * std::sin(kx * x) * std::cos(ky * y);
        s.v.c[1][g->index(i, j)] = -a * (kx / kb) * std::cos(kx * x) * std::sin(ky * y);
      }
    s.v = leray_project(dealias(s.v));
  } else if (spec.velocity == "random_smooth") {
    std::mt19937_64 vrng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
    s.v = random_smooth_velocity(g, vrng, spec.band, spec.velocity_amplitude);
  } else {
    throw SpecError("unknown velocity preset '" + spec.velocity + "'");
  }
  return s;
}

}  // namespace biax
