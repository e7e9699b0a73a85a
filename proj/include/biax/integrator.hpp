#pragma once

// Method-of-lines time stepping.
//
// Frames: Runge-Kutta-Munthe-Kaas on SO(3). Every stage rotates the start
// frame by a rotation vector, and the step ends with one Rodrigues rotation,
// so the frame stays orthonormal to roundoff regardless of dt. Advection is
// folded into the rotation generator.
// Velocity: integrating-factor Runge-Kutta with exact treatment of eta*lap.
// The mollified (Friedrichs) system is stepped with the same tableaux, frames
// updated additively since its right-hand side is not a rotation.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "biax/elasticity.hpp"
#include "biax/errors.hpp"
#include "biax/frame.hpp"
#include "biax/grid.hpp"
#include "biax/hydro.hpp"

namespace biax {

struct Model {
  ElasticCoefficients elastic = one_constant_coefficients();
  HydroCoefficients hydro;
  /// Relative perturbation of beta_1 inside the stress only (fault injection).
  double stress_fault = 0.0;

  HydroCoefficients stress_coefficients() const {
    HydroCoefficients h = hydro;
    h.beta[1] *= 1.0 + stress_fault;
    return h;
  }
};

struct SimState {
  double t = 0.0;
  FrameField p;
  VelocityField v;
  long step_index = 0;
};

enum class Scheme { rk2, rk4 };

inline std::string scheme_name(Scheme s) { return s == Scheme::rk2 ? "explicit_rk2_lie" : "explicit_rk4_lie"; }

struct IntegratorConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::rk4;
  std::optional<double> mollify_cutoff;
  double cfl_safety = 0.5;
  /// Reproject every this many steps; 0 disables.
  int reprojection_interval = 1;
  /// Hold v = 0 (pure rotational gradient flow).
  bool freeze_velocity = false;
};

struct Tableau {
  std::vector<double> c;
  std::vector<std::vector<double>> a;
  std::vector<double> b;
};

inline const Tableau& tableau(Scheme s) {
  static const Tableau heun{{0.0, 1.0}, {{}, {1.0}}, {0.5, 0.5}};
  static const Tableau rk4{{0.0, 0.5, 0.5, 1.0}, {{}, {0.5}, {0.0, 0.5}, {0.0, 0.0, 1.0}},
                           {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0}};
  return s == Scheme::rk2 ? heun : rk4;
}

// ---------------------------------------------------------------------------

namespace detail {

/// Dealiased, Leray-projected velocity nonlinearity -adv(w) + div(sigma) + F in
/// spectral space; advection in skew-symmetric form.
inline std::array<Spectrum, 2> velocity_nonlinearity(const VelocityField& w, const StrainRotation& sr,
                                                     const TensorField& sig, const VelocityField& F) {
  const Grid2D& g = *w.grid;
  const std::size_t ns = g.spectral_size();
  const Complex I(0.0, 1.0);
  auto N = stress_divergence_spectral(sig);

  VelocityField conv(w.grid);
  std::vector<double> w11(w.size()), w12(w.size()), w22(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double a = w.c[0][k], b = w.c[1][k];
    const Mat3 kap = sr.A.m[k] + sr.Omega.m[k];
    conv.c[0][k] = a * kap[0][0] + b * kap[0][1];
    conv.c[1][k] = a * kap[1][0] + b * kap[1][1];
    w11[k] = a * a;
    w12[k] = a * b;
    w22[k] = b * b;
  }
  const Spectrum c0 = g.forward(conv.c[0]), c1 = g.forward(conv.c[1]);
  const Spectrum h11 = g.forward(w11), h12 = g.forward(w12), h22 = g.forward(w22);
  const Spectrum f0 = g.forward(F.c[0]), f1 = g.forward(F.c[1]);
  for (std::size_t s = 0; s < ns; ++s) {
    const double m = g.mask(s);
    const Complex dx = I * g.kx(s), dy = I * g.ky(s);
    const Complex div0 = dx * h11[s] + dy * h12[s];
    const Complex div1 = dx * h12[s] + dy * h22[s];
    N[0][s] = m * (N[0][s] - 0.5 * (c0[s] + div0) + f0[s]);
    N[1][s] = m * (N[1][s] - 0.5 * (c1[s] + div1) + f1[s]);
  }
  spectral::leray(g, N[0], N[1]);
  return N;
}

inline void check_finite(std::span<const double> f, const char* what) {
  if (!all_finite(f)) throw NonFinite(std::string("non-finite value in ") + what);
}

}  // namespace detail

/// Everything assembled from one state; consumed by the stepper, the energy
/// law checks and the diagnostics.
struct Evaluation {
  FrameDerivatives fd;
  MolecularFields h;
  RotationalDerivatives L;
  StrainRotation sr;
  TensorBasisField tb;
  AngularRates c;
  Vec3Field omega;      // sum c_k n_k
  Vec3Field omega_adv;  // generator whose rotation reproduces -(v.grad) n_i
  std::array<Vec3Field, 3> advect_p;
  std::array<Spectrum, 2> N;  // projected nonlinear velocity forcing
  VelocityField dvdt;
};

inline Evaluation evaluate(const SimState& s, const Model& model, bool freeze_velocity = false) {
  const FrameField& p = s.p;
  const GridPtr& gp = p.grid;
  const Grid2D& g = *gp;
  Evaluation ev;
  ev.fd = frame_derivatives(p);
  ev.h = molecular_fields_unchecked(p, ev.fd, model.elastic);
  ev.L = rotational_derivatives(p, ev.h);
  ev.sr = strain_rotation(s.v);
  ev.tb = tensor_basis_field_unchecked(p);
  ev.c = angular_rates(ev.sr, ev.tb, ev.L, model.hydro);

  ev.omega = Vec3Field(gp);
  ev.omega_adv = Vec3Field(gp);
  ev.advect_p = {Vec3Field(gp), Vec3Field(gp), Vec3Field(gp)};
  BIAX_PARALLEL_FOR
  for (std::size_t k = 0; k < p.size(); ++k) {
    const Frame f = p.at(k);
    ev.omega.set(k, ev.c[0][k] * f.n[0] + ev.c[1][k] * f.n[1] + ev.c[2][k] * f.n[2]);
    const double v1 = s.v.c[0][k], v2 = s.v.c[1][k];
    Vec3 oa{0, 0, 0};
    for (int i = 0; i < 3; ++i) {
      const Vec3 wi = v1 * ev.fd.at(i, 0, k) + v2 * ev.fd.at(i, 1, k);
      ev.advect_p[i].set(k, -wi);
      oa += cross(f.n[i], wi);
    }
    ev.omega_adv.set(k, -0.5 * oa);
  }

  ev.dvdt = VelocityField(gp);
  const std::size_t ns = g.spectral_size();
  if (freeze_velocity) {
    ev.N = {Spectrum(ns), Spectrum(ns)};
  } else {
    const TensorField sig = stress(ev.sr, ev.tb, ev.L, model.stress_coefficients());
    const VelocityField F = body_force(p, ev.fd, ev.L);
    ev.N = detail::velocity_nonlinearity(s.v, ev.sr, sig, F);
    for (int a = 0; a < 2; ++a) {
      Spectrum d = g.forward(s.v.c[a]);
      for (std::size_t q = 0; q < ns; ++q) d[q] = ev.N[a][q] - model.hydro.eta * g.k2(q) * g.mask(q) * d[q];
      g.inverse(d, ev.dvdt.c[a]);
    }
  }
  for (int a = 0; a < 3; ++a) detail::check_finite(ev.omega.c[a], "rotation rate");
  for (int a = 0; a < 3; ++a) detail::check_finite(ev.omega_adv.c[a], "advection");
  for (int a = 0; a < 2; ++a) detail::check_finite(ev.dvdt.c[a], "velocity tendency");
  return ev;
}

struct RhsResult {
  Vec3Field omega;
  std::array<Vec3Field, 3> advect_p;
  VelocityField dvdt;
};

inline RhsResult rhs(const SimState& s, const Model& model) {
  require_frame_field(s.p);
  Evaluation ev = evaluate(s, model);
  return {std::move(ev.omega), std::move(ev.advect_p), std::move(ev.dvdt)};
}

struct EnergyRate {
  double dEdt = 0.0;
  DissipationTerms D;
  /// |dE/dt + D| / max(D, floor)
  double residual = 0.0;
};

inline double residual_floor(double E) { return 1e-14 * std::max(1.0, std::abs(E)); }

/// Semi-discrete dE/dt of the system the stepper integrates, against -D.
inline EnergyRate energy_rate(const SimState& s, const Model& model, bool freeze_velocity = false) {
  const Evaluation ev = evaluate(s, model, freeze_velocity);
  const Grid2D& g = *s.p.grid;
  double rate = 0.0;
  for (std::size_t k = 0; k < s.p.size(); ++k) {
    const Vec3 om = ev.omega.at(k) + ev.omega_adv.at(k);
    for (int i = 0; i < 3; ++i) rate -= dot(ev.h[i].at(k), cross(om, s.p.n[i].at(k)));
  }
  rate *= g.cell_area();
  rate += inner(s.v, ev.dvdt);
  EnergyRate er;
  er.dEdt = rate;
  er.D = dissipation(ev.sr, ev.tb, ev.L, model.hydro);
  const double E = elastic_energy_unchecked(s.p, model.elastic) + 0.5 * inner(s.v, s.v);
  er.residual = std::abs(er.dEdt + er.D.total) / std::max(er.D.total, residual_floor(E));
  return er;
}

// ---------------------------------------------------------------------------
// Stability limit.

/// Stiffness weight of the explicit terms: rotational diffusion plus the
/// anisotropic viscous and coupling contributions.
inline double stiffness_factor(const Model& m) {
  const auto& e = m.elastic;
  const auto& h = m.hydro;
  double gmax = 0.0;
  for (int i = 0; i < 3; ++i) {
    double gi = e.gamma[i] + e.k_div[i];
    for (int j = 0; j < 3; ++j) gi += e.k_twist[j][i];
    gmax = std::max(gmax, gi);
  }
  const double chi_min = std::min({h.chi[0], h.chi[1], h.chi[2]});
  const double bsum = (2.0 / 3.0) * std::abs(h.beta[1]) + 2.0 * std::abs(h.beta[0]) * (2.0 / std::sqrt(3.0)) +
                      2.0 * std::abs(h.beta[2]) + 0.5 * (std::abs(h.beta[3]) + std::abs(h.beta[4]) + std::abs(h.beta[5]));
  double couple = 0.0;
  for (int k = 0; k < 3; ++k) couple += std::abs(h.eta_rot[k]) / h.chi[k];
  return 2.0 * gmax / chi_min + 0.5 * bsum + couple;
}

/// Largest stable dt (safety factor 1): advective and rotational-diffusive limits.
inline double stability_limit(const SimState& s, const Model& m) {
  const Grid2D& g = *s.p.grid;
  const double vmax = std::max(max_abs(s.v.c[0]), max_abs(s.v.c[1]));
  const double dx = std::min(g.dx(), g.dy());
  const double adv = vmax > 0.0 ? dx / vmax : std::numeric_limits<double>::infinity();
  const double diff = 2.0 / (g.max_masked_k2() * stiffness_factor(m));
  return std::min(adv, diff);
}

inline double adaptive_dt(const SimState& s, const Model& m, const IntegratorConfig& icfg) {
  return std::min(icfg.dt, icfg.cfl_safety * stability_limit(s, m));
}

// ---------------------------------------------------------------------------

namespace detail {

/// dexp^{-1}_theta(omega), truncated after the third-order term.
inline Vec3 dexpinv(const Vec3& theta, const Vec3& omega) {
  const Vec3 t1 = cross(theta, omega);
  return omega - 0.5 * t1 + (1.0 / 12.0) * cross(theta, t1);
}

inline std::array<Spectrum, 2> velocity_spectra(const VelocityField& v) {
  const Grid2D& g = *v.grid;
  std::array<Spectrum, 2> vh{g.forward(v.c[0]), g.forward(v.c[1])};
  spectral::apply_mask(g, vh[0]);
  spectral::apply_mask(g, vh[1]);
  spectral::leray(g, vh[0], vh[1]);
  return vh;
}

/// Integrating-factor stage value exp(L c_i dt) v0 + dt sum_j a_ij exp(L (c_i - c_j) dt) N_j
/// for a diagonal linear symbol L (one value per spectral index).
inline VelocityField if_stage(const Grid2D& g, const GridPtr& gp, const std::vector<double>& symbol,
                              const std::array<Spectrum, 2>& v0, double ci, const std::vector<double>& aij,
                              const std::vector<double>& cj, const std::vector<std::array<Spectrum, 2>>& N,
                              double dt) {
  VelocityField out(gp);
  const std::size_t ns = g.spectral_size();
  for (int a = 0; a < 2; ++a) {
    Spectrum acc(ns);
    for (std::size_t s = 0; s < ns; ++s) acc[s] = std::exp(symbol[s] * ci * dt) * v0[a][s];
    for (std::size_t j = 0; j < aij.size(); ++j) {
      if (aij[j] == 0.0) continue;
      for (std::size_t s = 0; s < ns; ++s)
        acc[s] += dt * aij[j] * std::exp(symbol[s] * (ci - cj[j]) * dt) * N[j][a][s];
    }
    g.inverse(acc, out.c[a]);
  }
  return out;
}

inline void check_step_size(const SimState& s, const Model& m, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("time step must be positive and finite");
  const double lim = stability_limit(s, m);
  if (dt > lim * (1.0 + 1e-12))
    throw StepRejected("dt = " + std::to_string(dt) + " exceeds stability limit " + std::to_string(lim), lim);
}

inline void finish_step(SimState& out, const SimState& in, const IntegratorConfig& icfg, bool reproject) {
  out.t = in.t + icfg.dt;
  out.step_index = in.step_index + 1;
  if (reproject && icfg.reprojection_interval > 0 && out.step_index % icfg.reprojection_interval == 0)
    reproject_field(out.p);
  if (!all_finite(out.p) || !all_finite(out.v.c[0]) || !all_finite(out.v.c[1]))
    throw NonFinite("non-finite state after step");
}

}  // namespace detail

/// One RKMK / integrating-factor step of size icfg.dt.
inline SimState step(const SimState& s0, const Model& model, const IntegratorConfig& icfg) {
  require_frame_field(s0.p);
  detail::check_step_size(s0, model, icfg.dt);
  const GridPtr& gp = s0.p.grid;
  const Grid2D& g = *gp;
  const Tableau& tab = tableau(icfg.scheme);
  const std::size_t S = tab.b.size(), n = s0.p.size();
  const double dt = icfg.dt;

  std::vector<double> symbol(g.spectral_size());
  for (std::size_t q = 0; q < symbol.size(); ++q) symbol[q] = -model.hydro.eta * g.k2(q) * g.mask(q);
  const auto v0 = detail::velocity_spectra(s0.v);

  std::vector<std::vector<Vec3>> K(S, std::vector<Vec3>(n));
  std::vector<std::array<Spectrum, 2>> N(S);
  SimState stage = s0;
  for (std::size_t i = 0; i < S; ++i) {
    std::vector<Vec3> theta(n, Vec3{0, 0, 0});
    if (i > 0) {
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < i; ++j)
          if (tab.a[i][j] != 0.0) theta[k] += (dt * tab.a[i][j]) * K[j][k];
      for (std::size_t k = 0; k < n; ++k) stage.p.set(k, rotate_frame(s0.p.at(k), theta[k]));
      if (!icfg.freeze_velocity)
        stage.v = detail::if_stage(g, gp, symbol, v0, tab.c[i], tab.a[i], tab.c, N, dt);
    }
    const Evaluation ev = evaluate(stage, model, icfg.freeze_velocity);
    for (std::size_t k = 0; k < n; ++k) K[i][k] = detail::dexpinv(theta[k], ev.omega.at(k) + ev.omega_adv.at(k));
    N[i] = ev.N;
  }

  SimState out = s0;
  BIAX_PARALLEL_FOR
  for (std::size_t k = 0; k < n; ++k) {
    Vec3 theta{0, 0, 0};
    for (std::size_t j = 0; j < S; ++j) theta += (dt * tab.b[j]) * K[j][k];
    out.p.set(k, rotate_frame(s0.p.at(k), theta));
  }
  if (!icfg.freeze_velocity) out.v = detail::if_stage(g, gp, symbol, v0, 1.0, tab.b, tab.c, N, dt);
  detail::finish_step(out, s0, icfg, true);
  return out;
}

// ---------------------------------------------------------------------------
// Mollified (Friedrichs) system.

namespace detail {

/// Applies phi(|k|/cutoff)^power to every component.
inline Vec3Field mollify_pow(const Vec3Field& f, double cutoff, int power) {
  const Grid2D& g = *f.grid;
  Vec3Field out(f.grid);
  for (int a = 0; a < 3; ++a) {
    Spectrum h = g.forward(f.c[a]);
    for (int r = 0; r < power; ++r) spectral::mollify(g, h, cutoff);
    g.inverse(h, out.c[a]);
  }
  return out;
}

}  // namespace detail

struct FriedrichEvaluation {
  FrameField u;      // J n
  VelocityField w;   // J v
  FrameDerivatives fd;
  MolecularFields H;   // h evaluated on J n
  MolecularFields G;   // J (J H)
  RotationalDerivatives L;
  StrainRotation sr;
  TensorBasisField tb;
  AngularRates c;
  std::array<Vec3Field, 3> dndt;
  std::array<Spectrum, 2> N;
  VelocityField dvdt;
};

inline FriedrichEvaluation evaluate_friedrich(const SimState& s, const Model& model, double cutoff,
                                              bool freeze_velocity = false) {
  const GridPtr& gp = s.p.grid;
  const Grid2D& g = *gp;
  FriedrichEvaluation ev;
  ev.u = mollify(s.p, cutoff);
  ev.w = mollify(s.v, cutoff);
  ev.fd = frame_derivatives(ev.u);
  ev.H = molecular_fields_unchecked(ev.u, ev.fd, model.elastic);
  for (int i = 0; i < 3; ++i) ev.G[i] = detail::mollify_pow(ev.H[i], cutoff, 2);
  ev.L = rotational_derivatives(ev.u, ev.G);
  ev.sr = strain_rotation(ev.w);
  ev.tb = tensor_basis_field_unchecked(ev.u);
  ev.c = angular_rates(ev.sr, ev.tb, ev.L, model.hydro);

  std::array<Vec3Field, 3> raw{Vec3Field(gp), Vec3Field(gp), Vec3Field(gp)};
  for (std::size_t k = 0; k < s.p.size(); ++k) {
    const Vec3 u1 = ev.u.n[0].at(k), u2 = ev.u.n[1].at(k), u3 = ev.u.n[2].at(k);
    const double c1 = ev.c[0][k], c2 = ev.c[1][k], c3 = ev.c[2][k];
    const std::array<Vec3, 3> r{c3 * u2 - c2 * u3, -c3 * u1 + c1 * u3, c2 * u1 - c1 * u2};
    const double w1 = ev.w.c[0][k], w2 = ev.w.c[1][k];
    for (int i = 0; i < 3; ++i) raw[i].set(k, r[i] - (w1 * ev.fd.at(i, 0, k) + w2 * ev.fd.at(i, 1, k)));
  }
  for (int i = 0; i < 3; ++i) ev.dndt[i] = mollify(raw[i], cutoff);

  ev.dvdt = VelocityField(gp);
  const std::size_t ns = g.spectral_size();
  if (freeze_velocity) {
    ev.N = {Spectrum(ns), Spectrum(ns)};
  } else {
    const TensorField sig = stress(ev.sr, ev.tb, ev.L, model.stress_coefficients());
    const VelocityField F = body_force(ev.u, ev.fd, ev.L);
    ev.N = detail::velocity_nonlinearity(ev.w, ev.sr, sig, F);
    for (int a = 0; a < 2; ++a) spectral::mollify(g, ev.N[a], cutoff);
    for (int a = 0; a < 2; ++a) {
      Spectrum d = g.forward(s.v.c[a]);
      for (std::size_t q = 0; q < ns; ++q) {
        const double phi = mollifier_symbol(std::sqrt(g.k2(q)) / cutoff);
        d[q] = ev.N[a][q] - model.hydro.eta * phi * phi * g.k2(q) * g.mask(q) * d[q];
      }
      g.inverse(d, ev.dvdt.c[a]);
    }
  }
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 3; ++a) detail::check_finite(ev.dndt[i].c[a], "mollified frame tendency");
  for (int a = 0; a < 2; ++a) detail::check_finite(ev.dvdt.c[a], "mollified velocity tendency");
  return ev;
}

/// 1/2 |v|^2 + F[J n], the energy of the mollified system.
inline double friedrich_energy(const SimState& s, const Model& model, double cutoff) {
  return 0.5 * inner(s.v, s.v) + elastic_energy_unchecked(mollify(s.p, cutoff), model.elastic);
}

inline EnergyRate energy_rate_friedrich(const SimState& s, const Model& model, double cutoff,
                                        bool freeze_velocity = false) {
  const FriedrichEvaluation ev = evaluate_friedrich(s, model, cutoff, freeze_velocity);
  // d/dt F[J n] = -sum_i <H_i, J dn_i/dt>
  double rate = 0.0;
  for (int i = 0; i < 3; ++i) rate -= inner(ev.H[i], mollify(ev.dndt[i], cutoff));
  rate += inner(s.v, ev.dvdt);
  EnergyRate er;
  er.dEdt = rate;
  er.D = dissipation(ev.sr, ev.tb, ev.L, model.hydro);
  er.residual = std::abs(er.dEdt + er.D.total) / std::max(er.D.total, residual_floor(friedrich_energy(s, model, cutoff)));
  return er;
}

inline SimState step_friedrich(const SimState& s0, const Model& model, const IntegratorConfig& icfg) {
  if (!icfg.mollify_cutoff || !(*icfg.mollify_cutoff > 0.0))
    throw Error("step_friedrich requires a positive mollify_cutoff");
  const double cutoff = *icfg.mollify_cutoff;
  detail::check_step_size(s0, model, icfg.dt);
  const GridPtr& gp = s0.p.grid;
  const Grid2D& g = *gp;
  const Tableau& tab = tableau(icfg.scheme);
  const std::size_t S = tab.b.size();
  const double dt = icfg.dt;

  std::vector<double> symbol(g.spectral_size());
  for (std::size_t q = 0; q < symbol.size(); ++q) {
    const double phi = mollifier_symbol(std::sqrt(g.k2(q)) / cutoff);
    symbol[q] = -model.hydro.eta * phi * phi * g.k2(q) * g.mask(q);
  }
  const auto v0 = detail::velocity_spectra(s0.v);

  std::vector<std::array<Vec3Field, 3>> K(S);
  std::vector<std::array<Spectrum, 2>> N(S);
  SimState stage = s0;
  auto combine = [&](const std::vector<double>& coeffs, std::size_t upto, FrameField& target) {
    for (int i = 0; i < 3; ++i)
      for (int a = 0; a < 3; ++a) {
        auto& dst = target.n[i].c[a];
        dst = s0.p.n[i].c[a];
        for (std::size_t j = 0; j < upto; ++j) {
          if (coeffs[j] == 0.0) continue;
          const auto& kj = K[j][i].c[a];
          for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += dt * coeffs[j] * kj[k];
        }
      }
  };
  for (std::size_t i = 0; i < S; ++i) {
    if (i > 0) {
      combine(tab.a[i], i, stage.p);
      if (!icfg.freeze_velocity)
        stage.v = detail::if_stage(g, gp, symbol, v0, tab.c[i], tab.a[i], tab.c, N, dt);
    }
    FriedrichEvaluation ev = evaluate_friedrich(stage, model, cutoff, icfg.freeze_velocity);
    K[i] = std::move(ev.dndt);
    N[i] = std::move(ev.N);
  }
  SimState out = s0;
  combine(tab.b, S, out.p);
  if (!icfg.freeze_velocity) out.v = detail::if_stage(g, gp, symbol, v0, 1.0, tab.b, tab.c, N, dt);
  detail::finish_step(out, s0, icfg, false);
  return out;
}

/// Initial data of the mollified system: J applied to frame and velocity.
inline SimState mollify_state(const SimState& s, double cutoff) {
  SimState out = s;
  out.p = mollify(s.p, cutoff);
  out.v = mollify(s.v, cutoff);
  return out;
}

inline SimState advance(const SimState& s, const Model& model, const IntegratorConfig& icfg) {
  return icfg.mollify_cutoff ? step_friedrich(s, model, icfg) : step(s, model, icfg);
}

}  // namespace biax
