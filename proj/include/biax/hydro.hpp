#pragma once

// Velocity-gradient decomposition, angular rates, stress, body force and the
// dissipation functional.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "biax/elasticity.hpp"
#include "biax/errors.hpp"
#include "biax/frame.hpp"
#include "biax/grid.hpp"

namespace biax {

struct HydroCoefficients {
  /// beta_0 .. beta_5
  std::array<double, 6> beta{0.3, 1, 1, 1, 1, 1};
  double eta = 1.0;
  std::array<double, 3> eta_rot{0.5, 0.5, 0.5};
  std::array<double, 3> chi{1, 1, 1};
};

struct AdmissibilityCheck {
  std::string inequality;
  bool pass = false;
  /// Slack of the inequality; >= 0 exactly when it holds.
  double margin = 0.0;
};

struct AdmissibilityReport {
  std::vector<AdmissibilityCheck> checks;

  bool admissible() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  const AdmissibilityCheck* first_failure() const {
    for (const auto& c : checks)
      if (!c.pass) return &c;
    return nullptr;
  }
};

inline AdmissibilityReport validate_coefficients(const HydroCoefficients& h) {
  AdmissibilityReport r;
  auto add = [&](std::string name, double margin, bool strict) {
    const bool ok = std::isfinite(margin) && (strict ? margin > 0.0 : margin >= 0.0);
    r.checks.push_back({std::move(name), ok, margin});
  };
  for (int i = 1; i <= 5; ++i) add(std::string("β") + detail::subscript(i) + " ≥ 0", h.beta[i], false);
  for (int j = 0; j < 3; ++j) add(std::string("χ") + detail::subscript(j + 1) + " > 0", h.chi[j], true);
  add("η > 0", h.eta, true);
  add("β₀² ≤ β₁β₂", h.beta[1] * h.beta[2] - h.beta[0] * h.beta[0], false);
  add("η₁² ≤ β₅χ₁", h.beta[5] * h.chi[0] - h.eta_rot[0] * h.eta_rot[0], false);
  add("η₂² ≤ β₄χ₂", h.beta[4] * h.chi[1] - h.eta_rot[1] * h.eta_rot[1], false);
  add("η₃² ≤ β₃χ₃", h.beta[3] * h.chi[2] - h.eta_rot[2] * h.eta_rot[2], false);
  return r;
}

// ---------------------------------------------------------------------------

struct TensorField {
  GridPtr grid;
  std::vector<Mat3> m;

  TensorField() = default;
  explicit TensorField(GridPtr g) : grid(std::move(g)), m(grid->size(), Mat3{}) {}
  std::size_t size() const { return m.size(); }
};

struct StrainRotation {
  TensorField A;
  TensorField Omega;
};

/// kappa_ij = d_j v_i (third row and column zero); A, Omega its symmetric and skew parts.
inline StrainRotation strain_rotation(const VelocityField& v) {
  const Grid2D& g = *v.grid;
  std::array<std::array<std::vector<double>, 2>, 2> kap;
  Spectrum tmp(g.spectral_size());
  for (int i = 0; i < 2; ++i) {
    const Spectrum vh = g.forward(v.c[i]);
    for (int j = 0; j < 2; ++j) {
      spectral::derivative(g, vh, j + 1, tmp);
      kap[i][j] = g.inverse(tmp);
    }
  }
  StrainRotation sr{TensorField(v.grid), TensorField(v.grid)};
  for (std::size_t k = 0; k < v.size(); ++k) {
    Mat3& A = sr.A.m[k];
    Mat3& W = sr.Omega.m[k];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        A[i][j] = 0.5 * (kap[i][j][k] + kap[j][i][k]);
        W[i][j] = 0.5 * (kap[i][j][k] - kap[j][i][k]);
      }
  }
  return sr;
}

using TensorBasisField = std::vector<TensorBasis>;

inline TensorBasisField tensor_basis_field(const FrameField& p) {
  require_frame_field(p);
  TensorBasisField tb(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) tb[k] = tensor_basis_unchecked(p.at(k));
  return tb;
}

inline TensorBasisField tensor_basis_field_unchecked(const FrameField& p) {
  TensorBasisField tb(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) tb[k] = tensor_basis_unchecked(p.at(k));
  return tb;
}

// Index pairing of the three rotation modes k = 0,1,2 (about n1, n2, n3):
// antisymmetric tensor a[2-k], symmetric tensor s[4-k], beta[5-k].
inline constexpr int a_index(int k) { return 2 - k; }
inline constexpr int s_index(int k) { return 4 - k; }
inline constexpr int beta_index(int k) { return 5 - k; }

using AngularRates = std::array<ScalarField, 3>;

inline std::array<double, 3> angular_rates_at(const Mat3& A, const Mat3& W, const TensorBasis& tb,
                                              const std::array<double, 3>& L, const HydroCoefficients& h) {
  std::array<double, 3> c{};
  for (int k = 0; k < 3; ++k)
    c[k] = 0.5 * frob(W, tb.a[a_index(k)]) + (h.eta_rot[k] / h.chi[k]) * frob(A, tb.s[s_index(k)]) -
           L[k] / h.chi[k];
  return c;
}

inline AngularRates angular_rates(const StrainRotation& sr, const TensorBasisField& tb,
                                  const RotationalDerivatives& lf, const HydroCoefficients& h) {
  AngularRates c{ScalarField(sr.A.grid), ScalarField(sr.A.grid), ScalarField(sr.A.grid)};
  BIAX_PARALLEL_FOR
  for (std::size_t k = 0; k < tb.size(); ++k) {
    const auto ck = angular_rates_at(sr.A.m[k], sr.Omega.m[k], tb[k], {lf[0][k], lf[1][k], lf[2][k]}, h);
    for (int i = 0; i < 3; ++i) c[i][k] = ck[i];
  }
  return c;
}

/// Frame velocities n_i' = omega x n_i with omega = sum c_k n_k.
inline std::array<Vec3, 3> frame_rates(const Frame& f, const std::array<double, 3>& c) {
  const Vec3 om = c[0] * f.n[0] + c[1] * f.n[1] + c[2] * f.n[2];
  return {cross(om, f.n[0]), cross(om, f.n[1]), cross(om, f.n[2])};
}

/// Stress with the time derivatives eliminated through the frame equations.
inline Mat3 stress_at(const Mat3& A, const TensorBasis& tb, const std::array<double, 3>& L,
                      const HydroCoefficients& h) {
  const double As1 = frob(A, tb.s[0]), As2 = frob(A, tb.s[1]);
  Mat3 sig = (h.beta[1] * As1 + h.beta[0] * As2) * tb.s[0];
  sig += (h.beta[0] * As1 + h.beta[2] * As2) * tb.s[1];
  for (int k = 0; k < 3; ++k) {
    const Mat3& s = tb.s[s_index(k)];
    const double coef = h.beta[beta_index(k)] - h.eta_rot[k] * h.eta_rot[k] / h.chi[k];
    sig += (coef * frob(A, s) + (h.eta_rot[k] / h.chi[k]) * L[k]) * s;
    sig += (0.5 * L[k]) * tb.a[a_index(k)];
  }
  return sig;
}

inline TensorField stress(const StrainRotation& sr, const TensorBasisField& tb, const RotationalDerivatives& lf,
                          const HydroCoefficients& h) {
  TensorField sig(sr.A.grid);
  BIAX_PARALLEL_FOR
  for (std::size_t k = 0; k < tb.size(); ++k) sig.m[k] = stress_at(sr.A.m[k], tb[k], {lf[0][k], lf[1][k], lf[2][k]}, h);
  return sig;
}

/// Planar divergence (d_j sigma_ij, i = 1,2), returned as spectra.
inline std::array<Spectrum, 2> stress_divergence_spectral(const TensorField& sig) {
  const Grid2D& g = *sig.grid;
  const std::size_t ns = g.spectral_size();
  std::array<Spectrum, 2> out{Spectrum(ns), Spectrum(ns)};
  std::vector<double> comp(sig.size());
  const Complex I(0.0, 1.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      for (std::size_t k = 0; k < sig.size(); ++k) comp[k] = sig.m[k][i][j];
      const Spectrum sh = g.forward(comp);
      for (std::size_t s = 0; s < ns; ++s) out[i][s] += I * g.k(s, j + 1) * g.mask(s) * sh[s];
    }
  return out;
}

inline VelocityField stress_divergence(const TensorField& sig) {
  const auto sp = stress_divergence_spectral(sig);
  VelocityField out(sig.grid);
  sig.grid->inverse(sp[0], out.c[0]);
  sig.grid->inverse(sp[1], out.c[1]);
  return out;
}

/// F_i = (d_i n1 . n2) L3 + (d_i n3 . n1) L2 + (d_i n2 . n3) L1, i = 1,2.
inline VelocityField body_force(const FrameField& p, const FrameDerivatives& fd, const RotationalDerivatives& lf) {
  VelocityField F(p.grid);
  BIAX_PARALLEL_FOR
  for (std::size_t k = 0; k < p.size(); ++k) {
    const Vec3 n1 = p.n[0].at(k), n2 = p.n[1].at(k), n3 = p.n[2].at(k);
    for (int a = 0; a < 2; ++a)
      F.c[a][k] = dot(fd.at(0, a, k), n2) * lf[2][k] + dot(fd.at(2, a, k), n1) * lf[1][k] +
                  dot(fd.at(1, a, k), n3) * lf[0][k];
  }
  return F;
}

inline VelocityField body_force(const FrameField& p, const RotationalDerivatives& lf) {
  return body_force(p, frame_derivatives(p), lf);
}

struct DissipationTerms {
  double viscous = 0.0;
  std::array<double, 3> rotational{};
  double beta_block = 0.0;
  std::array<double, 3> anisotropic{};
  double total = 0.0;

  double rotational_sum() const { return rotational[0] + rotational[1] + rotational[2]; }
  double anisotropic_sum() const { return anisotropic[0] + anisotropic[1] + anisotropic[2]; }
  void finish() { total = viscous + rotational_sum() + beta_block + anisotropic_sum(); }
};

/// Pointwise dissipation density; grad_v_sq = |grad v|^2 = |A|^2 + |Omega|^2.
inline DissipationTerms dissipation_at(const Mat3& A, double grad_v_sq, const TensorBasis& tb,
                                       const std::array<double, 3>& L, const HydroCoefficients& h) {
  DissipationTerms d;
  d.viscous = h.eta * grad_v_sq;
  for (int k = 0; k < 3; ++k) d.rotational[k] = L[k] * L[k] / h.chi[k];
  const double As1 = frob(A, tb.s[0]), As2 = frob(A, tb.s[1]);
  d.beta_block = h.beta[1] * As1 * As1 + 2.0 * h.beta[0] * As1 * As2 + h.beta[2] * As2 * As2;
  for (int k = 0; k < 3; ++k) {
    const double As = frob(A, tb.s[s_index(k)]);
    d.anisotropic[k] = (h.beta[beta_index(k)] - h.eta_rot[k] * h.eta_rot[k] / h.chi[k]) * As * As;
  }
  d.finish();
  return d;
}

inline DissipationTerms dissipation(const StrainRotation& sr, const TensorBasisField& tb,
                                    const RotationalDerivatives& lf, const HydroCoefficients& h) {
  DissipationTerms d;
  const double dA = sr.A.grid->cell_area();
  for (std::size_t k = 0; k < tb.size(); ++k) {
    const double gv = frob(sr.A.m[k], sr.A.m[k]) + frob(sr.Omega.m[k], sr.Omega.m[k]);
    const DissipationTerms t = dissipation_at(sr.A.m[k], gv, tb[k], {lf[0][k], lf[1][k], lf[2][k]}, h);
    d.viscous += t.viscous * dA;
    d.beta_block += t.beta_block * dA;
    for (int i = 0; i < 3; ++i) {
      d.rotational[i] += t.rotational[i] * dA;
      d.anisotropic[i] += t.anisotropic[i] * dA;
    }
  }
  d.finish();
  return d;
}

}  // namespace biax
