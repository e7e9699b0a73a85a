#pragma once

// Biaxial orientational elasticity: coefficients, both forms of the energy,
// molecular fields and rotational derivatives.

#include <array>
#include <cmath>
#include <string>

#include "biax/errors.hpp"
#include "biax/frame.hpp"
#include "biax/grid.hpp"

namespace biax {

struct ElasticCoefficients {
  std::array<double, 12> K{};
  std::array<double, 3> gamma{};
  std::array<double, 3> k_div{};
  /// k_twist[i][j] weighs (n_{i+1} . curl n_{j+1})^2.
  Mat3 k_twist{};

  bool one_constant() const {
    for (double v : k_div)
      if (v != 0.0) return false;
    for (const auto& row : k_twist)
      for (double v : row)
        if (v != 0.0) return false;
    return true;
  }
};

namespace detail {
inline const char* subscript(int i) {
  static const char* s[] = {"₀", "₁", "₂", "₃", "₄", "₅", "₆", "₇", "₈", "₉", "₁₀", "₁₁", "₁₂"};
  return s[i];
}
/// Twist-type bulk terms: (K index, dotted vector i, curled vector j), 0-based.
struct TwistTerm {
  int K, i, j;
};
inline constexpr std::array<TwistTerm, 9> kTwistTerms{{{3, 0, 0},
                                                       {4, 1, 1},
                                                       {5, 2, 2},
                                                       {6, 2, 0},
                                                       {7, 0, 1},
                                                       {8, 1, 2},
                                                       {9, 1, 0},
                                                       {10, 2, 1},
                                                       {11, 0, 2}}};
}  // namespace detail

inline ElasticCoefficients derive_coefficients(const std::array<double, 12>& K) {
  for (int m = 0; m < 12; ++m)
    if (!(K[m] >= 0.0) || !std::isfinite(K[m]))
      throw InvalidCoefficients(std::string("K") + detail::subscript(m + 1) + " ≥ 0 violated (K" +
                                detail::subscript(m + 1) + " = " + std::to_string(K[m]) + ")");
  ElasticCoefficients c;
  c.K = K;
  // group g collects K_{g+1}, K_{g+4}, K_{g+7}, K_{g+10}
  for (int g = 0; g < 3; ++g) {
    c.gamma[g] = std::min({K[g], K[g + 3], K[g + 6], K[g + 9]});
    if (!(c.gamma[g] > 0.0))
      throw InvalidCoefficients(std::string("γ") + detail::subscript(g + 1) + " = min{K" + detail::subscript(g + 1) +
                                ",K" + detail::subscript(g + 4) + ",K" + detail::subscript(g + 7) + ",K" +
                                detail::subscript(g + 10) + "} > 0 violated");
    c.k_div[g] = K[g] - c.gamma[g];
  }
  for (const auto& t : detail::kTwistTerms) c.k_twist[t.i][t.j] = K[t.K] - c.gamma[t.j];
  return c;
}

inline ElasticCoefficients one_constant_coefficients(double K = 1.0) {
  std::array<double, 12> k;
  k.fill(K);
  return derive_coefficients(k);
}

/// Multiplies every K by s (and hence every derived coefficient).
inline ElasticCoefficients scaled(const ElasticCoefficients& c, double s) {
  std::array<double, 12> k = c.K;
  for (auto& v : k) v *= s;
  return derive_coefficients(k);
}

// ---------------------------------------------------------------------------

namespace detail {

inline double density_at(const FrameField& p, const FrameDerivatives& fd, const ElasticCoefficients& c,
                         std::size_t k) {
  double f = 0.0;
  for (int i = 0; i < 3; ++i) {
    f += 0.5 * c.gamma[i] * grad_sq_at(fd, i, k);
    if (c.k_div[i] != 0.0) {
      const double dv = div_at(fd, i, k);
      f += 0.5 * c.k_div[i] * dv * dv;
    }
  }
  for (int j = 0; j < 3; ++j) {
    bool any = false;
    for (int i = 0; i < 3; ++i) any = any || c.k_twist[i][j] != 0.0;
    if (!any) continue;
    const Vec3 cj = curl_at(fd, j, k);
    for (int i = 0; i < 3; ++i) {
      if (c.k_twist[i][j] == 0.0) continue;
      const double w = dot(p.n[i].at(k), cj);
      f += 0.5 * c.k_twist[i][j] * w * w;
    }
  }
  return f;
}

}  // namespace detail

/// Rewritten density on arbitrary triads (no frame check).
inline ScalarField energy_density_unchecked(const FrameField& p, const FrameDerivatives& fd,
                                            const ElasticCoefficients& c) {
  ScalarField f(p.grid);
  BIAX_PARALLEL_FOR
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = detail::density_at(p, fd, c, k);
  return f;
}

inline ScalarField energy_density(const FrameField& p, const ElasticCoefficients& c) {
  require_frame_field(p);
  return energy_density_unchecked(p, frame_derivatives(p), c);
}

/// Discrete elastic energy: grid quadrature of the rewritten density.
inline double elastic_energy_unchecked(const FrameField& p, const ElasticCoefficients& c) {
  const FrameDerivatives fd = frame_derivatives(p);
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) s += detail::density_at(p, fd, c, k);
  return s * p.grid->cell_area();
}

inline double elastic_energy(const FrameField& p, const ElasticCoefficients& c) {
  require_frame_field(p);
  return elastic_energy_unchecked(p, c);
}

struct EnergyBreakdown {
  double total = 0.0;
  /// 12 bulk integrals (1/2 K_m int(...)^2) followed by the 3 surface integrals.
  std::array<double, 15> per_term{};
  std::array<double, 3> rewritten_dirichlet{};
  double rewritten_w = 0.0;
  double original_total = 0.0;
  double rewritten_total = 0.0;
};

inline EnergyBreakdown energy_breakdown(const FrameField& p, const ElasticCoefficients& c) {
  require_frame_field(p);
  const Grid2D& g = *p.grid;
  const FrameDerivatives fd = frame_derivatives(p);
  EnergyBreakdown b;
  const double dA = g.cell_area();
  for (std::size_t k = 0; k < p.size(); ++k) {
    std::array<Vec3, 3> curl;
    for (int i = 0; i < 3; ++i) {
      curl[i] = curl_at(fd, i, k);
      const double dv = div_at(fd, i, k);
      b.per_term[i] += 0.5 * c.K[i] * dv * dv * dA;
      b.rewritten_dirichlet[i] += 0.5 * c.gamma[i] * grad_sq_at(fd, i, k) * dA;
      b.rewritten_w += 0.5 * c.k_div[i] * dv * dv * dA;
    }
    for (const auto& t : detail::kTwistTerms) {
      const double w = dot(p.n[t.i].at(k), curl[t.j]);
      b.per_term[t.K] += 0.5 * c.K[t.K] * w * w * dA;
      b.rewritten_w += 0.5 * c.k_twist[t.i][t.j] * w * w * dA;
    }
  }
  // surface terms 1/2 gamma_i div[(n_i . grad) n_i - (div n_i) n_i]
  for (int i = 0; i < 3; ++i) {
    Vec3Field q(p.grid);
    for (std::size_t k = 0; k < p.size(); ++k) {
      const Vec3 n = p.n[i].at(k);
      const Vec3 adv = n[0] * fd.at(i, 0, k) + n[1] * fd.at(i, 1, k);
      q.set(k, adv - div_at(fd, i, k) * n);
    }
    b.per_term[12 + i] = 0.5 * c.gamma[i] * integrate(g, div3(q).values);
  }
  for (double v : b.per_term) b.original_total += v;
  b.rewritten_total = b.rewritten_dirichlet[0] + b.rewritten_dirichlet[1] + b.rewritten_dirichlet[2] + b.rewritten_w;
  b.total = b.original_total;
  return b;
}

// ---------------------------------------------------------------------------

using MolecularFields = std::array<Vec3Field, 3>;

/// h_i = -dF/dn_i of the discrete energy, on arbitrary triads.
inline MolecularFields molecular_fields_unchecked(const FrameField& p, const FrameDerivatives& fd,
                                                  const ElasticCoefficients& c) {
  const Grid2D& g = *p.grid;
  const std::size_t ns = g.spectral_size();
  const Complex I(0.0, 1.0);
  MolecularFields h{Vec3Field(p.grid), Vec3Field(p.grid), Vec3Field(p.grid)};

  // w[i][j] = n_i . curl n_j, only where some coefficient needs it
  std::array<std::array<std::vector<double>, 3>, 3> w;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (c.k_twist[i][j] == 0.0) continue;
      w[i][j].resize(p.size());
      for (std::size_t k = 0; k < p.size(); ++k) w[i][j][k] = dot(p.n[i].at(k), curl_at(fd, j, k));
    }

  for (int i = 0; i < 3; ++i) {
    std::array<Spectrum, 3> H;
    for (int comp = 0; comp < 3; ++comp) {
      H[comp].resize(ns);
      spectral::laplacian(g, fd.hat[i][comp], H[comp]);
      for (auto& z : H[comp]) z *= c.gamma[i];
    }
    if (c.k_div[i] != 0.0) {
      for (std::size_t s = 0; s < ns; ++s) {
        const Complex dv = I * g.mask(s) * (g.kx(s) * fd.hat[i][0][s] + g.ky(s) * fd.hat[i][1][s]);
        H[0][s] += c.k_div[i] * I * g.kx(s) * g.mask(s) * dv;
        H[1][s] += c.k_div[i] * I * g.ky(s) * g.mask(s) * dv;
      }
    }
    // - sum_j k_ji curl((n_j . curl n_i) n_j)
    bool curl_term = false;
    for (int j = 0; j < 3; ++j) curl_term = curl_term || c.k_twist[j][i] != 0.0;
    if (curl_term) {
      Vec3Field Q(p.grid);
      for (std::size_t k = 0; k < p.size(); ++k) {
        Vec3 q{0, 0, 0};
        for (int j = 0; j < 3; ++j)
          if (c.k_twist[j][i] != 0.0) q += (c.k_twist[j][i] * w[j][i][k]) * p.n[j].at(k);
        Q.set(k, q);
      }
      const Spectrum qx = g.forward(Q.c[0]), qy = g.forward(Q.c[1]), qz = g.forward(Q.c[2]);
      for (std::size_t s = 0; s < ns; ++s) {
        const Complex dx = I * g.kx(s) * g.mask(s), dy = I * g.ky(s) * g.mask(s);
        H[0][s] -= dy * qz[s];
        H[1][s] -= -dx * qz[s];
        H[2][s] -= dx * qy[s] - dy * qx[s];
      }
    }
    for (int comp = 0; comp < 3; ++comp) g.inverse(H[comp], h[i].c[comp]);
    // - sum_j k_ij (n_i . curl n_j) curl n_j
    for (int j = 0; j < 3; ++j) {
      if (c.k_twist[i][j] == 0.0) continue;
      for (std::size_t k = 0; k < p.size(); ++k) {
        const Vec3 cj = curl_at(fd, j, k);
        const double a = c.k_twist[i][j] * w[i][j][k];
        for (int comp = 0; comp < 3; ++comp) h[i].c[comp][k] -= a * cj[comp];
      }
    }
  }
  return h;
}

inline MolecularFields molecular_fields(const FrameField& p, const ElasticCoefficients& c) {
  require_frame_field(p);
  return molecular_fields_unchecked(p, frame_derivatives(p), c);
}

using RotationalDerivatives = std::array<ScalarField, 3>;

/// L1 = n2.h3 - n3.h2, L2 = n3.h1 - n1.h3, L3 = n1.h2 - n2.h1.
inline RotationalDerivatives rotational_derivatives(const FrameField& p, const MolecularFields& h) {
  RotationalDerivatives L{ScalarField(p.grid), ScalarField(p.grid), ScalarField(p.grid)};
  BIAX_PARALLEL_FOR
  for (std::size_t k = 0; k < p.size(); ++k) {
    const Vec3 n1 = p.n[0].at(k), n2 = p.n[1].at(k), n3 = p.n[2].at(k);
    const Vec3 h1 = h[0].at(k), h2 = h[1].at(k), h3 = h[2].at(k);
    L[0][k] = dot(n2, h3) - dot(n3, h2);
    L[1][k] = dot(n3, h1) - dot(n1, h3);
    L[2][k] = dot(n1, h2) - dot(n2, h1);
  }
  return L;
}

using FrameDirection = std::array<Vec3Field, 3>;

/// Central difference [F(p + eps d) - F(p - eps d)] / (2 eps) of the discrete energy.
inline double gradient_check_oracle(const FrameField& p, const ElasticCoefficients& c, const FrameDirection& dir,
                                    double eps) {
  if (!(eps >= 1e-7 && eps <= 1e-3)) throw Error("gradient_check_oracle: eps must lie in [1e-7, 1e-3]");
  FrameField plus(p.grid), minus(p.grid);
  for (int i = 0; i < 3; ++i)
    for (int comp = 0; comp < 3; ++comp)
      for (std::size_t k = 0; k < p.size(); ++k) {
        plus.n[i].c[comp][k] = p.n[i].c[comp][k] + eps * dir[i].c[comp][k];
        minus.n[i].c[comp][k] = p.n[i].c[comp][k] - eps * dir[i].c[comp][k];
      }
  return (elastic_energy_unchecked(plus, c) - elastic_energy_unchecked(minus, c)) / (2.0 * eps);
}

/// -sum_i <h_i, d_i>, the first variation predicted by the molecular fields.
inline double predicted_variation(const MolecularFields& h, const FrameDirection& dir) {
  return -(inner(h[0], dir[0]) + inner(h[1], dir[1]) + inner(h[2], dir[2]));
}

}  // namespace biax
