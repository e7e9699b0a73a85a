#pragma once

// Pointwise SO(3) frame algebra and frame fields.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>

#include "biax/errors.hpp"
#include "biax/grid.hpp"
#include "biax/tensor3.hpp"

namespace biax {

struct Frame {
  std::array<Vec3, 3> n{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};

  /// Matrix whose columns are n1, n2, n3.
  Mat3 matrix() const {
    Mat3 m{};
    for (int c = 0; c < 3; ++c)
      for (int r = 0; r < 3; ++r) m[r][c] = n[c][r];
    return m;
  }
  static Frame from_matrix(const Mat3& m) {
    Frame f;
    for (int c = 0; c < 3; ++c)
      for (int r = 0; r < 3; ++r) f.n[c][r] = m[r][c];
    return f;
  }
};

inline Frame identity_frame() { return Frame{}; }

/// max_ij |n_i . n_j - delta_ij|
inline double orthonormality_defect(const Frame& f) {
  double d = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) d = std::max(d, std::abs(dot(f.n[i], f.n[j]) - (i == j ? 1.0 : 0.0)));
  return d;
}

inline constexpr double kFrameDefectLimit = 1e-6;

inline void require_frame(const Frame& f) {
  const double d = orthonormality_defect(f);
  if (!(d <= kFrameDefectLimit)) throw FrameDefect("frame orthonormality defect " + std::to_string(d));
}

/// s1..s5 symmetric traceless, a1..a3 antisymmetric (0-based arrays).
struct TensorBasis {
  std::array<Mat3, 5> s{};
  std::array<Mat3, 3> a{};
};

inline Mat3 sym_product(const Vec3& x, const Vec3& y) { return 0.5 * (outer(x, y) + outer(y, x)); }
inline Mat3 wedge(const Vec3& x, const Vec3& y) { return outer(x, y) - outer(y, x); }

/// Basis built from arbitrary triads (no orthonormality check); used where the
/// triad is known not to be a frame, e.g. mollified fields.
inline TensorBasis tensor_basis_unchecked(const Frame& f) {
  const auto& [n1, n2, n3] = f.n;
  TensorBasis tb;
  tb.s[0] = outer(n1, n1) - (1.0 / 3.0) * identity_mat();
  tb.s[1] = outer(n2, n2) - outer(n3, n3);
  tb.s[2] = sym_product(n1, n2);
  tb.s[3] = sym_product(n1, n3);
  tb.s[4] = sym_product(n2, n3);
  tb.a[0] = wedge(n2, n3);
  tb.a[1] = wedge(n3, n1);
  tb.a[2] = wedge(n1, n2);
  return tb;
}

inline TensorBasis tensor_basis(const Frame& f) {
  require_frame(f);
  return tensor_basis_unchecked(f);
}

/// V1..V3 and W1..W6, each a triple stored as a matrix with the triple's vectors as columns.
struct TangentBasis {
  std::array<Mat3, 3> V{};
  std::array<Mat3, 6> W{};
};

inline Mat3 triple(const Vec3& a, const Vec3& b, const Vec3& c) { return Frame{{a, b, c}}.matrix(); }

inline TangentBasis tangent_basis(const Frame& f) {
  const auto& [n1, n2, n3] = f.n;
  const Vec3 z{0, 0, 0};
  TangentBasis tb;
  tb.V[0] = triple(z, n3, -n2);
  tb.V[1] = triple(-n3, z, n1);
  tb.V[2] = triple(n2, -n1, z);
  tb.W[0] = triple(z, n3, n2);
  tb.W[1] = triple(n3, z, n1);
  tb.W[2] = triple(n2, n1, z);
  tb.W[3] = triple(n1, z, z);
  tb.W[4] = triple(z, n2, z);
  tb.W[5] = triple(z, z, n3);
  return tb;
}

struct DecompositionCheck {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Frobenius A.B against its expansion in the nine-element tangent/normal basis.
inline DecompositionCheck inner_decomposition_check(const Mat3& A, const Mat3& B, const Frame& f) {
  require_frame(f);
  const TangentBasis tb = tangent_basis(f);
  DecompositionCheck out;
  out.lhs = frob(A, B);
  for (const auto& V : tb.V) out.rhs += frob(A, V) * frob(B, V) / frob(V, V);
  for (const auto& W : tb.W) out.rhs += frob(A, W) * frob(B, W) / frob(W, W);
  return out;
}

/// (L_k n1, L_k n2, L_k n3) with L_k n_p = eps^{kpq} n_q; k in {1,2,3}.
inline std::array<Vec3, 3> script_l_on_frame(const Frame& f, int k) {
  if (k < 1 || k > 3) throw Error("script_l_on_frame: k must be 1, 2 or 3");
  std::array<Vec3, 3> out{};
  for (int p = 0; p < 3; ++p) {
    Vec3 acc{0, 0, 0};
    for (int q = 0; q < 3; ++q) {
      const int e = levi_civita(k - 1, p, q);
      if (e != 0) acc += static_cast<double>(e) * f.n[q];
    }
    out[p] = acc;
  }
  return out;
}

/// Rotation of x by the rotation vector theta (axis theta/|theta|, angle |theta|).
inline Vec3 rotate_vector(const Vec3& theta, const Vec3& x) {
  const double t2 = dot(theta, theta);
  if (t2 == 0.0) return x;
  double a, b;
  if (t2 < 1e-8) {
    a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
  } else {
    const double t = std::sqrt(t2);
    a = std::sin(t) / t;
    b = (1.0 - std::cos(t)) / t2;
  }
  const Vec3 tx = cross(theta, x);
  return x + a * tx + b * cross(theta, tx);
}

inline Frame rotate_frame(const Frame& f, const Vec3& theta) {
  Frame out;
  for (int i = 0; i < 3; ++i) out.n[i] = rotate_vector(theta, f.n[i]);
  return out;
}

/// Each n_i mapped by exp(dt [omega]_x). When the input is a frame to within
/// rounding, one Newton-Schulz sweep on the output drops the last-bit drift so
/// long compositions do not random-walk away; drifted inputs are rotated as is.
inline Frame rodrigues_rotate(const Frame& f, const Vec3& omega, double dt) {
  const Vec3 theta = dt * omega;
  if (theta == Vec3{0, 0, 0}) return f;
  Frame out = rotate_frame(f, theta);
  if (orthonormality_defect(f) > 64.0 * std::numeric_limits<double>::epsilon()) return out;
  Frame c;
  for (int i = 0; i < 3; ++i) {
    Vec3 acc = 1.5 * out.n[i];
    for (int j = 0; j < 3; ++j) acc += (-0.5 * dot(out.n[i], out.n[j])) * out.n[j];
    c.n[i] = acc;
  }
  return c;
}

inline Mat3 inverse(const Mat3& m) {
  const double d = det(m);
  Mat3 r{};
  r[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / d;
  r[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / d;
  r[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / d;
  r[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / d;
  r[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / d;
  r[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / d;
  r[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / d;
  r[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / d;
  r[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / d;
  return r;
}

/// Nearest rotation via Newton iteration X <- (X + X^{-T}) / 2 on the polar factor.
inline Frame reproject_so3(const Frame& f) {
  Mat3 X = f.matrix();
  const double d0 = det(X);
  if (!std::isfinite(d0) || std::abs(d0) < 1e-12 * std::pow(frob_norm(X) + 1e-300, 3))
    throw DegenerateFrame("reproject_so3: singular near-frame");
  if (d0 < 0.0) throw DegenerateFrame("reproject_so3: reflection-like near-frame (det < 0)");
  for (int it = 0; it < 60; ++it) {
    const Mat3 Y = 0.5 * (X + transpose(inverse(X)));
    const double change = frob_norm(Y - X);
    X = Y;
    if (change <= 1e-15) break;
  }
  if (det(X) <= 0.0) throw DegenerateFrame("reproject_so3: orthogonal factor has det < 0");
  return Frame::from_matrix(X);
}

// ---------------------------------------------------------------------------

struct FrameField {
  GridPtr grid;
  std::array<Vec3Field, 3> n;

  FrameField() = default;
  explicit FrameField(GridPtr g) : grid(g), n{Vec3Field(g), Vec3Field(g), Vec3Field(g)} {}

  std::size_t size() const { return n[0].size(); }
  Frame at(std::size_t k) const { return Frame{{n[0].at(k), n[1].at(k), n[2].at(k)}}; }
  void set(std::size_t k, const Frame& f) {
    for (int i = 0; i < 3; ++i) n[i].set(k, f.n[i]);
  }
};

inline FrameField uniform_frame_field(GridPtr g, const Frame& f = Frame{}) {
  FrameField p(g);
  for (std::size_t k = 0; k < p.size(); ++k) p.set(k, f);
  return p;
}

inline double max_orthonormality_defect(const FrameField& p) {
  double d = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) d = std::max(d, orthonormality_defect(p.at(k)));
  return d;
}

inline void require_frame_field(const FrameField& p) {
  const double d = max_orthonormality_defect(p);
  if (!(d <= kFrameDefectLimit)) throw FrameDefect("frame field orthonormality defect " + std::to_string(d));
}

inline void reproject_field(FrameField& p) {
  for (std::size_t k = 0; k < p.size(); ++k) p.set(k, reproject_so3(p.at(k)));
}

inline bool all_finite(const FrameField& p) {
  for (const auto& v : p.n)
    for (const auto& c : v.c)
      if (!all_finite(c)) return false;
  return true;
}

/// Spectra of all nine frame components plus their masked first derivatives.
/// d[i][a] is the derivative of n_{i+1} along axis a+1.
struct FrameDerivatives {
  std::array<std::array<Spectrum, 3>, 3> hat;
  std::array<std::array<Vec3Field, 2>, 3> d;

  Vec3 at(int i, int axis, std::size_t k) const { return d[i][axis].at(k); }
};

inline FrameDerivatives frame_derivatives(const FrameField& p) {
  const Grid2D& g = *p.grid;
  FrameDerivatives fd;
  Spectrum tmp(g.spectral_size());
  for (int i = 0; i < 3; ++i) {
    fd.d[i] = {Vec3Field(p.grid), Vec3Field(p.grid)};
    for (int c = 0; c < 3; ++c) {
      fd.hat[i][c] = g.forward(p.n[i].c[c]);
      for (int a = 0; a < 2; ++a) {
        spectral::derivative(g, fd.hat[i][c], a + 1, tmp);
        g.inverse(tmp, fd.d[i][a].c[c]);
      }
    }
  }
  return fd;
}

/// Curl of n_{i+1} from precomputed derivatives: (d2 n_z, -d1 n_z, d1 n_y - d2 n_x).
inline Vec3 curl_at(const FrameDerivatives& fd, int i, std::size_t k) {
  const auto& d1 = fd.d[i][0];
  const auto& d2 = fd.d[i][1];
  return {d2.c[2][k], -d1.c[2][k], d1.c[1][k] - d2.c[0][k]};
}

inline double div_at(const FrameDerivatives& fd, int i, std::size_t k) {
  return fd.d[i][0].c[0][k] + fd.d[i][1].c[1][k];
}

/// |grad n_{i+1}|^2 at point k.
inline double grad_sq_at(const FrameDerivatives& fd, int i, std::size_t k) {
  const Vec3 a = fd.at(i, 0, k), b = fd.at(i, 1, k);
  return dot(a, a) + dot(b, b);
}

inline FrameField mollify(const FrameField& p, double cutoff_radius) {
  FrameField out(p.grid);
  for (int i = 0; i < 3; ++i) out.n[i] = mollify(p.n[i], cutoff_radius);
  return out;
}

}  // namespace biax
