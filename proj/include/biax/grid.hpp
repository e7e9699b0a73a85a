#pragma once

// Periodic 2D grid, FFTW-backed transforms, field containers and the spectral
// operators (derivatives, curl, Leray projection, mollification, Poisson
// inversion) every other module is built on.
//
// Spectral layout follows FFTW's r2c convention: ny rows of (nx/2 + 1)
// complex coefficients, index s = j * (nx/2 + 1) + i.

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "biax/errors.hpp"
#include "biax/tensor3.hpp"

#if defined(_OPENMP)
#define BIAX_PARALLEL_FOR _Pragma("omp parallel for schedule(static)")
#else
#define BIAX_PARALLEL_FOR
#endif

namespace biax {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

namespace detail {
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

class Grid2D {
 public:
  Grid2D(int nx, int ny, double lx, double ly, double dealias_fraction = 2.0 / 3.0)
      : nx_(nx), ny_(ny), lx_(lx), ly_(ly), dealias_(dealias_fraction) {
    if (nx < 8 || ny < 8 || nx % 2 != 0 || ny % 2 != 0)
      throw ValidationError("grid sizes must be even and >= 8 (got " + std::to_string(nx) + "x" +
                            std::to_string(ny) + ")");
    if (!(lx > 0.0) || !(ly > 0.0)) throw ValidationError("domain lengths lx, ly must be positive");
    if (!(dealias_fraction > 0.0) || dealias_fraction > 1.0)
      throw ValidationError("dealias_fraction must lie in (0, 1]");

    nxh_ = nx_ / 2 + 1;
    const std::size_t ns = spectral_size();
    kx_.resize(ns);
    ky_.resize(ns);
    k2_.resize(ns);
    mask_.resize(ns);
    const int kcx = static_cast<int>(std::floor(dealias_fraction * nx_ / 2 + 1e-12));
    const int kcy = static_cast<int>(std::floor(dealias_fraction * ny_ / 2 + 1e-12));
    for (int j = 0; j < ny_; ++j) {
      const int my = (j <= ny_ / 2) ? j : j - ny_;
      for (int i = 0; i < nxh_; ++i) {
        const std::size_t s = static_cast<std::size_t>(j) * nxh_ + i;
        kx_[s] = 2.0 * std::numbers::pi * i / lx_;
        ky_[s] = 2.0 * std::numbers::pi * my / ly_;
        k2_[s] = kx_[s] * kx_[s] + ky_[s] * ky_[s];
        const bool keep = i <= kcx && i < nx_ / 2 && std::abs(my) <= kcy && j != ny_ / 2;
        mask_[s] = keep ? 1.0 : 0.0;
        if (keep) kmax2_masked_ = std::max(kmax2_masked_, k2_[s]);
      }
    }

    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    double* rbuf = fftw_alloc_real(size());
    fftw_complex* cbuf = fftw_alloc_complex(ns);
    fwd_ = fftw_plan_dft_r2c_2d(ny_, nx_, rbuf, cbuf, FFTW_ESTIMATE | FFTW_UNALIGNED);
    inv_ = fftw_plan_dft_c2r_2d(ny_, nx_, cbuf, rbuf, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(rbuf);
    fftw_free(cbuf);
  }

  Grid2D(const Grid2D&) = delete;
  Grid2D& operator=(const Grid2D&) = delete;

  ~Grid2D() {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
  }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }
  double dealias_fraction() const { return dealias_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }
  std::size_t spectral_size() const { return static_cast<std::size_t>(ny_) * nxh_; }
  int nx_half() const { return nxh_; }

  double dx() const { return lx_ / nx_; }
  double dy() const { return ly_ / ny_; }
  double cell_area() const { return dx() * dy(); }
  double area() const { return lx_ * ly_; }
  double x(int i) const { return i * dx(); }
  double y(int j) const { return j * dy(); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }

  /// Wavenumber components and |k|^2 of spectral coefficient s.
  double kx(std::size_t s) const { return kx_[s]; }
  double ky(std::size_t s) const { return ky_[s]; }
  double k(std::size_t s, int axis) const { return axis == 1 ? kx_[s] : ky_[s]; }
  double k2(std::size_t s) const { return k2_[s]; }
  /// 1 for modes kept by the dealiasing rule, 0 otherwise (Nyquist modes always 0).
  double mask(std::size_t s) const { return mask_[s]; }
  /// Largest |k|^2 among kept modes.
  double max_masked_k2() const { return kmax2_masked_; }
  /// Largest |k| representable on the grid (the Nyquist corner).
  double max_wavenumber() const {
    const double kxn = std::numbers::pi * nx_ / lx_;
    const double kyn = std::numbers::pi * ny_ / ly_;
    return std::sqrt(kxn * kxn + kyn * kyn);
  }
  /// Multiplicity of a half-spectrum coefficient in the full spectrum.
  double hermitian_weight(std::size_t s) const {
    const int i = static_cast<int>(s % nxh_);
    return (i == 0 || i == nx_ / 2) ? 1.0 : 2.0;
  }

  /// Unnormalized real-to-complex transform.
  void forward(std::span<const double> in, std::span<Complex> out) const {
    fftw_execute_dft_r2c(fwd_, const_cast<double*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
  }
  /// Complex-to-real inverse, normalized so inverse(forward(f)) == f.
  void inverse(std::span<const Complex> in, std::span<double> out) const {
    Spectrum scratch(in.begin(), in.end());
    fftw_execute_dft_c2r(inv_, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
    const double inv_n = 1.0 / static_cast<double>(size());
    for (auto& v : out) v *= inv_n;
  }

  Spectrum forward(std::span<const double> in) const {
    Spectrum out(spectral_size());
    forward(in, out);
    return out;
  }
  std::vector<double> inverse(std::span<const Complex> in) const {
    std::vector<double> out(size());
    inverse(in, out);
    return out;
  }

 private:
  int nx_, ny_;
  double lx_, ly_;
  double dealias_;
  int nxh_ = 0;
  std::vector<double> kx_, ky_, k2_, mask_;
  double kmax2_masked_ = 0.0;
  fftw_plan fwd_ = nullptr;
  fftw_plan inv_ = nullptr;
};

using GridPtr = std::shared_ptr<const Grid2D>;

inline GridPtr make_grid(int nx, int ny, double lx, double ly, double dealias_fraction = 2.0 / 3.0) {
  return std::make_shared<const Grid2D>(nx, ny, lx, ly, dealias_fraction);
}

struct ScalarField {
  GridPtr grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(GridPtr g) : grid(std::move(g)), values(grid->size(), 0.0) {}
  ScalarField(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t k) { return values[k]; }
  double operator[](std::size_t k) const { return values[k]; }
};

/// Field of R^3 vectors on the planar grid (no dependence on x3), component-major storage.
struct Vec3Field {
  GridPtr grid;
  std::array<std::vector<double>, 3> c;

  Vec3Field() = default;
  explicit Vec3Field(GridPtr g) : grid(std::move(g)) {
    for (auto& comp : c) comp.assign(grid->size(), 0.0);
  }

  std::size_t size() const { return c[0].size(); }
  Vec3 at(std::size_t k) const { return {c[0][k], c[1][k], c[2][k]}; }
  void set(std::size_t k, const Vec3& v) {
    c[0][k] = v[0];
    c[1][k] = v[1];
    c[2][k] = v[2];
  }
};

/// Planar velocity (v1, v2), v3 = 0 implied.
struct VelocityField {
  GridPtr grid;
  std::array<std::vector<double>, 2> c;

  VelocityField() = default;
  explicit VelocityField(GridPtr g) : grid(std::move(g)) {
    for (auto& comp : c) comp.assign(grid->size(), 0.0);
  }
  std::size_t size() const { return c[0].size(); }
};

// ---------------------------------------------------------------------------
// Reductions. All integrals use the grid quadrature (cell area weights), which
// is spectrally exact for band-limited integrands.

inline double integrate(const Grid2D& g, std::span<const double> f) {
  double s = 0.0;
  for (double v : f) s += v;
  return s * g.cell_area();
}

inline double inner(const Grid2D& g, std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s * g.cell_area();
}

inline double inner(const ScalarField& a, const ScalarField& b) { return inner(*a.grid, a.values, b.values); }
inline double inner(const Vec3Field& a, const Vec3Field& b) {
  return inner(*a.grid, a.c[0], b.c[0]) + inner(*a.grid, a.c[1], b.c[1]) + inner(*a.grid, a.c[2], b.c[2]);
}
inline double inner(const VelocityField& a, const VelocityField& b) {
  return inner(*a.grid, a.c[0], b.c[0]) + inner(*a.grid, a.c[1], b.c[1]);
}

inline double l2_norm(const ScalarField& f) { return std::sqrt(inner(f, f)); }
inline double l2_norm(const Vec3Field& f) { return std::sqrt(inner(f, f)); }
inline double l2_norm(const VelocityField& f) { return std::sqrt(inner(f, f)); }

inline double max_abs(std::span<const double> f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

inline double mean(const ScalarField& f) { return integrate(*f.grid, f.values) / f.grid->area(); }

inline bool all_finite(std::span<const double> f) {
  return std::all_of(f.begin(), f.end(), [](double v) { return std::isfinite(v); });
}

/// L2 norm computed from Fourier coefficients (Parseval).
inline double spectral_l2_norm(const ScalarField& f) {
  const Grid2D& g = *f.grid;
  const Spectrum fh = g.forward(f.values);
  double s = 0.0;
  for (std::size_t k = 0; k < fh.size(); ++k) s += g.hermitian_weight(k) * std::norm(fh[k]);
  const double n = static_cast<double>(g.size());
  return std::sqrt(s * g.area() / (n * n));
}

// ---------------------------------------------------------------------------
// Spectral-space kernels. These are the building blocks; the field-level
// operators below wrap them.

namespace spectral {

/// out = (i k_axis * mask) * in.
inline void derivative(const Grid2D& g, std::span<const Complex> in, int axis, std::span<Complex> out) {
  const Complex I(0.0, 1.0);
  for (std::size_t s = 0; s < in.size(); ++s) out[s] = I * (g.k(s, axis) * g.mask(s)) * in[s];
}

inline Spectrum derivative(const Grid2D& g, std::span<const Complex> in, int axis) {
  Spectrum out(in.size());
  derivative(g, in, axis, out);
  return out;
}

/// Dealiased Laplacian, the composition of the two masked first derivatives.
inline void laplacian(const Grid2D& g, std::span<const Complex> in, std::span<Complex> out) {
  for (std::size_t s = 0; s < in.size(); ++s) out[s] = -g.k2(s) * g.mask(s) * in[s];
}

inline void apply_mask(const Grid2D& g, std::span<Complex> f) {
  for (std::size_t s = 0; s < f.size(); ++s) f[s] *= g.mask(s);
}

/// Leray projection of the planar pair (u1, u2): u - k (k.u) / |k|^2, mean untouched.
inline void leray(const Grid2D& g, std::span<Complex> u1, std::span<Complex> u2) {
  for (std::size_t s = 0; s < u1.size(); ++s) {
    const double k2 = g.k2(s);
    if (k2 == 0.0) continue;
    const double kx = g.kx(s), ky = g.ky(s);
    const Complex kdotu = kx * u1[s] + ky * u2[s];
    u1[s] -= kx * kdotu / k2;
    u2[s] -= ky * kdotu / k2;
  }
}

}  // namespace spectral

/// Smooth cut-off: 1 on [0,1], cos^2(pi (r-1)/2) on (1,2), 0 beyond.
inline double mollifier_symbol(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double c = std::cos(0.5 * std::numbers::pi * (r - 1.0));
  return c * c;
}

namespace spectral {
inline void mollify(const Grid2D& g, std::span<Complex> f, double cutoff_radius) {
  for (std::size_t s = 0; s < f.size(); ++s) f[s] *= mollifier_symbol(std::sqrt(g.k2(s)) / cutoff_radius);
}
}  // namespace spectral

// ---------------------------------------------------------------------------
// Field-level operators.

/// Spectral partial derivative along axis 1 (x) or 2 (y), dealiased.
inline ScalarField ddx(const ScalarField& f, int axis) {
  const Grid2D& g = *f.grid;
  if (axis != 1 && axis != 2) throw Error("ddx: axis must be 1 or 2");
  const Spectrum fh = g.forward(f.values);
  return ScalarField(f.grid, g.inverse(spectral::derivative(g, fh, axis)));
}

inline ScalarField laplacian(const ScalarField& f) {
  const Grid2D& g = *f.grid;
  Spectrum fh = g.forward(f.values);
  spectral::laplacian(g, fh, fh);
  return ScalarField(f.grid, g.inverse(fh));
}

/// Curl of a planar R^3 field with d/dx3 = 0: (d2 u3, -d1 u3, d1 u2 - d2 u1).
inline Vec3Field curl3(const Vec3Field& u) {
  const Grid2D& g = *u.grid;
  const Spectrum u1 = g.forward(u.c[0]), u2 = g.forward(u.c[1]), u3 = g.forward(u.c[2]);
  Spectrum r1(u1.size()), r2(u1.size()), r3(u1.size());
  const Complex I(0.0, 1.0);
  for (std::size_t s = 0; s < u1.size(); ++s) {
    const Complex dx = I * g.kx(s) * g.mask(s), dy = I * g.ky(s) * g.mask(s);
    r1[s] = dy * u3[s];
    r2[s] = -dx * u3[s];
    r3[s] = dx * u2[s] - dy * u1[s];
  }
  Vec3Field out(u.grid);
  g.inverse(r1, out.c[0]);
  g.inverse(r2, out.c[1]);
  g.inverse(r3, out.c[2]);
  return out;
}

/// Spectral divergence of a planar R^3 field (third component does not contribute).
inline ScalarField div3(const Vec3Field& u) {
  const Grid2D& g = *u.grid;
  const Spectrum u1 = g.forward(u.c[0]), u2 = g.forward(u.c[1]);
  Spectrum r(u1.size());
  const Complex I(0.0, 1.0);
  for (std::size_t s = 0; s < u1.size(); ++s) r[s] = I * g.mask(s) * (g.kx(s) * u1[s] + g.ky(s) * u2[s]);
  return ScalarField(u.grid, g.inverse(r));
}

inline ScalarField divergence(const VelocityField& v) {
  const Grid2D& g = *v.grid;
  const Spectrum u1 = g.forward(v.c[0]), u2 = g.forward(v.c[1]);
  Spectrum r(u1.size());
  const Complex I(0.0, 1.0);
  for (std::size_t s = 0; s < u1.size(); ++s) r[s] = I * g.mask(s) * (g.kx(s) * u1[s] + g.ky(s) * u2[s]);
  return ScalarField(v.grid, g.inverse(r));
}

/// Scalar vorticity d1 v2 - d2 v1.
inline ScalarField vorticity(const VelocityField& v) {
  const Grid2D& g = *v.grid;
  const Spectrum u1 = g.forward(v.c[0]), u2 = g.forward(v.c[1]);
  Spectrum r(u1.size());
  const Complex I(0.0, 1.0);
  for (std::size_t s = 0; s < u1.size(); ++s) r[s] = I * g.mask(s) * (g.kx(s) * u2[s] - g.ky(s) * u1[s]);
  return ScalarField(v.grid, g.inverse(r));
}

/// Leray projection P w = w - grad(lap^{-1} div w).
inline VelocityField leray_project(const VelocityField& w) {
  const Grid2D& g = *w.grid;
  Spectrum u1 = g.forward(w.c[0]), u2 = g.forward(w.c[1]);
  spectral::leray(g, u1, u2);
  VelocityField out(w.grid);
  g.inverse(u1, out.c[0]);
  g.inverse(u2, out.c[1]);
  return out;
}

/// Friedrichs mollifier with Fourier symbol phi(|k| / cutoff_radius).
inline ScalarField mollify(const ScalarField& f, double cutoff_radius) {
  if (!(cutoff_radius > 0.0)) throw Error("mollify: cutoff_radius must be positive");
  const Grid2D& g = *f.grid;
  Spectrum fh = g.forward(f.values);
  spectral::mollify(g, fh, cutoff_radius);
  return ScalarField(f.grid, g.inverse(fh));
}

inline Vec3Field mollify(const Vec3Field& f, double cutoff_radius) {
  Vec3Field out(f.grid);
  for (int a = 0; a < 3; ++a) out.c[a] = mollify(ScalarField(f.grid, f.c[a]), cutoff_radius).values;
  return out;
}

inline VelocityField mollify(const VelocityField& f, double cutoff_radius) {
  VelocityField out(f.grid);
  for (int a = 0; a < 2; ++a) out.c[a] = mollify(ScalarField(f.grid, f.c[a]), cutoff_radius).values;
  return out;
}

/// Zero-mean solution u of lap u = f - mean(f).
inline ScalarField invert_laplacian(const ScalarField& f) {
  const Grid2D& g = *f.grid;
  Spectrum fh = g.forward(f.values);
  for (std::size_t s = 0; s < fh.size(); ++s) fh[s] = g.k2(s) == 0.0 ? Complex(0.0) : -fh[s] / g.k2(s);
  return ScalarField(f.grid, g.inverse(fh));
}

/// Removes the modes discarded by the dealiasing rule.
inline VelocityField dealias(const VelocityField& v) {
  const Grid2D& g = *v.grid;
  VelocityField out(v.grid);
  for (int a = 0; a < 2; ++a) {
    Spectrum h = g.forward(v.c[a]);
    spectral::apply_mask(g, h);
    g.inverse(h, out.c[a]);
  }
  return out;
}

}  // namespace biax
