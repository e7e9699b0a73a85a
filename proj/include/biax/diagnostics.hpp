#pragma once

// Energies, energy-law residuals, blow-up criterion accumulation and the
// local-energy concentration scan.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "biax/elasticity.hpp"
#include "biax/frame.hpp"
#include "biax/grid.hpp"
#include "biax/hydro.hpp"
#include "biax/integrator.hpp"

namespace biax {

struct EnergyTotals {
  double total = 0.0;
  double kinetic = 0.0;
  double elastic = 0.0;
};

/// E = int(f + |v|^2/2). With a cutoff, the energy of the mollified system (elastic part on J n).
inline EnergyTotals total_energy(const SimState& s, const Model& m, std::optional<double> cutoff = std::nullopt) {
  EnergyTotals e;
  e.kinetic = 0.5 * inner(s.v, s.v);
  e.elastic = cutoff ? elastic_energy_unchecked(mollify(s.p, *cutoff), m.elastic)
                     : elastic_energy_unchecked(s.p, m.elastic);
  e.total = e.kinetic + e.elastic;
  return e;
}

inline DissipationTerms state_dissipation(const SimState& s, const Model& m, std::optional<double> cutoff = std::nullopt,
                                          bool freeze_velocity = false) {
  return cutoff ? energy_rate_friedrich(s, m, *cutoff, freeze_velocity).D : energy_rate(s, m, freeze_velocity).D;
}

/// Derivative at times[at] of the quadratic through three (t, E) samples.
inline double three_point_derivative(const std::array<double, 3>& t, const std::array<double, 3>& E, int at) {
  const double h0 = t[1] - t[0], h1 = t[2] - t[1];
  switch (at) {
    case 0:
      return -(2 * h0 + h1) / (h0 * (h0 + h1)) * E[0] + (h0 + h1) / (h0 * h1) * E[1] - h0 / (h1 * (h0 + h1)) * E[2];
    case 1:
      return -h1 / (h0 * (h0 + h1)) * E[0] + (h1 - h0) / (h0 * h1) * E[1] + h0 / (h1 * (h0 + h1)) * E[2];
    default:
      return h1 / (h0 * (h0 + h1)) * E[0] - (h0 + h1) / (h0 * h1) * E[1] + (2 * h1 + h0) / (h1 * (h0 + h1)) * E[2];
  }
}

/// |dE/dt + D| / max(D, floor) at sample `at` from cached energies and dissipation.
inline double energy_law_residual(const std::array<double, 3>& t, const std::array<double, 3>& E, double D, int at = 1) {
  const double dEdt = three_point_derivative(t, E, at);
  return std::abs(dEdt + D) / std::max(D, residual_floor(E[at]));
}

/// Residual of the energy law at the middle of three consecutive states.
inline double energy_law_residual(std::span<const SimState> window, const Model& m,
                                  std::optional<double> cutoff = std::nullopt, bool freeze_velocity = false) {
  if (window.size() != 3) throw Error("energy_law_residual needs exactly three states");
  std::array<double, 3> t{}, E{};
  for (int i = 0; i < 3; ++i) {
    t[i] = window[i].t;
    E[i] = total_energy(window[i], m, cutoff).total;
  }
  if (!(t[1] > t[0] && t[2] > t[1])) throw Error("energy_law_residual: times must increase");
  return energy_law_residual(t, E, state_dissipation(window[1], m, cutoff, freeze_velocity).total, 1);
}

// ---------------------------------------------------------------------------

struct BlowupParts {
  double vorticity_max = 0.0;
  std::array<double, 3> grad_sq_max{};
  double integrand = 0.0;
};

/// max|curl v| + sum_i max|grad n_i|^2 (grid max norms).
inline BlowupParts blowup_parts(const SimState& s) {
  BlowupParts b;
  b.vorticity_max = max_abs(vorticity(s.v).values);
  const FrameDerivatives fd = frame_derivatives(s.p);
  for (int i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < s.p.size(); ++k) b.grad_sq_max[i] = std::max(b.grad_sq_max[i], grad_sq_at(fd, i, k));
  b.integrand = b.vorticity_max + b.grad_sq_max[0] + b.grad_sq_max[1] + b.grad_sq_max[2];
  return b;
}

inline double blowup_integrand(const SimState& s) { return blowup_parts(s).integrand; }

/// Left-Riemann update of the running blow-up integral.
inline double blowup_monitor(const SimState& s, double running, double dt) {
  return running + dt * blowup_integrand(s);
}

// ---------------------------------------------------------------------------

/// |grad p|^2 + |v|^2 pointwise.
inline ScalarField local_energy_density(const SimState& s) {
  const FrameDerivatives fd = frame_derivatives(s.p);
  ScalarField e(s.p.grid);
  for (std::size_t k = 0; k < e.size(); ++k) {
    e[k] = grad_sq_at(fd, 0, k) + grad_sq_at(fd, 1, k) + grad_sq_at(fd, 2, k) + s.v.c[0][k] * s.v.c[0][k] +
           s.v.c[1][k] * s.v.c[1][k];
  }
  return e;
}

struct GridPoint {
  int i = 0;
  int j = 0;
  bool operator==(const GridPoint&) const = default;
};

struct LocalScanResult {
  double max_local = 0.0;
  GridPoint argmax;
  std::vector<GridPoint> hotspots;
  ScalarField local;
};

/// Disc integrals over every grid centre at once, by circular convolution with
/// the grid-sampled indicator of the periodic disc of radius R.
class LocalEnergyScanner {
 public:
  LocalEnergyScanner(GridPtr g, double R) : grid_(std::move(g)), R_(R) {
    if (!(R > 0.0)) throw Error("local_energy_scan: R must be positive");
    std::vector<double> disc(grid_->size(), 0.0);
    for (int j = 0; j < grid_->ny(); ++j)
      for (int i = 0; i < grid_->nx(); ++i)
        disc[grid_->index(i, j)] = periodic_dist2(i, j) <= R * R * (1.0 + 1e-12) ? 1.0 : 0.0;
    disc_hat_ = grid_->forward(disc);
  }

  double R() const { return R_; }

  /// Squared periodic distance from grid point (i, j) to the origin.
  double periodic_dist2(int i, int j) const {
    const double x = std::min(i, grid_->nx() - i) * grid_->dx();
    const double y = std::min(j, grid_->ny() - j) * grid_->dy();
    return x * x + y * y;
  }

  LocalScanResult scan(const ScalarField& density, double eps0) const {
    const Grid2D& g = *grid_;
    Spectrum h = g.forward(density.values);
    for (std::size_t s = 0; s < h.size(); ++s) h[s] *= disc_hat_[s];
    LocalScanResult r;
    r.local = ScalarField(grid_, g.inverse(h));
    for (auto& v : r.local.values) v *= g.cell_area();
    r.max_local = -1.0;
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        const double v = r.local[g.index(i, j)];
        if (v > r.max_local) {
          r.max_local = v;
          r.argmax = {i, j};
        }
        if (v > eps0) r.hotspots.push_back({i, j});
      }
    return r;
  }

 private:
  GridPtr grid_;
  double R_;
  Spectrum disc_hat_;
};

inline LocalScanResult local_energy_scan(const SimState& s, double R, double eps0) {
  return LocalEnergyScanner(s.p.grid, R).scan(local_energy_density(s), eps0);
}

// ---------------------------------------------------------------------------

struct DiagnosticsRecord {
  double t = 0.0;
  EnergyTotals energy;
  DissipationTerms dissipation;
  double energy_residual = 0.0;
  double blowup_integrand = 0.0;
  double blowup_integral = 0.0;
  double ortho_defect_max = 0.0;
  double local_energy_max = 0.0;
};

enum class Trigger { None, NonFinite, EnergyResidual, LocalConcentration, StepRejected };

inline const char* trigger_name(Trigger t) {
  switch (t) {
    case Trigger::NonFinite: return "NonFinite";
    case Trigger::EnergyResidual: return "EnergyResidual";
    case Trigger::LocalConcentration: return "LocalConcentration";
    case Trigger::StepRejected: return "StepRejected";
    default: return "None";
  }
}

struct SingularityReport {
  bool detected = false;
  double t_last_good = 0.0;
  Trigger trigger = Trigger::None;
  std::vector<GridPoint> hotspot_centers;
  std::string message;
};

}  // namespace biax
