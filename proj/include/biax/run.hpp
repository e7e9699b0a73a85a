#pragma once

// Drivers behind the command-line entry points: the time-stepping run with
// its CSV/snapshot/report output, the verify suites, and the coefficient check.

#include <algorithm>
#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "biax/config.hpp"
#include "biax/diagnostics.hpp"
#include "biax/initial.hpp"
#include "biax/integrator.hpp"
#include "biax/io.hpp"

namespace biax {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitSingularity = 2;
inline constexpr int kExitConfig = 3;

inline nlohmann::json to_json(const SingularityReport& r) {
  nlohmann::json j;
  j["detected"] = r.detected;
  j["t_last_good"] = r.t_last_good;
  j["trigger"] = trigger_name(r.trigger);
  j["message"] = r.message;
  auto& hs = j["hotspot_centers"] = nlohmann::json::array();
  for (const auto& p : r.hotspot_centers) hs.push_back({{"i", p.i}, {"j", p.j}});
  return j;
}

struct RunOptions {
  /// Overrides output.dir when non-empty.
  std::string out_dir;
  std::ostream* log = nullptr;
};

struct RunResult {
  int exit_code = kExitOk;
  long steps_taken = 0;
  SimState final_state;
  SingularityReport report;
  std::filesystem::path series_path;
  std::vector<DiagnosticsRecord> records;
};

namespace run_detail {

inline std::filesystem::path resolve(const std::filesystem::path& dir, const std::string& p) {
  const std::filesystem::path q(p);
  return q.is_absolute() ? q : dir / q;
}

/// Everything the CSV needs about one accepted state except the lagged residual.
struct Sample {
  DiagnosticsRecord rec;
  LocalScanResult scan;
};

inline std::string derived_echo(const ElasticCoefficients& e) {
  std::ostringstream o;
  o << std::setprecision(17);
  o << "# gamma = [" << e.gamma[0] << ", " << e.gamma[1] << ", " << e.gamma[2] << "]\n";
  o << "# k = [" << e.k_div[0] << ", " << e.k_div[1] << ", " << e.k_div[2] << "]\n";
  for (int i = 0; i < 3; ++i)
    o << "# k_" << i + 1 << "j = [" << e.k_twist[i][0] << ", " << e.k_twist[i][1] << ", " << e.k_twist[i][2] << "]\n";
  return o.str();
}

}  // namespace run_detail

inline RunResult run(const RunConfig& cfg, const RunOptions& opt = {}) {
  namespace fs = std::filesystem;
  RunResult res;
  const Model model = cfg.model();
  const GridPtr g = cfg.make_grid();
  IntegratorConfig icfg = cfg.integrator;
  const auto cutoff = icfg.mollify_cutoff;
  const bool freeze = icfg.freeze_velocity;

  const fs::path dir = opt.out_dir.empty() ? fs::path(cfg.output.dir) : fs::path(opt.out_dir);
  fs::create_directories(dir);
  res.series_path = run_detail::resolve(dir, cfg.output.series);
  if (res.series_path.has_parent_path()) fs::create_directories(res.series_path.parent_path());
  const fs::path snap_dir = run_detail::resolve(dir, cfg.output.snapshot_dir);
  if (cfg.output.snapshot_interval > 0) fs::create_directories(snap_dir);
  {
    std::ofstream echo(dir / "config_echo.toml");
    echo << serialize(cfg) << "\n# derived elastic coefficients\n" << run_detail::derived_echo(cfg.elastic);
  }

  InitialSpec spec = cfg.initial;
  spec.seed = cfg.seed;
  SimState s = make_initial(spec, g);
  if (cutoff) s = mollify_state(s, *cutoff);

  std::ofstream csv(res.series_path, std::ios::trunc);
  if (!csv) throw IoError("cannot write '" + res.series_path.string() + "'");
  csv << csv_header() << "\n";

  const LocalEnergyScanner scanner(g, cfg.diagnostics.R);
  double eps0 = 0.0;
  double blowup_integral = 0.0;
  std::deque<run_detail::Sample> window;
  long emitted = 0;
  SingularityReport& rep = res.report;

  auto snapshot = [&](const SimState& st) {
    if (cfg.output.snapshot_interval <= 0 || st.step_index % cfg.output.snapshot_interval != 0) return;
    char name[64];
    std::snprintf(name, sizeof name, "snap_%06ld.bxfh", st.step_index);
    write_snapshot((snap_dir / name).string(), st);
  };

  auto sample = [&](const SimState& st) {
    run_detail::Sample smp;
    auto& r = smp.rec;
    r.t = st.t;
    r.energy = total_energy(st, model, cutoff);
    r.dissipation = state_dissipation(st, model, cutoff, freeze);
    r.blowup_integrand = blowup_integrand(st);
    r.blowup_integral = blowup_integral;
    r.ortho_defect_max = max_orthonormality_defect(st.p);
    if (st.step_index == 0) eps0 = cfg.diagnostics.eps0.value_or(0.1 * r.energy.total);
    smp.scan = scanner.scan(local_energy_density(st), eps0);
    r.local_energy_max = smp.scan.max_local;
    r.energy_residual = std::nan("");
    return smp;
  };

  // Emits window[idx] with the residual from the three buffered samples.
  auto emit = [&](std::size_t idx) {
    auto& r = window[idx].rec;
    if (window.size() == 3) {
      const std::array<double, 3> t{window[0].rec.t, window[1].rec.t, window[2].rec.t};
      const std::array<double, 3> E{window[0].rec.energy.total, window[1].rec.energy.total, window[2].rec.energy.total};
      r.energy_residual = energy_law_residual(t, E, r.dissipation.total, static_cast<int>(idx));
    }
    csv << csv_row(r) << "\n";
    res.records.push_back(r);
    ++emitted;
    if (cfg.diagnostics.residual_threshold > 0.0 && r.energy_residual > cfg.diagnostics.residual_threshold &&
        !rep.detected) {
      rep.detected = true;
      rep.trigger = Trigger::EnergyResidual;
      rep.t_last_good = idx > 0 ? window[idx - 1].rec.t : r.t;
      rep.message = "energy-law residual " + csv_number(r.energy_residual) + " exceeds threshold";
    }
  };

  auto fail = [&](Trigger trig, const std::string& msg) {
    rep.detected = true;
    rep.trigger = trig;
    rep.t_last_good = s.t;
    rep.message = msg;
  };

  window.push_back(sample(s));
  snapshot(s);
  for (long n = 0; n < cfg.steps && !rep.detected; ++n) {
    SimState next;
    double dt = cfg.adaptive ? adaptive_dt(s, model, icfg) : icfg.dt;
    bool ok = false;
    try {
      for (int attempt = 0; attempt < 12 && !ok; ++attempt) {
        IntegratorConfig stepcfg = icfg;
        stepcfg.dt = dt;
        try {
          next = advance(s, model, stepcfg);
          ok = true;
        } catch (const StepRejected&) {
          dt *= 0.5;
        }
      }
      if (!ok) fail(Trigger::StepRejected, "step repeatedly rejected by the stability limit");
    } catch (const NonFinite& e) {
      fail(Trigger::NonFinite, e.what());
    } catch (const FrameDefect& e) {
      fail(Trigger::NonFinite, e.what());
    } catch (const DegenerateFrame& e) {
      fail(Trigger::NonFinite, e.what());
    }
    if (!ok) break;

    blowup_integral += (next.t - s.t) * window.back().rec.blowup_integrand;
    s = std::move(next);
    ++res.steps_taken;
    snapshot(s);
    window.push_back(sample(s));
    if (window.size() > 3) window.pop_front();
    if (window.size() == 3) {
      if (emitted == 0) emit(0);
      emit(1);
    }
    const auto& scan = window.back().scan;
    if (!rep.detected && cfg.diagnostics.stop_on_concentration && !scan.hotspots.empty()) {
      fail(Trigger::LocalConcentration, "local energy " + csv_number(scan.max_local) + " exceeds eps0 " + csv_number(eps0));
      rep.t_last_good = window.size() > 1 ? window[window.size() - 2].rec.t : s.t;
    }
    if (opt.log && (res.steps_taken % 100 == 0))
      *opt.log << "step " << res.steps_taken << " t=" << s.t << " E=" << window.back().rec.energy.total << "\n";
  }
  // flush the tail
  if (window.size() == 3) {
    emit(2);
  } else {
    for (std::size_t i = static_cast<std::size_t>(emitted); i < window.size(); ++i) emit(i);
  }

  if (rep.detected) {
    constexpr std::size_t kMaxCenters = 1000;
    const auto& hs = window.back().scan.hotspots;
    if (hs.empty()) {
      rep.hotspot_centers.push_back(window.back().scan.argmax);
    } else {
      rep.hotspot_centers.assign(hs.begin(), hs.begin() + static_cast<long>(std::min(hs.size(), kMaxCenters)));
    }
    std::ofstream(dir / "singularity_report.json") << to_json(rep).dump(2) << "\n";
    res.exit_code = kExitSingularity;
  }
  res.final_state = std::move(s);
  return res;
}

// ---------------------------------------------------------------------------
// verify

struct SuiteResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::vector<SuiteResult> suites;
  bool all_pass() const {
    return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.pass; });
  }
};

namespace verify_detail {

inline Mat3 random_mat(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Mat3 m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = nd(rng);
  return m;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

/// Below 24 points even band-1 test states alias; tolerances open up there.
inline bool small_grid(const Grid2D& g) { return std::min(g.nx(), g.ny()) < 24; }

/// Random test states keep about 21 grid points per shortest wavelength.
inline int test_band(const Grid2D& g) { return std::clamp(std::min(g.nx(), g.ny()) / 21, 1, 3); }

}  // namespace verify_detail

inline SuiteResult verify_decomposition(std::uint64_t seed, int trials = 1000) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Frame f = rotate_frame(Frame{}, random_rotation_vector(rng));
    const Mat3 A = verify_detail::random_mat(rng), B = verify_detail::random_mat(rng);
    const DecompositionCheck c = inner_decomposition_check(A, B, f);
    worst = std::max(worst, std::abs(c.lhs - c.rhs) / std::max(1.0, frob_norm(A) * frob_norm(B)));
  }
  return {"decomposition_identity", worst <= 1e-10, worst, 1e-10, std::to_string(trials) + " random triples"};
}

inline SuiteResult verify_gradient(const RunConfig& cfg, const GridPtr& g) {
  const bool small = verify_detail::small_grid(*g);
  const double tol = small ? 1e-5 : 1e-6;
  std::mt19937_64 rng(cfg.seed + 1);
  const int band = verify_detail::test_band(*g);
  const FrameField p = random_smooth_frame(g, rng, band, 0.5);
  const MolecularFields h = molecular_fields(p, cfg.elastic);
  double worst = 0.0;
  for (int d = 0; d < 3; ++d) {
    const FrameDirection dir = random_smooth_direction(g, rng, band);
    const double fd = gradient_check_oracle(p, cfg.elastic, dir, 1e-5);
    const double pred = predicted_variation(h, dir);
    worst = std::max(worst, std::abs(fd - pred) / std::max(std::abs(pred), 1e-12));
  }
  return {"gradient_check", worst <= tol, worst, tol, "central difference, eps = 1e-5"};
}

inline SuiteResult verify_energy_forms(const RunConfig& cfg, const GridPtr& g) {
  const double tol = 1e-9;
  std::mt19937_64 rng(cfg.seed + 2);
  const FrameField p = random_smooth_frame(g, rng, verify_detail::test_band(*g), 0.5);
  const EnergyBreakdown b = energy_breakdown(p, cfg.elastic);
  const double scale = std::max(std::abs(b.original_total), 1e-300);
  double worst = std::abs(b.original_total - b.rewritten_total) / scale;
  for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(b.per_term[12 + i]) / scale);
  return {"energy_form_equivalence", worst <= tol, worst, tol, "original vs rewritten density, surface terms"};
}

inline SuiteResult verify_leray_mollifier(const RunConfig& cfg, const GridPtr& g) {
  const double tol = 1e-12;
  std::mt19937_64 rng(cfg.seed + 3);
  VelocityField w(g);
  for (auto& c : w.c) c = random_smooth_scalar(g, rng, verify_detail::test_band(*g), 1.0).values;
  const VelocityField P = leray_project(w);
  const VelocityField PP = leray_project(P);
  const double scale = std::max(l2_norm(w), 1e-300);
  double worst = 0.0;
  // idempotence
  for (int a = 0; a < 2; ++a)
    for (std::size_t k = 0; k < P.size(); ++k) worst = std::max(worst, std::abs(P.c[a][k] - PP.c[a][k]) / scale);
  // divergence-free
  worst = std::max(worst, spectral_l2_norm(divergence(P)) / scale);
  // orthogonality of the removed gradient part
  VelocityField Q(g);
  for (int a = 0; a < 2; ++a)
    for (std::size_t k = 0; k < P.size(); ++k) Q.c[a][k] = w.c[a][k] - P.c[a][k];
  worst = std::max(worst, std::abs(inner(P, Q)) / (scale * scale));
  // mollifier: identity beyond the resolved band, commutes with projection
  const VelocityField J = mollify(w, 2.0 * g->max_wavenumber());
  for (int a = 0; a < 2; ++a)
    for (std::size_t k = 0; k < P.size(); ++k) worst = std::max(worst, std::abs(J.c[a][k] - w.c[a][k]) / scale);
  const double cut = 0.25 * g->max_wavenumber();
  const VelocityField JP = mollify(P, cut), PJ = leray_project(mollify(w, cut));
  for (int a = 0; a < 2; ++a)
    for (std::size_t k = 0; k < P.size(); ++k) worst = std::max(worst, std::abs(JP.c[a][k] - PJ.c[a][k]) / scale);
  return {"leray_mollifier_algebra", worst <= tol, worst, tol, "idempotence, divergence, orthogonality, commutation"};
}

inline SuiteResult verify_energy_law(const RunConfig& cfg, const GridPtr& g) {
  const bool small = verify_detail::small_grid(*g);
  const double tol = small ? 1e-3 : 1e-8;
  std::mt19937_64 rng(cfg.seed + 4);
  const int band = verify_detail::test_band(*g);
  SimState s;
  s.p = random_smooth_frame(g, rng, band, 0.5);
  s.v = random_smooth_velocity(g, rng, band, 0.3);
  const EnergyRate er = energy_rate(s, cfg.model());
  return {"energy_law_residual", er.residual <= tol, er.residual, tol, "semi-discrete dE/dt + D"};
}

inline VerifyReport verify(const RunConfig& cfg) {
  const GridPtr g = cfg.make_grid();
  VerifyReport r;
  r.suites.push_back(verify_decomposition(cfg.seed));
  r.suites.push_back(verify_gradient(cfg, g));
  r.suites.push_back(verify_energy_forms(cfg, g));
  r.suites.push_back(verify_leray_mollifier(cfg, g));
  r.suites.push_back(verify_energy_law(cfg, g));
  return r;
}

inline void print_verify(const VerifyReport& r, std::ostream& out) {
  for (const auto& s : r.suites)
    out << (s.pass ? "PASS " : "FAIL ") << s.name << "  measured " << std::setprecision(3) << std::scientific << s.measured
        << "  tolerance " << s.tolerance << std::defaultfloat << "  (" << s.detail << ")\n";
}

// ---------------------------------------------------------------------------
// check-coeffs

struct CoefficientCheck {
  bool elastic_ok = false;
  std::string elastic_message;
  ElasticCoefficients elastic;
  AdmissibilityReport hydro;
  bool admissible() const { return elastic_ok && hydro.admissible(); }
};

inline CoefficientCheck check_coefficients(const RunConfig& cfg) {
  CoefficientCheck c;
  try {
    c.elastic = derive_coefficients(cfg.K);
    c.elastic_ok = true;
  } catch (const InvalidCoefficients& e) {
    c.elastic_message = e.what();
  }
  c.hydro = validate_coefficients(cfg.hydro);
  return c;
}

inline void print_coefficient_check(const CoefficientCheck& c, std::ostream& out) {
  if (c.elastic_ok) {
    out << "PASS elastic K\n" << run_detail::derived_echo(c.elastic);
  } else {
    out << "FAIL elastic K: " << c.elastic_message << "\n";
  }
  for (const auto& ch : c.hydro.checks)
    out << (ch.pass ? "PASS " : "FAIL ") << ch.inequality << "  margin " << std::setprecision(6) << ch.margin << "\n";
  out << (c.admissible() ? "admissible\n" : "not admissible\n");
}

}  // namespace biax
