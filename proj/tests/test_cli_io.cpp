#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_util.hpp"

using namespace biax;
using namespace biax::testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("biax_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(BIAX_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string config_path(const std::string& name) { return std::string(BIAX_CONFIG_DIR) + "/" + name; }

template <class E>
std::string error_of(const std::string& text) {
  try {
    load_config_text(text);
  } catch (const E& e) {
    return e.what();
  }
  return "<no error>";
}

}  // namespace

// --- configuration ---------------------------------------------------------

TEST(Config, MinimalDecoupledConfigLoads) {
  const RunConfig c = load_config_text(
      "[elastic]\nK = [1,1,1,1,1,1,1,1,1,1,1,1]\n"
      "[hydro]\nbeta = [0, 1, 1, 1, 1, 1]\neta_rot = [0, 0, 0]\n");
  EXPECT_TRUE(validate_coefficients(c.hydro).admissible());
  EXPECT_EQ(c.grid.nx, 128);
  EXPECT_NEAR(c.grid.lx, kTwoPi, 1e-15);
  for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(c.elastic.gamma[i], 1.0);
}

TEST(Config, DefaultsMatchDocumentedValues) {
  const RunConfig c = load_config_text("");
  EXPECT_EQ(c.hydro.beta, (std::array<double, 6>{0.3, 1, 1, 1, 1, 1}));
  EXPECT_EQ(c.hydro.eta, 1.0);
  EXPECT_EQ(c.hydro.eta_rot, (std::array<double, 3>{0.5, 0.5, 0.5}));
  EXPECT_EQ(c.hydro.chi, (std::array<double, 3>{1, 1, 1}));
  EXPECT_EQ(c.grid.nx, 128);
  EXPECT_EQ(c.grid.ny, 128);
}

TEST(Config, NegativeK4IsNamed) {
  const std::string msg = error_of<ValidationError>("[elastic]\n\nK = [1,1,1,-1,1,1,1,1,1,1,1,1]\n");
  EXPECT_NE(msg.find("K₄"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(Config, EtaThreeInequalityIsNamed) {
  const std::string msg = error_of<ValidationError>(
      "[hydro]\nbeta = [0.3, 1, 1, 0.5, 1, 1]\neta_rot = [0.5, 0.5, 0.8]\nchi = [1, 1, 1]\n");
  EXPECT_NE(msg.find("η₃² ≤ β₃χ₃"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(Config, BetaZeroInequalityIsNamed) {
  const std::string msg = error_of<ValidationError>("seed = 1\n[hydro]\nbeta = [2, 1, 1, 1, 1, 1]\n");
  EXPECT_NE(msg.find("β₀² ≤ β₁β₂"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(Config, ParseErrorsCarryLines) {
  std::string msg = error_of<ParseError>("[grid]\nnx = 32\nthis is not a key\n");
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  msg = error_of<ParseError>("[grid]\nnz = 32\n");
  EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
  EXPECT_NE(msg.find("grid.nz"), std::string::npos) << msg;
  msg = error_of<ParseError>("[grid]\nnx = \"wide\"\n");
  EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
  EXPECT_NE(error_of<ParseError>("[hydro]\nbeta = [1, 2]\n"), "<no error>");
  EXPECT_NE(error_of<ParseError>("[integrator]\nscheme = \"euler\"\n"), "<no error>");
}

TEST(Config, GridAndIntegratorValidation) {
  EXPECT_NE(error_of<ValidationError>("[grid]\nnx = 7\n").find("line 2"), std::string::npos);
  EXPECT_NE(error_of<ValidationError>("[grid]\nny = 4\n"), "<no error>");
  EXPECT_NE(error_of<ValidationError>("[integrator]\ndt = 0\n"), "<no error>");
  EXPECT_NE(error_of<ValidationError>("[integrator]\ncfl_safety = 1.5\n"), "<no error>");
  EXPECT_NE(error_of<ValidationError>("[initial]\nframe = \"spiral\"\n"), "<no error>");
  EXPECT_NE(error_of<ValidationError>("[diagnostics]\nR = 2.0\n").find("R ≤"), std::string::npos);
}

TEST(Config, PiLiteralsAndSchemes) {
  const RunConfig c = load_config_text("[grid]\nlx = 2pi\nly = pi\n[integrator]\nscheme = \"explicit_rk2_lie\"\n");
  EXPECT_DOUBLE_EQ(c.grid.lx, kTwoPi);
  EXPECT_DOUBLE_EQ(c.grid.ly, kTwoPi / 2.0);
  EXPECT_EQ(c.integrator.scheme, Scheme::rk2);
}

TEST(Config, SerializeRoundTrip) {
  const std::string text =
      "seed = 9\n[grid]\nnx = 48\nny = 32\nlx = 2pi\nly = 3.3\n[elastic]\nK = [1.3, 1.1, 1.7, 2.0, 1.5, 1.9, 2.3, 1.2, "
      "2.6, 1.4, 2.9, 1.8]\n[hydro]\nbeta = [0.4, 1.2, 0.9, 1.1, 0.8, 1.3]\neta = 0.7\n"
      "[integrator]\nscheme = \"rk2\"\ndt = 0.1\nmollify_cutoff = 3.25\nfreeze_velocity = true\n"
      "[initial]\nframe = \"twist\"\nframe_amplitude = 0.123456789012345\n"
      "[diagnostics]\neps0 = 0.02\nstop_on_concentration = true\n";
  const RunConfig a = load_config_text(text);
  const std::string once = serialize(a);
  const RunConfig b = load_config_text(once);
  EXPECT_EQ(serialize(b), once);
  EXPECT_EQ(b.seed, 9u);
  EXPECT_EQ(b.grid.ly, 3.3);
  EXPECT_EQ(b.K, a.K);
  EXPECT_EQ(b.integrator.mollify_cutoff, 3.25);
  EXPECT_EQ(b.initial.frame_amplitude, 0.123456789012345);
  EXPECT_EQ(b.diagnostics.eps0, 0.02);
  EXPECT_TRUE(b.integrator.freeze_velocity);
  EXPECT_EQ(b.integrator.scheme, Scheme::rk2);
}

TEST(Config, ShippedConfigsLoad) {
  for (const char* name : {"default.toml", "equilibrium.toml", "twist.toml", "twist_taylor_green.toml", "friedrich.toml",
                           "bump_concentration.toml", "small.toml"})
    EXPECT_NO_THROW(load_config(config_path(name))) << name;
  EXPECT_THROW(load_config(config_path("inadmissible.toml")), ValidationError);
  EXPECT_THROW(load_config(config_path("does_not_exist.toml")), IoError);
}

// --- initial conditions ----------------------------------------------------

TEST(Initial, UniformAndTaylorGreen) {
  const auto g = square_grid(32);
  InitialSpec spec;
  spec.frame = "uniform";
  spec.velocity = "taylor_green";
  spec.velocity_amplitude = 0.6;
  const SimState s = make_initial(spec, g);
  EXPECT_EQ(max_diff(s.p, uniform_frame_field(g)), 0.0);
  double worst = 0.0;
  for (int j = 0; j < 32; ++j)
    for (int i = 0; i < 32; ++i) {
      const double x = g->x(i), y = g->y(j);
      const std::size_t k = g->index(i, j);
      worst = std::max({worst, std::abs(s.v.c[0][k] - 0.6 * std::sin(x) * std::cos(y)),
                        std::abs(s.v.c[1][k] + 0.6 * std::cos(x) * std::sin(y))});
    }
  EXPECT_LE(worst, 1e-14);
  EXPECT_LE(max_abs(divergence(s.v).values), 1e-13);
  spec.velocity = "zero";
  EXPECT_EQ(max_abs(make_initial(spec, g).v.c[0]), 0.0);
}

TEST(Initial, RandomSmoothGuarantees) {
  const auto g = square_grid(32);
  InitialSpec spec;
  spec.frame = "random_smooth";
  spec.velocity = "random_smooth";
  spec.frame_amplitude = 0.8;
  spec.velocity_amplitude = 1.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    spec.seed = seed;
    const SimState s = make_initial(spec, g);
    EXPECT_LE(max_orthonormality_defect(s.p), 1e-14) << seed;
    EXPECT_LE(max_abs(divergence(s.v).values), 1e-10) << seed;
    EXPECT_GT(l2_norm(ScalarField(g, s.v.c[0])), 0.1);
  }
  spec.seed = 3;
  EXPECT_EQ(max_diff(make_initial(spec, g).p, make_initial(spec, g).p), 0.0);
}

TEST(Initial, TwistAndBump) {
  const auto g = square_grid(32);
  InitialSpec spec;
  spec.frame = "twist";
  spec.frame_amplitude = 0.7;
  SimState s = make_initial(spec, g);
  EXPECT_LE(max_orthonormality_defect(s.p), 1e-14);
  // rotation about n3 by 0.7 sin x: n1 = (cos a, sin a, 0)
  const std::size_t k = g->index(5, 9);
  const double a = 0.7 * std::sin(g->x(5));
  EXPECT_NEAR(s.p.n[0].c[0][k], std::cos(a), 1e-15);
  EXPECT_NEAR(s.p.n[0].c[1][k], std::sin(a), 1e-15);
  spec.frame = "biaxial_bump";
  spec.frame_width = 0.6;
  s = make_initial(spec, g);
  EXPECT_LE(max_orthonormality_defect(s.p), 1e-14);
  EXPECT_GT(elastic_energy(s.p, one_constant_coefficients()), 0.0);
  spec.frame = "hedgehog";
  EXPECT_THROW(make_initial(spec, g), SpecError);
  spec.frame = "uniform";
  spec.velocity = "jet";
  EXPECT_THROW(make_initial(spec, g), SpecError);
}

// --- snapshots -------------------------------------------------------------

TEST(Snapshot, BitExactRoundTrip) {
  const auto g = make_grid(16, 24, 2.5, 3.5);
  SimState s = random_state(g, 4, 3, 0.8, 0.6);
  s.t = 0.1234567890123456789;
  const auto bytes = encode_snapshot(s);
  ASSERT_EQ(bytes.size(), kSnapshotHeaderBytes + 11u * 16u * 24u * 8u);
  const SimState r = decode_snapshot(bytes);
  EXPECT_EQ(r.t, s.t);
  EXPECT_EQ(r.p.grid->nx(), 16);
  EXPECT_EQ(r.p.grid->ly(), 3.5);
  for (int i = 0; i < 3; ++i)
    for (int c = 0; c < 3; ++c) EXPECT_EQ(std::memcmp(r.p.n[i].c[c].data(), s.p.n[i].c[c].data(), 16 * 24 * 8), 0);
  for (int c = 0; c < 2; ++c) EXPECT_EQ(std::memcmp(r.v.c[c].data(), s.v.c[c].data(), 16 * 24 * 8), 0);
  EXPECT_EQ(encode_snapshot(r), bytes);
}

TEST(Snapshot, HeaderLayout) {
  const auto g = make_grid(8, 10, 1.5, 2.0);
  SimState s = random_state(g, 5);
  s.t = 3.0;
  const auto b = encode_snapshot(s);
  EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "BXFH");
  auto u32 = [&](std::size_t off) {
    return std::uint32_t(b[off]) | std::uint32_t(b[off + 1]) << 8 | std::uint32_t(b[off + 2]) << 16 |
           std::uint32_t(b[off + 3]) << 24;
  };
  auto f64 = [&](std::size_t off) {
    std::uint64_t u = 0;
    for (int i = 7; i >= 0; --i) u = (u << 8) | b[off + static_cast<std::size_t>(i)];
    double d;
    std::memcpy(&d, &u, 8);
    return d;
  };
  EXPECT_EQ(u32(4), 1u);
  EXPECT_EQ(u32(8), 8u);
  EXPECT_EQ(u32(12), 10u);
  EXPECT_EQ(f64(16), 1.5);
  EXPECT_EQ(f64(24), 2.0);
  EXPECT_EQ(f64(32), 3.0);
  // field-major: n1.x first, then n1.y ... v.y last, each row-major
  EXPECT_EQ(f64(40), s.p.n[0].c[0][0]);
  EXPECT_EQ(f64(40 + 8 * 80), s.p.n[0].c[1][0]);
  EXPECT_EQ(f64(40 + 8 * (10 * 80 + 13)), s.v.c[1][13]);
  EXPECT_EQ(g->index(5, 1), 13u);
}

TEST(Snapshot, CorruptInputsAreRejected) {
  const auto g = square_grid(8);
  auto b = encode_snapshot(random_state(g, 6));
  auto truncated = b;
  truncated.resize(b.size() - 8);
  EXPECT_THROW(decode_snapshot(truncated), IoError);
  auto short_header = b;
  short_header.resize(20);
  EXPECT_THROW(decode_snapshot(short_header), IoError);
  auto magic = b;
  magic[0] = 'X';
  EXPECT_THROW(decode_snapshot(magic), IoError);
  auto version = b;
  version[4] = 2;
  EXPECT_THROW(decode_snapshot(version), IoError);
  EXPECT_THROW(read_snapshot("/nonexistent/snap.bxfh"), IoError);
}

TEST(Snapshot, FileRoundTripAndSummary) {
  const fs::path dir = scratch("snap");
  const auto g = square_grid(16);
  const SimState s = random_state(g, 7, 3, 0.5, 0.4);
  const std::string path = (dir / "a.bxfh").string();
  write_snapshot(path, s);
  const SimState r = read_snapshot(path);
  EXPECT_EQ(max_diff(r.p, s.p), 0.0);
  EXPECT_EQ(max_diff(r.v, s.v), 0.0);
  const SnapshotSummary sum = summarize_snapshot(path);
  EXPECT_TRUE(sum.finite);
  EXPECT_EQ(sum.header.nx, 16);
  EXPECT_LE(sum.ortho_defect, 1e-14);
  EXPECT_NEAR(sum.kinetic_energy, 0.5 * inner(s.v, s.v), 1e-14);
  EXPECT_EQ(sum.v_max, std::max(max_abs(s.v.c[0]), max_abs(s.v.c[1])));
}

// --- CSV -------------------------------------------------------------------

TEST(Csv, SchemaAndNumberFormat) {
  EXPECT_STREQ(csv_header(),
               "t,E_total,E_kin,E_elastic,D_total,D_visc,D_rot,D_beta,residual,blowup_integrand,blowup_integral,"
               "ortho_defect,local_energy_max");
  EXPECT_EQ(csv_number(std::nan("")), "nan");
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(csv_number(x)), x);
  DiagnosticsRecord r;
  r.t = 1.5;
  r.dissipation.beta_block = 1.0;
  r.dissipation.anisotropic = {0.25, 0.5, 0.125};
  r.dissipation.finish();
  const std::string row = csv_row(r);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 12);
  EXPECT_EQ(row.substr(0, 4), "1.5,");
  std::vector<std::string> cells;
  std::istringstream ls(row);
  for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
  EXPECT_EQ(std::stod(cells[7]), 1.875);
}

// --- run -------------------------------------------------------------------

namespace {

RunConfig small_run(const std::string& extra) {
  return load_config_text("[grid]\nnx = 16\nny = 16\n[integrator]\nsteps = 20\n" + extra);
}

}  // namespace

TEST(Run, EquilibriumKeepsEnergyConstant) {
  const fs::path dir = scratch("equilibrium");
  RunConfig c = load_config(config_path("equilibrium.toml"));
  RunOptions opt;
  opt.out_dir = dir.string();
  const RunResult r = run(c, opt);
  EXPECT_EQ(r.exit_code, kExitOk);
  EXPECT_EQ(r.steps_taken, c.steps);
  const auto rows = read_csv(dir / "series.csv");
  ASSERT_EQ(rows.size(), static_cast<std::size_t>(c.steps) + 2);
  const double e0 = std::stod(rows[1][1]);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ASSERT_EQ(rows[i].size(), 13u);
    EXPECT_NEAR(std::stod(rows[i][1]), e0, 1e-14);
  }
  EXPECT_TRUE(fs::exists(dir / "config_echo.toml"));
  EXPECT_FALSE(fs::exists(dir / "singularity_report.json"));
}

TEST(Run, TwistGradientFlowIsMonotone) {
  const fs::path dir = scratch("twist");
  RunConfig c = small_run("freeze_velocity = true\n[initial]\nframe = \"twist\"\nframe_amplitude = 0.8\n");
  c.steps = 60;
  RunOptions opt;
  opt.out_dir = dir.string();
  ASSERT_EQ(run(c, opt).exit_code, kExitOk);
  const auto rows = read_csv(dir / "series.csv");
  ASSERT_EQ(rows.size(), 62u);
  for (std::size_t i = 2; i < rows.size(); ++i) {
    EXPECT_LT(std::stod(rows[i][3]), std::stod(rows[i - 1][3])) << "row " << i;
    EXPECT_GE(std::stod(rows[i][10]), std::stod(rows[i - 1][10]));
    EXPECT_EQ(std::stod(rows[i][2]), 0.0);
  }
}

TEST(Run, SeriesColumnsAreConsistent) {
  const fs::path dir = scratch("series");
  RunConfig c = small_run("[initial]\nframe = \"random_smooth\"\nvelocity = \"random_smooth\"\nband = 1\n"
                          "[output]\nsnapshot_interval = 5\n");
  RunOptions opt;
  opt.out_dir = dir.string();
  const RunResult r = run(c, opt);
  ASSERT_EQ(r.exit_code, kExitOk);
  ASSERT_EQ(r.records.size(), 21u);
  for (const auto& rec : r.records) {
    EXPECT_NEAR(rec.energy.total, rec.energy.kinetic + rec.energy.elastic, 1e-14 * rec.energy.total);
    EXPECT_GE(rec.dissipation.total, 0.0);
    EXPECT_TRUE(std::isfinite(rec.energy_residual));
    EXPECT_LE(rec.ortho_defect_max, 1e-10);
  }
  // left-Riemann blow-up integral
  for (std::size_t i = 1; i < r.records.size(); ++i) {
    const double want = r.records[i - 1].blowup_integral +
                        (r.records[i].t - r.records[i - 1].t) * r.records[i - 1].blowup_integrand;
    EXPECT_EQ(r.records[i].blowup_integral, want);
  }
  for (long n = 0; n <= 20; n += 5) {
    char name[32];
    std::snprintf(name, sizeof name, "snap_%06ld.bxfh", n);
    EXPECT_TRUE(fs::exists(dir / "snapshots" / name)) << name;
  }
  const SimState last = read_snapshot((dir / "snapshots" / "snap_000020.bxfh").string());
  EXPECT_EQ(last.t, r.final_state.t);
  EXPECT_EQ(max_diff(last.p, r.final_state.p), 0.0);
}

TEST(Run, ZeroStepsWritesSingleRowWithUnknownResidual) {
  const fs::path dir = scratch("zero");
  RunConfig c = small_run("");
  c.steps = 0;
  RunOptions opt;
  opt.out_dir = dir.string();
  ASSERT_EQ(run(c, opt).exit_code, kExitOk);
  const auto rows = read_csv(dir / "series.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][8], "nan");
}

TEST(Run, DeterministicSeries) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  RunConfig c = small_run("[initial]\nframe = \"random_smooth\"\nvelocity = \"random_smooth\"\n");
  RunOptions opt;
  opt.out_dir = a.string();
  run(c, opt);
  opt.out_dir = b.string();
  run(c, opt);
  const std::string sa = slurp(a / "series.csv");
  EXPECT_GT(sa.size(), 1000u);
  EXPECT_EQ(sa, slurp(b / "series.csv"));
}

TEST(Run, ConcentrationStopWritesReport) {
  const fs::path dir = scratch("bump");
  RunConfig c = small_run(
      "[initial]\nframe = \"biaxial_bump\"\nframe_amplitude = 1.5\nframe_width = 0.4\n"
      "[diagnostics]\nR = 0.8\neps0 = 0.5\nstop_on_concentration = true\n");
  RunOptions opt;
  opt.out_dir = dir.string();
  const RunResult r = run(c, opt);
  EXPECT_EQ(r.exit_code, kExitSingularity);
  EXPECT_TRUE(r.report.detected);
  EXPECT_EQ(r.report.trigger, Trigger::LocalConcentration);
  EXPECT_FALSE(r.report.hotspot_centers.empty());
  const auto j = nlohmann::json::parse(slurp(dir / "singularity_report.json"));
  EXPECT_EQ(j["trigger"], "LocalConcentration");
  EXPECT_TRUE(j["detected"].get<bool>());
}

// --- command line ----------------------------------------------------------

TEST(Cli, CheckCoeffsExitCodes) {
  EXPECT_EQ(cli("check-coeffs " + config_path("default.toml")), 0);
  EXPECT_EQ(cli("check-coeffs " + config_path("inadmissible.toml")), 1);
  EXPECT_EQ(cli("check-coeffs " + config_path("missing.toml")), 3);
}

TEST(Cli, RunAndInspect) {
  const fs::path dir = scratch("cli");
  EXPECT_EQ(cli("run -q " + config_path("inadmissible.toml") + " -o " + dir.string()), 3);
  EXPECT_EQ(cli("run -q " + config_path("small.toml") + " -o " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "series.csv"));
  const std::string snap = (dir / "s.bxfh").string();
  write_snapshot(snap, random_state(square_grid(8), 1));
  EXPECT_EQ(cli("inspect " + snap), 0);
  std::ofstream(dir / "junk.bxfh") << "not a snapshot";
  EXPECT_EQ(cli("inspect " + (dir / "junk.bxfh").string()), 1);
  EXPECT_NE(cli("bogus-subcommand"), 0);
}

TEST(Cli, VerifySmallGrid) {
  EXPECT_EQ(cli("verify " + config_path("small.toml")), 0);
  const fs::path dir = scratch("faulty");
  std::ofstream(dir / "faulty.toml") << slurp(config_path("equilibrium.toml")) << "\n[verify]\nstress_fault = 0.01\n";
  EXPECT_EQ(cli("verify " + (dir / "faulty.toml").string()), 1);
}

TEST(Verify, FaultOnlyBreaksEnergyLaw) {
  RunConfig c = load_config_text("[grid]\nnx = 32\nny = 32\n[verify]\nstress_fault = 0.01\n");
  const VerifyReport rep = verify(c);
  ASSERT_FALSE(rep.all_pass());
  for (const auto& s : rep.suites) EXPECT_EQ(s.pass, s.name != "energy_law_residual") << s.name;
  c.stress_fault = 0.0;
  EXPECT_TRUE(verify(c).all_pass());
}
