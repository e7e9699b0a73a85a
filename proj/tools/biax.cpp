// Command-line front end: run, verify, check-coeffs, inspect.
// BIAX_THREADS sets the OpenMP thread count (default: OpenMP's own choice).

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include "biax/biax.hpp"

namespace {

void apply_thread_env() {
  const char* env = std::getenv("BIAX_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) {
    std::cerr << "warning: ignoring BIAX_THREADS='" << env << "'\n";
    return;
  }
#ifdef _OPENMP
  omp_set_num_threads(static_cast<int>(n));
#endif
}

// Loads and validates, printing the error and returning false on failure.
bool load(const std::string& path, biax::RunConfig& cfg) {
  try {
    cfg = biax::load_config(path);
    return true;
  } catch (const biax::ParseError& e) {
    std::cerr << path << ": parse error: " << e.what() << "\n";
  } catch (const biax::ValidationError& e) {
    std::cerr << path << ": invalid configuration: " << e.what() << "\n";
  } catch (const biax::IoError& e) {
    std::cerr << e.what() << "\n";
  }
  return false;
}

int cmd_run(const std::string& path, const std::string& out_dir, bool quiet) {
  biax::RunConfig cfg;
  if (!load(path, cfg)) return biax::kExitConfig;
  biax::RunOptions opt;
  opt.out_dir = out_dir;
  if (!quiet) opt.log = &std::cerr;
  const biax::RunResult r = biax::run(cfg, opt);
  if (r.report.detected) {
    std::cout << biax::to_json(r.report).dump(2) << "\n";
  } else if (!quiet) {
    std::cerr << "completed " << r.steps_taken << " steps, t = " << r.final_state.t << ", series in "
              << r.series_path.string() << "\n";
  }
  return r.exit_code;
}

int cmd_verify(const std::string& path) {
  biax::RunConfig cfg;
  if (!load(path, cfg)) return biax::kExitConfig;
  const biax::VerifyReport rep = biax::verify(cfg);
  biax::print_verify(rep, std::cout);
  return rep.all_pass() ? biax::kExitOk : biax::kExitFailure;
}

int cmd_check_coeffs(const std::string& path) {
  biax::RunConfig cfg;
  try {
    cfg = biax::parse_config_text(biax::read_text_file(path));
  } catch (const biax::ParseError& e) {
    std::cerr << path << ": parse error: " << e.what() << "\n";
    return biax::kExitConfig;
  } catch (const biax::IoError& e) {
    std::cerr << e.what() << "\n";
    return biax::kExitConfig;
  }
  const biax::CoefficientCheck c = biax::check_coefficients(cfg);
  biax::print_coefficient_check(c, std::cout);
  return c.admissible() ? biax::kExitOk : biax::kExitFailure;
}

int cmd_inspect(const std::string& path) {
  try {
    const biax::SnapshotSummary s = biax::summarize_snapshot(path);
    std::cout << std::setprecision(10) << "version " << s.header.version << "\ngrid " << s.header.nx << " x " << s.header.ny
              << "\nbox " << s.header.lx << " x " << s.header.ly << "\nt " << s.header.t << "\nfinite "
              << (s.finite ? "yes" : "no") << "\northo_defect " << s.ortho_defect << "\nv_max " << s.v_max
              << "\nkinetic_energy " << s.kinetic_energy << "\ndivergence_max " << s.divergence_max
              << "\ndirichlet_energy " << s.dirichlet_energy << "\n";
    return 0;
  } catch (const biax::Error& e) {
    std::cerr << "inspect: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_env();
  CLI::App app{"Biaxial nematic frame hydrodynamics on the periodic torus"};
  app.require_subcommand(1);

  std::string config, out_dir, snapshot;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Integrate a configuration, writing the CSV series and snapshots");
  run->add_option("config", config, "Configuration file")->required();
  run->add_option("-o,--out", out_dir, "Output directory (overrides output.dir)");
  run->add_flag("-q,--quiet", quiet, "No progress output");
  auto* ver = app.add_subcommand("verify", "Run the property suites on the configuration");
  ver->add_option("config", config, "Configuration file")->required();
  auto* chk = app.add_subcommand("check-coeffs", "Report coefficient admissibility");
  chk->add_option("config", config, "Configuration file")->required();
  auto* ins = app.add_subcommand("inspect", "Summarize a binary snapshot");
  ins->add_option("snapshot", snapshot, "Snapshot file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : biax::kExitConfig;
  }

  try {
    if (*run) return cmd_run(config, out_dir, quiet);
    if (*ver) return cmd_verify(config);
    if (*chk) return cmd_check_coeffs(config);
    if (*ins) return cmd_inspect(snapshot);
  } catch (const biax::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return biax::kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return biax::kExitFailure;
  }
  return biax::kExitFailure;
}
