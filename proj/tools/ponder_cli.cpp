// Batch front end: (omega, T) sweeps of the entanglement degree, covariance-file checks
// against the product criterion, and a Monte Carlo cross-check of the mirror spectrum.
//
// Exit codes: 0 ok, 1 other error, 2 config/usage error, 3 unstable drift matrix,
// 4 numerical singularity, 5 unphysical covariance.

#include <CLI11.hpp>
#include <json.hpp>
#include <fmt/core.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "ponder/ponder.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct SdeSettings {
  ponder::SdeRun run;
  std::vector<double> omegas;  // empty -> {0.9, 1, 1.1} Omega
};

void apply_sde_config(ponder::KeyValueConfig& cfg, SdeSettings& s) {
  double seed = static_cast<double>(s.run.seed);
  cfg.take_double("sde_seed", seed);
  if (seed < 0 || seed != std::floor(seed)) throw ponder::ConfigError("sde_seed must be a non-negative integer");
  s.run.seed = static_cast<std::uint64_t>(seed);
  cfg.take_double("sde_time_step", s.run.time_step);
  cfg.take_double("sde_segment_time", s.run.segment_time);
  cfg.take_int("sde_segments", s.run.segments);
  cfg.take_double("sde_burn_in", s.run.burn_in);
  cfg.take_int("sde_trajectories", s.run.trajectories);
  cfg.take_double_list("sde_omegas", s.omegas);
  if (auto v = cfg.take("sde_scheme")) {
    if (*v == "euler_maruyama") s.run.scheme = ponder::SdeScheme::euler_maruyama;
    else if (*v == "exact") s.run.scheme = ponder::SdeScheme::exact;
    else throw ponder::ConfigError("sde_scheme must be euler_maruyama or exact");
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ponder::Error("cannot write " + path.string());
  out << text;
}

json intervals(const std::vector<ponder::Interval>& v) {
  json arr = json::array();
  for (const auto& i : v) arr.push_back({i.lo, i.hi});
  return arr;
}

int do_sweep(const ponder::PhysicalParams& params, const ponder::SweepSpec& spec,
             const fs::path& out_dir, bool emit_grid) {
  if (spec.stability == ponder::StabilityPolicy::formal) {
    const auto sys = ponder::build_linear_system(params, ponder::StabilityPolicy::formal);
    if (!sys.stable) {
      std::cerr << fmt::format(
          "warning: drift matrix is unstable (max Re(lambda) = {:.6e} 1/s); reporting the formal "
          "frequency-domain solution. Set 'stability = enforce' to reject.\n",
          sys.max_real_eigenvalue());
    }
  }
  const auto result = ponder::run_sweep(params, spec);
  fs::create_directories(out_dir);
  write_file(out_dir / "sweep.csv", ponder::format_csv(result, spec.emit_components));
  if (emit_grid) write_file(out_dir / "grid.dat", ponder::format_grid(result));

  json summary;
  summary["stable"] = result.stable;
  summary["max_real_eigenvalue"] = result.max_real_eigenvalue;
  summary["big_omega"] = params.big_omega;
  summary["points"] = result.points.size();
  json rows = json::array();
  for (const auto& s : ponder::summarize(result)) {
    rows.push_back({{"temperature", s.temperature},
                    {"min_degree", s.min_degree},
                    {"argmin_omega", s.argmin_omega},
                    {"entangled_bands", intervals(s.entangled_bands)},
                    {"epr_bands", intervals(s.epr_bands)}});
    std::cout << fmt::format("T = {:<10.4g} K  min E = {:.6e} at omega = {:.6e} rad/s{}\n",
                             s.temperature, s.min_degree, s.argmin_omega,
                             s.min_degree < 0.25 ? "  [EPR]" : (s.min_degree < 1 ? "  [entangled]" : ""));
  }
  summary["temperatures"] = rows;
  write_file(out_dir / "summary.json", summary.dump(2) + "\n");
  std::cout << "wrote " << (out_dir / "sweep.csv").string() << "\n";
  return 0;
}

int do_check_state(const std::string& path) {
  const auto state = ponder::load_gaussian_state(path);
  try {
    ponder::require_physical(state);
  } catch (const ponder::PhysicalityError& e) {
    std::cerr << "unphysical covariance: " << e.what() << "\n"
              << fmt::format("physicality_margin = {:.6e}\n", e.margin());
    return 5;
  }
  const auto at_one = ponder::separability_product(state, 1.0);
  const auto best = ponder::optimize_separability(state);
  std::cout << fmt::format("physicality_margin = {:.6e}\n", ponder::physicality_margin(state.cov));
  std::cout << fmt::format("product_a1 = {:.12e}\n", at_one.product);
  std::cout << fmt::format("bound = {:.12e}\n", at_one.bound);
  for (double a : ponder::default_a_grid()) {
    std::cout << fmt::format("product_a[{:g}] = {:.12e}\n", a,
                             ponder::separability_product(state, a).product);
  }
  std::cout << fmt::format("optimal_a = {:.12e}\n", best.a);
  std::cout << fmt::format("optimal_product = {:.12e}\n", best.product);
  std::cout << "entangled = " << (best.entangled() ? "yes" : "no") << "\n";
  std::cout << "epr = " << (best.epr() ? "yes" : "no") << "\n";
  return 0;
}

int do_sde_check(const ponder::PhysicalParams& params, const SdeSettings& sde, int workers,
                 const fs::path& out_dir) {
  const auto sys = ponder::build_linear_system(params, ponder::StabilityPolicy::enforce);
  const auto noise = ponder::make_noise_model(params);
  std::vector<double> omegas = sde.omegas;
  if (omegas.empty()) omegas = {0.9 * params.big_omega, params.big_omega, 1.1 * params.big_omega};
  ponder::SdeRun run = sde.run;
  run.workers = workers;
  const auto est = ponder::classical_sde_psd(sys, noise, run, omegas);
  if (!est.classical_regime) {
    std::cerr << "warning: k_B T / hbar Omega <= 100; the classical oracle is not expected to match\n";
  }
  std::string csv = "omega,temperature,psd_q1,std_error,reference\n";
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    const auto pair = ponder::spectral_pair(sys, noise, omegas[i]);
    const int q = ponder::idx(ponder::Var::q1);
    const double ref = 0.5 * (pair.plus(q, q) + pair.minus(q, q)).real();
    csv += fmt::format("{:.15e},{:.15e},{:.15e},{:.15e},{:.15e}\n", omegas[i], params.temperature,
                       est.psd[0][i], est.std_error[0][i], ref);
    std::cout << fmt::format("omega = {:.6e}  MC = {:.6e} +- {:.2e}  spectral = {:.6e}  ratio = {:.4f}\n",
                             omegas[i], est.psd[0][i], est.std_error[0][i], ref, est.psd[0][i] / ref);
  }
  fs::create_directories(out_dir);
  write_file(out_dir / "sde_check.csv", csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radiation-pressure mirror entanglement: sweeps and separability checks"};
  std::string config_path;
  std::string out_dir = "out";
  int workers = 0;
  bool sweep = false;
  bool emit_grid = false;
  bool sde_check = false;
  std::string check_state_path;
  app.add_option("--config", config_path, "flat key-value configuration file (SI units)");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--workers", workers, "worker threads (overrides the config key)");
  auto* sweep_flag = app.add_flag("--sweep", sweep, "run the (omega, T) sweep (default mode)");
  auto* check_opt = app.add_option("--check-state", check_state_path,
                                   "evaluate the product criterion on a 4x4 covariance file");
  auto* sde_flag = app.add_flag("--sde-check", sde_check,
                                "compare Monte Carlo periodograms of q1 with the spectral solution");
  app.add_flag("--emit-grid", emit_grid, "also write a gnuplot grid file");
  sweep_flag->excludes(check_opt)->excludes(sde_flag);
  check_opt->excludes(sde_flag);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!check_state_path.empty()) return do_check_state(check_state_path);

    ponder::PhysicalParams params = ponder::default_params();
    ponder::SweepSpec spec;
    SdeSettings sde;
    if (!config_path.empty()) {
      auto cfg = ponder::KeyValueConfig::load(config_path);
      ponder::apply_config(cfg, params);
      ponder::apply_config(cfg, spec);
      apply_sde_config(cfg, sde);
      cfg.reject_unknown();
    }
    if (workers > 0) spec.workers = workers;
    for (const auto& w : ponder::validate(params)) std::cerr << "warning: " << w << "\n";

    if (sde_check) return do_sde_check(params, sde, spec.workers, out_dir);
    return do_sweep(params, spec, out_dir, emit_grid);
  } catch (const ponder::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ponder::InvalidParameter& e) {
    std::cerr << "invalid parameter: " << e.what() << "\n";
    return 2;
  } catch (const ponder::StabilityError& e) {
    std::cerr << "stability error: " << e.what() << "\n";
    for (const auto& ev : e.offending_eigenvalues()) {
      std::cerr << fmt::format("  lambda = {:.6e} {:+.6e} i\n", ev.real(), ev.imag());
    }
    return 3;
  } catch (const ponder::SingularMatrixError& e) {
    std::cerr << "numerical singularity: " << e.what() << "\n";
    return 4;
  } catch (const ponder::DegenerateCommutatorError& e) {
    std::cerr << "numerical singularity: " << e.what() << "\n";
    return 4;
  } catch (const ponder::PhysicalityError& e) {
    std::cerr << "unphysical covariance: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
