// Copyright (c) 2026 lpo-mor contributors.
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <iostream>
#include <string>

#include <Eigen/Core>

#include "CLI11.hpp"
#include "lpo/errors.hpp"
#include "lpo/io.hpp"
#include "lpo/kron_solver.hpp"
#include "lpo/lyapunov.hpp"
#include "lpo/mor.hpp"
#include "lpo/sim_bench.hpp"

namespace {

struct SystemOptions {
  std::string source;
  int msd_masses = 25;
  double msd_mass = 1.0;
  double msd_stiffness = 0.5;
  double msd_damping = 4.0;
  int convdiff_g = 20;
  double convdiff_v = 1.0;
  bool skip_stability = false;
};

void add_system_options(CLI::App* cmd, SystemOptions* opt) {
  cmd->add_option("system", opt->source,
                  "System file (JSON), or built-in 'msd' / 'convdiff'")
      ->required();
  cmd->add_option("--msd-masses", opt->msd_masses, "Built-in msd: number of masses");
  cmd->add_option("--msd-mass", opt->msd_mass, "Built-in msd: mass per body");
  cmd->add_option("--msd-stiffness", opt->msd_stiffness,
                  "Built-in msd: spring stiffness");
  cmd->add_option("--msd-damping", opt->msd_damping,
                  "Built-in msd: dashpot coefficient");
  cmd->add_option("--convdiff-g", opt->convdiff_g,
                  "Built-in convdiff: interior grid points per axis");
  cmd->add_option("--convdiff-v", opt->convdiff_v,
                  "Built-in convdiff: convection speed");
  cmd->add_flag("--skip-stability", opt->skip_stability,
                "Skip the Hurwitz check on loaded systems");
}

lpo::LPOSystem load_system(const SystemOptions& opt) {
  lpo::LPOSystem sys = [&] {
    if (opt.source == "msd")
      return lpo::build_msd(opt.msd_masses, opt.msd_mass, opt.msd_stiffness,
                            opt.msd_damping);
    if (opt.source == "convdiff")
      return lpo::build_convdiff(opt.convdiff_g, opt.convdiff_v);
    return lpo::system_from_json(lpo::read_json_file(opt.source));
  }();
  if (!opt.skip_stability) lpo::require_hurwitz(sys.A, "loaded system");
  return sys;
}

lpo::InputSignal named_input(const std::string& name, int m) {
  if (name == "zero") return lpo::zero_input(m);
  if (name == "step") return lpo::step_input(m);
  if (name == "msd") {
    if (m != 2)
      throw lpo::validation_error("input 'msd' drives 2 channels, system has m = " +
                                  std::to_string(m));
    return lpo::msd_input();
  }
  if (name == "convdiff") {
    if (m != 1)
      throw lpo::validation_error("input 'convdiff' drives 1 channel, system has m = " +
                                  std::to_string(m));
    return lpo::convdiff_input();
  }
  throw lpo::validation_error("unknown input '" + name +
                              "' (choose zero, step, msd, convdiff)");
}

int run_energy(const SystemOptions& sys_opt, double tol, int ell,
               const std::string& out) {
  const lpo::LPOSystem sys = load_system(sys_opt);
  lpo::CoefficientBuildOptions opts;
  opts.tol = tol;
  opts.ell_override = ell;
  const lpo::ObservabilityCoefficients coeffs =
      lpo::build_observability_coefficients(sys.A, sys.outputs, opts);

  lpo::EnergyFile file;
  file.w = coeffs.w;
  file.info = coeffs.info;
  file.tol = tol;
  file.ell_override = ell;
  lpo::write_json_file(out, lpo::energy_to_json(file));

  for (const lpo::CoefficientInfo& info : coeffs.info)
    std::cout << "k=" << info.k << ": rank " << info.rank << ", ell " << info.ell
              << (info.capped ? " (capped)" : "") << "\n";
  std::cout << "wrote " << out << "\n";
  return 0;
}

int run_reduce(const SystemOptions& sys_opt, const std::string& method, int r,
               double L, const std::string& out) {
  const lpo::LPOSystem sys = load_system(sys_opt);
  lpo::ReducedModel model;
  if (method == "bt")
    model = lpo::balanced_truncation(sys, r);
  else if (method == "qobt")
    model = lpo::qobt_reduce(sys, r);
  else
    model = lpo::energy_based_reduce(sys, r, L);

  for (const std::string& w : model.warnings) std::cerr << "warning: " << w << "\n";
  lpo::write_json_file(out, lpo::reduced_to_json(model));
  std::cout << "method " << method << ", reduced order " << model.r << ", wrote "
            << out << "\n";
  return 0;
}

int run_simulate(const SystemOptions& sys_opt, const std::string& input, double t0,
                 double t1, double dt, const std::string& compare,
                 const std::string& out) {
  const lpo::LPOSystem sys = load_system(sys_opt);
  const lpo::InputSignal u = named_input(input, sys.m());
  const lpo::Trajectory fom =
      lpo::simulate(sys, u, Eigen::VectorXd::Zero(sys.n()), t0, t1, dt);

  if (compare.empty()) {
    lpo::write_trajectory_csv(out, fom);
  } else {
    const lpo::LPOSystem rom = lpo::system_from_json(lpo::read_json_file(compare));
    if (!sys_opt.skip_stability) lpo::require_hurwitz(rom.A, "reduced system");
    if (rom.m() != sys.m())
      throw lpo::validation_error("reduced system has m = " + std::to_string(rom.m()) +
                                  ", full system has m = " + std::to_string(sys.m()));
    const lpo::Trajectory rt =
        lpo::simulate(rom, u, Eigen::VectorXd::Zero(rom.n()), t0, t1, dt);
    lpo::write_comparison_csv(out, fom, rt);
    const lpo::ErrorMetrics metrics = lpo::error_metrics(fom, rt);
    std::cout << "linf " << metrics.linf << ", l2 " << metrics.l2 << "\n";
  }
  std::cout << "wrote " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("LPO_MOR_THREADS")) {
    const int k = std::atoi(threads);
    if (k > 0) Eigen::setNbThreads(k);
  }

  CLI::App app{
      "Energy-function computation and model reduction for linear systems "
      "with polynomial outputs"};
  app.require_subcommand(1);

  SystemOptions energy_sys, reduce_sys, sim_sys;

  double tol = 1e-6;
  int ell = -1;
  std::string energy_out;
  CLI::App* energy =
      app.add_subcommand("energy", "Compute observability-energy coefficients");
  add_system_options(energy, &energy_sys);
  energy->add_option("--tol", tol, "Quadrature accuracy target");
  energy->add_option("--ell", ell, "Force this quadrature level for every degree");
  energy->add_option("--out", energy_out, "Output coefficient file")->required();

  std::string method, reduce_out;
  int r = 0;
  double L = 1.0;
  CLI::App* reduce = app.add_subcommand("reduce", "Reduce the system order");
  add_system_options(reduce, &reduce_sys);
  reduce->add_option("--method", method, "bt, qobt, or energy")
      ->required()
      ->check(CLI::IsMember({"bt", "qobt", "energy"}));
  reduce->add_option("--r", r, "Reduced order")->required();
  reduce->add_option("--L", L, "Averaging-ball radius (energy method)");
  reduce->add_option("--out", reduce_out, "Output reduced-model file")->required();

  std::string input = "zero", compare, sim_out;
  double t0 = 0.0, t1 = 10.0, dt = 1e-3;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Integrate the system and write CSV");
  add_system_options(simulate, &sim_sys);
  simulate->add_option("--input", input, "zero, step, msd, or convdiff");
  simulate->add_option("--t0", t0, "Start time");
  simulate->add_option("--t1", t1, "End time");
  simulate->add_option("--dt", dt, "Step size");
  simulate->add_option("--compare", compare,
                       "Reduced-model file to simulate alongside the full system");
  simulate->add_option("--out", sim_out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad flags are validation failures
  }

  try {
    if (energy->parsed()) return run_energy(energy_sys, tol, ell, energy_out);
    if (reduce->parsed()) return run_reduce(reduce_sys, method, r, L, reduce_out);
    return run_simulate(sim_sys, input, t0, t1, dt, compare, sim_out);
  } catch (const lpo::validation_error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const lpo::numerical_error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  }
}
