// elastoq command-line driver: run, bounds, certify, compare.

#include <cmath>
#include <iomanip>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "elastoq/classical_reference.hpp"
#include "elastoq/experiments.hpp"
#include "elastoq/hamiltonian.hpp"
#include "elastoq/trotter_error.hpp"

namespace {

using namespace elastoq;

struct Flags {
  std::optional<int> n;
  std::optional<double> h, rho, E, nu, T, clip, epsilon, eta;
  std::vector<double> taus;
  std::vector<double> snapshots;
  std::optional<std::string> init, scheme, oracle, out, config, plane_axis;
  std::optional<int> plane_index;
  std::optional<std::int64_t> steps;
  std::string bound = "all";
  bool dry_run = false;
  bool large = false;
};

void add_medium(CLI::App* app, Flags& f) {
  app->set_help_flag("--help", "print this help and exit");
  app->add_option("--n", f.n, "qubits per axis (N = 2^n grid points)");
  app->add_option("--h", f.h, "grid spacing");
  app->add_option("--rho", f.rho, "mass density");
  app->add_option("--E", f.E, "Young's modulus");
  app->add_option("--nu", f.nu, "Poisson ratio");
  app->add_option("--T", f.T, "final time");
}

ExperimentConfig build_config(const Flags& f) {
  ExperimentConfig c = f.config ? load_config(*f.config) : ExperimentConfig{};
  if (f.n) c.n = *f.n;
  if (f.h) c.h = *f.h;
  if (f.rho) c.rho = *f.rho;
  if (f.E) c.E = *f.E;
  if (f.nu) c.nu = *f.nu;
  if (f.T) c.T = *f.T;
  if (!f.taus.empty()) c.taus = f.taus;
  if (f.init) c.init = initial_kind_from_string(*f.init);
  if (f.scheme) c.scheme = scheme_from_string(*f.scheme);
  if (f.oracle) c.oracle = oracle_from_string(*f.oracle);
  if (f.out) c.out_dir = *f.out;
  if (f.clip) c.clip = *f.clip;
  if (!f.snapshots.empty()) c.snapshot_times = f.snapshots;
  if (f.plane_index) c.plane_index = *f.plane_index;
  if (f.plane_axis) {
    c.plane_axis = *f.plane_axis == "y" ? Axis::y
                   : *f.plane_axis == "z" ? Axis::z
                                          : Axis::x;
  }
  if (f.dry_run) c.dry_run = true;
  if (f.large) c.large = true;
  return c;
}

HamiltonianModel model_of(const ExperimentConfig& c) {
  return HamiltonianModel(LatticeShape(c.n, c.h),
                          MaterialParams(c.rho, c.E, c.nu));
}

int cmd_bounds(const Flags& f) {
  ExperimentConfig c = build_config(f);
  const HamiltonianModel model = model_of(c);
  const double eps = f.epsilon.value_or(1e-2);
  std::cout << std::setprecision(17);
  std::vector<BoundKind> kinds;
  if (f.bound == "all") {
    kinds = {BoundKind::first_norm, BoundKind::first_commutator,
             BoundKind::second};
  } else {
    kinds = {bound_kind_from_string(f.bound)};
  }
  for (BoundKind k : kinds) {
    std::cout << to_record(steps_and_cost(model, c.T, eps, k)) << '\n';
  }
  for (double tau : c.taus) {
    const SecondOrderBound b2 = bound_second_order(model, tau);
    std::cout << "tau=" << tau << '\n'
              << "first_norm=" << bound_first_order_norm(model, tau) << '\n'
              << "first_commutator=" << bound_first_order_commutator(model, tau)
              << '\n'
              << "second=" << b2.bound << '\n'
              << "second_applicable=" << (b2.applicable ? "true" : "false")
              << '\n';
    if (model.dimension() <= kDenseDimensionCap) {
      std::cout << "measured_u1=" << empirical_trotter_error(model, tau, Scheme::u1).value
                << '\n'
                << "measured_u2=" << empirical_trotter_error(model, tau, Scheme::u2).value
                << '\n';
    }
    std::cout << '\n';
  }
  return 0;
}

int cmd_certify(const Flags& f) {
  ExperimentConfig c = build_config(f);
  if (!f.n) c.n = 1;
  if (!f.T) c.T = 2.0;
  const HamiltonianModel model = model_of(c);
  const ElasticCoupling op(model);
  const NormEstimate norm = estimate_L_norm(op);
  const double eta = f.eta.value_or(1.0);
  std::cout << std::setprecision(17) << "norm_L=" << norm.value << '\n'
            << "norm_L_method=" << norm.method << '\n'
            << "norm_L_bound=" << op.norm_bound() << '\n'
            << "eta=" << eta << '\n'
            << "C_eta=" << c_eta(eta) << "\n\n";
  const double tau_power = eta / norm.value;
  const LeapfrogConfig power_cfg(tau_power, eta, c.T, norm.value);
  std::cout << "tau=" << tau_power << '\n'
            << to_record(power_bound_certificate(op, power_cfg,
                                                 f.steps.value_or(1000),
                                                 PowerMethod::singular))
            << '\n';
  std::vector<double> taus;
  if (f.taus.empty()) {
    const double base = std::min(1.0, eta) / norm.value;
    const std::int64_t m = static_cast<std::int64_t>(std::ceil(c.T / base));
    taus = {c.T / m, c.T / (2 * m), c.T / (4 * m)};
  } else {
    taus = f.taus;
  }
  for (double tau : taus) {
    std::cout << "tau=" << tau << '\n';
    if (model.dimension() <= kDenseDimensionCap) {
      std::cout << to_record(local_error_certificate(op, tau, norm.value));
    }
    const LeapfrogConfig cfg(tau, eta, c.T, norm.value);
    std::cout << to_record(global_error_certificate(op, cfg)) << '\n';
  }
  return 0;
}

int cmd_compare(const Flags& f) {
  ExperimentConfig c = build_config(f);
  if (!f.n) c.n = 5;
  if (!f.T) c.T = 30.0;
  const HamiltonianModel model = model_of(c);
  const ElasticCoupling op(model);
  const double eps = f.epsilon.value_or(1e-2);
  const double eta = f.eta.value_or(1.0);
  const NormEstimate norm = estimate_L_norm(op);
  const ClassicalCost cl = cost_model(op, norm.value, c.T, eps, eta);
  const ErrorBudget q1 = steps_and_cost(model, c.T, eps, BoundKind::first_commutator);
  const ErrorBudget q2 = steps_and_cost(model, c.T, eps, BoundKind::second);

  std::cout << "# same semidiscrete system; state preparation, readout and "
               "fault-tolerance overhead excluded\n";
  std::cout << std::setprecision(6) << "# n=" << c.n << " N=" << (1 << c.n)
            << " T=" << c.T << " epsilon=" << eps << " rho=" << c.rho
            << " E=" << c.E << " nu=" << c.nu << " h=" << c.h << '\n';
  std::cout << std::left << std::setw(34) << "method" << std::setw(16)
            << "memory" << std::setw(16) << "steps" << "time\n";
  std::cout << std::setw(34) << "classical leapfrog" << std::setw(16)
            << (std::to_string(cl.memory_complex) + " cplx") << std::setw(16)
            << cl.m_cl << cl.arithmetic_ops << " madds\n";
  std::cout << std::setw(34) << "quantum 1st-order (commutator)" << std::setw(16)
            << (std::to_string(q1.qubits) + " qubits") << std::setw(16) << q1.m
            << static_cast<double>(q1.total_cnot) << " CNOT\n";
  std::cout << std::setw(34) << "quantum 2nd-order" << std::setw(16)
            << (std::to_string(q2.qubits) + " qubits") << std::setw(16) << q2.m
            << static_cast<double>(q2.total_cnot) << " CNOT\n\n";
  std::cout << std::setprecision(17) << to_record(cl) << "norm_L_method="
            << norm.method << '\n';
  return 0;
}

void print_error(const std::string& type, const std::string& message) {
  nlohmann::json j{{"error", {{"type", type}, {"message", message}}}};
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trotterized elastic-wave circuits: simulation, bounds and "
               "classical reference"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  Flags f;

  auto* run = app.add_subcommand("run", "fidelity sweep and field export");
  add_medium(run, f);
  run->add_option("--tau", f.taus, "Trotter step (repeatable)");
  run->add_option("--init", f.init, "initial state")
      ->check(CLI::IsMember({"pulse", "p", "s"}));
  run->add_option("--scheme", f.scheme, "product formula")
      ->check(CLI::IsMember({"u1", "u2"}));
  run->add_option("--oracle", f.oracle, "exact-evolution method")
      ->check(CLI::IsMember({"dense", "krylov", "auto"}));
  run->add_option("--out", f.out, "output directory");
  run->add_option("--clip", f.clip, "fraction clipped in exported fields");
  run->add_option("--snapshot", f.snapshots, "field snapshot time (repeatable)");
  run->add_option("--plane-axis", f.plane_axis, "slice normal axis")
      ->check(CLI::IsMember({"x", "y", "z"}));
  run->add_option("--plane-index", f.plane_index, "slice index (default N/2-1)");
  run->add_option("--config", f.config, "JSON config; flags override it");
  run->add_flag("--dry-run", f.dry_run, "print the plan only");
  run->add_flag("--large", f.large, "allow n >= 5");

  auto* bounds = app.add_subcommand("bounds", "error bounds and CNOT counts");
  add_medium(bounds, f);
  bounds->add_option("--tau", f.taus, "step sizes for one-step bounds");
  bounds->add_option("--epsilon", f.epsilon, "target error (default 1e-2)");
  bounds->add_option("--scheme", f.bound,
                     "first-norm, first-commutator, second or all");
  bounds->add_option("--config", f.config, "JSON config");

  auto* certify = app.add_subcommand("certify", "leapfrog certificates");
  add_medium(certify, f);
  certify->add_option("--tau", f.taus, "step sizes (default: three dyadic)");
  certify->add_option("--eta", f.eta, "stability margin in (0,2), default 1");
  certify->add_option("--steps", f.steps, "power-bound horizon (default 1000)");
  certify->add_option("--config", f.config, "JSON config");

  auto* compare = app.add_subcommand("compare", "quantum vs classical cost");
  add_medium(compare, f);
  compare->add_option("--epsilon", f.epsilon, "target error (default 1e-2)");
  compare->add_option("--eta", f.eta, "leapfrog stability margin (default 1)");
  compare->add_option("--config", f.config, "JSON config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_experiment(build_config(f), std::cout);
    if (bounds->parsed()) return cmd_bounds(f);
    if (certify->parsed()) return cmd_certify(f);
    if (compare->parsed()) return cmd_compare(f);
  } catch (const ParameterError& e) {
    print_error("parameter", e.what());
    return 2;
  } catch (const ConvergenceError& e) {
    print_error("convergence", e.what());
    return 3;
  } catch (const Error& e) {
    print_error("runtime", e.what());
    return 4;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 5;
  }
  return 0;
}
