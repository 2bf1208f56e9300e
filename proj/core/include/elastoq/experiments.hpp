#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "elastoq/circuit_builder.hpp"
#include "elastoq/exact_evolution.hpp"
#include "elastoq/hamiltonian.hpp"

namespace elastoq {

enum class InitialKind { pulse, p, s };

std::string to_string(InitialKind kind);
InitialKind initial_kind_from_string(const std::string& name);

struct ExperimentConfig {
  int n = 2;
  double h = 1.0;
  double rho = 1.0;
  double E = 0.646;
  double nu = 0.255;
  double T = 10.0;
  std::vector<double> taus{0.1, 0.2, 0.5, 1.0};
  InitialKind init = InitialKind::pulse;
  Scheme scheme = Scheme::u1;
  OracleKind oracle = OracleKind::automatic;
  std::string out_dir = "elastoq-out";
  double clip = 0.02;
  /// Snapshot times for field export; each is taken by every tau that hits it.
  std::vector<double> snapshot_times{0.0};
  Axis plane_axis = Axis::x;
  int plane_index = -1;  ///< -1 selects N/2 - 1
  bool dry_run = false;
  /// Permit n >= 5 runs.
  bool large = false;

  /// Throws ParameterError naming the offending field.
  void validate() const;
  int resolved_plane_index() const;
  std::int64_t steps_for(double tau) const;
};

ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& config);

/// Grid index sets I_c = {N/2-1, N/2} and I_b = {2, ..., N-3}.
std::vector<int> central_indices(int n);
std::vector<int> bulk_indices(int n);

struct InitialState {
  CVector w;    ///< normalised physical-frame vector
  CVector psi;  ///< normalised B^{1/2} w
  double norm_factor = 1.0;  ///< ||B^{1/2} w||, so w = norm_factor B^{-1/2} psi
  Index support = 0;
};

InitialState build_initial_state(const ExperimentConfig& config,
                                 const HamiltonianModel& model);

/// Blockwise B^{1/2} or B^{-1/2} on the state register.
CVector apply_b_sqrt(const HamiltonianModel& model, const CVector& v);
CVector apply_b_inv_sqrt(const HamiltonianModel& model, const CVector& v);

/// w = norm_factor * B^{-1/2} psi
CVector reconstruct_w(const HamiltonianModel& model, const CVector& psi,
                      double norm_factor);
/// w^dagger B w
double b_weighted_energy(const HamiltonianModel& model, const CVector& w);

/// |<a|b>|^2
double fidelity(const CVector& a, const CVector& b);

struct FidelityCurve {
  double tau = 0.0;
  std::int64_t steps = 0;
  std::vector<double> t;
  std::vector<double> F;
};

struct FieldSlice {
  std::string component;  ///< "v_z" or "sigma_zz"
  int component_index = 0;
  Axis plane_axis = Axis::x;
  int plane_index = 0;
  int rows = 0;
  int cols = 0;
  std::vector<double> values;  ///< real parts, row-major
  double max_imag = 0.0;
  double norm_factor = 1.0;
};

/// v_z and sigma_zz on the configured plane.
std::vector<FieldSlice> reconstruct_fields(const ExperimentConfig& config,
                                           const HamiltonianModel& model,
                                           const CVector& psi,
                                           double norm_factor);

/// Absolute-value threshold above which the top `fraction` of entries lie.
double clip_threshold(const std::vector<double>& values, double fraction);

struct Snapshot {
  std::string source;  ///< "exact" or "trotter"
  double tau = 0.0;    ///< 0 for exact
  double t = 0.0;
  std::vector<FieldSlice> fields;
};

struct SweepResult {
  std::vector<FidelityCurve> curves;
  std::vector<Snapshot> snapshots;
  OracleKind oracle = OracleKind::dense;
  double max_oracle_residual = 0.0;
};

/// Worker cap from ELASTOQ_THREADS (default: hardware concurrency).
int worker_limit();

SweepResult run_fidelity_sweep(const ExperimentConfig& config,
                               const HamiltonianModel& model,
                               const InitialState& initial);

/// Validates, runs, writes CSV, field JSON and manifest.json under out_dir,
/// and prints a summary table. Returns the process exit status.
int run_experiment(const ExperimentConfig& config, std::ostream& out);

/// Planned steps, qubits and CNOT accounts without allocating state.
void print_dry_run(const ExperimentConfig& config, std::ostream& out);

}  // namespace elastoq
