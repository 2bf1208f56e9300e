#include "elastoq/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "elastoq/simulator.hpp"

namespace elastoq {

using nlohmann::json;

std::string to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::pulse:
      return "pulse";
    case InitialKind::p:
      return "p";
    case InitialKind::s:
      return "s";
  }
  return "pulse";
}

InitialKind initial_kind_from_string(const std::string& name) {
  if (name == "pulse") return InitialKind::pulse;
  if (name == "p") return InitialKind::p;
  if (name == "s") return InitialKind::s;
  throw ParameterError("unknown initial state '" + name +
                       "' (expected pulse, p or s)");
}

namespace {

std::string axis_name(Axis a) {
  static const char* names[] = {"x", "y", "z"};
  return names[axis_index(a)];
}

Axis axis_from_name(const std::string& s) {
  if (s == "x" || s == "1") return Axis::x;
  if (s == "y" || s == "2") return Axis::y;
  if (s == "z" || s == "3") return Axis::z;
  throw ParameterError("unknown plane axis '" + s + "' (expected x, y or z)");
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

bool divides(double T, double tau, std::int64_t* steps) {
  const double m = T / tau;
  const double r = std::round(m);
  if (r < 1.0 || std::abs(m - r) > 1e-9 * std::max(1.0, r)) return false;
  if (steps) *steps = static_cast<std::int64_t>(r);
  return true;
}

}  // namespace

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ParameterError(msg); };
  if (n < 1 || n > 20) fail("config 'n' must be in 1..20");
  if (n >= 5 && !large && !dry_run) {
    fail("config 'n' >= 5 needs the explicit large-run flag");
  }
  if (!(h > 0.0)) fail("config 'h' must be > 0");
  MaterialParams(rho, E, nu);
  if (!(T > 0.0)) fail("config 'T' must be > 0");
  if (taus.empty()) fail("config 'tau' needs at least one value");
  for (double tau : taus) {
    if (!(tau > 0.0)) fail("config 'tau' value " + fmt(tau) + " must be > 0");
    if (!divides(T, tau, nullptr)) {
      fail("config 'tau' value " + fmt(tau) + " does not divide T = " + fmt(T) +
           " into a whole number of steps");
    }
  }
  if (init == InitialKind::pulse && n < 2) {
    fail("initial state 'pulse' needs n >= 2");
  }
  if ((init == InitialKind::p || init == InitialKind::s) && n < 3) {
    fail("initial state '" + to_string(init) +
         "' needs n >= 3 (the bulk index set {2..N-3} is empty otherwise)");
  }
  if (!(clip >= 0.0 && clip < 1.0)) fail("config 'clip' must be in [0, 1)");
  for (double t : snapshot_times) {
    if (!(t >= 0.0 && t <= T)) fail("snapshot time " + fmt(t) + " outside [0, T]");
  }
  const int npts = 1 << n;
  if (plane_index < -1 || plane_index >= npts) {
    fail("config 'plane_index' must be in 0.." + std::to_string(npts - 1));
  }
}

int ExperimentConfig::resolved_plane_index() const {
  return plane_index >= 0 ? plane_index : (1 << n) / 2 - 1;
}

std::int64_t ExperimentConfig::steps_for(double tau) const {
  std::int64_t m = 0;
  if (!divides(T, tau, &m)) {
    throw ParameterError("tau " + fmt(tau) + " does not divide T");
  }
  return m;
}

ExperimentConfig config_from_json(const std::string& text) {
  ExperimentConfig c;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParameterError(std::string("config JSON: ") + e.what());
  }
  try {
    if (j.contains("n")) c.n = j.at("n").get<int>();
    if (j.contains("h")) c.h = j.at("h").get<double>();
    if (j.contains("rho")) c.rho = j.at("rho").get<double>();
    if (j.contains("E")) c.E = j.at("E").get<double>();
    if (j.contains("nu")) c.nu = j.at("nu").get<double>();
    if (j.contains("T")) c.T = j.at("T").get<double>();
    if (j.contains("tau")) {
      const json& t = j.at("tau");
      c.taus = t.is_array() ? t.get<std::vector<double>>()
                            : std::vector<double>{t.get<double>()};
    }
    if (j.contains("init")) c.init = initial_kind_from_string(j.at("init"));
    if (j.contains("scheme")) c.scheme = scheme_from_string(j.at("scheme"));
    if (j.contains("oracle")) c.oracle = oracle_from_string(j.at("oracle"));
    if (j.contains("out")) c.out_dir = j.at("out").get<std::string>();
    if (j.contains("clip")) c.clip = j.at("clip").get<double>();
    if (j.contains("snapshot_times")) {
      c.snapshot_times = j.at("snapshot_times").get<std::vector<double>>();
    }
    if (j.contains("plane_axis")) {
      c.plane_axis = axis_from_name(j.at("plane_axis").get<std::string>());
    }
    if (j.contains("plane_index")) c.plane_index = j.at("plane_index").get<int>();
    if (j.contains("dry_run")) c.dry_run = j.at("dry_run").get<bool>();
    if (j.contains("large")) c.large = j.at("large").get<bool>();
  } catch (const json::exception& e) {
    throw ParameterError(std::string("config JSON: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

namespace {

json config_json(const ExperimentConfig& c) {
  return json{{"n", c.n},
              {"h", c.h},
              {"rho", c.rho},
              {"E", c.E},
              {"nu", c.nu},
              {"T", c.T},
              {"tau", c.taus},
              {"init", to_string(c.init)},
              {"scheme", to_string(c.scheme)},
              {"oracle", to_string(c.oracle)},
              {"out", c.out_dir},
              {"clip", c.clip},
              {"snapshot_times", c.snapshot_times},
              {"plane_axis", axis_name(c.plane_axis)},
              {"plane_index", c.resolved_plane_index()},
              {"dry_run", c.dry_run},
              {"large", c.large}};
}

}  // namespace

std::string config_to_json(const ExperimentConfig& config) {
  return config_json(config).dump(2);
}

std::vector<int> central_indices(int n) {
  const int npts = 1 << n;
  return {npts / 2 - 1, npts / 2};
}

std::vector<int> bulk_indices(int n) {
  std::vector<int> out;
  for (int j = 2; j <= (1 << n) - 3; ++j) out.push_back(j);
  return out;
}

namespace {

CVector apply_register(const HamiltonianModel& model, const Matrix16& m,
                       const CVector& v) {
  if (v.size() != model.dimension()) {
    throw ShapeError("expected vector length " +
                     std::to_string(model.dimension()));
  }
  CVector out(v.size());
  const Index vol = model.shape().volume();
  Eigen::Map<const CMatrix> x(v.data(), vol, kStateComponents);
  Eigen::Map<CMatrix> y(out.data(), vol, kStateComponents);
  y.noalias() = x * m.transpose().cast<cplx>();
  return out;
}

}  // namespace

CVector apply_b_sqrt(const HamiltonianModel& model, const CVector& v) {
  return apply_register(model, model.cell().b_sqrt, v);
}

CVector apply_b_inv_sqrt(const HamiltonianModel& model, const CVector& v) {
  return apply_register(model, model.cell().b_inv_sqrt, v);
}

InitialState build_initial_state(const ExperimentConfig& config,
                                 const HamiltonianModel& model) {
  const int n = model.shape().n();
  if (config.init == InitialKind::pulse && n < 2) {
    throw ParameterError("initial state 'pulse' needs n >= 2");
  }
  if (config.init != InitialKind::pulse && n < 3) {
    throw ParameterError("initial state '" + to_string(config.init) +
                         "' needs n >= 3 (bulk index set is empty)");
  }
  const std::vector<int> ic = central_indices(n);
  const std::vector<int> ib = bulk_indices(n);
  const std::vector<int>& ys = config.init == InitialKind::pulse ? ic : ib;
  const int component = config.init == InitialKind::s ? 0 : 2;
  const Index npts = model.shape().points_per_axis();
  const Index vol = model.shape().volume();

  InitialState s;
  s.w = CVector::Zero(model.dimension());
  for (int x : ic) {
    for (int y : ys) {
      for (int z : ys) {
        s.w(component * vol + (x * npts + y) * npts + z) = 1.0;
        ++s.support;
      }
    }
  }
  s.w /= std::sqrt(static_cast<double>(s.support));
  const CVector u = apply_b_sqrt(model, s.w);
  s.norm_factor = u.norm();
  s.psi = u / s.norm_factor;
  return s;
}

CVector reconstruct_w(const HamiltonianModel& model, const CVector& psi,
                      double norm_factor) {
  return norm_factor * apply_b_inv_sqrt(model, psi);
}

double b_weighted_energy(const HamiltonianModel& model, const CVector& w) {
  return apply_b_sqrt(model, w).squaredNorm();
}

double fidelity(const CVector& a, const CVector& b) {
  return std::norm(a.dot(b));
}

std::vector<FieldSlice> reconstruct_fields(const ExperimentConfig& config,
                                           const HamiltonianModel& model,
                                           const CVector& psi,
                                           double norm_factor) {
  const int npts = static_cast<int>(model.shape().points_per_axis());
  const int plane = config.resolved_plane_index();
  if (plane < 0 || plane >= npts) {
    throw ParameterError("plane index " + std::to_string(plane) +
                         " outside 0.." + std::to_string(npts - 1));
  }
  const CVector w = reconstruct_w(model, psi, norm_factor);
  const Index vol = model.shape().volume();
  std::vector<FieldSlice> out;
  for (auto [name, comp] : {std::pair<const char*, int>{"v_z", 2},
                            std::pair<const char*, int>{"sigma_zz", 5}}) {
    FieldSlice f;
    f.component = name;
    f.component_index = comp;
    f.plane_axis = config.plane_axis;
    f.plane_index = plane;
    f.rows = npts;
    f.cols = npts;
    f.norm_factor = norm_factor;
    f.values.resize(static_cast<std::size_t>(npts) * npts);
    for (int a = 0; a < npts; ++a) {
      for (int b = 0; b < npts; ++b) {
        int idx[3];
        const int ax = axis_index(config.plane_axis);
        idx[ax] = plane;
        idx[ax == 0 ? 1 : 0] = a;
        idx[ax == 2 ? 1 : 2] = b;
        const Index s = (Index{idx[0]} * npts + idx[1]) * npts + idx[2];
        const cplx v = w(comp * vol + s);
        f.values[static_cast<std::size_t>(a) * npts + b] = v.real();
        f.max_imag = std::max(f.max_imag, std::abs(v.imag()));
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

double clip_threshold(const std::vector<double>& values, double fraction) {
  if (values.empty() || fraction <= 0.0) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
  std::vector<double> a;
  a.reserve(values.size());
  for (double v : values) a.push_back(std::abs(v));
  std::sort(a.begin(), a.end());
  const auto keep = static_cast<std::size_t>(
      std::floor((1.0 - fraction) * static_cast<double>(a.size())));
  return a[std::min(a.size() - 1, keep == 0 ? 0 : keep - 1)];
}

int worker_limit() {
  if (const char* env = std::getenv("ELASTOQ_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) return v;
    } catch (const std::exception&) {
    }
    throw ParameterError("ELASTOQ_THREADS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

bool hits(double t, const std::vector<double>& times) {
  for (double s : times) {
    if (std::abs(s - t) <= 1e-9 * std::max(1.0, std::abs(s))) return true;
  }
  return false;
}

}  // namespace

SweepResult run_fidelity_sweep(const ExperimentConfig& config,
                               const HamiltonianModel& model,
                               const InitialState& initial) {
  config.validate();
  SweepResult result;
  result.oracle = resolve_oracle(model, config.oracle);
  std::unique_ptr<ExactPropagator> prop;
  if (result.oracle == OracleKind::dense) {
    prop = std::make_unique<ExactPropagator>(model);
  }
  const CVector& psi0 = initial.psi;

  const std::size_t jobs = config.taus.size();
  result.curves.resize(jobs);
  std::vector<std::vector<Snapshot>> snaps(jobs);
  std::vector<double> residuals(jobs, 0.0);
  std::vector<std::exception_ptr> errors(jobs);

  auto run_job = [&](std::size_t i) {
    const double tau = config.taus[i];
    FidelityCurve& curve = result.curves[i];
    curve.tau = tau;
    curve.steps = config.steps_for(tau);
    CVector trotter = psi0;
    CVector ref = psi0;
    for (std::int64_t m = 0; m <= curve.steps; ++m) {
      const double t = static_cast<double>(m) * tau;
      if (m > 0) {
        apply_block_fast_in_place(model, config.scheme, tau, trotter);
        if (prop) {
          ref = prop->apply(t, psi0);
        } else {
          ExactResult r = exact_evolve(model, tau, ref, OracleKind::krylov);
          ref = std::move(r.state);
          residuals[i] += r.residual;
        }
      }
      curve.t.push_back(t);
      // Both states are psi0 before any evolution.
      curve.F.push_back(m == 0 ? 1.0 : fidelity(ref, trotter));
      if (hits(t, config.snapshot_times)) {
        snaps[i].push_back({"trotter", tau, t,
                            reconstruct_fields(config, model, trotter,
                                               initial.norm_factor)});
      }
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(jobs, static_cast<std::size_t>(worker_limit()));
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs;) {
      try {
        run_job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<double> times = config.snapshot_times;
  std::sort(times.begin(), times.end());
  for (double t : times) {
    CVector ref;
    if (prop) {
      ref = prop->apply(t, psi0);
    } else {
      ExactResult r = exact_evolve(model, t, psi0, OracleKind::krylov);
      ref = std::move(r.state);
      result.max_oracle_residual = std::max(result.max_oracle_residual, r.residual);
    }
    result.snapshots.push_back(
        {"exact", 0.0, t,
         reconstruct_fields(config, model, ref, initial.norm_factor)});
  }
  for (std::size_t i = 0; i < jobs; ++i) {
    for (Snapshot& s : snaps[i]) result.snapshots.push_back(std::move(s));
    result.max_oracle_residual = std::max(result.max_oracle_residual, residuals[i]);
  }
  return result;
}

namespace {

json slice_json(const FieldSlice& f, double clip) {
  const double thr = clip_threshold(f.values, clip);
  std::vector<double> clipped = f.values;
  for (double& v : clipped) v = std::clamp(v, -thr, thr);
  return json{{"component", f.component},
              {"component_index", f.component_index},
              {"rows", f.rows},
              {"cols", f.cols},
              {"norm_factor", f.norm_factor},
              {"max_imag", f.max_imag},
              {"values", f.values},
              {"clip_fraction", clip},
              {"clip_threshold", thr},
              {"clipped", clipped}};
}

std::string tag(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

void write_file(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  out << body;
}

}  // namespace

void print_dry_run(const ExperimentConfig& config, std::ostream& out) {
  config.validate();
  const int n = config.n;
  const std::int64_t per_step = config.scheme == Scheme::u1
                                    ? u1_step_cnot(n)
                                    : u2_step_cnot(n);
  out << "dry run: n=" << n << " qubits=" << qubit_count(n)
      << " amplitudes=" << (Index{1} << qubit_count(n))
      << " scheme=" << to_string(config.scheme)
      << " init=" << to_string(config.init) << " T=" << config.T << '\n';
  out << std::left << std::setw(10) << "tau" << std::setw(10) << "steps"
      << std::setw(16) << "cnot/step" << "cnot total\n";
  for (double tau : config.taus) {
    const std::int64_t m = config.steps_for(tau);
    out << std::setw(10) << tau << std::setw(10) << m << std::setw(16)
        << per_step << m * per_step << '\n';
  }
}

int run_experiment(const ExperimentConfig& config, std::ostream& out) {
  config.validate();
  if (config.dry_run) {
    print_dry_run(config, out);
    return 0;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const HamiltonianModel model(LatticeShape(config.n, config.h),
                               MaterialParams(config.rho, config.E, config.nu));
  const InitialState initial = build_initial_state(config, model);
  const SweepResult sweep = run_fidelity_sweep(config, model, initial);

  namespace fs = std::filesystem;
  const fs::path dir(config.out_dir);
  fs::create_directories(dir);

  const std::int64_t per_step = config.scheme == Scheme::u1
                                    ? u1_step_cnot(config.n)
                                    : u2_step_cnot(config.n);
  json manifest;
  manifest["config"] = config_json(config);
  manifest["qubits"] = model.qubits();
  manifest["oracle"] = to_string(sweep.oracle);
  manifest["oracle_residual"] = sweep.max_oracle_residual;
  manifest["norm_factor"] = initial.norm_factor;
  manifest["support"] = initial.support;
  manifest["frame"] = "fidelity between normalised B^{1/2}-frame states";
  manifest["plane"] = {{"axis", axis_name(config.plane_axis)},
                       {"index", config.resolved_plane_index()}};
  json runs = json::array();
  for (const FidelityCurve& c : sweep.curves) {
    std::ostringstream csv;
    csv << std::setprecision(17) << "t,F\n";
    for (std::size_t i = 0; i < c.t.size(); ++i) {
      csv << c.t[i] << ',' << c.F[i] << '\n';
    }
    const std::string name = "fidelity_tau_" + tag(c.tau) + ".csv";
    write_file(dir / name, csv.str());
    runs.push_back({{"tau", c.tau},
                    {"steps", c.steps},
                    {"final_fidelity", c.F.back()},
                    {"cnot_per_step", per_step},
                    {"cnot_total", c.steps * per_step},
                    {"file", name}});
  }
  manifest["runs"] = runs;
  json fields = json::array();
  for (const Snapshot& s : sweep.snapshots) {
    std::string name = s.source == "exact"
                           ? "fields_exact_t_" + tag(s.t) + ".json"
                           : "fields_trotter_tau_" + tag(s.tau) + "_t_" +
                                 tag(s.t) + ".json";
    json body{{"source", s.source},
              {"tau", s.tau},
              {"t", s.t},
              {"plane",
               {{"axis", axis_name(config.plane_axis)},
                {"index", config.resolved_plane_index()}}},
              {"fields", json::array()}};
    for (const FieldSlice& f : s.fields) {
      body["fields"].push_back(slice_json(f, config.clip));
    }
    write_file(dir / name, body.dump(1) + "\n");
    fields.push_back(name);
  }
  manifest["field_files"] = fields;
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out << "n=" << config.n << " qubits=" << model.qubits()
      << " init=" << to_string(config.init)
      << " scheme=" << to_string(config.scheme)
      << " oracle=" << to_string(sweep.oracle) << '\n';
  out << std::left << std::setw(10) << "tau" << std::setw(10) << "steps"
      << std::setw(24) << "F(T)" << "cnot total\n";
  for (const FidelityCurve& c : sweep.curves) {
    out << std::setw(10) << c.tau << std::setw(10) << c.steps << std::setw(24)
        << std::setprecision(15) << c.F.back() << std::setprecision(6)
        << c.steps * per_step << '\n';
  }
  out << "wall time " << std::fixed << std::setprecision(3) << wall << " s\n"
      << std::defaultfloat << "outputs in " << dir.string() << '\n';
  return 0;
}

}  // namespace elastoq
