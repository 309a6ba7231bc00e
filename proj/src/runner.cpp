#include "bhsim/runner.hpp"

#include <Eigen/Core>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>

#include "bhsim/basis.hpp"
#include "bhsim/continuum.hpp"
#include "bhsim/devicemodel.hpp"
#include "bhsim/dynamics.hpp"
#include "bhsim/io.hpp"
#include "bhsim/lattice.hpp"
#include "bhsim/observables.hpp"
#include "bhsim/radiation.hpp"
#include "bhsim/rng.hpp"
#include "bhsim/units.hpp"
#include "bhsim/version.hpp"

namespace bhsim::cli {

namespace fs = std::filesystem;

namespace {

// ------------------------------ shared helpers -------------------------------

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::vector<double> time_grid(const Config& cfg) {
  const double t_max = cfg.get_double("time", "t_max_ns");
  const int n_samples = cfg.get_int("time", "n_samples");
  if (t_max < 0) throw ConfigError("[time] t_max_ns must be nonnegative");
  if (n_samples < 2) throw ConfigError("[time] n_samples must be at least 2");
  std::vector<double> ts(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) ts[static_cast<std::size_t>(i)] = t_max * i / (n_samples - 1);
  return ts;
}

struct LatticeSettings {
  int n;
  std::string profile;
  double beta_mhz = 0.0;
  double eta_d = 0.0;
  int j_h = 0;
  double kappa_mhz = 0.0;
};

LatticeSettings lattice_settings(const Config& cfg) {
  LatticeSettings s;
  s.n = cfg.get_int("lattice", "n");
  s.profile = cfg.get_string("lattice", "profile");
  if (s.profile == "tanh") {
    s.beta_mhz = cfg.get_double("lattice", "beta_mhz");
    s.eta_d = cfg.get_double("lattice", "eta_d");
    s.j_h = cfg.get_int("lattice", "j_h");
  } else if (s.profile == "centered") {
    s.beta_mhz = cfg.get_double("lattice", "beta_mhz");
    s.eta_d = cfg.get_double("lattice", "eta_d");
    s.j_h = cfg.get_int_or("lattice", "j_h", 4);
  } else if (s.profile == "flat") {
    s.kappa_mhz = cfg.get_double("lattice", "kappa_mhz");
  } else {
    throw ConfigError("[lattice] profile must be tanh, flat or centered, got '" + s.profile + "'");
  }
  return s;
}

lattice::CouplingProfile build_profile(const LatticeSettings& s) {
  try {
    if (s.profile == "tanh") return lattice::tanh_profile(mhz_to_rad_ns(s.beta_mhz), s.eta_d, s.j_h, s.n);
    if (s.profile == "centered") return lattice::centered_profile(mhz_to_rad_ns(s.beta_mhz), s.eta_d, s.n);
    return lattice::flat_profile(mhz_to_rad_ns(s.kappa_mhz), s.n);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[lattice] ") + e.what());
  }
}

std::string initial_bitstring(const Config& cfg, int n) {
  const std::string kind = cfg.get_string_or("initial", "kind", "bitstring");
  if (kind != "bitstring") throw ConfigError("[initial] kind must be 'bitstring' for this experiment");
  std::string bits = cfg.get_string("initial", "bitstring");
  if (static_cast<int>(bits.size()) != n)
    throw ConfigError("[initial] bitstring length does not match [lattice] n");
  return bits;
}

fs::path prepare_out_dir(const Config& cfg, const RunOptions& opts) {
  std::string dir = !opts.out_dir.empty() ? opts.out_dir : cfg.get_string_or("output", "dir", "out");
  fs::path p(dir);
  fs::create_directories(p);
  if (fs::exists(p / "summary.txt") && !opts.overwrite)
    throw ConfigError("output directory already holds results: " + (p / "summary.txt").string() +
                      " (use --overwrite)");
  return p;
}

void write_summary(const fs::path& out, Experiment kind, const Config& cfg, const RunOptions& opts,
                   std::uint64_t seed_used, double wall_ms, const std::vector<std::string>& files,
                   const std::vector<std::pair<std::string, std::string>>& extras = {}) {
  io::KeyValueWriter w(out / "summary.txt");
  w.entry("experiment", experiment_name(kind));
  w.entry("bhsim_version", version_string);
  w.entry("eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                               std::to_string(EIGEN_MINOR_VERSION));
  w.entry("seed", std::to_string(seed_used));
  w.entry("threads", opts.threads);
  for (const auto& [k, v] : extras) w.entry(k, v);
  for (const auto& f : files) w.entry("file", f);
  w.entry("wall_time_ms", io::format_double(wall_ms));
  w.blank();
  w.line("--- begin config ---");
  std::string raw = cfg.raw_text();
  if (!raw.empty() && raw.back() == '\n') raw.pop_back();
  w.line(raw);
  w.line("--- end config ---");
}

// index-ordered parallel map; results land by index so thread count never
// changes the output
void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// ----------------------------- radiation pipeline ----------------------------

struct PipelineResult {
  radiation::RadiationSpectrum spectrum;
  std::vector<std::pair<double, double>> groups;
  radiation::TemperatureFit fit;
  bool fit_ok = true;
  std::string fit_error;
};

// Evolve `initial` under h_evolve, trace out everything through the horizon,
// embed, project onto eigenstates of h_project, group and fit.  Disordered
// runs keep projecting onto the clean designed chain, which is the basis an
// observer calibrated against.
PipelineResult radiation_pipeline(const lattice::HamiltonianSpec& h_evolve, const lattice::HamiltonianSpec& h_project,
                                  const std::string& initial, int j_h, double t_ns, double e_tol,
                                  std::optional<double> e_min, std::optional<double> e_max) {
  const int n = h_evolve.site_count();
  const auto evolved = dynamics::evolve(h_evolve, dynamics::basis_state(initial), t_ns);

  std::vector<int> exterior, interior;
  for (int s = 1; s <= n; ++s) (s > j_h ? exterior : interior).push_back(s);
  if (exterior.empty()) throw ConfigError("radiation: no sites outside the horizon");
  const auto rho_ext = dynamics::reduced_density_matrix(evolved, exterior);
  const auto rho_out = radiation::embed_exterior(rho_ext, n, interior);

  PipelineResult res;
  res.spectrum = radiation::radiation_probabilities(h_project, rho_out);
  res.spectrum.evolution_time_ns = t_ns;
  res.groups = radiation::average_positive(res.spectrum, e_tol);

  std::vector<std::pair<double, double>> points;
  for (const auto& [e, p] : res.groups) {
    if (e_min && rad_ns_to_mhz(e) < *e_min) continue;
    if (e_max && rad_ns_to_mhz(e) > *e_max) continue;
    points.emplace_back(e, p);
  }
  try {
    res.fit = radiation::fit_temperature(points);
  } catch (const std::invalid_argument& e) {
    res.fit_ok = false;
    res.fit_error = e.what();
  }
  return res;
}

void write_spectrum(const fs::path& path, const radiation::RadiationSpectrum& spec) {
  io::TableWriter t(path, {"E_over_2pi_MHz", "P_n", "sector"});
  for (const auto& l : spec.lines) t.row({rad_ns_to_mhz(l.energy), l.probability, static_cast<double>(l.sector)});
}

void write_fit(const fs::path& path, const PipelineResult& res) {
  io::KeyValueWriter w(path);
  w.entry("n_points", res.fit_ok ? res.fit.points_used : 0);
  if (!res.fit_ok) {
    w.entry("status", "no_fit: " + res.fit_error);
    return;
  }
  if (res.fit.degenerate) {
    w.entry("status", "degenerate_nonnegative_slope");
    w.entry("slope_per_rad_ns", res.fit.slope);
    return;
  }
  w.entry("status", "ok");
  w.entry("slope_per_rad_ns", res.fit.slope);
  w.entry("intercept", res.fit.intercept);
  w.entry("t_h_rad_ns", res.fit.t_h);
  w.entry("t_h_mhz", res.fit.t_h_mhz);
  w.entry("t_kelvin", res.fit.t_kelvin);
  w.entry("mass_ratio_solar", radiation::equivalent_mass(res.fit.t_kelvin));
  w.entry("slope_stderr", res.fit.slope_stderr);
  w.entry("t_h_stderr_rad_ns", res.fit.t_h_stderr);
}

// --------------------------------- experiments -------------------------------

void write_profile(const fs::path& path, const lattice::CouplingProfile& profile) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  f << lattice::profile_table(profile);
}

std::vector<std::string> run_walk(const fs::path& out, const Config& cfg) {
  const auto settings = lattice_settings(cfg);
  const auto h = lattice::clean_hamiltonian(build_profile(settings));
  write_profile(out / "profile.tsv", h.profile);
  const auto bits = initial_bitstring(cfg, settings.n);
  const auto ts = time_grid(cfg);

  const Pattern p0 = parse_bitstring(bits);
  io::TableWriter traj(out / "walk_trajectory.tsv", {"t_ns", "site", "p"});
  if (popcount(p0) == 1) {
    const auto occ = dynamics::single_particle_occupations(h, bits, ts);
    for (std::size_t i = 0; i < ts.size(); ++i)
      for (int s = 0; s < settings.n; ++s)
        traj.row({ts[i], static_cast<double>(s + 1), occ(static_cast<Eigen::Index>(i), s)});
  } else {
    const auto state = dynamics::basis_state(bits);
    dynamics::PropagatorCache cache(h, dynamics::populated_sectors(state));
    for (const double t : ts) {
      const auto occ = dynamics::occupations(dynamics::evolve(cache, state, t));
      for (int s = 0; s < settings.n; ++s) traj.row({t, static_cast<double>(s + 1), occ(s)});
    }
  }
  return {"profile.tsv", "walk_trajectory.tsv"};
}

std::vector<std::string> run_radiation(const fs::path& out, const Config& cfg) {
  const auto settings = lattice_settings(cfg);
  if (settings.profile == "flat") throw ConfigError("radiation: lattice profile must define a horizon (tanh)");
  const auto h = lattice::clean_hamiltonian(build_profile(settings));
  const std::string bits = cfg.has("initial", "bitstring") ? initial_bitstring(cfg, settings.n)
                                                           : "1" + std::string(static_cast<std::size_t>(settings.n - 1), '0');
  const double t_ns = cfg.get_double("time", "t_max_ns");
  const double e_tol = mhz_to_rad_ns(cfg.get_double_or("radiation", "e_tol_mhz", 1e-3));
  std::optional<double> e_min, e_max;
  if (cfg.has("radiation", "e_min_mhz")) e_min = cfg.get_double("radiation", "e_min_mhz");
  if (cfg.has("radiation", "e_max_mhz")) e_max = cfg.get_double("radiation", "e_max_mhz");

  auto res = radiation_pipeline(h, h, bits, settings.j_h, t_ns, e_tol, e_min, e_max);
  res.spectrum.profile_label = settings.profile;

  write_profile(out / "profile.tsv", h.profile);
  write_spectrum(out / "radiation_spectrum.tsv", res.spectrum);
  {
    io::TableWriter t(out / "radiation_averaged.tsv", {"E_over_2pi_MHz", "P_mean", "ln_P_mean"});
    for (const auto& [e, p] : res.groups) t.row({rad_ns_to_mhz(e), p, p > 0 ? std::log(p) : std::nan("")});
  }
  write_fit(out / "radiation_fit.txt", res);
  return {"profile.tsv", "radiation_spectrum.tsv", "radiation_averaged.tsv", "radiation_fit.txt"};
}

std::vector<std::string> run_entangle(const fs::path& out, const Config& cfg) {
  const std::string kind = cfg.get_string_or("initial", "kind", "bell");
  if (kind != "bell") throw ConfigError("entangle: [initial] kind must be 'bell'");
  const int n = cfg.get_int("lattice", "n");
  const auto ts = time_grid(cfg);

  std::vector<std::pair<std::string, lattice::CouplingProfile>> profiles;
  if (cfg.has("lattice", "beta_mhz"))
    profiles.emplace_back("curved", lattice::tanh_profile(mhz_to_rad_ns(cfg.get_double("lattice", "beta_mhz")),
                                                          cfg.get_double("lattice", "eta_d"),
                                                          cfg.get_int("lattice", "j_h"), n));
  if (cfg.has("lattice", "kappa_mhz"))
    profiles.emplace_back("flat", lattice::flat_profile(mhz_to_rad_ns(cfg.get_double("lattice", "kappa_mhz")), n));
  if (profiles.empty()) throw ConfigError("entangle: [lattice] must define beta_mhz (curved) and/or kappa_mhz (flat)");

  std::vector<std::string> files;
  const auto bell = dynamics::bell_pair_state(n);
  for (const auto& [label, profile] : profiles) {
    const auto h = lattice::clean_hamiltonian(profile);
    write_profile(out / ("profile_" + label + ".tsv"), h.profile);
    files.push_back("profile_" + label + ".tsv");
    dynamics::PropagatorCache cache(h, {0, 2});
    const std::string name = "entangle_" + label + ".tsv";
    io::TableWriter t(out / name, {"t_ns", "entropy_bits", "concurrence"});
    for (const double time : ts) {
      const auto rho = dynamics::reduced_density_matrix(dynamics::evolve(cache, bell, time), {1, 2});
      t.row({time, observables::von_neumann_entropy(rho), observables::concurrence(rho)});
    }
    files.push_back(name);
  }
  return files;
}

std::vector<std::string> run_continuum(const fs::path& out, const Config& cfg) {
  continuum::PacketConfig pc;
  pc.n = cfg.get_int("packet", "n");
  pc.d = cfg.get_double("packet", "d");
  pc.alpha = cfg.get_double("packet", "alpha");
  pc.k = cfg.get_double("packet", "k");
  pc.delta = cfg.get_double("packet", "delta");
  pc.x0 = cfg.get_double("packet", "x0");
  pc.mu = cfg.get_double_or("packet", "mu", 0.0);
  try {
    pc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[packet] ") + e.what());
  }

  const double t_max = cfg.get_double("packet", "t_max");
  const int n_samples = cfg.get_int("packet", "n_samples");
  if (n_samples < 2) throw ConfigError("[packet] n_samples must be at least 2");
  std::vector<double> ts(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) ts[static_cast<std::size_t>(i)] = t_max * i / (n_samples - 1);

  const std::string engine_name = cfg.get_string_or("packet", "engine", "auto");
  continuum::Engine engine = continuum::Engine::automatic;
  if (engine_name == "rk") engine = continuum::Engine::runge_kutta;
  else if (engine_name == "chebyshev") engine = continuum::Engine::chebyshev;
  else if (engine_name != "auto") throw ConfigError("[packet] engine must be auto, rk or chebyshev");

  const double boundary_tol = cfg.get_double_or("packet", "boundary_tol", 1e-6);
  const int stride = cfg.get_int_or("packet", "site_stride", 1);
  if (stride < 1) throw ConfigError("[packet] site_stride must be positive");

  const double alpha = pc.alpha;
  auto f = [alpha](double x) { return alpha == 0.0 ? 1.0 : std::tanh(alpha * x); };
  const auto traj = continuum::evolve_packet(pc, f, ts, engine, boundary_tol);

  {
    io::TableWriter t(out / "continuum_heatmap.tsv", {"t", "n", "psi_sq"});
    for (std::size_t i = 0; i < ts.size(); ++i)
      for (int s = 0; s < pc.n; s += stride)
        t.row({ts[i], static_cast<double>(s), traj.density(static_cast<Eigen::Index>(i), s)});
  }
  {
    io::TableWriter t(out / "continuum_center.tsv", {"t", "x_center", "norm"});
    for (std::size_t i = 0; i < ts.size(); ++i)
      t.row({ts[i], traj.center(static_cast<Eigen::Index>(i)), traj.norm(static_cast<Eigen::Index>(i))});
  }
  {
    const auto rep = continuum::validity_report(pc);
    io::KeyValueWriter w(out / "continuum_validity.txt");
    w.entry("kd", rep.kd);
    w.entry("kd_flag", continuum::regime_name(rep.kd_flag));
    w.entry("d_alpha", rep.d_alpha);
    w.entry("d_alpha_flag", continuum::regime_name(rep.d_alpha_flag));
    w.entry("delta_alpha", rep.delta_alpha);
    w.entry("delta_alpha_flag", continuum::regime_name(rep.delta_alpha_flag));
    w.entry("d_over_delta", rep.d_over_delta);
    w.entry("d_over_delta_flag", continuum::regime_name(rep.d_over_delta_flag));
    w.entry("trap_radius", 5.0 * pc.d);
    const auto trap = continuum::trapping_times(traj, 5.0 * pc.d);
    w.entry("trap_entry_t", trap.entry);
    w.entry("trap_exit_t", trap.exit);
    w.entry("trap_duration", trap.duration);
    w.entry("trap_escaped", trap.escaped ? "true" : "false");
  }
  return {"continuum_heatmap.tsv", "continuum_center.tsv", "continuum_validity.txt"};
}

std::vector<std::string> run_device(const fs::path& out, const Config& cfg, std::uint64_t seed) {
  device::TransmonParams coupler;
  coupler.e_jj_ghz = cfg.get_double("device", "e_jj_ghz");
  coupler.e_c_ghz = cfg.get_double("device", "e_c_ghz");
  coupler.asymmetry = cfg.get_double_or("device", "asymmetry", 0.0);
  coupler.zpa_slope = cfg.get_double("device", "zpa_slope");
  coupler.flux_offset = cfg.get_double("device", "flux_offset");
  try {
    coupler.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[device] ") + e.what());
  }

  device::CouplerTriple triple;
  triple.g_qc_mhz = cfg.get_double("device", "g_qc_mhz");
  triple.g_q2c_mhz = cfg.get_double("device", "g_q2c_mhz");
  triple.g_qq_mhz = cfg.get_double("device", "g_qq_mhz");
  triple.omega_q_ghz = cfg.get_double("device", "omega_q_ghz");
  triple.omega_q2_ghz = cfg.get_double("device", "omega_q2_ghz");
  triple.coupler = coupler;
  triple.anharmonicity_q_mhz = cfg.get_double_or("device", "anharmonicity_q_mhz", 0.0);
  triple.anharmonicity_c_mhz = cfg.get_double_or("device", "anharmonicity_c_mhz", 0.0);
  triple.anharmonicity_q2_mhz = cfg.get_double_or("device", "anharmonicity_q2_mhz", 0.0);

  std::vector<std::string> files;
  {
    io::KeyValueWriter w(out / "device_params.txt");
    w.entry("omega_q_ghz", triple.omega_q_ghz);
    w.entry("omega_q2_ghz", triple.omega_q2_ghz);
    w.entry("coupler_e_jj_ghz", coupler.e_jj_ghz);
    w.entry("coupler_e_c_ghz", coupler.e_c_ghz);
    w.entry("coupler_asymmetry", coupler.asymmetry);
    w.entry("coupler_zpa_slope", coupler.zpa_slope);
    w.entry("coupler_flux_offset", coupler.flux_offset);
    w.entry("coupler_band_ghz_min", device::min_frequency(coupler));
    w.entry("coupler_band_ghz_max", device::max_frequency(coupler));
    w.entry("g_qc_mhz", triple.g_qc_mhz);
    w.entry("g_q2c_mhz", triple.g_q2c_mhz);
    w.entry("g_qq_mhz", triple.g_qq_mhz);
    w.entry("anharmonicity_q_mhz", triple.anharmonicity_q_mhz);
    w.entry("anharmonicity_c_mhz", triple.anharmonicity_c_mhz);
    w.entry("anharmonicity_q2_mhz", triple.anharmonicity_q2_mhz);
    files.push_back("device_params.txt");
  }
  {
    const double zpa_min = cfg.get_double_or("device", "zpa_min", 0.1);
    const double zpa_max = cfg.get_double_or("device", "zpa_max", 1.2);
    const int steps = cfg.get_int_or("device", "zpa_steps", 101);
    if (steps < 2) throw ConfigError("[device] zpa_steps must be at least 2");
    io::TableWriter t(out / "coupling_curve.tsv", {"zpa", "omega_c_ghz", "g_eff_mhz"});
    io::TableWriter a(out / "anticrossing.tsv", {"omega_c_ghz", "upper_ghz", "lower_ghz"});
    for (int i = 0; i < steps; ++i) {
      const double zpa = zpa_min + (zpa_max - zpa_min) * i / (steps - 1);
      const double wc = device::freq_from_zpa(coupler, zpa);
      double g = std::nan("");
      try {
        g = device::effective_coupling(triple, wc);
      } catch (const std::invalid_argument&) {
      }
      t.row({zpa, wc, g});
      const auto [up, dn] = device::anticrossing_branches(triple.g_qc_mhz, triple.omega_q_ghz, wc);
      a.row({wc, up, dn});
    }
    files.push_back("coupling_curve.tsv");
    files.push_back("anticrossing.tsv");
  }
  {
    const double g_swap = cfg.get_double_or("device", "swap_g_mhz", 2.94);
    const double t_max = cfg.get_double_or("device", "swap_t_max_ns", 1000.0);
    const double dt = cfg.get_double_or("device", "swap_dt_ns", 1.0);
    std::vector<double> ts, ps;
    io::TableWriter t(out / "swap.tsv", {"t_ns", "p01"});
    for (double time = 0.0; time < t_max; time += dt) {
      const double p = device::swap_probability(g_swap, 0.0, time);
      t.row({time, p});
      ts.push_back(time);
      ps.push_back(p);
    }
    io::KeyValueWriter w(out / "swap_extraction.txt");
    w.entry("g_input_mhz", g_swap);
    w.entry("g_extracted_mhz", device::coupling_from_swap_trace(ts, ps));
    files.push_back("swap.tsv");
    files.push_back("swap_extraction.txt");
  }
  if (cfg.get_bool_or("device", "run_fit", false)) {
    // synthetic ground-truth spectroscopy generated from the configured
    // device, fitted back from a perturbed initial guess
    device::SpectroscopyData data;
    const double wc_hi = device::max_frequency(coupler) - 0.05;
    const double wc_lo = std::max(device::min_frequency(coupler) + 0.05, triple.omega_q2_ghz - 0.7);
    for (int i = 0; i < 25; ++i) {
      const double zpa = device::zpa_from_freq(coupler, wc_hi - (wc_hi - wc_lo) * i / 24.0);
      const double wc = device::freq_from_zpa(coupler, zpa);
      const auto eig = device::three_body_spectrum(triple, wc);
      for (int b = 0; b < 3; ++b) data.three_body.push_back({zpa, eig(b)});
      const auto [u1, d1] = device::anticrossing_branches(triple.g_qc_mhz, triple.omega_q_ghz, wc);
      data.anticross_q.push_back({zpa, u1});
      data.anticross_q.push_back({zpa, d1});
      const auto [u2, d2] = device::anticrossing_branches(triple.g_q2c_mhz, triple.omega_q2_ghz, wc);
      data.anticross_q2.push_back({zpa, u2});
      data.anticross_q2.push_back({zpa, d2});
    }
    device::TransmonParams init = coupler;
    init.e_jj_ghz *= 1.02;
    init.flux_offset += 0.01;
    device::SpectroscopyFitOptions fopts;
    fopts.seed = seed;
    const auto fit = device::fit_spectroscopy(data, triple, init, triple.g_qc_mhz * 0.97, triple.g_q2c_mhz * 1.03, fopts);
    io::KeyValueWriter w(out / "fit_report.txt");
    w.entry("converged", fit.converged ? "true" : "false");
    w.entry("iterations", fit.iterations);
    w.entry("g_qc_mhz", fit.g_qc_mhz);
    w.entry("g_q2c_mhz", fit.g_q2c_mhz);
    w.entry("e_jj_ghz", fit.e_jj_ghz);
    w.entry("zpa_slope", fit.zpa_slope);
    w.entry("flux_offset", fit.flux_offset);
    w.entry("residual_ghz2", fit.residual);
    w.entry("rss_three_body", fit.rss_three_body);
    w.entry("rss_anticross_q", fit.rss_anticross_q);
    w.entry("rss_anticross_q2", fit.rss_anticross_q2);
    files.push_back("fit_report.txt");
  }
  return files;
}

std::vector<std::string> run_sweep(const fs::path& out, const Config& cfg, const RunOptions& opts,
                                   std::uint64_t seed) {
  const std::string kind = cfg.get_string_or("sweep", "kind", "disorder");
  std::vector<std::string> files;

  if (kind == "size") {
    const auto sizes = cfg.get_double_list("sweep", "sizes");
    const auto horizons = cfg.get_double_list("sweep", "horizons");
    const int initial_site = cfg.get_int("sweep", "initial_site");
    const double beta = mhz_to_rad_ns(cfg.get_double("lattice", "beta_mhz"));
    const double eta_d = cfg.get_double("lattice", "eta_d");
    const auto ts = time_grid(cfg);
    for (double n_d : sizes)
      for (double j_d : horizons) {
        const int n = static_cast<int>(n_d), j_h = static_cast<int>(j_d);
        const auto h = lattice::clean_hamiltonian(lattice::tanh_profile(beta, eta_d, j_h, n));
        const auto occ = dynamics::single_particle_occupations(h, initial_site, ts);
        const std::string name = "pout_n" + std::to_string(n) + "_jh" + std::to_string(j_h) + ".tsv";
        io::TableWriter t(out / name, {"t_ns", "p_out"});
        for (std::size_t i = 0; i < ts.size(); ++i)
          t.row({ts[i], observables::p_out(occ.row(static_cast<Eigen::Index>(i)).transpose(), j_h)});
        files.push_back(name);
      }
    return files;
  }
  if (kind != "disorder") throw ConfigError("[sweep] kind must be 'disorder' or 'size'");

  const auto settings = lattice_settings(cfg);
  if (settings.profile == "flat") throw ConfigError("sweep: lattice profile must define a horizon (tanh)");
  const auto profile = build_profile(settings);
  const auto h_clean = lattice::clean_hamiltonian(profile);
  const std::string bits = cfg.has("initial", "bitstring") ? initial_bitstring(cfg, settings.n)
                                                           : "1" + std::string(static_cast<std::size_t>(settings.n - 1), '0');
  const double t_ns = cfg.get_double("time", "t_max_ns");
  const double e_tol = mhz_to_rad_ns(cfg.get_double_or("radiation", "e_tol_mhz", 1e-3));
  const int realizations = cfg.get_int("disorder", "realizations");
  if (realizations < 1) throw ConfigError("[disorder] realizations must be at least 1");

  std::vector<double> w_nnn_list{0.0}, w_mu_list{0.0};
  if (cfg.has("disorder", "w_nnn_mhz")) w_nnn_list = cfg.get_double_list("disorder", "w_nnn_mhz");
  if (cfg.has("disorder", "w_mu_mhz")) w_mu_list = cfg.get_double_list("disorder", "w_mu_mhz");

  const auto clean = radiation_pipeline(h_clean, h_clean, bits, settings.j_h, t_ns, e_tol, {}, {});
  write_profile(out / "profile.tsv", h_clean.profile);
  files.push_back("profile.tsv");

  fs::create_directories(out / "realizations");
  for (double w_nnn_mhz : w_nnn_list)
    for (double w_mu_mhz : w_mu_list) {
      const std::string tag = "wnnn" + format_g(w_nnn_mhz) + "_wmu" + format_g(w_mu_mhz);
      std::vector<PipelineResult> results(static_cast<std::size_t>(realizations));
      parallel_for(realizations, opts.threads, [&](int r) {
        const auto h_dis = lattice::disorder_hamiltonian(profile, mhz_to_rad_ns(w_nnn_mhz), mhz_to_rad_ns(w_mu_mhz),
                                                         substream_seed(seed, static_cast<std::uint64_t>(r)));
        results[static_cast<std::size_t>(r)] = radiation_pipeline(h_dis, h_clean, bits, settings.j_h, t_ns, e_tol, {}, {});
      });

      // per-realization spectra
      for (int r = 0; r < realizations; ++r) {
        char name[128];
        std::snprintf(name, sizeof(name), "realizations/%s_r%03d.tsv", tag.c_str(), r);
        io::TableWriter t(out / name, {"E_over_2pi_MHz", "P_mean", "ln_P_mean"});
        for (const auto& [e, p] : results[static_cast<std::size_t>(r)].groups)
          t.row({rad_ns_to_mhz(e), p, p > 0 ? std::log(p) : std::nan("")});
        files.push_back(name);
      }

      // aggregate mean +- std of ln(P) on the shared clean-energy grid
      const std::size_t n_groups = clean.groups.size();
      const std::string name = "sweep_" + tag + ".tsv";
      io::TableWriter t(out / name, {"E_over_2pi_MHz", "mean_ln_P", "std_ln_P", "clean_ln_P"});
      for (std::size_t gidx = 0; gidx < n_groups; ++gidx) {
        double mean = 0.0;
        for (const auto& res : results) mean += std::log(res.groups.at(gidx).second);
        mean /= realizations;
        double var = 0.0;
        for (const auto& res : results) {
          const double d = std::log(res.groups.at(gidx).second) - mean;
          var += d * d;
        }
        const double sd = realizations > 1 ? std::sqrt(var / (realizations - 1)) : 0.0;
        t.row({rad_ns_to_mhz(clean.groups[gidx].first), mean, sd, std::log(clean.groups[gidx].second)});
      }
      files.push_back(name);
    }
  return files;
}

}  // namespace

RunResult run(Experiment kind, const Config& cfg, const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  for (const char* section : {"run", ""}) {
    if (!cfg.has(section, "experiment")) continue;
    const auto declared = experiment_from_name(cfg.get_string(section, "experiment"));
    if (declared != kind)
      throw ConfigError(std::string("config declares experiment '") + experiment_name(declared) +
                        "' but the command requested '" + experiment_name(kind) + "'");
  }
  if (opts.threads < 1) throw ConfigError("--threads must be at least 1");

  const fs::path out = prepare_out_dir(cfg, opts);
  const std::uint64_t seed = opts.seed ? *opts.seed : cfg.get_u64_or("disorder", "seed", 1);

  std::vector<std::string> files;
  switch (kind) {
    case Experiment::walk: files = run_walk(out, cfg); break;
    case Experiment::radiation: files = run_radiation(out, cfg); break;
    case Experiment::entangle: files = run_entangle(out, cfg); break;
    case Experiment::continuum: files = run_continuum(out, cfg); break;
    case Experiment::device: files = run_device(out, cfg, seed); break;
    case Experiment::sweep: files = run_sweep(out, cfg, opts, seed); break;
  }

  const double wall_ms =
      std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(std::chrono::steady_clock::now() - t0)
          .count();
  write_summary(out, kind, cfg, opts, seed, wall_ms, files);

  RunResult res;
  res.out_dir = out;
  res.files = files;
  res.files.push_back("summary.txt");
  return res;
}

}  // namespace bhsim::cli
