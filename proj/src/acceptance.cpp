#include "adhesim/acceptance.hpp"

#include <time.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "adhesim/asymptotics.hpp"
#include "adhesim/bifurcation.hpp"
#include "adhesim/solver.hpp"

namespace adhesim {

namespace {

constexpr double kPi = std::numbers::pi;

double thread_cpu_seconds() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

struct Sheet {
  std::string prefix;
  std::vector<Check> checks;

  void add(const std::string& name, bool pass, double value, double tol) {
    checks.push_back({prefix + "." + name, pass, value, tol});
  }
  void at_most(const std::string& name, double value, double tol) {
    add(name, value <= tol, value, tol);
  }
  void at_least(const std::string& name, double value, double tol) {
    add(name, value >= tol, value, tol);
  }
  void equal(const std::string& name, int value, int want) {
    add(name, value == want, value, want);
  }
};

AdhesionModel periodic_model(double L, int N, double alpha,
                             NonlocalOperator::Backend backend = NonlocalOperator::Backend::Auto) {
  return AdhesionModel(NonlocalOperator(Grid(L, N), uniform_kernel(), SensingMode::periodic(),
                                        AdhesionFunction::linear(), backend),
                       {1.0, alpha});
}

// least-squares slope of log y against log x
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a, sy += b, sxx += a * a, sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void bifurcation_points(Sheet& s) {
  const auto recs = bif_points(uniform_kernel(), 5.0, 1.0, 1.0, 3);
  const double r5 = std::sqrt(5.0);
  const double exact[3] = {16 * kPi * kPi / (25 * (5 - r5)), 64 * kPi * kPi / (25 * (5 + r5)),
                           144 * kPi * kPi / (25 * (5 + r5))};
  for (int k = 0; k < 3; ++k)
    s.at_most("alpha_" + std::to_string(k + 1) + "_error", std::abs(recs[k].alpha_n - exact[k]), 1e-10);
}

void criticality(Sheet& s) {
  for (double L : {2.5, 3.0, 5.0, 10.0}) {
    double lowest = INFINITY;
    int modes = 0;
    for (const auto& r : bif_points(uniform_kernel(), L, 1.0, 1.0, 50)) {
      if (r.criticality == Criticality::Degenerate) continue;
      ++modes;
      lowest = std::min(lowest, r.alpha_3n);
    }
    char name[48];
    std::snprintf(name, sizeof name, "uniform_L%g_min_alpha3", L);
    s.add(name, modes > 0 && lowest > 0.0, lowest, 0.0);
  }
  const double a31 = bif_type(uniform_kernel(), 2.0, 1.0, 1).alpha_3n;
  s.at_most("uniform_L2_alpha31_error", std::abs(a31 - std::pow(kPi / 2, 6)), 1e-10);

  const KernelSpec two = two_point_kernel(8.0 / 18.0, 1.0 / 18.0, 0.05, 0.8);
  int sub = 0;
  double most_negative = 0.0;
  for (const auto& r : bif_points(two, 3.0, 1.0, 1.0, 50))
    if (r.Mn > 0.0 && r.criticality != Criticality::Degenerate && r.alpha_3n < 0.0) {
      ++sub;
      most_negative = std::min(most_negative, r.alpha_3n);
    }
  s.add("two_point_L3_subcritical_modes", sub > 0, sub, 1);
  s.add("two_point_L3_min_alpha3", most_negative < 0.0, most_negative, 0.0);
}

struct SpectralErrors {
  double k = 0.0;
  double kp = 0.0;
};

SpectralErrors spectral_errors(int N, int n) {
  const double L = 5.0;
  const Grid grid(L, N);
  const NonlocalOperator op(grid, uniform_kernel(), SensingMode::periodic());
  const double Mn = moment_Mn(op.kernel(), n, L);
  const double k = 2 * kPi * n / L;
  Field u(static_cast<std::size_t>(grid.cells()));
  for (int i = 0; i < grid.cells(); ++i) u[static_cast<std::size_t>(i)] = std::cos(k * grid.x(i));
  const Field K = op.apply(u);
  const Field Kp = op.apply_prime(u);
  SpectralErrors e;
  for (int i = 0; i < grid.cells(); ++i) {
    const double x = grid.x(i);
    e.k = std::max(e.k, std::abs(K[static_cast<std::size_t>(i)] + 2 * Mn * std::sin(k * x)));
    e.kp = std::max(e.kp, std::abs(Kp[static_cast<std::size_t>(i)] + 2 * Mn * k * std::cos(k * x)));
  }
  return e;
}

constexpr double kRoundingFloor = 1e-12;

void spectral(Sheet& s) {
  for (int n = 1; n <= 5; ++n) {
    const SpectralErrors c = spectral_errors(256, n), f = spectral_errors(512, n);
    const std::string m = "n" + std::to_string(n);
    s.at_most(m + "_K_error", c.k, 5e-5);
    // a mode with M_n = 0 (n = L here) is reproduced to rounding, no order to observe
    if (c.k < kRoundingFloor && f.k < kRoundingFloor) {
      s.at_most(m + "_K_exact", std::max(c.k, f.k), kRoundingFloor);
      s.at_most(m + "_Kprime_exact", std::max(c.kp, f.kp), kRoundingFloor);
      continue;
    }
    s.at_least(m + "_K_order", std::log2(c.k / f.k), 1.9);
    s.at_least(m + "_Kprime_order", std::log2(c.kp / f.kp), 1.9);
  }
}

void pattern_onset(Sheet& s) {
  const struct {
    double alpha;
    int peaks;
  } cases[] = {{1.5, 0}, {3.25, 1}, {7.5, 2}};
  for (const auto& c : cases) {
    const AdhesionModel model = periodic_model(5.0, 256, c.alpha);
    IntegrateOptions io;
    io.t_end = 200.0;
    io.record_energy = false;
    const Kymograph ky = integrate(model, noise_field(model.grid(), 1.0, 1e-2, 0), io);
    char tag[32];
    std::snprintf(tag, sizeof tag, "alpha%g", c.alpha);
    s.equal(std::string(tag) + "_peaks_t200", count_peaks(ky.final_state, true), c.peaks);
    if (c.peaks == 0) {
      double dev = 0.0;
      for (double v : ky.final_state) dev = std::max(dev, std::abs(v - 1.0));
      s.at_most(std::string(tag) + "_deviation", dev, 1e-3);
    }
  }
}

void coarsening(Sheet& s) {
  const AdhesionModel model = periodic_model(10.0, 128, 2.5);
  const Grid& grid = model.grid();
  Field u0 = cosine_field(grid, 1.0, 2, 0.1);
  const Field noise = noise_field(grid, 0.0, 1e-3, 0);
  for (std::size_t i = 0; i < u0.size(); ++i) u0[i] += noise[i];

  // stop once a single peak has persisted for 20 time units after two were seen
  bool seen_two = false;
  double t_single = NAN;
  std::uint64_t calls = 0;
  IntegrateOptions io;
  io.t_end = 1e4;
  io.record_energy = false;
  io.observer = [&](double t, const Field& u) {
    if (++calls % 100 != 0) return true;
    const int p = count_peaks(u, true);
    if (p == 2) seen_two = true;
    if (p == 1 && seen_two) {
      if (std::isnan(t_single)) t_single = t;
      return t - t_single < 20.0;
    }
    t_single = NAN;
    return true;
  };
  const Kymograph ky = integrate(model, u0, io);
  s.add("two_peaks_seen", seen_two, seen_two ? 1 : 0, 1);
  s.equal("final_peaks", count_peaks(ky.final_state, true), 1);
  s.at_most("single_peak_time", std::isnan(t_single) ? INFINITY : t_single, 1e4);
}

void asymptotic_oracle(Sheet& s) {
  const KernelSpec kernel = normalize(uniform_kernel());
  const double L = 5.0;
  s.at_most("plateau_error", std::abs(noflux_plateau(kernel, L, 1.0) - 0.05), 1e-8);
  s.at_most("boundary_value_error", std::abs(noflux_boundary_value(kernel, L, 1.0) + 0.2), 1e-8);

  std::vector<double> alphas{0.02, 0.04, 0.08}, errors;
  for (double a : alphas) {
    const AdhesionModel model(NonlocalOperator(Grid(L, 256), kernel, SensingMode::noflux()), {1.0, a});
    const AsymptoticProfile p = noflux_expansion(kernel, L, 1.0, a, model.grid());
    SteadyOptions so;
    so.ss_tol = 1e-9;
    const SteadyResult st = run_to_steady(model, p.u, so);
    double e = 0.0;
    for (std::size_t i = 0; i < st.u.size(); ++i) e = std::max(e, std::abs(st.u[i] - p.u[i]));
    errors.push_back(e);
    char tag[32];
    std::snprintf(tag, sizeof tag, "alpha%g_error", a);
    s.at_most(tag, e, 1e-2);
  }
  s.at_least("fitted_exponent", loglog_slope(alphas, errors), 1.8);
}

struct SinglePeak {
  Field newton;
  Field stepped;
  double residual = 0.0;
  double residual_tol = 0.0;
  int iterations = 0;
};

// Single-peak state at L = 5, α = 3.25 from both solvers. The time-stepped
// run starts from cos(2πx/L), symmetric about x = 0; its early state seeds
// Newton, the converged one is the independent reference.
const SinglePeak& single_peak() {
  static std::once_flag once;
  static SinglePeak sp;
  static std::exception_ptr failure;
  std::call_once(once, [] {
    try {
      const AdhesionModel model = periodic_model(5.0, 256, 3.25);
      SteadyOptions loose;
      loose.ss_tol = 1e-4;
      const SteadyResult a = run_to_steady(model, cosine_field(model.grid(), 1.0, 1, 0.1), loose);
      const NewtonResult nr = newton_steady(model, 1.0, a.u);
      SteadyOptions tight;
      tight.ss_tol = 1e-10;
      const SteadyResult b = run_to_steady(model, a.u, tight);
      sp.newton = nr.u;
      sp.stepped = b.u;
      sp.residual = nr.residual;
      const double dx = model.grid().dx();
      sp.residual_tol = nr.at_rounding_floor
                            ? 4.0 * std::numeric_limits<double>::epsilon() * max_abs(nr.u) / (dx * dx)
                            : NewtonOptions{}.tol;
      sp.iterations = nr.iterations;
    } catch (...) {
      failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);
  return sp;
}

void lemma_suite(Sheet& s) {
  const SinglePeak& sp = single_peak();
  const AdhesionModel model = periodic_model(5.0, 256, 3.25);
  const Grid& grid = model.grid();
  const Field& u = sp.newton;
  s.equal("peaks", count_peaks(u, true), 1);
  const DiagnosticsReport rep = steady_state_checks(model, u, 1e-8);
  for (const Check& c : rep.checks) s.add(c.name, c.pass, c.value, c.tolerance);
  s.at_most("mass_half_tile_error", std::abs(mass_per_half_tile(grid, u, 1) - 2.5), 1e-6);
  const Field d1 = delta1(grid, area_function(grid, u, NAN), 1.0);
  const Field K = model.op().apply(u);
  double e = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) e = std::max(e, std::abs(d1[i] - K[i]));
  s.at_most("delta1_w_vs_K", e, grid.dx() * grid.dx() * max_abs(u));
}

double relative_drift(const Field& a, const Field& b) {
  double sa = 0, sb = 0;
  for (double v : a) sa += v;
  for (double v : b) sb += v;
  return std::abs(sb - sa) / std::abs(sa);
}

void structure(Sheet& s) {
  {
    const Grid grid(5.0, 32);
    const KernelSpec kernel = normalize(uniform_kernel());
    const Field u0 = noise_field(grid, 1.0, 0.1, 0);
    const SensingMode nf = SensingMode::noflux();
    const auto [b0, bL] = weighted_boundary_noflux_beta(grid, kernel, nf, AdhesionFunction::linear(), u0);
    const std::pair<const char*, SensingMode> modes[] = {
        {"periodic", SensingMode::periodic()},
        {"naive", SensingMode::naive()},
        {"noflux", nf},
        {"neutral", SensingMode::make_neutral(nf, mean(u0))},
        {"weighted", SensingMode::make_weighted(nf, b0, bL)},
    };
    for (const auto& [name, mode] : modes) {
      const AdhesionModel model(NonlocalOperator(grid, kernel, mode), {1.0, 3.25});
      Stepper st(model, ImexScheme::CrankNicolson);
      Field u = u0, prev;
      double worst = 0.0;
      for (int k = 0; k < 10000; ++k) {
        prev = u;
        st.step(u, 1e-3);
        worst = std::max(worst, relative_drift(prev, u));
      }
      s.at_most(std::string("mass_drift_") + name, worst, 1e-12);
    }
  }
  {
    const AdhesionModel model = periodic_model(5.0, 256, 1.0, NonlocalOperator::Backend::Direct);
    const Grid& grid = model.grid();
    double skew = 0.0, zero = 0.0;
    for (std::uint64_t k = 0; k < 100; ++k) {
      const Field u = noise_field(grid, 1.0, 0.9, 2 * k + 1);
      const Field v = noise_field(grid, 1.0, 0.9, 2 * k + 2);
      const Field Ku = model.op().apply(u), Kv = model.op().apply(v);
      double vKu = 0, uKv = 0, scale = 0, sum = 0, abs_sum = 0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        vKu += v[i] * Ku[i];
        uKv += u[i] * Kv[i];
        scale += std::abs(v[i] * Ku[i]) + std::abs(u[i] * Kv[i]);
        sum += Ku[i];
        abs_sum += std::abs(Ku[i]);
      }
      skew = std::max(skew, std::abs(vKu + uKv) / scale);
      zero = std::max(zero, std::abs(sum) / abs_sum);
    }
    s.at_most("skew_adjointness", skew, 1e-12);
    s.at_most("zero_mean", zero, 1e-12);
  }
  {
    const AdhesionModel model = periodic_model(5.0, 256, 3.25);
    IntegrateOptions io;
    io.t_end = 60.0;
    for (int k = 0; k <= 120; ++k) io.output_times.push_back(0.5 * k);
    const Kymograph ky = integrate(model, noise_field(model.grid(), 1.0, 1e-2, 0), io);
    double worst = -INFINITY;
    for (std::size_t k = 1; k < ky.times.size(); ++k)
      worst = std::max(worst, (ky.energy[k] - ky.energy[k - 1]) / (ky.times[k] - ky.times[k - 1]));
    s.at_most("energy_increase_rate", worst, 1e-8);
    s.at_most("energy_drop", ky.energy.back() - ky.energy.front(), 0.0);
  }
}

void cross_oracle(Sheet& s) {
  const SinglePeak& sp = single_peak();
  s.at_most("newton_residual", sp.residual, sp.residual_tol);
  const Alignment al = align(sp.stepped, sp.newton);
  s.at_most("aligned_max_difference", al.error, 1e-6);
}

struct Entry {
  const char* name;
  double budget;
  void (*run)(Sheet&);
};

const Entry kEntries[] = {
    {"bifurcation points", 1.0, bifurcation_points},
    {"criticality", 5.0, criticality},
    {"spectral identities", 5.0, spectral},
    {"pattern onset", 120.0, pattern_onset},
    {"coarsening", 300.0, coarsening},
    {"asymptotic oracle", 120.0, asymptotic_oracle},
    {"steady-state lemmas", 60.0, lemma_suite},
    {"conservation and structure", 120.0, structure},
    {"newton vs time stepping", 120.0, cross_oracle},
};

}  // namespace

std::vector<int> criterion_ids() {
  std::vector<int> ids;
  for (int i = 1; i <= static_cast<int>(std::size(kEntries)); ++i) ids.push_back(i);
  return ids;
}

std::string criterion_name(int id) {
  if (id < 1 || id > static_cast<int>(std::size(kEntries)))
    throw Error(ErrorKind::InvalidParameter, "no acceptance criterion " + std::to_string(id));
  return kEntries[id - 1].name;
}

CriterionResult run_criterion(int id) {
  criterion_name(id);
  const Entry& e = kEntries[id - 1];
  Sheet sheet{"c" + std::to_string(id), {}};
  CriterionResult r;
  const double t0 = thread_cpu_seconds();
  try {
    e.run(sheet);
  } catch (const std::exception& ex) {
    sheet.add("error", false, NAN, NAN);
    r.error = ex.what();
  }
  r.id = id;
  r.name = e.name;
  r.seconds = thread_cpu_seconds() - t0;
  r.budget = e.budget;
  sheet.at_most("runtime_seconds", r.seconds, r.budget);
  r.checks = std::move(sheet.checks);
  r.pass = std::all_of(r.checks.begin(), r.checks.end(), [](const Check& c) { return c.pass; });
  return r;
}

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids, int jobs) {
  for (int id : ids) criterion_name(id);
  std::vector<CriterionResult> out(ids.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < ids.size();) out[k] = run_criterion(ids[k]);
  };
  const int n = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(1, ids.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace adhesim
