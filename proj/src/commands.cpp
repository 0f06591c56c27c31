#include "adhesim/commands.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <thread>
#include <atomic>

#include "adhesim/acceptance.hpp"
#include "adhesim/asymptotics.hpp"
#include "adhesim/bifurcation.hpp"
#include "adhesim/config.hpp"
#include "adhesim/diagnostics.hpp"
#include "adhesim/output.hpp"

namespace adhesim {

namespace {

namespace fs = std::filesystem;

struct Context {
  const CommandOptions& opts;
  std::ostream& out;
  std::ostream& err;
  RunConfig cfg;
  fs::path dir;

  void write(const std::string& name, const std::string& text) const {
    write_text((dir / name).string(), text);
  }
  void warn(const std::string& code, const std::string& message) const {
    err << "warning: " << code << ": " << message << "\n";
  }
};

void prepare(Context& c) {
  c.cfg = parse_config_file(c.opts.config);
  if (c.opts.seed) c.cfg.seed = *c.opts.seed;
  std::error_code ec;
  fs::create_directories(c.opts.out_dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create '" + c.opts.out_dir + "': " + ec.message());
  c.dir = c.opts.out_dir;
  c.write("resolved_config.txt", resolved_text(c.cfg));
}

AdhesionModel build_model(const Context& c, const Field& u0) {
  AdhesionModel model(make_operator(c.cfg, u0), {c.cfg.D, c.cfg.alpha});
  for (const Warning& w : model.op().warnings()) c.warn(w.code, w.message);
  return model;
}

std::string checks_csv(const std::vector<Check>& checks) {
  std::string s = "check_name,status,value,tolerance\n";
  for (const Check& k : checks)
    s += k.name + "," + (k.pass ? "pass" : "fail") + "," + fmt(k.value) + "," + fmt(k.tolerance) + "\n";
  return s;
}

Series profile_series(const Grid& grid, const Field& u, const std::string& label) {
  return {label, grid.centers(), u};
}

int simulate(Context& c) {
  const Grid grid = make_grid(c.cfg);
  const Field u0 = initial_field(c.cfg, grid);
  const AdhesionModel model = build_model(c, u0);
  IntegrateOptions io;
  io.t_end = c.cfg.t_end;
  io.rtol = c.cfg.rtol;
  io.atol = c.cfg.atol;
  io.scheme = c.cfg.scheme;
  for (int k = 0; k <= c.cfg.outputs; ++k) io.output_times.push_back(c.cfg.t_end * k / c.cfg.outputs);
  const Kymograph ky = integrate(model, u0, io);

  c.write("profile.csv", profile_csv(grid, ky.final_state));
  c.write("kymograph.csv", kymograph_csv(grid, ky));
  c.write("trace.csv", trace_csv(ky));
  if (c.opts.svg) {
    c.write("kymograph.svg", svg_kymograph(grid, ky));
    c.write("profile.svg", svg_line_plot("final profile, t = " + fmt(ky.stats.t_final), "x", "u",
                                         {profile_series(grid, ky.final_state, "")}));
  }
  c.out << "simulate: t_end=" << fmt(ky.stats.t_final) << " accepted=" << ky.stats.accepted
        << " rejected=" << ky.stats.rejected << " peaks=" << ky.peaks.back()
        << " max_mass_drift=" << fmt(ky.stats.max_mass_drift) << " min_u=" << fmt(ky.stats.min_value)
        << "\n";
  return kExitOk;
}

int steady(Context& c) {
  const Grid grid = make_grid(c.cfg);
  const Field u0 = initial_field(c.cfg, grid);
  const AdhesionModel model = build_model(c, u0);
  SteadyOptions so;
  so.ss_tol = c.cfg.ss_tol;
  so.t_max = c.cfg.t_max;
  so.rtol = c.cfg.rtol;
  so.atol = c.cfg.atol;
  so.scheme = c.cfg.steady_scheme;
  const SteadyResult st = run_to_steady(model, u0, so);
  Field u = st.u;
  int iterations = -1;
  if (c.cfg.newton_polish) {
    try {
      const NewtonResult nr = newton_steady(model, mean(u0), st.u);
      u = nr.u;
      iterations = nr.iterations;
    } catch (const Error& e) {
      c.warn("newton", std::string(e.what()) + "; keeping the time-stepped state");
    }
  }
  const DiagnosticsReport rep = steady_state_checks(model, u);
  c.write("profile.csv", profile_csv(grid, u));
  c.write("steady_checks.csv", checks_csv(rep.checks));
  if (c.opts.svg)
    c.write("profile.svg", svg_line_plot("steady state", "x", "u", {profile_series(grid, u, "")}));
  c.out << "steady: t=" << fmt(st.t) << " residual=" << fmt(steady_residual(model, u))
        << " newton_iterations=" << iterations << " peaks=" << count_peaks(u, model.periodic())
        << " checks=" << (rep.all_pass() ? "pass" : "fail") << "\n";
  return kExitOk;
}

int bifurcate(Context& c) {
  const AdhesionFunction h = adhesion_function(c.cfg);
  auto recs = bif_points(c.cfg.kernel, c.cfg.L, c.cfg.ubar, h.derivative(c.cfg.ubar), c.cfg.n_max,
                         h.is_linear());
  // the closed forms are for D = 1; the steady problem depends on α/D only
  for (auto& r : recs) {
    r.alpha_n *= c.cfg.D;
    r.alpha_3n *= c.cfg.D;
  }
  c.write("bifpoints.csv", bifpoints_csv(recs));
  if (c.opts.svg) {
    Series s{"alpha_n", {}, {}};
    for (const auto& r : recs)
      if (std::isfinite(r.alpha_n)) s.x.push_back(r.n), s.y.push_back(r.alpha_n);
    c.write("bifpoints.svg", svg_line_plot("bifurcation points", "n", "alpha_n", {s}));
  }
  for (const auto& r : recs)
    c.out << "n=" << r.n << " alpha_n=" << fmt(r.alpha_n) << " " << to_string(r.criticality) << "\n";
  return kExitOk;
}

int branch(Context& c) {
  if (c.cfg.bc_base != Domain::Periodic || c.cfg.bc_neutral || c.cfg.bc_weighted)
    throw Error(ErrorKind::InvalidParameter, "branch needs bc.mode = periodic");
  const AdhesionFunction h = adhesion_function(c.cfg);
  if (!h.is_linear()) throw Error(ErrorKind::InvalidParameter, "branch needs h.kind = linear");
  const Grid grid = make_grid(c.cfg);
  const auto& modes = c.cfg.branch_modes;
  std::vector<BranchResult> results(modes.size());
  std::vector<std::exception_ptr> failures(modes.size());

  auto run = [&](std::size_t k) {
    try {
      const int n = modes[k];
      LocalBranchPoint lb = local_branch(c.cfg.kernel, grid, c.cfg.ubar, n, c.cfg.branch_s0);
      const double a_n = bifurcation_alpha(c.cfg.kernel, c.cfg.L, c.cfg.ubar, 1.0, n) * c.cfg.D;
      const double a0 = lb.alpha * c.cfg.D;
      // auto: half of alpha_n into the side the branch opens to
      const double a1 = c.cfg.branch_alpha_end > 0.0 ? c.cfg.branch_alpha_end
                        : a0 >= a_n                  ? 1.5 * a_n
                                                     : 0.5 * a_n;
      // amplitude grows like sqrt(alpha - alpha_n): small steps near onset
      std::vector<double> alphas;
      for (int i = 0; i <= c.cfg.branch_steps; ++i) {
        const double t = static_cast<double>(i) / c.cfg.branch_steps;
        alphas.push_back(a0 + (a1 - a0) * t * t);
      }
      AdhesionModel model(NonlocalOperator(grid, c.cfg.kernel, SensingMode::periodic(), h),
                          {c.cfg.D, a0});
      results[k] = continue_branch(model, c.cfg.ubar, lb.u, alphas);
    } catch (...) {
      failures[k] = std::current_exception();
    }
  };
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < modes.size();) run(k);
  };
  std::vector<std::thread> pool;
  const int jobs = std::min<int>(std::max(1, c.opts.jobs), static_cast<int>(modes.size()));
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);

  std::vector<Series> plot;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const BranchResult& br = results[k];
    const std::string tag = "n" + std::to_string(modes[k]);
    c.write("branch_" + tag + ".csv", branch_csv(br));
    Series s{tag, {}, {}};
    for (const auto& r : br.rows) s.x.push_back(r.alpha), s.y.push_back(r.l2_amplitude);
    plot.push_back(std::move(s));
    if (!br.stop_reason.empty()) c.warn("branch-" + tag, br.stop_reason);
    c.out << "branch " << tag << ": points=" << br.rows.size();
    if (!br.rows.empty()) c.out << " alpha_last=" << fmt(br.rows.back().alpha);
    c.out << "\n";
  }
  if (c.opts.svg) c.write("branch.svg", svg_line_plot("solution branches", "alpha", "L2 amplitude", plot));
  return kExitOk;
}

int asymptotic(Context& c) {
  const Grid grid = make_grid(c.cfg);
  // the expansion is in α/D
  const AsymptoticProfile p =
      noflux_expansion(c.cfg.kernel, c.cfg.L, c.cfg.ubar, c.cfg.alpha / c.cfg.D, grid);
  for (const auto& w : p.warnings) c.warn("asymptotic", w);
  std::string s = "x,u1,u\n";
  for (int i = 0; i < grid.cells(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    s += fmt(grid.x(i)) + "," + fmt(p.u1[k]) + "," + fmt(p.u[k]) + "\n";
  }
  c.write("asymptotic.csv", s);
  if (c.opts.svg)
    c.write("asymptotic.svg", svg_line_plot("first-order no-flux profile", "x", "u",
                                            {profile_series(grid, p.u, "")}));
  c.out << "asymptotic: plateau_A=" << fmt(p.A) << " u1_boundary=" << fmt(p.u1_boundary) << "\n";
  return kExitOk;
}

int kernel_info(Context& c) {
  const KernelSpec& k = c.cfg.kernel;
  std::string s = "r,Omega,W\n";
  Series om{"Omega", {}, {}};
  const int samples = 400;
  for (int i = 0; i <= samples; ++i) {
    const double r = -k.R + 2.0 * k.R * i / samples;
    const double o = omega_odd(k, r);
    s += fmt(r) + "," + fmt(o) + "," + fmt(adhesion_potential(k, std::abs(r))) + "\n";
    om.x.push_back(r), om.y.push_back(o);
  }
  c.write("kernel.csv", s);
  std::string m = "n,Mn,delta_Mn\n";
  for (const auto& e : moment_table(k, c.cfg.L, c.cfg.n_max).entries)
    m += std::to_string(e.n) + "," + fmt(e.Mn) + "," + fmt(e.delta_Mn) + "\n";
  c.write("moments.csv", m);
  if (c.opts.svg) c.write("kernel.svg", svg_line_plot("odd kernel", "r", "Omega", {om}));
  c.out << "kernel: family=" << to_string(k.family) << " R=" << fmt(k.R) << " omega0=" << fmt(k.omega0)
        << " half_mass=" << fmt(omega_integral(k, 0.0, k.R)) << " mu1=" << fmt(raw_moment(k, 1))
        << " sup=" << fmt(omega_sup(k)) << "\n";
  return kExitOk;
}

int verify(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  if (!opts.config.empty()) parse_config_file(opts.config);  // validated, not used
  const auto results = run_acceptance(criterion_ids(), opts.jobs);
  std::vector<Check> all;
  bool pass = true;
  for (const auto& r : results) {
    all.insert(all.end(), r.checks.begin(), r.checks.end());
    pass = pass && r.pass;
    if (!r.error.empty()) err << "criterion " << r.id << " aborted: " << r.error << "\n";
  }
  out << checks_csv(all);
  return pass ? kExitOk : kExitVerify;
}

}  // namespace

int dispatch(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  static const std::map<std::string, std::function<int(Context&)>> table = {
      {"simulate", simulate},     {"steady", steady},         {"bifurcate", bifurcate},
      {"branch", branch},         {"asymptotic", asymptotic}, {"kernel-info", kernel_info},
  };
  try {
    if (opts.command == "verify") return verify(opts, out, err);
    const auto it = table.find(opts.command);
    if (it == table.end()) {
      err << "adhesim: unknown subcommand '" << opts.command << "'\n";
      return kExitConfig;
    }
    if (opts.config.empty()) {
      err << "adhesim: --config is required\n";
      return kExitConfig;
    }
    Context c{opts, out, err, {}, {}};
    prepare(c);
    return it->second(c);
  } catch (const Error& e) {
    err << "adhesim: " << e.what() << "\n";
    return is_config_error(e.kind()) ? kExitConfig : kExitNumerical;
  } catch (const std::exception& e) {
    err << "adhesim: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace adhesim
