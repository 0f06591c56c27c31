#include "adhesim/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "adhesim/diagnostics.hpp"

namespace adhesim {

namespace {

// Limited κ = 1/3 slope ψ(θ)·d_up, θ = d_dn/d_up, with the smooth
// ψ(θ) = (θ + 2θ²)/(2 − θ + 2θ²): ψ(1) = 1, ψ'(1) = 2/3 (third order) and
// ψ <= min(2θ, 2). Taking min(κ=1/3, van Leer) instead puts a kink at θ = 1,
// where every smooth profile sits, and Newton then loses its quadratic rate.
// d_up is the difference on the upwind side.
inline double limited_slope(double d_up, double d_dn) {
  if (d_up * d_dn <= 0.0) return 0.0;
  const double a2 = d_up * d_up, ab = d_up * d_dn, b2 = d_dn * d_dn;
  return d_up * (ab + 2.0 * b2) / (2.0 * a2 - ab + 2.0 * b2);
}

double sum(const Field& u) {
  double s = 0.0;
  for (double v : u) s += v;
  return s;
}

bool all_finite(std::span<const double> u) {
  return std::all_of(u.begin(), u.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

AdhesionModel::AdhesionModel(NonlocalOperator op, ModelParams params)
    : op_(std::move(op)), params_(params) {
  if (!(params_.D > 0.0) || !std::isfinite(params_.D))
    throw Error(ErrorKind::InvalidParameter, "sim.D must be positive");
  if (!std::isfinite(params_.alpha))
    throw Error(ErrorKind::InvalidParameter, "sim.alpha must be finite");
}

double AdhesionModel::max_face_speed(std::span<const double> k) const {
  const std::size_t M = k.size();
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < M; ++i) best = std::max(best, std::abs(k[i] + k[i + 1]));
  if (periodic()) best = std::max(best, std::abs(k[M - 1] + k[0]));
  return 0.5 * std::abs(params_.alpha) * best;
}

double AdhesionModel::advective(std::span<const double> u, std::span<double> out,
                                std::span<double> k) const {
  const int M = grid().cells();
  if (params_.alpha == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    std::fill(k.begin(), k.end(), 0.0);
    return 0.0;
  }
  op_.apply(u, k);
  const double scale = 0.5 * params_.alpha / grid().dx();
  const bool per = periodic();
  // differences d[j] = u_{j-1} - u_{j-2} over two ghost cells each side
  // (cyclic copies or mirrors); face i+1/2 reads d[i+1], d[i+2], d[i+3]
  thread_local std::vector<double> diffs;
  diffs.resize(static_cast<std::size_t>(M + 3));
  double* d = diffs.data();
  auto cell = [&](int j) {
    if (j < 0) return per ? u[static_cast<std::size_t>(j + M)] : u[0];
    if (j >= M) return per ? u[static_cast<std::size_t>(j - M)] : u[static_cast<std::size_t>(M - 1)];
    return u[static_cast<std::size_t>(j)];
  };
  d[0] = cell(-1) - cell(-2);
  d[1] = u[0] - cell(-1);
  for (int j = 1; j < M; ++j) d[j + 1] = u[static_cast<std::size_t>(j)] - u[static_cast<std::size_t>(j - 1)];
  d[M + 1] = cell(M) - u[static_cast<std::size_t>(M - 1)];
  d[M + 2] = cell(M + 1) - cell(M);

  // flux through face i+1/2 from speed a and the two neighbouring cells
  auto flux = [&](int i, double a, double ui, double uj) {
    const double face = a >= 0.0 ? ui + 0.5 * limited_slope(d[i + 1], d[i + 2])
                                 : uj - 0.5 * limited_slope(d[i + 3], d[i + 2]);
    return scale * a * face;
  };
  double top = 0.0;
  // bounded modes: the two domain faces carry no advective flux
  const int faces = per ? M : M - 1;
  double prev = 0.0;  // flux through face i-1/2
  if (per) {
    const double a = k[static_cast<std::size_t>(M - 1)] + k[0];
    top = std::abs(a);
    prev = flux(-1, a, u[static_cast<std::size_t>(M - 1)], u[0]);
  }
  for (int i = 0; i < faces; ++i) {
    const int ip = i + 1 == M ? 0 : i + 1;
    const double a = k[static_cast<std::size_t>(i)] + k[static_cast<std::size_t>(ip)];
    top = std::max(top, std::abs(a));
    const double F = flux(i, a, u[static_cast<std::size_t>(i)], u[static_cast<std::size_t>(ip)]);
    out[static_cast<std::size_t>(i)] = prev - F;
    prev = F;
  }
  if (!per) out[static_cast<std::size_t>(M - 1)] = prev;
  return 0.5 * std::abs(params_.alpha) * top;
}

void AdhesionModel::diffusive(std::span<const double> u, std::span<double> out) const {
  const int M = grid().cells();
  const double c = params_.D / (grid().dx() * grid().dx());
  const std::size_t last = static_cast<std::size_t>(M - 1);
  // running face flux, as in advective: the sum telescopes exactly
  double prev = periodic() ? c * (u[0] - u[last]) : 0.0;
  for (std::size_t i = 0; i < last; ++i) {
    const double F = c * (u[i + 1] - u[i]);
    out[i] = F - prev;
    prev = F;
  }
  const double F = periodic() ? c * (u[0] - u[last]) : 0.0;
  out[last] = F - prev;
}

Field AdhesionModel::rhs(const Field& u) const {
  grid().check(u);
  if (!all_finite(u)) throw Error(ErrorKind::NonFiniteState, "state contains NaN or Inf");
  Field out(u.size()), k(u.size()), d(u.size());
  advective(u, out, k);
  diffusive(u, d);
  for (std::size_t i = 0; i < u.size(); ++i) out[i] += d[i];
  if (!all_finite(out)) throw Error(ErrorKind::NonFiniteState, "right-hand side is not finite");
  return out;
}

Stepper::Stepper(const AdhesionModel& model, ImexScheme scheme) : model_(model), scheme_(scheme) {
  const std::size_t M = static_cast<std::size_t>(model.grid().cells());
  for (Field* f : {&k_, &fe0_, &fe1_, &fi_, &rhs_, &stage_})
    f->assign(M, 0.0);
}

double Stepper::face_speed(const Field& u) {
  model_.op().apply(u, k_);
  return model_.max_face_speed(k_);
}

// (I − c·Dh) x = b with Dh the discrete Laplacian (cyclic or mirror ghosts).
// Sweep coefficients are cached for the two most recent values of c (a full
// step and its half steps alternate).
const Stepper::Factor& Stepper::factor(double r) {
  for (Factor& f : factors_)
    if (f.r == r) return f;
  Factor& f = factors_[next_factor_];
  next_factor_ ^= 1;
  const std::size_t M = model_.grid().cells();
  const bool per = model_.periodic();
  f.r = r;
  f.inv.assign(M, 1.0 + 2.0 * r);
  f.sup.assign(M, 0.0);
  // cyclic: Sherman–Morrison with corner entries −r
  const double gamma = -(1.0 + 2.0 * r);
  if (per) {
    f.inv[0] -= gamma;
    f.inv[M - 1] -= r * r / gamma;
  } else {
    f.inv[0] = f.inv[M - 1] = 1.0 + r;
  }
  double denom = f.inv[0];
  f.inv[0] = 1.0 / denom;
  f.sup[0] = -r * f.inv[0];
  for (std::size_t i = 1; i < M; ++i) {
    denom = f.inv[i] + r * f.sup[i - 1];
    f.inv[i] = 1.0 / denom;
    f.sup[i] = -r * f.inv[i];
    // interior pivots converge geometrically; once one repeats exactly the
    // recurrence is at its floating-point fixed point
    if (i >= 2 && i + 2 < M && f.inv[i] == f.inv[i - 1]) {
      std::fill(f.inv.begin() + static_cast<std::ptrdiff_t>(i) + 1, f.inv.end() - 1, f.inv[i]);
      std::fill(f.sup.begin() + static_cast<std::ptrdiff_t>(i) + 1, f.sup.end() - 1, f.sup[i]);
      i = M - 2;
    }
  }
  if (per) {
    Field e(M, 0.0);
    e[0] = gamma;
    e[M - 1] = -r;
    f.z.resize(M);
    sweep(f, e, f.z);
    f.sm_denom = 1.0 + f.z[0] - r * f.z[M - 1] / gamma;
  }
  return f;
}

void Stepper::sweep(const Factor& f, const Field& b, Field& x) {
  const std::size_t M = b.size();
  x[0] = b[0] * f.inv[0];
  for (std::size_t i = 1; i < M; ++i) x[i] = (b[i] + f.r * x[i - 1]) * f.inv[i];
  for (std::size_t i = M - 1; i-- > 0;) x[i] -= f.sup[i] * x[i + 1];
}

void Stepper::solve_implicit(double c, const Field& b, Field& x) {
  const double dx = model_.grid().dx();
  const Factor& f = factor(c * model_.params().D / (dx * dx));
  sweep(f, b, x);
  if (!model_.periodic()) return;
  const std::size_t M = b.size();
  const double gamma = -(1.0 + 2.0 * f.r);
  const double fact = (x[0] - f.r * x[M - 1] / gamma) / f.sm_denom;
  for (std::size_t i = 0; i < M; ++i) x[i] -= fact * f.z[i];
}

double Stepper::step(Field& u, double dt, bool same_start) {
  const std::size_t M = u.size();
  if (!same_start) {
    // a non-finite flux reaches u and is caught below
    speed0_ = model_.advective(u, fe0_, k_);
  }
  const double speed = speed0_;

  if (scheme_ == ImexScheme::CrankNicolson) {
    // trapezoidal IMEX: CN for diffusion, Heun for advection
    model_.diffusive(u, fi_);
    for (std::size_t i = 0; i < M; ++i) rhs_[i] = u[i] + dt * fe0_[i] + 0.5 * dt * fi_[i];
    solve_implicit(0.5 * dt, rhs_, stage_);
    model_.advective(stage_, fe1_, k_);
    for (std::size_t i = 0; i < M; ++i) u[i] = stage_[i] + 0.5 * dt * (fe1_[i] - fe0_[i]);
  } else {
    // ARS(2,2,2), L-stable and stiffly accurate
    const double g = 1.0 - 1.0 / std::numbers::sqrt2;
    const double d = 1.0 - 1.0 / (2.0 * g);
    for (std::size_t i = 0; i < M; ++i) rhs_[i] = u[i] + g * dt * fe0_[i];
    solve_implicit(g * dt, rhs_, stage_);
    model_.advective(stage_, fe1_, k_);
    model_.diffusive(stage_, fi_);
    for (std::size_t i = 0; i < M; ++i)
      rhs_[i] = u[i] + dt * ((1.0 - g) * fi_[i] + d * fe0_[i] + (1.0 - d) * fe1_[i]);
    solve_implicit(g * dt, rhs_, u);
  }
  if (!all_finite(u)) throw Error(ErrorKind::NonFiniteState, "state became non-finite");
  return speed;
}

Kymograph integrate(const AdhesionModel& model, const Field& u0, const IntegrateOptions& opts) {
  const Grid& grid = model.grid();
  grid.check(u0);
  if (!(opts.t_end > 0.0)) throw Error(ErrorKind::InvalidParameter, "t_end must be positive");
  if (!all_finite(u0)) throw Error(ErrorKind::NonFiniteState, "initial state is not finite");
  if (*std::min_element(u0.begin(), u0.end()) < 0.0)
    throw Error(ErrorKind::InvalidParameter, "initial density must be nonnegative");

  std::vector<double> outputs = opts.output_times;
  if (outputs.empty()) outputs.push_back(opts.t_end);
  std::sort(outputs.begin(), outputs.end());
  outputs.erase(std::unique(outputs.begin(), outputs.end()), outputs.end());
  outputs.erase(std::remove_if(outputs.begin(), outputs.end(),
                               [&](double t) { return t < 0.0 || t > opts.t_end; }),
                outputs.end());

  const bool energy_defined = model.periodic() && model.op().adhesion().is_linear();
  Kymograph ky;
  auto record = [&](double t, const Field& u) {
    ky.times.push_back(t);
    ky.fields.push_back(u);
    ky.mass.push_back(mass(grid, u));
    ky.peaks.push_back(count_peaks(u, model.periodic()));
    double e = std::numeric_limits<double>::quiet_NaN();
    if (opts.record_energy && energy_defined)
      e = energy(grid, u, model.op().kernel(), model.params().D, model.params().alpha).entropy;
    ky.energy.push_back(e);
  };

  std::size_t next_out = 0;
  Field u = u0;
  double t = 0.0;
  while (next_out < outputs.size() && outputs[next_out] <= 0.0) record(outputs[next_out++], u);

  Stepper full(model, opts.scheme);
  Field big(u.size()), half(u.size());
  const double dx = grid.dx();
  double speed = full.face_speed(u);
  double dt = opts.dt_initial > 0.0 ? opts.dt_initial : std::min(1e-4, 0.1 * dx);
  double min_seen = *std::min_element(u.begin(), u.end());
  auto cfl_limit = [&](double s) { return s > 0.0 ? opts.cfl * dx / s : std::numeric_limits<double>::infinity(); };

  while (t < opts.t_end) {
    if (opts.max_steps && ky.stats.accepted >= opts.max_steps) break;
    dt = std::min(dt, cfl_limit(speed));
    bool last = false;
    if (t + dt >= opts.t_end) {
      dt = opts.t_end - t;
      last = true;
    }
    if (dt < opts.dt_min && !last)
      throw Error(ErrorKind::StepSizeUnderflow,
                  "step size " + std::to_string(dt) + " below minimum at t = " + std::to_string(t));

    big = u;
    speed = full.step(big, dt);  // speed of the current state
    // dt was chosen from the previous state's speed; only a real overshoot of
    // the unit Courant number is redone
    if (dt > cfl_limit(speed) / opts.cfl) {
      ++ky.stats.rejected;
      continue;
    }
    half = u;
    full.step(half, 0.5 * dt, true);
    full.step(half, 0.5 * dt);

    double err = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double scale = opts.atol + opts.rtol * std::max(std::abs(u[i]), std::abs(half[i]));
      err = std::max(err, std::abs(big[i] - half[i]) / scale);
    }
    err /= 3.0;  // 2^p - 1 for a second-order pair

    if (err > 1.0) {
      ++ky.stats.rejected;
      dt *= std::max(0.2, 0.9 * std::pow(err, -1.0 / 3.0));
      if (dt < opts.dt_min)
        throw Error(ErrorKind::StepSizeUnderflow,
                    "step size underflow at t = " + std::to_string(t));
      continue;
    }

    const double m0 = sum(u);
    const double t_new = last ? opts.t_end : t + dt;
    while (next_out < outputs.size() && outputs[next_out] <= t_new) {
      const double s = (outputs[next_out] - t) / (t_new - t);
      Field interp(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) interp[i] = (1.0 - s) * u[i] + s * half[i];
      record(outputs[next_out++], interp);
    }
    u.swap(half);
    t = t_new;
    ++ky.stats.accepted;
    const double m1 = sum(u);
    if (m0 != 0.0) ky.stats.max_mass_drift = std::max(ky.stats.max_mass_drift, std::abs(m1 - m0) / std::abs(m0));
    const double umin = *std::min_element(u.begin(), u.end());
    min_seen = std::min(min_seen, umin);
    if (umin < -10.0 * opts.atol)
      throw Error(ErrorKind::PositivityViolated,
                  "density " + std::to_string(umin) + " at t = " + std::to_string(t));

    const double grow = err > 0.0 ? std::min(2.0, 0.9 * std::pow(err, -1.0 / 3.0)) : 2.0;
    dt *= std::max(1.0, grow);

    if (opts.observer && !opts.observer(t, u)) {
      ky.stats.stopped_early = true;
      break;
    }
  }
  if (ky.stats.stopped_early || (opts.max_steps && t < opts.t_end)) {
    if (ky.times.empty() || ky.times.back() < t) record(t, u);
    ky.stats.stopped_early = true;
  }
  ky.stats.min_value = min_seen;
  ky.stats.t_final = t;
  ky.final_state = std::move(u);
  return ky;
}

double steady_residual(const AdhesionModel& model, const Field& u) {
  const Field r = model.rhs(u);
  const double nu = max_abs(u);
  return nu > 0.0 ? max_abs(r) / nu : max_abs(r);
}

SteadyResult run_to_steady(const AdhesionModel& model, const Field& u0, const SteadyOptions& opts) {
  IntegrateOptions io;
  io.t_end = opts.t_max;
  io.rtol = opts.rtol;
  io.atol = opts.atol;
  io.scheme = opts.scheme;
  io.record_energy = false;
  io.output_times = {opts.t_max};
  double residual = std::numeric_limits<double>::infinity();
  std::uint64_t count = 0;
  io.observer = [&](double, const Field& u) {
    if (++count % static_cast<std::uint64_t>(std::max(1, opts.check_every)) != 0) return true;
    residual = steady_residual(model, u);
    return residual >= opts.ss_tol;
  };
  Kymograph ky = integrate(model, u0, io);
  SteadyResult res;
  res.u = std::move(ky.final_state);
  res.t = ky.stats.t_final;
  res.stats = ky.stats;
  res.residual = steady_residual(model, res.u);
  if (res.residual >= opts.ss_tol)
    throw Error(ErrorKind::NotConverged, "no steady state by t_max = " + std::to_string(opts.t_max) +
                                             " (residual " + std::to_string(res.residual) + ")");
  return res;
}

Field constant_field(const Grid& grid, double ubar) {
  return Field(static_cast<std::size_t>(grid.cells()), ubar);
}

Field noise_field(const Grid& grid, double ubar, double amp, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Field u(static_cast<std::size_t>(grid.cells()));
  // 53-bit uniform in [0,1) without relying on the library's distribution
  for (double& v : u) v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  const double m = mean(u);
  for (double& v : u) v = ubar + amp * 2.0 * (v - m);
  return u;
}

Field cosine_field(const Grid& grid, double ubar, int n, double amp) {
  Field u(static_cast<std::size_t>(grid.cells()));
  const double k = 2.0 * std::numbers::pi * n / grid.length();
  for (int i = 0; i < grid.cells(); ++i) u[static_cast<std::size_t>(i)] = ubar + amp * std::cos(k * grid.x(i));
  return u;
}

}  // namespace adhesim
