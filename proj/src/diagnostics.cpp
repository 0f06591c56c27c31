#include "adhesim/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adhesim/quadrature.hpp"
#include "adhesim/solver.hpp"

namespace adhesim {

namespace {

int wrap(int i, int m) {
  const int r = i % m;
  return r < 0 ? r + m : r;
}

// Positions (in cell-index units) where a sampled function vanishes.
std::vector<double> zero_positions(const Field& f, bool periodic, double floor) {
  std::vector<double> z;
  const int M = static_cast<int>(f.size());
  for (int i = 0; i < M; ++i) {
    const double a = f[static_cast<std::size_t>(i)];
    if (std::abs(a) <= floor) {
      z.push_back(i);
      continue;
    }
    if (i + 1 == M && !periodic) break;
    const double b = f[static_cast<std::size_t>(wrap(i + 1, M))];
    if (std::abs(b) > floor && a * b < 0.0) z.push_back(i + a / (a - b));
  }
  return z;
}

// Largest distance from a zero in `from` to the nearest zero in `to`.
double zero_mismatch(const std::vector<double>& from, const std::vector<double>& to, int M,
                     bool periodic) {
  double worst = 0.0;
  for (double p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (double q : to) {
      double d = std::abs(p - q);
      if (periodic) d = std::min(d, M - d);
      best = std::min(best, d);
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

int count_peaks(const Field& u, bool periodic, double rel_threshold) {
  if (u.size() < 3) return 0;
  const double h = std::abs(mean(u)) * rel_threshold;
  const std::size_t M = u.size();
  std::vector<double> seq;
  seq.reserve(M + 1);
  if (periodic) {
    // start and end at the global minimum so no peak straddles the seam
    const std::size_t k = static_cast<std::size_t>(std::min_element(u.begin(), u.end()) - u.begin());
    for (std::size_t j = 0; j <= M; ++j) seq.push_back(u[(k + j) % M]);
  } else {
    seq = u;
  }
  enum { Unknown, Rising, Falling } state = periodic ? Falling : Unknown;
  double lo = seq[0], hi = seq[0];
  int peaks = 0;
  for (double v : seq) {
    if (state != Rising) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      if (state == Unknown && hi - v > h && hi > lo) {
        // bounded field that starts by falling: boundary maximum
        ++peaks;
        state = Falling;
        lo = v;
        continue;
      }
      if (v - lo > h) {
        state = Rising;
        hi = v;
      }
    } else {
      hi = std::max(hi, v);
      if (hi - v > h) {
        ++peaks;
        state = Falling;
        lo = v;
      }
    }
  }
  if (!periodic && state == Rising) ++peaks;
  return peaks;
}

Field area_function(const Grid& grid, const Field& u, double ubar) {
  grid.check(u);
  if (std::isnan(ubar)) ubar = mean(u);
  const double dx = grid.dx();
  Field w(u.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    w[i] = acc + 0.5 * dx * u[i] - ubar * grid.x(static_cast<int>(i));
    acc += dx * u[i];
  }
  return w;
}

Field delta1(const Grid& grid, const Field& w, double R) {
  grid.check(w);
  const int M = grid.cells();
  const double s = R / grid.dx();
  const int k = static_cast<int>(std::floor(s));
  const double t = s - k;
  auto at = [&](int i) { return w[static_cast<std::size_t>(wrap(i, M))]; };
  Field out(w.size());
  for (int i = 0; i < M; ++i) {
    const double plus = (1.0 - t) * at(i + k) + t * at(i + k + 1);
    const double minus = (1.0 - t) * at(i - k) + t * at(i - k - 1);
    out[static_cast<std::size_t>(i)] = 0.5 * (plus + minus - 2.0 * at(i));
  }
  return out;
}

SymmetryError symmetry_error(const Grid& grid, const Field& u, int n, bool periodic) {
  grid.check(u);
  if (n <= 0) throw Error(ErrorKind::InvalidParameter, "symmetry order must be positive");
  const int M = grid.cells();
  SymmetryError e;
  const double s = static_cast<double>(M) / n;
  const int k = static_cast<int>(std::floor(s));
  const double t = s - k;
  auto at = [&](int i) { return u[static_cast<std::size_t>(wrap(i, M))]; };
  if (periodic) {
    for (int i = 0; i < M; ++i) {
      const double shifted = (1.0 - t) * at(i - k) + t * at(i - k - 1);
      e.shift = std::max(e.shift, std::abs(u[static_cast<std::size_t>(i)] - shifted));
    }
    e.reflect = std::numeric_limits<double>::infinity();
    for (int m = 0; m < M; ++m) {
      double worst = 0.0;
      for (int i = 0; i < M && worst < e.reflect; ++i)
        worst = std::max(worst, std::abs(u[static_cast<std::size_t>(i)] - at(m - i)));
      if (worst < e.reflect) {
        e.reflect = worst;
        e.axis_index = m + 1;
      }
    }
  } else {
    for (int i = 0; i < M; ++i)
      e.reflect = std::max(e.reflect, std::abs(u[static_cast<std::size_t>(i)] - at(M - 1 - i)));
    e.axis_index = M;
  }
  return e;
}

Alignment align(const Field& a, const Field& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::GridMismatch, "fields differ in size");
  const int M = static_cast<int>(a.size());
  Alignment best{0, std::numeric_limits<double>::infinity()};
  for (int s = 0; s < M; ++s) {
    double worst = 0.0;
    for (int i = 0; i < M && worst < best.error; ++i)
      worst = std::max(worst, std::abs(a[static_cast<std::size_t>(wrap(i + s, M))] -
                                       b[static_cast<std::size_t>(i)]));
    if (worst < best.error) best = {s, worst};
  }
  return best;
}

EnergyValues energy(const Grid& grid, const Field& u, const KernelSpec& kernel_in, double D,
                    double alpha) {
  grid.check(u);
  const KernelSpec kernel = kernel_in.normalized() ? kernel_in : normalize(kernel_in);
  const int M = grid.cells();
  const double dx = grid.dx();
  const double R = kernel.R;
  const int J = static_cast<int>(std::ceil(R / dx - 0.5));
  auto W = [&](double r) { return adhesion_potential(kernel, std::abs(r)); };
  // per-cell integrals of W(|r|) over the offset interval of cell m
  std::vector<double> c(static_cast<std::size_t>(J) + 1);
  c[0] = 2.0 * simpson(W, 0.0, std::min(0.5 * dx, R), 16);
  for (int m = 1; m <= J; ++m)
    c[static_cast<std::size_t>(m)] = simpson(W, (m - 0.5) * dx, std::min((m + 0.5) * dx, R), 16);

  EnergyValues e;
  for (int i = 0; i < M; ++i) {
    const double ui = u[static_cast<std::size_t>(i)];
    if (ui < -1e-10)
      throw Error(ErrorKind::NonPositiveDensity, "entropy energy needs u >= 0 (u = " +
                                                     std::to_string(ui) + ")");
    double conv = c[0] * ui;
    for (int m = 1; m <= J; ++m)
      conv += c[static_cast<std::size_t>(m)] *
              (u[static_cast<std::size_t>(wrap(i + m, M))] + u[static_cast<std::size_t>(wrap(i - m, M))]);
    const double v = std::max(ui, 1e-14);
    const double inter = 0.5 * alpha * ui * conv;
    e.entropy += D * v * std::log(v) - inter;
    e.paper_J += 0.5 * D * ui * ui - inter;
  }
  e.entropy *= dx;
  e.paper_J *= dx;
  return e;
}

double integral_up_to(const Grid& grid, const Field& u, double x_end) {
  grid.check(u);
  const double dx = grid.dx();
  const double s = std::clamp(x_end / dx, 0.0, static_cast<double>(grid.cells()));
  const int k = static_cast<int>(std::floor(s));
  double acc = 0.0;
  for (int i = 0; i < k; ++i) acc += u[static_cast<std::size_t>(i)];
  acc *= dx;
  if (k < grid.cells()) acc += (s - k) * dx * u[static_cast<std::size_t>(k)];
  return acc;
}

double mass_per_half_tile(const Grid& grid, const Field& u, int n) {
  if (n <= 0) throw Error(ErrorKind::InvalidParameter, "tile count must be positive");
  return integral_up_to(grid, u, grid.length() / (2.0 * n));
}

bool DiagnosticsReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* DiagnosticsReport::find(const std::string& name) const {
  for (const Check& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

void DiagnosticsReport::add(std::string name, bool pass, double value, double tolerance) {
  checks.push_back({std::move(name), pass, value, tolerance});
}

DiagnosticsReport steady_state_checks(const AdhesionModel& model, const Field& u, double tol) {
  const Grid& grid = model.grid();
  grid.check(u);
  const int M = grid.cells();
  const double dx = grid.dx();
  const bool periodic = model.periodic();
  const NonlocalOperator& op = model.op();
  DiagnosticsReport rep;

  const double res = steady_residual(model, u);
  rep.add("residual", res <= 1e-6, res, 1e-6);

  const Field K = op.apply(u);
  auto at = [&](int i) {
    i = periodic ? wrap(i, M) : std::clamp(i, 0, M - 1);
    return u[static_cast<std::size_t>(i)];
  };
  Field du(u.size()), d2u(u.size());
  for (int i = 0; i < M; ++i) {
    du[static_cast<std::size_t>(i)] = (at(i + 1) - at(i - 1)) / (2.0 * dx);
    d2u[static_cast<std::size_t>(i)] = (at(i + 1) - 2.0 * at(i) + at(i - 1)) / (dx * dx);
  }

  // zeros of u′ and K[u] within one cell of each other
  const double fd = 1e-10 * std::max(max_abs(du), 1e-300);
  const double fk = 1e-10 * std::max(max_abs(K), 1e-300);
  const auto zu = zero_positions(du, periodic, fd);
  const auto zk = zero_positions(K, periodic, fk);
  double mismatch = std::max(zero_mismatch(zu, zk, M, periodic), zero_mismatch(zk, zu, M, periodic));
  rep.add("zero_coincidence", mismatch <= 1.0, mismatch, 1.0);

  double worst_sign = std::numeric_limits<double>::infinity();
  for (int i = 0; i < M; ++i)
    worst_sign = std::min(worst_sign, du[static_cast<std::size_t>(i)] * K[static_cast<std::size_t>(i)]);
  rep.add("sign_uprime_K", worst_sign >= -tol, worst_sign, tol);

  if (periodic && op.adhesion().is_linear()) {
    const double ubar = mean(u);
    const double L = grid.length();
    const double mu = (ubar + L) * omega_sup(op.kernel());
    const double factor = std::exp(std::abs(model.params().alpha) * mu * L);
    const double umin = *std::min_element(u.begin(), u.end());
    const double umax = *std::max_element(u.begin(), u.end());
    rep.add("apriori_lower", umin >= ubar / factor, umin, ubar / factor);
    rep.add("apriori_upper", umax <= ubar * factor, umax, ubar * factor);
  }

  // u″ ≤ 0 ⇒ K′ ≤ 0 and K′ ≥ 0 ⇒ u″ ≥ 0, up to discretisation error
  const Field Kp = op.apply_prime(u);
  const double tolc = std::max(tol, dx * dx * (max_abs(d2u) + max_abs(Kp)));
  double violation = 0.0;
  const int lo = periodic ? 0 : 1;
  const int hi = periodic ? M : M - 1;
  for (int i = lo; i < hi; ++i) {
    const double c = d2u[static_cast<std::size_t>(i)];
    const double k = Kp[static_cast<std::size_t>(i)];
    if (c < -tolc) violation = std::max(violation, k);
    if (k > tolc) violation = std::max(violation, -c);
  }
  rep.add("convexity", violation <= tolc, violation, tolc);
  return rep;
}

}  // namespace adhesim
