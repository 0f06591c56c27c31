#include "adhesim/bifurcation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>

#include "adhesim/diagnostics.hpp"

namespace adhesim {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double checked_moment(const KernelSpec& spec, double L, int n) {
  if (n <= 0) throw Error(ErrorKind::InvalidParameter, "mode number must be positive");
  const double Mn = moment_Mn(spec, n, L);
  if (std::abs(Mn) < kDegenerateMoment)
    throw Error(ErrorKind::DegenerateMode, "M_" + std::to_string(n) + " vanishes for L = " +
                                               std::to_string(L));
  return Mn;
}

void check_domain(const KernelSpec& spec, double L, double ubar) {
  // closed forms only need one sensing diameter to fit in the period
  if (!(L >= 2.0 * spec.R)) throw Error(ErrorKind::RangeError, "L must be at least 2R");
  if (!(ubar > 0.0)) throw Error(ErrorKind::InvalidParameter, "mean density must be positive");
}

KernelSpec ready(const KernelSpec& spec) { return spec.normalized() ? spec : normalize(spec); }

}  // namespace

const char* to_string(Criticality c) {
  switch (c) {
    case Criticality::Super: return "super";
    case Criticality::Sub: return "sub";
    case Criticality::Degenerate: return "degenerate";
  }
  return "?";
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Saddle: return "saddle";
    case Stability::Unstable: return "unstable";
  }
  return "?";
}

double bifurcation_alpha(const KernelSpec& spec_in, double L, double ubar, double hprime, int n) {
  const KernelSpec spec = ready(spec_in);
  check_domain(spec, L, ubar);
  if (hprime == 0.0) throw Error(ErrorKind::InvalidParameter, "h'(ubar) must be nonzero");
  const double Mn = checked_moment(spec, L, n);
  return n * kPi / (ubar * L * Mn * hprime);
}

std::vector<BifurcationRecord> bif_points(const KernelSpec& spec_in, double L, double ubar,
                                          double hprime, int n_max, bool linear_h) {
  const KernelSpec spec = ready(spec_in);
  check_domain(spec, L, ubar);
  if (hprime == 0.0) throw Error(ErrorKind::InvalidParameter, "h'(ubar) must be nonzero");
  std::vector<BifurcationRecord> out;
  for (int n = 1; n <= n_max; ++n) {
    BifurcationRecord r;
    r.n = n;
    r.Mn = moment_Mn(spec, n, L);
    r.delta_Mn = 2.0 * r.Mn - moment_Mn(spec, 2 * n, L);
    r.alpha_n = r.alpha_3n = r.b_2n1 = kNaN;
    if (std::abs(r.Mn) >= kDegenerateMoment) {
      r.alpha_n = n * kPi / (ubar * L * r.Mn * hprime);
      if (linear_h) {
        const BifurcationType t = bif_type(spec, L, ubar, n);
        r.alpha_3n = t.alpha_3n;
        r.b_2n1 = t.b_2n1;
        r.criticality = t.criticality;
      }
    }
    out.push_back(r);
  }
  return out;
}

BifurcationType bif_type(const KernelSpec& spec_in, double L, double ubar, int n) {
  const KernelSpec spec = ready(spec_in);
  check_domain(spec, L, ubar);
  const double Mn = checked_moment(spec, L, n);
  const double M2n = moment_Mn(spec, 2 * n, L);
  const double dM = 2.0 * Mn - M2n;
  const double q = kPi * n / L;
  BifurcationType t;
  t.b_2n1 = (q * q / (2.0 * std::pow(ubar, 3))) / (2.0 * Mn * Mn - Mn * M2n);
  if (std::abs(dM) < kDegenerateMoment) {
    t.alpha_3n = kNaN;
    t.criticality = Criticality::Degenerate;
    return t;
  }
  t.alpha_3n = (q * q * q / (4.0 * std::pow(ubar, 5))) / (Mn * Mn * dM);
  t.criticality = t.alpha_3n > 0.0 ? Criticality::Super : Criticality::Sub;
  return t;
}

BifurcationType bif_type(const KernelSpec& spec, double L, double ubar, int n,
                         const AdhesionFunction& h) {
  if (!h.is_linear())
    throw Error(ErrorKind::InvalidParameter,
                "pitchfork coefficients are only available for h(u) = u");
  return bif_type(spec, L, ubar, n);
}

double alpha3_projected(const KernelSpec& spec_in, double L, double ubar, int n) {
  const KernelSpec spec = ready(spec_in);
  const BifurcationType t = bif_type(spec, L, ubar, n);
  const double Mn = moment_Mn(spec, n, L);
  const double M2n = moment_Mn(spec, 2 * n, L);
  return t.alpha_3n * (Mn - M2n) / Mn;
}

LocalBranchPoint local_branch(const KernelSpec& spec_in, const Grid& grid, double ubar, int n,
                              double s) {
  const KernelSpec spec = ready(spec_in);
  const double L = grid.length();
  const double an = bifurcation_alpha(spec, L, ubar, 1.0, n);
  const BifurcationType t = bif_type(spec, L, ubar, n);
  if (std::isnan(t.alpha_3n)) throw Error(ErrorKind::DegenerateMode, "ΔM_n vanishes");
  LocalBranchPoint p;
  // the closed-form α_{3,n} puts the guess off the branch by O(s²)
  p.alpha = an + s * s * alpha3_projected(spec, L, ubar, n);
  p.u.resize(static_cast<std::size_t>(grid.cells()));
  const double k = 2.0 * kPi * n / L;
  for (int i = 0; i < grid.cells(); ++i) {
    const double x = grid.x(i);
    p.u[static_cast<std::size_t>(i)] =
        ubar + s * an * std::cos(k * x) + s * s * t.b_2n1 * std::cos(2.0 * k * x);
  }
  return p;
}

double local_branch_residual(const KernelSpec& spec_in, double L, double ubar, int n, double s) {
  const KernelSpec spec = ready(spec_in);
  const double an = bifurcation_alpha(spec, L, ubar, 1.0, n);
  const BifurcationType t = bif_type(spec, L, ubar, n);
  const double alpha = an + s * s * alpha3_projected(spec, L, ubar, n);
  const double A = s * an;
  const double B = s * s * t.b_2n1;
  const double M1 = moment_Mn(spec, n, L);
  const double M2 = moment_Mn(spec, 2 * n, L);
  const double k = 2.0 * kPi * n / L;
  // u K[u] = Σ p_m sin(mθ) with K[cos mθ] = −2 M_{mn} sin mθ
  const double p[5] = {0.0, -2.0 * ubar * A * M1 - A * B * M2 + A * B * M1,
                       -2.0 * ubar * B * M2 - A * A * M1, -A * B * (M1 + M2), -B * B * M2};
  const double a[5] = {0.0, A, B, 0.0, 0.0};
  double worst = 0.0;
  for (int m = 1; m <= 4; ++m)
    worst = std::max(worst, std::abs(-m * m * k * k * a[m] - alpha * m * k * p[m]));
  return worst;
}

std::vector<double> linearized_spectrum(const KernelSpec& spec_in, double L, int n, int k_max) {
  const KernelSpec spec = ready(spec_in);
  const double Mn = checked_moment(spec, L, n);
  std::vector<double> lam(static_cast<std::size_t>(std::max(k_max, 0)));
  for (int k = 1; k <= k_max; ++k) {
    const double q = 2.0 * k * kPi / L;
    double v;
    if (k == n) {
      v = 0.0;
    } else {
      const double Mk = moment_Mn(spec, k, L);
      v = std::abs(Mk) < kDegenerateMoment ? -q * q
                                           : q * q * ((static_cast<double>(n) / k) * (Mk / Mn) - 1.0);
    }
    lam[static_cast<std::size_t>(k - 1)] = v;
  }
  return lam;
}

BranchStability branch_stability(const KernelSpec& spec, double L, double ubar, int n, int k_max) {
  const BifurcationType t = bif_type(spec, L, ubar, n);
  const auto lam = linearized_spectrum(spec, L, n, k_max);
  BranchStability b;
  for (int k = 1; k <= k_max; ++k)
    if (k != n && lam[static_cast<std::size_t>(k - 1)] > 0.0) ++b.unstable_modes;
  if (std::isnan(t.alpha_3n)) throw Error(ErrorKind::DegenerateMode, "ΔM_n vanishes");
  b.mu_sign = t.alpha_3n > 0.0 ? -1 : 1;
  if (t.alpha_3n < 0.0)
    b.verdict = Stability::Unstable;
  else
    b.verdict = b.unstable_modes == 0 ? Stability::Stable : Stability::Saddle;
  return b;
}

namespace {

// Periodic states are sought among fields mirror-symmetric about x = 0
// (cell i pairs with M-1-i). That removes the translation mode, so the
// phase condition u[M/4] = u[M-1-M/4] holds by construction, and keeps the
// ties at peak and trough under perturbation: the limiter and the upwind
// switch are not differentiable there, and a one-sided Jacobian taken across
// them stalls Newton.
struct NewtonSystem {
  const AdhesionModel& model;
  double ubar;
  int M;
  bool periodic;
  double scale;

  int unknowns() const { return periodic ? (M + 1) / 2 : M; }
  int equations() const { return unknowns() + 1; }

  Field expand(const Eigen::VectorXd& v) const {
    Field u(static_cast<std::size_t>(M));
    for (int i = 0; i < unknowns(); ++i) {
      u[static_cast<std::size_t>(i)] = v(i);
      if (periodic) u[static_cast<std::size_t>(M - 1 - i)] = v(i);
    }
    return u;
  }

  Eigen::VectorXd restrict(const Field& u) const {
    Eigen::VectorXd v(unknowns());
    for (int i = 0; i < unknowns(); ++i) {
      const double a = u[static_cast<std::size_t>(i)];
      v(i) = periodic ? 0.5 * (a + u[static_cast<std::size_t>(M - 1 - i)]) : a;
    }
    return v;
  }

  Eigen::VectorXd eval(const Eigen::VectorXd& v) const {
    const Field u = expand(v);
    const Field r = model.rhs(u);
    Eigen::VectorXd F(equations());
    for (int i = 0; i < unknowns(); ++i) F(i) = r[static_cast<std::size_t>(i)];
    F(unknowns()) = scale * (mean(u) - ubar);
    return F;
  }
};

}  // namespace

NewtonResult newton_steady(const AdhesionModel& model, double ubar, const Field& init,
                           const NewtonOptions& opts) {
  const Grid& grid = model.grid();
  grid.check(init);
  const int M = grid.cells();
  const double dx = grid.dx();
  const NewtonSystem sys{model, ubar, M, model.periodic(), model.params().D / (dx * dx)};
  const int P = sys.unknowns();

  // one ulp of the largest density moves a diffusive row by about 2·D/Δx²·ulp
  auto rounding_floor = [&](const Eigen::VectorXd& v) {
    return 4.0 * std::numeric_limits<double>::epsilon() * sys.scale * v.lpNorm<Eigen::Infinity>();
  };
  auto done = [&](const Eigen::VectorXd& v, int it, double merit, bool floor) {
    NewtonResult res;
    res.u = sys.expand(v);
    res.iterations = it;
    res.residual = merit;
    res.at_rounding_floor = floor;
    return res;
  };

  Eigen::VectorXd v = sys.restrict(init);
  Eigen::VectorXd F = sys.eval(v);
  // the Gauss-Newton step is a descent direction for the 2-norm only
  double merit = F.lpNorm<Eigen::Infinity>();
  double merit2 = F.squaredNorm();
  Eigen::MatrixXd J(sys.equations(), P);
  for (int it = 0; it < opts.max_iter; ++it) {
    if (merit < opts.tol) return done(v, it, merit, false);
    // central differences: near onset the smallest eigenvalue is below the
    // O(h) error of a one-sided quotient
    for (int j = 0; j < P; ++j) {
      const double h = 6e-6 * std::max(1.0, std::abs(v(j)));
      const double keep = v(j);
      v(j) = keep + h;
      const double hp = v(j) - keep;
      const Eigen::VectorXd Fp = sys.eval(v);
      v(j) = keep - h;
      const double hm = keep - v(j);
      J.col(j) = (Fp - sys.eval(v)) / (hp + hm);
      v(j) = keep;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(J);
    if (qr.rank() < P)
      throw Error(ErrorKind::SingularJacobian,
                  "Jacobian rank " + std::to_string(qr.rank()) + " < " + std::to_string(P));
    const Eigen::VectorXd delta = qr.solve(-F);

    double lambda = 1.0;
    bool improved = false;
    for (int k = 0; k <= opts.max_halvings; ++k, lambda *= 0.5) {
      const Eigen::VectorXd trial = v + lambda * delta;
      Eigen::VectorXd Ft;
      try {
        Ft = sys.eval(trial);
      } catch (const Error&) {
        continue;
      }
      const double m2 = Ft.squaredNorm();
      if (m2 < merit2) {
        v = trial;
        F = std::move(Ft);
        merit = F.lpNorm<Eigen::Infinity>();
        merit2 = m2;
        improved = true;
        break;
      }
    }
    // no representable u does better; accept as converged
    if (!improved && merit < rounding_floor(v)) return done(v, it + 1, merit, true);
    if (!improved)
      throw Error(ErrorKind::NewtonDiverged, "no decrease after " + std::to_string(opts.max_halvings) +
                                                 " halvings at iteration " + std::to_string(it) +
                                                 " (residual " + sci(merit) + ")");
  }
  if (merit < opts.tol) return done(v, opts.max_iter, merit, false);
  throw Error(ErrorKind::NewtonDiverged, "not converged after " + std::to_string(opts.max_iter) +
                                             " iterations (residual " + sci(merit) + ")");
}

BranchResult continue_branch(AdhesionModel& model, double ubar, const Field& init,
                             const std::vector<double>& alphas, const NewtonOptions& opts) {
  BranchResult out;
  const Grid& grid = model.grid();
  auto amplitude = [&](const Field& v) {
    double acc = 0.0;
    for (double x : v) acc += (x - ubar) * (x - ubar);
    return std::sqrt(acc * grid.dx());
  };

  // last two solved points, including intermediate ones
  std::vector<std::pair<double, Field>> hist;
  auto predict = [&](double a) {
    if (hist.empty()) return init;
    const auto& [aq, q] = hist.back();
    if (hist.size() < 2) return q;
    const auto& [ap, p] = hist[hist.size() - 2];
    const double t = (a - aq) / (aq - ap);
    Field g(q.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = q[i] + t * (q[i] - p[i]);
    return g;
  };
  std::string failure;
  auto attempt = [&](double a) -> std::optional<Field> {
    model.set_alpha(a);
    Field v;
    try {
      v = newton_steady(model, ubar, predict(a), opts).u;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NewtonDiverged && e.kind() != ErrorKind::SingularJacobian &&
          e.kind() != ErrorKind::NonFiniteState)
        throw;
      failure = e.what();
      return std::nullopt;
    }
    const double prev = hist.empty() ? 0.0 : amplitude(hist.back().second);
    if (amplitude(v) < 1e-8 * ubar && prev > 1e-6 * ubar) {
      failure = "collapsed onto the uniform state at alpha = " + std::to_string(a);
      return std::nullopt;
    }
    hist.emplace_back(a, std::move(v));
    if (hist.size() > 2) hist.erase(hist.begin());
    return hist.back().second;
  };

  for (double a : alphas) {
    bool reached = false;
    if (hist.empty()) {
      reached = attempt(a).has_value();
    } else {
      // halve the step on failure, grow it back after successes
      double cur = hist.back().first;
      const double h_min = std::abs(a - cur) / 1024.0;
      double h = a - cur;
      reached = true;
      while (cur != a) {
        const double next = std::abs(a - cur) <= std::abs(h) ? a : cur + h;
        if (attempt(next)) {
          cur = next;
          h *= 2.0;
        } else if ((h *= 0.5, std::abs(h) < h_min)) {
          reached = false;
          break;
        }
      }
    }
    if (!reached) {
      out.stop_reason = failure;
      break;
    }
    const Field& u = hist.back().second;
    BranchRow row;
    row.alpha = a;
    row.l2_amplitude = amplitude(u);
    row.u_max = *std::max_element(u.begin(), u.end());
    row.u_min = *std::min_element(u.begin(), u.end());
    row.peaks = count_peaks(u, model.periodic());
    row.u = u;
    out.rows.push_back(std::move(row));
    if (out.rows.back().u_max > 1e3 * ubar) {
      out.stop_reason = "u_max exceeded 1e3 * ubar";
      break;
    }
  }
  return out;
}

}  // namespace adhesim
