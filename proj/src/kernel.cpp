#include "adhesim/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "adhesim/error.hpp"
#include "adhesim/quadrature.hpp"

namespace adhesim {

namespace {

constexpr double kPi = std::numbers::pi;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi); }

// Mass of the unit Gaussian centred at c (width s) inside [0, R].
double truncated_mass(double c, double s, double R) {
  return normal_cdf((R - c) / s) - normal_cdf(-c / s);
}

double table_value(const KernelSpec& k, double r) {
  const auto& xs = k.table_r;
  const auto& ys = k.table_omega;
  if (r <= xs.front()) return ys.front();
  if (r >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), r);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin());
  const double t = (r - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

// ∫_0^r of the piecewise-linear table with constant extrapolation.
double table_antiderivative(const KernelSpec& k, double r) {
  const auto& xs = k.table_r;
  if (r <= 0.0) return 0.0;
  double acc = 0.0;
  double left = 0.0;
  auto trapezoid = [&](double a, double b) {
    return 0.5 * (table_value(k, a) + table_value(k, b)) * (b - a);
  };
  // Segment boundaries: all table nodes inside (0, r).
  for (double node : xs) {
    if (node <= left) continue;
    if (node >= r) break;
    acc += trapezoid(left, node);
    left = node;
  }
  acc += trapezoid(left, r);
  return acc;
}

// Unnormalised shape s(r) with ω = ω₀·s.
double shape(const KernelSpec& k, double r) {
  switch (k.family) {
    case KernelFamily::Uniform:
      return 1.0;
    case KernelFamily::Exponential:
      return std::exp(-r / k.xi);
    case KernelFamily::Peak: {
      const double z = r / k.xi;
      return z * std::exp(-0.5 * z * z);
    }
    case KernelFamily::TwoPoint: {
      const double s = k.mollifier_width();
      const double g1 = normal_pdf((r - k.r1) / s) / (s * truncated_mass(k.r1, s, k.R));
      const double g2 = normal_pdf((r - k.r2) / s) / (s * truncated_mass(k.r2, s, k.R));
      return k.a1 * g1 + k.a2 * g2;
    }
    case KernelFamily::Tabulated:
      return table_value(k, r);
  }
  return 0.0;
}

// S(r) = ∫_0^r s for 0 <= r <= R.
double shape_antiderivative(const KernelSpec& k, double r) {
  switch (k.family) {
    case KernelFamily::Uniform:
      return r;
    case KernelFamily::Exponential:
      return k.xi * (-std::expm1(-r / k.xi));
    case KernelFamily::Peak: {
      const double z = r / k.xi;
      return k.xi * (-std::expm1(-0.5 * z * z));
    }
    case KernelFamily::TwoPoint: {
      const double s = k.mollifier_width();
      auto part = [&](double a, double c) {
        return a * (normal_cdf((r - c) / s) - normal_cdf(-c / s)) / truncated_mass(c, s, k.R);
      };
      return part(k.a1, k.r1) + part(k.a2, k.r2);
    }
    case KernelFamily::Tabulated:
      return table_antiderivative(k, r);
  }
  return 0.0;
}

void validate(const KernelSpec& k) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidParameter, msg); };
  if (!(k.R > 0.0) || !std::isfinite(k.R)) fail("kernel.R must be positive");
  switch (k.family) {
    case KernelFamily::Uniform:
      break;
    case KernelFamily::Exponential:
    case KernelFamily::Peak:
      if (!(k.xi > 0.0)) fail("kernel.xi must be positive");
      break;
    case KernelFamily::TwoPoint:
      if (!(k.mollifier_width() > 0.0)) fail("kernel.sigma must be positive");
      if (!(k.r1 > 0.0 && k.r1 < k.r2 && k.r2 < k.R)) fail("two-point offsets need 0 < r1 < r2 < R");
      if (k.a1 < 0.0 || k.a2 < 0.0) fail("two-point weights must be nonnegative");
      break;
    case KernelFamily::Tabulated: {
      if (k.table_r.size() < 2 || k.table_r.size() != k.table_omega.size())
        fail("kernel table needs at least two (r, omega) rows");
      for (std::size_t i = 1; i < k.table_r.size(); ++i)
        if (!(k.table_r[i] > k.table_r[i - 1])) fail("kernel table r must be strictly increasing");
      for (double w : k.table_omega)
        if (w < 0.0 || !std::isfinite(w)) fail("kernel table omega must be finite and >= 0");
      break;
    }
  }
}

void require_normalized(const KernelSpec& k) {
  if (!k.normalized()) throw Error(ErrorKind::InvalidParameter, "kernel is not normalised");
}

// ∫_a^b f(r) ω(r) dr, split at table nodes so Simpson never straddles a kink.
template <class F>
double weighted_integral(const KernelSpec& k, F&& f, double a, double b, int panels) {
  auto integrand = [&](double r) { return f(r) * omega(k, r); };
  if (k.family != KernelFamily::Tabulated) return simpson(integrand, a, b, panels);
  std::vector<double> cuts{a};
  for (double node : k.table_r)
    if (node > a && node < b) cuts.push_back(node);
  cuts.push_back(b);
  double acc = 0.0;
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    const int p = std::max(2, static_cast<int>(panels * (cuts[i] - cuts[i - 1]) / (b - a)) + 2);
    acc += simpson(integrand, cuts[i - 1], cuts[i], p);
  }
  return acc;
}

}  // namespace

const char* to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Uniform: return "uniform";
    case KernelFamily::Exponential: return "exponential";
    case KernelFamily::Peak: return "peak";
    case KernelFamily::TwoPoint: return "twopoint";
    case KernelFamily::Tabulated: return "tabulated";
  }
  return "?";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "uniform") return KernelFamily::Uniform;
  if (name == "exponential") return KernelFamily::Exponential;
  if (name == "peak") return KernelFamily::Peak;
  if (name == "twopoint") return KernelFamily::TwoPoint;
  if (name == "tabulated") return KernelFamily::Tabulated;
  throw Error(ErrorKind::UnknownValue,
              "kernel.family = '" + std::string(name) +
                  "'; valid: uniform|exponential|peak|twopoint|tabulated");
}

KernelSpec uniform_kernel(double R) {
  KernelSpec k;
  k.family = KernelFamily::Uniform;
  k.R = R;
  return k;
}

KernelSpec exponential_kernel(double xi, double R) {
  KernelSpec k;
  k.family = KernelFamily::Exponential;
  k.xi = xi;
  k.R = R;
  return k;
}

KernelSpec peak_kernel(double xi, double R) {
  KernelSpec k;
  k.family = KernelFamily::Peak;
  k.xi = xi;
  k.R = R;
  return k;
}

KernelSpec two_point_kernel(double a1, double a2, double r1, double r2, double sigma, double R) {
  KernelSpec k;
  k.family = KernelFamily::TwoPoint;
  k.a1 = a1;
  k.a2 = a2;
  k.r1 = r1;
  k.r2 = r2;
  k.sigma = sigma;
  k.R = R;
  return k;
}

KernelSpec tabulated_kernel(std::vector<double> r, std::vector<double> w, double R) {
  KernelSpec k;
  k.family = KernelFamily::Tabulated;
  k.table_r = std::move(r);
  k.table_omega = std::move(w);
  k.R = R;
  return k;
}

KernelSpec load_kernel_table(const std::string& path, double R) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open kernel table '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::ParseError, path + ": empty kernel table");
  std::vector<double> rs, ws;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double r = 0.0, w = 0.0;
    if (!(row >> r >> w))
      throw Error(ErrorKind::ParseError, path + ":" + std::to_string(lineno) + ": expected r,omega");
    rs.push_back(r);
    ws.push_back(w);
  }
  return tabulated_kernel(std::move(rs), std::move(ws), R);
}

KernelSpec normalize(KernelSpec spec) {
  validate(spec);
  const double mass = shape_antiderivative(spec, spec.R);
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw Error(ErrorKind::NonNormalizable, "kernel has zero mass on [0, R]");
  spec.omega0 = 0.5 / mass;
  return spec;
}

double omega(const KernelSpec& spec, double r) {
  if (r < 0.0 || r > spec.R) return 0.0;
  return spec.omega0 * shape(spec, r);
}

double omega_odd(const KernelSpec& spec, double r) {
  if (r > 0.0) return omega(spec, r);
  if (r < 0.0) return -omega(spec, -r);
  return 0.0;
}

double omega_integral(const KernelSpec& spec, double a, double b) {
  a = std::clamp(a, 0.0, spec.R);
  b = std::clamp(b, 0.0, spec.R);
  if (b <= a) return 0.0;
  return spec.omega0 * (shape_antiderivative(spec, b) - shape_antiderivative(spec, a));
}

double omega_odd_integral(const KernelSpec& spec, double a, double b) {
  if (b <= a) return 0.0;
  double acc = 0.0;
  if (b > 0.0) acc += omega_integral(spec, std::max(a, 0.0), b);
  if (a < 0.0) acc -= omega_integral(spec, std::max(-b, 0.0), -a);
  return acc;
}

double omega_sup(const KernelSpec& spec) {
  require_normalized(spec);
  switch (spec.family) {
    case KernelFamily::Uniform:
    case KernelFamily::Exponential:
      return spec.omega0;
    case KernelFamily::Peak:
      return omega(spec, std::min(spec.xi, spec.R));
    default:
      break;
  }
  double best = std::max(omega(spec, 0.0), omega(spec, spec.R));
  constexpr int samples = 20000;
  for (int k = 0; k <= samples; ++k) best = std::max(best, omega(spec, spec.R * k / samples));
  if (spec.family == KernelFamily::TwoPoint) {
    best = std::max({best, omega(spec, spec.r1), omega(spec, spec.r2)});
  } else {
    for (std::size_t i = 0; i < spec.table_r.size(); ++i)
      if (spec.table_r[i] >= 0.0 && spec.table_r[i] <= spec.R)
        best = std::max(best, spec.omega0 * spec.table_omega[i]);
  }
  return best;
}

double omega_at_zero(const KernelSpec& spec) { return omega(spec, 0.0); }

double moment_Mn(const KernelSpec& spec, int n, double L) {
  require_normalized(spec);
  if (n <= 0) throw Error(ErrorKind::InvalidParameter, "moment index n must be positive");
  const double k = 2.0 * kPi * n / L;
  if (spec.family == KernelFamily::Uniform) {
    const double s = std::sin(0.5 * k * spec.R);
    return spec.omega0 * 2.0 * s * s / k;
  }
  // Resolve the oscillation: at least 50 panels per period.
  const int panels = std::max(kSimpsonPanels, static_cast<int>(50.0 * k * spec.R / (2.0 * kPi)) + 2);
  return weighted_integral(spec, [k](double r) { return std::sin(k * r); }, 0.0, spec.R, panels);
}

double delta_Mn(const KernelSpec& spec, int n, double L) {
  return 2.0 * moment_Mn(spec, n, L) - moment_Mn(spec, 2 * n, L);
}

double raw_moment(const KernelSpec& spec, int j) {
  require_normalized(spec);
  if (j < 0) throw Error(ErrorKind::InvalidParameter, "moment order must be >= 0");
  if (j % 2 == 0) return 0.0;
  return 2.0 * weighted_integral(spec, [j](double r) { return std::pow(r, j); }, 0.0, spec.R,
                                 kSimpsonPanels);
}

double first_moment_c1(const KernelSpec& spec) { return raw_moment(spec, 1) / (2.0 * spec.R); }

double adhesion_potential(const KernelSpec& spec, double r) {
  require_normalized(spec);
  if (r >= spec.R) return 0.0;
  return omega_integral(spec, std::max(r, 0.0), spec.R);
}

MomentTable moment_table(const KernelSpec& spec, double L, int n_max) {
  MomentTable table{L, {}};
  table.entries.reserve(static_cast<std::size_t>(std::max(n_max, 0)));
  for (int n = 1; n <= n_max; ++n)
    table.entries.push_back({n, moment_Mn(spec, n, L), delta_Mn(spec, n, L)});
  return table;
}

}  // namespace adhesim
