#include "adhesim/asymptotics.hpp"

#include <cmath>

#include "adhesim/bifurcation.hpp"
#include "adhesim/quadrature.hpp"

namespace adhesim {

namespace {

KernelSpec ready(const KernelSpec& spec) { return spec.normalized() ? spec : normalize(spec); }

// ∫₀ᴿ r ω(r) dr
double first_moment(const KernelSpec& spec) { return 0.5 * raw_moment(spec, 1); }

// Φ(x) = ∫₀ˣ G(|R − 2y|) dy for 0 <= x <= R
double phi(const KernelSpec& spec, double x) {
  const double R = spec.R;
  if (spec.family == KernelFamily::Uniform) {
    if (x <= 0.5 * R) return x * x / (2.0 * R);
    return 0.25 * R - (R - x) * (R - x) / (2.0 * R);
  }
  auto G = [&](double y) { return omega_integral(spec, std::abs(R - 2.0 * y), R); };
  const double mid = 0.5 * R;
  if (x <= mid) return simpson(G, 0.0, x, 2000);
  return simpson(G, 0.0, mid, 2000) + simpson(G, mid, x, 2000);
}

void check(const KernelSpec& spec, double L, double ubar) {
  if (!(L > 2.0 * spec.R)) throw Error(ErrorKind::RangeError, "L must exceed 2R");
  if (!(ubar > 0.0)) throw Error(ErrorKind::InvalidParameter, "mean density must be positive");
}

}  // namespace

double noflux_plateau(const KernelSpec& spec_in, double L, double ubar) {
  const KernelSpec spec = ready(spec_in);
  check(spec, L, ubar);
  return ubar * ubar * spec.R * first_moment(spec) / L;
}

double noflux_boundary_value(const KernelSpec& spec_in, double L, double ubar) {
  const KernelSpec spec = ready(spec_in);
  check(spec, L, ubar);
  return -ubar * ubar * first_moment(spec) * (L - spec.R) / L;
}

double noflux_u1(const KernelSpec& spec_in, double L, double ubar, double x) {
  const KernelSpec spec = ready(spec_in);
  check(spec, L, ubar);
  if (!(x >= 0.0 && x <= L)) throw Error(ErrorKind::OutOfDomain, "x outside [0, L]");
  const double R = spec.R;
  const double u0 = noflux_boundary_value(spec, L, ubar);
  const double y = std::min(x, L - x);  // u₁ is even about L/2
  if (y >= R) return noflux_plateau(spec, L, ubar);
  return u0 + ubar * ubar * phi(spec, y);
}

AsymptoticProfile noflux_expansion(const KernelSpec& spec_in, double L, double ubar, double alpha,
                                   const Grid& grid) {
  const KernelSpec spec = ready(spec_in);
  check(spec, L, ubar);
  if (std::abs(grid.length() - L) > 1e-12 * L)
    throw Error(ErrorKind::GridMismatch, "grid length differs from L");
  AsymptoticProfile p;
  p.ubar = ubar;
  p.alpha = alpha;
  p.A = noflux_plateau(spec, L, ubar);
  p.u1_boundary = noflux_boundary_value(spec, L, ubar);
  try {
    const double a1 = bifurcation_alpha(spec, L, ubar, 1.0, 1);
    if (alpha > 0.25 * a1)
      p.warnings.push_back("alpha = " + std::to_string(alpha) + " exceeds 0.25*alpha_1 = " +
                           std::to_string(0.25 * a1) + "; the first-order expansion may be poor");
  } catch (const Error&) {
  }
  const int M = grid.cells();
  p.u1.resize(static_cast<std::size_t>(M));
  p.u.resize(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) {
    const double v = noflux_u1(spec, L, ubar, grid.x(i));
    p.u1[static_cast<std::size_t>(i)] = v;
    p.u[static_cast<std::size_t>(i)] = ubar + alpha * v;
  }
  return p;
}

}  // namespace adhesim
