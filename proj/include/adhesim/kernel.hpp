#pragma once

// Interaction kernel of the adhesion operator.
//
// The even weight ω(r) lives on [0, R] and is normalised so that
// ∫₀ᴿ ω(r) dr = 1/2. The odd kernel is Ω(r) = sgn(r) ω(|r|) with Ω(0) = 0.

#include <string>
#include <string_view>
#include <vector>

namespace adhesim {

enum class KernelFamily { Uniform, Exponential, Peak, TwoPoint, Tabulated };

const char* to_string(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view name);

struct KernelSpec {
  KernelFamily family = KernelFamily::Uniform;
  double R = 1.0;  // sensing radius

  double xi = 0.25;  // exponential / peak length scale

  // Mollified two-point measure a₁δ_{r₁} + a₂δ_{r₂}. sigma <= 0 selects 0.02·R.
  double a1 = 8.0 / 18.0;
  double a2 = 1.0 / 18.0;
  double r1 = 0.05;
  double r2 = 0.8;
  double sigma = 0.0;

  // Piecewise-linear samples (r, ω) for the tabulated family.
  std::vector<double> table_r;
  std::vector<double> table_omega;

  // Normalisation constant; zero until normalize() has run.
  double omega0 = 0.0;

  bool normalized() const { return omega0 > 0.0; }
  double mollifier_width() const { return sigma > 0.0 ? sigma : 0.02 * R; }
};

KernelSpec uniform_kernel(double R = 1.0);
KernelSpec exponential_kernel(double xi, double R = 1.0);
KernelSpec peak_kernel(double xi, double R = 1.0);
KernelSpec two_point_kernel(double a1, double a2, double r1, double r2, double sigma = 0.0,
                            double R = 1.0);
KernelSpec tabulated_kernel(std::vector<double> r, std::vector<double> omega, double R = 1.0);

/// Reads a two-column `r,omega` CSV (header row required).
KernelSpec load_kernel_table(const std::string& path, double R = 1.0);

/// Validates the family parameters and sets omega0 so that ∫₀ᴿ ω = 1/2.
/// Throws NonNormalizable when the unnormalised weight has zero mass.
KernelSpec normalize(KernelSpec spec);

/// ω(r) for r in [0, R]; zero outside. Requires a normalised spec.
double omega(const KernelSpec& spec, double r);

/// Ω(r) = sgn(r) ω(|r|), Ω(0) = 0.
double omega_odd(const KernelSpec& spec, double r);

/// ∫_a^b ω(r) dr for 0 <= a <= b, clipped to [0, R]. Closed form for every family.
double omega_integral(const KernelSpec& spec, double a, double b);

/// ∫_a^b Ω(r) dr for any a <= b (signed, clipped to [−R, R]).
double omega_odd_integral(const KernelSpec& spec, double a, double b);

/// sup_{[0,R]} ω.
double omega_sup(const KernelSpec& spec);

/// Ω⁺ = lim_{r→0⁺} Ω(r).
double omega_at_zero(const KernelSpec& spec);

// Below |M_n| this mode is treated as degenerate (no bifurcation).
inline constexpr double kDegenerateMoment = 1e-9;

/// M_n = ∫₀ᴿ sin(2πnr/L) ω(r) dr.
double moment_Mn(const KernelSpec& spec, int n, double L);

/// ΔM_n = 2M_n − M_{2n}.
double delta_Mn(const KernelSpec& spec, int n, double L);

/// μ_j = ∫_{−R}^{R} r^j Ω(r) dr (zero for even j).
double raw_moment(const KernelSpec& spec, int j);

/// c₁ = ∫₀¹ σ ω̃(σ) dσ in the rescaled variable σ = r/R, so μ₁ = 2R·c₁.
double first_moment_c1(const KernelSpec& spec);

/// W(r) = ∫_r^R ω(s) ds for 0 <= r <= R, zero beyond R.
double adhesion_potential(const KernelSpec& spec, double r);

struct MomentEntry {
  int n;
  double Mn;
  double delta_Mn;
};

struct MomentTable {
  double L;
  std::vector<MomentEntry> entries;
};

MomentTable moment_table(const KernelSpec& spec, double L, int n_max);

}  // namespace adhesim
