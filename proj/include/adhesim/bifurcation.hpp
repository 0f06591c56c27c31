#pragma once

// Bifurcations of the periodic steady-state problem from u ≡ ū, and a
// damped Newton solver / natural continuation for the nontrivial branches.

#include <string>
#include <vector>

#include "adhesim/solver.hpp"

namespace adhesim {

enum class Criticality { Super, Sub, Degenerate };
const char* to_string(Criticality c);

struct BifurcationRecord {
  int n = 0;
  double Mn = 0.0;
  double alpha_n = 0.0;   // NaN when degenerate
  double delta_Mn = 0.0;
  double alpha_3n = 0.0;  // NaN when degenerate or h non-linear
  double b_2n1 = 0.0;     // NaN when degenerate or h non-linear
  Criticality criticality = Criticality::Degenerate;
};

/// α_n = nπ / (ū L M_n h′(ū)) for n = 1..n_max. The cubic data are filled
/// only when linear_h is set.
std::vector<BifurcationRecord> bif_points(const KernelSpec& spec, double L, double ubar,
                                          double hprime_ubar, int n_max, bool linear_h = true);

/// α_n alone; throws DegenerateMode when |M_n| is below threshold.
double bifurcation_alpha(const KernelSpec& spec, double L, double ubar, double hprime_ubar, int n);

struct BifurcationType {
  double alpha_3n = 0.0;
  double b_2n1 = 0.0;
  Criticality criticality = Criticality::Degenerate;
};

/// Closed-form pitchfork data for h(u) = u:
///   α_{3,n} = (1/4ū⁵)(πn/L)³ / (M_n² ΔM_n),  b_{2n}¹ = (1/2ū³)(πn/L)² / (2M_n² − M_n M_{2n}).
BifurcationType bif_type(const KernelSpec& spec, double L, double ubar, int n);
BifurcationType bif_type(const KernelSpec& spec, double L, double ubar, int n,
                         const AdhesionFunction& h);

/// Cubic coefficient including the e_n·K[p₁] projection term:
/// α_{3,n}·(M_n − M_{2n})/M_n.
double alpha3_projected(const KernelSpec& spec, double L, double ubar, int n);

struct LocalBranchPoint {
  double alpha = 0.0;
  Field u;
};

/// u = ū + s α_n cos(2πnx/L) + s² b cos(4πnx/L), α(s) = α_n + s² · alpha3_projected.
LocalBranchPoint local_branch(const KernelSpec& spec, const Grid& grid, double ubar, int n,
                              double s);

/// Continuum steady-state residual of the local branch (D = 1), evaluated
/// exactly on its Fourier modes: max_m |coefficient of mode m|.
double local_branch_residual(const KernelSpec& spec, double L, double ubar, int n, double s);

/// λ_k for k = 1..k_max (entry k−1): λ_n = 0 and
/// λ_k = (2kπ/L)²((n/k)(M_k/M_n) − 1); degenerate M_k gives −(2kπ/L)².
std::vector<double> linearized_spectrum(const KernelSpec& spec, double L, int n, int k_max);

enum class Stability { Stable, Saddle, Unstable };
const char* to_string(Stability s);

struct BranchStability {
  Stability verdict = Stability::Saddle;
  int mu_sign = 0;       // sign of the critical eigenvalue along the branch
  int unstable_modes = 0;  // k ≠ n with λ_k > 0
};
BranchStability branch_stability(const KernelSpec& spec, double L, double ubar, int n,
                                 int k_max = 200);

struct NewtonOptions {
  double tol = 1e-10;     // ∞-norm of the discrete right-hand side
  int max_iter = 50;
  int max_halvings = 30;
};

struct NewtonResult {
  Field u;
  int iterations = 0;
  double residual = 0.0;
  // stagnated above tol but below 4·eps·(D/Δx²)·max|u|
  bool at_rounding_floor = false;
};

/// Damped Gauss-Newton on {rhs(u) = 0, mean(u) = ū}. Periodic states are
/// restricted to fields mirror-symmetric about x = 0, which fixes the phase
/// (u[M/4] = u[M-1-M/4]). A stalled iteration whose residual is already below
/// the double-precision floor of the discrete rhs is accepted. Throws
/// NewtonDiverged or SingularJacobian.
NewtonResult newton_steady(const AdhesionModel& model, double ubar, const Field& init,
                           const NewtonOptions& opts = {});

struct BranchRow {
  double alpha = 0.0;
  double l2_amplitude = 0.0;
  double u_max = 0.0;
  double u_min = 0.0;
  int peaks = 0;
  Field u;
};

struct BranchResult {
  std::vector<BranchRow> rows;
  std::string stop_reason;  // empty when the whole range was traversed
};

/// Natural-parameter continuation in α over `alphas`, warm-started from init.
/// Secant predictor; failed steps are halved down to 1/1024. Stops on NewtonDiverged,
/// SingularJacobian or collapse onto ū that halving cannot cure, or when u_max exceeds 10³·ū.
BranchResult continue_branch(AdhesionModel& model, double ubar, const Field& init,
                             const std::vector<double>& alphas, const NewtonOptions& opts = {});

}  // namespace adhesim
