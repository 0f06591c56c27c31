#pragma once

// Structural checks on fields: area function, unit-span second difference,
// peak counting, symmetry, energy and steady-state properties.

#include <string>
#include <vector>

#include "adhesim/grid.hpp"
#include "adhesim/kernel.hpp"

namespace adhesim {

class AdhesionModel;

/// Peaks rising and falling by at least rel_threshold·mean(u) (hysteresis).
/// Bounded fields count a boundary maximum as a peak.
int count_peaks(const Field& u, bool periodic, double rel_threshold = 1e-4);

/// w(x_i) = Δx·Σ_{j<i} u_j + ½Δx·u_i − ū·x_i. NaN ubar selects mean(u).
Field area_function(const Grid& grid, const Field& u, double ubar);

/// ½[w(x+R) + w(x−R) − 2w(x)] on the periodic grid, linear interpolation
/// when R is not a whole number of cells.
Field delta1(const Grid& grid, const Field& w, double R = 1.0);

struct SymmetryError {
  double shift = 0.0;    // max|u(x) − u(x − L/n)|
  double reflect = 0.0;  // min over reflection axes of max|u(x) − u(2c − x)|
  int axis_index = 0;    // axis at x = axis_index·Δx/2
};
SymmetryError symmetry_error(const Grid& grid, const Field& u, int n, bool periodic = true);

struct Alignment {
  int shift = 0;  // b[i] is compared to a[(i + shift) mod M]
  double error = 0.0;
};
/// Best whole-cell periodic translation of a onto b in the max norm.
Alignment align(const Field& a, const Field& b);

struct EnergyValues {
  double entropy = 0.0;   // Δx·Σ[D u ln u − (α/2) u (W*u)]
  double paper_J = 0.0;   // Δx·Σ[D u²/2 − (α/2) u (W*u)]
};
/// Periodic, linear h. Densities are clamped at 1e-14 before the logarithm;
/// throws NonPositiveDensity below −1e-10.
EnergyValues energy(const Grid& grid, const Field& u, const KernelSpec& kernel, double D,
                    double alpha);

/// Δx·Σ u over the first n_cells cells plus the partial cell up to x_end.
double integral_up_to(const Grid& grid, const Field& u, double x_end);

/// ∫₀^{L/2n} u.
double mass_per_half_tile(const Grid& grid, const Field& u, int n);

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
};

struct DiagnosticsReport {
  std::vector<Check> checks;
  bool all_pass() const;
  const Check* find(const std::string& name) const;
  void add(std::string name, bool pass, double value, double tolerance);
};

/// Lemma checks on a claimed steady state: residual, zero coincidence of u′
/// and K[u], sign of u′K[u], a-priori bounds and convexity implications.
DiagnosticsReport steady_state_checks(const AdhesionModel& model, const Field& u,
                                      double tol = 1e-8);

}  // namespace adhesim
