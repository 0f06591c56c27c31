#pragma once

// First-order small-α steady state of the no-flux model: u = ū + α u₁.

#include <string>
#include <vector>

#include "adhesim/grid.hpp"
#include "adhesim/kernel.hpp"

namespace adhesim {

struct AsymptoticProfile {
  double ubar = 0.0;
  double alpha = 0.0;
  double A = 0.0;           // plateau value of u₁ on [R, L − R]
  double u1_boundary = 0.0; // u₁(0) = u₁(L)
  Field u1;                 // at cell centres
  Field u;                  // ū + α u₁
  std::vector<std::string> warnings;
};

/// u₁′ = ū² G(|R − 2x|) on [0, R] with G(t) = ∫_t^R ω, zero on the plateau,
/// mirrored on [L − R, L]; constants fixed by Avg[u₁] = 0.
AsymptoticProfile noflux_expansion(const KernelSpec& spec, double L, double ubar, double alpha,
                                   const Grid& grid);

/// u₁ at an arbitrary x ∈ [0, L].
double noflux_u1(const KernelSpec& spec, double L, double ubar, double x);

/// Plateau A = ū² R c / L and boundary value u₁(0) = −ū² c (L − R)/L, c = ∫₀ᴿ r ω(r) dr.
double noflux_plateau(const KernelSpec& spec, double L, double ubar);
double noflux_boundary_value(const KernelSpec& spec, double L, double ubar);

}  // namespace adhesim
