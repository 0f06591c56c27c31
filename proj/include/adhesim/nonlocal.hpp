#pragma once

// Discrete nonlocal adhesion operator K[u] on a cell-centred grid.
//
//   K[u](x) = ∫_{f₁(x)}^{f₂(x)} h(u(x + r)) Ω(r) dr
//
// The sensing limits f₁, f₂ encode the boundary behaviour (periodic, naive,
// no-flux). Neutral modes subtract K[ū_ref]; weighted modes add the boundary
// adhesion terms β⁰∫_{−R}^{−x}Ω and βᴸ∫_{L−x}^{R}Ω inside the boundary strips.

#include <complex>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adhesim/grid.hpp"
#include "adhesim/kernel.hpp"

namespace adhesim {

enum class Domain { Periodic, Naive, NoFlux };

struct SensingMode {
  Domain domain = Domain::Periodic;
  bool neutral = false;
  double u_ref = std::numeric_limits<double>::quiet_NaN();  // NaN: take the initial mean
  bool weighted = false;
  double beta0 = 0.0;
  double betaL = 0.0;

  static SensingMode periodic() { return {}; }
  static SensingMode naive() { return {Domain::Naive}; }
  static SensingMode noflux() { return {Domain::NoFlux}; }
  static SensingMode make_neutral(SensingMode base,
                                  double u_ref = std::numeric_limits<double>::quiet_NaN()) {
    base.neutral = true;
    base.u_ref = u_ref;
    return base;
  }
  static SensingMode make_weighted(SensingMode base, double beta0, double betaL) {
    base.weighted = true;
    base.beta0 = beta0;
    base.betaL = betaL;
    return base;
  }

  bool bounded() const { return domain != Domain::Periodic; }
  std::string name() const;
};

const char* to_string(Domain d);

/// Returns `mode` with an unset neutral reference replaced by `fallback_mean`.
SensingMode resolve_reference(SensingMode mode, double fallback_mean);

/// Sensing-domain limits (f₁(x), f₂(x)) of the base domain.
std::pair<double, double> sensing_limits(const SensingMode& mode, double x, double R, double L);

/// One-sided slopes (f₁′(x), f₂′(x)) of the base domain.
std::pair<double, double> sensing_slopes(const SensingMode& mode, double x, double R, double L);

/// h(u) = Σ c_k u^k. Linear h(u) = u is the default.
class AdhesionFunction {
 public:
  AdhesionFunction() : coeffs_{0.0, 1.0} {}
  static AdhesionFunction linear() { return {}; }
  static AdhesionFunction polynomial(std::vector<double> coeffs);

  double value(double u) const;
  double derivative(double u) const;
  bool is_linear() const;
  const std::vector<double>& coefficients() const { return coeffs_; }

 private:
  std::vector<double> coeffs_;
};

struct Warning {
  std::string code;
  std::string message;
};

class NonlocalOperator {
 public:
  enum class Backend { Auto, Direct, Fft };

  NonlocalOperator(Grid grid, KernelSpec kernel, SensingMode mode,
                   AdhesionFunction h = AdhesionFunction::linear(), Backend backend = Backend::Auto);
  ~NonlocalOperator();
  NonlocalOperator(NonlocalOperator&&) noexcept;
  NonlocalOperator& operator=(NonlocalOperator&&) noexcept;

  /// K[u] at the cell centres.
  Field apply(const Field& u) const;
  void apply(std::span<const double> u, std::span<double> out) const;

  /// Derivative diagnostic K[u]′: interior term by central differencing of
  /// h(u) plus the moving-limit boundary terms.
  Field apply_prime(const Field& u) const;

  /// K[u](x) at any x ∈ [0, L], treating u as piecewise constant on cells.
  double evaluate_at(const Field& u, double x) const;

  const Grid& grid() const { return grid_; }
  const KernelSpec& kernel() const { return kernel_; }
  const SensingMode& mode() const { return mode_; }
  const AdhesionFunction& adhesion() const { return h_; }
  const std::vector<Warning>& warnings() const { return warnings_; }
  bool uses_fft() const { return fft_ != nullptr; }

 private:
  struct Row {
    int first = 0;                 // index of the first cell with nonzero weight
    std::vector<double> weights;   // signed ∫Ω over each cell's offset interval ∩ E(x)
  };
  struct FftPlan;

  void build_periodic(Backend backend);
  void build_bounded();
  void apply_base(std::span<const double> hu, std::span<double> out) const;
  double sample(const Field& u, double y) const;

  Grid grid_;
  KernelSpec kernel_;
  SensingMode mode_;
  AdhesionFunction h_;
  std::vector<Warning> warnings_;

  std::vector<double> stencil_;  // periodic: W_j for j = 0..J (W_0 unused)
  std::vector<Row> rows_;        // bounded: one row per cell
  std::vector<double> offset_;   // neutral and weighted additive terms per cell; empty if all zero
  std::unique_ptr<FftPlan> fft_;
};

/// β⁰, βᴸ for which the weighted-boundary operator built on `base` has
/// K(0) = K(L) = 0 for the given density.
std::pair<double, double> weighted_boundary_noflux_beta(const Grid& grid, const KernelSpec& kernel,
                                                        const SensingMode& base,
                                                        const AdhesionFunction& h, const Field& u);

}  // namespace adhesim
