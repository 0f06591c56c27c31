#pragma once

// Finite-volume discretisation of u_t = D u_xx − α (u K[u])_x and its IMEX
// time integration.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "adhesim/nonlocal.hpp"

namespace adhesim {

struct ModelParams {
  double D = 1.0;
  double alpha = 0.0;
};

class AdhesionModel {
 public:
  AdhesionModel(NonlocalOperator op, ModelParams params);

  const Grid& grid() const { return op_.grid(); }
  const NonlocalOperator& op() const { return op_; }
  const ModelParams& params() const { return params_; }
  void set_alpha(double alpha) { params_.alpha = alpha; }
  bool periodic() const { return !op_.mode().bounded(); }

  /// −(F^a_{i+½} − F^a_{i−½})/Δx. `k_work` receives K[u]. Returns the
  /// largest face speed, as max_face_speed(k_work).
  double advective(std::span<const double> u, std::span<double> out, std::span<double> k_work) const;
  /// (F^d_{i+½} − F^d_{i−½})/Δx.
  void diffusive(std::span<const double> u, std::span<double> out) const;

  /// Full right-hand side; throws NonFiniteState.
  Field rhs(const Field& u) const;

  /// max |a_{i+½}| over faces for the given K[u].
  double max_face_speed(std::span<const double> k) const;

 private:
  NonlocalOperator op_;
  ModelParams params_;
};

enum class ImexScheme { CrankNicolson, Ars222 };

/// One IMEX step of fixed size; owns its scratch space.
class Stepper {
 public:
  Stepper(const AdhesionModel& model, ImexScheme scheme);

  /// Advances u by dt in place. Returns the largest face speed seen at the
  /// start of the step (for CFL control).
  /// With same_start the advective term of the previous call's starting
  /// state is reused (the caller guarantees u is unchanged since then).
  double step(Field& u, double dt, bool same_start = false);
  /// Face speed of the current state without stepping.
  double face_speed(const Field& u);

 private:
  struct Factor {
    double r = -1.0;
    Field inv, sup, z;
    double sm_denom = 1.0;
  };
  const Factor& factor(double r);
  static void sweep(const Factor& f, const Field& b, Field& x);
  void solve_implicit(double c, const Field& b, Field& x);

  const AdhesionModel& model_;
  ImexScheme scheme_;
  double speed0_ = 0.0;
  Factor factors_[2];
  int next_factor_ = 0;
  Field k_, fe0_, fe1_, fi_, rhs_, stage_;
};

struct IntegrateOptions {
  double t_end = 1.0;
  double rtol = 1e-6;
  double atol = 1e-6;
  std::vector<double> output_times;  // empty: record t_end only
  double dt_initial = 0.0;           // 0: pick from CFL and diffusion scales
  double dt_min = 1e-12;
  double cfl = 0.9;
  ImexScheme scheme = ImexScheme::CrankNicolson;
  bool record_energy = true;
  std::uint64_t max_steps = 0;  // 0: unlimited
  // Called after every accepted step; returning false stops the integration.
  std::function<bool(double t, const Field& u)> observer;
};

struct StepStatistics {
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;
  double max_mass_drift = 0.0;  // largest per-step relative change of Σu
  double min_value = 0.0;
  bool stopped_early = false;
  double t_final = 0.0;
};

struct Kymograph {
  std::vector<double> times;
  std::vector<Field> fields;
  std::vector<double> mass;
  std::vector<int> peaks;
  std::vector<double> energy;  // entropy form; NaN when not defined for the mode
  StepStatistics stats;
  Field final_state;
};

Kymograph integrate(const AdhesionModel& model, const Field& u0, const IntegrateOptions& opts);

struct SteadyOptions {
  double ss_tol = 1e-9;
  double t_max = 1e4;
  double rtol = 1e-6;
  double atol = 1e-6;
  ImexScheme scheme = ImexScheme::Ars222;
  int check_every = 25;  // accepted steps between residual checks
};

struct SteadyResult {
  Field u;
  double t = 0.0;
  double residual = 0.0;  // ‖rhs‖∞/‖u‖∞
  StepStatistics stats;
};

/// Integrates until ‖rhs‖∞/‖u‖∞ < ss_tol. Throws NotConverged at t_max.
SteadyResult run_to_steady(const AdhesionModel& model, const Field& u0, const SteadyOptions& opts);

/// ‖rhs(u)‖∞/‖u‖∞.
double steady_residual(const AdhesionModel& model, const Field& u);

// Initial conditions.
Field constant_field(const Grid& grid, double ubar);
/// ū plus uniform per-cell noise in [−amp, amp], mean-corrected.
Field noise_field(const Grid& grid, double ubar, double amp, std::uint64_t seed);
/// ū + amp·cos(2πnx/L).
Field cosine_field(const Grid& grid, double ubar, int n, double amp);

}  // namespace adhesim
