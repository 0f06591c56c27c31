#pragma once

// key = value run configuration.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "adhesim/kernel.hpp"
#include "adhesim/nonlocal.hpp"
#include "adhesim/solver.hpp"

namespace adhesim {

enum class IcKind { Constant, Noise, Cosine, CosineNoise };

struct RunConfig {
  KernelSpec kernel;  // normalised once parsing is done
  std::string kernel_table;

  Domain bc_base = Domain::Periodic;
  bool bc_neutral = false;
  bool bc_weighted = false;
  double bc_uref = std::numeric_limits<double>::quiet_NaN();
  bool beta_auto = true;
  double beta0 = 0.0;
  double betaL = 0.0;

  std::vector<double> h_coeffs{0.0, 1.0};

  double L = 5.0;
  int N = 256;

  double D = 1.0;
  double alpha = 1.0;
  double t_end = 100.0;
  double rtol = 1e-6;
  double atol = 1e-6;
  int outputs = 100;
  ImexScheme scheme = ImexScheme::CrankNicolson;

  IcKind ic = IcKind::Noise;
  double ubar = 1.0;
  std::uint64_t seed = 0;
  double amp = 1e-2;
  double noise_amp = 1e-3;  // extra noise for constant+cos+noise
  int mode_n = 1;

  double ss_tol = 1e-9;
  double t_max = 1e4;
  // L-stable by default: CN leaves undamped grid-scale modes at large steps
  ImexScheme steady_scheme = ImexScheme::Ars222;
  bool newton_polish = true;

  int n_max = 10;

  std::vector<int> branch_modes{1};
  double branch_alpha_end = 0.0;  // 0: 1.5·α_n, or 0.5·α_n for a left-opening branch
  int branch_steps = 40;
  double branch_s0 = 0.02;
};

/// Parses a key = value file. Errors: ParseError (with line), UnknownKey,
/// UnknownValue, RangeError, IoError.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& base_dir = ".");

/// Sensing mode (β and ū_ref unresolved when set to auto).
SensingMode sensing_mode(const RunConfig& cfg);
AdhesionFunction adhesion_function(const RunConfig& cfg);
Grid make_grid(const RunConfig& cfg);
Field initial_field(const RunConfig& cfg, const Grid& grid);

/// Operator with neutral reference and automatic β resolved against u0.
NonlocalOperator make_operator(const RunConfig& cfg, const Field& u0);

std::string resolved_text(const RunConfig& cfg);

}  // namespace adhesim
