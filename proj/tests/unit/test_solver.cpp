#include <doctest.h>

#include <cmath>
#include <numbers>

#include "adhesim/solver.hpp"

using namespace adhesim;

namespace {

constexpr double kPi = std::numbers::pi;

// alpha_1 for the uniform kernel at L = 5 (oracle)
constexpr double kAlpha1 = 2.2853481074340383489;

AdhesionModel periodic_model(double L, int N, double alpha, double D = 1.0) {
  return AdhesionModel(NonlocalOperator(Grid(L, N), normalize(uniform_kernel()),
                                        SensingMode::periodic()),
                       {D, alpha});
}

double cos_amplitude(const Grid& g, const Field& u, int n) {
  double s = 0.0;
  for (int i = 0; i < g.cells(); ++i) s += u[i] * std::cos(2.0 * kPi * n * g.x(i) / g.length());
  return 2.0 * s / g.cells();
}

}  // namespace

TEST_CASE("constant state has zero right-hand side") {
  const AdhesionModel m = periodic_model(5.0, 32, 3.0);
  for (double v : m.rhs(constant_field(m.grid(), 1.3))) CHECK(std::abs(v) <= 1e-13);
  CHECK(steady_residual(m, constant_field(m.grid(), 1.3)) <= 1e-13);
}

TEST_CASE("pure diffusion decays at the discrete rate") {
  const AdhesionModel m = periodic_model(5.0, 32, 0.0);
  const Grid& g = m.grid();
  const double k = 2.0 * kPi / 5.0;
  const double rate = 2.0 * (1.0 - std::cos(k * g.dx())) / (g.dx() * g.dx());
  IntegrateOptions o;
  o.t_end = 0.5;
  o.rtol = o.atol = 1e-9;
  for (ImexScheme s : {ImexScheme::CrankNicolson, ImexScheme::Ars222}) {
    o.scheme = s;
    const Kymograph ky = integrate(m, cosine_field(g, 1.0, 1, 0.1), o);
    CHECK(cos_amplitude(g, ky.final_state, 1) ==
          doctest::Approx(0.1 * std::exp(-rate * 0.5)).epsilon(1e-6));
  }
}

TEST_CASE("small perturbations grow at k^2 (alpha/alpha_n - 1)") {
  const double k = 2.0 * kPi / 5.0;
  for (double ratio : {0.5, 1.3}) {
    CAPTURE(ratio);
    const AdhesionModel m = periodic_model(5.0, 64, ratio * kAlpha1);
    IntegrateOptions o;
    o.t_end = 1.0;
    o.rtol = o.atol = 1e-10;
    const Kymograph ky = integrate(m, cosine_field(m.grid(), 1.0, 1, 1e-6), o);
    const double measured = std::log(cos_amplitude(m.grid(), ky.final_state, 1) / 1e-6);
    CHECK(measured == doctest::Approx(k * k * (ratio - 1.0)).epsilon(2e-3));
  }
}

TEST_CASE("mass is conserved to rounding") {
  const AdhesionModel m = periodic_model(5.0, 32, 3.25);
  IntegrateOptions o;
  o.t_end = 5.0;
  const Field u0 = noise_field(m.grid(), 1.0, 0.1, 3);
  const Kymograph ky = integrate(m, u0, o);
  CHECK(std::abs(mass(m.grid(), ky.final_state) - mass(m.grid(), u0)) <= 1e-12);
  CHECK(ky.stats.max_mass_drift <= 1e-13);
  CHECK(ky.stats.min_value > 0.0);
}

TEST_CASE("output times are honoured") {
  const AdhesionModel m = periodic_model(5.0, 16, 1.0);
  IntegrateOptions o;
  o.t_end = 1.0;
  o.output_times = {0.0, 0.25, 0.5, 1.0};
  const Kymograph ky = integrate(m, noise_field(m.grid(), 1.0, 0.01, 0), o);
  REQUIRE(ky.times.size() == 4);
  CHECK(ky.times[1] == doctest::Approx(0.25));
  CHECK(ky.fields.size() == 4);
  CHECK(ky.stats.t_final == doctest::Approx(1.0));
}

TEST_CASE("observer can stop the run") {
  const AdhesionModel m = periodic_model(5.0, 16, 1.0);
  IntegrateOptions o;
  o.t_end = 10.0;
  o.observer = [](double t, const Field&) { return t < 0.5; };
  const Kymograph ky = integrate(m, noise_field(m.grid(), 1.0, 0.01, 0), o);
  CHECK(ky.stats.stopped_early);
  CHECK(ky.stats.t_final < 10.0);
}

TEST_CASE("run_to_steady relaxes below onset to the constant") {
  const AdhesionModel m = periodic_model(5.0, 32, 1.0);
  SteadyOptions so;
  so.ss_tol = 1e-9;
  const SteadyResult r = run_to_steady(m, cosine_field(m.grid(), 1.0, 1, 0.05), so);
  CHECK(r.residual < 1e-9);
  for (double v : r.u) CHECK(v == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("initial conditions") {
  const Grid g(5.0, 32);
  const Field n = noise_field(g, 2.0, 0.1, 11);
  CHECK(mean(n) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(n == noise_field(g, 2.0, 0.1, 11));
  CHECK(n != noise_field(g, 2.0, 0.1, 12));
  for (double v : n) CHECK(std::abs(v - 2.0) <= 0.2);
  const Field c = cosine_field(g, 1.0, 2, 0.3);
  CHECK(c[0] == doctest::Approx(1.0 + 0.3 * std::cos(2.0 * kPi * 2 * g.x(0) / 5.0)));
}

TEST_CASE("no-flux model conserves mass") {
  const AdhesionModel m(NonlocalOperator(Grid(5.0, 32), normalize(uniform_kernel()),
                                         SensingMode::noflux()),
                        {1.0, 2.0});
  IntegrateOptions o;
  o.t_end = 2.0;
  const Field u0 = noise_field(m.grid(), 1.0, 0.1, 5);
  const Kymograph ky = integrate(m, u0, o);
  CHECK(std::abs(mass(m.grid(), ky.final_state) - mass(m.grid(), u0)) <= 1e-12);
}
