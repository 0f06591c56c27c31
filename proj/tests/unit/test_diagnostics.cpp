#include <doctest.h>

#include <cmath>
#include <numbers>

#include "adhesim/diagnostics.hpp"
#include "adhesim/solver.hpp"

using namespace adhesim;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("peak counting") {
  const Grid g(5.0, 64);
  CHECK(count_peaks(constant_field(g, 1.0), true) == 0);
  CHECK(count_peaks(cosine_field(g, 1.0, 1, 0.1), true) == 1);
  CHECK(count_peaks(cosine_field(g, 1.0, 3, 0.1), true) == 3);
  // ripples below the threshold are ignored
  CHECK(count_peaks(cosine_field(g, 1.0, 4, 1e-6), true) == 0);
  // a monotone profile on a bounded domain has its peak at the wall
  Field ramp(static_cast<std::size_t>(g.cells()));
  for (int i = 0; i < g.cells(); ++i) ramp[i] = 1.0 + 0.01 * i;
  CHECK(count_peaks(ramp, false) == 1);
}

TEST_CASE("area function and delta1") {
  const Grid g(5.0, 40);
  const Field w0 = area_function(g, constant_field(g, 2.0), std::nan(""));
  for (double v : w0) CHECK(std::abs(v) <= 1e-13);
  // w of a cosine is a sine; delta1 of sin is (cos(kR) - 1) sin
  const double k = 2.0 * kPi / 5.0;
  Field w(static_cast<std::size_t>(g.cells()));
  for (int i = 0; i < g.cells(); ++i) w[i] = std::sin(k * g.x(i));
  const Field d = delta1(g, w);
  for (int i = 0; i < g.cells(); ++i)
    CHECK(d[i] == doctest::Approx((std::cos(k) - 1.0) * w[i]).epsilon(1e-12));
}

TEST_CASE("symmetry and alignment") {
  const Grid g(5.0, 40);
  const Field c = cosine_field(g, 1.0, 2, 0.2);
  const SymmetryError e = symmetry_error(g, c, 2);
  CHECK(e.shift <= 1e-14);
  CHECK(e.reflect <= 1e-14);
  Field shifted(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) shifted[i] = c[(i + 7) % c.size()];
  const Alignment a = align(c, shifted);
  CHECK(a.error <= 1e-15);
  CHECK(shifted[0] == c[static_cast<std::size_t>(a.shift) % c.size()]);
}

TEST_CASE("energy of a constant state") {
  const Grid g(5.0, 40);
  const KernelSpec k = normalize(uniform_kernel());
  // oracle: L (D ubar ln ubar - alpha ubar^2 c), c = 1/4
  CHECK(energy(g, constant_field(g, 1.0), k, 1.0, 1.0).entropy == doctest::Approx(-1.25).epsilon(1e-12));
  CHECK(energy(g, constant_field(g, 2.0), k, 1.0, 1.0).entropy ==
        doctest::Approx(1.9314718055994530942).epsilon(1e-12));
  Field bad = constant_field(g, 1.0);
  bad[3] = -1.0;
  CHECK_THROWS_AS(energy(g, bad, k, 1.0, 1.0), Error);
}

TEST_CASE("partial integrals") {
  const Grid g(5.0, 10);
  const Field u = constant_field(g, 3.0);
  CHECK(integral_up_to(g, u, 1.25) == doctest::Approx(3.75));
  CHECK(mass_per_half_tile(g, u, 1) == doctest::Approx(7.5));
  CHECK(mass_per_half_tile(g, u, 2) == doctest::Approx(3.75));
}

TEST_CASE("steady-state checks accept the constant and reject a cosine") {
  const AdhesionModel m(NonlocalOperator(Grid(5.0, 32), normalize(uniform_kernel()),
                                         SensingMode::periodic()),
                        {1.0, 1.0});
  CHECK(steady_state_checks(m, constant_field(m.grid(), 1.0)).all_pass());
  const DiagnosticsReport r = steady_state_checks(m, cosine_field(m.grid(), 1.0, 1, 0.1));
  CHECK_FALSE(r.all_pass());
  REQUIRE(r.find("residual") != nullptr);
  CHECK_FALSE(r.find("residual")->pass);
}
