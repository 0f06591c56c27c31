#include <doctest.h>

#include <cmath>

#include "adhesim/asymptotics.hpp"
#include "adhesim/error.hpp"

using namespace adhesim;

TEST_CASE("first-order no-flux profile, uniform kernel") {
  const KernelSpec k = normalize(uniform_kernel());
  CHECK(noflux_plateau(k, 5.0, 1.0) == doctest::Approx(0.05).epsilon(1e-13));
  CHECK(noflux_boundary_value(k, 5.0, 1.0) == doctest::Approx(-0.2).epsilon(1e-13));
  // oracle samples of u1
  const double xs[] = {0.0, 0.25, 0.5, 1.0, 2.5, 4.75};
  const double u1[] = {-0.2, -0.16875, -0.075, 0.05, 0.05, -0.16875};
  for (int i = 0; i < 6; ++i) CHECK(noflux_u1(k, 5.0, 1.0, xs[i]) == doctest::Approx(u1[i]).epsilon(1e-12));
}

TEST_CASE("plateau for the exponential kernel scales with ubar squared") {
  const KernelSpec k = normalize(exponential_kernel(0.25));
  CHECK(noflux_plateau(k, 5.0, 2.0) == doctest::Approx(0.092537055854490380824).epsilon(1e-11));
  CHECK(noflux_boundary_value(k, 5.0, 2.0) == doctest::Approx(-0.3701482234179615233).epsilon(1e-11));
}

TEST_CASE("expansion on a grid has zero mean correction") {
  const KernelSpec k = normalize(uniform_kernel());
  const Grid g(5.0, 64);
  const AsymptoticProfile p = noflux_expansion(k, 5.0, 1.0, 0.05, g);
  CHECK(std::abs(mean(p.u1)) <= 1e-4);
  CHECK(mean(p.u) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(p.warnings.empty());
  const AsymptoticProfile big = noflux_expansion(k, 5.0, 1.0, 2.0, g);
  CHECK_FALSE(big.warnings.empty());
}

TEST_CASE("invalid arguments") {
  const KernelSpec k = normalize(uniform_kernel());
  CHECK_THROWS_AS(noflux_u1(k, 5.0, 1.0, 6.0), Error);
  CHECK_THROWS_AS(noflux_expansion(k, 5.0, 1.0, 0.1, Grid(4.0, 16)), Error);
}
