#include <doctest.h>

#include <cmath>
#include <numbers>

#include "adhesim/error.hpp"
#include "adhesim/kernel.hpp"

using namespace adhesim;

namespace {

// reference values from tests/oracles/oracles.py
struct MomentOracle {
  const char* family;
  double L;
  double M1, M2, M3;
  double c;
};

constexpr MomentOracle kMoments[] = {
    {"uniform", 5.0, 0.2749334023443050935, 0.35989249599002037753, 0.23992833066001358502, 0.25},
    {"uniform", 3.0, 0.35809862195676450548, 0.17904931097838225274, 0.0, 0.25},
    {"exponential", 5.0, 0.13673717068048250957, 0.22890949796282970526, 0.26088887279800092314,
     0.11567131981811297603},
    {"exponential", 3.0, 0.20487860832572457407, 0.26057673765351710898, 0.22650917522514510336,
     0.11567131981811297603},
    {"peak", 5.0, 0.18729109894822289947, 0.32324073477450755312, 0.37905630649987705472,
     0.15653912537306953934},
    {"peak", 3.0, 0.28604892908163801307, 0.37953801960002149228, 0.28669625203330253699,
     0.15653912537306953934},
    {"twopoint", 5.0, 0.074987225319288188248, 0.10623070432421319208, 0.090573839041957061205,
     0.066823447337661482087},
    {"twopoint", 3.0, 0.10194669115449376518, 0.081221721075776857835, 0.08480372336090317016,
     0.066823447337661482087},
};

KernelSpec make(const std::string& family) {
  KernelSpec k;
  k.family = parse_kernel_family(family);
  return normalize(k);
}

double simpson(const KernelSpec& k, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double s = omega(k, a) + omega(k, b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * omega(k, a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("every family integrates to one half") {
  for (const char* f : {"uniform", "exponential", "peak", "twopoint"}) {
    CAPTURE(f);
    const KernelSpec k = make(f);
    CHECK(omega_integral(k, 0.0, k.R) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(std::abs(simpson(k, 0.0, k.R, 20000) - 0.5) <= 1e-10);
  }
  const KernelSpec t = normalize(tabulated_kernel({0.0, 0.5, 1.0}, {1.0, 3.0, 0.0}));
  CHECK(std::abs(simpson(t, 0.0, 0.5, 1000) + simpson(t, 0.5, 1.0, 1000) - 0.5) <= 1e-12);
}

TEST_CASE("pointwise values") {
  CHECK(omega(make("uniform"), 0.5) == doctest::Approx(0.5));
  CHECK(omega(make("exponential"), 0.5) == doctest::Approx(0.27572056477178320776).epsilon(1e-12));
  CHECK(omega(make("peak"), 0.5) == doctest::Approx(0.54152279360586289988).epsilon(1e-12));
  const KernelSpec u = make("uniform");
  CHECK(omega(u, 1.5) == 0.0);
  CHECK(omega_odd(u, -0.3) == -0.5);
  CHECK(omega_odd(u, 0.0) == 0.0);
  CHECK(omega_at_zero(u) == 0.5);
  CHECK(omega_sup(make("exponential")) == doctest::Approx(omega(make("exponential"), 0.0)));
}

TEST_CASE("Fourier moments match quadrature oracles") {
  for (const auto& o : kMoments) {
    CAPTURE(o.family);
    CAPTURE(o.L);
    const KernelSpec k = make(o.family);
    CHECK(std::abs(moment_Mn(k, 1, o.L) - o.M1) <= 1e-10);
    CHECK(std::abs(moment_Mn(k, 2, o.L) - o.M2) <= 1e-10);
    CHECK(std::abs(moment_Mn(k, 3, o.L) - o.M3) <= 1e-10);
    CHECK(std::abs(delta_Mn(k, 1, o.L) - (2.0 * o.M1 - o.M2)) <= 1e-10);
    CHECK(std::abs(first_moment_c1(k) - o.c) <= 1e-10);
    CHECK(std::abs(raw_moment(k, 1) - 2.0 * o.c) <= 1e-10);
  }
}

TEST_CASE("raw moments vanish for even order") {
  CHECK(raw_moment(make("peak"), 0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(raw_moment(make("peak"), 2) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("adhesion potential") {
  const KernelSpec u = make("uniform");
  CHECK(adhesion_potential(u, 0.0) == doctest::Approx(0.5));
  CHECK(adhesion_potential(u, 0.25) == doctest::Approx(0.375));
  CHECK(adhesion_potential(u, 2.0) == 0.0);
  const KernelSpec e = make("exponential");
  CHECK(adhesion_potential(e, 0.3) == doctest::Approx(omega_integral(e, 0.3, 1.0)));
}

TEST_CASE("odd integral is signed") {
  const KernelSpec u = make("uniform");
  CHECK(omega_odd_integral(u, -1.0, 1.0) == doctest::Approx(0.0));
  CHECK(omega_odd_integral(u, -0.5, 0.0) == doctest::Approx(-0.25));
  CHECK(omega_odd_integral(u, 0.2, 3.0) == doctest::Approx(0.4));
}

TEST_CASE("moment table") {
  const MomentTable t = moment_table(make("uniform"), 5.0, 4);
  REQUIRE(t.entries.size() == 4);
  CHECK(t.entries[0].n == 1);
  CHECK(t.entries[1].Mn == doctest::Approx(0.35989249599002037753).epsilon(1e-12));
}

TEST_CASE("invalid kernels are rejected") {
  CHECK_THROWS_AS(parse_kernel_family("gaussian"), Error);
  KernelSpec k = exponential_kernel(-1.0);
  CHECK_THROWS_AS(normalize(k), Error);
  try {
    normalize(tabulated_kernel({0.0, 1.0}, {0.0, 0.0}));
    FAIL("expected NonNormalizable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonNormalizable);
  }
}
