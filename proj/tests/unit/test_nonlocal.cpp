#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "adhesim/nonlocal.hpp"

using namespace adhesim;

namespace {

constexpr double kPi = std::numbers::pi;

Field random_field(const Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(0.5, 1.5);
  Field u(static_cast<std::size_t>(g.cells()));
  for (double& v : u) v = d(rng);
  return u;
}

double dot(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TEST_CASE("periodic K of a cosine is -2 M_n sin") {
  // M_1 at L = 5, uniform kernel
  const double M1 = 0.2749334023443050935;
  const KernelSpec k = normalize(uniform_kernel());
  for (int N : {64, 128}) {
    const Grid g(5.0, N);
    const NonlocalOperator op(g, k, SensingMode::periodic());
    Field u(static_cast<std::size_t>(g.cells()));
    for (int i = 0; i < g.cells(); ++i) u[i] = std::cos(2.0 * kPi * g.x(i) / 5.0);
    const Field K = op.apply(u);
    double err = 0.0;
    for (int i = 0; i < g.cells(); ++i)
      err = std::max(err, std::abs(K[i] + 2.0 * M1 * std::sin(2.0 * kPi * g.x(i) / 5.0)));
    CAPTURE(N);
    CHECK(err <= 0.2 * g.dx() * g.dx());
  }
}

TEST_CASE("FFT and direct backends agree") {
  const Grid g(10.0, 64);
  const KernelSpec k = normalize(exponential_kernel(0.25));
  const NonlocalOperator direct(g, k, SensingMode::periodic(), AdhesionFunction::linear(),
                                NonlocalOperator::Backend::Direct);
  const NonlocalOperator fft(g, k, SensingMode::periodic(), AdhesionFunction::linear(),
                             NonlocalOperator::Backend::Fft);
  CHECK(fft.uses_fft());
  CHECK_FALSE(direct.uses_fft());
  const Field u = random_field(g, 7);
  const Field a = direct.apply(u), b = fft.apply(u);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("periodic operator is skew and mean free") {
  const Grid g(5.0, 32);
  const NonlocalOperator op(g, normalize(peak_kernel(0.25)), SensingMode::periodic());
  const Field u = random_field(g, 1), v = random_field(g, 2);
  const Field Ku = op.apply(u), Kv = op.apply(v);
  CHECK(std::abs(dot(v, Ku) + dot(u, Kv)) <= 1e-12 * std::abs(dot(v, Ku)) + 1e-13);
  double s = 0.0;
  for (double x : Ku) s += x;
  CHECK(std::abs(s) <= 1e-12);
  const Field K1 = op.apply(Field(u.size(), 3.0));
  for (double x : K1) CHECK(std::abs(x) <= 1e-13);
}

TEST_CASE("naive domain: K[1] is the clipped kernel mass") {
  const Grid g(5.0, 40);
  const KernelSpec k = normalize(uniform_kernel());
  const NonlocalOperator op(g, k, SensingMode::naive());
  const Field K = op.apply(Field(static_cast<std::size_t>(g.cells()), 1.0));
  for (int i = 0; i < g.cells(); ++i) {
    const double x = g.x(i);
    const double expect = omega_integral(k, 0.0, std::min(5.0 - x, 1.0)) -
                          omega_integral(k, 0.0, std::min(x, 1.0));
    CHECK(K[i] == doctest::Approx(expect).epsilon(1e-12));
  }
  const auto [f1, f2] = sensing_limits(SensingMode::naive(), 0.3, 1.0, 5.0);
  CHECK(f1 == doctest::Approx(-0.3));
  CHECK(f2 == doctest::Approx(1.0));
}

TEST_CASE("neutral mode vanishes at the reference density") {
  const Grid g(5.0, 32);
  const SensingMode m = SensingMode::make_neutral(SensingMode::naive(), 2.0);
  const NonlocalOperator op(g, normalize(uniform_kernel()), m);
  for (double x : op.apply(Field(static_cast<std::size_t>(g.cells()), 2.0)))
    CHECK(std::abs(x) <= 1e-13);
  CHECK(resolve_reference(SensingMode::make_neutral(SensingMode::naive()), 1.5).u_ref == 1.5);
}

TEST_CASE("automatic weighted-boundary beta zeroes K at the walls") {
  const Grid g(5.0, 32);
  const KernelSpec k = normalize(uniform_kernel());
  const Field u = random_field(g, 3);
  for (SensingMode base : {SensingMode::naive(), SensingMode::noflux()}) {
    CAPTURE(base.name());
    const auto [b0, bL] = weighted_boundary_noflux_beta(g, k, base, AdhesionFunction::linear(), u);
    const NonlocalOperator op(g, k, SensingMode::make_weighted(base, b0, bL));
    CHECK(std::abs(op.evaluate_at(u, 0.0)) <= 1e-12);
    CHECK(std::abs(op.evaluate_at(u, 5.0)) <= 1e-12);
  }
  // constant density on the naive base: beta equals the density
  const auto [b0, bL] = weighted_boundary_noflux_beta(g, k, SensingMode::naive(),
                                                      AdhesionFunction::linear(),
                                                      Field(static_cast<std::size_t>(g.cells()), 1.7));
  CHECK(b0 == doctest::Approx(1.7));
  CHECK(bL == doctest::Approx(1.7));
}

TEST_CASE("nonlinear adhesion function") {
  const AdhesionFunction h = AdhesionFunction::polynomial({0.0, 1.0, -0.25});
  CHECK(h.value(2.0) == doctest::Approx(1.0));
  CHECK(h.derivative(2.0) == doctest::Approx(0.0));
  CHECK_FALSE(h.is_linear());
  CHECK(AdhesionFunction::linear().is_linear());
  const Grid g(5.0, 16);
  const KernelSpec k = normalize(uniform_kernel());
  const Field u = random_field(g, 4);
  Field hu(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) hu[i] = h.value(u[i]);
  const Field a = NonlocalOperator(g, k, SensingMode::periodic(), h).apply(u);
  const Field b = NonlocalOperator(g, k, SensingMode::periodic()).apply(hu);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-13));
}

TEST_CASE("grid mismatch is reported") {
  const Grid g(5.0, 16);
  const NonlocalOperator op(g, normalize(uniform_kernel()), SensingMode::periodic());
  CHECK_THROWS_AS(op.apply(Field(3, 1.0)), Error);
  CHECK_THROWS_AS(Grid(5.3, 16), Error);
}
