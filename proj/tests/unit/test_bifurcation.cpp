#include <doctest.h>

#include <cmath>
#include <numbers>

#include "adhesim/bifurcation.hpp"
#include "adhesim/diagnostics.hpp"

using namespace adhesim;

namespace {

constexpr double kPi = std::numbers::pi;

struct BifOracle {
  double L;
  int n;
  double alpha_n, alpha3, projected, b;
};

// uniform kernel, ubar = 1 (tests/oracles/oracles.py)
constexpr BifOracle kBif[] = {
    {3.0, 1, 2.9243272299524025537, 4.1679898652860833525, 2.0839949326430416762,
     2.8505632492803639612},
    {3.0, 2, 11.697308919809610215, 266.75135137830933456, 133.37567568915466728,
     45.609011988485823379},
    {5.0, 1, 2.2853481074340383489, 4.3184682185626043901, -1.3344800692039495441,
     3.779265140846598727},
    {5.0, 2, 3.4917012036582256363, 5.8831318238704781364, 4.7595536256592967903,
     3.3697796464982576348},
    {10.0, 1, 2.0671167822053992467, 11.562195901576843443, -9.3540129766680333127,
     11.186785382528005424},
};

KernelSpec uni() { return normalize(uniform_kernel()); }

}  // namespace

TEST_CASE("bifurcation points and pitchfork coefficients") {
  for (const auto& o : kBif) {
    CAPTURE(o.L);
    CAPTURE(o.n);
    CHECK(bifurcation_alpha(uni(), o.L, 1.0, 1.0, o.n) == doctest::Approx(o.alpha_n).epsilon(1e-12));
    const BifurcationType t = bif_type(uni(), o.L, 1.0, o.n);
    CHECK(t.alpha_3n == doctest::Approx(o.alpha3).epsilon(1e-11));
    CHECK(t.b_2n1 == doctest::Approx(o.b).epsilon(1e-11));
    CHECK(t.criticality == Criticality::Super);
    CHECK(alpha3_projected(uni(), o.L, 1.0, o.n) == doctest::Approx(o.projected).epsilon(1e-11));
  }
}

TEST_CASE("alpha_n scales with ubar and h'") {
  const double a = bifurcation_alpha(uni(), 5.0, 1.0, 1.0, 1);
  CHECK(bifurcation_alpha(uni(), 5.0, 2.0, 1.0, 1) == doctest::Approx(a / 2.0));
  CHECK(bifurcation_alpha(uni(), 5.0, 1.0, 4.0, 1) == doctest::Approx(a / 4.0));
}

TEST_CASE("degenerate modes") {
  // M_3 = 0 at L = 3
  CHECK_THROWS_AS(bifurcation_alpha(uni(), 3.0, 1.0, 1.0, 3), Error);
  const auto recs = bif_points(uni(), 3.0, 1.0, 1.0, 3);
  REQUIRE(recs.size() == 3);
  CHECK(recs[2].criticality == Criticality::Degenerate);
  CHECK(std::isnan(recs[2].alpha_n));
  CHECK(recs[0].alpha_n == doctest::Approx(kBif[0].alpha_n));
}

TEST_CASE("linearised spectrum") {
  const auto l5 = linearized_spectrum(uni(), 5.0, 1, 3);
  CHECK(l5[0] == 0.0);
  CHECK(l5[1] == doctest::Approx(-2.1823132522863910227).epsilon(1e-11));
  CHECK(l5[2] == doctest::Approx(-10.077996773157877918).epsilon(1e-11));
  const auto l10 = linearized_spectrum(uni(), 10.0, 2, 3);
  CHECK(l10[0] == doctest::Approx(0.041678474413703859788).epsilon(1e-10));
  CHECK(branch_stability(uni(), 10.0, 1.0, 2).unstable_modes >= 1);
}

TEST_CASE("local branch satisfies the equation to third order") {
  const double r1 = local_branch_residual(uni(), 3.0, 1.0, 1, 0.02);
  const double r2 = local_branch_residual(uni(), 3.0, 1.0, 1, 0.01);
  CHECK(r1 / r2 >= 7.0);
}

TEST_CASE("Newton continuation follows the projected cubic coefficient") {
  // supercritical at L = 3: alpha - alpha_1 ~ s^2 * projected, with the
  // first-mode amplitude s * alpha_1
  const Grid g(3.0, 64);
  AdhesionModel model(NonlocalOperator(g, uni(), SensingMode::periodic()), {1.0, 0.0});
  const double a1 = kBif[0].alpha_n, a3 = kBif[0].projected;
  const double s = 0.05;
  const LocalBranchPoint start = local_branch(uni(), g, 1.0, 1, s);
  model.set_alpha(start.alpha);
  const NewtonResult r = newton_steady(model, 1.0, start.u);
  CHECK(r.residual <= 1e-9);
  double c = 0.0;
  for (int i = 0; i < g.cells(); ++i) c += r.u[i] * std::cos(2.0 * kPi * g.x(i) / 3.0);
  const double amp = std::abs(2.0 * c / g.cells()) / a1;
  const double a_disc = start.alpha - amp * amp * a3;
  // the discrete onset differs from the continuum one by O(dx^2)
  CHECK(a_disc == doctest::Approx(a1).epsilon(2e-3));
  CHECK(amp == doctest::Approx(s).epsilon(0.05));
}

TEST_CASE("Newton reports non-convergence") {
  const Grid g(3.0, 16);
  AdhesionModel model(NonlocalOperator(g, uni(), SensingMode::periodic()), {1.0, 2.0});
  NewtonOptions o;
  o.max_iter = 1;
  CHECK_THROWS_AS(newton_steady(model, 1.0, cosine_field(g, 1.0, 3, 0.9), o), Error);
}

TEST_CASE("continuation from the local branch") {
  const Grid g(3.0, 32);
  AdhesionModel model(NonlocalOperator(g, uni(), SensingMode::periodic()), {1.0, 0.0});
  const LocalBranchPoint start = local_branch(uni(), g, 1.0, 1, 0.05);
  std::vector<double> alphas;
  for (int i = 0; i < 6; ++i) alphas.push_back(start.alpha + 0.05 * i);
  const BranchResult br = continue_branch(model, 1.0, start.u, alphas);
  CHECK(br.stop_reason.empty());
  REQUIRE(br.rows.size() == 6);
  for (std::size_t i = 1; i < br.rows.size(); ++i)
    CHECK(br.rows[i].l2_amplitude > br.rows[i - 1].l2_amplitude);
  CHECK(br.rows.back().peaks == 1);
}
