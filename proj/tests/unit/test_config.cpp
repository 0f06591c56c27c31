#include <doctest.h>

#include "adhesim/config.hpp"
#include "adhesim/error.hpp"

using namespace adhesim;

namespace {

ErrorKind kind_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::IoError;
}

}  // namespace

TEST_CASE("defaults and overrides") {
  const RunConfig c = parse_config_text(
      "# comment\n"
      "kernel.family = exponential\n"
      "kernel.xi = 0.3\n"
      "grid.L = 10\n"
      "grid.N = 32\n"
      "sim.alpha = 2.5   # trailing comment\n"
      "ic.kind = constant+cos\n"
      "ic.mode_n = 2\n"
      "sim.scheme = ars222\n");
  CHECK(c.kernel.family == KernelFamily::Exponential);
  CHECK(c.kernel.normalized());
  CHECK(c.kernel.xi == 0.3);
  CHECK(c.L == 10.0);
  CHECK(c.alpha == 2.5);
  CHECK(c.ic == IcKind::Cosine);
  CHECK(c.scheme == ImexScheme::Ars222);
  CHECK(c.steady_scheme == ImexScheme::Ars222);
  CHECK(make_grid(c).cells() == 320);
}

TEST_CASE("boundary modes") {
  const RunConfig c = parse_config_text("bc.mode = neutral\nbc.base = noflux\nbc.uref = 1.5\n");
  const SensingMode m = sensing_mode(c);
  CHECK(m.domain == Domain::NoFlux);
  CHECK(m.neutral);
  CHECK(m.u_ref == 1.5);
  const RunConfig w = parse_config_text("bc.mode = weighted\nbc.base = naive\n");
  CHECK(sensing_mode(w).weighted);
  CHECK(w.beta_auto);
}

TEST_CASE("polynomial adhesion") {
  const RunConfig c = parse_config_text("h.kind = poly\nh.coeffs = 0, 1, -0.5\n");
  CHECK_FALSE(adhesion_function(c).is_linear());
  CHECK(adhesion_function(c).value(2.0) == doctest::Approx(0.0));
}

TEST_CASE("configuration errors") {
  CHECK(kind_of("grid.L 5\n") == ErrorKind::ParseError);
  CHECK(kind_of("grid.Q = 5\n") == ErrorKind::UnknownKey);
  CHECK(kind_of("bc.mode = sideways\n") == ErrorKind::UnknownValue);
  CHECK(kind_of("grid.L = five\n") == ErrorKind::ParseError);
  CHECK(kind_of("grid.L = 5.3\ngrid.N = 16\n") == ErrorKind::RangeError);
  CHECK(kind_of("sim.D = -1\n") == ErrorKind::RangeError);
  CHECK(is_config_error(ErrorKind::UnknownKey));
  CHECK_FALSE(is_config_error(ErrorKind::NotConverged));
  try {
    parse_config_file("/nonexistent/run.cfg");
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IoError);
    CHECK(is_config_error(e.kind()));
  }
}

TEST_CASE("resolved text round-trips") {
  const RunConfig a = parse_config_text("kernel.family = peak\nsim.alpha = 4\nic.seed = 9\n");
  const RunConfig b = parse_config_text(resolved_text(a));
  CHECK(resolved_text(a) == resolved_text(b));
  CHECK(b.seed == 9);
}

TEST_CASE("same seed, same initial field") {
  const RunConfig c = parse_config_text("ic.kind = noise\nic.seed = 4\ngrid.N = 16\n");
  CHECK(initial_field(c, make_grid(c)) == initial_field(c, make_grid(c)));
}
