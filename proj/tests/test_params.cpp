#include <doctest.h>

#include <cmath>
#include <random>

#include "csl/config.hpp"
#include "csl/errors.hpp"
#include "csl/params.hpp"

using namespace csl;

TEST_CASE("lambda scales with the squared mass ratio") {
  CHECK(lambda_from_mass(3.0, 1.0, 2.0) == doctest::Approx(18.0));
  CHECK(lambda_from_mass(1.0, 1.0, 1e-16) == doctest::Approx(1e-16));
  CHECK_THROWS_AS(lambda_from_mass(-1.0, 1.0, 1.0), DomainError);
}

TEST_CASE("diffusion coefficient is lambda alpha hbar^2 / 4") {
  CHECK(diffusion_coefficient(2.0, 3.0, 0.5) == doctest::Approx(2.0 * 3.0 * 0.25 / 4.0));
  const PhysParams p = grw_preset(1e8 * constants::nucleon_mass_si);
  CHECK(p.lambda() == doctest::Approx(1e-16 * 1e16).epsilon(1e-12));
  CHECK(p.diffusion() == doctest::Approx(p.lambda() * 1e14 * constants::hbar_si * constants::hbar_si / 4.0));
}

TEST_CASE("unit conversion round trips for random dimensions") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_int_distribution<int> e(-3, 3);
  for (int i = 0; i < 200; ++i) {
    const auto us = UnitSystem::natural(std::pow(10.0, u(rng) - 34.0), std::pow(10.0, u(rng) - 20.0),
                                        std::pow(10.0, u(rng) - 8.0));
    const Dimension d{e(rng), e(rng), e(rng)};
    const double v = std::pow(10.0, 3.0 * u(rng));
    CHECK(us.from_natural(us.to_natural(v, d), d) == doctest::Approx(v).epsilon(1e-13));
  }
}

TEST_CASE("natural units set hbar, mass and length to one") {
  const double hbar = constants::hbar_si;
  const double m = 1e8 * constants::amu_si;
  const auto us = UnitSystem::natural(hbar, m, 78.5e-9);
  CHECK(us.to_natural(hbar, dim::action) == doctest::Approx(1.0));
  CHECK(us.to_natural(m, dim::mass) == doctest::Approx(1.0));
  CHECK(us.to_natural(78.5e-9, dim::length) == doctest::Approx(1.0));
  const Dynamics nat = to_natural(Dynamics{hbar, m, 1e-40}, us);
  const Dynamics back = from_natural(nat, us);
  CHECK(back.D == doctest::Approx(1e-40));
  CHECK(nat.hbar == doctest::Approx(1.0));
}

TEST_CASE("Dynamics accepts D = 0 and rejects negative values") {
  CHECK_NOTHROW(Dynamics::natural(0.0).validate());
  CHECK_THROWS_AS(Dynamics::natural(-1.0).validate(), DomainError);
  CHECK_THROWS_AS((Dynamics{0.0, 1.0, 0.0}).validate(), DomainError);
}

TEST_CASE("key=value parsing") {
  const auto c = KeyValueConfig::parse_text("# comment\n sigma = 2.5\nD=0, 0.1 ,1e-3\nflag = yes\n\nn = 12\n");
  CHECK(c.get_double("sigma") == 2.5);
  CHECK(c.get_list("D") == std::vector<double>{0.0, 0.1, 1e-3});
  CHECK(c.get_bool("flag", false));
  CHECK(c.get_int("n", 0) == 12);
  CHECK(c.get_double("missing", 7.0) == 7.0);
  CHECK_THROWS_AS(c.get_double("missing"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse_text("novalue\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse_text("x = abc\n").get_double("x"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse_text("x = 1.5\n").get_int("x", 0), ConfigError);
}

TEST_CASE("JSON parsing and overrides") {
  auto c = KeyValueConfig::parse_json(R"({"sigma": 1.5, "D": [0, 0.01], "renormalize": true, "preset": "grw"})");
  CHECK(c.get_double("sigma") == 1.5);
  CHECK(c.get_list("D").size() == 2);
  CHECK(c.get_bool("renormalize", false));
  CHECK(c.get_string("preset", "") == "grw");
  c.apply_override("sigma=3");
  CHECK(c.get_double("sigma") == 3.0);
  CHECK_THROWS_AS(c.apply_override("sigma"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse_json("[1, 2]"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse_json("{bad"), ConfigError);
}

TEST_CASE("unknown keys are reported with the valid ones") {
  const auto c = KeyValueConfig::parse_text("sigma = 1\nsigmaa = 2\n");
  try {
    c.require_known({"sigma", "mu"}, "twoslit");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("sigmaa") != std::string::npos);
    CHECK(msg.find("mu") != std::string::npos);
  }
}

TEST_CASE("physical parameters need exactly one mass key") {
  CHECK_THROWS_AS(physparams_from_config(KeyValueConfig::parse_text("preset = grw\n")), ConfigError);
  CHECK_THROWS_AS(physparams_from_config(KeyValueConfig::parse_text("mass_amu = 1\nmass_m0 = 1\n")), ConfigError);
  CHECK_THROWS_AS(physparams_from_config(KeyValueConfig::parse_text("mass_amu = 1\npreset = csl\n")), ConfigError);
  const auto p = physparams_from_config(KeyValueConfig::parse_text("mass_m0 = 1e8\nalpha = 1e12\n"));
  CHECK(p.mass == doctest::Approx(1e8 * constants::nucleon_mass_si));
  CHECK(p.alpha == 1e12);
  CHECK(p.lambda0 == 1e-16);
}
