#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "toroidsim/config.hpp"
#include "toroidsim/units.hpp"

#include <cmath>

using namespace tsim;

TEST_CASE("unit conversions are exact linear maps") {
    CHECK(to_human(two_pi * 1e6 * 40.0, "mhz_rate") == doctest::Approx(40.0).epsilon(1e-13));
    CHECK(to_si(136.0, "nm") == doctest::Approx(1.36e-7).epsilon(1e-13));

    // round trips to 1 part in 1e12
    for (const char* tag : {"mhz_rate", "nm", "us", "uk", "pw", "uw", "mk", "ns"}) {
        double x = 0.78;
        CHECK(to_human(to_si(x, tag), tag) == doctest::Approx(x).epsilon(1e-12));
    }
    CHECK_THROWS(to_si(1.0, "furlong"));
}

TEST_CASE("default config reproduces the apparatus") {
    PhysicsConfig cfg = default_config();
    // cavity rates: kappa_i 8, kappa_ex 13, h 10 MHz so that kappa/2pi = 21 MHz
    // and the taper sits at the generalized critical coupling
    CHECK(to_human(cfg.cavity.kappa_i, "mhz_rate") == doctest::Approx(8.0));
    CHECK(to_human(cfg.cavity.kappa_ex, "mhz_rate") == doctest::Approx(13.0));
    CHECK(to_human(cfg.cavity.h, "mhz_rate") == doctest::Approx(10.0));
    CHECK(to_human(cfg.cavity.kappa(), "mhz_rate") == doctest::Approx(21.0));
    CHECK(to_human(cfg.atom.gamma0, "mhz_rate") == doctest::Approx(2.6));
    CHECK(cfg.toroid.principal_diameter == doctest::Approx(24e-6));
    CHECK(cfg.toroid.minor_diameter == doctest::Approx(3e-6));
    CHECK(to_human(cfg.mode.g_max, "mhz_rate") == doctest::Approx(100.0));
    CHECK(cfg.mode.lambda_bar == doctest::Approx(136e-9));
    CHECK(cfg.mode.waist == doctest::Approx(590e-9));
    CHECK(cfg.cloud.arrival_speed == doctest::Approx(0.17));
    CHECK(cfg.probe.power_pre == doctest::Approx(4e-12));
    CHECK(cfg.probe.power_post == doctest::Approx(2e-12));
    CHECK(cfg.detection.threshold == 5);
    CHECK(cfg.detection.window == doctest::Approx(750e-9));
    CHECK(cfg.detection.clock_period == doctest::Approx(25e-9));
    CHECK(cfg.detection.resolution == doctest::Approx(2e-9));
}

TEST_CASE("validation rejects non-physical values with key paths") {
    CHECK_THROWS_WITH_AS(load_config(R"({"detection":{"efficiency":1.2}})"),
                         doctest::Contains("efficiency out of range"), ConfigError);
    CHECK_THROWS_AS(load_config(R"({"cavity":{"kappa_i_mhz":-1}})"), ConfigError);
    CHECK_THROWS_AS(load_config(R"({"detection":{"threshold":0}})"), ConfigError);
    CHECK_THROWS_AS(load_config(R"({"surface":{"d_min_nm":0}})"), ConfigError);
    CHECK_THROWS_AS(load_config(R"({"numerics":{"window_start_ns":900}})"), ConfigError);
    // malformed document and unknown keys
    CHECK_THROWS_AS(load_config("{nope"), ConfigError);
    CHECK_THROWS_AS(load_config(R"({"cavety":{}})"), ConfigError);
    CHECK_THROWS_AS(load_config(R"({"cavity":{"kapa_i_mhz":8}})"), ConfigError);
    // trigger window must sit on the clock grid
    CHECK_THROWS_AS(load_config(R"({"detection":{"window_ns":760}})"), ConfigError);
}

TEST_CASE("round trip serialize -> load preserves fields") {
    PhysicsConfig cfg = load_config(R"({"mode":{"g_max_mhz":123.456},
                                        "numerics":{"seed":987654321}})");
    PhysicsConfig back = load_config(serialize_config(cfg));
    CHECK(back.mode.g_max == cfg.mode.g_max);
    CHECK(back.numerics.seed == cfg.numerics.seed);
    CHECK(back.surface.c3_ground == cfg.surface.c3_ground);
    CHECK(back.cavity.kappa_ex == cfg.cavity.kappa_ex);
    CHECK(config_hash(back) == config_hash(cfg));
}

TEST_CASE("dotted-path overrides") {
    std::string doc = apply_overrides("{}", {"cavity.delta_ca_mhz=60", "fort.enabled=true",
                                             "mode.polarization=TM"});
    PhysicsConfig cfg = load_config(doc);
    CHECK(to_human(cfg.cavity.delta_ca, "mhz_rate") == doctest::Approx(60.0));
    CHECK(cfg.fort.enabled);
    CHECK(cfg.mode.polarization == "TM");
    CHECK_THROWS_AS(load_config(apply_overrides("{}", {"cavity.oops=1"})), ConfigError);
    CHECK_THROWS_AS((void)apply_overrides("{}", {"no_equals_sign"}), ConfigError);
}

TEST_CASE("azimuthal mode number is an integer") {
    PhysicsConfig cfg = default_config();
    double m_exact = cfg.mode.n_eff * (two_pi / cfg.atom.wavelength) * cfg.rim_radius();
    CHECK(cfg.mode.mode_number == static_cast<int>(std::llround(m_exact)));
    CHECK(cfg.mode.k_phi == doctest::Approx(2.0 * cfg.mode.mode_number /
                                            cfg.toroid.principal_diameter));
}
