#include <doctest.h>

#include <random>

#include "bess/droop.hpp"
#include "util.hpp"

using namespace bess;

namespace {
const BaseQuantities kBase{720e3, 700.0, 300.0, 50.0};
const DroopConfig kCfg{};  // alpha -8 MW/Hz, beta -8.39 kVar/V, db 10 mHz / 1 V
}

TEST_CASE("dead-band zeroes the output") {
    const Setpoint s = initial_setpoint({0.0, 50.000, 1.0}, kCfg, kBase);
    CHECK(s.p == 0.0);
    CHECK(s.q == 0.0);
    // just inside the band
    const Setpoint s2 = initial_setpoint({0.0, 50.009, 1.0}, kCfg, kBase);
    CHECK(s2.p == 0.0);
}

TEST_CASE("scenario-1 frequency dip commands full discharge") {
    // 90 mHz under-frequency at 8 MW/Hz is exactly the 720 kW base
    const Setpoint s = initial_setpoint({0.0, 49.910, 1.0}, kCfg, kBase);
    CHECK(s.p == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(s.q == 0.0);
}

TEST_CASE("voltage sag commands reactive injection") {
    // 294 V on a 300 V base, 6 V below nominal
    const Setpoint s = initial_setpoint({0.0, 50.0, 294.0 / 300.0}, kCfg, kBase);
    CHECK(s.q == doctest::Approx(50.34e3 / 720e3).epsilon(1e-9));  // +0.0699 pu
    CHECK(s.p == 0.0);
}

TEST_CASE("no saturation is applied") {
    const Setpoint s = initial_setpoint({0.0, 49.5, 1.0}, kCfg, kBase);
    CHECK(s.p == doctest::Approx(8e6 * 0.5 / 720e3));  // 5.56 pu, way past rating
}

TEST_CASE("odd symmetry and linearity outside the dead-band") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> df(0.011, 0.5);
    for (int i = 0; i < 500; ++i) {
        const double d = df(rng);
        const Setpoint up = initial_setpoint({0.0, 50.0 + d, 1.0}, kCfg, kBase);
        const Setpoint dn = initial_setpoint({0.0, 50.0 - d, 1.0}, kCfg, kBase);
        CHECK(up.p == -dn.p);
        // linear in the deviation: doubling d doubles the output
        const Setpoint up2 = initial_setpoint({0.0, 50.0 + 2.0 * d, 1.0}, kCfg, kBase);
        CHECK(up2.p == doctest::Approx(2.0 * up.p).epsilon(1e-12));
    }
}

TEST_CASE("voltage dead-band symmetric") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> dv(1.5, 30.0);  // volts beyond the 1 V band
    for (int i = 0; i < 200; ++i) {
        const double d = dv(rng);
        const Setpoint up = initial_setpoint({0.0, 50.0, 1.0 + d / 300.0}, kCfg, kBase);
        const Setpoint dn = initial_setpoint({0.0, 50.0, 1.0 - d / 300.0}, kCfg, kBase);
        CHECK(up.q == doctest::Approx(-dn.q).epsilon(1e-12));
    }
}

TEST_CASE("droop config validation") {
    DroopConfig bad = kCfg;
    bad.db_f_hz = -0.1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = kCfg;
    bad.p_max_pu = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
