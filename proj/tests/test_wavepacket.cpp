#include <doctest.h>

#include <cmath>

#include "metamat/error.hpp"
#include "metamat/wavepacket.hpp"

using namespace metamat;

TEST_CASE("nondispersive packet moves at c") {
    const auto flat = DispersionModel::constant({1.0, 0.0}, 0.1, 10.0);
    WavePacketSpec spec;
    spec.center_k = 1.0;
    spec.half_width = 0.02;
    const WavePacketResult r =
        simulate_wavepacket(flat, spec, MediumConstants{1.0}, 300.0, 2000.0);
    CHECK(r.phase_velocity == doctest::Approx(1.0).epsilon(0.01));
    CHECK(r.envelope_velocity == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("inverse-quadratic branches") {
    const auto model = DispersionModel::inverse_quadratic(1.0);
    const MediumConstants medium{1.0};
    WavePacketSpec spec;
    spec.center_k = 0.4;
    spec.half_width = 0.02 * spec.center_k;

    SUBCASE("upper branch: envelope opposes phase") {
        WavePacketOptions opt;
        opt.omega_bracket = {1.2, 5.0};
        const WavePacketResult r = simulate_wavepacket(model, spec, medium, 100.0, 6000.0, opt);
        CHECK(r.center_omega == doctest::Approx(2.0));
        CHECK(r.envelope_velocity * r.phase_velocity < 0.0);
        CHECK(r.envelope_velocity == doctest::Approx(-1.0 / 0.12).epsilon(0.02));
        CHECK(r.analytic_group_velocity == doctest::Approx(-1.0 / 0.12));
    }
    SUBCASE("lower branch: same direction") {
        WavePacketOptions opt;
        opt.omega_bracket = {0.05, 0.9};
        const WavePacketResult r = simulate_wavepacket(model, spec, medium, 100.0, 6000.0, opt);
        CHECK(r.center_omega == doctest::Approx(0.5));
        CHECK(r.envelope_velocity > 0.0);
        CHECK(r.phase_velocity > 0.0);
        CHECK(r.envelope_velocity == doctest::Approx(1.0 / 0.48).epsilon(0.02));
    }
    SUBCASE("two branches without a bracket") {
        CHECK_THROWS_WITH_AS(simulate_wavepacket(model, spec, medium, 10.0, 6000.0),
                             doctest::Contains("single-valued"), Error);
    }
}

TEST_CASE("packet leaving the line is reported with a suggested extent") {
    const auto flat = DispersionModel::constant({1.0, 0.0}, 0.1, 10.0);
    WavePacketSpec spec;
    spec.center_k = 1.0;
    spec.half_width = 0.02;
    CHECK_THROWS_WITH_AS(simulate_wavepacket(flat, spec, MediumConstants{1.0}, 2000.0, 2000.0),
                         doctest::Contains("suggested line extent"), Error);
}

TEST_CASE("wave packet spec validation") {
    WavePacketSpec spec;
    spec.center_k = 1.0;
    spec.half_width = 2.0;
    CHECK_THROWS_AS(spec.validate(), Error);
    spec.half_width = 0.1;
    spec.k_samples = 8;
    CHECK_THROWS_AS(spec.validate(), Error);
}
