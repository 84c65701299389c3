#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "metamat/dispersion.hpp"
#include "metamat/error.hpp"
#include "metamat/monotone_cubic.hpp"

using namespace metamat;

namespace {

double inverse_quadratic(double c, double w) { return 1.0 / (1.0 + c * w * w); }

DispersionModel sampled_inverse_quadratic(double c, double lo, double hi, double step) {
    std::vector<double> w;
    std::vector<Complex> n;
    const auto count = static_cast<std::size_t>(std::llround((hi - lo) / step));
    for (std::size_t i = 0; i <= count; ++i) {
        const double x = lo + step * static_cast<double>(i);
        w.push_back(x);
        n.emplace_back(inverse_quadratic(c, x), 0.0);
    }
    return DispersionModel::tabulated(w, n);
}

}  // namespace

TEST_CASE("monotone cubic reproduces knots and preserves shape") {
    const std::vector<double> x{0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
    const std::vector<double> y{0.0, 0.0, 0.1, 3.0, 3.05, 3.05};
    const MonotoneCubic s(x, y);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(s(x[i]) == doctest::Approx(y[i]));
    double prev = s(0.0);
    for (int i = 1; i <= 500; ++i) {
        const double v = s(5.0 * i / 500.0);
        CHECK(v >= prev - 1e-14);
        CHECK(v <= 3.05 + 1e-14);
        prev = v;
    }
    // Linear data is reproduced with its exact slope.
    const MonotoneCubic lin({0.0, 1.0, 3.0, 4.0}, {1.0, 3.0, 7.0, 9.0});
    CHECK(lin(2.5) == doctest::Approx(6.0));
    CHECK(lin.derivative(0.3) == doctest::Approx(2.0));
    CHECK(lin.derivative(4.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(lin(4.5), Error);
    CHECK_THROWS_AS(MonotoneCubic({0.0, 0.0}, {1.0, 2.0}), Error);
}

TEST_CASE("refraction_derivative") {
    const auto ex = DispersionModel::inverse_quadratic(1.0);
    const RefractionDerivative d = refraction_derivative(ex, 1.0);
    CHECK(d.closed_form);
    CHECK(d.value == doctest::Approx(-0.5));

    const auto flat = DispersionModel::constant({1.5, 0.0}, 0.1, 10.0);
    CHECK(refraction_derivative(flat, 2.0).value == doctest::Approx(0.0));

    const auto table = sampled_inverse_quadratic(1.0, 0.0, 3.0, 0.01);
    const RefractionDerivative td = refraction_derivative(table, 1.0);
    CHECK_FALSE(td.closed_form);
    CHECK_FALSE(td.one_sided);
    CHECK(std::abs(td.value - (-0.5)) <= 1e-4);

    const RefractionDerivative edge = refraction_derivative(table, 3.0);
    CHECK(edge.one_sided);
    CHECK_THROWS_AS(refraction_derivative(table, 3.5), Error);
    CHECK_THROWS_AS(refraction_derivative(table, 1.0, DerivativeMethod::closed_form), Error);
}

TEST_CASE("finite differences agree with the closed form at interior points") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> logc(-2.0, 2.0);
    std::uniform_real_distribution<double> w(0.05, 20.0);
    for (int i = 0; i < 1000; ++i) {
        const auto model = DispersionModel::inverse_quadratic(std::pow(10.0, logc(rng)));
        const double omega = w(rng);
        const double exact = refraction_derivative(model, omega).value;
        const double fd =
            refraction_derivative(model, omega, DerivativeMethod::finite_difference).value;
        CHECK(std::abs(fd - exact) <= 1e-6 * std::abs(exact));
    }
}

TEST_CASE("negative_refraction_criterion") {
    CHECK(negative_refraction_criterion(DispersionModel::inverse_quadratic(2.0), 1.0).holds);
    CHECK_FALSE(negative_refraction_criterion(DispersionModel::inverse_quadratic(0.5), 1.0).holds);
    const auto c = negative_refraction_criterion(DispersionModel::constant({2.0, 0.0}, 0.5, 2.0), 1.0);
    CHECK(c.value == doctest::Approx(0.0));
    CHECK_FALSE(c.holds);
    // value = -2 c w^2 / (1 + c w^2)
    const auto v = negative_refraction_criterion(DispersionModel::inverse_quadratic(1.0), 2.0);
    CHECK(v.value == doctest::Approx(-1.6));
    CHECK_THROWS_AS(
        negative_refraction_criterion(DispersionModel::constant({-1.0, 0.0}, 0.5, 2.0), 1.0),
        Error);
}

TEST_CASE("criterion threshold is c omega^2 > 1 via the closed form") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double c = std::pow(10.0, -2.0 + 4.0 * u(rng));
        const double omega = std::pow(10.0, -2.0 + 4.0 * u(rng));
        const auto r = negative_refraction_criterion(DispersionModel::inverse_quadratic(c), omega);
        CHECK(r.holds == (c * omega * omega > 1.0));
    }
}

TEST_CASE("band_criterion") {
    const FrequencyGrid band{{1.0, 1.25, 1.5, 1.75, 2.0}};
    CHECK(band_criterion(DispersionModel::inverse_quadratic(1.5), band).all_hold);
    const BandCriterion weak = band_criterion(DispersionModel::inverse_quadratic(0.9), band);
    CHECK_FALSE(weak.all_hold);
    CHECK_FALSE(weak.table.front().holds);
    CHECK(band_criterion(DispersionModel::inverse_quadratic(2.0), FrequencyGrid{{1.0}}).all_hold);
    const auto table = DispersionModel::constant({1.0, 0.0}, 1.0, 1.5);
    CHECK_THROWS_AS(band_criterion(table, band), Error);
}

TEST_CASE("absorption_check") {
    const std::vector<Complex> real{{1.0, 0.0}, {2.0, 0.0}};
    for (const auto& a : absorption_check(real, 5.0)) {
        CHECK(a.ratio == 0.0);
        CHECK(a.pass);
    }
    const Complex n1(1.0, -0.01);
    const Complex n2(1.0, -0.05);
    const std::vector<Complex> lossy{n1 * n1, n2 * n2};
    const auto r = absorption_check(lossy, 5.0, 0.1);
    CHECK(r[0].n.real() > 0.0);
    CHECK(r[0].ratio == doctest::Approx(0.05));
    CHECK(r[0].pass);
    CHECK(r[1].ratio == doctest::Approx(0.25));
    CHECK_FALSE(r[1].pass);
    const std::vector<Complex> negative{{-1.0, 0.0}};
    CHECK_THROWS_WITH_AS(absorption_check(negative, 1.0), doctest::Contains("branch"), Error);
}

TEST_CASE("solve_dispersion") {
    const MediumConstants medium{1.0};
    const auto flat = DispersionModel::constant({1.0, 0.0}, 0.01, 10.0);
    const auto one = solve_dispersion(flat, 2.5, medium);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == doctest::Approx(2.5).epsilon(1e-9));

    // 0.4 w^2 - w + 0.4 = 0
    const double kc = 0.4;
    const double disc = std::sqrt(1.0 - 4.0 * kc * kc);
    const std::vector<double> expected{(1.0 - disc) / (2.0 * kc), (1.0 + disc) / (2.0 * kc)};
    const auto ex = DispersionModel::inverse_quadratic(1.0);
    const auto roots = solve_dispersion(ex, kc, medium);
    REQUIRE(roots.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(std::abs(roots[i] - expected[i]) <= 1e-8);
        CHECK(std::abs(roots[i] * ex.n_re(roots[i]) - kc) <= 1e-8 * kc);
    }
    CHECK(expected[0] == doctest::Approx(0.5));
    CHECK(expected[1] == doctest::Approx(2.0));

    CHECK(solve_dispersion(ex, 0.6, medium).empty());
    CHECK_THROWS_AS(solve_dispersion(ex, 0.0, medium), Error);

    // Same physics with c = 2: |k| c = 0.4 means |k| = 0.2.
    CHECK(solve_dispersion(ex, 0.2, MediumConstants{2.0}).size() == 2);
}

TEST_CASE("roots are certified across random models") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double c = std::pow(10.0, -1.0 + 2.0 * u(rng));
        const double kc = u(rng) * 0.6 / std::sqrt(c);
        if (kc <= 0.0) continue;
        const auto model = DispersionModel::inverse_quadratic(c);
        for (double w : solve_dispersion(model, kc, MediumConstants{1.0}))
            CHECK(std::abs(w * model.n_re(w) - kc) <= 1e-8 * kc);
    }
}

TEST_CASE("group_velocity") {
    const MediumConstants medium{3.0};
    const Vec3 k0{0.0, 0.6, 0.8};
    const auto flat = DispersionModel::constant({1.0, 0.0}, 0.1, 10.0);
    const VelocityResult nd = group_velocity(flat, 2.0, k0, medium);
    for (int a = 0; a < 3; ++a) {
        CHECK(nd.v_g[a] == doctest::Approx(3.0 * k0[a]));
        CHECK(nd.v_p[a] == doctest::Approx(3.0 * k0[a]));
    }

    const auto ex = DispersionModel::inverse_quadratic(1.0);
    const VelocityResult upper = group_velocity(ex, 2.0, {1.0, 0.0, 0.0}, MediumConstants{1.0});
    CHECK(upper.group_denominator == doctest::Approx(-0.12));
    CHECK(upper.v_g[0] == doctest::Approx(-1.0 / 0.12));
    CHECK(upper.v_p[0] == doctest::Approx(5.0));

    const VelocityResult lower = group_velocity(ex, 0.5, {1.0, 0.0, 0.0}, MediumConstants{1.0});
    CHECK(lower.group_denominator == doctest::Approx(0.48));
    CHECK(lower.v_g[0] > 0.0);

    // n + w n' = (1 - c w^2) / (1 + c w^2)^2 vanishes at w = 1.
    CHECK_THROWS_WITH_AS(group_velocity(ex, 1.0, {1.0, 0.0, 0.0}, MediumConstants{1.0}),
                         doctest::Contains("singularity"), Error);
    CHECK_THROWS_AS(group_velocity(ex, 2.0, {1.0, 1.0, 0.0}, MediumConstants{1.0}), Error);
}

TEST_CASE("sign of d omega / d|k| matches the criterion") {
    // Oracle: central difference of g(w) = w Re n(w), whose sign is that of
    // d|k|/d omega and hence of d omega/d|k|.
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    while (checked < 1000) {
        const double c = std::pow(10.0, -1.5 + 3.0 * u(rng));
        const double omega = std::pow(10.0, -1.5 + 3.0 * u(rng));
        const bool tabulated = (checked % 2) == 1;
        const DispersionModel model =
            tabulated ? sampled_inverse_quadratic(c, 0.0, 1.1 * omega + 0.1, (1.1 * omega + 0.1) / 400)
                      : DispersionModel::inverse_quadratic(c);
        const double x = c * omega * omega;
        if (std::abs(1.0 - x) < 0.05) continue;  // away from the singularity
        const double h = 1e-5 * omega;
        if (!model.contains(omega + h) || !model.contains(omega - h)) continue;
        const double dg = ((omega + h) * model.n_re(omega + h) - (omega - h) * model.n_re(omega - h)) /
                          (2.0 * h);
        const bool decreasing = dg < 0.0;
        CHECK(negative_refraction_criterion(model, omega).holds == decreasing);
        ++checked;
    }
}

TEST_CASE("dispersion_report rows") {
    std::vector<double> w{0.5, 1.0, 1.5, 2.0};
    std::vector<Complex> n{{1.0, -0.01}, {1.0, -0.01}, {1.0, -0.01}, {1.0, -0.01}};
    const auto model = DispersionModel::tabulated(w, n);
    const auto rows = dispersion_report(model, FrequencyGrid{{1.0, 1.5}}, 5.0);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].criterion_value == doctest::Approx(0.0));
    CHECK(rows[0].absorption_ratio == doctest::Approx(0.05));
    const auto j = to_json(rows[0]);
    for (const char* key : {"omega", "n_re", "n_im", "dn_domega", "criterion_value",
                            "criterion_holds", "absorption_ratio"})
        CHECK(j.contains(key));
}
