#include <doctest.h>

#include <cmath>

#include "flagsim/errors.hpp"
#include "flagsim/flag.hpp"
#include "flagsim/moser.hpp"
#include "flagsim/rng.hpp"
#include "flagsim/suites.hpp"

using namespace flagsim;

namespace {

std::vector<double> sine_density(int n, double amp, double phase = 0.0) {
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) d[i] = 1.0 + amp * std::sin(grid_theta(i, n) + phase);
    return d;
}

}  // namespace

TEST_CASE("arc_masses of the uniform circle at quarter marks") {
    const int n = 64;
    const std::vector<double> uniform(n, 1.0);
    const auto masses = arc_masses(uniform, {0, 16, 32, 48});
    REQUIRE(masses.size() == 4);
    for (double m : masses) CHECK(m == doctest::Approx(kTwoPi / 4).epsilon(1e-12));

    const auto whole = arc_masses(uniform, {});
    REQUIRE(whole.size() == 1);
    CHECK(whole[0] == doctest::Approx(kTwoPi).epsilon(1e-14));
}

TEST_CASE("arc_masses of 1 + 0.5 sin split at 0 and pi") {
    const int n = 256;
    const auto masses = arc_masses(sine_density(n, 0.5), {0, n / 2});
    const double pi = kTwoPi / 2;
    CHECK(masses[0] == doctest::Approx(pi + 1.0).epsilon(1e-3));
    CHECK(masses[1] == doctest::Approx(pi - 1.0).epsilon(1e-3));
}

TEST_CASE("moser map between equal densities is the identity") {
    const int n = 128;
    const auto mu = sine_density(n, 0.3);
    const CircleMap map = moser_map_circle(mu, mu, {0, 32, 80});
    for (int i = 0; i < n; ++i)
        CHECK(map.targets[i] == doctest::Approx(grid_theta(i, n)).epsilon(1e-12));
    for (int m : {0, 32, 80}) CHECK(map.targets[m] == grid_theta(m, n));
}

TEST_CASE("moser map rejects different arc masses") {
    const int n = 256;
    // (pi+1, pi-1) against (pi, pi): same total, different classes.
    const auto mu = sine_density(n, 0.5);
    const std::vector<double> nu(n, 1.0);
    CHECK_THROWS_AS(moser_map_circle(mu, nu, {0, n / 2}), MassMismatch);
}

TEST_CASE("moser map rejects sign mismatches and zeros") {
    const int n = 64;
    std::vector<double> mu(n, 1.0), nu(n, -1.0);
    CHECK_THROWS_AS(moser_map_circle(mu, nu, {}), SignMismatch);
    nu.assign(n, 1.0);
    nu[5] = 0.0;
    CHECK_THROWS_AS(moser_map_circle(mu, nu, {}), SignError);
}

TEST_CASE("pushforward transports 1 + 0.5 sin to the uniform density") {
    // Same total mass (the sine integrates to zero); the inverse-CDF map
    // carries one onto the other with O(1/n^2) max-norm error.
    auto push_error = [](int n) {
        const auto mu = sine_density(n, 0.5);
        const std::vector<double> nu(n, 1.0);
        const CircleMap map = moser_map_circle(mu, nu, {});
        const auto pushed = push_density(map, mu);
        double err = 0.0;
        for (int i = 0; i < n; ++i) err = std::max(err, std::abs(pushed[i] - 1.0));
        return err;
    };
    const double e128 = push_error(128);
    const double e256 = push_error(256);
    CHECK(e256 < 5e-4);
    CHECK(e128 / e256 == doctest::Approx(4.0).epsilon(0.4));
}

TEST_CASE("push_density through the identity map is the identity") {
    const int n = 128;
    const auto mu = sine_density(n, 0.4, 0.7);
    CircleMap identity;
    for (int i = 0; i < n; ++i) identity.targets.push_back(grid_theta(i, n));
    const auto out = push_density(identity, mu);
    for (int i = 0; i < n; ++i) CHECK(out[i] == doctest::Approx(mu[i]).epsilon(1e-12));
}

TEST_CASE("push_density through a rotation preserves the uniform density") {
    const int n = 128;
    const std::vector<double> mu(n, 2.5);
    CircleMap rot;
    for (int i = 0; i < n; ++i) rot.targets.push_back(grid_theta(i, n) + 0.37);
    const auto out = push_density(rot, mu);
    for (int i = 0; i < n; ++i) CHECK(out[i] == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("push_density rejects non-monotone maps") {
    const int n = 64;
    CircleMap bad;
    for (int i = 0; i < n; ++i) bad.targets.push_back(grid_theta(i, n));
    std::swap(bad.targets[10], bad.targets[11]);
    CHECK_THROWS_AS(push_density(bad, std::vector<double>(n, 1.0)), NonMonotone);
}

TEST_CASE("moser maps compose") {
    const int n = 256;
    const std::vector<int> marks = {0, 64, 160};
    const auto mu = suites::random_density(1, n, 0.3);
    auto nu = suites::random_density(2, n, 0.3);
    auto rho = suites::random_density(3, n, 0.3);
    nu = suites::match_arc_masses(std::move(nu), mu, marks);
    rho = suites::match_arc_masses(std::move(rho), mu, marks);

    const CircleMap g1 = moser_map_circle(mu, nu, marks);
    const CircleMap g2 = moser_map_circle(nu, rho, marks);
    const CircleMap g12 = moser_map_circle(mu, rho, marks);
    double err = 0.0;
    for (int i = 0; i < n; ++i)
        err = std::max(err, std::abs(g2.apply(g1.targets[i]) - g12.targets[i]));
    CHECK(err < 1e-3);
}

TEST_CASE("every returned map fixes the marked vertices exactly") {
    const int n = 256;
    const std::vector<int> marks = {0, 32, 96, 144};
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto mu = suites::random_density(Rng::stream(s, 1), n, 0.3);
        auto nu = suites::random_density(Rng::stream(s, 2), n, 0.3);
        nu = suites::match_arc_masses(std::move(nu), mu, marks);
        const CircleMap map = moser_map_circle(mu, nu, marks);
        for (int m : marks) CHECK(map.targets[m] == grid_theta(m, n));
    }
}

TEST_CASE("interpolation_path stays in the class") {
    const int n = 128;
    const std::vector<int> marks = {0, 40};
    const auto mu = suites::random_density(11, n, 0.3);
    auto nu = suites::random_density(12, n, 0.3);
    nu = suites::match_arc_masses(std::move(nu), mu, marks);

    const auto at0 = interpolation_path(mu, nu, marks, 0.0);
    const auto at1 = interpolation_path(mu, nu, marks, 1.0);
    CHECK(at0 == mu);
    CHECK(at1 == nu);

    const auto mid = interpolation_path(mu, nu, marks, 0.37);
    const auto masses0 = arc_masses(mu, marks);
    const auto masses_mid = arc_masses(mid, marks);
    for (std::size_t a = 0; a < masses0.size(); ++a)
        CHECK(masses_mid[a] == doctest::Approx(masses0[a]).epsilon(1e-12));
    for (double d : mid) CHECK(d > 0.0);

    std::vector<double> negated(n);
    for (int i = 0; i < n; ++i) negated[i] = -nu[i];
    CHECK_THROWS_AS(interpolation_path(mu, negated, marks, 0.5), SignMismatch);
}

TEST_CASE("orbit characterization: equal arc masses if and only if a map exists") {
    const int n = 256;
    const std::vector<int> marks = {0, 64, 160};
    int accepted = 0, rejected = 0;
    for (int c = 0; c < 20; ++c) {
        const auto mu = suites::random_density(Rng::stream(c, 5), n, 0.3);
        auto nu = suites::random_density(Rng::stream(c, 6), n, 0.3);
        nu = suites::match_arc_masses(std::move(nu), mu, marks);
        try {
            moser_map_circle(mu, nu, marks);
            ++accepted;
        } catch (const MassMismatch&) {
        }

        auto bad = suites::random_density(Rng::stream(c, 7), n, 0.3);
        auto targets = arc_masses(mu, marks);
        targets[c % targets.size()] *= 1.03;
        bad = rescale_arc_masses(std::move(bad), marks, targets);
        try {
            moser_map_circle(mu, bad, marks);
        } catch (const MassMismatch&) {
            ++rejected;
        }
    }
    CHECK(accepted == 20);
    CHECK(rejected == 20);
}

TEST_CASE("moser_vector_field solves the infinitesimal transport problem") {
    const int n = 512;
    const std::vector<int> marks = {0, n / 2};

    const std::vector<double> zero_gamma(n, 0.0);
    const std::vector<double> ones(n, 1.0);
    const auto zero_field = moser_vector_field(ones, zero_gamma, marks);
    for (double x : zero_field) CHECK(x == 0.0);

    // mu = 1: X = gamma itself; sin vanishes at both marks (set exactly, the
    // potential space is defined by exact zeros there).
    std::vector<double> gamma(n);
    for (int i = 0; i < n; ++i) gamma[i] = std::sin(grid_theta(i, n));
    gamma[0] = gamma[n / 2] = 0.0;
    const auto X = moser_vector_field(ones, gamma, marks);
    for (int i = 0; i < n; ++i) CHECK(X[i] == gamma[i]);

    // Discrete Lie derivative against the analytic derivative of gamma:
    // gamma = sin(2 theta) vanishes at 0 and pi, mu = 1 + 0.3 cos(theta).
    std::vector<double> mu(n), g2(n);
    for (int i = 0; i < n; ++i) {
        const double th = grid_theta(i, n);
        mu[i] = 1.0 + 0.3 * std::cos(th);
        g2[i] = std::sin(2.0 * th);
    }
    g2[0] = g2[n / 2] = 0.0;
    const auto X2 = moser_vector_field(mu, g2, marks);
    const double dth = grid_step(n);
    double resid = 0.0;
    for (int i = 0; i < n; ++i) {
        const double flux_prime =
            (X2[(i + 1) % n] * mu[(i + 1) % n] - X2[(i - 1 + n) % n] * mu[(i - 1 + n) % n]) /
            (2 * dth);
        const double gamma_prime = 2.0 * std::cos(2.0 * grid_theta(i, n));
        resid = std::max(resid, std::abs(flux_prime - gamma_prime));
    }
    CHECK(resid < 1e-3);

    std::vector<double> with_zero = mu;
    with_zero[7] = 0.0;
    CHECK_THROWS_AS(moser_vector_field(with_zero, g2, marks), SignError);
    std::vector<double> nonvanishing(n, 1.0);
    CHECK_THROWS_AS(moser_vector_field(ones, nonvanishing, marks), ConstraintViolation);
}

TEST_CASE("moser transport handles uniformly negative densities") {
    const int n = 128;
    const std::vector<int> marks = {0, 48};
    std::vector<double> mu(n), nu(n);
    for (int i = 0; i < n; ++i) {
        const double th = grid_theta(i, n);
        mu[i] = -(1.0 + 0.3 * std::sin(th));
        nu[i] = -(1.0 + 0.3 * std::sin(th));
    }
    const CircleMap map = moser_map_circle(mu, nu, marks);
    for (int m : marks) CHECK(map.targets[m] == grid_theta(m, n));
    const auto pushed = push_density(map, mu);
    for (int i = 0; i < n; ++i) CHECK(pushed[i] == doctest::Approx(mu[i]).epsilon(1e-10));
}
