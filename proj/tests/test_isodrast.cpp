#include <doctest.h>

#include <cmath>

#include "flagsim/errors.hpp"
#include "flagsim/isodrast.hpp"
#include "flagsim/moment.hpp"
#include "flagsim/rng.hpp"
#include "flagsim/suites.hpp"
#include "helpers.hpp"

using namespace flagsim;
using namespace flagsim::testing;

TEST_CASE("generator maps speeds to reparametrization tangents") {
    const int n = 128;
    const WeightedFlag flag = circle_flag(n, {0}, {1.0});

    const std::vector<double> zero(n, 0.0);
    const FlagTangent t0 = generator(flag, zero);
    for (int i = 0; i < n; ++i) {
        CHECK(norm(t0.u[i]) == 0.0);
        CHECK(t0.lambda[i] == 0.0);
    }

    // Z = sin(theta) vanishes at the single mark theta = 0; with uniform
    // density the potential is sin itself.
    std::vector<double> Z(n);
    for (int i = 0; i < n; ++i) Z[i] = std::sin(grid_theta(i, n));
    Z[0] = 0.0;
    const FlagTangent t = generator(flag, Z);
    for (int i = 0; i < n; ++i) CHECK(t.lambda[i] == doctest::Approx(Z[i]).epsilon(1e-12));

    std::vector<double> bad(n, 1.0);
    CHECK_THROWS_AS(generator(flag, bad), ConstraintViolation);
}

TEST_CASE("generator tangents lie in the isodrastic distribution") {
    const WeightedFlag flag = suites::make_loop_flag(3, 256, {0.0, 0.25, 0.625}, 0.15, 0.3);
    const std::vector<double> Z = suites::random_speed_field(5, flag.pl().loop);
    const FlagTangent t = generator(flag, Z);
    CHECK(std::abs(circulation(flag, t.u)) < 1e-3);
}

TEST_CASE("ham_generator carries the Hamiltonian field with no potentials") {
    const int n = 256;
    const WeightedFlag flag = circle_flag(n, {0, n / 2}, {1.0, 1.0});

    TestFunction fc;
    fc.poly.push_back({{0, 0}, 3.0});
    const FlagTangent tc = ham_generator(flag, fc);
    for (int i = 0; i < n; ++i) CHECK(norm(tc.u[i]) == 0.0);

    TestFunction rot;
    rot.poly.push_back({{2, 0}, 0.5});
    rot.poly.push_back({{0, 2}, 0.5});
    const FlagTangent tr = ham_generator(flag, rot);
    for (int i = 0; i < n; ++i) {
        const Vec& v = flag.pl().loop.vertices[i];
        CHECK(tr.u[i][0] == doctest::Approx(v[1]).epsilon(1e-14));
        CHECK(tr.u[i][1] == doctest::Approx(-v[0]).epsilon(1e-14));
        CHECK(tr.lambda[i] == 0.0);
    }

    // phi^* i_{X_f} omega = d(f o phi): centered differences of f along the
    // loop against omega(X_f, phi') pointwise.
    const TestFunction f = suites::random_hamiltonian(21, 2, 0.5);
    const FlagTangent tf = ham_generator(flag, f);
    const double dth = grid_step(n);
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec phi = (1.0 / (2.0 * dth)) *
                        (flag.pl().loop.vertices[(i + 1) % n] -
                         flag.pl().loop.vertices[(i - 1 + n) % n]);
        const double lhs = (f.value(flag.pl().loop.vertices[(i + 1) % n]) -
                            f.value(flag.pl().loop.vertices[(i - 1 + n) % n])) /
                           (2.0 * dth);
        err = std::max(err, std::abs(lhs - omega_eval(tf.u[i], phi)));
    }
    CHECK(err < 1e-3);
}

TEST_CASE("omega_leafwise is exactly antisymmetric") {
    const WeightedFlag flag = suites::make_loop_flag(1, 128, {0.0, 0.25}, 0.15, 0.3);
    const FlagTangent a = random_tangent(flag, 10);
    const FlagTangent b = random_tangent(flag, 11);
    CHECK(omega_leafwise(flag, a, a) == 0.0);
    CHECK(omega_leafwise(flag, b, b) == 0.0);
    CHECK(omega_leafwise(flag, a, b) == -omega_leafwise(flag, b, a));
}

TEST_CASE("omega_leafwise is bilinear") {
    const WeightedFlag flag = suites::make_loop_flag(2, 128, {0.0, 0.25}, 0.15, 0.3);
    const FlagTangent a = random_tangent(flag, 20);
    const FlagTangent b = random_tangent(flag, 21);
    const FlagTangent c = random_tangent(flag, 22);
    const double alpha = 0.6, beta = -1.7;

    FlagTangent combo;
    const int n = a.size();
    combo.u.resize(n);
    combo.lambda.resize(n);
    for (int i = 0; i < n; ++i) {
        combo.u[i] = alpha * a.u[i] + beta * b.u[i];
        combo.lambda[i] = alpha * a.lambda[i] + beta * b.lambda[i];
    }
    const double lhs = omega_leafwise(flag, combo, c);
    const double rhs =
        alpha * omega_leafwise(flag, a, c) + beta * omega_leafwise(flag, b, c);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("omega_leafwise quadrature on radial fields") {
    const int n = 256;
    const WeightedFlag flag = circle_flag(n, {}, {});

    FlagTangent radial, rotated;
    radial.u.resize(n);
    radial.lambda.assign(n, 0.0);
    rotated.u.resize(n);
    rotated.lambda.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double th = grid_theta(i, n);
        radial.u[i] = {std::cos(th), std::sin(th)};
        rotated.u[i] = {-std::sin(th), std::cos(th)};
    }
    CHECK(omega_leafwise(flag, radial, radial) == 0.0);
    // omega(radial, rotated) = 1 identically, weighted by the unit density.
    CHECK(omega_leafwise(flag, radial, rotated) == doctest::Approx(kTwoPi).epsilon(1e-9));
}

TEST_CASE("pure-potential pairings reduce to the edge pullback sum") {
    const int n = 128;
    const WeightedFlag flag = circle_flag(n, {}, {});
    Rng rng(33);
    FlagTangent tu, tg;
    tu.u.resize(n);
    tu.lambda.assign(n, 0.0);
    tg.u.assign(n, Vec{0.0, 0.0});
    tg.lambda.resize(n);
    for (int i = 0; i < n; ++i) {
        tu.u[i] = {rng.normal(), rng.normal()};
        tg.lambda[i] = rng.normal();
    }
    double expected = 0.0;
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        const Vec edge = flag.pl().loop.vertices[j] - flag.pl().loop.vertices[i];
        const Vec um = 0.5 * (tu.u[i] + tu.u[j]);
        expected -= omega_eval(um, edge) * 0.5 * (tg.lambda[i] + tg.lambda[j]);
    }
    CHECK(omega_leafwise(flag, tu, tg) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("moment identity holds at finite-difference accuracy") {
    const WeightedFlag flag = suites::make_loop_flag(4, 256, {0.0, 0.25, 0.625}, 0.15, 0.3);

    FlagTangent zero;
    zero.u.assign(256, Vec{0.0, 0.0});
    zero.lambda.assign(256, 0.0);
    TestFunction fc;
    fc.poly.push_back({{0, 0}, 2.0});
    CHECK(moment_identity_residual(flag, fc, zero, 1e-5) == 0.0);

    // Constant f: both sides vanish up to the cancellation noise of the
    // finite difference, |pair| * eps / h.
    const FlagTangent tan = random_tangent(flag, 44);
    CHECK(moment_identity_residual(flag, fc, tan, 1e-5) < 1e-8);

    for (std::uint64_t s = 0; s < 5; ++s) {
        const TestFunction f = suites::random_hamiltonian(Rng::stream(s, 2), 2, 0.5);
        const FlagTangent t = random_tangent(flag, Rng::stream(s, 3));
        CHECK(moment_identity_residual(flag, f, t, 1e-5) < 1e-3);
    }
}

TEST_CASE("kernel residual vanishes at second order for generators") {
    double res[2];
    for (int half = 0; half < 2; ++half) {
        const int nv = half == 0 ? 256 : 512;
        const WeightedFlag flag = suites::make_loop_flag(8, nv, {0.0, 0.25, 0.625}, 0.15, 0.3);
        const std::vector<double> Z = suites::random_speed_field(9, flag.pl().loop);
        res[half] = kernel_residual(flag, Z, 6, 123);
    }
    CHECK(res[0] / res[1] == doctest::Approx(4.0).epsilon(0.35));

    const WeightedFlag flag = suites::make_loop_flag(8, 256, {0.0, 0.25, 0.625}, 0.15, 0.3);
    const std::vector<double> zero(256, 0.0);
    CHECK(kernel_residual(flag, zero, 4, 1) == 0.0);
}

TEST_CASE("tangents outside the distribution pair against the form") {
    // Speeds that do not vanish at the marks move the points; the point term
    // of the form has nothing to cancel it.
    const WeightedFlag flag = suites::make_loop_flag(8, 256, {0.0, 0.25, 0.625}, 0.15, 0.3);
    const DiscreteLoop& loop = flag.pl().loop;
    const int n = loop.size();
    const double dth = grid_step(n);
    FlagTangent bad;
    bad.u.resize(n);
    bad.lambda.resize(n);
    for (int i = 0; i < n; ++i) {
        const double z = 1.0 + 0.2 * std::sin(grid_theta(i, n));
        const Vec phi = (1.0 / (2.0 * dth)) *
                        (loop.vertices[(i + 1) % n] - loop.vertices[(i - 1 + n) % n]);
        bad.u[i] = z * phi;
        bad.lambda[i] = z * loop.density[i];
    }
    double worst = 0.0;
    for (int t = 0; t < 6; ++t) {
        const FlagTangent w = random_tangent(flag, 500 + t);
        worst = std::max(worst, std::abs(omega_leafwise(flag, bad, w)) /
                                    (tangent_norm(bad) * tangent_norm(w)));
    }
    CHECK(worst > 1e-3);
}

TEST_CASE("random_tangent is deterministic and satisfies the constraints") {
    const WeightedFlag flag = suites::make_loop_flag(6, 256, {0.0, 0.25, 0.625}, 0.15, 0.3);
    const FlagTangent a = random_tangent(flag, 77);
    const FlagTangent b = random_tangent(flag, 77);
    CHECK(a.u == b.u);
    CHECK(a.lambda == b.lambda);

    for (int m : flag.pl().loop.marked) CHECK(a.lambda[m] == 0.0);
    CHECK(std::abs(circulation(flag, a.u)) < 1e-10);
}

TEST_CASE("omega_leafwise is invariant under reparametrization") {
    // Transport the flag and both tangents through the analytic circle map
    // g(theta) = theta + 0.2 sin(2 theta), which fixes the marks at 0 and pi.
    auto build = [](int n, bool reparam) {
        WeightedFlag raw;
        raw.dimension = 2;
        PointsInLoop lv;
        FlagTangent t1, t2;
        for (int i = 0; i < n; ++i) {
            const double th0 = grid_theta(i, n);
            const double th = reparam ? th0 + 0.2 * std::sin(2.0 * th0) : th0;
            const double jac = reparam ? 1.0 + 0.4 * std::cos(2.0 * th0) : 1.0;
            lv.loop.vertices.push_back({std::cos(th), std::sin(th)});
            lv.loop.density.push_back((1.0 + 0.3 * std::cos(th)) * jac);
            t1.u.push_back({std::cos(2.0 * th), std::sin(th)});
            t1.lambda.push_back(std::sin(th));
            t2.u.push_back({std::sin(3.0 * th), std::cos(th)});
            t2.lambda.push_back(std::sin(2.0 * th));
        }
        lv.loop.marked = {0, n / 2};
        lv.points.positions = {lv.loop.vertices[0], lv.loop.vertices[n / 2]};
        lv.points.weights = {1.0, 2.0};
        raw.levels = std::move(lv);
        return std::make_tuple(build_flag(raw), t1, t2);
    };

    auto value = [&](int n, bool reparam) {
        auto [flag, t1, t2] = build(n, reparam);
        return omega_leafwise(flag, t1, t2);
    };
    // For these analytic fields the periodic quadratures are spectrally
    // accurate, so the transported value agrees to roundoff, well inside the
    // O(1/n^2) invariance bound.
    CHECK(std::abs(value(256, true) - value(256, false)) < 1e-12);
    CHECK(std::abs(value(512, true) - value(512, false)) < 1e-12);
}

TEST_CASE("pairing against the Hamiltonian is conserved along its flow") {
    const WeightedFlag flag = suites::make_loop_flag(12, 512, {0.0, 0.25, 0.625}, 0.05, 0.3);
    const TestFunction f = suites::random_hamiltonian(12, 2, 0.1);
    const double before = pair(flag, f);
    const FlowResult res = flow_flag(flag, f, 1.0, 1e-3, FlowScheme::rk4);
    const double after = pair(res.flag, f);
    CHECK(std::abs(after - before) / std::max(1.0, std::abs(before)) < 1e-6);
}
