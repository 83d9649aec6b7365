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

namespace {

TestFunction constant(double c) {
    TestFunction f;
    f.poly.push_back({{0, 0}, c});
    return f;
}

TestFunction coordinate(int axis, int dim = 2) {
    TestFunction f;
    PolyTerm t;
    t.exponents.assign(dim, 0);
    t.exponents[axis] = 1;
    t.coeff = 1.0;
    f.poly.push_back(t);
    return f;
}

}  // namespace

TEST_CASE("pair with the unit test function is the total mass") {
    const WeightedFlag flag = circle_flag(128, {0, 32, 64}, {1.0, 2.0, 3.0});
    const double total = pair(flag, constant(1.0));
    CHECK(total == doctest::Approx(6.0 + kTwoPi).epsilon(1e-12));
}

TEST_CASE("pair of an odd function over a symmetric flag vanishes") {
    const WeightedFlag flag = circle_flag(128, {0, 64}, {1.0, 1.0});
    CHECK(std::abs(pair(flag, coordinate(0))) < 1e-12);
}

TEST_CASE("loop quadrature of x^2 over the unit circle") {
    // The integral of cos^2 over the circle is pi; equispaced trapezoid sums
    // of trigonometric polynomials are exact.
    WeightedFlag raw;
    raw.dimension = 2;
    PointsInLoop lv;
    lv.loop = circle_loop(256);
    raw.levels = std::move(lv);
    TestFunction f;
    f.poly.push_back({{2, 0}, 1.0});
    CHECK(pair(build_flag(raw), f) == doctest::Approx(kTwoPi / 2.0).epsilon(1e-6));
}

TEST_CASE("a far-away bump pairs to nothing") {
    const WeightedFlag flag = circle_flag(64, {0}, {1.0});
    TestFunction f;
    f.bumps.push_back({{100.0, 0.0}, 1.0, 1.0});
    CHECK(std::abs(pair(flag, f)) < 1e-30);
}

TEST_CASE("pair is linear in the test function") {
    const WeightedFlag flag = circle_flag(64, {0, 21}, {1.5, -0.5});
    const TestFunction f = suites::random_hamiltonian(5, 2, 1.0);
    const TestFunction g = suites::random_hamiltonian(6, 2, 1.0);
    const double alpha = 0.7, beta = -1.3;

    TestFunction combo;
    for (PolyTerm t : f.poly) {
        t.coeff *= alpha;
        combo.poly.push_back(t);
    }
    for (PolyTerm t : g.poly) {
        t.coeff *= beta;
        combo.poly.push_back(t);
    }
    for (GaussianBump b : f.bumps) {
        b.amp *= alpha;
        combo.bumps.push_back(b);
    }
    for (GaussianBump b : g.bumps) {
        b.amp *= beta;
        combo.bumps.push_back(b);
    }
    CHECK(pair(flag, combo) ==
          doctest::Approx(alpha * pair(flag, f) + beta * pair(flag, g)).epsilon(1e-12));
}

TEST_CASE("pair_directional along the zero tangent vanishes") {
    const WeightedFlag flag = circle_flag(64, {0, 16}, {1.0, 1.0});
    FlagTangent zero;
    zero.u.assign(64, Vec{0.0, 0.0});
    zero.lambda.assign(64, 0.0);
    CHECK(pair_directional(flag, zero, coordinate(0), 1e-5) == 0.0);
}

TEST_CASE("mass-preserving perturbations leave the total mass flat") {
    const int n = 256;
    const WeightedFlag flag = circle_flag(n, {0, n / 4}, {1.0, 2.0});
    const FlagTangent tan = random_tangent(flag, 42);
    // d/dh of <J, 1> along any potential tangent is zero up to roundoff: the
    // centered difference of lambda telescopes around the circle.
    CHECK(std::abs(pair_directional(flag, tan, constant(1.0), 1e-5)) < 1e-9);
}

TEST_CASE("rigid translation differentiates to the total mass") {
    const int n = 256;
    const WeightedFlag flag = circle_flag(n, {0, n / 4}, {1.0, 2.0});
    FlagTangent tan;
    tan.u.assign(n, Vec{1.0, 0.0});
    tan.lambda.assign(n, 0.0);
    const double total = 3.0 + kTwoPi;
    CHECK(pair_directional(flag, tan, coordinate(0), 1e-5) ==
          doctest::Approx(total).epsilon(1e-9));
}

TEST_CASE("pair is equivariant along the exactly known flows") {
    // Rotation: f composed with the clockwise flow map is the bump at the
    // backwards-rotated center.
    const WeightedFlag flag = circle_flag(256, {0, 64}, {1.0, 2.0});
    TestFunction ham;
    ham.poly.push_back({{2, 0}, 0.5});
    ham.poly.push_back({{0, 2}, 0.5});
    const double T = 0.8;
    const FlowResult moved = flow_flag(flag, ham, T, 1e-3, FlowScheme::rk4);

    TestFunction bump;
    bump.bumps.push_back({{0.9, 0.2}, 0.8, 1.0});
    TestFunction composed = bump;
    // Phi_T(x) rotates clockwise by T, so the pulled-back center rotates the
    // same way: c' = Phi_T^{-1} applied through |Phi_T x - c| = |x - c'| with
    // c' = R(+T) c for R counterclockwise... the center follows the inverse
    // map, which is the counterclockwise rotation.
    const double cx = 0.9, cy = 0.2;
    composed.bumps[0].center = {cx * std::cos(T) - cy * std::sin(T),
                                cx * std::sin(T) + cy * std::cos(T)};
    CHECK(pair(moved.flag, bump) == doctest::Approx(pair(flag, composed)).epsilon(1e-6));

    // Translation: f = x^2 composed with the shift by (1,0) is x^2 + 2x + 1.
    TestFunction fy;
    fy.poly.push_back({{0, 1}, 1.0});
    const FlowResult shifted = flow_flag(flag, fy, 1.0, 1e-3, FlowScheme::rk4);
    TestFunction x2;
    x2.poly.push_back({{2, 0}, 1.0});
    TestFunction x2_shift;
    x2_shift.poly.push_back({{2, 0}, 1.0});
    x2_shift.poly.push_back({{1, 0}, 2.0});
    x2_shift.poly.push_back({{0, 0}, 1.0});
    CHECK(pair(shifted.flag, x2) == doctest::Approx(pair(flag, x2_shift)).epsilon(1e-6));
}

TEST_CASE("separate returns nothing for identical flags") {
    const WeightedFlag flag = circle_flag(64, {0, 21, 42}, {1.0, 2.0, 3.0});
    CHECK(!separate(flag, flag, 1000).has_value());
}

TEST_CASE("separate distinguishes a changed point weight") {
    const WeightedFlag a = circle_flag(64, {0, 21, 42}, {1.0, 2.0, 3.0});
    WeightedFlag b = a;
    b.pl().points.weights[0] = 2.0;
    const auto wit = separate(a, b, 2000);
    REQUIRE(wit.has_value());
    CHECK(wit->gap > 0.5);
    CHECK(std::abs(std::abs(pair(a, wit->bump) - pair(b, wit->bump)) - wit->gap) < 1e-12);
}

TEST_CASE("separate distinguishes densities differing on one arc") {
    const WeightedFlag a = circle_flag(128, {0, 64}, {1.0, 1.0});
    WeightedFlag b = a;
    for (int i = 10; i < 30; ++i) b.pl().loop.density[i] *= 1.02;
    const auto wit = separate(a, b, 2000);
    REQUIRE(wit.has_value());
    CHECK(wit->gap > 1e-6);
}

TEST_CASE("separate requires matching dimensions") {
    const WeightedFlag a = circle_flag(64, {0}, {1.0});
    WeightedFlag raw;
    raw.dimension = 4;
    PointsInLoop lv;
    for (int i = 0; i < 64; ++i) {
        const double th = grid_theta(i, 64);
        lv.loop.vertices.push_back({std::cos(th), std::sin(th), 0.0, 0.0});
        lv.loop.density.push_back(1.0);
    }
    raw.levels = std::move(lv);
    const WeightedFlag b = build_flag(raw);
    CHECK_THROWS_AS(separate(a, b, 100), DimensionMismatch);
}

TEST_CASE("pair and flow on a torus flag") {
    WeightedFlag raw;
    raw.dimension = 4;
    LoopsInTorus lv;
    lv.torus = product_torus(16, 16, 1.0, 0.5);
    lv.torus.marked_columns = {0, 8};
    lv.loops.columns = {0, 8};
    lv.loops.densities = {std::vector<double>(16, 1.0), std::vector<double>(16, 0.5)};
    raw.levels = std::move(lv);
    const WeightedFlag flag = build_flag(raw);

    TestFunction one;
    one.poly.push_back({{0, 0, 0, 0}, 1.0});
    const MassSignature sig = component_masses(flag);
    double expected = 0.0;
    for (const auto& level : sig.levels)
        for (double m : level) expected += m;
    CHECK(pair(flag, one) == doctest::Approx(expected).epsilon(1e-12));

    // Translation in the first plane: X_f = (1, 0, 0, 0) for f = y_1.
    TestFunction fy;
    fy.poly.push_back({{0, 1, 0, 0}, 1.0});
    const auto before = meridian_action_pair(flag.lt().torus);
    const FlowResult res = flow_flag(flag, fy, 1.0, 1e-2, FlowScheme::rk4);
    const auto after = meridian_action_pair(res.flag.lt().torus);
    CHECK(std::abs(after.first - before.first) < 1e-9);
    CHECK(std::abs(after.second - before.second) < 1e-9);
    CHECK(component_masses(res.flag).levels == sig.levels);
    CHECK(res.flag.lt().torus.at(0, 0)[0] ==
          doctest::Approx(flag.lt().torus.at(0, 0)[0] + 1.0).epsilon(1e-12));
}
