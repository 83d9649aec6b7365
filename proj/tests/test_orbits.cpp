#include <doctest.h>

#include <set>

#include "flagsim/errors.hpp"
#include "flagsim/orbits.hpp"
#include "flagsim/rng.hpp"

using namespace flagsim;

TEST_CASE("rationals reduce and normalize signs") {
    CHECK(Rational(4, 6) == Rational(2, 3));
    CHECK(Rational(-4, -6) == Rational(2, 3));
    CHECK(Rational(4, -6) == Rational(-2, 3));
    CHECK(Rational(0, 5) == Rational(0));
    CHECK((Rational(1, 3) + Rational(1, 6)) == Rational(1, 2));
    CHECK((Rational(2, 3) * Rational(3, 4)) == Rational(1, 2));
    CHECK(Rational(7).str() == "7");
    CHECK(Rational(-2, 3).str() == "-2/3");
    CHECK_THROWS_AS(Rational(1, 0), ValidationError);
}

TEST_CASE("dihedral orbit of the fully symmetric configuration is a point") {
    const auto c = dihedral_canonicalize({1, 1, 1}, {1, 1, 1});
    CHECK(c.orbit_size == 1);
}

TEST_CASE("generic dihedral configurations have 2k images") {
    const auto c = dihedral_canonicalize({1, 2, 3}, {0.5, 0.5, 1.0});
    CHECK(c.orbit_size == 6);
}

TEST_CASE("the 1-gon orbit is always trivial") {
    const auto c = dihedral_canonicalize({3.7}, {1.2});
    CHECK(c.orbit_size == 1);
}

TEST_CASE("dihedral canonicalization is idempotent and enumerates orbits") {
    Rng rng(9);
    for (int k = 1; k <= 6; ++k) {
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<double> g(k), w(k);
            for (int i = 0; i < k; ++i) {
                g[i] = std::floor(rng.uniform(0, 3));
                w[i] = std::floor(rng.uniform(0, 3));
            }
            const auto c1 = dihedral_canonicalize(g, w);
            const auto c2 = dihedral_canonicalize(c1.gammas, c1.ws);
            CHECK(c1.gammas == c2.gammas);
            CHECK(c1.ws == c2.ws);
            CHECK(c1.orbit_size == c2.orbit_size);

            std::set<std::pair<std::vector<double>, std::vector<double>>> images;
            for (int rot = 0; rot < k; ++rot) {
                std::vector<double> gr(k), wr(k);
                for (int i = 0; i < k; ++i) {
                    gr[i] = g[(i + rot) % k];
                    wr[i] = w[(i + rot) % k];
                }
                images.insert({gr, wr});
                std::vector<double> gf(k), wf(k);
                for (int i = 0; i < k; ++i) {
                    gf[i] = gr[(k - i) % k];
                    wf[i] = wr[(k - 1 - i) % k];
                }
                images.insert({gf, wf});
            }
            CHECK(c1.orbit_size == static_cast<int>(images.size()));
        }
    }
    CHECK_THROWS_AS(dihedral_canonicalize({1, 2}, {1}), LengthMismatch);
}

TEST_CASE("hyperoctahedral orbits have 2^s elements") {
    CHECK(hyperoct_canonicalize({{1, 1}, {2, 3}}).orbit_size == 2);
    CHECK(hyperoct_canonicalize({{1, 1}, {2, 2}, {0.5, 0.5}}).orbit_size == 1);
    CHECK(hyperoct_canonicalize({{1, 2}, {3, 4}, {5, 6}}).orbit_size == 8);
    const auto c = hyperoct_canonicalize({{3, 1}, {2, 5}});
    CHECK(c.pairs[0] == std::pair<double, double>{1, 3});
    CHECK(c.pairs[1] == std::pair<double, double>{2, 5});
}

TEST_CASE("sl2_invariant is the subgroup generator") {
    CHECK(sl2_invariant({Rational(4, 3), Rational(2, 3)}) == Rational(2, 3));
    CHECK(sl2_invariant({Rational(2), Rational(3)}) == Rational(1));
    CHECK(sl2_invariant({Rational(0), Rational(5)}) == Rational(5));
    CHECK(sl2_invariant({Rational(0), Rational(0)}) == Rational(0));
    CHECK(sl2_invariant({Rational(-6, 5), Rational(9, 10)}) == Rational(3, 10));
}

TEST_CASE("sl2_invariant is exactly invariant under the generators") {
    Rng rng(17);
    for (int t = 0; t < 100; ++t) {
        RationalPair p;
        p.a = Rational(static_cast<std::int64_t>(rng.below(21)) - 10,
                       1 + static_cast<std::int64_t>(rng.below(7)));
        p.b = Rational(static_cast<std::int64_t>(rng.below(21)) - 10,
                       1 + static_cast<std::int64_t>(rng.below(7)));
        if (p.a.is_zero() && p.b.is_zero()) p.b = Rational(1, 2);
        const Rational inv = sl2_invariant(p);
        const RationalPair s{Rational(0) - p.b, p.a};         // S
        const RationalPair t2{p.a + p.b, p.b};                // T
        CHECK(sl2_invariant(s) == inv);
        CHECK(sl2_invariant(t2) == inv);
    }
}

TEST_CASE("sl2_equivalent finds witnesses and separates orbits") {
    const RationalPair a{Rational(2), Rational(3)};
    const RationalPair b{Rational(1), Rational(1)};
    const Sl2Witness wit = sl2_equivalent(a, b, 10);
    CHECK(wit.equivalent);
    REQUIRE(wit.matrix.has_value());
    const auto& m = *wit.matrix;
    CHECK(m[0] * m[3] - m[1] * m[2] == 1);
    CHECK(Rational(m[0]) * a.a + Rational(m[1]) * a.b == b.a);
    CHECK(Rational(m[2]) * a.a + Rational(m[3]) * a.b == b.b);

    const Sl2Witness neq = sl2_equivalent({Rational(2), Rational(4)}, a, 6);
    CHECK(!neq.equivalent);
    CHECK(!neq.matrix.has_value());

    const Sl2Witness self = sl2_equivalent(a, a, 5);
    CHECK(self.equivalent);
    REQUIRE(self.matrix.has_value());
    CHECK(*self.matrix == std::array<std::int64_t, 4>{1, 0, 0, 1});
}

TEST_CASE("same_orbit dispatches to the right group") {
    MassSignature a, b;
    a.levels = {{1, 2, 3}, {0.5, 0.6, 0.7}};
    b.levels = {{2, 3, 1}, {0.6, 0.7, 0.5}};  // cyclic rotation
    CHECK(same_orbit(a, b, SymmetryGroup::dihedral(3)));
    CHECK(!same_orbit(a, b, SymmetryGroup::trivial()));

    MassSignature c;
    c.levels = {{1, 2, 4}, {0.5, 0.6, 0.7}};  // different total level mass
    CHECK(!same_orbit(a, c, SymmetryGroup::dihedral(3)));

    MassSignature sa, sb;
    sa.levels = {{1, 2}, {3, 3}};
    sb.levels = {{2, 1}, {3, 3}};  // hemispheres swapped at level 0
    CHECK(same_orbit(sa, sb, SymmetryGroup::hyperoctahedral(2)));

    CHECK_THROWS_AS(same_orbit(a, b, SymmetryGroup::hyperoctahedral(2)), ShapeMismatch);
    CHECK_THROWS_AS(same_orbit(a, b, SymmetryGroup::sl2z_rational()), ShapeMismatch);

    RationalSignature ra, rb;
    ra.levels = {{Rational(2), Rational(3)}};
    rb.levels = {{Rational(1), Rational(1)}};
    CHECK(same_orbit(ra, rb, SymmetryGroup::sl2z_rational()));
    rb.levels = {{Rational(2), Rational(4)}};
    CHECK(!same_orbit(ra, rb, SymmetryGroup::sl2z_rational()));
}

TEST_CASE("generic configurations have full dihedral orbits") {
    Rng rng(123);
    for (int k = 2; k <= 6; ++k) {
        std::vector<double> g(k), w(k);
        for (int i = 0; i < k; ++i) {
            g[i] = rng.uniform();  // continuous draws are generic
            w[i] = rng.uniform();
        }
        CHECK(dihedral_canonicalize(g, w).orbit_size == 2 * k);
    }
}
