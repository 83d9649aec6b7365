#include "flagsim/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>
#include <stdexcept>

#include "flagsim/errors.hpp"

namespace flagsim {

namespace {

using i64 = std::int64_t;
using i128 = __int128;

i64 checked_i64(i128 v, const char* what) {
    if (v > static_cast<i128>(INT64_MAX) || v < static_cast<i128>(INT64_MIN))
        throw std::overflow_error(what);
    return static_cast<i64>(v);
}

i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        const i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

Rational make_rational(i128 num, i128 den) {
    if (den == 0) throw ValidationError("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const i128 g = num == 0 ? den : gcd128(num, den);
    num /= g;
    den /= g;
    Rational r;
    r.num = checked_i64(num, "rational numerator overflow");
    r.den = checked_i64(den, "rational denominator overflow");
    return r;
}

}  // namespace

Rational::Rational(i64 n, i64 d) { *this = make_rational(n, d); }

std::string Rational::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

Rational operator+(const Rational& a, const Rational& b) {
    return make_rational(static_cast<i128>(a.num) * b.den + static_cast<i128>(b.num) * a.den,
                         static_cast<i128>(a.den) * b.den);
}

Rational operator-(const Rational& a, const Rational& b) {
    return make_rational(static_cast<i128>(a.num) * b.den - static_cast<i128>(b.num) * a.den,
                         static_cast<i128>(a.den) * b.den);
}

Rational operator*(const Rational& a, const Rational& b) {
    return make_rational(static_cast<i128>(a.num) * b.num, static_cast<i128>(a.den) * b.den);
}

Rational rational_abs(const Rational& a) { return a.num < 0 ? Rational(-a.num, a.den) : a; }

DihedralCanonical dihedral_canonicalize(const std::vector<double>& gammas,
                                        const std::vector<double>& ws) {
    const int k = static_cast<int>(gammas.size());
    if (static_cast<int>(ws.size()) != k || k < 1)
        throw LengthMismatch("dihedral_canonicalize: vertex and edge vectors of equal length >= 1");

    // All 2k images: rotations, then reflections of each rotation. A
    // reflection sends vertex i to -i and edge [i, i+1] to [-i-1, -i].
    auto image = [&](int rot, bool refl) {
        std::pair<std::vector<double>, std::vector<double>> img;
        img.first.resize(k);
        img.second.resize(k);
        for (int i = 0; i < k; ++i) {
            const int src = (i + rot) % k;
            img.first[i] = gammas[src];
            img.second[i] = ws[src];
        }
        if (refl) {
            const auto g = img.first;
            const auto w = img.second;
            for (int i = 0; i < k; ++i) {
                img.first[i] = g[(k - i) % k];
                img.second[i] = w[(k - 1 - i) % k];
            }
        }
        return img;
    };

    const auto original = image(0, false);
    auto best = original;
    int stabilizer = 0;
    for (int refl = 0; refl < 2; ++refl) {
        for (int rot = 0; rot < k; ++rot) {
            const auto img = image(rot, refl != 0);
            if (img < best) best = img;
            if (img == original) ++stabilizer;
        }
    }
    return {best.first, best.second, 2 * k / stabilizer};
}

HyperoctCanonical hyperoct_canonicalize(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.empty()) throw LengthMismatch("hyperoct_canonicalize: empty pair list");
    HyperoctCanonical out;
    int s = 0;
    for (auto [a, b] : pairs) {
        if (a > b) std::swap(a, b);
        if (a != b) ++s;
        out.pairs.emplace_back(a, b);
    }
    if (s > 62) throw std::overflow_error("hyperoct orbit size overflows");
    out.orbit_size = static_cast<std::int64_t>(1) << s;
    return out;
}

Rational sl2_invariant(const RationalPair& p) {
    if (p.a.is_zero() && p.b.is_zero()) return Rational(0);
    const i128 d = static_cast<i128>(p.a.den) / gcd128(p.a.den, p.b.den) * p.b.den;
    const i128 m = static_cast<i128>(p.a.num) * (d / p.a.den);
    const i128 n = static_cast<i128>(p.b.num) * (d / p.b.den);
    return make_rational(gcd128(m, n), d);
}

namespace {

struct Mat2 {
    std::array<i64, 4> m;  // row-major

    static Mat2 identity() { return {{1, 0, 0, 1}}; }

    Mat2 mul(const Mat2& o) const {
        Mat2 r;
        r.m[0] = checked_i64(static_cast<i128>(m[0]) * o.m[0] + static_cast<i128>(m[1]) * o.m[2],
                             "sl2 witness overflow");
        r.m[1] = checked_i64(static_cast<i128>(m[0]) * o.m[1] + static_cast<i128>(m[1]) * o.m[3],
                             "sl2 witness overflow");
        r.m[2] = checked_i64(static_cast<i128>(m[2]) * o.m[0] + static_cast<i128>(m[3]) * o.m[2],
                             "sl2 witness overflow");
        r.m[3] = checked_i64(static_cast<i128>(m[2]) * o.m[1] + static_cast<i128>(m[3]) * o.m[3],
                             "sl2 witness overflow");
        return r;
    }

    RationalPair apply(const RationalPair& v) const {
        RationalPair r;
        r.a = Rational(m[0]) * v.a + Rational(m[1]) * v.b;
        r.b = Rational(m[2]) * v.a + Rational(m[3]) * v.b;
        return r;
    }
};

std::array<i64, 4> key_of(const RationalPair& v) {
    return {v.a.num, v.a.den, v.b.num, v.b.den};
}

}  // namespace

Sl2Witness sl2_equivalent(const RationalPair& a, const RationalPair& b, int witness_depth) {
    Sl2Witness out;
    out.equivalent = sl2_invariant(a) == sl2_invariant(b);
    if (!out.equivalent || witness_depth <= 0) return out;

    // Generators S, T and their inverses, acting on column vectors.
    const Mat2 gens[4] = {
        {{0, -1, 1, 0}},  // S
        {{0, 1, -1, 0}},  // S^-1
        {{1, 1, 0, 1}},   // T
        {{1, -1, 0, 1}},  // T^-1
    };

    struct Node {
        RationalPair v;
        Mat2 m;
        int depth;
    };
    std::deque<Node> queue;
    std::set<std::array<i64, 4>> seen;
    queue.push_back({a, Mat2::identity(), 0});
    seen.insert(key_of(a));
    const auto target = key_of(b);

    while (!queue.empty()) {
        Node cur = queue.front();
        queue.pop_front();
        if (key_of(cur.v) == target) {
            out.matrix = cur.m.m;
            return out;
        }
        if (cur.depth >= witness_depth) continue;
        for (const Mat2& g : gens) {
            Node nxt{g.apply(cur.v), g.mul(cur.m), cur.depth + 1};
            if (seen.insert(key_of(nxt.v)).second) queue.push_back(nxt);
        }
    }
    return out;  // equivalent, but no witness within the search depth
}

namespace {

bool close_all(const std::vector<double>& a, const std::vector<double>& b, double tol) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > tol) return false;
    return true;
}

constexpr double kSigTol = 1e-12;

}  // namespace

bool same_orbit(const MassSignature& a, const MassSignature& b, const SymmetryGroup& group) {
    if (a.levels.size() != b.levels.size())
        throw ShapeMismatch("signatures with different level counts");

    switch (group.tag) {
        case SymmetryGroup::Tag::trivial: {
            for (std::size_t l = 0; l < a.levels.size(); ++l) {
                if (a.levels[l].size() != b.levels[l].size())
                    throw ShapeMismatch("signature levels of different sizes");
                if (!close_all(a.levels[l], b.levels[l], kSigTol)) return false;
            }
            return true;
        }
        case SymmetryGroup::Tag::dihedral: {
            if (a.levels.size() != 2)
                throw ShapeMismatch("dihedral signatures need a point level and an arc level");
            const int k = group.k;
            for (const auto* sig : {&a, &b})
                if (static_cast<int>(sig->levels[0].size()) != k ||
                    static_cast<int>(sig->levels[1].size()) != k)
                    throw ShapeMismatch("dihedral signature shape does not match k");
            const auto ca = dihedral_canonicalize(a.levels[0], a.levels[1]);
            const auto cb = dihedral_canonicalize(b.levels[0], b.levels[1]);
            return close_all(ca.gammas, cb.gammas, kSigTol) && close_all(ca.ws, cb.ws, kSigTol);
        }
        case SymmetryGroup::Tag::hyperoctahedral: {
            if (static_cast<int>(a.levels.size()) != group.k)
                throw ShapeMismatch("hyperoctahedral signature level count does not match");
            std::vector<std::pair<double, double>> pa, pb;
            for (std::size_t l = 0; l < a.levels.size(); ++l) {
                if (a.levels[l].size() != 2 || b.levels[l].size() != 2)
                    throw ShapeMismatch("hyperoctahedral levels must hold hemisphere pairs");
                pa.emplace_back(a.levels[l][0], a.levels[l][1]);
                pb.emplace_back(b.levels[l][0], b.levels[l][1]);
            }
            const auto ca = hyperoct_canonicalize(pa);
            const auto cb = hyperoct_canonicalize(pb);
            for (std::size_t i = 0; i < ca.pairs.size(); ++i)
                if (std::abs(ca.pairs[i].first - cb.pairs[i].first) > kSigTol ||
                    std::abs(ca.pairs[i].second - cb.pairs[i].second) > kSigTol)
                    return false;
            return true;
        }
        case SymmetryGroup::Tag::sl2z_rational:
            throw ShapeMismatch("sl2z classification requires exact rational signatures");
    }
    throw ValidationError("unknown symmetry group");
}

bool same_orbit(const RationalSignature& a, const RationalSignature& b,
                const SymmetryGroup& group) {
    if (group.tag == SymmetryGroup::Tag::sl2z_rational) {
        if (a.levels.size() != 1 || a.levels[0].size() != 2 || b.levels.size() != 1 ||
            b.levels[0].size() != 2)
            throw ShapeMismatch("sl2z signatures hold one level of two action integrals");
        const RationalPair pa{a.levels[0][0], a.levels[0][1]};
        const RationalPair pb{b.levels[0][0], b.levels[0][1]};
        return sl2_invariant(pa) == sl2_invariant(pb);
    }
    // Other groups compare through the floating representation.
    auto lower = [](const RationalSignature& s) {
        MassSignature m;
        for (const auto& level : s.levels) {
            std::vector<double> row;
            for (const Rational& r : level)
                row.push_back(static_cast<double>(r.num) / static_cast<double>(r.den));
            m.levels.push_back(std::move(row));
        }
        return m;
    };
    return same_orbit(lower(a), lower(b), group);
}

}  // namespace flagsim
