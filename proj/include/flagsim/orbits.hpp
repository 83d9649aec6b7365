#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flagsim/flag.hpp"

namespace flagsim {

/// Exact rational with positive denominator, always gcd-reduced. Arithmetic
/// checks for int64 overflow through 128-bit intermediates.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d);
    explicit Rational(std::int64_t n) : num(n), den(1) {}

    bool is_zero() const { return num == 0; }
    bool operator==(const Rational&) const = default;
    std::string str() const;
};

Rational operator+(const Rational& a, const Rational& b);
Rational operator-(const Rational& a, const Rational& b);
Rational operator*(const Rational& a, const Rational& b);
Rational rational_abs(const Rational& a);

/// Pair of action integrals (exact rationals, not both zero for the
/// invariant to be meaningful).
struct RationalPair {
    Rational a, b;
};

/// Symmetry group acting on a mass signature.
struct SymmetryGroup {
    enum class Tag { trivial, dihedral, hyperoctahedral, sl2z_rational };
    Tag tag = Tag::trivial;
    int k = 0;  // k-gon size for dihedral, pair count for hyperoctahedral

    static SymmetryGroup trivial() { return {Tag::trivial, 0}; }
    static SymmetryGroup dihedral(int k) { return {Tag::dihedral, k}; }
    static SymmetryGroup hyperoctahedral(int pairs) { return {Tag::hyperoctahedral, pairs}; }
    static SymmetryGroup sl2z_rational() { return {Tag::sl2z_rational, 0}; }
};

struct DihedralCanonical {
    std::vector<double> gammas;
    std::vector<double> ws;
    int orbit_size = 1;
};

/// Canonical representative of (vertex weights, edge weights) under the
/// dihedral group of the k-gon: Gamma_i sits on vertex i, w_i on edge
/// [i, i+1]; a reflection reverses the vertices and sends edge j to the edge
/// between the reflected vertices. Canonical form is the lexicographic
/// minimum over all 2k images; orbit size is 2k over the exactly enumerated
/// stabilizer. Throws LengthMismatch.
DihedralCanonical dihedral_canonicalize(const std::vector<double>& gammas,
                                        const std::vector<double>& ws);

struct HyperoctCanonical {
    std::vector<std::pair<double, double>> pairs;
    std::int64_t orbit_size = 1;
};

/// Canonical representative of hemisphere-mass pairs under independent swaps:
/// each pair sorted ascending; orbit size 2^s where s counts pairs with
/// distinct entries.
HyperoctCanonical hyperoct_canonicalize(const std::vector<std::pair<double, double>>& pairs);

/// The positive generator of the subgroup a Z + b Z of Q, the complete
/// SL(2,Z) invariant of a rational pair: with common denominator d and
/// integer numerators (m, n), the generator is gcd(|m|, |n|) / d. Returns 0
/// for the zero pair.
Rational sl2_invariant(const RationalPair& p);

struct Sl2Witness {
    bool equivalent = false;
    /// Row-major 2x2 integer matrix with determinant one mapping a to b;
    /// may be absent when the search depth was insufficient.
    std::optional<std::array<std::int64_t, 4>> matrix;
};

/// Decide SL(2,Z) equivalence of two rational pairs (equality of the subgroup
/// generator) and, when equivalent and witness_depth > 0, search words in the
/// generators S, T and their inverses breadth-first up to that depth for an
/// explicit matrix witness.
Sl2Witness sl2_equivalent(const RationalPair& a, const RationalPair& b, int witness_depth);

/// Exact-rational mass signature used by the sl2z classification mode.
struct RationalSignature {
    std::vector<std::vector<Rational>> levels;
};

/// Whether two mass signatures lie in one orbit of the given symmetry group.
/// Canonical forms are compared with absolute tolerance 1e-12 (signatures
/// derive from quadrature). Throws ShapeMismatch.
bool same_orbit(const MassSignature& a, const MassSignature& b, const SymmetryGroup& group);

/// Exact-rational variant for the SL(2,Z) mode (single level of two entries).
bool same_orbit(const RationalSignature& a, const RationalSignature& b,
                const SymmetryGroup& group);

}  // namespace flagsim
