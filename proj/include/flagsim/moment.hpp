#pragma once

#include <optional>

#include "flagsim/flag.hpp"
#include "flagsim/symplectic.hpp"
#include "flagsim/tangent.hpp"

namespace flagsim {

/// The flag distribution applied to a test function:
///   <J(flag), f> = sum over levels of the integral of f against that level's
/// density (weighted point sum, trapezoidal loop and torus quadrature).
/// Throws DimensionMismatch.
double pair(const WeightedFlag& flag, const TestFunction& f);

/// Central finite difference of pair() along an isodrastic tangent: vertices
/// displaced by +-h*u, loop density perturbed by +-h * dlambda (centered
/// difference of the potential). Throws IncompatibleTangent.
double pair_directional(const WeightedFlag& flag, const FlagTangent& tan, const TestFunction& f,
                        double h);

struct SeparationWitness {
    TestFunction bump;
    double gap = 0.0;
};

/// Search for a Gaussian bump test function distinguishing two flags, scanning
/// centers over the sample points of both flags at decreasing widths (at most
/// `budget` candidates, fixed order, best gap wins). Returns nothing when all
/// candidates give a gap below 1e-12, i.e. the flags are numerically
/// indistinguishable. Throws DimensionMismatch.
std::optional<SeparationWitness> separate(const WeightedFlag& a, const WeightedFlag& b,
                                          int budget);

}  // namespace flagsim
