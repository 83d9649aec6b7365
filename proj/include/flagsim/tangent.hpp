#pragma once

#include <vector>

#include "flagsim/vec.hpp"

namespace flagsim {

/// Isodrastic tangent vector to a pointed-loop flag: a velocity field u per
/// loop vertex (the points ride on marked vertices and share their velocity)
/// and a per-vertex density potential lambda vanishing at every marked index.
/// The density perturbation is the discrete derivative of lambda, so it is
/// exact by construction; the point level carries no density perturbation.
struct FlagTangent {
    std::vector<Vec> u;
    std::vector<double> lambda;

    int size() const { return static_cast<int>(u.size()); }
};

}  // namespace flagsim
