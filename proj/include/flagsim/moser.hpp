#pragma once

#include <vector>

namespace flagsim {

/// Monotone degree-1 reparametrization of the discretized circle. targets[i]
/// is the image parameter of vertex theta_i, lifted so the sequence is
/// strictly increasing with total increase 2*pi; every index in `fixed` is an
/// exact fixed point.
struct CircleMap {
    std::vector<double> targets;
    std::vector<int> fixed;

    int size() const { return static_cast<int>(targets.size()); }

    /// Piecewise-linear evaluation of the lifted map at parameter theta.
    double apply(double theta) const;
    /// Inverse of the lifted map (strict monotonicity makes it well defined).
    double invert(double s) const;
};

/// Trapezoidal mass of each arc between consecutive marked vertices, in mark
/// order starting from marked[0]; the whole-circle mass when unmarked.
std::vector<double> arc_masses(const std::vector<double>& density,
                               const std::vector<int>& marked);

/// Cumulative-mass matching map g with g_* mu = nu, fixing every marked
/// vertex: on each arc the map matches normalized cumulative mass functions
/// (inverse-CDF construction with linear inversion inside cells). Unmarked
/// circles are anchored at vertex 0.
///
/// Preconditions: mu and nu of one common sign, arc masses equal within tol
/// (relative, per arc). Throws MassMismatch when some arc differs by more --
/// the densities then lie in different orbits -- and SignMismatch.
CircleMap moser_map_circle(const std::vector<double>& mu, const std::vector<double>& nu,
                           const std::vector<int>& marked, double tol = 1e-9);

/// Pushforward of mu under the map: nu(g(theta)) g'(theta) = mu(theta),
/// resampled on the uniform grid (centered-difference derivative, linear
/// interpolation), then rescaled inside each arc so per-arc masses match mu
/// exactly. Throws NonMonotone.
std::vector<double> push_density(const CircleMap& map, const std::vector<double>& mu,
                                 const std::vector<int>& marked = {});

/// The convex segment (1-t) mu + t nu; stays nowhere zero and keeps every arc
/// mass constant when the endpoints share them. Throws MassMismatch,
/// SignMismatch.
std::vector<double> interpolation_path(const std::vector<double>& mu,
                                       const std::vector<double>& nu,
                                       const std::vector<int>& marked, double t,
                                       double tol = 1e-9);

/// Scale the interior vertices of each arc so the trapezoidal arc masses
/// equal `targets` exactly; marked vertices are left unchanged. With no marks
/// the whole circle is scaled to targets[0].
std::vector<double> rescale_arc_masses(std::vector<double> density,
                                       const std::vector<int>& marked,
                                       const std::vector<double>& targets);

/// The unique tangential field X on the circle with L_X(mu dtheta) = dgamma
/// and X = 0 at marked vertices: X = gamma / mu pointwise. gamma must vanish
/// at every marked index. Throws SignError (mu has a zero),
/// ConstraintViolation (gamma nonzero at a mark).
std::vector<double> moser_vector_field(const std::vector<double>& mu,
                                       const std::vector<double>& gamma,
                                       const std::vector<int>& marked);

}  // namespace flagsim
