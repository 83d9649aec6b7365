#pragma once

#include <cstdint>
#include <vector>

#include "flagsim/flag.hpp"
#include "flagsim/moment.hpp"
#include "flagsim/symplectic.hpp"
#include "flagsim/tangent.hpp"

namespace flagsim {

/// Infinitesimal generator of the reparametrization action for tangential
/// speeds Z vanishing at marked indices: u = Z * (discrete loop tangent),
/// lambda = Z * density. Throws ConstraintViolation when Z is nonzero at a
/// mark (the point level pins the flow there).
FlagTangent generator(const WeightedFlag& flag, const std::vector<double>& Z);

/// Tangent of the Hamiltonian action: u = X_f at each vertex, lambda = 0
/// (Hamiltonian transport moves geometry, not material densities).
FlagTangent ham_generator(const WeightedFlag& flag, const TestFunction& f);

/// Discretized leafwise symplectic form on the isodrast through the flag:
///   Omega(t1, t2) = sum_points Gamma_j omega(u1, u2)(x_j)
///     + trapezoid of omega(u1, u2) rho at the vertices
///     - sum over edges of omega(u1, edge) gamma  (midpoint values)
///     + sum over edges of omega(u2, edge) lambda (midpoint values)
/// where lambda is the potential of t1 and gamma the potential of t2; the
/// 1-form pullbacks are evaluated at edge midpoints against exact edge
/// vectors. Antisymmetric term by term. Throws IncompatibleTangent.
double omega_leafwise(const WeightedFlag& flag, const FlagTangent& t1, const FlagTangent& t2);

/// Relative defect of the moment-map identity along a tangent:
///   | d/dh <J, f> (tan) - Omega(ham_generator(f), tan) | / (1 + |Omega|).
/// The directional derivative is a centered finite difference with step h.
double moment_identity_residual(const WeightedFlag& flag, const TestFunction& f,
                                const FlagTangent& tan, double h);

/// Max over `trials` seeded random tangents w of
///   |Omega(generator(Z), w)| / (||zeta_Z|| ||w||)
/// in the discrete L2 norms; decays at O(1/n^2) under refinement for every
/// valid Z (the generators span the kernel of Omega).
double kernel_residual(const WeightedFlag& flag, const std::vector<double>& Z, int trials,
                       std::uint64_t seed);

/// Deterministic-from-seed smooth random tangent: low-order Fourier velocity
/// and potential fields; the potential is corrected by a trigonometric
/// interpolant to vanish exactly at marked indices; the velocity gets a
/// seeded Hamiltonian part and an exact circulation correction so the pulled
/// back 1-form phi^* i_u omega is exact within tolerance.
FlagTangent random_tangent(const WeightedFlag& flag, std::uint64_t seed);

/// Discrete L2 norm of a tangent, sqrt(dtheta * sum(|u|^2 + lambda^2)).
double tangent_norm(const FlagTangent& tan);

/// Subtract the low-order trigonometric interpolant through the field's
/// values at the marked indices; the result vanishes there exactly and stays
/// smooth (no kinks, so refinement studies remain clean).
std::vector<double> vanish_at_marks(std::vector<double> field, const std::vector<int>& marked);

/// Loop integral of the pulled back 1-form phi^* i_u omega; its vanishing is
/// the discrete isodrast membership test (exactness on the circle).
double circulation(const WeightedFlag& flag, const std::vector<Vec>& u);

}  // namespace flagsim
