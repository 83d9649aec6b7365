#pragma once

#include <string>
#include <utility>
#include <vector>

#include "flagsim/flag.hpp"
#include "flagsim/vec.hpp"

namespace flagsim {

/// Standard symplectic pairing omega = sum_i dx_i ^ dy_i on R^{2n} with
/// coordinate order (x_1, y_1, ..., x_n, y_n):
///   omega(u, v) = sum_i (u_{x_i} v_{y_i} - u_{y_i} v_{x_i}).
/// Throws DimensionMismatch for odd or unequal dimensions.
double omega_eval(const Vec& u, const Vec& v);

struct PolyTerm {
    std::vector<int> exponents;  // one exponent per coordinate
    double coeff = 0.0;
};

struct GaussianBump {
    Vec center;
    double width = 1.0;  // strictly positive
    double amp = 1.0;
};

/// Analytic scalar field on R^{2n}: a polynomial plus isotropic Gaussian
/// bumps amp * exp(-|x - c|^2 / (2 w^2)). Values and gradients are exact
/// closed forms; these serve both as Hamiltonians and as distribution test
/// functions.
struct TestFunction {
    std::vector<PolyTerm> poly;
    std::vector<GaussianBump> bumps;

    double value(const Vec& x) const;
    Vec gradient(const Vec& x) const;
};

/// Hamiltonian vector field X_f with i_{X_f} omega = df: per symplectic plane
/// X_f = (df/dy_i, -df/dx_i). Throws DimensionMismatch.
Vec hamiltonian_vf(const TestFunction& f, const Vec& x);

/// Discrete action integral: the line integral of the primitive
/// theta = 1/2 sum_i (x_i dy_i - y_i dx_i) along the closed polyline,
/// evaluated edge-wise at edge midpoints. In R^2 this is the exact shoelace
/// signed area; in a Lagrangian coordinate plane it vanishes identically.
double action_integral(const DiscreteLoop& loop);
double action_integral(const std::vector<Vec>& vertices);

/// Max over grid cells (wraparound included) of |omega(row edge, col edge)|,
/// a discrete measure of the pullback of omega to the torus. Zero for exactly
/// Lagrangian grids, O(h^2) for sampled smooth Lagrangian tori.
double isotropy_residual(const DiscreteTorusGrid& torus);

/// Action integrals of the two basis meridians: first the loop down column 0
/// (row index varies), then the loop along row 0 (column index varies).
std::pair<double, double> meridian_action_pair(const DiscreteTorusGrid& torus);

enum class FlowScheme { rk4, midpoint };

struct DriftRecord {
    std::string name;
    double initial = 0.0;
    double final_value = 0.0;
    double relative_drift = 0.0;
};

struct FlowDiagnostics {
    long steps = 0;
    double max_step_displacement = 0.0;
    double final_nesting_residual = 0.0;
    std::vector<DriftRecord> drift;
};

struct FlowResult {
    WeightedFlag flag;
    FlowDiagnostics diagnostics;
};

/// Advect every vertex and point of the flag along X_f for time T with fixed
/// step dt. Densities and point weights are material constants: they are
/// carried unchanged, so component masses are conserved structurally and the
/// nesting residual stays exactly zero (points and their marked vertices
/// receive bitwise identical updates).
///
/// Throws StepTooLarge when a single-step displacement exceeds 10% of the
/// minimum edge length, which signals an under-resolved discretization.
FlowResult flow_flag(const WeightedFlag& flag, const TestFunction& f, double T, double dt,
                     FlowScheme scheme = FlowScheme::rk4);

/// Single integrator step of the flow of X_f from position x (exposed for the
/// Jacobian determinant checks).
Vec flow_point(const TestFunction& f, Vec x, double T, double dt, FlowScheme scheme);

}  // namespace flagsim
