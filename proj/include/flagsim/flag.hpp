#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "flagsim/vec.hpp"

namespace flagsim {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Minimum resolution for loops and torus grids; below this the curvature and
/// quadrature checks are meaningless.
inline constexpr int kMinLoopVertices = 8;
inline constexpr int kMinGridSize = 8;

/// Uniform parameter spacing of an n-vertex discretized circle.
inline double grid_step(int n) { return kTwoPi / n; }
inline double grid_theta(int i, int n) { return kTwoPi * i / n; }

/// Isolated weighted points in R^{2n}: positions pairwise distinct, weights
/// all nonzero (point vorticities).
struct WeightedPointSet {
    std::vector<Vec> positions;
    std::vector<double> weights;

    int size() const { return static_cast<int>(positions.size()); }
};

/// Closed polyline with a per-vertex signed density (mass per unit parameter,
/// uniform spacing 2*pi/n) and a sorted list of marked vertex indices. The
/// wraparound edge from the last vertex back to the first is implicit.
struct DiscreteLoop {
    std::vector<Vec> vertices;
    std::vector<double> density;
    std::vector<int> marked;

    int size() const { return static_cast<int>(vertices.size()); }
    int dimension() const { return vertices.empty() ? 0 : static_cast<int>(vertices[0].size()); }
};

/// m x n doubly periodic grid of points in R^4 carrying a positive (or
/// uniformly negative) density, with marked meridian columns. Row-major
/// storage; entry (i, j) is grid[i*cols + j].
struct DiscreteTorusGrid {
    int rows = 0;
    int cols = 0;
    std::vector<Vec> grid;
    std::vector<double> density;
    std::vector<int> marked_columns;

    const Vec& at(int i, int j) const { return grid[static_cast<std::size_t>(i) * cols + j]; }
    Vec& at(int i, int j) { return grid[static_cast<std::size_t>(i) * cols + j]; }
    double rho(int i, int j) const { return density[static_cast<std::size_t>(i) * cols + j]; }
};

/// Meridian loops embedded in a torus grid: loop l runs down column
/// columns[l] (row index varies), with its own per-row density.
struct MeridianLoops {
    std::vector<int> columns;
    std::vector<std::vector<double>> densities;

    int size() const { return static_cast<int>(columns.size()); }
};

/// Depth-2 level stack: weighted points sitting on marked vertices of a loop.
struct PointsInLoop {
    WeightedPointSet points;
    DiscreteLoop loop;
};

/// Depth-2 level stack: weighted meridian loops sitting on marked columns of
/// a torus grid.
struct LoopsInTorus {
    MeridianLoops loops;
    DiscreteTorusGrid torus;
};

/// A discretized weighted nonlinear flag in standard symplectic R^{2n}.
/// Construct through build_flag, which validates invariants and snaps lower
/// levels onto the marked vertices of the level above; after that the nesting
/// condition is combinatorial and survives shared advection exactly.
struct WeightedFlag {
    int dimension = 2;
    double nesting_tol = 1e-9;
    std::variant<PointsInLoop, LoopsInTorus> levels;

    bool is_loop_mode() const { return std::holds_alternative<PointsInLoop>(levels); }
    const PointsInLoop& pl() const { return std::get<PointsInLoop>(levels); }
    PointsInLoop& pl() { return std::get<PointsInLoop>(levels); }
    const LoopsInTorus& lt() const { return std::get<LoopsInTorus>(levels); }
    LoopsInTorus& lt() { return std::get<LoopsInTorus>(levels); }
};

/// Per-level component masses: level i holds the masses of the connected
/// components of N_i \ N_{i-1}. This is the complete discrete invariant the
/// symmetry groups of orbit classification act on.
struct MassSignature {
    std::vector<std::vector<double>> levels;
};

/// Validate raw level data, snap points onto their nearest loop vertices
/// (within raw.nesting_tol) and return the canonical flag. The loop's marked
/// set becomes the union of any explicitly provided marks and the snapped
/// point locations.
///
/// Throws NestingViolation, SignError, DegenerateGeometry, ValidationError.
WeightedFlag build_flag(const WeightedFlag& raw);

/// Max distance between any lower-level point and its marked vertex; exactly
/// zero for flags whose levels are advected together.
double nesting_residual(const WeightedFlag& flag);

/// Point weights in marked order, then trapezoidal arc (or torus band) masses
/// between consecutive marks.
MassSignature component_masses(const WeightedFlag& flag);

/// Arclength-uniform resampling of a closed loop to n vertices via a periodic
/// Catmull-Rom spline. Marked vertices snap to the nearest new vertex; the
/// density is transported as a reparametrization and then rescaled inside
/// each arc so that every arc mass is preserved exactly.
///
/// Throws TooCoarse when n < 8 or marks would collide.
DiscreteLoop resample_loop(const DiscreteLoop& loop, int n);

/// Total trapezoidal mass of a loop density on the uniform circle grid.
double loop_total_mass(const DiscreteLoop& loop);

/// Validation helpers shared with build_flag; throw on violation.
void validate_loop(const DiscreteLoop& loop);
void validate_torus(const DiscreteTorusGrid& torus);

}  // namespace flagsim
