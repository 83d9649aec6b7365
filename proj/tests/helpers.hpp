#pragma once

#include <cmath>
#include <vector>

#include "flagsim/flag.hpp"

namespace flagsim::testing {

inline DiscreteLoop circle_loop(int n, double radius = 1.0,
                                std::vector<int> marked = {}) {
    DiscreteLoop loop;
    for (int i = 0; i < n; ++i) {
        const double th = grid_theta(i, n);
        loop.vertices.push_back({radius * std::cos(th), radius * std::sin(th)});
        loop.density.push_back(1.0);
    }
    loop.marked = std::move(marked);
    return loop;
}

inline DiscreteLoop ellipse_loop(int n, double a, double b, std::vector<int> marked = {}) {
    DiscreteLoop loop;
    for (int i = 0; i < n; ++i) {
        const double th = grid_theta(i, n);
        loop.vertices.push_back({a * std::cos(th), b * std::sin(th)});
        loop.density.push_back(1.0);
    }
    loop.marked = std::move(marked);
    return loop;
}

/// Pointed unit-circle flag with weighted points sitting on the given marks.
inline WeightedFlag circle_flag(int n, const std::vector<int>& marks,
                                const std::vector<double>& weights) {
    WeightedFlag raw;
    raw.dimension = 2;
    raw.nesting_tol = 1e-9;
    PointsInLoop lv;
    lv.loop = circle_loop(n);
    for (std::size_t p = 0; p < marks.size(); ++p) {
        lv.points.positions.push_back(lv.loop.vertices[marks[p]]);
        lv.points.weights.push_back(weights[p]);
    }
    raw.levels = std::move(lv);
    return build_flag(raw);
}

/// Product torus grid (r1 cos a, r1 sin a, r2 cos b, r2 sin b); the row index
/// drives the first plane.
inline DiscreteTorusGrid product_torus(int m, int n, double r1, double r2) {
    DiscreteTorusGrid t;
    t.rows = m;
    t.cols = n;
    for (int i = 0; i < m; ++i) {
        const double a = grid_theta(i, m);
        for (int j = 0; j < n; ++j) {
            const double b = grid_theta(j, n);
            t.grid.push_back(
                {r1 * std::cos(a), r1 * std::sin(a), r2 * std::cos(b), r2 * std::sin(b)});
            t.density.push_back(1.0);
        }
    }
    return t;
}

}  // namespace flagsim::testing
