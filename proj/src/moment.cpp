#include "flagsim/moment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flagsim/errors.hpp"

namespace flagsim {

namespace {

void check_dim(const WeightedFlag& flag, const TestFunction& f) {
    for (const PolyTerm& t : f.poly)
        if (static_cast<int>(t.exponents.size()) != flag.dimension)
            throw DimensionMismatch("test function polynomial does not match flag dimension");
    for (const GaussianBump& b : f.bumps)
        if (static_cast<int>(b.center.size()) != flag.dimension)
            throw DimensionMismatch("test function bump does not match flag dimension");
}

}  // namespace

double pair(const WeightedFlag& flag, const TestFunction& f) {
    check_dim(flag, f);
    double s = 0.0;
    if (flag.is_loop_mode()) {
        const PointsInLoop& lv = flag.pl();
        for (int i = 0; i < lv.points.size(); ++i)
            s += lv.points.weights[i] * f.value(lv.points.positions[i]);
        const double dth = grid_step(lv.loop.size());
        double loop_sum = 0.0;
        for (int i = 0; i < lv.loop.size(); ++i)
            loop_sum += lv.loop.density[i] * f.value(lv.loop.vertices[i]);
        s += loop_sum * dth;
    } else {
        const LoopsInTorus& lv = flag.lt();
        const DiscreteTorusGrid& t = lv.torus;
        const double dth = grid_step(t.rows);
        for (int l = 0; l < lv.loops.size(); ++l) {
            double m = 0.0;
            for (int i = 0; i < t.rows; ++i)
                m += lv.loops.densities[l][i] * f.value(t.at(i, lv.loops.columns[l]));
            s += m * dth;
        }
        const double dA = grid_step(t.rows) * grid_step(t.cols);
        double grid_sum = 0.0;
        for (int i = 0; i < t.rows; ++i)
            for (int j = 0; j < t.cols; ++j) grid_sum += t.rho(i, j) * f.value(t.at(i, j));
        s += grid_sum * dA;
    }
    return s;
}

namespace {

/// Index of the marked vertex each point sits on (nearest, ties by index).
std::vector<int> point_marks(const PointsInLoop& lv) {
    std::vector<int> marks;
    for (const Vec& p : lv.points.positions) {
        double best = std::numeric_limits<double>::infinity();
        int mark = 0;
        for (int m : lv.loop.marked) {
            const double d = dist(lv.loop.vertices[m], p);
            if (d < best) {
                best = d;
                mark = m;
            }
        }
        marks.push_back(mark);
    }
    return marks;
}

WeightedFlag displaced(const WeightedFlag& flag, const FlagTangent& tan, double h,
                       const std::vector<double>& dlambda, const std::vector<int>& pmarks) {
    WeightedFlag out = flag;
    PointsInLoop& lv = out.pl();
    const int n = lv.loop.size();
    for (int i = 0; i < n; ++i) {
        axpy(lv.loop.vertices[i], h, tan.u[i]);
        lv.loop.density[i] += h * dlambda[i];
    }
    for (int p = 0; p < lv.points.size(); ++p)
        axpy(lv.points.positions[p], h, tan.u[pmarks[p]]);
    return out;
}

}  // namespace

double pair_directional(const WeightedFlag& flag, const FlagTangent& tan, const TestFunction& f,
                        double h) {
    if (!flag.is_loop_mode())
        throw IncompatibleTangent("tangents are defined for pointed-loop flags");
    const PointsInLoop& lv = flag.pl();
    const int n = lv.loop.size();
    if (tan.size() != n || static_cast<int>(tan.lambda.size()) != n)
        throw IncompatibleTangent("tangent size does not match the loop");
    if (h <= 0.0) throw ValidationError("pair_directional: h must be positive");

    // Density perturbation is the centered discrete derivative of lambda.
    const double dth = grid_step(n);
    std::vector<double> dlambda(n);
    for (int i = 0; i < n; ++i)
        dlambda[i] = (tan.lambda[(i + 1) % n] - tan.lambda[(i - 1 + n) % n]) / (2.0 * dth);

    const std::vector<int> pmarks = point_marks(lv);
    const double plus = pair(displaced(flag, tan, h, dlambda, pmarks), f);
    const double minus = pair(displaced(flag, tan, -h, dlambda, pmarks), f);
    return (plus - minus) / (2.0 * h);
}

namespace {

std::vector<Vec> candidate_centers(const WeightedFlag& flag) {
    std::vector<Vec> centers;
    if (flag.is_loop_mode()) {
        for (const Vec& p : flag.pl().points.positions) centers.push_back(p);
        for (const Vec& v : flag.pl().loop.vertices) centers.push_back(v);
    } else {
        for (const Vec& v : flag.lt().torus.grid) centers.push_back(v);
    }
    return centers;
}

}  // namespace

std::optional<SeparationWitness> separate(const WeightedFlag& a, const WeightedFlag& b,
                                          int budget) {
    if (a.dimension != b.dimension)
        throw DimensionMismatch("separate: flags of different dimensions");

    std::vector<Vec> centers = candidate_centers(a);
    {
        const std::vector<Vec> cb = candidate_centers(b);
        centers.insert(centers.end(), cb.begin(), cb.end());
    }
    constexpr double widths[] = {2.0, 1.0, 0.5, 0.25, 0.1, 0.05, 0.02};

    SeparationWitness best;
    int used = 0;
    for (double w : widths) {
        for (const Vec& c : centers) {
            if (used >= budget) break;
            ++used;
            TestFunction f;
            f.bumps.push_back({c, w, 1.0});
            const double gap = std::abs(pair(a, f) - pair(b, f));
            if (gap > best.gap) {
                best.gap = gap;
                best.bump = f;
            }
        }
        if (used >= budget) break;
    }
    if (best.gap < 1e-12) return std::nullopt;
    return best;
}

}  // namespace flagsim
