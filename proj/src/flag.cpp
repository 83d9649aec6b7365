#include "flagsim/flag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "flagsim/errors.hpp"
#include "flagsim/moser.hpp"

namespace flagsim {

namespace {

void check_constant_sign(const std::vector<double>& density, const char* what) {
    if (density.empty()) throw ValidationError(std::string(what) + ": empty density");
    const double s = density[0];
    if (s == 0.0) throw SignError(std::string(what) + ": density has a zero entry");
    for (double d : density) {
        if (d == 0.0) throw SignError(std::string(what) + ": density has a zero entry");
        if ((d > 0.0) != (s > 0.0))
            throw SignError(std::string(what) + ": density changes sign");
    }
}

void check_dimension(const std::vector<Vec>& pts, int dim, const char* what) {
    for (const Vec& p : pts)
        if (static_cast<int>(p.size()) != dim)
            throw ValidationError(std::string(what) + ": inconsistent coordinate dimension");
}

int nearest_vertex(const std::vector<Vec>& vertices, const Vec& p) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(vertices.size()); ++i) {
        const double d = dist(vertices[i], p);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

}  // namespace

void validate_loop(const DiscreteLoop& loop) {
    const int n = loop.size();
    if (n < kMinLoopVertices)
        throw ValidationError("loop: fewer than " + std::to_string(kMinLoopVertices) +
                              " vertices");
    if (static_cast<int>(loop.density.size()) != n)
        throw ValidationError("loop: density size does not match vertex count");
    check_constant_sign(loop.density, "loop");
    int prev = -1;
    for (int m : loop.marked) {
        if (m <= prev) throw ValidationError("loop: marked indices not strictly increasing");
        if (m < 0 || m >= n) throw ValidationError("loop: marked index out of range");
        prev = m;
    }
    for (int i = 0; i < n; ++i) {
        const Vec& a = loop.vertices[i];
        const Vec& b = loop.vertices[(i + 1) % n];
        if (dist(a, b) == 0.0) throw DegenerateGeometry("loop: repeated consecutive vertices");
    }
}

void validate_torus(const DiscreteTorusGrid& torus) {
    if (torus.rows < kMinGridSize || torus.cols < kMinGridSize)
        throw ValidationError("torus: grid smaller than minimum resolution");
    if (static_cast<int>(torus.grid.size()) != torus.rows * torus.cols)
        throw ValidationError("torus: grid size does not match rows*cols");
    if (torus.density.size() != torus.grid.size())
        throw ValidationError("torus: density size does not match grid");
    check_dimension(torus.grid, 4, "torus");
    check_constant_sign(torus.density, "torus");
    int prev = -1;
    for (int c : torus.marked_columns) {
        if (c <= prev) throw ValidationError("torus: marked columns not strictly increasing");
        if (c < 0 || c >= torus.cols) throw ValidationError("torus: marked column out of range");
        prev = c;
    }
}

WeightedFlag build_flag(const WeightedFlag& raw) {
    if (raw.nesting_tol < 0.0) throw ValidationError("nesting_tol must be nonnegative");
    WeightedFlag flag = raw;

    if (flag.is_loop_mode()) {
        PointsInLoop& lv = flag.pl();
        if (flag.dimension < 2 || flag.dimension % 2 != 0)
            throw ValidationError("dimension must be even and at least 2");
        check_dimension(lv.loop.vertices, flag.dimension, "loop");
        validate_loop(lv.loop);

        WeightedPointSet& ps = lv.points;
        if (ps.weights.size() != ps.positions.size())
            throw ValidationError("points: one weight per position required");
        check_dimension(ps.positions, flag.dimension, "points");
        for (double w : ps.weights)
            if (w == 0.0) throw SignError("points: zero weight");
        for (int i = 0; i < ps.size(); ++i)
            for (int j = i + 1; j < ps.size(); ++j)
                if (dist(ps.positions[i], ps.positions[j]) == 0.0)
                    throw DegenerateGeometry("points: coincident positions");

        // Snap each point onto its nearest loop vertex; the flag condition is
        // combinatorial from here on.
        std::set<int> marks(lv.loop.marked.begin(), lv.loop.marked.end());
        std::set<int> snapped;
        for (int i = 0; i < ps.size(); ++i) {
            const int v = nearest_vertex(lv.loop.vertices, ps.positions[i]);
            const double d = dist(lv.loop.vertices[v], ps.positions[i]);
            if (d > flag.nesting_tol)
                throw NestingViolation("point " + std::to_string(i) + " lies " +
                                       std::to_string(d) + " from the nearest loop vertex");
            if (!snapped.insert(v).second)
                throw DegenerateGeometry("two points snap to one loop vertex");
            ps.positions[i] = lv.loop.vertices[v];
            marks.insert(v);
        }
        lv.loop.marked.assign(marks.begin(), marks.end());
    } else {
        LoopsInTorus& lv = flag.lt();
        if (flag.dimension != 4)
            throw ValidationError("torus flags require dimension 4");
        validate_torus(lv.torus);

        MeridianLoops& ml = lv.loops;
        if (ml.densities.size() != ml.columns.size())
            throw ValidationError("loops: one density per meridian column required");
        std::set<int> marks(lv.torus.marked_columns.begin(), lv.torus.marked_columns.end());
        std::set<int> seen;
        for (int l = 0; l < ml.size(); ++l) {
            const int c = ml.columns[l];
            if (c < 0 || c >= lv.torus.cols)
                throw NestingViolation("meridian column out of range");
            if (!seen.insert(c).second)
                throw DegenerateGeometry("duplicate meridian column");
            if (static_cast<int>(ml.densities[l].size()) != lv.torus.rows)
                throw ValidationError("loops: density length must equal torus rows");
            check_constant_sign(ml.densities[l], "meridian loop");
            marks.insert(c);
        }
        lv.torus.marked_columns.assign(marks.begin(), marks.end());
    }
    return flag;
}

double nesting_residual(const WeightedFlag& flag) {
    if (flag.is_loop_mode()) {
        const PointsInLoop& lv = flag.pl();
        double r = 0.0;
        for (const Vec& p : lv.points.positions) {
            double best = std::numeric_limits<double>::infinity();
            if (lv.loop.marked.empty()) best = 0.0;
            for (int m : lv.loop.marked) best = std::min(best, dist(lv.loop.vertices[m], p));
            r = std::max(r, best);
        }
        return r;
    }
    // Meridian loops have no independent geometry: they are grid columns.
    return 0.0;
}

MassSignature component_masses(const WeightedFlag& flag) {
    MassSignature sig;
    if (flag.is_loop_mode()) {
        const PointsInLoop& lv = flag.pl();
        // Point weights in marked-index order.
        std::vector<std::pair<int, double>> by_mark;
        for (int i = 0; i < lv.points.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            int mark = 0;
            for (int m : lv.loop.marked) {
                const double d = dist(lv.loop.vertices[m], lv.points.positions[i]);
                if (d < best) {
                    best = d;
                    mark = m;
                }
            }
            by_mark.emplace_back(mark, lv.points.weights[i]);
        }
        std::sort(by_mark.begin(), by_mark.end());
        std::vector<double> level1;
        for (auto& [m, w] : by_mark) level1.push_back(w);
        sig.levels.push_back(std::move(level1));
        sig.levels.push_back(arc_masses(lv.loop.density, lv.loop.marked));
    } else {
        const LoopsInTorus& lv = flag.lt();
        const DiscreteTorusGrid& t = lv.torus;
        const double dth = grid_step(t.rows);
        std::vector<double> level1;
        for (const auto& rho : lv.loops.densities) {
            double m = 0.0;
            for (double d : rho) m += d;
            level1.push_back(m * dth);
        }
        sig.levels.push_back(std::move(level1));

        // Band masses between consecutive marked columns, trapezoid across
        // columns, full periodic sum across rows.
        const double dA = grid_step(t.rows) * grid_step(t.cols);
        std::vector<double> level2;
        const auto& marks = t.marked_columns;
        if (marks.empty()) {
            double total = 0.0;
            for (double d : t.density) total += d;
            level2.push_back(total * dA);
        } else {
            const int k = static_cast<int>(marks.size());
            for (int a = 0; a < k; ++a) {
                const int ca = marks[a];
                const int cb = marks[(a + 1) % k];
                const int span = (cb - ca + t.cols) % t.cols;
                const int len = (span == 0) ? t.cols : span;
                double mass = 0.0;
                for (int s = 0; s <= len; ++s) {
                    const int c = (ca + s) % t.cols;
                    const double w = (s == 0 || s == len) ? 0.5 : 1.0;
                    for (int i = 0; i < t.rows; ++i) mass += w * t.rho(i, c);
                }
                level2.push_back(mass * dA);
            }
        }
        sig.levels.push_back(std::move(level2));
    }
    return sig;
}

double loop_total_mass(const DiscreteLoop& loop) {
    double m = 0.0;
    for (double d : loop.density) m += d;
    return m * grid_step(loop.size());
}

namespace {

// Periodic Catmull-Rom evaluation at global parameter t in [0, n).
Vec spline_eval(const std::vector<Vec>& pts, double t) {
    const int n = static_cast<int>(pts.size());
    int i = static_cast<int>(std::floor(t));
    double s = t - i;
    i = ((i % n) + n) % n;
    const Vec& p0 = pts[(i - 1 + n) % n];
    const Vec& p1 = pts[i];
    const Vec& p2 = pts[(i + 1) % n];
    const Vec& p3 = pts[(i + 2) % n];
    Vec out(p0.size());
    for (std::size_t c = 0; c < out.size(); ++c) {
        const double a0 = 2.0 * p1[c];
        const double a1 = p2[c] - p0[c];
        const double a2 = 2.0 * p0[c] - 5.0 * p1[c] + 4.0 * p2[c] - p3[c];
        const double a3 = -p0[c] + 3.0 * p1[c] - 3.0 * p2[c] + p3[c];
        out[c] = 0.5 * (a0 + a1 * s + a2 * s * s + a3 * s * s * s);
    }
    return out;
}

double lin_interp_periodic(const std::vector<double>& values, double t) {
    const int n = static_cast<int>(values.size());
    int i = static_cast<int>(std::floor(t));
    const double s = t - i;
    i = ((i % n) + n) % n;
    return (1.0 - s) * values[i] + s * values[(i + 1) % n];
}

}  // namespace

DiscreteLoop resample_loop(const DiscreteLoop& loop, int n) {
    validate_loop(loop);
    const int n_old = loop.size();
    const int k = static_cast<int>(loop.marked.size());
    if (n < kMinLoopVertices || n < k) throw TooCoarse("resample target too small");

    // Arclength table along the spline, sub-sampled per segment.
    constexpr int kSub = 16;
    std::vector<double> cum(static_cast<std::size_t>(n_old) * kSub + 1, 0.0);
    Vec prev = spline_eval(loop.vertices, 0.0);
    for (int j = 1; j <= n_old * kSub; ++j) {
        const Vec cur = spline_eval(loop.vertices, static_cast<double>(j) / kSub);
        cum[j] = cum[j - 1] + dist(prev, cur);
        prev = cur;
    }
    const double total_len = cum.back();
    if (total_len == 0.0) throw DegenerateGeometry("resample: zero-length loop");

    auto param_at_arclength = [&](double s) {
        // Monotone table inversion with linear interpolation.
        s = std::clamp(s, 0.0, total_len);
        const auto it = std::lower_bound(cum.begin(), cum.end(), s);
        std::size_t j = static_cast<std::size_t>(it - cum.begin());
        if (j == 0) return 0.0;
        const double seg = cum[j] - cum[j - 1];
        const double frac = seg > 0.0 ? (s - cum[j - 1]) / seg : 0.0;
        return (static_cast<double>(j - 1) + frac) / kSub;
    };

    // New vertices at uniform arclength, with the old parameter t_j (in old
    // vertex units, lifted to be monotone) recorded for density transport.
    DiscreteLoop out;
    std::vector<double> t_of(n);
    for (int j = 0; j < n; ++j) {
        const double s = total_len * j / n;
        t_of[j] = param_at_arclength(s);
        out.vertices.push_back(spline_eval(loop.vertices, t_of[j]));
    }

    // Density as a reparametrization pushforward: nu(theta*) =
    // mu(theta(theta*)) dtheta/dtheta*.
    out.density.resize(n);
    for (int j = 0; j < n; ++j) {
        const double tp = t_of[(j + 1) % n] + (j + 1 >= n ? n_old : 0.0);
        const double tm = t_of[(j - 1 + n) % n] - (j - 1 < 0 ? n_old : 0.0);
        const double dt_dj = 0.5 * (tp - tm);  // old vertex units per new vertex
        out.density[j] = lin_interp_periodic(loop.density, t_of[j]) * dt_dj *
                         (static_cast<double>(n) / n_old);
    }

    // Marks snap to the nearest new vertex by arclength.
    std::vector<int> new_marks;
    for (int m : loop.marked) {
        const double s_m = cum[static_cast<std::size_t>(m) * kSub];
        int idx = static_cast<int>(std::llround(s_m / total_len * n)) % n;
        new_marks.push_back(idx);
    }
    {
        std::set<int> uniq(new_marks.begin(), new_marks.end());
        if (static_cast<int>(uniq.size()) != k) throw TooCoarse("marks collide after resampling");
        out.marked.assign(uniq.begin(), uniq.end());
    }

    // Redistribute mass proportionally inside each arc so that every arc mass
    // (old marks and their images correspond cyclically) is preserved exactly.
    const std::vector<double> target =
        k > 0 ? arc_masses(loop.density, loop.marked) : std::vector<double>{loop_total_mass(loop)};
    const double dth = grid_step(n);
    if (k == 0) {
        double raw = 0.0;
        for (double d : out.density) raw += d;
        raw *= dth;
        const double c = target[0] / raw;
        for (double& d : out.density) d *= c;
    } else {
        // Cyclic alignment: the arc starting at old marked[a] starts at the
        // image of marked[a] in the new loop.
        std::vector<int> image;
        for (int m : loop.marked) {
            const double s_m = cum[static_cast<std::size_t>(m) * kSub];
            image.push_back(static_cast<int>(std::llround(s_m / total_len * n)) % n);
        }
        for (int a = 0; a < k; ++a) {
            const int ia = image[a];
            const int ib = image[(a + 1) % k];
            const int span = (ib - ia + n) % n;
            const int len = (span == 0) ? n : span;
            if (len < 2) continue;  // no interior vertex to rescale
            double ends = 0.5 * (out.density[ia] + out.density[ib]);
            double interior = 0.0;
            for (int s = 1; s < len; ++s) interior += out.density[(ia + s) % n];
            if (interior == 0.0) continue;
            const double c = (target[a] / dth - ends) / interior;
            for (int s = 1; s < len; ++s) out.density[(ia + s) % n] *= c;
        }
    }
    return out;
}

}  // namespace flagsim
