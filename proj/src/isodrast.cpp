#include "flagsim/isodrast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flagsim/errors.hpp"
#include "flagsim/rng.hpp"

namespace flagsim {

namespace {

const PointsInLoop& loop_level(const WeightedFlag& flag) {
    if (!flag.is_loop_mode())
        throw IncompatibleTangent("tangents are defined for pointed-loop flags");
    return flag.pl();
}

/// Centered-difference loop tangent phi'(theta_i).
std::vector<Vec> loop_tangent(const DiscreteLoop& loop) {
    const int n = loop.size();
    const double dth = grid_step(n);
    std::vector<Vec> t(n);
    for (int i = 0; i < n; ++i) {
        t[i] = loop.vertices[(i + 1) % n] - loop.vertices[(i - 1 + n) % n];
        for (double& c : t[i]) c /= 2.0 * dth;
    }
    return t;
}

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

void check_tangent(const PointsInLoop& lv, const FlagTangent& t, const char* what) {
    const int n = lv.loop.size();
    if (t.size() != n || static_cast<int>(t.lambda.size()) != n)
        throw IncompatibleTangent(std::string(what) + ": tangent size does not match the loop");
    for (const Vec& u : t.u)
        if (u.size() != lv.loop.vertices[0].size())
            throw IncompatibleTangent(std::string(what) + ": tangent dimension mismatch");
}

}  // namespace

FlagTangent generator(const WeightedFlag& flag, const std::vector<double>& Z) {
    const PointsInLoop& lv = loop_level(flag);
    const int n = lv.loop.size();
    if (static_cast<int>(Z.size()) != n)
        throw IncompatibleTangent("generator: speed field size does not match the loop");
    for (int m : lv.loop.marked)
        if (Z[m] != 0.0)
            throw ConstraintViolation("generator: reparametrization speed nonzero at a mark");

    const std::vector<Vec> phi = loop_tangent(lv.loop);
    FlagTangent t;
    t.u.resize(n);
    t.lambda.resize(n);
    for (int i = 0; i < n; ++i) {
        t.u[i] = Z[i] * phi[i];
        t.lambda[i] = Z[i] * lv.loop.density[i];
    }
    return t;
}

FlagTangent ham_generator(const WeightedFlag& flag, const TestFunction& f) {
    const PointsInLoop& lv = loop_level(flag);
    const int n = lv.loop.size();
    FlagTangent t;
    t.u.resize(n);
    t.lambda.assign(n, 0.0);
    for (int i = 0; i < n; ++i) t.u[i] = hamiltonian_vf(f, lv.loop.vertices[i]);
    return t;
}

double omega_leafwise(const WeightedFlag& flag, const FlagTangent& t1, const FlagTangent& t2) {
    const PointsInLoop& lv = loop_level(flag);
    check_tangent(lv, t1, "omega_leafwise");
    check_tangent(lv, t2, "omega_leafwise");

    const int n = lv.loop.size();
    const double dth = grid_step(n);

    // Density term at the vertices, 1-form pullback terms at edge midpoints
    // against the exact edge vectors.
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        s += omega_eval(t1.u[i], t2.u[i]) * lv.loop.density[i];
    s *= dth;
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        const Vec edge = lv.loop.vertices[j] - lv.loop.vertices[i];
        const Vec u1m = 0.5 * (t1.u[i] + t1.u[j]);
        const Vec u2m = 0.5 * (t2.u[i] + t2.u[j]);
        s -= omega_eval(u1m, edge) * 0.5 * (t2.lambda[i] + t2.lambda[j]);
        s += omega_eval(u2m, edge) * 0.5 * (t1.lambda[i] + t1.lambda[j]);
    }

    const std::vector<int> pmarks = point_marks(lv);
    for (int p = 0; p < lv.points.size(); ++p)
        s += lv.points.weights[p] * omega_eval(t1.u[pmarks[p]], t2.u[pmarks[p]]);
    return s;
}

double moment_identity_residual(const WeightedFlag& flag, const TestFunction& f,
                                const FlagTangent& tan, double h) {
    const double lhs = pair_directional(flag, tan, f, h);
    const double rhs = omega_leafwise(flag, ham_generator(flag, f), tan);
    return std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
}

double tangent_norm(const FlagTangent& tan) {
    const int n = tan.size();
    if (n == 0) return 0.0;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += dot(tan.u[i], tan.u[i]) + tan.lambda[i] * tan.lambda[i];
    return std::sqrt(s * grid_step(n));
}

double circulation(const WeightedFlag& flag, const std::vector<Vec>& u) {
    const PointsInLoop& lv = loop_level(flag);
    const int n = lv.loop.size();
    if (static_cast<int>(u.size()) != n)
        throw IncompatibleTangent("circulation: field size does not match the loop");
    const std::vector<Vec> phi = loop_tangent(lv.loop);
    double c = 0.0;
    for (int i = 0; i < n; ++i) c += omega_eval(u[i], phi[i]);
    return c * grid_step(n);
}

double kernel_residual(const WeightedFlag& flag, const std::vector<double>& Z, int trials,
                       std::uint64_t seed) {
    const FlagTangent zeta = generator(flag, Z);
    const double nz = tangent_norm(zeta);
    if (nz == 0.0) return 0.0;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const FlagTangent w = random_tangent(flag, Rng::stream(seed, t));
        const double nw = tangent_norm(w);
        if (nw == 0.0) continue;
        worst = std::max(worst, std::abs(omega_leafwise(flag, zeta, w)) / (nz * nw));
    }
    return worst;
}

namespace {

/// Solve the small dense system B c = y by Gaussian elimination with partial
/// pivoting; returns false when B is numerically singular.
bool solve_dense(std::vector<std::vector<double>> B, std::vector<double> y,
                 std::vector<double>& c) {
    const int k = static_cast<int>(y.size());
    c.assign(k, 0.0);
    for (int col = 0; col < k; ++col) {
        int piv = col;
        for (int r = col + 1; r < k; ++r)
            if (std::abs(B[r][col]) > std::abs(B[piv][col])) piv = r;
        if (std::abs(B[piv][col]) < 1e-12) return false;
        std::swap(B[piv], B[col]);
        std::swap(y[piv], y[col]);
        for (int r = col + 1; r < k; ++r) {
            const double m = B[r][col] / B[col][col];
            for (int cc = col; cc < k; ++cc) B[r][cc] -= m * B[col][cc];
            y[r] -= m * y[col];
        }
    }
    for (int r = k - 1; r >= 0; --r) {
        double s = y[r];
        for (int cc = r + 1; cc < k; ++cc) s -= B[r][cc] * c[cc];
        c[r] = s / B[r][r];
    }
    return true;
}

double trig_basis(int l, double theta) {
    if (l == 0) return 1.0;
    const int m = (l + 1) / 2;
    return (l % 2 == 1) ? std::cos(m * theta) : std::sin(m * theta);
}

}  // namespace

std::vector<double> vanish_at_marks(std::vector<double> field, const std::vector<int>& marked) {
    const int n = static_cast<int>(field.size());
    const int k = static_cast<int>(marked.size());
    if (k == 0) return field;

    std::vector<std::vector<double>> B(k, std::vector<double>(k));
    std::vector<double> y(k);
    for (int r = 0; r < k; ++r) {
        const double theta = grid_theta(marked[r], n);
        for (int c = 0; c < k; ++c) B[r][c] = trig_basis(c, theta);
        y[r] = field[marked[r]];
    }
    std::vector<double> coef;
    if (solve_dense(B, y, coef)) {
        for (int i = 0; i < n; ++i) {
            const double theta = grid_theta(i, n);
            for (int c = 0; c < k; ++c) field[i] -= coef[c] * trig_basis(c, theta);
        }
    } else {
        // Piecewise-linear fallback for degenerate mark configurations.
        for (int a = 0; a < k; ++a) {
            const int ia = marked[a];
            const int span = (marked[(a + 1) % k] - ia + n) % n;
            const int len = (span == 0) ? n : span;
            const double va = field[ia];
            const double vb = field[(ia + len) % n];
            for (int s = 0; s < len; ++s) {
                const double frac = static_cast<double>(s) / len;
                field[(ia + s) % n] -= (1.0 - frac) * va + frac * vb;
            }
        }
    }
    for (int m : marked) field[m] = 0.0;
    return field;
}

FlagTangent random_tangent(const WeightedFlag& flag, std::uint64_t seed) {
    const PointsInLoop& lv = loop_level(flag);
    const int n = lv.loop.size();
    const int dim = flag.dimension;
    const double dth = grid_step(n);
    Rng rng(seed);

    // Low-order Fourier fields; coefficients are drawn in an order that does
    // not depend on n, so one seed describes one continuum field at every
    // resolution.
    constexpr int kOrder = 3;
    std::vector<std::vector<double>> ua(dim), ub(dim);
    for (int c = 0; c < dim; ++c) {
        for (int m = 0; m <= kOrder; ++m) {
            ua[c].push_back(rng.normal() * 0.3 / (1.0 + m * m));
            ub[c].push_back(rng.normal() * 0.3 / (1.0 + m * m));
        }
    }
    std::vector<double> la, lb;
    for (int m = 0; m <= kOrder; ++m) {
        la.push_back(rng.normal() * 0.3 / (1.0 + m * m));
        lb.push_back(rng.normal() * 0.3 / (1.0 + m * m));
    }

    // Seeded Hamiltonian ingredient (automatically isodrastic).
    TestFunction f;
    for (int b = 0; b < 2; ++b) {
        GaussianBump bump;
        bump.center.resize(dim);
        for (int c = 0; c < dim; ++c) bump.center[c] = rng.normal() * 0.8;
        bump.width = 1.0 + rng.uniform();
        bump.amp = 0.4 * rng.normal();
        f.bumps.push_back(std::move(bump));
    }

    FlagTangent t;
    t.u.resize(n);
    t.lambda.resize(n);
    for (int i = 0; i < n; ++i) {
        const double theta = grid_theta(i, n);
        t.u[i].assign(dim, 0.0);
        for (int c = 0; c < dim; ++c)
            for (int m = 0; m <= kOrder; ++m)
                t.u[i][c] += ua[c][m] * std::cos(m * theta) + ub[c][m] * std::sin(m * theta);
        axpy(t.u[i], 1.0, hamiltonian_vf(f, lv.loop.vertices[i]));
        t.lambda[i] = 0.0;
        for (int m = 0; m <= kOrder; ++m)
            t.lambda[i] += la[m] * std::cos(m * theta) + lb[m] * std::sin(m * theta);
    }

    t.lambda = vanish_at_marks(std::move(t.lambda), lv.loop.marked);

    // Remove the circulation of the velocity field exactly: subtract a
    // multiple of the field q with omega(q, phi') = 1 pointwise.
    const std::vector<Vec> phi = loop_tangent(lv.loop);
    double circ = 0.0;
    for (int i = 0; i < n; ++i) circ += omega_eval(t.u[i], phi[i]);
    circ *= dth;
    for (int i = 0; i < n; ++i) {
        Vec q(dim, 0.0);
        double n2 = dot(phi[i], phi[i]);
        for (int c = 0; c + 1 < dim; c += 2) {
            q[c] = phi[i][c + 1] / n2;
            q[c + 1] = -phi[i][c] / n2;
        }
        axpy(t.u[i], -circ / kTwoPi, q);
    }
    return t;
}

}  // namespace flagsim
