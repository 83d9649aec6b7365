#include "flagsim/symplectic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flagsim/errors.hpp"

namespace flagsim {

double omega_eval(const Vec& u, const Vec& v) {
    if (u.size() != v.size() || u.size() % 2 != 0 || u.empty())
        throw DimensionMismatch("omega_eval: arguments must share an even dimension");
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < u.size(); i += 2) s += u[i] * v[i + 1] - u[i + 1] * v[i];
    return s;
}

namespace {

double ipow(double x, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= x;
    return r;
}

}  // namespace

double TestFunction::value(const Vec& x) const {
    double s = 0.0;
    for (const PolyTerm& t : poly) {
        if (t.exponents.size() != x.size())
            throw DimensionMismatch("test function: polynomial exponent count");
        double m = t.coeff;
        for (std::size_t i = 0; i < x.size(); ++i) m *= ipow(x[i], t.exponents[i]);
        s += m;
    }
    for (const GaussianBump& b : bumps) {
        if (b.center.size() != x.size())
            throw DimensionMismatch("test function: bump center dimension");
        double r2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - b.center[i];
            r2 += d * d;
        }
        s += b.amp * std::exp(-r2 / (2.0 * b.width * b.width));
    }
    return s;
}

Vec TestFunction::gradient(const Vec& x) const {
    Vec g(x.size(), 0.0);
    for (const PolyTerm& t : poly) {
        if (t.exponents.size() != x.size())
            throw DimensionMismatch("test function: polynomial exponent count");
        for (std::size_t j = 0; j < x.size(); ++j) {
            const int e = t.exponents[j];
            if (e == 0) continue;
            double m = t.coeff * e * ipow(x[j], e - 1);
            for (std::size_t i = 0; i < x.size(); ++i)
                if (i != j) m *= ipow(x[i], t.exponents[i]);
            g[j] += m;
        }
    }
    for (const GaussianBump& b : bumps) {
        if (b.center.size() != x.size())
            throw DimensionMismatch("test function: bump center dimension");
        double r2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - b.center[i];
            r2 += d * d;
        }
        const double w2 = b.width * b.width;
        const double e = b.amp * std::exp(-r2 / (2.0 * w2));
        for (std::size_t i = 0; i < x.size(); ++i) g[i] -= e * (x[i] - b.center[i]) / w2;
    }
    return g;
}

Vec hamiltonian_vf(const TestFunction& f, const Vec& x) {
    if (x.size() % 2 != 0 || x.empty())
        throw DimensionMismatch("hamiltonian_vf: odd dimension");
    const Vec g = f.gradient(x);
    Vec X(x.size());
    for (std::size_t i = 0; i + 1 < x.size(); i += 2) {
        X[i] = g[i + 1];
        X[i + 1] = -g[i];
    }
    return X;
}

double action_integral(const std::vector<Vec>& vertices) {
    const int n = static_cast<int>(vertices.size());
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec& p = vertices[i];
        const Vec& q = vertices[(i + 1) % n];
        // theta at the edge midpoint against the edge vector.
        double c = 0.0;
        for (std::size_t j = 0; j + 1 < p.size(); j += 2) {
            const double mx = 0.5 * (p[j] + q[j]);
            const double my = 0.5 * (p[j + 1] + q[j + 1]);
            c += mx * (q[j + 1] - p[j + 1]) - my * (q[j] - p[j]);
        }
        s += 0.5 * c;
    }
    return s;
}

double action_integral(const DiscreteLoop& loop) { return action_integral(loop.vertices); }

double isotropy_residual(const DiscreteTorusGrid& t) {
    double r = 0.0;
    for (int i = 0; i < t.rows; ++i) {
        for (int j = 0; j < t.cols; ++j) {
            const Vec& p = t.at(i, j);
            const Vec drow = t.at((i + 1) % t.rows, j) - p;
            const Vec dcol = t.at(i, (j + 1) % t.cols) - p;
            r = std::max(r, std::abs(omega_eval(drow, dcol)));
        }
    }
    return r;
}

std::pair<double, double> meridian_action_pair(const DiscreteTorusGrid& t) {
    std::vector<Vec> first, second;
    for (int i = 0; i < t.rows; ++i) first.push_back(t.at(i, 0));
    for (int j = 0; j < t.cols; ++j) second.push_back(t.at(0, j));
    return {action_integral(first), action_integral(second)};
}

namespace {

Vec rk4_step(const TestFunction& f, const Vec& x, double dt) {
    const Vec k1 = hamiltonian_vf(f, x);
    Vec t = x;
    axpy(t, 0.5 * dt, k1);
    const Vec k2 = hamiltonian_vf(f, t);
    t = x;
    axpy(t, 0.5 * dt, k2);
    const Vec k3 = hamiltonian_vf(f, t);
    t = x;
    axpy(t, dt, k3);
    const Vec k4 = hamiltonian_vf(f, t);
    Vec out = x;
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

Vec midpoint_step(const TestFunction& f, const Vec& x, double dt) {
    // Implicit midpoint by fixed-point iteration on the stage derivative.
    Vec k = hamiltonian_vf(f, x);
    for (int it = 0; it < 50; ++it) {
        Vec mid = x;
        axpy(mid, 0.5 * dt, k);
        Vec k_new = hamiltonian_vf(f, mid);
        double delta = 0.0;
        for (std::size_t i = 0; i < k.size(); ++i) delta = std::max(delta, std::abs(k_new[i] - k[i]));
        k = std::move(k_new);
        if (delta < 1e-15) break;
    }
    Vec out = x;
    axpy(out, dt, k);
    return out;
}

Vec advance(const TestFunction& f, const Vec& x, double dt, FlowScheme scheme) {
    return scheme == FlowScheme::rk4 ? rk4_step(f, x, dt) : midpoint_step(f, x, dt);
}

double min_edge_length(const WeightedFlag& flag) {
    double e = std::numeric_limits<double>::infinity();
    if (flag.is_loop_mode()) {
        const auto& v = flag.pl().loop.vertices;
        const int n = static_cast<int>(v.size());
        for (int i = 0; i < n; ++i) e = std::min(e, dist(v[i], v[(i + 1) % n]));
    } else {
        const auto& t = flag.lt().torus;
        for (int i = 0; i < t.rows; ++i)
            for (int j = 0; j < t.cols; ++j) {
                e = std::min(e, dist(t.at(i, j), t.at((i + 1) % t.rows, j)));
                e = std::min(e, dist(t.at(i, j), t.at(i, (j + 1) % t.cols)));
            }
    }
    return e;
}

void collect_state(WeightedFlag& flag, std::vector<Vec*>& state) {
    state.clear();
    if (flag.is_loop_mode()) {
        for (Vec& p : flag.pl().points.positions) state.push_back(&p);
        for (Vec& v : flag.pl().loop.vertices) state.push_back(&v);
    } else {
        for (Vec& v : flag.lt().torus.grid) state.push_back(&v);
    }
}

std::vector<DriftRecord> invariant_snapshot(const WeightedFlag& flag) {
    std::vector<DriftRecord> recs;
    auto add = [&recs](const std::string& name, double v) {
        recs.push_back({name, v, v, 0.0});
    };
    const MassSignature sig = component_masses(flag);
    if (flag.is_loop_mode()) {
        add("action_integral", action_integral(flag.pl().loop));
        double wsum = 0.0;
        for (double w : sig.levels[0]) wsum += w;
        add("point_weight_total", wsum);
        for (std::size_t i = 0; i < sig.levels[1].size(); ++i)
            add("arc_mass_" + std::to_string(i), sig.levels[1][i]);
    } else {
        const auto [a1, a2] = meridian_action_pair(flag.lt().torus);
        add("meridian_action_1", a1);
        add("meridian_action_2", a2);
        for (std::size_t i = 0; i < sig.levels[0].size(); ++i)
            add("loop_mass_" + std::to_string(i), sig.levels[0][i]);
        for (std::size_t i = 0; i < sig.levels[1].size(); ++i)
            add("band_mass_" + std::to_string(i), sig.levels[1][i]);
    }
    return recs;
}

}  // namespace

FlowResult flow_flag(const WeightedFlag& flag, const TestFunction& f, double T, double dt,
                     FlowScheme scheme) {
    if (dt <= 0.0) throw ValidationError("flow_flag: dt must be positive");
    if (T < 0.0) throw ValidationError("flow_flag: negative horizon");
    if (T / dt > 1e8) throw ValidationError("flow_flag: more than 1e8 steps requested");

    FlowResult res{flag, {}};
    std::vector<DriftRecord> recs = invariant_snapshot(flag);

    // Land on T exactly with a uniform step no larger than requested.
    const long n_steps = T == 0.0 ? 0 : static_cast<long>(std::ceil(T / dt - 1e-9));
    const double step = n_steps > 0 ? T / n_steps : 0.0;

    std::vector<Vec*> state;
    collect_state(res.flag, state);
    std::vector<Vec> next(state.size());

    for (long s = 0; s < n_steps; ++s) {
        const double limit = 0.1 * min_edge_length(res.flag);
        double disp = 0.0;
        for (std::size_t i = 0; i < state.size(); ++i) {
            next[i] = advance(f, *state[i], step, scheme);
            disp = std::max(disp, dist(next[i], *state[i]));
        }
        if (disp > limit)
            throw StepTooLarge("flow_flag: step displacement exceeds 10% of the minimum edge");
        for (std::size_t i = 0; i < state.size(); ++i) *state[i] = next[i];
        res.diagnostics.max_step_displacement =
            std::max(res.diagnostics.max_step_displacement, disp);
    }

    res.diagnostics.steps = n_steps;
    res.diagnostics.final_nesting_residual = nesting_residual(res.flag);

    const std::vector<DriftRecord> after = invariant_snapshot(res.flag);
    for (std::size_t i = 0; i < recs.size(); ++i) {
        recs[i].final_value = after[i].initial;
        const double scale = std::abs(recs[i].initial);
        recs[i].relative_drift =
            std::abs(recs[i].final_value - recs[i].initial) / (scale > 0.0 ? scale : 1.0);
    }
    res.diagnostics.drift = std::move(recs);
    return res;
}

Vec flow_point(const TestFunction& f, Vec x, double T, double dt, FlowScheme scheme) {
    if (dt <= 0.0) throw ValidationError("flow_point: dt must be positive");
    const long n_steps = T == 0.0 ? 0 : static_cast<long>(std::ceil(T / dt - 1e-9));
    const double step = n_steps > 0 ? T / n_steps : 0.0;
    for (long s = 0; s < n_steps; ++s) x = advance(f, x, step, scheme);
    return x;
}

}  // namespace flagsim
